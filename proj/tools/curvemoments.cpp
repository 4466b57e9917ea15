// Command-line front end: runs experiment configs, dumps plot data, and
// drives the built-in oracle battery.
//
//   curvemoments run <config.json>
//   curvemoments plot <csv> --x D --y ratio [--loglog] [--out file] [--svg file]
//   curvemoments oracle <quick|full>
//
// Exit codes: 0 success, 1 oracle mismatch, 2 invalid config/input.

#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "curvemoments/runner.hpp"

int main(int argc, char** argv) {
    CLI::App app{"numerical experiments for exponential sums on curved frequency sets"};
    app.require_subcommand(1);

    std::string config_path;
    CLI::App* run = app.add_subcommand("run", "execute a JSON experiment config");
    run->add_option("config", config_path, "path to config JSON")->required();

    std::string csv_path, xcol, ycol, out_path, svg_path;
    bool loglog = false;
    CLI::App* plot = app.add_subcommand("plot", "emit gnuplot-ready data from a results CSV");
    plot->add_option("csv", csv_path, "results CSV")->required();
    plot->add_option("--x", xcol, "x column name")->required();
    plot->add_option("--y", ycol, "y column name")->required();
    plot->add_flag("--loglog", loglog, "fit and annotate a log-log slope");
    plot->add_option("--out", out_path, "write data here instead of stdout");
    plot->add_option("--svg", svg_path, "also write an SVG line plot");

    std::string suite = "quick";
    CLI::App* oracle = app.add_subcommand("oracle", "run the built-in cross-check battery");
    oracle->add_option("suite", suite, "quick or full");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            const curvemoments::RunResult result = curvemoments::run_config_file(config_path);
            std::cout << "csv: " << result.csv_path << "\n";
            std::cout << "summary: " << result.summary_path << "\n";
            if (!result.oracles_passed) {
                std::cerr << "oracle mismatch:\n";
                for (const std::string& f : result.oracle_failures) std::cerr << "  " << f << "\n";
                return 1;
            }
            return 0;
        }
        if (plot->parsed()) {
            std::ifstream csv(csv_path, std::ios::binary);
            if (!csv) throw curvemoments::ConfigError("cannot open CSV: " + csv_path);
            std::ofstream out_file, svg_file;
            std::ostream* out = &std::cout;
            if (!out_path.empty()) {
                out_file.open(out_path, std::ios::binary | std::ios::trunc);
                if (!out_file) throw curvemoments::ConfigError("cannot open output: " + out_path);
                out = &out_file;
            }
            std::ostream* svg = nullptr;
            if (!svg_path.empty()) {
                svg_file.open(svg_path, std::ios::binary | std::ios::trunc);
                if (!svg_file) throw curvemoments::ConfigError("cannot open SVG output: " + svg_path);
                svg = &svg_file;
            }
            curvemoments::emit_plot_data(csv, xcol, ycol, loglog, *out, svg);
            return 0;
        }
        if (oracle->parsed()) {
            const int failures = curvemoments::oracle_suite(suite, std::cout);
            return failures == 0 ? 0 : 1;
        }
    } catch (const curvemoments::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 2;
}
