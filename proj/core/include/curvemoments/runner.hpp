#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace curvemoments {

// Config or input problems: the CLI maps these to exit code 2.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunResult {
    bool oracles_passed = true;
    std::vector<std::string> oracle_failures; // human-readable diff lines
    std::string csv_path;
    std::string summary_path;
};

// Parses, validates and executes one JSON experiment config. Appends CSV rows
// under <output>.csv, writes <output>.summary.json (config echo with defaults
// filled in, fitted slopes and per-oracle pass/fail). Deterministic for a
// fixed config: replays produce byte-identical rows.
RunResult run_config_text(const std::string& json_text);
RunResult run_config_file(const std::string& path);

// Two-column gnuplot-ready dump of a CSV, plus an optional single-polyline
// SVG (slope annotation in log-log mode). Missing columns and empty inputs
// raise ConfigError.
void emit_plot_data(std::istream& csv, const std::string& xcol, const std::string& ycol, bool loglog,
                    std::ostream& out, std::ostream* svg);

// Built-in cross-check battery ("quick" or "full"); prints one line per
// check, returns the number of failures.
int oracle_suite(const std::string& name, std::ostream& log);

} // namespace curvemoments
