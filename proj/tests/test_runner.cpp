#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "curvemoments/moments.hpp"
#include "curvemoments/runner.hpp"

using namespace curvemoments;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    REQUIRE(is.good());
    std::ostringstream buf;
    buf << is.rdbuf();
    return buf.str();
}

std::size_t count_lines(const std::string& text) {
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    return n;
}

struct TempDir {
    fs::path path;
    TempDir() : path(fs::temp_directory_path() / ("curvemoments_test_" + std::to_string(::getpid()))) {
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string out(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("moment-ratio experiment writes rows and a slope") {
    TempDir tmp;
    const std::string config = R"({
        "experiment": "moment-ratio",
        "surface": {"kind": "sphere", "n": 2},
        "sweep": [25, 100, 400],
        "p": 4,
        "model": {"kind": "unit", "seed": 1},
        "output": ")" + tmp.out("mr") + R"("
    })";
    const RunResult result = run_config_text(config);
    CHECK(result.oracles_passed);
    const std::string csv = slurp(result.csv_path);
    CHECK(count_lines(csv) == 4); // header + 3 rows
    CHECK(csv.rfind("surface,n,D,p,model,seed,grid,norm_p,norm_2,ratio,defect,exact_flag\n", 0) == 0);

    const auto summary = nlohmann::json::parse(slurp(result.summary_path));
    CHECK(summary.at("pass") == true);
    CHECK(summary.at("rows") == 3);
    CHECK(summary.contains("fit"));
    CHECK(summary.at("config").at("model").at("seed") == 1);
}

TEST_CASE("summary slope equals a growth fit of the CSV rows") {
    TempDir tmp;
    const std::string config = R"({
        "experiment": "strichartz",
        "n": 1,
        "sweep": [4, 8, 16],
        "q": 4,
        "model": {"kind": "random-sign", "seed": 8},
        "output": ")" + tmp.out("slope") + R"("
    })";
    const RunResult result = run_config_text(config);
    REQUIRE(result.oracles_passed);

    std::istringstream csv(slurp(result.csv_path));
    std::string line;
    std::getline(csv, line); // header: n,R,q,model,seed,ratio,...
    std::vector<std::pair<double, double>> pts;
    while (std::getline(csv, line)) {
        std::istringstream row(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(row, cell, ',')) cells.push_back(cell);
        pts.emplace_back(std::stod(cells[1]), std::stod(cells[5]));
    }
    const auto summary = nlohmann::json::parse(slurp(result.summary_path));
    const double from_csv = curvemoments::growth_fit(pts).slope;
    CHECK(summary.at("fit").at("slope").get<double>() ==
          doctest::Approx(from_csv).epsilon(1e-9));
}

TEST_CASE("missing required fields are validation errors") {
    CHECK_THROWS_AS(run_config_text(R"({
        "experiment": "moment-ratio",
        "surface": {"kind": "sphere", "n": 2},
        "sweep": [25],
        "output": "/tmp/never"
    })"),
                    ConfigError);
    CHECK_THROWS_AS(run_config_text(R"({"experiment": "nope", "output": "/tmp/never"})"), ConfigError);
    CHECK_THROWS_AS(run_config_text("not json"), ConfigError);
    CHECK_THROWS_AS(run_config_text(R"({
        "experiment": "moment-ratio",
        "surface": {"kind": "sphere", "n": 2},
        "sweep": [],
        "p": 4,
        "output": "/tmp/never"
    })"),
                    ConfigError);
}

TEST_CASE("energy-table records the Zygmund constant") {
    TempDir tmp;
    const std::string config = R"({
        "experiment": "energy-table",
        "n": 2,
        "range": [1, 100],
        "output": ")" + tmp.out("et") + R"("
    })";
    const RunResult result = run_config_text(config);
    CHECK(result.oracles_passed);
    const auto summary = nlohmann::json::parse(slurp(result.summary_path));
    CHECK(summary.at("max_K_nonzero") == 2);
    CHECK(summary.at("oracles").at("zygmund-k2") == true);
}

TEST_CASE("replaying a config yields byte-identical CSV rows") {
    TempDir tmp;
    auto config_for = [&](const std::string& name) {
        return R"({
            "experiment": "strichartz",
            "n": 1,
            "sweep": [4, 8],
            "q": 4,
            "model": {"kind": "gaussian", "seed": 77},
            "output": ")" + tmp.out(name) + R"("
        })";
    };
    const RunResult a = run_config_text(config_for("a"));
    const RunResult b = run_config_text(config_for("b"));
    CHECK(a.oracles_passed);
    CHECK(slurp(a.csv_path) == slurp(b.csv_path));

    // appending a replay doubles the rows, byte-identically
    const std::string before = slurp(a.csv_path);
    run_config_text(config_for("a"));
    const std::string after = slurp(a.csv_path);
    const std::string rows = before.substr(before.find('\n') + 1);
    CHECK(after == before + rows);
}

TEST_CASE("decoupling experiment passes its p=2 oracle") {
    TempDir tmp;
    const std::string config = R"({
        "experiment": "decoupling",
        "surface": {"kind": "sphere", "n": 2},
        "sweep": [25, 100],
        "p": 4,
        "delta": 0.125,
        "output": ")" + tmp.out("dec") + R"("
    })";
    const RunResult result = run_config_text(config);
    CHECK(result.oracles_passed);
    const auto summary = nlohmann::json::parse(slurp(result.summary_path));
    CHECK(summary.at("oracles").at("defect-p2") == true);
}

TEST_CASE("broad-narrow experiment dumps classifications") {
    TempDir tmp;
    const std::string config = R"({
        "experiment": "broad-narrow",
        "surface": {"kind": "sphere", "n": 2},
        "sweep": [25],
        "K_ladder": [16, 32],
        "model": {"kind": "random-phase", "seed": 5},
        "grid": [32, 32],
        "output": ")" + tmp.out("bn") + R"("
    })";
    const RunResult result = run_config_text(config);
    CHECK(result.oracles_passed);
    const std::string csv = slurp(result.csv_path);
    CHECK(count_lines(csv) == 3); // header + one row per K
    const std::string dump = slurp(tmp.out("bn") + ".classify.E25.K16.csv");
    CHECK(count_lines(dump) == 1 + 32 * 32);
    CHECK(dump.rfind("x,variant,witness\n", 0) == 0);

    const std::string caps = slurp(tmp.out("bn") + ".caps.K16.csv");
    CHECK(caps.rfind("cap_index, center, scale\n", 0) == 0);
    CHECK(count_lines(caps) == 1 + 4 * 16); // 2n faces, ceil(K) cells each
}

TEST_CASE("quadric surfaces run through the moment pipeline") {
    TempDir tmp;
    const std::string config = R"({
        "experiment": "moment-ratio",
        "surface": {"kind": "quadric", "Q": [[1, 0], [0, 2]]},
        "sweep": [3, 25, 100],
        "p": 2,
        "output": ")" + tmp.out("quad") + R"("
    })";
    const RunResult result = run_config_text(config);
    CHECK(result.oracles_passed);
    const std::string csv = slurp(result.csv_path);
    CHECK(count_lines(csv) == 4);
    // p=2 ratios are 1 on every row
    std::istringstream rows(csv);
    std::string line;
    std::getline(rows, line);
    while (std::getline(rows, line)) CHECK(line.find(",1,,1") != std::string::npos);
}

TEST_CASE("irrational-alpha strichartz runs through the per-slice path") {
    TempDir tmp;
    const std::string config = R"({
        "experiment": "strichartz",
        "n": 1,
        "sweep": [4],
        "q": 4,
        "form": {"alpha": [1.4142135623730951]},
        "model": {"kind": "random-phase", "seed": 3},
        "grid": [32, 64],
        "output": ")" + tmp.out("irr") + R"("
    })";
    const RunResult result = run_config_text(config);
    CHECK(result.oracles_passed);
    CHECK(count_lines(slurp(result.csv_path)) == 2);
}

TEST_CASE("multilinear experiment sweeps the cube size") {
    TempDir tmp;
    const std::string config = R"({
        "experiment": "multilinear",
        "surface": {"kind": "sphere", "n": 2},
        "E": 25,
        "k": 2,
        "sweep": [8, 16],
        "resolution": 16,
        "output": ")" + tmp.out("ml") + R"("
    })";
    const RunResult result = run_config_text(config);
    CHECK(result.oracles_passed);
    const auto summary = nlohmann::json::parse(slurp(result.summary_path));
    CHECK(summary.at("config").at("q") == 4.0); // default 2k/(k-1)
    CHECK(count_lines(slurp(result.csv_path)) == 3);
}

TEST_CASE("eps-removal experiment writes level sets") {
    TempDir tmp;
    const std::string config = R"({
        "experiment": "eps-removal",
        "n": 1,
        "sweep": [4],
        "q": 10,
        "q1": 7,
        "model": {"kind": "random-phase", "seed": 2},
        "output": ")" + tmp.out("er") + R"("
    })";
    const RunResult result = run_config_text(config);
    CHECK(result.oracles_passed);
    const std::string levels = slurp(tmp.out("er") + ".levels.R4.csv");
    CHECK(levels.rfind("lambda,measure,above_threshold_flag\n", 0) == 0);
    CHECK(count_lines(levels) >= 2);
}

TEST_CASE("plot data emission") {
    SUBCASE("three rows give three data lines") {
        std::istringstream csv("D,ratio\n2,4\n4,16\n8,64\n");
        std::ostringstream out;
        emit_plot_data(csv, "D", "ratio", false, out, nullptr);
        CHECK(count_lines(out.str()) == 4); // comment + 3 points
    }
    SUBCASE("log-log slope is annotated in the SVG") {
        std::istringstream csv("D,y\n2,4\n4,16\n8,64\n16,256\n");
        std::ostringstream out, svg;
        emit_plot_data(csv, "D", "y", true, out, &svg);
        CHECK(svg.str().find("slope 2") != std::string::npos);
        CHECK(svg.str().find("<polyline") != std::string::npos);
    }
    SUBCASE("missing columns and empty inputs raise") {
        std::istringstream csv("D,ratio\n2,4\n");
        std::ostringstream out;
        CHECK_THROWS_AS(emit_plot_data(csv, "D", "zzz", false, out, nullptr), ConfigError);
        std::istringstream empty("");
        CHECK_THROWS_AS(emit_plot_data(empty, "D", "ratio", false, out, nullptr), ConfigError);
        std::istringstream headea("D,ratio\n");
        CHECK_THROWS_AS(emit_plot_data(headea, "D", "ratio", false, out, nullptr), ConfigError);
    }
}

TEST_CASE("quick oracle battery passes") {
    std::ostringstream log;
    CHECK(oracle_suite("quick", log) == 0);
    CHECK_THROWS_AS(oracle_suite("bogus", log), ConfigError);
}
