#include "curvemoments/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "curvemoments/arithmetic.hpp"
#include "curvemoments/caps.hpp"
#include "curvemoments/expsum.hpp"
#include "curvemoments/moments.hpp"
#include "curvemoments/parallel.hpp"
#include "curvemoments/strichartz.hpp"
#include "curvemoments/surfaces.hpp"

namespace curvemoments {

namespace {

using nlohmann::json;

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

std::string join_i64(const std::vector<std::int64_t>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) s += ' ';
        s += std::to_string(v[i]);
    }
    return s;
}

std::string join_grid(const std::vector<int>& dims) {
    std::string s;
    for (std::size_t i = 0; i < dims.size(); ++i) {
        if (i) s += 'x';
        s += std::to_string(dims[i]);
    }
    return s;
}

// -------- config --------

enum class Kind {
    MomentRatio,
    Decoupling,
    Multilinear,
    BroadNarrow,
    EnergyTable,
    Strichartz,
    Sharpness,
    EpsRemoval,
};

Kind kind_from_name(const std::string& s) {
    if (s == "moment-ratio") return Kind::MomentRatio;
    if (s == "decoupling") return Kind::Decoupling;
    if (s == "multilinear") return Kind::Multilinear;
    if (s == "broad-narrow") return Kind::BroadNarrow;
    if (s == "energy-table") return Kind::EnergyTable;
    if (s == "strichartz") return Kind::Strichartz;
    if (s == "sharpness") return Kind::Sharpness;
    if (s == "eps-removal") return Kind::EpsRemoval;
    throw ConfigError("unknown experiment kind: " + s);
}

struct ParsedConfig {
    Kind kind = Kind::MomentRatio;
    json raw;       // normalized echo
    std::string output;

    // surface (moment kinds)
    bool surface_is_sphere = true;
    int n = 0;
    SymMatrixI quadric;

    // space-time kinds
    SpacetimeForm form;

    std::vector<std::int64_t> sweep; // E, R, or M values
    std::int64_t range_lo = 0, range_hi = -1;

    double p = 0.0;
    double q = 0.0;
    double q1 = 0.0;
    ModelSpec model;
    double delta = 0.0;
    std::vector<double> K_ladder;
    int k_sets = 0;
    int resolution = 24;
    double cap_scale_K = 4.0;
    std::int64_t base_E = 0;
    GridPolicy grid;
};

json require(const json& j, const char* key) {
    if (!j.contains(key)) throw ConfigError(std::string("missing required field: ") + key);
    return j.at(key);
}

ModelSpec parse_model(const json& j) {
    ModelSpec m;
    if (j.contains("model")) {
        const json& mj = j.at("model");
        if (!mj.is_object()) throw ConfigError("model must be an object");
        m.kind = model_from_name(mj.value("kind", std::string("unit")));
        m.seed = mj.value("seed", std::uint64_t{0});
        m.cap_K = mj.value("cap_K", 8.0);
        m.cap_index = mj.value("cap_index", -1);
    }
    return m;
}

GridPolicy parse_grid(const json& j) {
    if (!j.contains("grid") || (j.at("grid").is_string() && j.at("grid") == "auto"))
        return GridPolicy::automatic();
    const json& g = j.at("grid");
    if (!g.is_array() || g.empty()) throw ConfigError("grid must be \"auto\" or an array of axis sizes");
    std::vector<int> dims;
    for (const auto& d : g) {
        if (!d.is_number_integer() || d.get<int>() < 1) throw ConfigError("grid sizes must be integers >= 1");
        dims.push_back(d.get<int>());
    }
    return GridPolicy::explicit_dims(std::move(dims));
}

std::vector<std::int64_t> parse_sweep(const json& j, const char* key = "sweep") {
    const json s = require(j, key);
    if (!s.is_array() || s.empty()) throw ConfigError(std::string(key) + " must be a nonempty array");
    std::vector<std::int64_t> out;
    for (const auto& v : s) {
        if (!v.is_number_integer()) throw ConfigError(std::string(key) + " entries must be integers");
        out.push_back(v.get<std::int64_t>());
    }
    return out;
}

SymMatrixI parse_int_matrix(const json& j) {
    if (!j.is_array() || j.empty()) throw ConfigError("integer form must be a square array of arrays");
    const int n = static_cast<int>(j.size());
    SymMatrixI m(n);
    for (int i = 0; i < n; ++i) {
        if (!j[i].is_array() || static_cast<int>(j[i].size()) != n)
            throw ConfigError("integer form must be square");
        for (int c = 0; c < n; ++c) {
            if (!j[i][c].is_number_integer()) throw ConfigError("integer form entries must be integers");
            m.at(i, c) = j[i][c].get<std::int64_t>();
        }
    }
    return m;
}

ParsedConfig parse_config(const json& j) {
    ParsedConfig cfg;
    cfg.kind = kind_from_name(require(j, "experiment").get<std::string>());
    cfg.output = require(j, "output").get<std::string>();
    cfg.model = parse_model(j);
    cfg.grid = parse_grid(j);

    const bool needs_surface = cfg.kind == Kind::MomentRatio || cfg.kind == Kind::Decoupling ||
                               cfg.kind == Kind::Multilinear || cfg.kind == Kind::BroadNarrow;
    if (needs_surface) {
        const json s = require(j, "surface");
        const std::string kind = require(s, "kind").get<std::string>();
        if (kind == "sphere") {
            cfg.surface_is_sphere = true;
            cfg.n = require(s, "n").get<int>();
        } else if (kind == "quadric") {
            cfg.surface_is_sphere = false;
            cfg.quadric = parse_int_matrix(require(s, "Q"));
            cfg.n = cfg.quadric.n;
        } else {
            throw ConfigError("surface.kind must be sphere or quadric for this experiment");
        }
    }

    switch (cfg.kind) {
        case Kind::MomentRatio:
        case Kind::Decoupling:
            cfg.sweep = parse_sweep(j);
            if (!j.contains("p") || !j.at("p").is_number())
                throw ConfigError("missing required field: p");
            cfg.p = j.at("p").get<double>();
            if (!(cfg.p >= 1)) throw ConfigError("p must be >= 1");
            if (cfg.kind == Kind::Decoupling) {
                cfg.delta = require(j, "delta").get<double>();
                if (!(cfg.delta > 0) || !(cfg.delta <= 1.0))
                    throw ConfigError("delta must lie in (0, 1]");
            }
            break;
        case Kind::Multilinear: {
            cfg.base_E = require(j, "E").get<std::int64_t>();
            cfg.k_sets = require(j, "k").get<int>();
            if (cfg.k_sets < 1 || cfg.k_sets > cfg.n)
                throw ConfigError("k must satisfy 1 <= k <= n");
            cfg.sweep = parse_sweep(j); // M values
            cfg.resolution = j.value("resolution", 24);
            if (cfg.resolution < 1) throw ConfigError("resolution must be >= 1");
            cfg.cap_scale_K = j.value("cap_scale_K", 4.0);
            if (j.contains("q"))
                cfg.q = j.at("q").get<double>();
            else if (cfg.k_sets >= 2)
                cfg.q = 2.0 * cfg.k_sets / (cfg.k_sets - 1.0);
            else
                throw ConfigError("q is required when k = 1");
            break;
        }
        case Kind::BroadNarrow: {
            cfg.sweep = parse_sweep(j);
            if (j.contains("K_ladder")) {
                for (const auto& v : j.at("K_ladder")) cfg.K_ladder.push_back(v.get<double>());
            } else if (j.contains("K")) {
                cfg.K_ladder.push_back(j.at("K").get<double>());
            } else {
                throw ConfigError("broad-narrow needs K or K_ladder");
            }
            for (double K : cfg.K_ladder)
                if (!(K >= 2.0)) throw ConfigError("cap scales must be >= 2");
            break;
        }
        case Kind::EnergyTable: {
            cfg.n = require(j, "n").get<int>();
            const json r = require(j, "range");
            if (!r.is_array() || r.size() != 2) throw ConfigError("range must be [lo, hi]");
            cfg.range_lo = r[0].get<std::int64_t>();
            cfg.range_hi = r[1].get<std::int64_t>();
            if (cfg.range_lo < 0) throw ConfigError("range values must be >= 0");
            break;
        }
        case Kind::Strichartz:
        case Kind::Sharpness:
        case Kind::EpsRemoval: {
            cfg.n = require(j, "n").get<int>();
            cfg.sweep = parse_sweep(j); // R values
            if (!j.contains("q") || !j.at("q").is_number())
                throw ConfigError("missing required field: q");
            cfg.q = j.at("q").get<double>();
            if (j.contains("form")) {
                const json& f = j.at("form");
                if (f.is_string() && f == "unit") {
                    cfg.form = SpacetimeForm::unit();
                } else if (f.is_array()) {
                    cfg.form = SpacetimeForm::integer(parse_int_matrix(f));
                } else if (f.is_object() && f.contains("alpha")) {
                    Vec alpha;
                    for (const auto& a : f.at("alpha")) alpha.push_back(a.get<double>());
                    cfg.form = SpacetimeForm::real(std::move(alpha));
                } else {
                    throw ConfigError("form must be \"unit\", an integer matrix, or {\"alpha\": [...]}");
                }
            }
            if (cfg.kind == Kind::Sharpness) {
                if (cfg.model.kind != CoefficientModel::Unit)
                    throw ConfigError("sharpness uses the unit coefficient model");
                if (!(cfg.q >= 2.0 * (cfg.n + 3) / cfg.n - 1e-12))
                    throw ConfigError("sharpness needs q >= 2(n+3)/n");
                if (cfg.sweep.size() < 2) throw ConfigError("sharpness needs at least two R values");
            }
            if (cfg.kind == Kind::EpsRemoval) {
                const double q1_floor = 2.0 * (cfg.n + 2) / cfg.n;
                cfg.q1 = j.value("q1", (q1_floor + cfg.q) / 2.0);
                if (!(cfg.q > cfg.q1) || !(cfg.q1 > q1_floor))
                    throw ConfigError("eps-removal needs q > q1 > 2(n+2)/n");
            }
            break;
        }
    }

    // normalized echo, defaults filled in
    json echo = j;
    echo["model"] = {{"kind", model_name(cfg.model.kind)},
                     {"seed", cfg.model.seed},
                     {"cap_K", cfg.model.cap_K},
                     {"cap_index", cfg.model.cap_index}};
    if (!echo.contains("grid")) echo["grid"] = "auto";
    if (cfg.kind == Kind::Multilinear) {
        echo["q"] = cfg.q;
        echo["resolution"] = cfg.resolution;
        echo["cap_scale_K"] = cfg.cap_scale_K;
    }
    if (cfg.kind == Kind::EpsRemoval) echo["q1"] = cfg.q1;
    cfg.raw = std::move(echo);
    return cfg;
}

// -------- shared helpers --------

FrequencySet make_surface_set(const ParsedConfig& cfg, std::int64_t E) {
    FrequencySet fs = cfg.surface_is_sphere ? enumerate_sphere_lattice(cfg.n, E)
                                            : enumerate_quadric_lattice(cfg.quadric, E);
    if (fs.size() == 0)
        throw ConfigError("sweep value E=" + std::to_string(E) + " has no lattice points");
    return fs;
}

Surface config_surface(const ParsedConfig& cfg) {
    return cfg.surface_is_sphere ? Surface::sphere(cfg.n) : Surface::quadric(cfg.quadric);
}

// deterministic amplitudes for raw point lists (multilinear sets)
std::vector<cplx> gen_amps(const ModelSpec& spec, std::size_t count, std::uint64_t stream) {
    std::vector<cplx> amps(count);
    std::uint64_t state = spec.seed + 0x9e3779b97f4a7c15ULL * (stream + 1);
    for (auto& a : amps) {
        switch (spec.kind) {
            case CoefficientModel::Unit: a = 1.0; break;
            case CoefficientModel::RandomPhase:
                a = std::polar(1.0, 2.0 * 3.14159265358979323846 * uniform01(state));
                break;
            case CoefficientModel::RandomSign: a = uniform01(state) < 0.5 ? 1.0 : -1.0; break;
            case CoefficientModel::Gaussian: {
                const double u1 = uniform01(state);
                const double u2 = uniform01(state);
                a = std::polar(std::sqrt(-std::log1p(-u1)), 2.0 * 3.14159265358979323846 * u2);
                break;
            }
            case CoefficientModel::CapConcentrated: a = 1.0; break;
        }
    }
    return amps;
}

struct ExperimentOutput {
    std::string header;
    std::vector<std::string> rows;
    json summary_extra = json::object();
    std::vector<std::string> failures; // oracle diff lines
    std::map<std::string, bool> oracles;
    // extra files: path suffix -> (header, rows)
    std::vector<std::tuple<std::string, std::string, std::vector<std::string>>> extra_files;
};

void check(ExperimentOutput& out, const std::string& name, bool ok, const std::string& detail) {
    auto it = out.oracles.find(name);
    if (it == out.oracles.end())
        out.oracles[name] = ok;
    else
        it->second = it->second && ok;
    if (!ok) out.failures.push_back("oracle " + name + ": " + detail);
}

// -------- experiments --------

ExperimentOutput run_moment_ratio(const ParsedConfig& cfg) {
    ExperimentOutput out;
    out.header = "surface,n,D,p,model,seed,grid,norm_p,norm_2,ratio,defect,exact_flag";
    const std::size_t count = cfg.sweep.size();
    std::vector<MomentReport> reps(count);
    std::vector<double> coeff_l2(count), l4(count, -1.0);
    parallel_for(count, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const FrequencySet fs = make_surface_set(cfg, cfg.sweep[i]);
            reps[i] = moment_ratio(fs, cfg.model, cfg.p, cfg.grid);
            const CoefficientAssignment coeffs = make_coefficients(fs, cfg.model);
            coeff_l2[i] = coeffs.l2();
            if (cfg.p == 4.0) l4[i] = l4_exact(fs, coeffs);
        }
    }, /*grain=*/1);

    std::vector<std::pair<double, double>> ratio_vs_d;
    for (std::size_t i = 0; i < count; ++i) {
        const MomentReport& r = reps[i];
        out.rows.push_back(r.surface + ',' + std::to_string(r.n) + ',' + fmt(r.D) + ',' + fmt(r.p) +
                           ',' + model_name(r.model.kind) + ',' + std::to_string(r.model.seed) + ',' +
                           join_grid(r.grid_dims) + ',' + fmt(r.norm_p) + ',' + fmt(r.norm_2) + ',' +
                           fmt(r.ratio) + ",," + (r.quadrature_exact ? "1" : "0"));
        ratio_vs_d.emplace_back(r.D, r.ratio);
        check(out, "parseval", std::abs(r.norm_2 - coeff_l2[i]) <= 1e-10 * (1.0 + coeff_l2[i]),
              "grid L2 " + fmt(r.norm_2) + " vs coefficient l2 " + fmt(coeff_l2[i]) + " at E=" +
                  std::to_string(cfg.sweep[i]));
        if (l4[i] >= 0.0)
            check(out, "l4-dual-path", std::abs(r.norm_p - l4[i]) <= 1e-9 * std::max(1e-300, l4[i]),
                  "grid " + fmt(r.norm_p) + " vs convolution " + fmt(l4[i]) + " at E=" +
                      std::to_string(cfg.sweep[i]));
    }
    std::set<double> distinct;
    for (const auto& [d, y] : ratio_vs_d) distinct.insert(d);
    if (distinct.size() >= 2) {
        const GrowthFit fit = growth_fit(ratio_vs_d);
        out.summary_extra["fit"] = {{"slope", fit.slope},
                                    {"intercept", fit.intercept},
                                    {"max_residual", fit.max_residual}};
    }
    return out;
}

ExperimentOutput run_decoupling(const ParsedConfig& cfg) {
    ExperimentOutput out;
    out.header = "surface,n,D,p,model,seed,grid,norm_p,norm_2,ratio,defect,exact_flag";
    const CapPartition part(config_surface(cfg), 1.0 / cfg.delta);
    const std::size_t count = cfg.sweep.size();
    std::vector<DecouplingReport> reps(count);
    std::vector<DecouplingReport> reps_p2(count);
    std::vector<double> dils(count);
    parallel_for(count, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i) {
            const FrequencySet fs = make_surface_set(cfg, cfg.sweep[i]);
            const CoefficientAssignment coeffs = make_coefficients(fs, cfg.model);
            reps[i] = decoupling_defect(fs, coeffs, part, cfg.p, cfg.grid);
            reps_p2[i] = decoupling_defect(fs, coeffs, part, 2.0, cfg.grid);
            dils[i] = fs.dilation();
        }
    }, /*grain=*/1);

    std::vector<std::pair<double, double>> defect_vs_d;
    for (std::size_t i = 0; i < count; ++i) {
        const DecouplingReport& r = reps[i];
        out.rows.push_back(std::string(cfg.surface_is_sphere ? "sphere" : "quadric") + ',' +
                           std::to_string(cfg.n) + ',' + fmt(dils[i]) + ',' + fmt(r.p) + ',' +
                           model_name(cfg.model.kind) + ',' + std::to_string(cfg.model.seed) + ',' +
                           join_grid(r.grid_dims) + ',' + fmt(r.lhs) + ',' + fmt(r.rhs) + ',' +
                           fmt(r.defect) + ',' + fmt(r.defect) + ',' +
                           (r.quadrature_exact ? "1" : "0"));
        defect_vs_d.emplace_back(dils[i], r.defect);
        check(out, "defect-p2", std::abs(reps_p2[i].defect - 1.0) <= 1e-10,
              "p=2 defect " + fmt(reps_p2[i].defect) + " at E=" + std::to_string(cfg.sweep[i]));
    }
    std::set<double> distinct(dils.begin(), dils.end());
    if (distinct.size() >= 2) {
        const GrowthFit fit = growth_fit(defect_vs_d);
        out.summary_extra["fit"] = {{"slope", fit.slope},
                                    {"intercept", fit.intercept},
                                    {"max_residual", fit.max_residual}};
    }
    out.summary_extra["delta"] = cfg.delta;
    return out;
}

ExperimentOutput run_multilinear(const ParsedConfig& cfg) {
    ExperimentOutput out;
    out.header = "n,k,M,q,resolution,lhs,rhs,ratio";
    const FrequencySet fs = make_surface_set(cfg, cfg.base_E);
    const CapPartition part(config_surface(cfg), cfg.cap_scale_K);
    const auto groups = assign_points(part, fs);

    std::vector<int> ids;
    std::vector<Vec> normals;
    for (const auto& [cap, members] : groups) {
        ids.push_back(cap);
        normals.push_back(fs.surface().normal_at(part.caps()[cap].center));
    }
    const double threshold = 0.5 * std::pow(cfg.cap_scale_K, -cfg.k_sets);
    const auto tuple = transversal_tuple_search(normals, ids, cfg.k_sets, threshold);
    if (!tuple) throw ConfigError("no transversal cap tuple found; lower cap_scale_K or k");

    std::vector<std::vector<Vec>> sets;
    std::vector<std::vector<cplx>> amps;
    for (std::size_t t = 0; t < tuple->size(); ++t) {
        const auto& members = groups.at((*tuple)[t]);
        std::vector<Vec> pts;
        for (const Frequency& f : members) {
            Vec y(f.spatial.size());
            for (std::size_t c = 0; c < y.size(); ++c)
                y[c] = static_cast<double>(f.spatial[c]) / fs.dilation();
            pts.push_back(std::move(y));
        }
        amps.push_back(gen_amps(cfg.model, pts.size(), t));
        sets.push_back(std::move(pts));
    }
    out.summary_extra["caps"] = *tuple;

    // separation of the selected sets; M * sep^2 tracks how far each cube
    // size sits above the sep^-2 scale condition
    double min_sep = std::numeric_limits<double>::infinity();
    for (const auto& pts : sets)
        for (std::size_t a = 0; a < pts.size(); ++a)
            for (std::size_t b = a + 1; b < pts.size(); ++b) {
                double d2 = 0.0;
                for (std::size_t c = 0; c < pts[a].size(); ++c)
                    d2 += (pts[a][c] - pts[b][c]) * (pts[a][c] - pts[b][c]);
                min_sep = std::min(min_sep, std::sqrt(d2));
            }
    if (std::isfinite(min_sep)) {
        out.summary_extra["min_separation"] = min_sep;
        json cond = json::array();
        for (std::int64_t M : cfg.sweep) cond.push_back(static_cast<double>(M) * min_sep * min_sep);
        out.summary_extra["scale_condition"] = cond;
    }

    std::vector<std::pair<double, double>> ratio_vs_m;
    for (std::int64_t M : cfg.sweep) {
        const MultilinearReport rep =
            multilinear_average(sets, amps, static_cast<double>(M), cfg.resolution, cfg.q);
        out.rows.push_back(std::to_string(cfg.n) + ',' + std::to_string(cfg.k_sets) + ',' +
                           std::to_string(M) + ',' + fmt(cfg.q) + ',' + std::to_string(cfg.resolution) +
                           ',' + fmt(rep.lhs) + ',' + fmt(rep.rhs) + ',' + fmt(rep.ratio));
        ratio_vs_m.emplace_back(static_cast<double>(M), rep.ratio);
    }
    {
        const MultilinearReport again = multilinear_average(
            sets, amps, static_cast<double>(cfg.sweep.front()), cfg.resolution, cfg.q);
        const MultilinearReport first = multilinear_average(
            sets, amps, static_cast<double>(cfg.sweep.front()), cfg.resolution, cfg.q);
        check(out, "determinism", again.lhs == first.lhs,
              "re-evaluation drifted: " + fmt(again.lhs) + " vs " + fmt(first.lhs));
    }
    std::set<std::int64_t> distinct(cfg.sweep.begin(), cfg.sweep.end());
    if (distinct.size() >= 2) {
        const GrowthFit fit = growth_fit(ratio_vs_m);
        out.summary_extra["fit"] = {{"slope", fit.slope},
                                    {"intercept", fit.intercept},
                                    {"max_residual", fit.max_residual}};
    }
    return out;
}

ExperimentOutput run_broad_narrow(const ParsedConfig& cfg) {
    ExperimentOutput out;
    out.header = "surface,n,E,K,grid,points,broad_fraction,violations,degenerate";
    for (std::int64_t E : cfg.sweep) {
        const FrequencySet fs = make_surface_set(cfg, E);
        const CoefficientAssignment coeffs = make_coefficients(fs, cfg.model);
        for (double K : cfg.K_ladder) {
            const CapPartition part(fs.surface(), K);
            std::map<int, std::vector<std::size_t>> members;
            for (std::size_t i = 0; i < fs.size(); ++i)
                members[part.assign(fs.unit_point(i))].push_back(i);

            std::vector<int> dims = cfg.grid.kind == GridPolicy::Kind::Explicit
                                        ? cfg.grid.dims
                                        : auto_grid(fs, 2.0).dims;
            std::map<int, Vec> normals;
            std::vector<std::pair<int, FieldSamples>> cap_fields;
            for (const auto& [cap, idxs] : members) {
                CoefficientAssignment piece;
                piece.model = coeffs.model;
                piece.amps.assign(fs.size(), cplx{0.0, 0.0});
                for (std::size_t i : idxs) piece.amps[i] = coeffs.amps[i];
                cap_fields.emplace_back(cap, evaluate_periodic(fs, piece, TorusGrid{dims}));
                normals[cap] = fs.surface().normal_at(part.caps()[cap].center);
            }

            const std::size_t total = cap_fields.empty() ? 0 : cap_fields[0].second.values.size();
            const bool contract = static_cast<double>(members.size()) <=
                                  std::pow(K, cfg.n - 1) * (1.0 + 1e-12);
            std::size_t broad_count = 0, violations = 0, degenerate = 0;
            std::vector<std::string> dump;
            dump.reserve(total);
            for (std::size_t x = 0; x < total; ++x) {
                std::map<int, cplx> sums;
                double max_abs = 0.0;
                for (const auto& [cap, field] : cap_fields) {
                    sums[cap] = field.values[x];
                    max_abs = std::max(max_abs, std::abs(field.values[x]));
                }
                // grid coordinates of this sample
                std::string coords;
                {
                    std::size_t rem = x;
                    std::vector<int> idx(dims.size());
                    for (int c = static_cast<int>(dims.size()) - 1; c >= 0; --c) {
                        idx[c] = static_cast<int>(rem % dims[c]);
                        rem /= dims[c];
                    }
                    for (std::size_t c = 0; c < idx.size(); ++c) {
                        if (c) coords += ' ';
                        coords += fmt(static_cast<double>(idx[c]) / dims[c]);
                    }
                }
                if (max_abs == 0.0) {
                    ++degenerate;
                    dump.push_back(coords + ",degenerate,");
                    continue;
                }
                const Classification cls = classify_point(sums, normals, K, cfg.n);
                if (is_broad(cls)) {
                    ++broad_count;
                    const auto& b = std::get<Broad>(cls);
                    const auto [lhs, rhs] = broad_pointwise_bound(sums, cls, K, cfg.n);
                    if (contract && lhs > rhs * (1.0 + 1e-9)) ++violations;
                    std::string witness = "caps";
                    for (int c : b.caps) witness += ' ' + std::to_string(c);
                    witness += " wedge " + fmt(b.wedge) + " lhs " + fmt(lhs) + " rhs " + fmt(rhs);
                    dump.push_back(coords + ",broad," + witness);
                } else {
                    const auto& nar = std::get<Narrow>(cls);
                    std::string witness = "normal";
                    for (double v : nar.hyperplane_normal) witness += ' ' + fmt(v);
                    witness += " max " + fmt(nar.max_abs_sum);
                    dump.push_back(coords + ",narrow," + witness);
                }
            }
            out.rows.push_back(std::string(cfg.surface_is_sphere ? "sphere" : "quadric") + ',' +
                               std::to_string(cfg.n) + ',' + std::to_string(E) + ',' + fmt(K) + ',' +
                               join_grid(dims) + ',' + std::to_string(total) + ',' +
                               fmt(total ? static_cast<double>(broad_count) / total : 0.0) + ',' +
                               std::to_string(violations) + ',' + std::to_string(degenerate));
            if (contract)
                check(out, "broad-bound", violations == 0,
                      std::to_string(violations) + " pointwise bound violations at E=" +
                          std::to_string(E) + " K=" + fmt(K));
            out.extra_files.emplace_back(
                ".classify.E" + std::to_string(E) + ".K" + fmt(K) + ".csv",
                "x,variant,witness", std::move(dump));
            if (E == cfg.sweep.front()) {
                std::ostringstream caps_dump;
                part.dump(caps_dump);
                std::istringstream lines(caps_dump.str());
                std::string header, row;
                std::getline(lines, header);
                std::vector<std::string> rows;
                while (std::getline(lines, row)) rows.push_back(row);
                out.extra_files.emplace_back(".caps.K" + fmt(K) + ".csv", header.substr(2),
                                             std::move(rows));
            }
        }
    }
    return out;
}

ExperimentOutput run_energy_table(const ParsedConfig& cfg) {
    ExperimentOutput out;
    out.header = "n,E,r,K_all,K_nonzero,argmax";
    const KGrowthTable table = k_growth_table(cfg.n, cfg.range_lo, cfg.range_hi);
    for (const KGrowthRow& row : table.rows)
        out.rows.push_back(std::to_string(cfg.n) + ',' + std::to_string(row.E) + ',' +
                           std::to_string(row.r) + ',' + std::to_string(row.K_all) + ',' +
                           std::to_string(row.K_nonzero) + ',' + join_i64(row.argmax_nonzero));
    out.summary_extra["max_K_nonzero"] = table.max_K_nonzero;
    if (table.fit_valid)
        out.summary_extra["fit"] = {{"slope", table.fit.slope},
                                    {"intercept", table.fit.intercept},
                                    {"max_residual", table.fit.max_residual}};
    if (cfg.n == 2)
        check(out, "zygmund-k2", table.max_K_nonzero <= 2,
              "max K_nonzero " + std::to_string(table.max_K_nonzero) + " exceeds 2");
    if (cfg.n == 3 && cfg.range_hi <= 500) {
        bool equal = true;
        std::string detail;
        for (std::int64_t E = std::max<std::int64_t>(cfg.range_lo, 0); E <= cfg.range_hi && equal; ++E) {
            const FrequencySet fs = enumerate_sphere_lattice(3, E);
            std::map<std::vector<std::int64_t>, std::int64_t> counts;
            std::vector<std::int64_t> sum(3);
            for (const auto& a : fs.points())
                for (const auto& b : fs.points()) {
                    for (int c = 0; c < 3; ++c) sum[c] = a.spatial[c] + b.spatial[c];
                    ++counts[sum];
                }
            for (const auto& [xi, direct] : counts) {
                const std::int64_t proj = pair_count_by_projection(E, xi);
                if (proj != direct) {
                    equal = false;
                    detail = "E=" + std::to_string(E) + " xi=" + join_i64(xi) + " direct=" +
                             std::to_string(direct) + " projection=" + std::to_string(proj);
                    break;
                }
            }
        }
        check(out, "projection-count", equal, detail);
    }
    return out;
}

ExperimentOutput run_strichartz(const ParsedConfig& cfg) {
    ExperimentOutput out;
    out.header = "n,R,q,model,seed,ratio,predicted_exp,slope";
    const double predicted = cfg.n / 2.0 - (cfg.n + 2.0) / cfg.q;
    const std::size_t count = cfg.sweep.size();
    std::vector<MomentReport> reps(count);
    parallel_for(count, [&](std::size_t lo, std::size_t hi) {
        for (std::size_t i = lo; i < hi; ++i)
            reps[i] = strichartz_ratio(cfg.n, cfg.sweep[i], cfg.q, cfg.model, cfg.form, cfg.grid);
    }, /*grain=*/1);

    std::vector<std::pair<double, double>> ratio_vs_r;
    for (std::size_t i = 0; i < count; ++i)
        ratio_vs_r.emplace_back(static_cast<double>(cfg.sweep[i]), reps[i].ratio);
    std::set<std::int64_t> distinct(cfg.sweep.begin(), cfg.sweep.end());
    double slope = 0.0;
    bool have_fit = false;
    if (distinct.size() >= 2) {
        const GrowthFit fit = growth_fit(ratio_vs_r);
        slope = fit.slope;
        have_fit = true;
        out.summary_extra["fit"] = {{"slope", fit.slope},
                                    {"intercept", fit.intercept},
                                    {"max_residual", fit.max_residual}};
    }
    for (std::size_t i = 0; i < count; ++i)
        out.rows.push_back(std::to_string(cfg.n) + ',' + std::to_string(cfg.sweep[i]) + ',' +
                           fmt(cfg.q) + ',' + model_name(cfg.model.kind) + ',' +
                           std::to_string(cfg.model.seed) + ',' + fmt(reps[i].ratio) + ',' +
                           fmt(predicted) + ',' + (have_fit ? fmt(slope) : std::string()));
    out.summary_extra["predicted_exponent"] = predicted;

    // q=2 space-time Parseval on the smallest R
    {
        const std::int64_t r0 = *std::min_element(cfg.sweep.begin(), cfg.sweep.end());
        const MomentReport p2 = strichartz_ratio(cfg.n, r0, 2.0, cfg.model, cfg.form, cfg.grid);
        check(out, "ratio-q2", std::abs(p2.ratio - 1.0) <= 1e-10,
              "q=2 ratio " + fmt(p2.ratio) + " at R=" + std::to_string(r0));
    }
    if (cfg.q == 4.0 && cfg.form.kind != SpacetimeForm::Kind::RealAlpha) {
        for (std::size_t i = 0; i < count; ++i) {
            const FrequencySet fs = spacetime_set(cfg.n, cfg.sweep[i], cfg.form);
            const CoefficientAssignment coeffs = make_coefficients(fs, cfg.model);
            const double dual = l4_exact(fs, coeffs);
            check(out, "l4-dual-path",
                  std::abs(reps[i].norm_p - dual) <= 1e-9 * std::max(1e-300, dual),
                  "grid " + fmt(reps[i].norm_p) + " vs convolution " + fmt(dual) + " at R=" +
                      std::to_string(cfg.sweep[i]));
        }
    }
    return out;
}

ExperimentOutput run_sharpness(const ParsedConfig& cfg) {
    ExperimentOutput out;
    out.header = "n,R,q,model,seed,ratio,predicted_exp,slope";
    const SharpnessReport rep = sharpness_witness(cfg.n, cfg.sweep, cfg.q, cfg.grid);
    for (const auto& [R, ratio] : rep.ratios)
        out.rows.push_back(std::to_string(cfg.n) + ',' + fmt(R) + ',' + fmt(cfg.q) + ",unit,0," +
                           fmt(ratio) + ',' + fmt(rep.predicted_exponent) + ',' + fmt(rep.fit.slope));
    out.summary_extra["predicted_exponent"] = rep.predicted_exponent;
    out.summary_extra["fit"] = {{"slope", rep.fit.slope},
                                {"intercept", rep.fit.intercept},
                                {"max_residual", rep.fit.max_residual}};

    const std::int64_t r0 = *std::min_element(cfg.sweep.begin(), cfg.sweep.end());
    if (r0 <= 8) {
        // direct-summation cross-check of the fast path at the smallest R
        const FrequencySet fs = spacetime_set(cfg.n, r0, SpacetimeForm::unit());
        const CoefficientAssignment coeffs = make_coefficients(fs, ModelSpec{});
        const double order = 2.0 * std::ceil(cfg.q / 2.0);
        const FieldSamples fast = sample_field(fs, coeffs, order, GridPolicy::automatic());
        std::vector<Vec> freqs(fs.size()), points(fast.values.size());
        for (std::size_t i = 0; i < fs.size(); ++i) {
            Vec f(fs.points()[i].spatial.begin(), fs.points()[i].spatial.end());
            f.push_back(*fs.points()[i].temporal);
            freqs[i] = std::move(f);
        }
        const auto& dims = fast.grid.dims;
        for (std::size_t x = 0; x < points.size(); ++x) {
            std::size_t rem = x;
            Vec pt(dims.size());
            for (int c = static_cast<int>(dims.size()) - 1; c >= 0; --c) {
                pt[c] = static_cast<double>(rem % dims[c]) / dims[c];
                rem /= dims[c];
            }
            points[x] = std::move(pt);
        }
        const std::vector<cplx> direct = evaluate_direct(freqs, coeffs.amps, points);
        double worst = 0.0;
        for (std::size_t x = 0; x < direct.size(); ++x)
            worst = std::max(worst, std::abs(direct[x] - fast.values[x]));
        check(out, "fast-vs-direct", worst <= 1e-9 * static_cast<double>(fs.size()),
              "max |fast - direct| = " + fmt(worst) + " at R=" + std::to_string(r0));
    }
    return out;
}

ExperimentOutput run_eps_removal(const ParsedConfig& cfg) {
    ExperimentOutput out;
    out.header = "n,R,q,q0,q1,lhs,term1,term2,holds";
    const double q0 = 2.0 * (cfg.n + 1) / cfg.n;
    for (std::int64_t R : cfg.sweep) {
        const FrequencySet fs = spacetime_set(cfg.n, R, cfg.form);
        const CoefficientAssignment coeffs = make_coefficients(fs, cfg.model);
        const double order = 2.0 * std::ceil(cfg.q / 2.0);
        const FieldSamples samples = sample_field(fs, coeffs, order, cfg.grid);
        const EpsilonRemovalRecord rec =
            epsilon_removal_check(samples, cfg.n, static_cast<double>(R), cfg.q, q0, cfg.q1);
        out.rows.push_back(std::to_string(cfg.n) + ',' + std::to_string(R) + ',' + fmt(cfg.q) + ',' +
                           fmt(q0) + ',' + fmt(cfg.q1) + ',' + fmt(rec.lhs) + ',' + fmt(rec.term1) +
                           ',' + fmt(rec.term2) + ',' + (rec.split_holds ? "1" : "0"));
        check(out, "split-inequality", rec.split_holds,
              "lhs " + fmt(rec.lhs) + " > term1+term2 " + fmt(rec.term1 + rec.term2) + " at R=" +
                  std::to_string(R));

        const LevelSetReport levels = level_set_distribution(
            samples, default_lambda_grid(samples, static_cast<double>(R), cfg.n),
            static_cast<double>(R), cfg.n, cfg.q1);
        std::vector<std::string> level_rows;
        for (std::size_t i = 0; i < levels.lambdas.size(); ++i)
            level_rows.push_back(fmt(levels.lambdas[i]) + ',' + fmt(levels.measures[i]) + ',' +
                                 (levels.above_threshold[i] ? "1" : "0"));
        out.extra_files.emplace_back(".levels.R" + std::to_string(R) + ".csv",
                                     "lambda,measure,above_threshold_flag", std::move(level_rows));
        out.summary_extra["level_constant_R" + std::to_string(R)] = levels.fitted_constant;
    }
    return out;
}

void append_csv(const std::string& path, const std::string& header,
                const std::vector<std::string>& rows) {
    const std::filesystem::path p(path);
    if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
    const bool fresh = !std::filesystem::exists(p) || std::filesystem::file_size(p) == 0;
    std::ofstream os(path, std::ios::app | std::ios::binary);
    if (!os) throw ConfigError("cannot open output file: " + path);
    if (fresh) os << header << "\n";
    for (const std::string& row : rows) os << row << "\n";
}

} // namespace

RunResult run_config_text(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("invalid JSON: ") + e.what());
    }
    const ParsedConfig cfg = parse_config(j);

    ExperimentOutput out;
    switch (cfg.kind) {
        case Kind::MomentRatio: out = run_moment_ratio(cfg); break;
        case Kind::Decoupling: out = run_decoupling(cfg); break;
        case Kind::Multilinear: out = run_multilinear(cfg); break;
        case Kind::BroadNarrow: out = run_broad_narrow(cfg); break;
        case Kind::EnergyTable: out = run_energy_table(cfg); break;
        case Kind::Strichartz: out = run_strichartz(cfg); break;
        case Kind::Sharpness: out = run_sharpness(cfg); break;
        case Kind::EpsRemoval: out = run_eps_removal(cfg); break;
    }

    RunResult result;
    result.csv_path = cfg.output + ".csv";
    result.summary_path = cfg.output + ".summary.json";
    append_csv(result.csv_path, out.header, out.rows);
    for (const auto& [suffix, header, rows] : out.extra_files)
        append_csv(cfg.output + suffix, header, rows);

    json oracles = json::object();
    bool pass = true;
    for (const auto& [name, ok] : out.oracles) {
        oracles[name] = ok;
        pass = pass && ok;
    }
    json summary = {{"config", cfg.raw},
                    {"csv", result.csv_path},
                    {"rows", out.rows.size()},
                    {"oracles", oracles},
                    {"pass", pass}};
    for (auto& [key, value] : out.summary_extra.items()) summary[key] = value;
    {
        const std::filesystem::path p(result.summary_path);
        if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
        std::ofstream os(result.summary_path, std::ios::binary | std::ios::trunc);
        if (!os) throw ConfigError("cannot open summary file: " + result.summary_path);
        os << summary.dump(2) << "\n";
    }
    result.oracles_passed = pass;
    result.oracle_failures = out.failures;
    return result;
}

RunResult run_config_file(const std::string& path) {
    std::ifstream is(path, std::ios::binary);
    if (!is) throw ConfigError("cannot open config file: " + path);
    std::ostringstream buf;
    buf << is.rdbuf();
    return run_config_text(buf.str());
}

void emit_plot_data(std::istream& csv, const std::string& xcol, const std::string& ycol, bool loglog,
                    std::ostream& out, std::ostream* svg) {
    std::string line;
    if (!std::getline(csv, line)) throw ConfigError("empty CSV input");
    auto split = [](const std::string& s) {
        std::vector<std::string> cells;
        std::string cur;
        for (char c : s) {
            if (c == ',') {
                cells.push_back(cur);
                cur.clear();
            } else {
                cur += c;
            }
        }
        cells.push_back(cur);
        return cells;
    };
    const std::vector<std::string> header = split(line);
    auto find_col = [&](const std::string& name) {
        for (std::size_t i = 0; i < header.size(); ++i)
            if (header[i] == name) return i;
        throw ConfigError("column not found: " + name);
    };
    const std::size_t xi = find_col(xcol);
    const std::size_t yi = find_col(ycol);

    std::vector<std::pair<double, double>> data;
    while (std::getline(csv, line)) {
        if (line.empty()) continue;
        const std::vector<std::string> cells = split(line);
        if (cells.size() <= std::max(xi, yi)) continue;
        if (cells[xi].empty() || cells[yi].empty()) continue;
        try {
            const double x = std::stod(cells[xi]);
            const double y = std::stod(cells[yi]);
            if (loglog && (!(x > 0) || !(y > 0)))
                throw ConfigError("log-log requires positive values");
            data.emplace_back(x, y);
        } catch (const std::invalid_argument&) {
            continue; // non-numeric row
        } catch (const std::out_of_range&) {
            continue;
        }
    }
    if (data.empty()) throw ConfigError("no data rows for columns " + xcol + "," + ycol);

    out << "# " << xcol << ' ' << ycol << (loglog ? " (log-log)" : "") << "\n";
    for (const auto& [x, y] : data) out << fmt(x) << ' ' << fmt(y) << "\n";

    if (!svg) return;
    std::vector<std::pair<double, double>> plotted = data;
    if (loglog)
        for (auto& [x, y] : plotted) {
            x = std::log10(x);
            y = std::log10(y);
        }
    double xmin = plotted[0].first, xmax = xmin, ymin = plotted[0].second, ymax = ymin;
    for (const auto& [x, y] : plotted) {
        xmin = std::min(xmin, x);
        xmax = std::max(xmax, x);
        ymin = std::min(ymin, y);
        ymax = std::max(ymax, y);
    }
    if (xmax - xmin < 1e-12) xmax = xmin + 1.0;
    if (ymax - ymin < 1e-12) ymax = ymin + 1.0;
    const double w = 640, h = 480, ml = 70, mr = 20, mt = 20, mb = 50;
    auto px = [&](double x) { return ml + (x - xmin) / (xmax - xmin) * (w - ml - mr); };
    auto py = [&](double y) { return h - mb - (y - ymin) / (ymax - ymin) * (h - mt - mb); };
    *svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
            "viewBox=\"0 0 640 480\">\n";
    *svg << "<rect width=\"640\" height=\"480\" fill=\"white\"/>\n";
    *svg << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(h - mb) << "\" x2=\"" << fmt(w - mr)
         << "\" y2=\"" << fmt(h - mb) << "\" stroke=\"black\"/>\n";
    *svg << "<line x1=\"" << fmt(ml) << "\" y1=\"" << fmt(mt) << "\" x2=\"" << fmt(ml) << "\" y2=\""
         << fmt(h - mb) << "\" stroke=\"black\"/>\n";
    *svg << "<polyline fill=\"none\" stroke=\"steelblue\" stroke-width=\"1.5\" points=\"";
    for (std::size_t i = 0; i < plotted.size(); ++i) {
        if (i) *svg << ' ';
        *svg << fmt(px(plotted[i].first)) << ',' << fmt(py(plotted[i].second));
    }
    *svg << "\"/>\n";
    *svg << "<text x=\"" << fmt((ml + w - mr) / 2) << "\" y=\"" << fmt(h - 12)
         << "\" text-anchor=\"middle\" font-size=\"14\">" << xcol << (loglog ? " (log10)" : "")
         << "</text>\n";
    *svg << "<text x=\"16\" y=\"" << fmt((mt + h - mb) / 2)
         << "\" text-anchor=\"middle\" font-size=\"14\" transform=\"rotate(-90 16 "
         << fmt((mt + h - mb) / 2) << ")\">" << ycol << (loglog ? " (log10)" : "") << "</text>\n";
    *svg << "<text x=\"" << fmt(ml + 4) << "\" y=\"" << fmt(h - mb + 16) << "\" font-size=\"11\">"
         << fmt(loglog ? std::pow(10.0, xmin) : xmin) << "</text>\n";
    *svg << "<text x=\"" << fmt(w - mr) << "\" y=\"" << fmt(h - mb + 16)
         << "\" text-anchor=\"end\" font-size=\"11\">" << fmt(loglog ? std::pow(10.0, xmax) : xmax)
         << "</text>\n";
    if (loglog && data.size() >= 2) {
        bool distinct = false;
        for (const auto& [x, y] : data)
            if (x != data[0].first) distinct = true;
        if (distinct) {
            const GrowthFit fit = growth_fit(data);
            *svg << "<text x=\"" << fmt(w - mr - 6) << "\" y=\"" << fmt(mt + 16)
                 << "\" text-anchor=\"end\" font-size=\"13\">slope " << fmt(fit.slope)
                 << "</text>\n";
        }
    }
    *svg << "</svg>\n";
}

int oracle_suite(const std::string& name, std::ostream& log) {
    const bool full = name == "full";
    if (!full && name != "quick") throw ConfigError("unknown oracle suite: " + name);

    struct Check {
        std::string name;
        std::function<std::string()> run; // empty string = pass
    };
    std::vector<Check> checks;

    checks.push_back({"parseval-sphere", [&] {
        const FrequencySet fs = enumerate_sphere_lattice(2, 25);
        const CoefficientAssignment coeffs =
            make_coefficients(fs, ModelSpec{CoefficientModel::RandomPhase, 1});
        const FieldSamples samples = evaluate_periodic(fs, coeffs, auto_grid(fs, 2.0));
        const double grid_l2 = lp_norm(samples, 2.0);
        if (std::abs(grid_l2 - coeffs.l2()) > 1e-10 * (1.0 + coeffs.l2()))
            return "grid " + fmt(grid_l2) + " vs coeff " + fmt(coeffs.l2());
        return std::string();
    }});
    checks.push_back({"l4-dual-path", [&] {
        const FrequencySet fs = enumerate_sphere_lattice(2, 25);
        const CoefficientAssignment coeffs =
            make_coefficients(fs, ModelSpec{CoefficientModel::Gaussian, 7});
        const FieldSamples samples = evaluate_periodic(fs, coeffs, auto_grid(fs, 4.0));
        const double grid = lp_norm(samples, 4.0);
        const double dual = l4_exact(fs, coeffs);
        if (std::abs(grid - dual) > 1e-9 * dual) return "grid " + fmt(grid) + " vs dual " + fmt(dual);
        return std::string();
    }});
    checks.push_back({"zygmund-k2", [&] {
        const std::int64_t hi = full ? 1000 : 200;
        for (std::int64_t E = 1; E <= hi; ++E) {
            const FrequencySet fs = enumerate_sphere_lattice(2, E);
            if (fs.size() == 0) continue;
            const EnergyReport rep = additive_pairs_K(fs);
            if (rep.K_nonzero > 2) return "K_nonzero=" + std::to_string(rep.K_nonzero) + " at E=" +
                                          std::to_string(E);
        }
        return std::string();
    }});
    checks.push_back({"projection-count", [&] {
        const std::int64_t hi = full ? 200 : 60;
        for (std::int64_t E = 1; E <= hi; ++E) {
            const FrequencySet fs = enumerate_sphere_lattice(3, E);
            std::map<std::vector<std::int64_t>, std::int64_t> counts;
            std::vector<std::int64_t> sum(3);
            for (const auto& a : fs.points())
                for (const auto& b : fs.points()) {
                    for (int c = 0; c < 3; ++c) sum[c] = a.spatial[c] + b.spatial[c];
                    ++counts[sum];
                }
            for (const auto& [xi, direct] : counts)
                if (pair_count_by_projection(E, xi) != direct)
                    return "mismatch at E=" + std::to_string(E) + " xi=" + join_i64(xi);
        }
        return std::string();
    }});
    checks.push_back({"decoupling-p2", [&] {
        const FrequencySet fs = enumerate_sphere_lattice(2, 25);
        const CoefficientAssignment coeffs =
            make_coefficients(fs, ModelSpec{CoefficientModel::RandomPhase, 3});
        const CapPartition part(fs.surface(), 8.0);
        const DecouplingReport rep = decoupling_defect(fs, coeffs, part, 2.0);
        if (std::abs(rep.defect - 1.0) > 1e-10) return "p=2 defect " + fmt(rep.defect);
        return std::string();
    }});
    checks.push_back({"strichartz-q2", [&] {
        const MomentReport rep = strichartz_ratio(1, full ? 8 : 4, 2.0, ModelSpec{});
        if (std::abs(rep.ratio - 1.0) > 1e-10) return "q=2 ratio " + fmt(rep.ratio);
        return std::string();
    }});
    checks.push_back({"split-inequality", [&] {
        const FrequencySet fs = paraboloid_points(1, 4);
        const CoefficientAssignment coeffs =
            make_coefficients(fs, ModelSpec{CoefficientModel::Gaussian, 11});
        const FieldSamples samples = sample_field(fs, coeffs, 10.0, GridPolicy::automatic());
        const EpsilonRemovalRecord rec = epsilon_removal_check(samples, 1, 4.0, 10.0, 4.0, 7.0);
        if (!rec.split_holds)
            return "lhs " + fmt(rec.lhs) + " > " + fmt(rec.term1 + rec.term2);
        return std::string();
    }});
    checks.push_back({"fast-vs-direct-nonpow2", [&] {
        const FrequencySet fs = enumerate_sphere_lattice(2, 5);
        const CoefficientAssignment coeffs =
            make_coefficients(fs, ModelSpec{CoefficientModel::Gaussian, 13});
        const TorusGrid grid{{12, 15}};
        const FieldSamples fast = evaluate_periodic(fs, coeffs, grid);
        std::vector<Vec> freqs(fs.size()), points(fast.values.size());
        for (std::size_t i = 0; i < fs.size(); ++i)
            freqs[i] = Vec(fs.points()[i].spatial.begin(), fs.points()[i].spatial.end());
        for (std::size_t x = 0; x < points.size(); ++x)
            points[x] = {static_cast<double>(x / 15) / 12.0, static_cast<double>(x % 15) / 15.0};
        const std::vector<cplx> direct = evaluate_direct(freqs, coeffs.amps, points);
        for (std::size_t x = 0; x < points.size(); ++x)
            if (std::abs(direct[x] - fast.values[x]) > 1e-9)
                return "drift " + fmt(std::abs(direct[x] - fast.values[x]));
        return std::string();
    }});
    checks.push_back({"classify-total", [&] {
        std::uint64_t state = 99;
        const int trials = full ? 500 : 100;
        for (int t = 0; t < trials; ++t) {
            const int n = 2 + static_cast<int>(uniform01(state) * 2);
            const double K = 4.0 * (1 + static_cast<int>(uniform01(state) * 3));
            const int caps = 1 + static_cast<int>(uniform01(state) *
                                                  std::min(8.0, std::pow(K, n - 1)));
            std::map<int, cplx> sums;
            std::map<int, Vec> normals;
            for (int c = 0; c < caps; ++c) {
                sums[c] = std::polar(uniform01(state), 6.28 * uniform01(state));
                Vec v(n);
                double nn = 0.0;
                for (int d = 0; d < n; ++d) {
                    v[d] = uniform01(state) - 0.5;
                    nn += v[d] * v[d];
                }
                if (nn == 0.0) v[0] = 1.0;
                normals[c] = normalized(v);
            }
            double mx = 0.0;
            for (auto& [c, s] : sums) mx = std::max(mx, std::abs(s));
            if (mx == 0.0) sums[0] = 1.0;
            const Classification cls = classify_point(sums, normals, K, n);
            if (is_broad(cls)) {
                const auto [lhs, rhs] = broad_pointwise_bound(sums, cls, K, n);
                if (lhs > rhs * (1.0 + 1e-9))
                    return "bound violated: lhs " + fmt(lhs) + " rhs " + fmt(rhs);
            }
        }
        return std::string();
    }});

    int failures = 0;
    for (const Check& c : checks) {
        std::string detail;
        try {
            detail = c.run();
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        if (detail.empty()) {
            log << "ok   - " << c.name << "\n";
        } else {
            log << "FAIL - " << c.name << ": " << detail << "\n";
            ++failures;
        }
    }
    return failures;
}

} // namespace curvemoments
