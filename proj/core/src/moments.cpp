#include "curvemoments/moments.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>

#include "curvemoments/parallel.hpp"

namespace curvemoments {

namespace {

// Kahan-compensated sequential sum: deterministic and accurate enough for
// the 1e-10 oracle tolerances even on multi-million-sample grids.
class CompensatedSum {
public:
    void add(double x) {
        const double y = x - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    double value() const { return s_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

double mean_abs_pow(const FieldSamples& samples, double p) {
    CompensatedSum sum;
    if (p == 2.0) {
        for (const cplx& v : samples.values) sum.add(std::norm(v));
    } else if (p == 4.0) {
        for (const cplx& v : samples.values) {
            const double m = std::norm(v);
            sum.add(m * m);
        }
    } else {
        const double half = p / 2.0;
        for (const cplx& v : samples.values) sum.add(std::pow(std::norm(v), half));
    }
    return sum.value() / static_cast<double>(samples.values.size());
}

bool is_even_integer(double p) { return p > 0 && std::abs(p - 2.0 * std::round(p / 2.0)) < 1e-12; }

// exact p-th moments need an even p, integer temporal parts, and every axis
// non-aliased at order p
bool quadrature_exact_on(const FrequencySet& fs, double p, const std::vector<int>& dims) {
    if (!is_even_integer(p)) return false;
    if (fs.is_spacetime() && !fs.temporal_periodic()) return false;
    const std::vector<std::int64_t> bounds = fs.coordinate_bounds();
    if (bounds.size() != dims.size()) return false;
    for (std::size_t i = 0; i < bounds.size(); ++i)
        if (static_cast<double>(dims[i]) <= p * static_cast<double>(bounds[i])) return false;
    return true;
}

int t_slices_for(const FrequencySet& fs, double order) {
    double tmax = 0.0;
    for (const auto& f : fs.points()) tmax = std::max(tmax, std::abs(*f.temporal));
    std::int64_t m = 1;
    while (static_cast<double>(m) <= order * tmax) m <<= 1;
    return static_cast<int>(m);
}

FieldSamples evaluate_on(const FrequencySet& fs, const CoefficientAssignment& coeffs,
                         const std::vector<int>& dims) {
    if (fs.is_spacetime() && !fs.temporal_periodic()) {
        std::vector<int> x_dims(dims.begin(), dims.end() - 1);
        return schrodinger_samples(fs, coeffs, x_dims, dims.back());
    }
    return evaluate_periodic(fs, coeffs, TorusGrid{dims});
}

std::vector<int> auto_dims(const FrequencySet& fs, double order) {
    std::vector<int> dims = auto_grid(fs, order).dims;
    if (fs.is_spacetime() && !fs.temporal_periodic()) dims.push_back(t_slices_for(fs, order));
    return dims;
}

} // namespace

double lp_norm(const FieldSamples& samples, double p) {
    if (!(p >= 1.0)) throw std::invalid_argument("lp_norm: p must be >= 1");
    if (samples.values.empty()) throw std::invalid_argument("lp_norm: empty samples");
    return std::pow(mean_abs_pow(samples, p), 1.0 / p);
}

double l4_exact(const FrequencySet& fs, const CoefficientAssignment& coeffs) {
    if (coeffs.amps.size() != fs.size())
        throw std::invalid_argument("l4_exact: coefficients do not match the set");
    if (fs.is_spacetime() && !fs.temporal_periodic())
        throw std::invalid_argument("l4_exact: requires integer frequencies");
    const std::size_t m = fs.size();
    std::map<std::vector<std::int64_t>, cplx> conv;
    std::vector<std::vector<std::int64_t>> keys(m);
    for (std::size_t i = 0; i < m; ++i) {
        keys[i] = fs.points()[i].spatial;
        if (fs.is_spacetime())
            keys[i].push_back(static_cast<std::int64_t>(std::llround(*fs.points()[i].temporal)));
    }
    std::vector<std::int64_t> sum(keys.empty() ? 0 : keys[0].size());
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = keys[i][k] + keys[j][k];
            conv[sum] += coeffs.amps[i] * coeffs.amps[j];
        }
    }
    CompensatedSum total;
    for (const auto& [key, v] : conv) total.add(std::norm(v));
    return std::pow(total.value(), 0.25);
}

FieldSamples sample_field(const FrequencySet& fs, const CoefficientAssignment& coeffs, double order,
                          const GridPolicy& policy) {
    if (policy.kind == GridPolicy::Kind::Explicit) return evaluate_on(fs, coeffs, policy.dims);
    return evaluate_on(fs, coeffs, auto_dims(fs, order));
}

MomentReport moment_ratio(const FrequencySet& fs, const ModelSpec& model, double p,
                          const GridPolicy& policy) {
    if (fs.size() == 0) throw std::invalid_argument("moment_ratio: empty frequency set");
    const CoefficientAssignment coeffs = make_coefficients(fs, model);

    MomentReport rep;
    rep.surface = fs.surface().tag();
    rep.n = fs.surface().spatial_dim();
    rep.D = fs.dilation();
    rep.p = p;
    rep.model = model;

    FieldSamples samples;
    if (policy.kind == GridPolicy::Kind::Explicit) {
        samples = evaluate_on(fs, coeffs, policy.dims);
        rep.norm_p = lp_norm(samples, p);
        rep.quadrature_exact = quadrature_exact_on(fs, p, policy.dims);
    } else if (is_even_integer(p)) {
        samples = evaluate_on(fs, coeffs, auto_dims(fs, std::max(p, 2.0)));
        rep.norm_p = lp_norm(samples, p);
        rep.quadrature_exact = quadrature_exact_on(fs, p, samples.grid.dims);
    } else {
        // non-polynomial |f|^p: refine by doubling until the estimate settles
        const double order = 2.0 * std::ceil(p / 2.0);
        std::vector<int> dims = auto_dims(fs, order);
        samples = evaluate_on(fs, coeffs, dims);
        rep.norm_p = lp_norm(samples, p);
        for (int round = 0; round < 3; ++round) {
            for (int& d : dims) d *= 2;
            FieldSamples refined = evaluate_on(fs, coeffs, dims);
            const double next = lp_norm(refined, p);
            const bool settled = std::abs(next - rep.norm_p) <= 1e-6 * std::abs(next);
            samples = std::move(refined);
            rep.norm_p = next;
            if (settled) break;
        }
        rep.quadrature_exact = false;
    }
    rep.grid_dims = samples.grid.dims;
    rep.norm_2 = lp_norm(samples, 2.0);
    rep.ratio = rep.norm_p / rep.norm_2;
    return rep;
}

DecouplingReport decoupling_defect(const FrequencySet& fs, const CoefficientAssignment& coeffs,
                                   const CapPartition& part, double p, const GridPolicy& policy) {
    if (fs.size() == 0) throw std::invalid_argument("decoupling_defect: empty frequency set");
    if (coeffs.amps.size() != fs.size())
        throw std::invalid_argument("decoupling_defect: coefficients do not match the set");

    std::map<int, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < fs.size(); ++i) members[part.assign(fs.unit_point(i))].push_back(i);

    std::vector<int> dims;
    if (policy.kind == GridPolicy::Kind::Explicit)
        dims = policy.dims;
    else
        dims = auto_dims(fs, std::max(is_even_integer(p) ? p : 2.0 * std::ceil(p / 2.0), 2.0));

    const FieldSamples full = evaluate_on(fs, coeffs, dims);
    DecouplingReport rep;
    rep.delta = 1.0 / part.K();
    rep.p = p;
    rep.grid_dims = dims;
    rep.quadrature_exact = quadrature_exact_on(fs, p, dims);
    rep.lhs = lp_norm(full, p);

    double rhs_sq = 0.0;
    for (const auto& [cap, idxs] : members) {
        CoefficientAssignment piece;
        piece.model = coeffs.model;
        piece.amps.assign(fs.size(), cplx{0.0, 0.0});
        for (std::size_t i : idxs) piece.amps[i] = coeffs.amps[i];
        const double np = lp_norm(evaluate_on(fs, piece, dims), p);
        rhs_sq += np * np;
    }
    rep.rhs = std::sqrt(rhs_sq);
    if (rep.rhs == 0.0) throw std::invalid_argument("decoupling_defect: zero coefficients");
    rep.defect = rep.lhs / rep.rhs;
    return rep;
}

MultilinearReport multilinear_average(const std::vector<std::vector<Vec>>& sets,
                                      const std::vector<std::vector<cplx>>& amps, double M,
                                      int resolution, double q) {
    const std::size_t k = sets.size();
    if (k == 0 || amps.size() != k) throw std::invalid_argument("multilinear_average: bad set count");
    if (!(M > 0) || resolution < 1) throw std::invalid_argument("multilinear_average: bad grid");
    std::size_t dim = 0;
    for (std::size_t i = 0; i < k; ++i) {
        if (sets[i].size() != amps[i].size())
            throw std::invalid_argument("multilinear_average: freq/amp size mismatch");
        for (const Vec& v : sets[i]) {
            if (dim == 0) dim = v.size();
            if (v.size() != dim) throw std::invalid_argument("multilinear_average: mixed dimensions");
        }
        // 1/M separation within each set
        for (std::size_t a = 0; a < sets[i].size(); ++a)
            for (std::size_t b = a + 1; b < sets[i].size(); ++b) {
                double d2 = 0.0;
                for (std::size_t c = 0; c < dim; ++c) {
                    const double d = sets[i][a][c] - sets[i][b][c];
                    d2 += d * d;
                }
                if (d2 < (1.0 / (M * M)) * (1.0 - 1e-9))
                    throw std::invalid_argument("multilinear_average: set is not 1/M separated");
            }
    }
    if (dim == 0) throw std::invalid_argument("multilinear_average: empty sets");

    const auto g = static_cast<std::size_t>(resolution);
    std::size_t total = 1;
    for (std::size_t i = 0; i < dim; ++i) total *= g;
    const double exponent = q / static_cast<double>(k);

    std::vector<double> contrib(total);
    parallel_for(total, [&](std::size_t lo, std::size_t hi) {
        Vec x(dim);
        for (std::size_t flat = lo; flat < hi; ++flat) {
            std::size_t rem = flat;
            for (std::size_t c = dim; c-- > 0;) {
                const auto j = rem % g;
                rem /= g;
                x[c] = -M / 2.0 + (static_cast<double>(j) + 0.5) * M / static_cast<double>(g);
            }
            double prod = 1.0;
            for (std::size_t i = 0; i < k; ++i) {
                cplx f = 0.0;
                for (std::size_t a = 0; a < sets[i].size(); ++a) {
                    double phase = 0.0;
                    for (std::size_t c = 0; c < dim; ++c) phase += sets[i][a][c] * x[c];
                    f += amps[i][a] * std::polar(1.0, 2.0 * std::numbers::pi * phase);
                }
                prod *= std::pow(std::abs(f), exponent);
            }
            contrib[flat] = prod;
        }
    });
    CompensatedSum sum;
    for (double v : contrib) sum.add(v);

    MultilinearReport rep;
    rep.lhs = sum.value() / static_cast<double>(total);
    rep.rhs = 1.0;
    for (std::size_t i = 0; i < k; ++i) {
        double s = 0.0;
        for (const cplx& a : amps[i]) s += std::norm(a);
        rep.rhs *= std::pow(s, q / (2.0 * static_cast<double>(k)));
    }
    rep.ratio = rep.lhs / rep.rhs;
    return rep;
}

GrowthFit growth_fit(const std::vector<std::pair<double, double>>& scale_value) {
    std::vector<std::pair<double, double>> logs;
    for (const auto& [d, y] : scale_value) {
        if (!(d > 0) || !(y > 0))
            throw std::invalid_argument("growth_fit: scales and values must be positive");
        logs.emplace_back(std::log(d), std::log(y));
    }
    double min_x = 0, max_x = 0;
    if (!logs.empty()) {
        min_x = max_x = logs[0].first;
        for (const auto& [x, y] : logs) {
            min_x = std::min(min_x, x);
            max_x = std::max(max_x, x);
        }
    }
    if (logs.size() < 2 || max_x - min_x < 1e-12)
        throw std::invalid_argument("growth_fit: need at least two distinct scales");

    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (const auto& [x, y] : logs) {
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const auto m = static_cast<double>(logs.size());
    GrowthFit fit;
    fit.slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
    fit.intercept = (sy - fit.slope * sx) / m;
    for (const auto& [x, y] : logs)
        fit.max_residual = std::max(fit.max_residual, std::abs(y - (fit.slope * x + fit.intercept)));
    return fit;
}

} // namespace curvemoments
