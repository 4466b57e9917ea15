#include "curvemoments/strichartz.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace curvemoments {

namespace {

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

} // namespace

FrequencySet spacetime_set(int n, std::int64_t R, const SpacetimeForm& form) {
    switch (form.kind) {
        case SpacetimeForm::Kind::Unit: return paraboloid_points(n, R);
        case SpacetimeForm::Kind::Integer: return paraboloid_points(n, R, form.q);
        case SpacetimeForm::Kind::RealAlpha: return irrational_paraboloid_points(n, R, form.alpha);
    }
    throw std::logic_error("spacetime_set: bad form");
}

MomentReport strichartz_ratio(int n, std::int64_t R, double q, const ModelSpec& model,
                              const SpacetimeForm& form, const GridPolicy& policy) {
    const FrequencySet fs = spacetime_set(n, R, form);
    return moment_ratio(fs, model, q, policy);
}

LevelSetReport level_set_distribution(const FieldSamples& samples, std::vector<double> lambdas,
                                      double R, int n, double q1) {
    for (double l : lambdas)
        if (!(l > 0)) throw std::invalid_argument("level_set_distribution: lambdas must be positive");
    if (!std::is_sorted(lambdas.begin(), lambdas.end()))
        throw std::invalid_argument("level_set_distribution: lambdas must be sorted");
    LevelSetReport rep;
    rep.lambdas = std::move(lambdas);
    rep.R = R;
    rep.n = n;
    rep.q1 = q1;
    const double threshold = std::pow(R, n / 4.0);
    const auto total = static_cast<double>(samples.values.size());
    for (double l : rep.lambdas) {
        std::size_t count = 0;
        const double l2 = l * l;
        for (const cplx& v : samples.values)
            if (std::norm(v) > l2) ++count;
        rep.measures.push_back(static_cast<double>(count) / total);
        rep.above_threshold.push_back(l > threshold);
    }
    if (q1 > 0.0) {
        const double envelope = std::pow(R, (n / 2.0) * q1 - (n + 2.0));
        for (std::size_t i = 0; i < rep.lambdas.size(); ++i) {
            if (!rep.above_threshold[i] || rep.measures[i] <= 0.0) continue;
            rep.fitted_constant = std::max(
                rep.fitted_constant, rep.measures[i] * std::pow(rep.lambdas[i], q1) / envelope);
        }
    }
    return rep;
}

std::vector<double> default_lambda_grid(const FieldSamples& samples, double R, int n, int count) {
    const double lo = std::pow(R, n / 4.0) / 16.0;
    double max_abs = 0.0;
    for (const cplx& v : samples.values) max_abs = std::max(max_abs, std::norm(v));
    max_abs = std::sqrt(max_abs);
    if (max_abs <= lo || count < 2) return {lo};
    std::vector<double> grid(count);
    for (int i = 0; i < count; ++i)
        grid[i] = lo * std::pow(max_abs / lo, static_cast<double>(i) / (count - 1));
    return grid;
}

EpsilonRemovalRecord epsilon_removal_check(const FieldSamples& samples, int n, double R, double q,
                                           double q0, double q1) {
    if (std::abs(q0 - 2.0 * (n + 1) / n) > 1e-12)
        throw std::invalid_argument("epsilon_removal_check: q0 must be 2(n+1)/n");
    if (!(q > q1) || !(q1 > 2.0 * (n + 2) / n))
        throw std::invalid_argument("epsilon_removal_check: need q > q1 > 2(n+2)/n");
    EpsilonRemovalRecord rec;
    rec.threshold = std::pow(R, n / 4.0);
    const double theta2 = rec.threshold * rec.threshold;
    CompensatedSum lhs, above, low;
    for (const cplx& v : samples.values) {
        const double m2 = std::norm(v);
        const double vq = std::pow(m2, q / 2.0);
        lhs.add(vq);
        if (m2 > theta2) above.add(vq);
        low.add(std::pow(m2, q0 / 2.0));
    }
    const auto total = static_cast<double>(samples.values.size());
    rec.lhs = lhs.value() / total;
    rec.term1 = above.value() / total;
    rec.term2 = std::pow(R, (n / 4.0) * (q - q0)) * (low.value() / total);
    rec.split_holds = rec.lhs <= rec.term1 + rec.term2 + 1e-12 * std::max(1.0, rec.lhs);
    return rec;
}

SharpnessReport sharpness_witness(int n, const std::vector<std::int64_t>& Rs, double q,
                                  const GridPolicy& policy) {
    if (!(q >= 2.0 * (n + 3) / n - 1e-12))
        throw std::invalid_argument("sharpness_witness: need q >= 2(n+3)/n");
    SharpnessReport rep;
    rep.predicted_exponent = n / 2.0 - (n + 2.0) / q;
    for (std::int64_t R : Rs) {
        const MomentReport m = strichartz_ratio(n, R, q, ModelSpec{}, SpacetimeForm::unit(), policy);
        rep.ratios.emplace_back(static_cast<double>(R), m.ratio);
    }
    rep.fit = growth_fit(rep.ratios);
    return rep;
}

} // namespace curvemoments
