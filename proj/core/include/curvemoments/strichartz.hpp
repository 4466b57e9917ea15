#pragma once

#include <cstdint>
#include <vector>

#include "curvemoments/moments.hpp"

namespace curvemoments {

// Dispersion relation for the space-time experiments: q(z) = |z|^2, an
// integer form z^T Q z, or an irrational-torus sum alpha_i z_i^2.
struct SpacetimeForm {
    enum class Kind { Unit, Integer, RealAlpha };
    Kind kind = Kind::Unit;
    SymMatrixI q;
    Vec alpha;

    static SpacetimeForm unit() { return {}; }
    static SpacetimeForm integer(SymMatrixI m) { return {Kind::Integer, std::move(m), {}}; }
    static SpacetimeForm real(Vec a) { return {Kind::RealAlpha, {}, std::move(a)}; }
};

// Frequencies {(z, q(z)) : |z| < R}.
FrequencySet spacetime_set(int n, std::int64_t R, const SpacetimeForm& form);

// ||e^{itD} f||_q / ||f||_2 on T^{n+1} for coefficients supported on
// {|z| < R}. Integer forms run as one (n+1)-dimensional transform on a grid
// non-aliased at order q (even q; doubling refinement otherwise); real forms
// refine the t resolution until the norm settles.
MomentReport strichartz_ratio(int n, std::int64_t R, double q, const ModelSpec& model,
                              const SpacetimeForm& form = {}, const GridPolicy& policy = {});

struct LevelSetReport {
    std::vector<double> lambdas;
    std::vector<double> measures; // fraction of grid points with |F| > lambda
    std::vector<bool> above_threshold; // lambda > R^{n/4}
    double R = 0.0;
    int n = 0;
    double q1 = 0.0;
    // smallest C with measure <= C R^{(n/2)q1-(n+2)} lambda^{-q1} over the
    // flagged lambdas; recorded, never asserted. 0 when q1 = 0 or no flagged
    // lambda carries positive measure.
    double fitted_constant = 0.0;
};

LevelSetReport level_set_distribution(const FieldSamples& samples, std::vector<double> lambdas,
                                      double R, int n, double q1 = 0.0);

// Geometric ladder from R^{n/4}/16 up to max |F|, bracketing the level-set
// threshold.
std::vector<double> default_lambda_grid(const FieldSamples& samples, double R, int n,
                                        int count = 17);

struct EpsilonRemovalRecord {
    double lhs = 0.0;       // avg |F|^q
    double term1 = 0.0;     // avg |F|^q over {|F| > R^{n/4}}
    double term2 = 0.0;     // R^{(n/4)(q-q0)} * avg |F|^{q0}
    double threshold = 0.0; // R^{n/4}
    bool split_holds = false;
};

// The moment-splitting step: |F|^q <= |F|^q 1_{|F|>theta} + theta^{q-q0}|F|^{q0}
// pointwise, so lhs <= term1 + term2 must hold to rounding on any field.
// Requires q > q1 > 2(n+2)/n and q0 = 2(n+1)/n.
EpsilonRemovalRecord epsilon_removal_check(const FieldSamples& samples, int n, double R, double q,
                                           double q0, double q1);

struct SharpnessReport {
    std::vector<std::pair<double, double>> ratios; // (R, measured ratio)
    double predicted_exponent = 0.0;               // n/2 - (n+2)/q
    GrowthFit fit;
};

// Unit-coefficient ratios over an R sweep with the fitted growth exponent;
// requires q > 2(n+3)/n.
SharpnessReport sharpness_witness(int n, const std::vector<std::int64_t>& Rs, double q,
                                  const GridPolicy& policy = {});

} // namespace curvemoments
