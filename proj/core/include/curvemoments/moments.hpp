#pragma once

#include <string>
#include <utility>
#include <vector>

#include "curvemoments/caps.hpp"
#include "curvemoments/expsum.hpp"

namespace curvemoments {

struct GridPolicy {
    enum class Kind { Auto, Explicit };
    Kind kind = Kind::Auto;
    std::vector<int> dims; // explicit only; temporal axis last for space-time sets

    static GridPolicy automatic() { return {}; }
    static GridPolicy explicit_dims(std::vector<int> d) {
        return GridPolicy{Kind::Explicit, std::move(d)};
    }
};

struct MomentReport {
    std::string surface;
    int n = 0;
    double D = 0.0;
    double p = 0.0;
    std::vector<int> grid_dims;
    ModelSpec model;
    double norm_p = 0.0;
    double norm_2 = 0.0; // measured grid L^2
    double ratio = 0.0;
    bool quadrature_exact = false;
};

struct DecouplingReport {
    double delta = 0.0;
    double p = 0.0;
    double lhs = 0.0;    // ||f||_p
    double rhs = 0.0;    // (sum_a ||f_a||_p^2)^(1/2)
    double defect = 0.0; // lhs / rhs
    std::vector<int> grid_dims;
    bool quadrature_exact = false;
};

struct MultilinearReport {
    double lhs = 0.0;
    double rhs = 0.0;
    double ratio = 0.0;
};

struct GrowthFit {
    double slope = 0.0;
    double intercept = 0.0;
    double max_residual = 0.0;
};

// (grid average of |v|^p)^(1/p). Exact to rounding for even integer p on a
// grid that is non-aliased at order p; a quadrature estimate otherwise.
double lp_norm(const FieldSamples& samples, double p);

// ||f||_4 through the convolution identity: int |f|^4 = sum_xi |(a*a)(xi)|^2,
// by exact pair summation over the support. Independent of any grid.
double l4_exact(const FrequencySet& fs, const CoefficientAssignment& coeffs);

// Builds coefficients, picks a grid (auto: exact for even p, doubling until a
// 1e-6 relative stop otherwise), evaluates and reports both norms.
MomentReport moment_ratio(const FrequencySet& fs, const ModelSpec& model, double p,
                          const GridPolicy& policy = {});

// ||f||_p versus the l^2 aggregate of the per-cap pieces, on one shared grid.
DecouplingReport decoupling_defect(const FrequencySet& fs, const CoefficientAssignment& coeffs,
                                   const CapPartition& part, double p, const GridPolicy& policy = {});

// Average over a uniform grid in the cube [-M/2, M/2]^n of prod_i |f_i|^(q/k)
// against prod_i (sum |a_i|^2)^(q/2k); the sets must be 1/M-separated. The
// cube stands in for the ball B_M.
MultilinearReport multilinear_average(const std::vector<std::vector<Vec>>& sets,
                                      const std::vector<std::vector<cplx>>& amps, double M,
                                      int resolution, double q);

// Least-squares fit of log y against log scale; slope is the empirical
// epsilon of a C * scale^eps law.
GrowthFit growth_fit(const std::vector<std::pair<double, double>>& scale_value);

// Shared helper: evaluates fs on an automatically sized (or explicit) grid;
// used by moment_ratio and the space-time experiments.
FieldSamples sample_field(const FrequencySet& fs, const CoefficientAssignment& coeffs, double order,
                          const GridPolicy& policy);

} // namespace curvemoments
