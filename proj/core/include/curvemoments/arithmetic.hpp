#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "curvemoments/expsum.hpp"
#include "curvemoments/moments.hpp"
#include "curvemoments/surfaces.hpp"

namespace curvemoments {

struct EnergyReport {
    int n = 0;
    std::int64_t E = 0;
    std::int64_t r = 0;         // representation count |{z : |z|^2 = E}|
    std::int64_t K_all = 0;     // max_xi #{(z1,z2) : z1+z2 = xi}, ordered pairs
    std::int64_t K_nonzero = 0; // same with xi = 0 excluded
    std::vector<std::int64_t> argmax_all;
    std::vector<std::int64_t> argmax_nonzero;
};

// r_n(E) by exact enumeration.
std::int64_t representation_count(int n, std::int64_t E);

// Additive pair counts over an integer frequency set, by hashing pairwise
// sums. K_all is the literal maximum (dominated by xi = 0 on symmetric sets);
// K_nonzero is the variant the L^4 bound uses. No floating point involved.
EnergyReport additive_pairs_K(const FrequencySet& fs);

// ((1+K_nonzero)^(1/4) * ||a||_2, l4_exact): the energy bound and the exact
// L^4 norm; the first always dominates the second.
std::pair<double, double> l4_from_energy(const FrequencySet& fs, const CoefficientAssignment& coeffs);

// |{z in Z^2 : z^T Q z = E}| for a positive definite integer form.
std::int64_t ellipse_lattice_count(const SymMatrixI& Q, std::int64_t E);

// Number of ordered pairs (z1, z2) with |z1|^2 = |z2|^2 = E and z1 + z2 = xi,
// counted without touching pairs: the constraints |z1|^2 = E and
// 2<xi, z1> = |xi|^2 project to an ellipse in the two free coordinates, which
// is enumerated directly. Exact integer arithmetic; n = 3 only.
std::int64_t pair_count_by_projection(std::int64_t E, std::span<const std::int64_t> xi);

struct KGrowthRow {
    std::int64_t E = 0;
    std::int64_t r = 0;
    std::int64_t K_all = 0;
    std::int64_t K_nonzero = 0;
    std::vector<std::int64_t> argmax_nonzero;
};

struct KGrowthTable {
    std::vector<KGrowthRow> rows;
    std::int64_t max_K_nonzero = 0;
    bool fit_valid = false;
    GrowthFit fit; // log K_nonzero vs log E, zero rows skipped
};

// (E, r_n(E), K_nonzero(E)) over [E_lo, E_hi]; guarded at 10^6 points per E.
KGrowthTable k_growth_table(int n, std::int64_t E_lo, std::int64_t E_hi);

} // namespace curvemoments
