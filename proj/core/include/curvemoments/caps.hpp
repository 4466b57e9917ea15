#pragma once

#include <complex>
#include <iosfwd>
#include <map>
#include <optional>
#include <variant>
#include <vector>

#include "curvemoments/surfaces.hpp"

namespace curvemoments {

struct Cap {
    int index = 0;
    Vec center;         // ambient unit-surface point
    double scale = 0.0; // ~ 1/K
};

// Deterministic partition of a surface into ~1/K cells.
//
// Spheres use cube-face charts: a unit vector is assigned to the face of
// [-1,1]^n of its largest coordinate (ties to the smallest axis), projected
// radially, and binned on a ceil(K)^(n-1) grid. Radial projection from the
// face to the sphere is 1-Lipschitz, so the intrinsic cell diameter is at
// most c1/K with c1 = 2*sqrt(n-1) (<= 4 for n <= 5). Quadrics reuse the
// sphere chart through the direction map x -> x/|x|. Paraboloid graphs use a
// uniform grid of width <= 1/K on the base cube.
class CapPartition {
public:
    CapPartition(Surface surface, double K);

    const Surface& surface() const { return surface_; }
    double K() const { return k_; }
    const std::vector<Cap>& caps() const { return caps_; }
    std::size_t size() const { return caps_.size(); }

    // Cap index of a unit-surface chart point (ambient for sphere/quadric,
    // base point for graphs). Every chart point maps to exactly one cap.
    int assign(const Vec& unit_point) const;

    void dump(std::ostream& os) const; // text table: cap_index, center, scale

private:
    Surface surface_;
    double k_ = 0.0;
    int cells_per_axis_ = 1;
    std::vector<Cap> caps_;
};

CapPartition build_cap_partition(const Surface& surface, double K);

// Frequencies of fs grouped by the cap holding their unit-surface point.
std::map<int, std::vector<Frequency>> assign_points(const CapPartition& part, const FrequencySet& fs);

// sqrt(det Gram): k-dimensional volume of the span; 0 iff linearly dependent.
double wedge_volume(const std::vector<Vec>& vectors);

// Searches for k indices whose normals have wedge volume above `threshold`.
// Greedy (extend by the candidate maximizing the partial wedge, ties to the
// smaller id), then the lexicographically first qualifying k-subset when at
// most 12 candidates. Returns indices ascending, or nullopt.
std::optional<std::vector<int>> transversal_tuple_search(const std::vector<Vec>& normals,
                                                         const std::vector<int>& ids, int k,
                                                         double threshold);

struct Broad {
    std::vector<int> caps; // n cap indices, ascending
    double wedge = 0.0;
};
struct Narrow {
    Vec hyperplane_normal; // unit normal of the fitted hyperplane V_{n-1}
    double max_abs_sum = 0.0;
};
using Classification = std::variant<Broad, Narrow>;

inline bool is_broad(const Classification& c) { return std::holds_alternative<Broad>(c); }

// Broad/narrow dichotomy at a point: Broad when n caps exist whose sums all
// exceed K^-(n-1) * max |c_a| and whose normals have wedge volume above
// wedge_constant * K^-n; otherwise Narrow with the least-squares hyperplane
// through the above-threshold normals (smallest singular direction).
Classification classify_point(const std::map<int, std::complex<double>>& cap_sums,
                              const std::map<int, Vec>& normals, double K, int n,
                              double wedge_constant = 0.5);

// (|sum_a c_a|, K^(2n-2) * (prod |c_{a_i}|)^(1/n)) for a Broad classification;
// lhs <= rhs whenever the number of caps is at most K^(n-1).
std::pair<double, double> broad_pointwise_bound(const std::map<int, std::complex<double>>& cap_sums,
                                                const Classification& cls, double K, int n);

struct RescaleResult {
    std::vector<Vec> points; // base coordinates mapped into the unit ball
    double factor = 1.0;     // rho^(n-1-(n+1)/p) with n = base dimension
};

// Parabolic rescaling of a rho-cap centered at `a`: y -> (y - a)/rho, with
// the L^p normalization factor (the shear on the dual side only shifts
// phases and needs no representation here).
RescaleResult parabolic_rescale(const std::vector<Vec>& base_points, const Vec& center, double rho,
                                double p);

// Keeps frequencies whose unit normal xi' satisfies |<xi', v>| < c/M.
FrequencySet near_subspace_filter(const FrequencySet& fs, const Vec& v, double c, double M);

} // namespace curvemoments
