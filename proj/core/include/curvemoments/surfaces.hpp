#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "curvemoments/linalg.hpp"

namespace curvemoments {

// Unit sphere |x| = 1 in R^n.
struct UnitSphere {
    int dim = 0;
};

// Level set x^T Q x = 1 of an integer positive definite form (dilates carry
// the integer level E with z^T Q z = E).
struct QuadricLevel {
    SymMatrixI form;
};

// Graph {(y, <Ay,y>) : |y| <= base_radius} in R^{d+1}; frequency sets over it
// are space-time sets.
struct ParaboloidGraph {
    Matrix form;
    double base_radius = 1.0;
};

class Surface {
public:
    static Surface sphere(int n);
    static Surface quadric(SymMatrixI q);
    static Surface paraboloid(Matrix a, double base_radius);

    const std::variant<UnitSphere, QuadricLevel, ParaboloidGraph>& node() const { return v_; }
    bool is_sphere() const { return std::holds_alternative<UnitSphere>(v_); }
    bool is_quadric() const { return std::holds_alternative<QuadricLevel>(v_); }
    bool is_paraboloid() const { return std::holds_alternative<ParaboloidGraph>(v_); }
    const UnitSphere& as_sphere() const { return std::get<UnitSphere>(v_); }
    const QuadricLevel& as_quadric() const { return std::get<QuadricLevel>(v_); }
    const ParaboloidGraph& as_paraboloid() const { return std::get<ParaboloidGraph>(v_); }

    // Spatial dimension: n for sphere/quadric, base dimension for paraboloids.
    int spatial_dim() const;
    // Dimension of the ambient frequency space (spatial_dim()+1 for graphs).
    int ambient_dim() const;
    std::string tag() const; // "sphere" | "quadric" | "paraboloid"

    // Membership of a point on the unit-scale surface, tolerance 1e-9.
    bool contains_unit(const Vec& point) const;

    // Outward unit normal at a unit-surface point (throws if off-surface).
    // Spheres return the point itself; graphs return (-grad psi, 1)/|.|.
    Vec normal_at(const Vec& point) const;

private:
    explicit Surface(std::variant<UnitSphere, QuadricLevel, ParaboloidGraph> v) : v_(std::move(v)) {}
    std::variant<UnitSphere, QuadricLevel, ParaboloidGraph> v_;
};

struct Frequency {
    std::vector<std::int64_t> spatial;
    std::optional<double> temporal; // present only in space-time sets

    bool operator==(const Frequency& o) const = default;
};

// Finite set of frequencies on a dilate of a surface. Points are sorted
// lexicographically so construction is deterministic; membership is verified
// exactly (integer arithmetic) for sphere/quadric/integer-paraboloid sets.
class FrequencySet {
public:
    FrequencySet(Surface surface, double dilation, std::vector<Frequency> points,
                 bool temporal_periodic, std::optional<std::int64_t> level);

    const Surface& surface() const { return surface_; }
    double dilation() const { return dilation_; }
    const std::vector<Frequency>& points() const { return points_; }
    std::size_t size() const { return points_.size(); }
    bool is_spacetime() const { return spacetime_; }
    // False for irrational temporal parts: the field is not 1-periodic in t.
    bool temporal_periodic() const { return temporal_periodic_; }
    // Exact surface level (E for sphere/quadric, N for paraboloid sets).
    std::optional<std::int64_t> level() const { return level_; }

    // Minimum pairwise Euclidean distance over all coordinates (temporal
    // included). Defined as the dilation when fewer than two points.
    double separation() const;
    // Exact squared separation when every coordinate is an integer.
    std::optional<std::int64_t> separation_squared() const;

    // Coordinates of point i divided down to the unit surface. For graphs
    // this is the base point y = z/D (temporal part is implied by y).
    Vec unit_point(std::size_t i) const;
    // Full ambient unit-surface point; graphs append psi(y) = t/D^2.
    Vec ambient_unit_point(std::size_t i) const;
    // Per-axis max |coordinate| (temporal included when integer-valued).
    std::vector<std::int64_t> coordinate_bounds() const;

    void write_text(std::ostream& os) const;
    // Sphere headers carry enough to rebuild the surface; other tags need it
    // supplied (the text format stores only tag, dilation and dimension).
    static FrequencySet read_text(std::istream& is, std::optional<Surface> surface = {});

private:
    Surface surface_;
    double dilation_ = 1.0;
    std::vector<Frequency> points_;
    bool spacetime_ = false;
    bool temporal_periodic_ = true;
    std::optional<std::int64_t> level_;
    mutable std::optional<double> separation_cache_;
};

// All z in Z^n with |z|^2 = E, by recursive box search with per-coordinate
// residual pruning. Dilation is sqrt(E).
FrequencySet enumerate_sphere_lattice(int n, std::int64_t E);

// All z with z^T Q z = E for an integer positive definite form Q
// (Fincke-Pohst style enumeration over a Cholesky factor, exact final check).
FrequencySet enumerate_quadric_lattice(const SymMatrixI& Q, std::int64_t E);

// Space-time set {(z, q(z)) : z in Z^n, |z| < N}; q = identity form when
// `form` is absent. Temporal parts are integers, so the field is 1-periodic
// in t. Dilation is N.
FrequencySet paraboloid_points(int n, std::int64_t N, const std::optional<SymMatrixI>& form = {});

// {(z, sum_i alpha_i z_i^2) : |z| < N} with real alpha > 0; the temporal
// parts are real so the set is flagged non-periodic in t.
FrequencySet irrational_paraboloid_points(int n, std::int64_t N, const Vec& alpha);

double separation(const FrequencySet& fs);

} // namespace curvemoments
