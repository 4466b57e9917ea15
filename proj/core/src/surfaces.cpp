#include "curvemoments/surfaces.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace curvemoments {

namespace {

constexpr std::int64_t kMaxLevel = 4'000'000'000'000'000; // overflow guard for sums of squares

std::int64_t isqrt64(std::int64_t v) {
    if (v < 0) return -1;
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
    while (r > 0 && r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

Surface Surface::sphere(int n) {
    if (n < 2) throw std::invalid_argument("sphere: dimension must be >= 2");
    return Surface(UnitSphere{n});
}

Surface Surface::quadric(SymMatrixI q) {
    if (!q.is_symmetric()) throw std::invalid_argument("quadric: form must be symmetric");
    if (!q.is_positive_definite())
        throw std::invalid_argument("quadric: form must be positive definite");
    return Surface(QuadricLevel{std::move(q)});
}

Surface Surface::paraboloid(Matrix a, double base_radius) {
    if (!a.is_symmetric()) throw std::invalid_argument("paraboloid: form must be symmetric");
    if (!cholesky_upper(a)) throw std::invalid_argument("paraboloid: form must be positive definite");
    if (!(base_radius > 0)) throw std::invalid_argument("paraboloid: base radius must be positive");
    return Surface(ParaboloidGraph{std::move(a), base_radius});
}

int Surface::spatial_dim() const {
    if (is_sphere()) return as_sphere().dim;
    if (is_quadric()) return as_quadric().form.n;
    return as_paraboloid().form.rows;
}

int Surface::ambient_dim() const { return is_paraboloid() ? spatial_dim() + 1 : spatial_dim(); }

std::string Surface::tag() const {
    if (is_sphere()) return "sphere";
    if (is_quadric()) return "quadric";
    return "paraboloid";
}

bool Surface::contains_unit(const Vec& point) const {
    constexpr double tol = 1e-9;
    if (is_sphere() || is_quadric()) {
        if (static_cast<int>(point.size()) != spatial_dim()) return false;
        const double level = is_sphere() ? dot(point, point)
                                         : as_quadric().form.quad(std::span<const double>(point));
        return std::abs(level - 1.0) <= tol * (1.0 + std::abs(level));
    }
    const auto& g = as_paraboloid();
    if (static_cast<int>(point.size()) != g.form.rows + 1) return false;
    Vec y(point.begin(), point.end() - 1);
    if (norm(y) > g.base_radius + tol) return false;
    double psi = 0.0;
    for (int i = 0; i < g.form.rows; ++i)
        for (int j = 0; j < g.form.cols; ++j) psi += g.form(i, j) * y[i] * y[j];
    return std::abs(point.back() - psi) <= tol * (1.0 + std::abs(psi));
}

Vec Surface::normal_at(const Vec& point) const {
    if (!contains_unit(point)) throw std::invalid_argument("normal_at: point is off the surface");
    if (is_sphere()) return normalized(point);
    if (is_quadric()) {
        const auto& q = as_quadric().form;
        Vec grad(q.n, 0.0);
        for (int i = 0; i < q.n; ++i)
            for (int j = 0; j < q.n; ++j) grad[i] += 2.0 * static_cast<double>(q.at(i, j)) * point[j];
        return normalized(grad);
    }
    const auto& g = as_paraboloid();
    const int d = g.form.rows;
    Vec v(d + 1, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) v[i] -= 2.0 * g.form(i, j) * point[j];
    v[d] = 1.0;
    return normalized(v);
}

FrequencySet::FrequencySet(Surface surface, double dilation, std::vector<Frequency> points,
                           bool temporal_periodic, std::optional<std::int64_t> level)
    : surface_(std::move(surface)),
      dilation_(dilation),
      points_(std::move(points)),
      spacetime_(surface_.is_paraboloid()),
      temporal_periodic_(temporal_periodic),
      level_(level) {
    if (!(dilation_ > 0)) throw std::invalid_argument("FrequencySet: dilation must be positive");
    const int n = surface_.spatial_dim();
    std::sort(points_.begin(), points_.end(), [](const Frequency& a, const Frequency& b) {
        if (a.spatial != b.spatial) return a.spatial < b.spatial;
        return a.temporal < b.temporal;
    });
    for (std::size_t i = 0; i + 1 < points_.size(); ++i)
        if (points_[i] == points_[i + 1]) throw std::invalid_argument("FrequencySet: duplicate point");
    for (const auto& f : points_) {
        if (static_cast<int>(f.spatial.size()) != n)
            throw std::invalid_argument("FrequencySet: wrong spatial dimension");
        if (f.temporal.has_value() != spacetime_)
            throw std::invalid_argument("FrequencySet: temporal part mismatch with surface kind");
        if (spacetime_) continue; // verified against the graph below
        if (!level_) continue;
        const std::int64_t e = surface_.is_sphere()
                                   ? [&] {
                                         std::int64_t s = 0;
                                         for (auto z : f.spatial) s += z * z;
                                         return s;
                                     }()
                                   : surface_.as_quadric().form.quad(std::span<const std::int64_t>(f.spatial));
        if (e != *level_) throw std::invalid_argument("FrequencySet: point off the surface dilate");
    }
    if (spacetime_) {
        const auto& g = surface_.as_paraboloid();
        for (const auto& f : points_) {
            double q = 0.0; // z^T A z: exact in doubles at these magnitudes
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    q += g.form(i, j) * static_cast<double>(f.spatial[i]) *
                         static_cast<double>(f.spatial[j]);
            if (std::abs(*f.temporal - q) > 1e-9 * (1.0 + std::abs(q)))
                throw std::invalid_argument("FrequencySet: temporal part off the graph");
            std::int64_t zz = 0;
            for (auto z : f.spatial) zz += z * z;
            const double r = dilation_ * surface_.as_paraboloid().base_radius;
            if (static_cast<double>(zz) > r * r * (1.0 + 1e-12))
                throw std::invalid_argument("FrequencySet: point outside the base ball");
        }
    }
}

double FrequencySet::separation() const {
    if (separation_cache_) return *separation_cache_;
    double best = dilation_;
    if (points_.size() >= 2) {
        if (auto sq = separation_squared()) {
            best = std::sqrt(static_cast<double>(*sq));
        } else {
            best = std::numeric_limits<double>::infinity();
            for (std::size_t i = 0; i < points_.size(); ++i) {
                for (std::size_t j = i + 1; j < points_.size(); ++j) {
                    double d2 = 0.0;
                    for (std::size_t k = 0; k < points_[i].spatial.size(); ++k) {
                        const double d = static_cast<double>(points_[i].spatial[k] - points_[j].spatial[k]);
                        d2 += d * d;
                    }
                    if (spacetime_) {
                        const double d = *points_[i].temporal - *points_[j].temporal;
                        d2 += d * d;
                    }
                    best = std::min(best, d2);
                }
            }
            best = std::sqrt(best);
        }
    }
    separation_cache_ = best;
    return best;
}

std::optional<std::int64_t> FrequencySet::separation_squared() const {
    if (points_.size() < 2) return std::nullopt;
    if (spacetime_ && !temporal_periodic_) return std::nullopt;
    std::int64_t best = std::numeric_limits<std::int64_t>::max();
    for (std::size_t i = 0; i < points_.size(); ++i) {
        for (std::size_t j = i + 1; j < points_.size(); ++j) {
            std::int64_t d2 = 0;
            for (std::size_t k = 0; k < points_[i].spatial.size(); ++k) {
                const std::int64_t d = points_[i].spatial[k] - points_[j].spatial[k];
                d2 += d * d;
            }
            if (spacetime_) {
                const auto d = static_cast<std::int64_t>(*points_[i].temporal) -
                               static_cast<std::int64_t>(*points_[j].temporal);
                d2 += d * d;
            }
            best = std::min(best, d2);
        }
    }
    return best;
}

Vec FrequencySet::unit_point(std::size_t i) const {
    const auto& f = points_[i];
    Vec y(f.spatial.size());
    for (std::size_t k = 0; k < y.size(); ++k) y[k] = static_cast<double>(f.spatial[k]) / dilation_;
    return y;
}

Vec FrequencySet::ambient_unit_point(std::size_t i) const {
    Vec y = unit_point(i);
    if (spacetime_) y.push_back(*points_[i].temporal / (dilation_ * dilation_));
    return y;
}

std::vector<std::int64_t> FrequencySet::coordinate_bounds() const {
    const std::size_t n = surface_.spatial_dim();
    std::vector<std::int64_t> b(n, 0);
    for (const auto& f : points_)
        for (std::size_t k = 0; k < n; ++k) b[k] = std::max(b[k], std::abs(f.spatial[k]));
    if (spacetime_ && temporal_periodic_) {
        std::int64_t t = 0;
        for (const auto& f : points_)
            t = std::max(t, std::abs(static_cast<std::int64_t>(std::llround(*f.temporal))));
        b.push_back(t);
    }
    return b;
}

void FrequencySet::write_text(std::ostream& os) const {
    os << "# surface=" << surface_.tag() << " D=" << format_double(dilation_) << " n="
       << surface_.spatial_dim() << "\n";
    for (const auto& f : points_) {
        for (std::size_t k = 0; k < f.spatial.size(); ++k) {
            if (k) os << ' ';
            os << f.spatial[k];
        }
        if (f.temporal) os << ' ' << format_double(*f.temporal);
        os << "\n";
    }
}

FrequencySet FrequencySet::read_text(std::istream& is, std::optional<Surface> surface) {
    std::string header;
    if (!std::getline(is, header) || header.rfind("# surface=", 0) != 0)
        throw std::runtime_error("FrequencySet::read_text: missing header line");
    std::string tag;
    double dilation = 0.0;
    int n = 0;
    {
        std::istringstream hs(header.substr(1));
        std::string token;
        while (hs >> token) {
            if (token.rfind("surface=", 0) == 0) tag = token.substr(8);
            else if (token.rfind("D=", 0) == 0) dilation = std::stod(token.substr(2));
            else if (token.rfind("n=", 0) == 0) n = std::stoi(token.substr(2));
        }
    }
    if (!surface) {
        if (tag != "sphere")
            throw std::runtime_error("FrequencySet::read_text: pass the surface for tag '" + tag + "'");
        surface = Surface::sphere(n);
    }
    if (surface->tag() != tag || surface->spatial_dim() != n)
        throw std::runtime_error("FrequencySet::read_text: surface does not match header");
    std::vector<Frequency> pts;
    std::string line;
    const bool spacetime = surface->is_paraboloid();
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::istringstream ls(line);
        Frequency f;
        f.spatial.resize(n);
        for (int k = 0; k < n; ++k)
            if (!(ls >> f.spatial[k])) throw std::runtime_error("FrequencySet::read_text: bad point line");
        if (spacetime) {
            double t;
            if (!(ls >> t)) throw std::runtime_error("FrequencySet::read_text: missing temporal part");
            f.temporal = t;
        }
        pts.push_back(std::move(f));
    }
    std::optional<std::int64_t> level;
    bool periodic = true;
    if (surface->is_sphere() || surface->is_quadric()) {
        if (!pts.empty()) {
            std::int64_t e = surface->is_sphere()
                                 ? [&] {
                                       std::int64_t s = 0;
                                       for (auto z : pts[0].spatial) s += z * z;
                                       return s;
                                   }()
                                 : surface->as_quadric().form.quad(std::span<const std::int64_t>(pts[0].spatial));
            level = e;
        }
    } else {
        level = static_cast<std::int64_t>(std::llround(dilation));
        for (const auto& f : pts)
            if (std::abs(*f.temporal - std::llround(*f.temporal)) > 1e-12) periodic = false;
    }
    return FrequencySet(*surface, dilation, std::move(pts), periodic, level);
}

namespace {

void sphere_search(int n, int depth, std::int64_t budget, std::vector<std::int64_t>& current,
                   std::vector<Frequency>& out) {
    if (depth == n - 1) {
        const std::int64_t r = isqrt64(budget);
        if (r * r == budget) {
            current[depth] = r;
            out.push_back(Frequency{current, std::nullopt});
            if (r != 0) {
                current[depth] = -r;
                out.push_back(Frequency{current, std::nullopt});
            }
        }
        return;
    }
    const std::int64_t r = isqrt64(budget);
    for (std::int64_t z = -r; z <= r; ++z) {
        current[depth] = z;
        sphere_search(n, depth + 1, budget - z * z, current, out);
    }
}

} // namespace

FrequencySet enumerate_sphere_lattice(int n, std::int64_t E) {
    if (n < 2) throw std::invalid_argument("enumerate_sphere_lattice: n must be >= 2");
    if (E < 0) throw std::invalid_argument("enumerate_sphere_lattice: E must be >= 0");
    if (E > kMaxLevel) throw std::invalid_argument("enumerate_sphere_lattice: E exceeds safe integer range");
    std::vector<Frequency> pts;
    std::vector<std::int64_t> current(n, 0);
    sphere_search(n, 0, E, current, pts);
    const double d = E > 0 ? std::sqrt(static_cast<double>(E)) : 1.0;
    return FrequencySet(Surface::sphere(n), d, std::move(pts), true, E);
}

FrequencySet enumerate_quadric_lattice(const SymMatrixI& Q, std::int64_t E) {
    if (!Q.is_symmetric()) throw std::invalid_argument("enumerate_quadric_lattice: form not symmetric");
    if (!Q.is_positive_definite())
        throw std::invalid_argument("enumerate_quadric_lattice: form not positive definite");
    if (E < 0) throw std::invalid_argument("enumerate_quadric_lattice: E must be >= 0");
    if (E > kMaxLevel)
        throw std::invalid_argument("enumerate_quadric_lattice: E exceeds safe integer range");
    const int n = Q.n;
    const auto R = cholesky_upper(Q.to_real());
    if (!R) throw std::invalid_argument("enumerate_quadric_lattice: Cholesky failed");

    // z^T Q z = sum_k (sum_{j>=k} R_kj z_j)^2. Fill coordinates from the last
    // one down; each new row adds one nonnegative term, so partial sums prune.
    // The floating bound gets a slack of 0.5 + 1e-6 E; membership is exact.
    const double slack = 0.5 + 1e-6 * static_cast<double>(E);
    std::vector<Frequency> pts;
    std::vector<std::int64_t> z(n, 0);
    std::vector<double> partial(n + 1, 0.0); // partial[k] = rows k..n-1 contribution
    auto descend = [&](auto&& self, int k) -> void {
        if (k < 0) {
            if (Q.quad(std::span<const std::int64_t>(z)) == E) pts.push_back(Frequency{z, std::nullopt});
            return;
        }
        double c = 0.0;
        for (int j = k + 1; j < n; ++j) c += (*R)(k, j) * static_cast<double>(z[j]);
        const double room = static_cast<double>(E) + slack - partial[k + 1];
        if (room < 0) return;
        const double s = std::sqrt(room);
        const double rkk = (*R)(k, k);
        const auto lo = static_cast<std::int64_t>(std::ceil((-s - c) / rkk - 1e-9));
        const auto hi = static_cast<std::int64_t>(std::floor((s - c) / rkk + 1e-9));
        for (std::int64_t v = lo; v <= hi; ++v) {
            z[k] = v;
            const double term = rkk * static_cast<double>(v) + c;
            partial[k] = partial[k + 1] + term * term;
            if (partial[k] <= static_cast<double>(E) + slack) self(self, k - 1);
        }
        z[k] = 0;
    };
    descend(descend, n - 1);
    const double d = E > 0 ? std::sqrt(static_cast<double>(E)) : 1.0;
    return FrequencySet(Surface::quadric(Q), d, std::move(pts), true, E);
}

FrequencySet paraboloid_points(int n, std::int64_t N, const std::optional<SymMatrixI>& form) {
    if (n < 1) throw std::invalid_argument("paraboloid_points: n must be >= 1");
    if (N < 1) throw std::invalid_argument("paraboloid_points: N must be >= 1");
    const SymMatrixI q = form ? *form : SymMatrixI::identity(n);
    if (q.n != n) throw std::invalid_argument("paraboloid_points: form dimension mismatch");
    if (!q.is_symmetric() || !q.is_positive_definite())
        throw std::invalid_argument("paraboloid_points: form must be symmetric positive definite");
    std::vector<Frequency> pts;
    const std::int64_t cap = N * N - 1; // |z| < N over integers
    std::vector<std::int64_t> z(n, 0);
    auto walk = [&](auto&& self, int k, std::int64_t used) -> void {
        if (k == n) {
            pts.push_back(Frequency{z, static_cast<double>(q.quad(std::span<const std::int64_t>(z)))});
            return;
        }
        const std::int64_t r = isqrt64(cap - used);
        for (std::int64_t v = -r; v <= r; ++v) {
            z[k] = v;
            self(self, k + 1, used + v * v);
        }
        z[k] = 0;
    };
    walk(walk, 0, 0);
    return FrequencySet(Surface::paraboloid(q.to_real(), 1.0), static_cast<double>(N), std::move(pts),
                        true, N);
}

FrequencySet irrational_paraboloid_points(int n, std::int64_t N, const Vec& alpha) {
    if (n < 1) throw std::invalid_argument("irrational_paraboloid_points: n must be >= 1");
    if (N < 1) throw std::invalid_argument("irrational_paraboloid_points: N must be >= 1");
    if (static_cast<int>(alpha.size()) != n)
        throw std::invalid_argument("irrational_paraboloid_points: alpha dimension mismatch");
    for (double a : alpha)
        if (!(a > 0)) throw std::invalid_argument("irrational_paraboloid_points: alpha must be positive");
    Matrix a(n, n);
    for (int i = 0; i < n; ++i) a(i, i) = alpha[i];
    std::vector<Frequency> pts;
    const std::int64_t cap = N * N - 1;
    std::vector<std::int64_t> z(n, 0);
    bool periodic = true;
    auto walk = [&](auto&& self, int k, std::int64_t used) -> void {
        if (k == n) {
            double t = 0.0;
            for (int i = 0; i < n; ++i) t += alpha[i] * static_cast<double>(z[i]) * static_cast<double>(z[i]);
            if (std::abs(t - std::llround(t)) > 1e-12) periodic = false;
            pts.push_back(Frequency{z, t});
            return;
        }
        const std::int64_t r = isqrt64(cap - used);
        for (std::int64_t v = -r; v <= r; ++v) {
            z[k] = v;
            self(self, k + 1, used + v * v);
        }
        z[k] = 0;
    };
    walk(walk, 0, 0);
    return FrequencySet(Surface::paraboloid(std::move(a), 1.0), static_cast<double>(N), std::move(pts),
                        periodic, N);
}

double separation(const FrequencySet& fs) { return fs.separation(); }

} // namespace curvemoments
