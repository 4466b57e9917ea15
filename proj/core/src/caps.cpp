#include "curvemoments/caps.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <stdexcept>

namespace curvemoments {

namespace {

int face_of(const Vec& x) {
    int axis = 0;
    for (std::size_t i = 1; i < x.size(); ++i)
        if (std::abs(x[i]) > std::abs(x[axis])) axis = static_cast<int>(i);
    return 2 * axis + (x[axis] < 0 ? 1 : 0);
}

std::string format_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

} // namespace

CapPartition::CapPartition(Surface surface, double K) : surface_(std::move(surface)), k_(K) {
    if (!(K >= 1.0)) throw std::invalid_argument("CapPartition: K must be >= 1");
    if (surface_.is_paraboloid()) {
        const auto& g = surface_.as_paraboloid();
        const int d = g.form.rows;
        // cells of width <= 1/K on [-u0, u0]^d
        cells_per_axis_ = std::max<int>(1, static_cast<int>(std::ceil(2.0 * g.base_radius * K - 1e-9)));
        const double width = 2.0 * g.base_radius / cells_per_axis_;
        std::vector<int> cell(d, 0);
        int index = 0;
        auto emit = [&](auto&& self, int axis) -> void {
            if (axis == d) {
                Vec y(d);
                for (int i = 0; i < d; ++i) y[i] = -g.base_radius + (cell[i] + 0.5) * width;
                double psi = 0.0;
                for (int i = 0; i < d; ++i)
                    for (int j = 0; j < d; ++j) psi += g.form(i, j) * y[i] * y[j];
                Vec center = y;
                center.push_back(psi);
                caps_.push_back(Cap{index++, std::move(center), 1.0 / K});
                return;
            }
            for (cell[axis] = 0; cell[axis] < cells_per_axis_; ++cell[axis]) self(self, axis + 1);
            cell[axis] = 0;
        };
        emit(emit, 0);
        return;
    }
    const int n = surface_.spatial_dim();
    cells_per_axis_ = std::max<int>(1, static_cast<int>(std::ceil(K - 1e-9)));
    const double width = 2.0 / cells_per_axis_;
    std::vector<int> cell(n - 1, 0);
    int index = 0;
    for (int face = 0; face < 2 * n; ++face) {
        const int axis = face / 2;
        const double sign = (face % 2 == 0) ? 1.0 : -1.0;
        auto emit = [&](auto&& self, int pos) -> void {
            if (pos == n - 1) {
                Vec y(n, 0.0);
                y[axis] = sign;
                int p = 0;
                for (int i = 0; i < n; ++i) {
                    if (i == axis) continue;
                    y[i] = -1.0 + (cell[p] + 0.5) * width;
                    ++p;
                }
                Vec center;
                if (surface_.is_sphere()) {
                    center = normalized(y);
                } else {
                    // radial point of the quadric in direction y
                    const double q = surface_.as_quadric().form.quad(std::span<const double>(y));
                    center = y;
                    for (double& v : center) v /= std::sqrt(q);
                }
                caps_.push_back(Cap{index++, std::move(center), 1.0 / K});
                return;
            }
            for (cell[pos] = 0; cell[pos] < cells_per_axis_; ++cell[pos]) self(self, pos + 1);
            cell[pos] = 0;
        };
        emit(emit, 0);
    }
}

int CapPartition::assign(const Vec& unit_point) const {
    if (surface_.is_paraboloid()) {
        const auto& g = surface_.as_paraboloid();
        const int d = g.form.rows;
        if (static_cast<int>(unit_point.size()) != d)
            throw std::invalid_argument("CapPartition::assign: expected a base point");
        const double width = 2.0 * g.base_radius / cells_per_axis_;
        int index = 0; // first axis most significant, matching construction order
        for (int i = 0; i < d; ++i) {
            int c = static_cast<int>(std::floor((unit_point[i] + g.base_radius) / width));
            c = std::clamp(c, 0, cells_per_axis_ - 1);
            index = index * cells_per_axis_ + c;
        }
        return index;
    }
    const int n = surface_.spatial_dim();
    if (static_cast<int>(unit_point.size()) != n)
        throw std::invalid_argument("CapPartition::assign: dimension mismatch");
    const Vec u = normalized(unit_point);
    const int face = face_of(u);
    const int axis = face / 2;
    const double width = 2.0 / cells_per_axis_;
    int index = 0; // first face axis most significant, matching construction order
    int cells = 1;
    for (int i = 0; i < n; ++i) {
        if (i == axis) continue;
        const double y = u[i] / std::abs(u[axis]);
        int c = static_cast<int>(std::floor((y + 1.0) / width));
        c = std::clamp(c, 0, cells_per_axis_ - 1);
        index = index * cells_per_axis_ + c;
        cells *= cells_per_axis_;
    }
    return face * cells + index;
}

void CapPartition::dump(std::ostream& os) const {
    os << "# cap_index, center, scale\n";
    for (const Cap& c : caps_) {
        os << c.index << ", ";
        for (std::size_t i = 0; i < c.center.size(); ++i) {
            if (i) os << ' ';
            os << format_double(c.center[i]);
        }
        os << ", " << format_double(c.scale) << "\n";
    }
}

CapPartition build_cap_partition(const Surface& surface, double K) { return CapPartition(surface, K); }

std::map<int, std::vector<Frequency>> assign_points(const CapPartition& part, const FrequencySet& fs) {
    if (part.surface().tag() != fs.surface().tag() ||
        part.surface().spatial_dim() != fs.surface().spatial_dim())
        throw std::invalid_argument("assign_points: partition and set surfaces differ");
    std::map<int, std::vector<Frequency>> out;
    for (std::size_t i = 0; i < fs.size(); ++i)
        out[part.assign(fs.unit_point(i))].push_back(fs.points()[i]);
    return out;
}

double wedge_volume(const std::vector<Vec>& vectors) { return gram_volume(vectors); }

std::optional<std::vector<int>> transversal_tuple_search(const std::vector<Vec>& normals,
                                                         const std::vector<int>& ids, int k,
                                                         double threshold) {
    if (normals.size() != ids.size())
        throw std::invalid_argument("transversal_tuple_search: ids/normals size mismatch");
    if (!(threshold > 0)) throw std::invalid_argument("transversal_tuple_search: threshold must be > 0");
    const int m = static_cast<int>(normals.size());
    if (k < 1 || k > m) return std::nullopt;

    std::vector<int> picked;
    std::vector<char> used(m, 0);
    std::vector<Vec> span;
    for (int step = 0; step < k; ++step) {
        int best = -1;
        double best_vol = -1.0;
        for (int i = 0; i < m; ++i) {
            if (used[i]) continue;
            span.push_back(normals[i]);
            const double vol = wedge_volume(span);
            span.pop_back();
            if (vol > best_vol + 1e-15 || (best >= 0 && std::abs(vol - best_vol) <= 1e-15 && ids[i] < ids[best])) {
                best = i;
                best_vol = vol;
            }
        }
        used[best] = 1;
        picked.push_back(best);
        span.push_back(normals[best]);
    }
    if (wedge_volume(span) > threshold) {
        std::vector<int> out;
        out.reserve(k);
        for (int i : picked) out.push_back(ids[i]);
        std::sort(out.begin(), out.end());
        return out;
    }
    if (m > 12) return std::nullopt;

    // exhaustive fallback: first qualifying subset in lexicographic order
    std::vector<int> comb(k);
    auto next = [&](auto&& self, int pos, int start) -> std::optional<std::vector<int>> {
        if (pos == k) {
            std::vector<Vec> vs;
            vs.reserve(k);
            for (int i : comb) vs.push_back(normals[i]);
            if (wedge_volume(vs) > threshold) {
                std::vector<int> out;
                for (int i : comb) out.push_back(ids[i]);
                std::sort(out.begin(), out.end());
                return out;
            }
            return std::nullopt;
        }
        for (int i = start; i <= m - (k - pos); ++i) {
            comb[pos] = i;
            if (auto r = self(self, pos + 1, i + 1)) return r;
        }
        return std::nullopt;
    };
    return next(next, 0, 0);
}

Classification classify_point(const std::map<int, std::complex<double>>& cap_sums,
                              const std::map<int, Vec>& normals, double K, int n,
                              double wedge_constant) {
    if (cap_sums.empty()) throw std::invalid_argument("classify_point: no cap sums");
    double max_abs = 0.0;
    for (const auto& [idx, c] : cap_sums) max_abs = std::max(max_abs, std::abs(c));
    if (max_abs == 0.0) throw std::invalid_argument("classify_point: all cap sums are zero");

    const double threshold = std::pow(K, -(n - 1)) * max_abs;
    std::vector<int> above_ids;
    std::vector<Vec> above_normals;
    for (const auto& [idx, c] : cap_sums) {
        if (std::abs(c) <= threshold) continue;
        auto it = normals.find(idx);
        if (it == normals.end()) throw std::invalid_argument("classify_point: missing normal for cap");
        above_ids.push_back(idx);
        above_normals.push_back(it->second);
    }

    if (static_cast<int>(above_ids.size()) >= n) {
        const double wedge_min = wedge_constant * std::pow(K, -n);
        if (auto tuple = transversal_tuple_search(above_normals, above_ids, n, wedge_min)) {
            std::vector<Vec> vs;
            for (int id : *tuple)
                vs.push_back(above_normals[std::lower_bound(above_ids.begin(), above_ids.end(), id) -
                                           above_ids.begin()]);
            return Broad{*tuple, wedge_volume(vs)};
        }
    }

    // Narrow: least-squares hyperplane through the above-threshold normals,
    // i.e. the singular direction of smallest singular value of the stack.
    const int dim = static_cast<int>(above_normals.empty() ? normals.begin()->second.size()
                                                           : above_normals[0].size());
    Matrix ata(dim, dim);
    for (const Vec& v : above_normals)
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) ata(i, j) += v[i] * v[j];
    const SymmetricEigen eig = symmetric_eigen(ata);
    return Narrow{eig.vectors.front(), max_abs};
}

std::pair<double, double> broad_pointwise_bound(const std::map<int, std::complex<double>>& cap_sums,
                                                const Classification& cls, double K, int n) {
    const auto* broad = std::get_if<Broad>(&cls);
    if (!broad) throw std::invalid_argument("broad_pointwise_bound: classification is Narrow");
    std::complex<double> total = 0.0;
    for (const auto& [idx, c] : cap_sums) total += c;
    double prod = 1.0;
    for (int idx : broad->caps) {
        auto it = cap_sums.find(idx);
        if (it == cap_sums.end()) throw std::invalid_argument("broad_pointwise_bound: cap missing");
        prod *= std::abs(it->second);
    }
    const double rhs = std::pow(K, 2 * n - 2) * std::pow(prod, 1.0 / n);
    return {std::abs(total), rhs};
}

RescaleResult parabolic_rescale(const std::vector<Vec>& base_points, const Vec& center, double rho,
                                double p) {
    if (!(rho > 0)) throw std::invalid_argument("parabolic_rescale: rho must be positive");
    if (!(p >= 1)) throw std::invalid_argument("parabolic_rescale: p must be >= 1");
    const int d = static_cast<int>(center.size());
    RescaleResult out;
    out.points.reserve(base_points.size());
    for (const Vec& y : base_points) {
        if (static_cast<int>(y.size()) != d)
            throw std::invalid_argument("parabolic_rescale: dimension mismatch");
        Vec shifted(d);
        double dist2 = 0.0;
        for (int i = 0; i < d; ++i) {
            shifted[i] = (y[i] - center[i]) / rho;
            dist2 += (y[i] - center[i]) * (y[i] - center[i]);
        }
        if (dist2 > rho * rho * (1.0 + 1e-12))
            throw std::invalid_argument("parabolic_rescale: point outside the cap");
        out.points.push_back(std::move(shifted));
    }
    // exponent n-1-(n+1)/p with n = base dimension (so -2/p for an interval cap)
    out.factor = std::pow(rho, (d - 1) - (d + 1) / p);
    return out;
}

FrequencySet near_subspace_filter(const FrequencySet& fs, const Vec& v, double c, double M) {
    if (norm(v) == 0.0) throw std::invalid_argument("near_subspace_filter: zero normal");
    const Vec u = normalized(v);
    const double cutoff = c / M;
    std::vector<Frequency> kept;
    for (std::size_t i = 0; i < fs.size(); ++i) {
        const Vec xi = fs.surface().normal_at(fs.ambient_unit_point(i));
        if (std::abs(dot(xi, u)) < cutoff) kept.push_back(fs.points()[i]);
    }
    return FrequencySet(fs.surface(), fs.dilation(), std::move(kept), fs.temporal_periodic(), fs.level());
}

} // namespace curvemoments
