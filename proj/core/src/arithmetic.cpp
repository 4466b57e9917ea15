#include "curvemoments/arithmetic.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>

namespace curvemoments {

namespace {

std::int64_t isqrt64(std::int64_t v) {
    if (v < 0) return -1;
    auto r = static_cast<std::int64_t>(std::sqrt(static_cast<double>(v)));
    while (r > 0 && r * r > v) --r;
    while ((r + 1) * (r + 1) <= v) ++r;
    return r;
}

// Smallest nonnegative solution x0 of a*x = r (mod m), m > 0, together with
// the solution step m/gcd; nullopt when unsolvable.
struct Progression {
    std::int64_t first;
    std::int64_t step;
};

std::optional<Progression> solve_congruence(std::int64_t a, std::int64_t r, std::int64_t m) {
    a = ((a % m) + m) % m;
    r = ((r % m) + m) % m;
    const std::int64_t g = std::gcd(a == 0 ? m : a, m);
    if (r % g != 0) return std::nullopt;
    const std::int64_t m2 = m / g;
    if (m2 == 1) return Progression{0, 1};
    const std::int64_t a2 = (a / g) % m2;
    const std::int64_t r2 = (r / g) % m2;
    // extended gcd for the inverse of a2 mod m2
    std::int64_t old_r = a2, rr = m2, old_s = 1, s = 0;
    while (rr != 0) {
        const std::int64_t q = old_r / rr;
        std::int64_t t = old_r - q * rr;
        old_r = rr;
        rr = t;
        t = old_s - q * s;
        old_s = s;
        s = t;
    }
    const std::int64_t inv = ((old_s % m2) + m2) % m2;
    return Progression{(r2 * inv) % m2, m2};
}

} // namespace

std::int64_t representation_count(int n, std::int64_t E) {
    return static_cast<std::int64_t>(enumerate_sphere_lattice(n, E).size());
}

EnergyReport additive_pairs_K(const FrequencySet& fs) {
    if (fs.is_spacetime() && !fs.temporal_periodic())
        throw std::invalid_argument("additive_pairs_K: requires integer frequencies");
    const std::size_t m = fs.size();
    std::vector<std::vector<std::int64_t>> keys(m);
    for (std::size_t i = 0; i < m; ++i) {
        keys[i] = fs.points()[i].spatial;
        if (fs.is_spacetime())
            keys[i].push_back(static_cast<std::int64_t>(std::llround(*fs.points()[i].temporal)));
    }
    std::map<std::vector<std::int64_t>, std::int64_t> counts;
    std::vector<std::int64_t> sum(keys.empty() ? 0 : keys[0].size());
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j) {
            for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = keys[i][k] + keys[j][k];
            ++counts[sum];
        }

    EnergyReport rep;
    rep.n = fs.surface().spatial_dim();
    rep.E = fs.level().value_or(0);
    rep.r = static_cast<std::int64_t>(m);
    const std::vector<std::int64_t> zero(sum.size(), 0);
    for (const auto& [xi, c] : counts) {
        if (c > rep.K_all) {
            rep.K_all = c;
            rep.argmax_all = xi;
        }
        if (xi != zero && c > rep.K_nonzero) {
            rep.K_nonzero = c;
            rep.argmax_nonzero = xi;
        }
    }
    return rep;
}

std::pair<double, double> l4_from_energy(const FrequencySet& fs, const CoefficientAssignment& coeffs) {
    const EnergyReport energy = additive_pairs_K(fs);
    const double bound =
        std::pow(1.0 + static_cast<double>(energy.K_nonzero), 0.25) * coeffs.l2();
    return {bound, l4_exact(fs, coeffs)};
}

std::int64_t ellipse_lattice_count(const SymMatrixI& Q, std::int64_t E) {
    if (Q.n != 2) throw std::invalid_argument("ellipse_lattice_count: form must be 2x2");
    return static_cast<std::int64_t>(enumerate_quadric_lattice(Q, E).size());
}

std::int64_t pair_count_by_projection(std::int64_t E, std::span<const std::int64_t> xi) {
    if (xi.size() != 3) throw std::invalid_argument("pair_count_by_projection: xi must have 3 entries");
    if (E < 0 || E > 4'000'000'000'000'000)
        throw std::invalid_argument("pair_count_by_projection: E outside the safe integer range");
    std::int64_t norm_sq = 0;
    for (std::int64_t v : xi) norm_sq += v * v;
    if (norm_sq == 0) return representation_count(3, E); // antipodal pairs (z, -z)
    if (norm_sq % 2 != 0) return 0;                      // <xi,z> = |xi|^2/2 needs an integer rhs
    const std::int64_t disc = 4 * E - norm_sq;           // (2z_c - xi_c)^2 <= 4E - |xi|^2 per coordinate
    if (disc < 0) return 0;
    const std::int64_t h = norm_sq / 2;
    const std::int64_t s = isqrt64(disc);

    int pivot = 0;
    for (int i = 1; i < 3; ++i)
        if (std::abs(xi[i]) > std::abs(xi[pivot])) pivot = i;
    const int j = pivot == 0 ? 1 : 0;
    const int k = pivot == 2 ? 1 : 2;
    const std::int64_t m = std::abs(xi[pivot]);

    std::int64_t count = 0;
    // ceil((xi[j]-s)/2) .. floor((xi[j]+s)/2)
    auto floor_div2 = [](std::int64_t v) { return v >= 0 ? v / 2 : -((-v + 1) / 2); };
    auto ceil_div2 = [](std::int64_t v) { return v >= 0 ? (v + 1) / 2 : -((-v) / 2); };
    for (std::int64_t zj = ceil_div2(xi[j] - s); zj <= floor_div2(xi[j] + s); ++zj) {
        const auto prog = solve_congruence(xi[k], h - xi[j] * zj, m);
        if (!prog) continue;
        std::int64_t zk_lo = ceil_div2(xi[k] - s);
        const std::int64_t zk_hi = floor_div2(xi[k] + s);
        // advance zk_lo to the progression first + step*t
        std::int64_t offset = ((zk_lo - prog->first) % prog->step + prog->step) % prog->step;
        if (offset != 0) zk_lo += prog->step - offset;
        for (std::int64_t zk = zk_lo; zk <= zk_hi; zk += prog->step) {
            // divisible by construction of the progression
            const std::int64_t zp = (h - xi[j] * zj - xi[k] * zk) / xi[pivot];
            if (zj * zj + zk * zk + zp * zp == E) ++count;
        }
    }
    return count;
}

KGrowthTable k_growth_table(int n, std::int64_t E_lo, std::int64_t E_hi) {
    KGrowthTable table;
    std::vector<std::pair<double, double>> fit_points;
    for (std::int64_t E = E_lo; E <= E_hi; ++E) {
        const FrequencySet fs = enumerate_sphere_lattice(n, E);
        if (fs.size() > 1'000'000)
            throw std::invalid_argument("k_growth_table: more than 10^6 points at E=" + std::to_string(E));
        KGrowthRow row;
        row.E = E;
        row.r = static_cast<std::int64_t>(fs.size());
        if (row.r > 0) {
            const EnergyReport rep = additive_pairs_K(fs);
            row.K_all = rep.K_all;
            row.K_nonzero = rep.K_nonzero;
            row.argmax_nonzero = rep.argmax_nonzero;
        }
        table.max_K_nonzero = std::max(table.max_K_nonzero, row.K_nonzero);
        if (row.K_nonzero > 0 && E > 0)
            fit_points.emplace_back(static_cast<double>(E), static_cast<double>(row.K_nonzero));
        table.rows.push_back(std::move(row));
    }
    std::size_t distinct = 0;
    for (std::size_t i = 0; i < fit_points.size(); ++i)
        if (i == 0 || fit_points[i].first != fit_points[i - 1].first) ++distinct;
    if (distinct >= 2) {
        table.fit = growth_fit(fit_points);
        table.fit_valid = true;
    }
    return table;
}

} // namespace curvemoments
