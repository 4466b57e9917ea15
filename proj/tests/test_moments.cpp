#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>
#include <numbers>

#include "curvemoments/moments.hpp"

using namespace curvemoments;

namespace {

// independent pair-counting oracle for int |f|^4 with unit coefficients
double unit_l4_fourth_by_counting(const FrequencySet& fs) {
    std::map<std::vector<std::int64_t>, std::int64_t> counts;
    std::vector<std::int64_t> sum(fs.surface().spatial_dim());
    for (const auto& a : fs.points())
        for (const auto& b : fs.points()) {
            for (std::size_t k = 0; k < sum.size(); ++k) sum[k] = a.spatial[k] + b.spatial[k];
            ++counts[sum];
        }
    double s = 0.0;
    for (const auto& [xi, c] : counts) s += static_cast<double>(c) * static_cast<double>(c);
    return s;
}

FrequencySet single_point_set() {
    return FrequencySet(Surface::sphere(2), 5.0, {Frequency{{3, 4}, std::nullopt}}, true, 25);
}

} // namespace

TEST_CASE("lp norms") {
    const FrequencySet one = single_point_set();
    const FieldSamples unimodular =
        evaluate_periodic(one, make_coefficients(one, ModelSpec{}), TorusGrid{{16, 16}});
    for (double p : {1.0, 2.0, 3.0, 4.0, 7.5})
        CHECK(lp_norm(unimodular, p) == doctest::Approx(1.0).epsilon(1e-12));

    // f = 1 + e^{2 pi i x}: int |f|^4 = 6
    std::vector<cplx> vals(8);
    for (int j = 0; j < 8; ++j) vals[j] = 1.0 + std::polar(1.0, 2.0 * std::numbers::pi * j / 8.0);
    const FieldSamples f{TorusGrid{{8}}, vals};
    CHECK(lp_norm(f, 4.0) == doctest::Approx(std::pow(6.0, 0.25)).epsilon(1e-12));

    CHECK_THROWS_AS(lp_norm(f, 0.5), std::invalid_argument);
}

TEST_CASE("l4_exact convolution identity") {
    // {0 -> 1, 1 -> 1}: a*a = (1, 2, 1), sum of squares 6
    const FrequencySet pair =
        FrequencySet(Surface::sphere(2), 1.0,
                     {Frequency{{0, 1}, std::nullopt}, Frequency{{1, 0}, std::nullopt}}, true, 1);
    CHECK(l4_exact(pair, make_coefficients(pair, ModelSpec{})) ==
          doctest::Approx(std::pow(6.0, 0.25)).epsilon(1e-12));

    const FrequencySet one = single_point_set();
    CHECK(l4_exact(one, make_coefficients(one, ModelSpec{})) == doctest::Approx(1.0));
}

TEST_CASE("l4_exact matches the grid norm") {
    for (auto [n, E] : {std::pair<int, std::int64_t>{2, 25}, {2, 50}, {3, 101}}) {
        const FrequencySet fs = enumerate_sphere_lattice(n, E);
        for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
            const auto coeffs = make_coefficients(fs, ModelSpec{CoefficientModel::Gaussian, seed});
            const double grid =
                lp_norm(evaluate_periodic(fs, coeffs, auto_grid(fs, 4.0)), 4.0);
            const double dual = l4_exact(fs, coeffs);
            CHECK(grid == doctest::Approx(dual).epsilon(1e-9));
        }
    }
}

TEST_CASE("moment ratios") {
    const MomentReport one = moment_ratio(single_point_set(), ModelSpec{}, 4.0);
    CHECK(one.ratio == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(one.quadrature_exact);

    const FrequencySet fs = enumerate_sphere_lattice(2, 25);
    const MomentReport p4 = moment_ratio(fs, ModelSpec{}, 4.0);
    // two independent routes to ratio^4: the counting oracle and l4_exact
    const double by_counting = unit_l4_fourth_by_counting(fs) / (12.0 * 12.0);
    CHECK(std::pow(p4.ratio, 4.0) == doctest::Approx(by_counting).epsilon(1e-9));
    const double by_convolution = l4_exact(fs, make_coefficients(fs, ModelSpec{}));
    CHECK(p4.norm_p == doctest::Approx(by_convolution).epsilon(1e-9));

    const MomentReport p2 = moment_ratio(fs, ModelSpec{}, 2.0);
    CHECK(p2.ratio == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("lp norms are monotone in p on a probability space") {
    for (std::uint64_t seed : {1, 2, 3, 4, 5}) {
        const FrequencySet fs = enumerate_sphere_lattice(2, 50);
        const auto coeffs = make_coefficients(fs, ModelSpec{CoefficientModel::Gaussian, seed});
        const FieldSamples samples = evaluate_periodic(fs, coeffs, auto_grid(fs, 8.0));
        double prev = 0.0;
        for (double p : {1.0, 2.0, 8.0 / 3.0, 3.0, 4.0, 6.0, 8.0}) {
            const double cur = lp_norm(samples, p);
            CHECK(prev <= cur + 1e-9);
            prev = cur;
        }
    }
}

TEST_CASE("even-p norms are stable under grid doubling") {
    const FrequencySet fs = enumerate_sphere_lattice(2, 25);
    const auto coeffs = make_coefficients(fs, ModelSpec{CoefficientModel::RandomPhase, 2});
    for (double p : {2.0, 4.0}) {
        const double coarse = lp_norm(evaluate_periodic(fs, coeffs, TorusGrid{{32, 32}}), p);
        const double fine = lp_norm(evaluate_periodic(fs, coeffs, TorusGrid{{64, 64}}), p);
        CHECK(std::abs(coarse - fine) < 1e-10);
    }
}

TEST_CASE("non-even p uses refinement and still reports a finite norm") {
    const FrequencySet fs = enumerate_sphere_lattice(3, 25);
    const MomentReport rep = moment_ratio(fs, ModelSpec{CoefficientModel::RandomPhase, 1}, 3.0);
    CHECK_FALSE(rep.quadrature_exact);
    CHECK(rep.ratio > 0.0);
    CHECK(std::isfinite(rep.ratio));
}

TEST_CASE("decoupling defects") {
    const FrequencySet fs = enumerate_sphere_lattice(2, 25);
    const CapPartition part(fs.surface(), 8.0);

    SUBCASE("single nonempty cap has defect 1") {
        const auto cap = make_coefficients(fs, ModelSpec{CoefficientModel::CapConcentrated, 0});
        const DecouplingReport rep = decoupling_defect(fs, cap, part, 4.0);
        CHECK(rep.defect == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("p=2 is exact orthogonality") {
        for (std::uint64_t seed : {1, 2, 3}) {
            const auto coeffs = make_coefficients(fs, ModelSpec{CoefficientModel::Gaussian, seed});
            const DecouplingReport rep = decoupling_defect(fs, coeffs, part, 2.0);
            CHECK(std::abs(rep.defect - 1.0) < 1e-10);
        }
    }
    SUBCASE("unit-coefficient defect at delta=1/8 against direct summation") {
        const auto coeffs = make_coefficients(fs, ModelSpec{});
        const DecouplingReport rep = decoupling_defect(fs, coeffs, part, 4.0);
        // direct-summation route on the same grid
        const TorusGrid grid{rep.grid_dims};
        std::vector<Vec> freqs(fs.size());
        for (std::size_t i = 0; i < fs.size(); ++i)
            freqs[i] = Vec(fs.points()[i].spatial.begin(), fs.points()[i].spatial.end());
        std::vector<Vec> pts(grid.size());
        for (std::size_t x = 0; x < pts.size(); ++x)
            pts[x] = {static_cast<double>(x / grid.dims[1]) / grid.dims[0],
                      static_cast<double>(x % grid.dims[1]) / grid.dims[1]};
        auto p4 = [](const std::vector<cplx>& vals) {
            double s = 0.0;
            for (const cplx& v : vals) s += std::norm(v) * std::norm(v);
            return std::pow(s / static_cast<double>(vals.size()), 0.25);
        };
        const double lhs = p4(evaluate_direct(freqs, coeffs.amps, pts));
        std::map<int, std::vector<std::size_t>> groups;
        for (std::size_t i = 0; i < fs.size(); ++i)
            groups[part.assign(fs.unit_point(i))].push_back(i);
        double rhs_sq = 0.0;
        for (const auto& [capidx, members] : groups) {
            std::vector<cplx> amps(fs.size(), cplx{0.0, 0.0});
            for (std::size_t i : members) amps[i] = coeffs.amps[i];
            const double np = p4(evaluate_direct(freqs, amps, pts));
            rhs_sq += np * np;
        }
        CHECK(rep.defect == doctest::Approx(lhs / std::sqrt(rhs_sq)).epsilon(1e-8));
    }
    SUBCASE("defect is invariant under global coefficient scaling") {
        auto coeffs = make_coefficients(fs, ModelSpec{CoefficientModel::Gaussian, 7});
        const double base = decoupling_defect(fs, coeffs, part, 4.0).defect;
        const cplx scale{-2.0, 1.5};
        for (cplx& a : coeffs.amps) a *= scale;
        CHECK(decoupling_defect(fs, coeffs, part, 4.0).defect ==
              doctest::Approx(base).epsilon(1e-12));
    }
}

TEST_CASE("multilinear averages") {
    SUBCASE("single unimodular points give ratio 1") {
        const std::vector<std::vector<Vec>> sets{{{1.0, 0.0}}, {{0.0, 1.0}}};
        const std::vector<std::vector<cplx>> amps{{cplx{1.0, 0.0}}, {cplx{1.0, 0.0}}};
        const MultilinearReport rep = multilinear_average(sets, amps, 16.0, 8, 4.0);
        CHECK(rep.lhs == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(rep.rhs == doctest::Approx(1.0));
        CHECK(rep.ratio == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("degenerate k=1 with one frequency") {
        const std::vector<std::vector<Vec>> sets{{{0.6, 0.8}}};
        const std::vector<std::vector<cplx>> amps{{cplx{1.0, 0.0}}};
        const MultilinearReport rep = multilinear_average(sets, amps, 8.0, 6, 4.0);
        CHECK(rep.ratio == doctest::Approx(1.0).epsilon(1e-12));
    }
    SUBCASE("transversal caps on the circle stay finite across M") {
        const FrequencySet fs = enumerate_sphere_lattice(2, 25);
        // two caps around orthogonal directions: (5,0)-ish and (0,5)-ish
        std::vector<std::vector<Vec>> sets(2);
        for (std::size_t i = 0; i < fs.size(); ++i) {
            const Vec y = fs.unit_point(i);
            if (std::abs(y[0]) > 0.9) sets[0].push_back(y);
            if (std::abs(y[1]) > 0.9) sets[1].push_back(y);
        }
        REQUIRE(sets[0].size() == 2);
        REQUIRE(sets[1].size() == 2);
        const std::vector<std::vector<cplx>> amps{{1.0, 1.0}, {1.0, 1.0}};
        double prev = 0.0;
        for (double M : {8.0, 16.0, 32.0}) {
            const MultilinearReport rep = multilinear_average(sets, amps, M, 24, 4.0);
            CHECK(std::isfinite(rep.ratio));
            CHECK(rep.ratio > 0.0);
            prev = rep.ratio;
        }
        CHECK(prev > 0.0);
    }
    SUBCASE("separation violations are rejected") {
        const std::vector<std::vector<Vec>> sets{{{1.0, 0.0}, {1.0, 1e-6}}};
        const std::vector<std::vector<cplx>> amps{{cplx{1.0, 0.0}, cplx{1.0, 0.0}}};
        CHECK_THROWS_AS(multilinear_average(sets, amps, 16.0, 8, 4.0), std::invalid_argument);
    }
    SUBCASE("subspace-filtered sets feed the average") {
        // keep only directions within 0.25 of the hyperplanes v1^perp, v2^perp
        const FrequencySet fs = enumerate_sphere_lattice(2, 25);
        const FrequencySet near_x = near_subspace_filter(fs, {0.0, 1.0}, 1.0, 4.0);
        const FrequencySet near_y = near_subspace_filter(fs, {1.0, 0.0}, 1.0, 4.0);
        REQUIRE(near_x.size() == 2);
        REQUIRE(near_y.size() == 2);
        std::vector<std::vector<Vec>> sets(2);
        for (std::size_t i = 0; i < near_x.size(); ++i) sets[0].push_back(near_x.unit_point(i));
        for (std::size_t i = 0; i < near_y.size(); ++i) sets[1].push_back(near_y.unit_point(i));
        const std::vector<std::vector<cplx>> amps{{1.0, 1.0}, {1.0, 1.0}};
        const MultilinearReport rep = multilinear_average(sets, amps, 8.0, 16, 4.0);
        CHECK(std::isfinite(rep.ratio));
        CHECK(rep.ratio > 0.0);
    }
}

TEST_CASE("growth fits") {
    std::vector<std::pair<double, double>> quad;
    for (double d : {2.0, 4.0, 8.0, 16.0}) quad.emplace_back(d, d * d);
    const GrowthFit f1 = growth_fit(quad);
    CHECK(f1.slope == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(f1.max_residual < 1e-12);

    std::vector<std::pair<double, double>> flat;
    for (double d : {2.0, 4.0, 8.0}) flat.emplace_back(d, 7.0);
    CHECK(growth_fit(flat).slope == doctest::Approx(0.0));

    std::vector<std::pair<double, double>> half;
    for (double d : {2.0, 4.0, 8.0, 16.0}) half.emplace_back(d, 3.0 * std::sqrt(d));
    const GrowthFit f3 = growth_fit(half);
    CHECK(f3.slope == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(f3.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-12));

    CHECK_THROWS_AS(growth_fit({{2.0, -1.0}, {4.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(growth_fit({{2.0, 1.0}}), std::invalid_argument);
    CHECK_THROWS_AS(growth_fit({{2.0, 1.0}, {2.0, 2.0}}), std::invalid_argument);
}
