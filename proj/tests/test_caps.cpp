#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

#include "curvemoments/caps.hpp"
#include "curvemoments/expsum.hpp"

using namespace curvemoments;

namespace {

Vec circle_point(double theta) { return {std::cos(theta), std::sin(theta)}; }

Vec random_unit(std::uint64_t& state, int n) {
    Vec v(n);
    double nn = 0.0;
    while (nn == 0.0) {
        for (int i = 0; i < n; ++i) v[i] = uniform01(state) - 0.5;
        nn = dot(v, v);
    }
    return normalized(v);
}

} // namespace

TEST_CASE("circle partition at K=2 has 8 caps and covers") {
    const CapPartition part(Surface::sphere(2), 2.0);
    CHECK(part.size() == 8);
    std::uint64_t state = 1;
    std::set<int> seen;
    for (int i = 0; i < 10'000; ++i) {
        const int cap = part.assign(circle_point(2.0 * std::numbers::pi * uniform01(state)));
        REQUIRE(cap >= 0);
        REQUIRE(cap < static_cast<int>(part.size()));
        seen.insert(cap);
    }
    CHECK(seen.size() == 8);
}

TEST_CASE("paraboloid base partition is a uniform grid") {
    const CapPartition part(Surface::paraboloid(Matrix::identity(1), 1.0), 4.0);
    CHECK(part.size() == 8); // width 1/4 cells on [-1, 1]
    for (const Cap& c : part.caps()) CHECK(c.scale == 0.25);
    CHECK(part.assign({-0.99}) == 0);
    CHECK(part.assign({0.99}) == 7);
}

TEST_CASE("cap centers assign to their own caps") {
    for (double K : {2.0, 5.0, 16.0}) {
        const CapPartition part(Surface::sphere(3), K);
        for (const Cap& c : part.caps()) CHECK(part.assign(c.center) == c.index);
    }
    const CapPartition para(Surface::paraboloid(Matrix::identity(2), 1.0), 6.0);
    for (const Cap& c : para.caps()) {
        const Vec base(c.center.begin(), c.center.end() - 1);
        CHECK(para.assign(base) == c.index);
    }
}

TEST_CASE("sphere cap diameters stay below 4/K") {
    std::uint64_t state = 23;
    for (int n : {2, 3}) {
        for (double K : {4.0, 8.0}) {
            const CapPartition part(Surface::sphere(n), K);
            std::map<int, std::vector<Vec>> buckets;
            for (int i = 0; i < 20'000; ++i) {
                Vec u = random_unit(state, n);
                buckets[part.assign(u)].push_back(std::move(u));
            }
            double worst = 0.0;
            for (const auto& [cap, pts] : buckets)
                for (std::size_t a = 0; a < pts.size(); ++a)
                    for (std::size_t b = a + 1; b < pts.size(); ++b) {
                        Vec d(pts[a]);
                        for (std::size_t c = 0; c < d.size(); ++c) d[c] -= pts[b][c];
                        worst = std::max(worst, norm(d));
                    }
            CAPTURE(n);
            CAPTURE(K);
            CHECK(worst <= 4.0 / K + 1e-12);
        }
    }
}

TEST_CASE("partition totality on random sphere points") {
    const CapPartition part(Surface::sphere(3), 8.0);
    std::uint64_t state = 7;
    for (int i = 0; i < 100'000; ++i) {
        const int cap = part.assign(random_unit(state, 3));
        REQUIRE(cap >= 0);
        REQUIRE(cap < static_cast<int>(part.size()));
    }
}

TEST_CASE("assign_points conserves the set") {
    const FrequencySet fs = enumerate_sphere_lattice(2, 25);

    const auto coarse = assign_points(CapPartition(fs.surface(), 1.0), fs);
    std::size_t total = 0;
    for (const auto& [cap, members] : coarse) total += members.size();
    CHECK(total == 12);

    const FrequencySet single =
        FrequencySet(Surface::sphere(2), 5.0, {Frequency{{3, 4}, std::nullopt}}, true, 25);
    CHECK(assign_points(CapPartition(single.surface(), 4.0), single).size() == 1);

    // at K=64 the twelve sqrt(2)/5-separated directions land in twelve caps
    const auto fine = assign_points(CapPartition(fs.surface(), 64.0), fs);
    CHECK(fine.size() == 12);
    for (const auto& [cap, members] : fine) CHECK(members.size() == 1);
}

TEST_CASE("wedge volume") {
    CHECK(wedge_volume({{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}) == doctest::Approx(1.0));
    CHECK(wedge_volume({{1, 0}, {1, 0}}) == 0.0);
    const double s = 1.0 / std::sqrt(2.0);
    CHECK(wedge_volume({{1, 0}, {s, s}}) == doctest::Approx(s).epsilon(1e-12));
}

TEST_CASE("wedge volume is permutation and rotation invariant and scales linearly") {
    std::uint64_t state = 3;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Vec> vs;
        for (int i = 0; i < 3; ++i) vs.push_back(random_unit(state, 3));
        const double base = wedge_volume(vs);
        CHECK(wedge_volume({vs[2], vs[0], vs[1]}) == doctest::Approx(base).epsilon(1e-10));

        // rotate by a Gram-Schmidt frame
        std::vector<Vec> frame;
        while (frame.size() < 3) {
            Vec v = random_unit(state, 3);
            for (const Vec& f : frame) {
                const double c = dot(v, f);
                for (int i = 0; i < 3; ++i) v[i] -= c * f[i];
            }
            if (norm(v) > 1e-6) frame.push_back(normalized(v));
        }
        std::vector<Vec> rotated;
        for (const Vec& v : vs) {
            Vec r(3, 0.0);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 3; ++j) r[i] += frame[i][j] * v[j];
            rotated.push_back(r);
        }
        CHECK(wedge_volume(rotated) == doctest::Approx(base).epsilon(1e-9));

        std::vector<Vec> scaled = vs;
        for (double& x : scaled[0]) x *= 3.0;
        CHECK(wedge_volume(scaled) == doctest::Approx(3.0 * base).epsilon(1e-9));
    }
}

TEST_CASE("transversal tuple search") {
    const std::vector<Vec> basis{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    const auto found = transversal_tuple_search(basis, {0, 1, 2}, 3, 0.5);
    REQUIRE(found.has_value());
    CHECK(*found == std::vector<int>{0, 1, 2});

    const std::vector<Vec> same{{1, 0}, {1, 0}, {1, 0}};
    CHECK_FALSE(transversal_tuple_search(same, {0, 1, 2}, 2, 0.1).has_value());

    const double d5 = 5.0 * std::numbers::pi / 180.0;
    const std::vector<Vec> angles{circle_point(0.0), circle_point(d5),
                                  circle_point(std::numbers::pi / 2.0)};
    const auto pair = transversal_tuple_search(angles, {10, 11, 12}, 2, 0.9);
    REQUIRE(pair.has_value());
    CHECK(*pair == std::vector<int>{10, 12});
}

TEST_CASE("classification dichotomy") {
    SUBCASE("single nonzero sum is narrow") {
        const std::map<int, cplx> sums{{0, cplx{1.0, 0.0}}};
        const std::map<int, Vec> normals{{0, {1.0, 0.0}}};
        const Classification cls = classify_point(sums, normals, 10.0, 2);
        CHECK_FALSE(is_broad(cls));
        CHECK(std::get<Narrow>(cls).max_abs_sum == 1.0);
    }
    SUBCASE("orthonormal equal sums are broad") {
        std::map<int, cplx> sums;
        std::map<int, Vec> normals;
        for (int i = 0; i < 3; ++i) {
            sums[i] = 1.0;
            Vec v(3, 0.0);
            v[i] = 1.0;
            normals[i] = v;
        }
        const Classification cls = classify_point(sums, normals, 10.0, 3);
        REQUIRE(is_broad(cls));
        CHECK(std::get<Broad>(cls).wedge == doctest::Approx(1.0));
        CHECK(std::get<Broad>(cls).caps == std::vector<int>{0, 1, 2});
    }
    SUBCASE("identical normals force narrow with the orthogonal hyperplane") {
        const std::map<int, cplx> sums{{0, cplx{1.0, 0.0}}, {1, cplx{0.9, 0.0}}};
        const std::map<int, Vec> normals{{0, {1.0, 0.0}}, {1, {1.0, 0.0}}};
        const Classification cls = classify_point(sums, normals, 8.0, 2);
        REQUIRE_FALSE(is_broad(cls));
        const Vec v = std::get<Narrow>(cls).hyperplane_normal;
        CHECK(std::abs(dot(v, {1.0, 0.0})) < 1e-10);
        CHECK(norm(v) == doctest::Approx(1.0));
    }
    SUBCASE("all-zero sums are rejected") {
        const std::map<int, cplx> sums{{0, cplx{0.0, 0.0}}};
        const std::map<int, Vec> normals{{0, {1.0, 0.0}}};
        CHECK_THROWS_AS(classify_point(sums, normals, 8.0, 2), std::invalid_argument);
    }
}

TEST_CASE("broad pointwise bound") {
    std::map<int, cplx> sums;
    std::map<int, Vec> normals;
    for (int i = 0; i < 2; ++i) {
        sums[i] = 1.0;
        Vec v(2, 0.0);
        v[i] = 1.0;
        normals[i] = v;
    }
    const double K = 4.0; // #caps = 2 <= K^(n-1)
    const Classification cls = classify_point(sums, normals, K, 2);
    REQUIRE(is_broad(cls));
    auto [lhs, rhs] = broad_pointwise_bound(sums, cls, K, 2);
    CHECK(lhs == doctest::Approx(2.0));
    CHECK(rhs == doctest::Approx(K * K));
    CHECK(lhs <= rhs);

    // homogeneity: scaling every sum by 2 doubles both sides
    std::map<int, cplx> doubled = sums;
    for (auto& [idx, c] : doubled) c *= 2.0;
    const Classification cls2 = classify_point(doubled, normals, K, 2);
    REQUIRE(is_broad(cls2));
    auto [lhs2, rhs2] = broad_pointwise_bound(doubled, cls2, K, 2);
    CHECK(lhs2 == doctest::Approx(2.0 * lhs));
    CHECK(rhs2 == doctest::Approx(2.0 * rhs));

    CHECK_THROWS_AS(
        broad_pointwise_bound(sums, Classification{Narrow{{1.0, 0.0}, 1.0}}, K, 2),
        std::invalid_argument);
}

TEST_CASE("broad bound holds on random configurations within the contract") {
    std::uint64_t state = 17;
    int broad_seen = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const int n = 2;
        const double K = 10.0;
        const int caps = 1 + static_cast<int>(uniform01(state) * 10); // <= K^(n-1)
        std::map<int, cplx> sums;
        std::map<int, Vec> normals;
        for (int c = 0; c < caps; ++c) {
            sums[c] = std::polar(uniform01(state) + 1e-6, 2.0 * std::numbers::pi * uniform01(state));
            normals[c] = random_unit(state, n);
        }
        const Classification cls = classify_point(sums, normals, K, n);
        if (!is_broad(cls)) continue;
        ++broad_seen;
        auto [lhs, rhs] = broad_pointwise_bound(sums, cls, K, n);
        CHECK(lhs <= rhs * (1.0 + 1e-9));
    }
    CHECK(broad_seen > 0);
}

TEST_CASE("parabolic rescaling") {
    SUBCASE("identity at rho=1, a=0") {
        const auto res = parabolic_rescale({{0.25}, {-0.5}}, {0.0}, 1.0, 4.0);
        CHECK(res.points[0][0] == 0.25);
        CHECK(res.points[1][0] == -0.5);
        CHECK(res.factor == 1.0);
    }
    SUBCASE("base dimension 1 instantiation") {
        const double rho = 0.125, p = 4.0;
        const auto res = parabolic_rescale({{rho / 2.0}}, {0.0}, rho, p);
        CHECK(res.points[0][0] == doctest::Approx(0.5));
        CHECK(res.factor == doctest::Approx(std::pow(rho, -2.0 / p)));
    }
    SUBCASE("bijective on the cap") {
        std::uint64_t state = 5;
        for (int trial = 0; trial < 100; ++trial) {
            const double rho = 0.01 + uniform01(state);
            const Vec center{uniform01(state) - 0.5, uniform01(state) - 0.5};
            std::vector<Vec> pts;
            for (int i = 0; i < 8; ++i) {
                const double r = rho * std::sqrt(uniform01(state));
                const double th = 2.0 * std::numbers::pi * uniform01(state);
                pts.push_back({center[0] + r * std::cos(th), center[1] + r * std::sin(th)});
            }
            const auto res = parabolic_rescale(pts, center, rho, 3.0);
            for (std::size_t i = 0; i < pts.size(); ++i) {
                CHECK(norm(res.points[i]) <= 1.0 + 1e-12);
                for (int c = 0; c < 2; ++c) {
                    const double recovered = center[c] + rho * res.points[i][c];
                    CHECK(recovered == doctest::Approx(pts[i][c]).epsilon(1e-12));
                }
            }
        }
    }
    SUBCASE("points outside the cap are rejected") {
        CHECK_THROWS_AS(parabolic_rescale({{0.3}}, {0.0}, 0.25, 4.0), std::invalid_argument);
    }
}

TEST_CASE("space-time sets assign through their base points") {
    const FrequencySet fs = paraboloid_points(1, 4);
    const CapPartition part(fs.surface(), 4.0);
    const auto groups = assign_points(part, fs);
    std::size_t total = 0;
    for (const auto& [cap, members] : groups) total += members.size();
    CHECK(total == fs.size());
    // base points z/4 for z in [-3,3] spread across the width-1/4 cells
    CHECK(groups.size() == 7);
}

TEST_CASE("near subspace filter") {
    const FrequencySet fs = enumerate_sphere_lattice(2, 25);

    const FrequencySet kept = near_subspace_filter(fs, {0.0, 1.0}, 0.1, 1.0);
    REQUIRE(kept.size() == 2); // exactly (+-5, 0)
    for (const auto& f : kept.points()) {
        CHECK(f.spatial[1] == 0);
        CHECK(std::abs(f.spatial[0]) == 5);
    }

    // equator points survive any positive cutoff against e_n
    const FrequencySet eq =
        FrequencySet(Surface::sphere(3), 5.0,
                     {Frequency{{3, 4, 0}, std::nullopt}, Frequency{{5, 0, 0}, std::nullopt}}, true, 25);
    CHECK(near_subspace_filter(eq, {0.0, 0.0, 1.0}, 1e-9, 1.0).size() == 2);

    // a point aligned with v is dropped once c/M < 1
    const FrequencySet e1 =
        FrequencySet(Surface::sphere(2), 1.0, {Frequency{{1, 0}, std::nullopt}}, true, 1);
    CHECK(near_subspace_filter(e1, {1.0, 0.0}, 0.5, 1.0).size() == 0);
}
