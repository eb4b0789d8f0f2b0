#include <gtest/gtest.h>

#include "reference.hpp"
#include "test_util.hpp"

using namespace rangeagg;
using namespace rangeagg::testing;

TEST(BruteIfp, Examples) {
    auto P = points(2, {0, 0, 1, 0, 5, 0});
    std::vector<double> q{0, 0};
    EXPECT_EQ(brute_ifp(P, {{0, 0}, 2.0}, q), std::optional<PointId>(1));
    EXPECT_FALSE(brute_ifp(P, {{10, 10}, 1.0}, q));
    auto T = points(2, {1, 0, -1, 0, 0, 0});
    EXPECT_EQ(brute_ifp(T, {{0, 0}, 2.0}, q), std::optional<PointId>(0));
}

TEST(BruteBd, Examples) {
    auto P = points(2, {0.9, 0, 5, 0});
    EXPECT_EQ(brute_bd(P, {{0, 0}, 1.0}, {{5, 0}, 2.0}), std::optional<PointId>(0));
    EXPECT_FALSE(brute_bd(P, {{0, 0}, 1.0}, {{0, 0}, 3.0}));  // B_out contains B_in
    auto E = points(1, {2.0});
    EXPECT_EQ(brute_bd(E, {{0.0}, 2.0}, {{10.0}, 1.0}), std::optional<PointId>(0));  // closed B_in
}

TEST(RefMeb, Cases) {
    auto two = points(3, {1, 2, 3, 3, 2, 1});
    auto b = ref_meb(two, {0, 1});
    EXPECT_NEAR(b.radius, std::sqrt(8.0) / 2, 1e-9);
    EXPECT_NEAR(b.center[0], 2.0, 1e-6);
    auto tri = points(2, {0, 0, 1, 0, 0.5, std::sqrt(3.0) / 2});
    EXPECT_NEAR(ref_meb(tri, {0, 1, 2}).radius, 1.0 / std::sqrt(3.0), 1e-4);
    EXPECT_THROW(ref_meb(tri, {}), std::invalid_argument);

    auto R = uniform_points(20, 5, 6);
    std::vector<PointId> all(20);
    std::iota(all.begin(), all.end(), 0);
    auto m = ref_meb(R, all);
    double dia = 0.0;
    for (PointId i : all) {
        EXPECT_TRUE(leq_tol(dist(R[i], m.center), m.radius));
        for (PointId j : all) dia = std::max(dia, dist(R[i], R[j]));
    }
    EXPECT_GE(m.radius, dia / 2);
}

TEST(ValidAifp, Examples) {
    auto P = points(2, {1.3, 0, 1.4, 0, 0.2, 0});
    std::vector<double> q{0, 0};
    Ball B{{0, 0}, 1.5};
    EXPECT_TRUE(valid_aifp(PointId{0}, q, B, P, 0.1, 0.1).valid);   // 1.3 >= 1.26
    EXPECT_FALSE(valid_aifp(PointId{2}, q, B, P, 0.1, 0.1).valid);  // 0.2 < 1.26
    EXPECT_TRUE(valid_aifp(brute_ifp(P, B, q), q, B, P, 0.1, 0.1).valid);
    auto Q = points(2, {0, 0, 3, 0});
    EXPECT_FALSE(valid_aifp(PointId{1}, q, {{0, 0}, 1.0}, Q, 0.5, 0.5).valid);  // outside B(1.5)
    EXPECT_FALSE(valid_aifp(std::nullopt, q, B, P, 0.1, 0.1).valid);
    EXPECT_TRUE(valid_aifp(std::nullopt, q, {{9, 9}, 1.0}, P, 0.1, 0.1).valid);
}

TEST(ValidAmeb, Examples) {
    auto P = points(2, {0, 0, 2, 0});
    Ball B{{1, 0}, 1.0};
    EXPECT_TRUE(valid_ameb(Ball{{1, 0}, 1.05}, B, P, 0.1, 0.3).valid);
    EXPECT_FALSE(valid_ameb(Ball{{1, 0}, 1.2}, B, P, 0.1, 0.3).valid);
    EXPECT_FALSE(valid_ameb(Ball{{0.5, 0}, 1.2}, B, P, 0.5, 0.3).valid);  // misses (2,0)
    EXPECT_FALSE(valid_ameb(std::nullopt, B, P, 0.1, 0.1).valid);
    EXPECT_TRUE(valid_ameb(std::nullopt, {{9, 9}, 1.0}, P, 0.1, 0.1).valid);
    auto R = uniform_points(30, 3, 2);
    Ball C{vec(R[0]), 0.5};
    auto inside = points_in_ball(R, C);
    auto m = ref_meb(R, inside);
    m.radius *= 1.0 + 1e-7;
    EXPECT_TRUE(valid_ameb(m, C, R, 1e-4, 0.1).valid);
}

TEST(ValidityEquivalence, SmallInstances) {
    // the direct verdicts agree with enumeration over every admissible P'
    RngStream rng(21, 0);
    for (int it = 0; it < 60; ++it) {
        const std::size_t n = 1 + rng.below(8), d = 1 + rng.below(2);
        auto P = uniform_points(n, d, 500 + it);
        Ball B{vec(P[rng.below(n)]), 0.2 + 0.5 * rng.uniform()};
        std::vector<double> q = vec(P[rng.below(n)]);
        const double eps = 0.05 + 0.4 * rng.uniform(), gamma = 0.1 + 0.5 * rng.uniform();
        EXPECT_EQ(valid_aifp(std::nullopt, q, B, P, eps, gamma).valid,
                  reference::exists_aifp(std::nullopt, q, B, P, eps, gamma));
        for (PointId p = 0; p < n; ++p)
            EXPECT_EQ(valid_aifp(p, q, B, P, eps, gamma).valid, reference::exists_aifp(p, q, B, P, eps, gamma));
        Ball C{vec(P[rng.below(n)]), 0.1 + rng.uniform()};
        EXPECT_EQ(valid_ameb(C, B, P, eps, gamma).valid, reference::exists_ameb(C, B, P, eps, gamma));
    }
}
