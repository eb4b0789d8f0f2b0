#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace rangeagg;
using namespace rangeagg::testing;

TEST(CaifpParams, Xi) {
    EXPECT_DOUBLE_EQ(caifp_xi(0.19, 0.1), 0.1);
    EXPECT_NEAR(caifp_xi(0.19, 0.5), 1.0 / 0.9 - 1.0, 1e-15);
}

TEST(CaifpParams, Ladder) {
    auto P = shared(points(2, {1, 0}));
    CaifpIndex a(P, nullptr, 0.19, 0.1, 0.2, {2.0, 1.0, 2.0}, 1);
    EXPECT_DOUBLE_EQ(a.xi(), 0.1);
    EXPECT_EQ(a.m(), 8);
    EXPECT_EQ(a.num_rungs(), 9u);
    EXPECT_NEAR(a.radius(7), std::pow(1.1, 7), 1e-12);
    EXPECT_LT(a.radius(7), 2.0);
    EXPECT_GE(a.radius(8), 2.0);
    EXPECT_DOUBLE_EQ(a.delta_prime(), 0.2 / 8);
    EXPECT_EQ(a.repetitions(), boost_repetitions(0.025));

    CaifpIndex b(P, nullptr, 0.19, 0.1, 0.2, {2.0, 1.0, 1.1}, 1);
    EXPECT_EQ(b.m(), 1);
    EXPECT_THROW(CaifpIndex(P, nullptr, 0.19, 0.1, 0.2, {2.0, 1.0, 1.0}, 1), std::invalid_argument);
    EXPECT_THROW(CaifpIndex(P, nullptr, 0.19, 0.1, 0.2, {2.0, 0.0, 1.0}, 1), std::invalid_argument);
}

TEST(CaifpQuery, EmptyRangeIsNull) {
    auto P = shared(points(2, {10, 0, 0, 10}));
    CaifpIndex idx(P, nullptr, 0.19, 0.1, 0.2, {2.0, 0.5, 2.0}, 3);
    std::vector<double> q{0, 0};
    for (int t = 0; t < 20; ++t) {
        RngStream rng(t, 0);
        EXPECT_FALSE(idx.query({{0, 0}, 2.0}, q, rng).point);
    }
    RngStream rng(0, 0);
    EXPECT_THROW(idx.query({{0, 0}, 2.5}, q, rng), std::invalid_argument);
}

TEST(CaifpQuery, SingleCandidate) {
    auto P = shared(points(2, {1, 0}));
    std::vector<double> q{0, 0};
    Ball B{{0, 0}, 2.0};
    int hits = 0;
    for (int t = 0; t < 200; ++t) {
        CaifpIndex idx(P, nullptr, 0.19, 0.1, 0.2, {2.0, 0.5, 2.0}, 500 + t);
        RngStream rng(t, 9);
        auto a = idx.query(B, q, rng);
        if (a.point) {
            EXPECT_EQ(*a.point, 0u);
            EXPECT_TRUE(valid_aifp(a.point, q, B, *P, 0.19, 0.1).valid);
            ++hits;
        }
    }
    EXPECT_GE(hits, 0.75 * 200);
}

TEST(CaifpQuery, TwoShells) {
    auto P = shared(points(2, {0.6, 0, -1.4, 0, 0, 0.6, 0, -1.4}));
    std::vector<double> q{0, 0};
    Ball B{{0, 0}, 1.5};
    int good = 0;
    for (int t = 0; t < 200; ++t) {
        CaifpIndex idx(P, nullptr, 0.19, 0.1, 0.2, {1.5, 0.5, 1.5}, 900 + t);
        RngStream rng(t, 2);
        auto a = idx.query(B, q, rng);
        if (!a.point) continue;
        EXPECT_TRUE(leq_tol(dist((*P)[*a.point], B.center), 1.1 * B.radius));
        bool v = valid_aifp(a.point, q, B, *P, 0.19, 0.1).valid;
        good += v;
    }
    EXPECT_GE(good, (1.0 - 0.2 - 0.05) * 200);
}

TEST(CaifpQuery, NullRungBoundsFarthest) {
    // a NULL from rung i, when correct, means nothing of P ∩ B lies beyond (1+xi) r_i from q;
    // a wrong NULL happens with probability below delta'
    auto P = shared(generate_dataset({60, 3, Distribution::uniform_cube, 1, 0.0, 4}));
    std::vector<double> q = vec((*P)[0]);
    Ball B{q, 0.6};
    const double far = dist((*P)[*brute_ifp(*P, B, q)], q);
    int nulls = 0, missed = 0;
    for (int t = 0; t < 10; ++t) {
        CaifpIndex idx(P, nullptr, 0.19, 0.1, 0.2, {0.6, 0.05, 0.7}, 40 + t);
        for (long long i = 0; i <= idx.m(); ++i) {
            RngStream rng(t, 100 + i);
            auto a = idx.rung(i).query(B, {q, idx.radius(i)}, rng);
            if (a.point) continue;
            ++nulls;
            missed += far > (1.0 + idx.xi()) * idx.radius(i);
        }
    }
    EXPECT_GT(nulls, 0);
    EXPECT_LE(missed, 0.2 * nulls);
}
