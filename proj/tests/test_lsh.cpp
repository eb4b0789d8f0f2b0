#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace rangeagg;
using namespace rangeagg::testing;

TEST(StableHashTest, Example) {
    StableHash h{{1.0, 0.0}, 0.5, 1.0};
    std::vector<double> p{2.3, 9.0};
    EXPECT_EQ(h(p), 2);
    std::vector<double> q{-0.6, 0.0};
    EXPECT_EQ(h(q), -1);
}

TEST(StableHashTest, TranslationAlongDirection) {
    RngStream rng(5, 1);
    for (int t = 0; t < 200; ++t) {
        auto h = sample_hash(3, 0.7, rng);
        std::vector<double> p{rng.normal(), rng.normal(), rng.normal()};
        double n2 = 0.0;
        for (double a : h.direction) n2 += a * a;
        for (int k = -3; k <= 3; ++k) {
            // move p so that a.p grows by exactly k*W (up to rounding; avoid boundary cases)
            std::vector<double> q = p;
            for (int j = 0; j < 3; ++j) q[j] += k * h.width * h.direction[j] / n2;
            double frac = (h.offset + h.direction[0] * p[0] + h.direction[1] * p[1] + h.direction[2] * p[2]) / h.width;
            frac -= std::floor(frac);
            if (frac < 1e-6 || frac > 1 - 1e-6) continue;
            EXPECT_EQ(h(q), h(p) + k);
        }
    }
}

TEST(StableHashTest, FloorToInt) {
    EXPECT_EQ(floor_to_int(2.0), 2);
    EXPECT_EQ(floor_to_int(2.7), 2);
    EXPECT_EQ(floor_to_int(-0.2), -1);
    EXPECT_EQ(floor_to_int(-3.0), -3);
    EXPECT_EQ(floor_to_int(0.0), 0);
    EXPECT_THROW(sample_hash(2, 0.0, *std::make_unique<RngStream>(1, 1)), std::invalid_argument);
}

TEST(SignMapTest, Balanced) {
    int ones = 0;
    for (std::uint64_t s = 0; s < 10000; ++s) ones += SignMap{splitmix64(s)}(17);
    EXPECT_NEAR(ones / 10000.0, 0.5, 0.02);
    SignMap m{99};
    int same = 0;
    for (int v = 0; v < 10000; ++v) same += m(v) == m(v);
    EXPECT_EQ(same, 10000);
}

TEST(CollisionProb, Limits) {
    EXPECT_EQ(collision_prob(0.0, 1.0), 1.0);
    EXPECT_GT(collision_prob(1e-6, 1.0), 0.999);
    EXPECT_LT(collision_prob(1e6, 1.0), 1e-5);
    double prev = 1.0;
    for (double s = 0.05; s < 20.0; s *= 1.3) {
        double p = collision_prob(s, 1.0);
        EXPECT_LT(p, prev);
        prev = p;
    }
    EXPECT_THROW(collision_prob(1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(collision_prob(-1.0, 1.0), std::invalid_argument);
}

TEST(CollisionProb, ScaleInvariant) {
    for (double s : {0.1, 0.5, 1.0, 3.0})
        for (double k : {0.01, 2.0, 1000.0}) EXPECT_NEAR(collision_prob(s, 1.0), collision_prob(k * s, k), 1e-12);
}

TEST(CollisionProb, MonteCarloSmall) {
    RngStream rng(12, 0);
    const double W = 1.0, s = 0.5;
    std::vector<double> p{0.0, 0.0}, q{s, 0.0};
    int hit = 0;
    const int N = 100000;
    for (int i = 0; i < N; ++i) {
        auto h = sample_hash(2, W, rng);
        hit += h(p) == h(q);
    }
    EXPECT_NEAR(hit / double(N), collision_prob(s, W), 0.01);
}

TEST(SensitiveFamilyTest, Values) {
    auto f = make_sensitive_family(1.0, 1.5, 4.0);
    EXPECT_DOUBLE_EQ(f.width, 4.0);
    EXPECT_DOUBLE_EQ(f.p1, collision_prob(1.0, 4.0));
    EXPECT_DOUBLE_EQ(f.p2, collision_prob(1.5, 4.0));
    EXPECT_GT(f.p1, f.p2);
    EXPECT_THROW(make_sensitive_family(1.0, 1.0), std::invalid_argument);
    EXPECT_THROW(make_sensitive_family(0.0, 1.0), std::invalid_argument);
}
