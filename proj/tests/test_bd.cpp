#include <gtest/gtest.h>

#include <set>

#include "test_util.hpp"

using namespace rangeagg;
using namespace rangeagg::testing;

TEST(BdParamsTest, TheoryExample) {
    auto p = derive_bd_params(0.5, 1000, 0.9, 0.6, Profile::theory);
    EXPECT_EQ(p.a, 835);
    EXPECT_NEAR(p.t1, 751.5, 1e-9);
    EXPECT_NEAR(p.t2, 125.25, 1e-9);
    EXPECT_NEAR(p.eta, 0.05, 1e-15);
    EXPECT_EQ(p.c, 0u);  // 2^(2a)-sized, refused
    EXPECT_TRUE(std::isinf(p.c_real));
}

TEST(BdParamsTest, PracticalExample) {
    BdOverrides ov;
    auto p = derive_bd_params(0.5, 1000, 0.9, 0.6, Profile::practical, ov);
    EXPECT_EQ(p.a, 1);
    EXPECT_NEAR(p.p1pp(), 1.0 / 9.0, 1e-15);
    EXPECT_NEAR(p.p2pp(), 1.0 / 12.0, 1e-15);
    EXPECT_NEAR(p.rho, std::log(9.0) / std::log(12.0), 1e-15);
    EXPECT_NEAR(p.rho, 0.8842, 1e-4);
    EXPECT_NEAR(p.t1, 0.9, 1e-12);
    EXPECT_NEAR(p.t2, 0.15, 1e-12);
    EXPECT_EQ(p.need_in(), 1);
    EXPECT_EQ(p.need_out(), 1);
    EXPECT_EQ(p.b, static_cast<int>(std::ceil(std::log(1000.0) / std::log(12.0))));
    EXPECT_EQ(p.c, static_cast<std::uint64_t>(std::ceil(4.0 * std::pow(1000.0, p.rho) * 9.0)));
    EXPECT_EQ(p.probe_cap(), 3 * p.c);
}

TEST(BdParamsTest, CapAndLimits) {
    BdOverrides ov;
    ov.c_cap = 50;
    EXPECT_EQ(derive_bd_params(0.5, 100000, 0.9, 0.6, Profile::practical, ov).c, 50u);
    EXPECT_THROW(derive_bd_params(0.5, 10, 0.6, 0.9, Profile::practical), std::invalid_argument);
    EXPECT_THROW(derive_bd_params(0.5, 0, 0.9, 0.6, Profile::practical), std::invalid_argument);
    EXPECT_THROW(derive_bd_params(0.5, 10, 0.9, 0.899999999999, Profile::theory), capacity_error);
}

TEST(BdParamsTest, Repetitions) {
    EXPECT_EQ(boost_repetitions(0.1), 9);
    EXPECT_EQ(boost_repetitions(0.75), 1);
    EXPECT_EQ(boost_repetitions(0.2), 6);
    EXPECT_THROW(boost_repetitions(0.0), std::invalid_argument);
}

namespace {

std::shared_ptr<const PointSet> cloud(std::size_t n, std::size_t d, std::uint64_t seed) {
    return shared(generate_dataset({n, d, Distribution::gaussian_clusters, 3, 0.3, seed}));
}

}  // namespace

TEST(BdIndexTest, PlantedRecall) {
    auto P = shared(points(2, {0.9, 0.0, 5.0, 0.0}));
    auto prm = bd_params_for(0.5, P->size(), Profile::practical, {});
    Ball in{{0, 0}, 1.0}, out{{5, 0}, 2.0};
    int hits = 0;
    const int trials = 400;
    for (int t = 0; t < trials; ++t) {
        BoostedBd bd(P, nullptr, 1.0, 2.0, prm, boost_repetitions(0.1), 1000 + t);
        RngStream rng(t, 3);
        auto a = bd.query(in, out, rng);
        if (a.point) {
            EXPECT_EQ(*a.point, 0u);
            ++hits;
        }
    }
    EXPECT_GE(hits, 0.9 * trials);
}

TEST(BdIndexTest, SoundAndCapped) {
    auto P = cloud(300, 6, 21);
    auto prm = bd_params_for(0.5, P->size(), Profile::practical, {});
    RngStream pick(1, 1);
    for (int t = 0; t < 60; ++t) {
        Ball in{vec((*P)[pick.below(P->size())]), 0.2 + pick.uniform()};
        Ball out{vec((*P)[pick.below(P->size())]), 0.2 + pick.uniform()};
        BdIndex bd(P, nullptr, in.radius, out.radius, prm, 77 + t);
        RngStream rng(t, 0);
        auto a = bd.query(in, out, rng);
        EXPECT_LE(a.probes, prm.probe_cap());
        if (a.point) {
            auto p = (*P)[*a.point];
            EXPECT_TRUE(leq_tol(dist(p, in.center), 1.5 * in.radius));
            EXPECT_GE(dist(p, out.center), out.radius / 1.5 * (1 - 1e-9));
        }
    }
}

TEST(BdIndexTest, ImplicitMatchesMaterialized) {
    auto P = cloud(200, 5, 3);
    BdOverrides ov;
    ov.c_cap = 300;
    auto prm = bd_params_for(0.5, P->size(), Profile::practical, ov);
    BdOptions mat{BdStorage::materialized, LabelSampling::skip};
    RngStream pick(4, 4);
    for (int t = 0; t < 20; ++t) {
        Ball in{vec((*P)[pick.below(P->size())]), 0.3 + pick.uniform()};
        Ball out{vec((*P)[pick.below(P->size())]), 0.3 + pick.uniform()};
        BdIndex imp(P, nullptr, in.radius, out.radius, prm, 9 + t);
        BdIndex mt(P, nullptr, in.radius, out.radius, prm, 9 + t, 4.0, mat);
        for (std::uint64_t k : {0ull, 7ull, 123ull}) EXPECT_EQ(imp.group(k), mt.group(k));
        RngStream r1(t, 1), r2(t, 1);
        auto a = imp.query(in, out, r1), b = mt.query(in, out, r2);
        EXPECT_EQ(a.point, b.point);
        EXPECT_EQ(a.probes, b.probes);
        EXPECT_EQ(a.groups, b.groups);
    }
}

TEST(BdIndexTest, ScanMatchesLabels) {
    auto P = cloud(517, 7, 8);  // not a multiple of the lane or chunk width
    auto prm = bd_params_for(0.5, P->size(), Profile::practical, {});
    BdIndex bd(P, nullptr, 0.4, 0.9, prm, 5);
    for (std::uint64_t k = 0; k < 30; ++k) {
        auto g = bd.group_hashes(k);
        auto m = bd.group(k);
        std::size_t total = 0;
        for (const auto& [label, ids] : m) {
            EXPECT_EQ(bd.bucket(k, label), ids);
            for (PointId id : ids) EXPECT_EQ(bd.point_label(g, (*P)[id]), label);
            total += ids.size();
        }
        EXPECT_EQ(total, P->size());  // the buckets partition the members
    }
}

TEST(BdIndexTest, SkipMatchesPerGroupStatistically) {
    // the same query answered under both samplings: hit rates and group counts agree
    auto P = cloud(150, 4, 10);
    BdOverrides ov;
    auto prm = bd_params_for(0.5, P->size(), Profile::practical, ov);
    Ball in{vec((*P)[0]), 0.5}, out{vec((*P)[1]), 0.4};
    BdOptions per{BdStorage::implicit, LabelSampling::per_group};
    const int trials = 300;
    double hit_s = 0, hit_p = 0, groups_s = 0, groups_p = 0;
    for (int t = 0; t < trials; ++t) {
        BdIndex s(P, nullptr, in.radius, out.radius, prm, 300 + t);
        BdIndex p(P, nullptr, in.radius, out.radius, prm, 300 + t, 4.0, per);
        RngStream r1(t, 11), r2(t, 12);
        auto a = s.query(in, out, r1), b = p.query(in, out, r2);
        hit_s += a.point.has_value();
        hit_p += b.point.has_value();
        groups_s += a.groups;
        groups_p += b.groups;
    }
    EXPECT_NEAR(hit_s / trials, hit_p / trials, 0.1);
    EXPECT_NEAR(groups_s / groups_p, 1.0, 0.15);
}

TEST(BdIndexTest, Degenerate) {
    auto one = shared(points(3, {1, 2, 3}));
    auto prm = bd_params_for(0.5, 1, Profile::practical, {});
    BoostedBd bd(one, nullptr, 1.0, 1.0, prm, 9, 1);
    RngStream rng(1, 1);
    EXPECT_FALSE(bd.query({{1, 2, 3}, 1.0}, {{1, 2, 3}, 1.0}, rng).point);
    auto a = bd.query({{1, 2, 3}, 1.0}, {{5, 2, 3}, 1.0}, rng);
    ASSERT_TRUE(a.point);
    EXPECT_EQ(*a.point, 0u);

    auto dup = shared(points(2, {0, 0, 0, 0, 0, 0}));
    auto p3 = bd_params_for(0.5, 3, Profile::practical, {});
    BdIndex b3(dup, nullptr, 1.0, 1.0, p3, 2);
    EXPECT_EQ(b3.group(0).size(), 1u);  // coincident points share every bucket
    EXPECT_THROW(b3.query({{0, 0}, 2.0}, {{0, 0}, 1.0}, rng), std::invalid_argument);
}
