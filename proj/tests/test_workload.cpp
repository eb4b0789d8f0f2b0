#include <gtest/gtest.h>

#include "test_util.hpp"

using namespace rangeagg;
using namespace rangeagg::testing;

TEST(Workload, Deterministic) {
    auto P = uniform_points(50, 3, 1);
    WorkloadSpec s{QueryKind::aifp, 30, 5};
    s.lambda = 0.01875;
    auto a = make_workload(P, s), b = make_workload(P, s);
    ASSERT_EQ(a.size(), 30u);
    int aligned = 0;
    for (std::size_t k = 0; k < a.size(); ++k) {
        EXPECT_EQ(format_record(a[k]), format_record(b[k]));
        EXPECT_GE(a[k].ball.radius, 0.1);
        EXPECT_EQ(a[k].q.size(), 3u);
        aligned += is_aligned(a[k].ball.radius, s.lambda);
    }
    EXPECT_GT(aligned, 0);
    EXPECT_THROW(make_workload(P, {QueryKind::aifp, 1, 1, 0.0}), std::invalid_argument);
}

TEST(Workload, SessionIsOrderIndependent) {
    auto P = shared(generate_dataset({120, 3, Distribution::gaussian_clusters, 2, 0.1, 3}));
    GlobalConfig cfg;
    cfg.overrides.width_multiplier = 1.0;
    cfg.overrides.c_multiplier = 1.0;
    auto idx = std::make_shared<const AifpIndex>(P, cfg);
    Session s(idx);
    auto recs = make_workload(*P, {QueryKind::bd, 12, 8});
    std::vector<RecordResult> fwd;
    for (std::size_t k = 0; k < recs.size(); ++k) fwd.push_back(s.run(recs[k], k));
    for (std::size_t k = recs.size(); k-- > 0;) {
        auto r = s.run(recs[k], k);
        EXPECT_EQ(r.point, fwd[k].point);
        EXPECT_EQ(r.probes, fwd[k].probes);
        EXPECT_TRUE(s.validate(recs[k], r));
    }
}

TEST(Workload, AmebEmptyRangeIsNull) {
    auto P = shared(points(2, {0, 0, 1, 0}));
    GlobalConfig cfg;
    auto idx = std::make_shared<const AifpIndex>(P, cfg);
    Session s(idx);
    QueryRecord r;
    r.kind = QueryKind::ameb;
    r.ball = {{50, 50}, 1.0};
    auto res = s.run(r, 0);
    EXPECT_FALSE(res.ball);
    EXPECT_EQ(res.detail, "nn_outside");
    EXPECT_TRUE(s.validate(r, res));
}

TEST(Wilson, Endpoints) {
    auto a = wilson_interval(100, 100);
    EXPECT_EQ(a.hi, 1.0);
    EXPECT_NEAR(a.lo, 0.963, 1e-3);
    auto b = wilson_interval(0, 10);
    EXPECT_EQ(b.lo, 0.0);
    auto c = wilson_interval(0, 0);
    EXPECT_EQ(c.lo, 0.0);
    EXPECT_EQ(c.hi, 1.0);
}
