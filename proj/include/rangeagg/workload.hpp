#pragma once

#include <chrono>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "rangeagg/ameb_engine.hpp"
#include "rangeagg/io.hpp"
#include "rangeagg/oracle.hpp"

namespace rangeagg {

struct WorkloadSpec {
    QueryKind kind = QueryKind::aifp;
    std::size_t count = 100;
    std::uint64_t seed = 1;
    double r_min = 0.1, r_max = 0.9;
    double far_fraction = 0.2;  // aifp: share of query points pushed away from the data
    double far_scale = 3.0;
    double aligned_fraction = 0.25;
    double lambda = 0.0;  // alignment grid; 0 leaves every radius as drawn
    double xi = 0.5;      // bd
};

/// Balls centred on data points with uniform radii; aifp query points are data points,
/// some displaced by N(0, far_scale^2) noise.
inline std::vector<QueryRecord> make_workload(const PointSet& P, const WorkloadSpec& s) {
    if (P.empty()) throw std::invalid_argument("workload over an empty dataset");
    if (!(s.r_min > 0.0 && s.r_max >= s.r_min)) throw std::invalid_argument("need 0 < r_min <= r_max");
    RngStream rng(s.seed, 0x3017);
    std::vector<QueryRecord> out;
    out.reserve(s.count);
    auto point = [&](std::uint64_t i) {
        auto p = P[i];
        return std::vector<double>(p.begin(), p.end());
    };
    for (std::size_t k = 0; k < s.count; ++k) {
        QueryRecord r;
        r.kind = s.kind;
        r.ball.center = point(rng.below(P.size()));
        r.ball.radius = s.r_min + (s.r_max - s.r_min) * rng.uniform();
        if (s.lambda > 0.0 && rng.uniform() < s.aligned_fraction) r.ball.radius = align_up(r.ball.radius, s.lambda);
        if (s.kind == QueryKind::aifp) {
            r.q = point(rng.below(P.size()));
            if (rng.uniform() < s.far_fraction)
                for (auto& x : r.q) x += s.far_scale * rng.normal();
        } else if (s.kind == QueryKind::bd) {
            r.out_ball.center = point(rng.below(P.size()));
            r.out_ball.radius = s.r_min + (s.r_max - s.r_min) * rng.uniform();
            r.xi = s.xi;
        }
        r.seed = rng();
        out.push_back(std::move(r));
    }
    return out;
}

struct RecordResult {
    QueryKind kind = QueryKind::aifp;
    std::optional<PointId> point;  // aifp, bd
    std::optional<Ball> ball;      // ameb
    std::uint64_t probes = 0;
    double seconds = 0.0;
    std::string detail;  // ameb exit, or "far" for the aifp shortcut
};

inline const char* to_string(AmebExit e) {
    switch (e) {
        case AmebExit::none: return "none";
        case AmebExit::nn_outside: return "nn_outside";
        case AmebExit::aifp_null: return "aifp_null";
        case AmebExit::no_progress: return "no_progress";
        case AmebExit::converged: return "converged";
        case AmebExit::exhausted: return "exhausted";
    }
    return "?";
}

/// Query dispatch over one AIFP index; the AMEB engine and BD packing are built on first use.
/// Record k draws from RngStream(hash(seed, k), record seed), so results do not depend on
/// evaluation order or thread count.
class Session {
 public:
    explicit Session(std::shared_ptr<const AifpIndex> index) : index_(std::move(index)) {
        if (!index_) throw std::invalid_argument("null index");
    }

    const AifpIndex& index() const { return *index_; }

    const AmebEngine& ameb() const {
        std::call_once(ameb_once_, [&] {
            ameb_ = std::make_unique<AmebEngine>(index_->points_ptr(), index_->config(), index_->tree_ptr());
        });
        return *ameb_;
    }

    RngStream record_rng(std::size_t k, const QueryRecord& r) const {
        return RngStream(hash_combine(index_->config().seed, k), r.seed);
    }

    RecordResult run(const QueryRecord& r, std::size_t k) const {
        const auto& P = index_->points();
        if (r.ball.center.size() != P.dim()) throw data_error("record dimension mismatch");
        RngStream rng = record_rng(k, r);
        RecordResult res;
        res.kind = r.kind;
        auto t0 = std::chrono::steady_clock::now();
        switch (r.kind) {
            case QueryKind::aifp: {
                auto a = index_->query(r.ball, r.q, rng);
                res.point = a.point;
                res.probes = a.probes;
                if (a.far) res.detail = "far";
                break;
            }
            case QueryKind::ameb: {
                auto a = ameb().query(r.ball, rng);
                res.ball = a.ball;
                res.probes = a.probes;
                res.detail = to_string(a.exit);
                break;
            }
            case QueryKind::bd: {
                const auto& cfg = index_->config();
                BdConfig bc = bd_config_from(cfg);
                auto prm = bd_params_for(r.xi, P.size(), bc.profile, bc.overrides, bc.width_multiplier);
                if (prm.c == 0) throw capacity_error("BD group count exceeds the limit");
                std::call_once(pack_once_, [&] {
                    std::vector<PointId> all(P.size());
                    for (std::size_t i = 0; i < all.size(); ++i) all[i] = static_cast<PointId>(i);
                    members_ = std::make_shared<const std::vector<PointId>>(std::move(all));
                    packed_ = BdIndex::pack_members(P, *members_);
                });
                BoostedBd bd(index_->points_ptr(), members_, r.ball.radius, r.out_ball.radius, prm,
                             boost_repetitions(cfg.delta), hash_combine(cfg.seed, r.seed), bc.width_multiplier,
                             bc.options, packed_);
                auto a = bd.query(r.ball, r.out_ball, rng);
                res.point = a.point;
                res.probes = a.probes;
                break;
            }
        }
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return res;
    }

    /// Oracle verdict for a result at the index's (eps, gamma); bd uses the xi-error region.
    bool validate(const QueryRecord& r, const RecordResult& res) const {
        const auto& P = index_->points();
        const auto& cfg = index_->config();
        switch (r.kind) {
            case QueryKind::aifp: return valid_aifp(res.point, r.q, r.ball, P, cfg.eps, cfg.gamma).valid;
            case QueryKind::ameb: return valid_ameb(res.ball, r.ball, P, cfg.eps, cfg.gamma).valid;
            case QueryKind::bd: {
                if (!res.point) return !brute_bd(P, r.ball, r.out_ball);
                auto p = P[*res.point];
                return oracle_in_ball(p, r.ball.center, (1.0 + r.xi) * r.ball.radius) &&
                       dist(p, r.out_ball.center) >= r.out_ball.radius / (1.0 + r.xi) * (1.0 - kRelTol);
            }
        }
        return false;
    }

 private:
    std::shared_ptr<const AifpIndex> index_;
    mutable std::once_flag ameb_once_, pack_once_;
    mutable std::unique_ptr<AmebEngine> ameb_;
    mutable std::shared_ptr<const std::vector<PointId>> members_;
    mutable std::shared_ptr<const PackedMembers> packed_;
};

inline nlohmann::json result_json(const RecordResult& r, std::size_t k) {
    nlohmann::json j;
    j["index"] = k;
    j["kind"] = to_string(r.kind);
    if (r.kind == QueryKind::ameb) {
        if (r.ball) {
            j["center"] = r.ball->center;
            j["radius"] = r.ball->radius;
        } else {
            j["answer"] = nullptr;
        }
    } else if (r.point) {
        j["answer"] = *r.point;
    } else {
        j["answer"] = nullptr;
    }
    j["probes"] = r.probes;
    j["seconds"] = r.seconds;
    if (!r.detail.empty()) j["detail"] = r.detail;
    return j;
}

struct Interval {
    double lo = 0.0, hi = 0.0;
};

/// Wilson score interval for k successes in n trials.
inline Interval wilson_interval(std::size_t k, std::size_t n, double z = 1.959963984540054) {
    if (n == 0) return {0.0, 1.0};
    const double nn = static_cast<double>(n), p = static_cast<double>(k) / nn;
    const double den = 1.0 + z * z / nn;
    const double mid = (p + z * z / (2.0 * nn)) / den;
    const double half = z * std::sqrt(p * (1.0 - p) / nn + z * z / (4.0 * nn * nn)) / den;
    return {k == 0 ? 0.0 : std::max(0.0, mid - half), k == n ? 1.0 : std::min(1.0, mid + half)};
}

}  // namespace rangeagg
