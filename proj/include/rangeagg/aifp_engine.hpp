#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rangeagg/aggregation_tree.hpp"
#include "rangeagg/constrained_aifp.hpp"
#include "rangeagg/core.hpp"
#include "rangeagg/range_cover.hpp"

namespace rangeagg {

struct AifpParams {
    double eps = 0.0, gamma = 0.0, delta = 0.0;
    Profile profile = Profile::practical;
    std::size_t n = 0, d = 0;
    double lambda = 0.0;
    double Delta = 0.0;
    double gap = 0.0;
    long long gamma_prime = 0;
    long long gamma_l = 0, gamma_r = 0;
    long long big_gamma = 0;
    double sub_eps = 0.0, sub_gamma = 0.0, sub_delta = 0.0;

    double r_mid(long long t) const { return scale_power(lambda, t + gamma_l); }
    double scale(long long t) const { return scale_power(lambda, t); }
};

/// Parameter cascade. The theory profile uses lambda = min(eps,gamma)/512, the full gap
/// polynomial and (lambda/6, lambda/6) sub-structures. The practical profile uses
/// lambda = min(eps,gamma)/16, gap ((4+2gamma)/eps + 2 + 2/lambda)/8 and (eps/2, gamma/4) sub-structures.
/// That gap is the smallest with (1+lambda)^Gamma_R >= d_max/r_B + 2 + 2/lambda for every non-far query,
/// whose farthest distance stays below ((3+gamma)/eps + 1 + gamma) r_B.
inline AifpParams derive_aifp_params(double eps, double gamma, double delta, std::size_t n, std::size_t d,
                                     Profile profile = Profile::theory, const Overrides& ov = {}) {
    if (!(eps > 0.0 && eps < 1.0 && gamma > 0.0 && delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("invalid (eps, gamma, delta)");
    if (n == 0 || d == 0) throw std::invalid_argument("n and d must be >= 1");
    AifpParams p;
    p.eps = eps;
    p.gamma = gamma;
    p.delta = delta;
    p.profile = profile;
    p.n = n;
    p.d = d;
    const double mn = std::min(eps, gamma);
    p.lambda = ov.lambda.value_or(profile == Profile::theory ? mn / 512.0 : mn / 16.0);
    const double nd = static_cast<double>(n) * static_cast<double>(d);
    p.Delta = 4.0 * nd;
    if (ov.gap)
        p.gap = *ov.gap;
    else if (profile == Profile::theory)
        p.gap = 2048.0 * (4.0 + 2.0 * gamma) * nd * nd * nd / eps;
    else
        p.gap = ((4.0 + 2.0 * gamma) / eps + 2.0 + 2.0 / p.lambda) / 8.0;
    const double l1 = std::log1p(p.lambda);
    p.gamma_prime = static_cast<long long>(ceil_tol(std::log(p.gap) / l1));
    p.gamma_l = p.gamma_prime + static_cast<long long>(ceil_tol(std::log(8.0) / l1));
    p.gamma_r = p.gamma_l;
    p.big_gamma = p.gamma_l + p.gamma_r;
    if (profile == Profile::theory) {
        p.sub_eps = ov.sub_eps.value_or(p.lambda / 6.0);
        p.sub_gamma = ov.sub_gamma.value_or(p.lambda / 6.0);
    } else {
        // largest precision whose answers from B(1+lambda) still land in the acceptance ball B(1+gamma/2)
        p.sub_eps = ov.sub_eps.value_or(eps / 2.0);
        p.sub_gamma = ov.sub_gamma.value_or(std::min(gamma / 4.0, (1.0 + gamma / 2.0) / (1.0 + p.lambda) - 1.0));
    }
    if (!(p.sub_eps > 0.0 && p.sub_eps < 1.0 && p.sub_gamma > 0.0))
        throw std::invalid_argument("invalid sub-structure precision");
    p.sub_delta = delta / 4.0;
    return p;
}

struct AifpAnswer {
    std::optional<PointId> point;
    std::uint64_t probes = 0;
    std::uint32_t sub_queries = 0;  // constrained queries issued
    std::uint32_t candidates = 0;   // distinct candidates gathered
    bool far = false;               // answered by the far-query shortcut
    double probe_bound = 0.0;       // sum over sub-queries of (m+1) * 3c * R
};

class AifpIndex {
 public:
    AifpIndex(std::shared_ptr<const PointSet> points, const GlobalConfig& cfg)
        : AifpIndex(points, cfg, points ? std::make_shared<const AggregationTree>(build_tree(*points)) : nullptr) {}

    AifpIndex(std::shared_ptr<const PointSet> points, const GlobalConfig& cfg,
              std::shared_ptr<const AggregationTree> tree)
        : points_(std::move(points)), cfg_(cfg), tree_(std::move(tree)) {
        if (!points_ || points_->empty()) throw std::invalid_argument("AIFP index needs a non-empty point set");
        cfg_.validate();
        if (!tree_ || tree_->num_points() != points_->size()) throw std::invalid_argument("tree does not match points");
        params_ = derive_aifp_params(cfg_.eps, cfg_.gamma, cfg_.delta, points_->size(), points_->dim(), cfg_.profile,
                                     cfg_.overrides);
        bd_cfg_ = bd_config_from(cfg_);
        // refuse up front if the largest possible sub-structure would exceed the group limit
        auto probe =
            bd_params_for(caifp_xi(params_.sub_eps, params_.sub_gamma), points_->size(), bd_cfg_.profile,
                          bd_cfg_.overrides, bd_cfg_.width_multiplier);
        if (probe.c == 0)
            throw capacity_error("BD group count c = " + std::to_string(probe.c_real) + " exceeds the limit " +
                                 std::to_string(probe.theory_c_limit));
        ms_ = std::make_unique<MultiScale>(tree_, points_->dim(), params_.lambda, params_.Delta, params_.big_gamma);
    }

    const AifpParams& params() const { return params_; }
    const GlobalConfig& config() const { return cfg_; }
    const PointSet& points() const { return *points_; }
    std::shared_ptr<const PointSet> points_ptr() const { return points_; }
    const AggregationTree& tree() const { return *tree_; }
    std::shared_ptr<const AggregationTree> tree_ptr() const { return tree_; }
    const MultiScale& multiscale() const { return *ms_; }

    Constraint constraint_for(long long t) const {
        return Constraint{(1.0 + params_.lambda) * params_.r_mid(t), params_.scale(t),
                          params_.scale(t + params_.big_gamma + 1)};
    }

    /// Constrained structure over re(B+_t); null when the bucket is empty.
    std::shared_ptr<const CaifpIndex> structure(long long t) const {
        {
            std::lock_guard<std::mutex> lk(mu_);
            auto it = cache_.find(t);
            if (it != cache_.end()) return it->second;
        }
        std::shared_ptr<const CaifpIndex> s;
        auto b = ms_->bucket(t);
        if (!b->reps.empty()) {
            auto reps = std::make_shared<const std::vector<PointId>>(b->reps);
            s = std::make_shared<const CaifpIndex>(points_, reps, params_.sub_eps, params_.sub_gamma,
                                                   params_.sub_delta, constraint_for(t),
                                                   hash_combine(cfg_.seed, static_cast<std::uint64_t>(t)), bd_cfg_);
        }
        std::lock_guard<std::mutex> lk(mu_);
        return cache_.emplace(t, std::move(s)).first->second;
    }

    std::size_t structures_built() const {
        std::lock_guard<std::mutex> lk(mu_);
        return cache_.size();
    }

    std::optional<PointId> ann(std::span<const double> q) const { return nearest_point(*points_, q); }

    AifpAnswer query_aligned(const Ball& B, std::span<const double> q, RngStream& rng) const {
        const auto& P = *points_;
        if (B.center.size() != P.dim() || q.size() != P.dim()) throw std::invalid_argument("dimension mismatch");
        if (!(B.radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
        const double lam = params_.lambda;
        const long long tb = align_exponent(B.radius, lam);
        if (!approx_equal(B.radius, scale_power(lam, tb))) throw std::invalid_argument("radius is not lambda-aligned");
        const double rb = B.radius;
        const double eps = cfg_.eps, gam = cfg_.gamma;
        std::span<const double> ob(B.center);
        const double accept = (1.0 + gam / 2.0) * rb;

        AifpAnswer ans;
        if (dist(q, ob) >= (3.0 + gam) / eps * rb) {
            ans.far = true;
            auto pa = ann(ob);
            if (pa && dist(P[*pa], ob) <= accept) {
                ans.point = pa;
                ans.candidates = 1;
            }
            return ans;
        }

        std::vector<PointId> cands;
        auto sub = [&](long long t_mid, const Ball& ball) {
            auto s = structure(t_mid - params_.gamma_l);
            if (!s) return;
            auto a = s->query(expand_ball(ball, 1.0 + lam), q, rng);
            ++ans.sub_queries;
            ans.probes += a.probes;
            ans.probe_bound += static_cast<double>(s->num_rungs()) * static_cast<double>(s->bd_params().probe_cap()) *
                               static_cast<double>(s->repetitions());
            if (a.point) cands.push_back(*a.point);
        };

        sub(tb, B);
        auto pn = ann(q);
        const double rn = dist(q, P[*pn]);
        cands.push_back(*pn);
        auto v = lowest_admissible_node(*tree_, tree_->leaf(*pn), rn, gam * rb / 64.0);
        if (v) {
            const double r2 = align_up((1.0 + gam / 16.0) * rb, lam);
            sub(align_exponent(r2, lam), Ball{B.center, r2});
            const double r3_raw = rn + tree_->size(*v);
            if (r3_raw > 0.0) {
                const double r3 = align_up(r3_raw, lam);
                sub(align_exponent(r3, lam), Ball{std::vector<double>(q.begin(), q.end()), r3});
            }
        }
        std::sort(cands.begin(), cands.end());
        cands.erase(std::unique(cands.begin(), cands.end()), cands.end());
        ans.candidates = static_cast<std::uint32_t>(cands.size());
        std::vector<PointId> inside;
        for (PointId c : cands)
            if (dist(P[c], ob) <= accept) inside.push_back(c);
        ans.point = farthest_of(P, inside, q);
        return ans;
    }

    AifpAnswer query(const Ball& B, std::span<const double> q, RngStream& rng) const {
        if (!(B.radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
        return query_aligned(Ball{B.center, align_up(B.radius, params_.lambda)}, q, rng);
    }

 private:
    std::shared_ptr<const PointSet> points_;
    GlobalConfig cfg_;
    std::shared_ptr<const AggregationTree> tree_;
    AifpParams params_;
    BdConfig bd_cfg_;
    std::unique_ptr<MultiScale> ms_;
    mutable std::mutex mu_;
    mutable std::map<long long, std::shared_ptr<const CaifpIndex>> cache_;
};

}  // namespace rangeagg
