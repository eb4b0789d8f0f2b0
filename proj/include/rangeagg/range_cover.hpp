#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <vector>

#include "rangeagg/aggregation_tree.hpp"
#include "rangeagg/core.hpp"

namespace rangeagg {

/// Scale buckets B_t. Each non-root node occupies a contiguous range of t, so the table
/// stores one interval per node rather than the buckets themselves.
struct BucketTable {
    double lambda = 0.0;
    double delta = 0.0;
    std::vector<long long> lo, hi;  // lo > hi means the node is in no bucket

    bool contains(NodeId v, long long t) const { return lo[v] <= t && t <= hi[v]; }
    bool empty_node(NodeId v) const { return lo[v] > hi[v]; }

    std::vector<NodeId> bucket(long long t) const {
        std::vector<NodeId> out;
        for (NodeId v = 0; v < lo.size(); ++v)
            if (contains(v, t)) out.push_back(v);
        return out;
    }

    /// [min t, max t] over all non-empty buckets.
    std::optional<std::pair<long long, long long>> t_range() const {
        std::optional<std::pair<long long, long long>> r;
        for (std::size_t v = 0; v < lo.size(); ++v) {
            if (lo[v] > hi[v]) continue;
            if (!r) r.emplace(lo[v], hi[v]);
            r->first = std::min(r->first, lo[v]);
            r->second = std::max(r->second, hi[v]);
        }
        return r;
    }

    std::uint64_t total_memberships() const {
        std::uint64_t s = 0;
        for (std::size_t v = 0; v < lo.size(); ++v)
            if (lo[v] <= hi[v]) s += static_cast<std::uint64_t>(hi[v] - lo[v] + 1);
        return s;
    }
};

/// v goes into B_t for every t with max(s(v)/lambda, s(v_p)/Delta) <= (1+lambda)^t < s(v_p)/lambda.
inline BucketTable range_cover(const AggregationTree& T, std::size_t dim, double lambda, double Delta) {
    if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("lambda must lie in (0,1)");
    double dn = static_cast<double>(dim) * static_cast<double>(T.num_points());
    if (!(Delta >= 4.0 * dn * (1.0 - kRelTol))) throw std::invalid_argument("Delta must be at least 4dn");
    BucketTable bt;
    bt.lambda = lambda;
    bt.delta = Delta;
    bt.lo.assign(T.num_nodes(), 1);
    bt.hi.assign(T.num_nodes(), 0);
    for (NodeId v = 0; v + 1 < T.num_nodes(); ++v) {
        double sp = T.size(T.parent(v));
        double r_high = sp / lambda;
        double r_low = std::max(T.size(v) / lambda, sp / Delta);
        if (!(r_high > 0.0) || !(r_low > 0.0)) continue;
        bt.lo[v] = align_exponent(r_low, lambda);
        bt.hi[v] = align_exponent(r_high, lambda) - 1;
    }
    return bt;
}

struct MergedBucket {
    long long t = 0;
    std::vector<NodeId> nodes;
    std::vector<PointId> reps;  // re(B+_t), ascending
};

/// Merged buckets B+_t over range_cover(T, lambda, Delta (1+lambda)^Gamma).
/// B+_t is computed on first use and cached.
class MultiScale {
 public:
    MultiScale(std::shared_ptr<const AggregationTree> tree, std::size_t dim, double lambda, double Delta,
               long long Gamma)
        : tree_(std::move(tree)), dim_(dim), lambda_(lambda), delta_(Delta), gamma_(Gamma) {
        if (!tree_) throw std::invalid_argument("null tree");
        if (Gamma < 1) throw std::invalid_argument("Gamma must be >= 1");
        cover_ = range_cover(*tree_, dim, lambda, Delta * scale_power(lambda, Gamma));
        auto r = cover_.t_range();
        if (r) range_ = std::make_pair(r->first - Gamma, r->second);
    }

    const AggregationTree& tree() const { return *tree_; }
    const BucketTable& cover() const { return cover_; }
    double lambda() const { return lambda_; }
    double delta() const { return delta_; }
    long long gamma() const { return gamma_; }
    std::size_t dim() const { return dim_; }

    /// Range of t outside of which B+_t is certainly empty.
    std::optional<std::pair<long long, long long>> t_range() const { return range_; }

    std::shared_ptr<const MergedBucket> bucket(long long t) const {
        {
            std::lock_guard<std::mutex> lk(mu_);
            auto it = cache_.find(t);
            if (it != cache_.end()) return it->second;
        }
        auto b = std::make_shared<const MergedBucket>(compute(t));
        std::lock_guard<std::mutex> lk(mu_);
        return cache_.emplace(t, std::move(b)).first->second;
    }

    MergedBucket compute(long long t) const {
        MergedBucket mb;
        mb.t = t;
        if (!range_ || t < range_->first || t > range_->second) return mb;
        const auto& T = *tree_;
        const double limit = lambda_ * scale_power(lambda_, t);
        std::vector<char> below(T.num_nodes(), 0);  // node or a descendant is in B+_t
        for (NodeId v = 0; v + 1 < T.num_nodes(); ++v) {
            bool desc = !T.is_leaf(v) && (below[T.node(v).left] || below[T.node(v).right]);
            bool take = !desc && leq_tol(T.size(v), limit) && !cover_.empty_node(v) && cover_.lo[v] <= t + gamma_ &&
                        cover_.hi[v] >= t;
            if (take) mb.nodes.push_back(v);
            below[v] = desc || take;
        }
        mb.reps.reserve(mb.nodes.size());
        for (NodeId v : mb.nodes) mb.reps.push_back(T.rep(v));
        std::sort(mb.reps.begin(), mb.reps.end());
        return mb;
    }

 private:
    std::shared_ptr<const AggregationTree> tree_;
    std::size_t dim_;
    double lambda_, delta_;
    long long gamma_;
    BucketTable cover_;
    std::optional<std::pair<long long, long long>> range_;
    mutable std::mutex mu_;
    mutable std::map<long long, std::shared_ptr<const MergedBucket>> cache_;
};

struct CoverageWitness {
    int which = 0;          // 1: p lies in exactly one member; 2: ancestor witness
    NodeId node = kNoNode;  // the member (case 1) or the ancestor v' (case 2)
    double outside = 0.0;   // case 2: distance from p to P \ P(v')
    double bound = 0.0;     // case 2: (Delta/dn)(1+lambda)^{t+Gamma}
    bool verified = false;
};

inline CoverageWitness coverage_check(const MultiScale& ms, const PointSet& P, long long t, PointId p) {
    const auto& T = ms.tree();
    auto b = ms.bucket(t);
    const auto pos = T.node(T.leaf(p)).begin;
    CoverageWitness w;
    int hits = 0;
    for (NodeId v : b->nodes) {
        if (T.node(v).begin <= pos && pos < T.node(v).end) {
            ++hits;
            w.node = v;
        }
    }
    if (hits == 1) {
        w.which = 1;
        w.verified = true;
        return w;
    }
    w.which = 2;
    const double lam = ms.lambda();
    const double cap = scale_power(lam, t);
    NodeId vp = T.leaf(p);
    for (NodeId u : T.path_to_root(T.leaf(p)))
        if (leq_tol(T.size(u) / lam, cap)) vp = u;
    w.node = vp;
    const double dn = static_cast<double>(ms.dim()) * static_cast<double>(T.num_points());
    w.bound = ms.delta() / dn * scale_power(lam, t + ms.gamma());
    w.outside = std::numeric_limits<double>::infinity();
    const auto& nd = T.node(vp);
    for (std::size_t pos2 = 0; pos2 < T.num_points(); ++pos2) {
        if (nd.begin <= pos2 && pos2 < nd.end) continue;
        w.outside = std::min(w.outside, dist(P[p], P[T.leaf_order()[pos2]]));
    }
    w.verified = hits == 0 && w.outside > w.bound;
    return w;
}

}  // namespace rangeagg
