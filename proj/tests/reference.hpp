#pragma once

// Slow, direct re-readings of the definitions, shared by the unit and acceptance tests.

#include <algorithm>
#include <cmath>
#include <optional>
#include <vector>

#include "rangeagg/rangeagg.hpp"

namespace rangeagg::reference {

/// r_L <= (1+lambda)^t < r_H evaluated with std::pow.
inline bool in_bucket(const AggregationTree& T, NodeId v, long long t, double lam, double Delta) {
    if (v == T.root()) return false;
    double sp = T.size(T.parent(v));
    double x = std::pow(1.0 + lam, static_cast<double>(t));
    return std::max(T.size(v) / lam, sp / Delta) <= x && x < sp / lam;
}

/// Merged bucket at t: bottom-up over the nodes, skipping any node with a chosen descendant.
inline std::vector<NodeId> merged(const AggregationTree& T, long long t, double lam, double Delta, long long Gamma) {
    const double D = Delta * std::pow(1.0 + lam, static_cast<double>(Gamma));
    std::vector<char> has_chosen_below(T.num_nodes(), 0);
    std::vector<NodeId> chosen;
    for (NodeId v = 0; v < T.num_nodes(); ++v) {
        if (has_chosen_below[v]) continue;
        if (!(T.size(v) <= lam * std::pow(1.0 + lam, static_cast<double>(t)))) continue;
        bool member = false;
        for (long long u = t; u <= t + Gamma && !member; ++u) member = in_bucket(T, v, u, lam, D);
        if (!member) continue;
        chosen.push_back(v);
        for (NodeId u = T.parent(v); u != kNoNode; u = T.parent(u)) has_chosen_below[u] = 1;
    }
    return chosen;
}

/// [lo, hi] window of t outside of which every bucket and merged bucket is empty.
inline std::pair<long long, long long> t_window(const AggregationTree& T, double lam, double Delta, long long Gamma) {
    double smin = 1e300, smax = 0.0;
    for (NodeId v = 0; v < T.num_nodes(); ++v)
        if (T.size(v) > 0.0) {
            smin = std::min(smin, T.size(v));
            smax = std::max(smax, T.size(v));
        }
    if (smax == 0.0) return {0, -1};
    const double D = Delta * std::pow(1.0 + lam, static_cast<double>(Gamma));
    const double l1 = std::log1p(lam);
    return {static_cast<long long>(std::floor(std::log(smin / D) / l1)) - Gamma - 3,
            static_cast<long long>(std::ceil(std::log(smax / lam) / l1)) + 3};
}

/// Existence of P' with P∩B ⊆ P' ⊆ P∩B(1+gamma), p ∈ P' and (1-eps)|p'-q| <= |p-q| on P',
/// by enumerating every admissible P'. A NULL answer is valid iff P∩B is empty.
inline bool exists_aifp(std::optional<PointId> p, std::span<const double> q, const Ball& B, const PointSet& P,
                        double eps, double gamma) {
    std::vector<PointId> core, fuzzy;
    for (std::size_t i = 0; i < P.size(); ++i) {
        if (oracle_in_ball(P[i], B.center, B.radius))
            core.push_back(static_cast<PointId>(i));
        else if (oracle_in_ball(P[i], B.center, (1.0 + gamma) * B.radius))
            fuzzy.push_back(static_cast<PointId>(i));
    }
    if (!p) return core.empty();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << fuzzy.size()); ++mask) {
        std::vector<PointId> sub = core;
        for (std::size_t j = 0; j < fuzzy.size(); ++j)
            if (mask >> j & 1) sub.push_back(fuzzy[j]);
        if (std::find(sub.begin(), sub.end(), *p) == sub.end()) continue;
        const double dp = dist(P[*p], q);
        bool ok = true;
        for (PointId x : sub) ok &= (1.0 - eps) * dist(P[x], q) <= dp + kRelTol * std::max(1.0, dp);
        if (ok) return true;
    }
    return false;
}

/// Existence of P' with P∩B ⊆ P' ⊆ P∩B(1+gamma) of which the ball is a (1+eps)-approximate MEB.
inline bool exists_ameb(const std::optional<Ball>& ans, const Ball& B, const PointSet& P, double eps, double gamma,
                        double tol = 1e-6) {
    std::vector<PointId> core, fuzzy;
    for (std::size_t i = 0; i < P.size(); ++i) {
        if (oracle_in_ball(P[i], B.center, B.radius))
            core.push_back(static_cast<PointId>(i));
        else if (oracle_in_ball(P[i], B.center, (1.0 + gamma) * B.radius))
            fuzzy.push_back(static_cast<PointId>(i));
    }
    if (!ans) return core.empty();
    for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << fuzzy.size()); ++mask) {
        std::vector<PointId> sub = core;
        for (std::size_t j = 0; j < fuzzy.size(); ++j)
            if (mask >> j & 1) sub.push_back(fuzzy[j]);
        std::sort(sub.begin(), sub.end());
        bool encloses = true;
        for (PointId x : sub) encloses &= oracle_in_ball(P[x], ans->center, ans->radius);
        if (!encloses) continue;
        double rad = sub.empty() ? 0.0 : ref_meb(P, sub, tol).radius;
        if (ans->radius <= (1.0 + eps) * rad * (1.0 + tol) + (sub.empty() ? tol : 0.0)) return true;
    }
    return false;
}

}  // namespace rangeagg::reference
