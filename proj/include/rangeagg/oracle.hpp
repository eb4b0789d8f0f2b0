#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rangeagg/ameb_engine.hpp"
#include "rangeagg/core.hpp"

namespace rangeagg {

/// Closed-ball membership with the oracle's relative boundary tolerance.
inline bool oracle_in_ball(std::span<const double> p, std::span<const double> center, double radius) {
    return leq_tol(dist(p, center), radius);
}

inline std::vector<PointId> points_in_ball(const PointSet& P, const Ball& B) {
    std::vector<PointId> out;
    for (std::size_t i = 0; i < P.size(); ++i)
        if (oracle_in_ball(P[i], B.center, B.radius)) out.push_back(static_cast<PointId>(i));
    return out;
}

/// Exact in-range farthest point; lowest id on ties.
inline std::optional<PointId> brute_ifp(const PointSet& P, const Ball& B, std::span<const double> q) {
    std::optional<PointId> best;
    double bd = -1.0;
    for (std::size_t i = 0; i < P.size(); ++i) {
        if (!oracle_in_ball(P[i], B.center, B.radius)) continue;
        double d = dist(P[i], q);
        if (d > bd) {
            bd = d;
            best = static_cast<PointId>(i);
        }
    }
    return best;
}

/// Lowest-id point of P in B_in \ B_out (closed B_in, points on the B_out boundary count as outside).
inline std::optional<PointId> brute_bd(const PointSet& P, const Ball& b_in, const Ball& b_out) {
    for (std::size_t i = 0; i < P.size(); ++i) {
        if (!oracle_in_ball(P[i], b_in.center, b_in.radius)) continue;
        double d = dist(P[i], b_out.center);
        if (d >= b_out.radius * (1.0 - kRelTol)) return static_cast<PointId>(i);
    }
    return std::nullopt;
}

/// High-precision MEB (away-step Frank-Wolfe), radius within (1+tol) of optimal.
inline Ball ref_meb(const std::vector<std::span<const double>>& pts, double tol = 1e-6) {
    if (pts.empty()) throw std::invalid_argument("MEB of an empty set");
    return detail::meb_dual(pts, tol, true);
}

inline Ball ref_meb(const PointSet& P, const std::vector<PointId>& ids, double tol = 1e-6) {
    std::vector<std::span<const double>> pts;
    for (PointId id : ids) pts.push_back(P[id]);
    return ref_meb(pts, tol);
}

struct ValidityReport {
    bool valid = false;
    std::optional<PointId> witness;  // farthest point of P ∩ B (AIFP)
    double bound = 0.0;              // distance or radius bound the answer was held to
    double value = 0.0;              // the answer's distance or radius
};

inline ValidityReport valid_aifp(std::optional<PointId> answer, std::span<const double> q, const Ball& B,
                                 const PointSet& P, double eps, double gamma) {
    ValidityReport r;
    r.witness = brute_ifp(P, B, q);
    double far = r.witness ? dist(P[*r.witness], q) : 0.0;
    r.bound = (1.0 - eps) * far;
    if (!answer) {
        r.valid = !r.witness;
        return r;
    }
    if (*answer >= P.size()) return r;
    r.value = dist(P[*answer], q);
    r.valid = oracle_in_ball(P[*answer], B.center, (1.0 + gamma) * B.radius) &&
              r.value >= r.bound - kRelTol * std::max(1.0, r.bound);
    return r;
}

inline ValidityReport valid_ameb(const std::optional<Ball>& answer, const Ball& B, const PointSet& P, double eps,
                                 double gamma, double tol = 1e-6) {
    ValidityReport r;
    auto inside = points_in_ball(P, B);
    if (!answer) {
        r.valid = inside.empty();
        return r;
    }
    r.value = answer->radius;
    for (PointId id : inside)
        if (!oracle_in_ball(P[id], answer->center, answer->radius)) return r;
    std::vector<PointId> fuzzy;
    for (PointId id : points_in_ball(P, expand_ball(B, 1.0 + gamma)))
        if (oracle_in_ball(P[id], answer->center, answer->radius)) fuzzy.push_back(id);
    double rad = fuzzy.empty() ? 0.0 : ref_meb(P, fuzzy, tol).radius;
    r.bound = (1.0 + eps) * rad;
    r.valid = answer->radius <= r.bound * (1.0 + tol) + (fuzzy.empty() ? tol : 0.0);
    return r;
}

}  // namespace rangeagg
