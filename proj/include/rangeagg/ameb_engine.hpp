#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rangeagg/aifp_engine.hpp"
#include "rangeagg/core.hpp"

namespace rangeagg {

struct AmebParams {
    double eps = 0.0, gamma = 0.0, delta = 0.0;
    Profile profile = Profile::practical;
    double eps_a = 0.0, gamma_a = 0.0;
    double eps0 = 0.0;
    double eps_prime = 0.0;
    double w = 0.0;           // iteration bound, may exceed any practical loop count
    double aifp_delta = 0.0;  // failure budget of each AIFP sub-query
};

inline AmebParams derive_ameb_params(double eps, double gamma, double delta, Profile profile,
                                     std::optional<double> eps0_override = std::nullopt,
                                     std::optional<double> w_override = std::nullopt) {
    if (!(eps > 0.0 && eps < 1.0 && gamma > 0.0 && delta > 0.0 && delta < 1.0))
        throw std::invalid_argument("invalid (eps, gamma, delta)");
    AmebParams p;
    p.eps = eps;
    p.gamma = gamma;
    p.delta = delta;
    p.profile = profile;
    p.eps_a = p.gamma_a = std::min(eps / 18.0, gamma / 18.0);
    if (profile == Profile::theory) {
        p.eps0 = eps * eps / 1600.0;
        p.w = ceil_tol(4.0 / (p.eps0 * p.eps0));
        p.aifp_delta = delta * p.eps0 * p.eps0 / 16.0;
    } else {
        p.eps0 = eps0_override.value_or(eps / 16.0);
        p.w = w_override.value_or(ceil_tol(16.0 / eps));
        p.aifp_delta = delta / (2.0 * (p.w + 2.0));
    }
    if (!(p.eps0 > 0.0 && p.eps0 < 1.0) || !(p.w >= 1.0)) throw std::invalid_argument("invalid eps0 or w");
    p.eps_prime = std::min({1.0 / (1.0 - p.eps0) - 1.0, std::pow(1.0 - eps * eps / 100.0, -0.5) - 1.0, eps / 3.0});
    return p;
}

namespace detail {

/// Frank-Wolfe on the MEB dual; weights alpha give a lower bound on Rad^2.
/// With `away` set, away steps are taken as well, which converges linearly.
inline Ball meb_dual(const std::vector<std::span<const double>>& pts, double tol, bool away,
                     std::uint64_t max_iter = 50'000'000) {
    if (pts.empty()) throw std::invalid_argument("MEB of an empty set");
    const std::size_t k = pts.size(), d = pts[0].size();
    std::vector<double> alpha(k, 0.0), c(pts[0].begin(), pts[0].end()), D(k);
    alpha[0] = 1.0;
    const double bound = (1.0 + tol) * (1.0 + tol);
    double maxd = 0.0;
    for (std::uint64_t it = 0;; ++it) {
        double F = 0.0;
        std::size_t j = 0, a = k;
        maxd = -1.0;
        for (std::size_t i = 0; i < k; ++i) {
            D[i] = dist2_unchecked(pts[i], c);
            F += alpha[i] * D[i];
            if (D[i] > maxd) {
                maxd = D[i];
                j = i;
            }
            if (alpha[i] > 0.0 && (a == k || D[i] < D[a])) a = i;
        }
        if (maxd <= bound * F || maxd == 0.0 || it >= max_iter) break;
        const double g_fw = maxd - F;
        const double g_away = away && a < k ? F - D[a] : -1.0;
        if (!away || g_fw >= g_away || alpha[a] >= 1.0) {
            double tau = std::clamp(g_fw / (2.0 * maxd), 0.0, 1.0);
            for (auto& x : alpha) x *= 1.0 - tau;
            alpha[j] += tau;
        } else {
            double tmax = alpha[a] / (1.0 - alpha[a]);
            double tau = D[a] > 0.0 ? std::min(g_away / (2.0 * D[a]), tmax) : tmax;
            for (auto& x : alpha) x *= 1.0 + tau;
            alpha[a] -= tau;
            if (tau == tmax || alpha[a] < 0.0) alpha[a] = 0.0;
        }
        std::fill(c.begin(), c.end(), 0.0);
        double s = 0.0;
        for (std::size_t i = 0; i < k; ++i) {
            if (alpha[i] == 0.0) continue;
            s += alpha[i];
            for (std::size_t x = 0; x < d; ++x) c[x] += alpha[i] * pts[i][x];
        }
        for (auto& x : c) x /= s;
        for (auto& x : alpha) x /= s;
    }
    maxd = 0.0;
    for (std::size_t i = 0; i < k; ++i) maxd = std::max(maxd, dist2_unchecked(pts[i], c));
    return Ball{std::move(c), std::sqrt(maxd)};
}

}  // namespace detail

/// (1+eps')-approximate MEB: center-shift iterations towards the farthest point with an
/// exact line search, stopped once the dual lower bound certifies the ratio.
inline Ball meb_approx(const std::vector<std::span<const double>>& pts, double eps_prime) {
    if (pts.empty()) throw std::invalid_argument("MEB of an empty set");
    if (!(eps_prime > 0.0)) throw std::invalid_argument("eps' must be positive");
    return detail::meb_dual(pts, eps_prime, false);
}

inline Ball meb_approx(const PointSet& P, const std::vector<PointId>& ids, double eps_prime) {
    std::vector<std::span<const double>> pts;
    pts.reserve(ids.size());
    for (PointId id : ids) pts.push_back(P[id]);
    return meb_approx(pts, eps_prime);
}

inline Ball two_point_meb(std::span<const double> a, std::span<const double> b) {
    Ball r;
    r.center.resize(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) r.center[i] = 0.5 * (a[i] + b[i]);
    r.radius = 0.5 * dist(a, b);
    return r;
}

enum class AmebExit { none, nn_outside, aifp_null, no_progress, converged, exhausted };

struct AmebAnswer {
    std::optional<Ball> ball;
    AmebExit exit = AmebExit::none;
    std::uint64_t probes = 0;
    std::uint32_t aifp_calls = 0;
    std::uint32_t iterations = 0;
    std::vector<PointId> core;
};

/// Coreset growth driven by AIFP queries. `nn(q)` returns a nearest point of P,
/// `aifp(B, q)` an AifpAnswer for q in P ∩ B.
template <class Nn, class Aifp>
AmebAnswer ameb_query(const PointSet& P, const Ball& B, const AmebParams& prm, Nn&& nn, Aifp&& aifp) {
    AmebAnswer out;
    auto pa = nn(std::span<const double>(B.center));
    if (!pa || dist(P[*pa], B.center) > (1.0 + prm.gamma_a) * B.radius) {
        out.exit = AmebExit::nn_outside;
        return out;
    }
    AifpAnswer fb = aifp(B, P[*pa]);
    ++out.aifp_calls;
    out.probes += fb.probes;
    if (!fb.point) {
        out.exit = AmebExit::aifp_null;
        return out;
    }
    out.core = {*pa, *fb.point};
    Ball cur = two_point_meb(P[*pa], P[*fb.point]);
    const std::uint64_t w = prm.w >= 1.8e19 ? UINT64_MAX : static_cast<std::uint64_t>(prm.w);
    for (std::uint64_t i = 1; i <= w; ++i) {
        out.iterations = static_cast<std::uint32_t>(std::min<std::uint64_t>(i, UINT32_MAX));
        std::span<const double> c(cur.center);
        AifpAnswer fi = aifp(B, c);
        ++out.aifp_calls;
        out.probes += fi.probes;
        double far_core = 0.0;
        for (PointId id : out.core) far_core = std::max(far_core, dist(P[id], c));
        if (!fi.point || dist(P[*fi.point], c) <= far_core) {
            out.ball = expand_ball(cur, 1.0 / (1.0 - prm.eps_a));
            out.exit = AmebExit::no_progress;
            return out;
        }
        out.core.push_back(*fi.point);
        Ball next = meb_approx(P, out.core, prm.eps_prime);
        if (next.radius < cur.radius / (1.0 + prm.eps_prime) * (1.0 - 1e-9))
            throw std::logic_error("coreset radius shrank beyond solver slack");
        if (next.radius <= (1.0 + prm.eps0) * cur.radius) {
            out.ball = expand_ball(next, 1.0 + prm.eps / 3.0);
            out.exit = AmebExit::converged;
            return out;
        }
        cur = std::move(next);
    }
    out.ball = expand_ball(cur, 1.0 + prm.eps / 3.0);
    out.exit = AmebExit::exhausted;
    return out;
}

/// AMEB engine: an AIFP index built with (eps_A, gamma_A) and the per-call budget.
class AmebEngine {
 public:
    AmebEngine(std::shared_ptr<const PointSet> points, const GlobalConfig& cfg)
        : AmebEngine(points, cfg, points ? std::make_shared<const AggregationTree>(build_tree(*points)) : nullptr) {}

    AmebEngine(std::shared_ptr<const PointSet> points, const GlobalConfig& cfg,
               std::shared_ptr<const AggregationTree> tree)
        : params_(derive_ameb_params(cfg.eps, cfg.gamma, cfg.delta, cfg.profile, cfg.overrides.eps0, cfg.overrides.w)),
          index_(std::move(points), inner_config(cfg, params_), std::move(tree)) {}

    static GlobalConfig inner_config(const GlobalConfig& cfg, const AmebParams& p) {
        GlobalConfig c = cfg;
        c.eps = p.eps_a;
        c.gamma = p.gamma_a;
        c.delta = p.aifp_delta;
        c.overrides.lambda.reset();
        c.overrides.gap.reset();
        c.overrides.sub_eps.reset();
        c.overrides.sub_gamma.reset();
        c.overrides.eps0.reset();
        c.overrides.w.reset();
        return c;
    }

    const AmebParams& params() const { return params_; }
    const AifpIndex& index() const { return index_; }

    AmebAnswer query(const Ball& B, RngStream& rng) const {
        if (!(B.radius > 0.0)) throw std::invalid_argument("ball radius must be positive");
        return ameb_query(
            index_.points(), B, params_, [&](std::span<const double> q) { return index_.ann(q); },
            [&](const Ball& b, std::span<const double> q) { return index_.query(b, q, rng); });
    }

 private:
    AmebParams params_;
    AifpIndex index_;
};

}  // namespace rangeagg
