#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

#include "rangeagg/core.hpp"

namespace rangeagg {

/// floor(x) as an integer, for |x| < 2^63.
inline std::int64_t floor_to_int(double x) {
    auto t = static_cast<std::int64_t>(x);
    return x < static_cast<double>(t) ? t - 1 : t;
}

/// h(p) = floor((a.p + b) / W) with a ~ N(0, I) and b ~ U[0, W).
struct StableHash {
    std::vector<double> direction;
    double offset = 0.0;
    double width = 1.0;

    std::int64_t operator()(std::span<const double> p) const {
        double s = offset;
        for (std::size_t i = 0; i < direction.size(); ++i) s += direction[i] * p[i];
        return floor_to_int(s / width);
    }
};

inline StableHash sample_hash(std::size_t dim, double width, RngStream& rng) {
    if (!(width > 0.0)) throw std::invalid_argument("hash width must be positive");
    StableHash h;
    h.direction.resize(dim);
    for (auto& x : h.direction) x = rng.normal();
    h.offset = rng.uniform() * width;
    h.width = width;
    return h;
}

/// Random map Z -> {0, 1}.
struct SignMap {
    std::uint64_t salt = 0;
    int operator()(std::int64_t v) const {
        return static_cast<int>(hash_combine(salt, static_cast<std::uint64_t>(v)) >> 63);
    }
};

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

/// Collision probability of two points at distance s under a width-W stable hash.
inline double collision_prob(double s, double width) {
    if (!(width > 0.0)) throw std::invalid_argument("hash width must be positive");
    if (s < 0.0) throw std::invalid_argument("distance must be non-negative");
    if (s == 0.0) return 1.0;
    double w = width / s;
    return 1.0 - 2.0 * normal_cdf(-w) -
           2.0 / (std::sqrt(2.0 * std::numbers::pi) * w) * (1.0 - std::exp(-w * w / 2.0));
}

struct SensitiveFamily {
    double r_near = 0.0;
    double r_far = 0.0;
    double width = 0.0;
    double p1 = 0.0;
    double p2 = 0.0;
};

/// An (r_near, r_far, p1, p2)-sensitive family with W = kappa * r_near.
inline SensitiveFamily make_sensitive_family(double r_near, double r_far, double kappa = 4.0) {
    if (!(r_near > 0.0) || !(r_far > r_near)) throw std::invalid_argument("need 0 < r_near < r_far");
    if (!(kappa > 0.0)) throw std::invalid_argument("width multiplier must be positive");
    SensitiveFamily f;
    f.r_near = r_near;
    f.r_far = r_far;
    f.width = kappa * r_near;
    f.p1 = collision_prob(r_near, f.width);
    f.p2 = collision_prob(r_far, f.width);
    return f;
}

}  // namespace rangeagg
