#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace rangeagg {

using PointId = std::uint32_t;

/// Raised when a requested structure would exceed a configured size limit.
class capacity_error : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

inline constexpr double kRelTol = 1e-9;

inline bool approx_equal(double a, double b, double tol = kRelTol) {
    return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

/// x <= bound, allowing a relative slack of kRelTol
inline bool leq_tol(double x, double bound) {
    return x <= bound + kRelTol * std::max(1.0, std::abs(bound));
}

/// ceil(x), snapping values within kRelTol of an integer onto it first
inline double ceil_tol(double x) {
    double r = std::round(x);
    if (std::abs(x - r) <= kRelTol * std::max(1.0, std::abs(x))) return r;
    return std::ceil(x);
}

class PointSet {
 public:
    PointSet() = default;
    PointSet(std::size_t dim, std::vector<double> coords) : dim_(dim), coords_(std::move(coords)) {
        if (dim_ == 0) throw std::invalid_argument("point dimension must be positive");
        if (coords_.size() % dim_ != 0) throw std::invalid_argument("coordinate count is not a multiple of dim");
        if (coords_.size() / dim_ > std::numeric_limits<PointId>::max())
            throw std::invalid_argument("too many points");
        for (double x : coords_)
            if (!std::isfinite(x)) throw std::invalid_argument("non-finite coordinate");
    }

    std::size_t size() const { return dim_ == 0 ? 0 : coords_.size() / dim_; }
    std::size_t dim() const { return dim_; }
    bool empty() const { return size() == 0; }

    std::span<const double> operator[](std::size_t i) const {
        return {coords_.data() + i * dim_, dim_};
    }
    const std::vector<double>& coords() const { return coords_; }

 private:
    std::size_t dim_ = 0;
    std::vector<double> coords_;
};

struct Ball {
    std::vector<double> center;
    double radius = 0.0;
};

inline double dist2_unchecked(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        double t = a[i] - b[i];
        s += t * t;
    }
    return s;
}

inline double dist(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("dimension mismatch");
    return std::sqrt(dist2_unchecked(a, b));
}

inline Ball expand_ball(const Ball& b, double y) {
    if (!(y > 0.0)) throw std::invalid_argument("expansion factor must be positive");
    return Ball{b.center, b.radius * y};
}

inline bool in_ball(std::span<const double> p, const Ball& b) {
    return dist(p, b.center) <= b.radius;
}

/// (1+lambda)^t
inline double scale_power(double lambda, long long t) {
    return std::exp(static_cast<double>(t) * std::log1p(lambda));
}

/// Smallest t with (1+lambda)^t >= x, snapping to an exact power within kRelTol.
inline long long align_exponent(double x, double lambda) {
    if (!(x > 0.0) || !std::isfinite(x)) throw std::invalid_argument("align_up needs a positive finite value");
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
    return static_cast<long long>(ceil_tol(std::log(x) / std::log1p(lambda)));
}

inline double align_up(double x, double lambda) {
    return scale_power(lambda, align_exponent(x, lambda));
}

/// Whether x is (within tolerance) an integer power of 1+lambda.
inline bool is_aligned(double x, double lambda) {
    return approx_equal(x, align_up(x, lambda));
}

inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

inline std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ splitmix64(b + 0x632be59bd9b4e019ULL));
}

/// Counter-based generator keyed by (seed, stream). Streams with different keys are
/// independent, so structures can derive their randomness without shared state.
class RngStream {
 public:
    using result_type = std::uint64_t;

    RngStream() : RngStream(0, 0) {}
    RngStream(std::uint64_t seed, std::uint64_t stream) : key_(hash_combine(seed, stream)) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() { return splitmix64(key_ + 0xd1b54a32d192ed03ULL * (++counter_)); }

    /// A child stream; does not advance this one.
    RngStream derive(std::uint64_t sub) const {
        RngStream r;
        r.key_ = hash_combine(key_, sub);
        return r;
    }

    double uniform() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
    /// Uniform in (0, 1], safe for log.
    double uniform_open() { return static_cast<double>(((*this)() >> 11) + 1) * 0x1.0p-53; }
    double normal() { return normal_(*this); }
    std::uint64_t below(std::uint64_t n) { return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(*this); }

    std::uint64_t key() const { return key_; }

 private:
    std::uint64_t key_ = 0;
    std::uint64_t counter_ = 0;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

enum class Profile { practical, theory };

inline const char* to_string(Profile p) { return p == Profile::theory ? "theory" : "practical"; }

inline Profile parse_profile(const std::string& s) {
    if (s == "practical") return Profile::practical;
    if (s == "theory") return Profile::theory;
    throw std::invalid_argument("unknown profile: " + s);
}

struct Overrides {
    std::optional<double> lambda;
    std::optional<int> a;
    std::optional<int> b;  // BD blocks per label (practical)
    std::optional<double> gap;
    std::optional<double> sub_eps, sub_gamma;  // precision of the constrained sub-structures
    std::optional<double> eps0, w;             // AMEB convergence threshold and iteration bound (practical)
    double c_multiplier = 4.0;
    double width_multiplier = 4.0;
    double c_cap = 1e6;
    double theory_c_limit = 1e7;
};

struct GlobalConfig {
    double eps = 0.3;
    double gamma = 0.3;
    double delta = 0.2;
    Profile profile = Profile::practical;
    Overrides overrides;
    std::uint64_t seed = 1;
    unsigned threads = 1;

    void validate() const {
        if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0,1)");
        if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
        if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
        if (overrides.lambda && !(*overrides.lambda > 0.0 && *overrides.lambda < 1.0))
            throw std::invalid_argument("lambda override must lie in (0,1)");
        if (overrides.a && *overrides.a < 1) throw std::invalid_argument("a override must be >= 1");
        if (overrides.b && *overrides.b < 1) throw std::invalid_argument("b override must be >= 1");
        if (overrides.gap && !(*overrides.gap > 1.0)) throw std::invalid_argument("gap override must exceed 1");
        if (!(overrides.c_multiplier > 0.0)) throw std::invalid_argument("c multiplier must be positive");
        if (!(overrides.width_multiplier > 0.0)) throw std::invalid_argument("width multiplier must be positive");
        if (!(overrides.c_cap >= 1.0)) throw std::invalid_argument("c cap must be >= 1");
        if (threads == 0) throw std::invalid_argument("threads must be >= 1");
    }
};

/// Lowest id among the points at maximal distance from q, restricted to `ids`.
template <class Ids>
std::optional<PointId> farthest_of(const PointSet& P, const Ids& ids, std::span<const double> q) {
    std::optional<PointId> best;
    double bd = -1.0;
    for (PointId id : ids) {
        double d2 = dist2_unchecked(P[id], q);
        if (d2 > bd || (d2 == bd && id < *best)) {
            bd = d2;
            best = id;
        }
    }
    return best;
}

/// Exact nearest neighbour by linear scan; ties go to the lower id.
inline std::optional<PointId> nearest_point(const PointSet& P, std::span<const double> q) {
    if (q.size() != P.dim()) throw std::invalid_argument("dimension mismatch");
    std::optional<PointId> best;
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < P.size(); ++i) {
        double d2 = dist2_unchecked(P[i], q);
        if (d2 < bd) {
            bd = d2;
            best = static_cast<PointId>(i);
        }
    }
    return best;
}

}  // namespace rangeagg
