#pragma once

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "rangeagg/bd_index.hpp"
#include "rangeagg/core.hpp"

namespace rangeagg {

/// Promise on a constrained query: the ball radius is r_b and the farthest
/// in-range distance lies in (d_min, d_max].
struct Constraint {
    double r_b = 0.0;
    double d_min = 0.0;
    double d_max = 0.0;
};

struct BdConfig {
    Profile profile = Profile::practical;
    BdOverrides overrides;
    double width_multiplier = 4.0;
    BdOptions options;
};

inline BdConfig bd_config_from(const GlobalConfig& g) {
    BdConfig c;
    c.profile = g.profile;
    c.overrides.a = g.overrides.a;
    c.overrides.b = g.overrides.b;
    c.overrides.c_multiplier = g.overrides.c_multiplier;
    c.overrides.c_cap = g.overrides.c_cap;
    c.overrides.theory_c_limit = g.overrides.theory_c_limit;
    c.width_multiplier = g.overrides.width_multiplier;
    return c;
}

struct CaifpAnswer {
    std::optional<PointId> point;
    std::uint64_t probes = 0;
    std::uint32_t rungs = 0;       // rungs queried
    std::uint64_t bd_queries = 0;  // single-structure BD queries issued
};

inline double caifp_xi(double eps, double gamma) {
    return std::min(std::pow(1.0 - eps, -0.5) - 1.0, gamma);
}

/// Ball peeling over a ladder r_i = d_min (1+xi)^i, i = 0..m, one boosted BD structure per rung.
/// Rung structures carry no stored data beyond their seed, so they are instantiated when queried.
class CaifpIndex {
 public:
    CaifpIndex(std::shared_ptr<const PointSet> points, std::shared_ptr<const std::vector<PointId>> members,
               double eps, double gamma, double delta, Constraint con, std::uint64_t seed, const BdConfig& cfg = {})
        : points_(std::move(points)),
          members_(std::move(members)),
          eps_(eps),
          gamma_(gamma),
          delta_(delta),
          con_(con),
          seed_(seed),
          cfg_(cfg) {
        if (!points_) throw std::invalid_argument("null point set");
        if (!(eps > 0.0 && eps < 1.0 && gamma > 0.0 && delta > 0.0 && delta < 1.0))
            throw std::invalid_argument("invalid (eps, gamma, delta)");
        if (!(con.r_b > 0.0 && con.d_min > 0.0)) throw std::invalid_argument("constraint values must be positive");
        if (!(con.d_max > con.d_min)) throw std::invalid_argument("constraint needs d_max > d_min");
        if (!members_) {
            auto all = std::make_shared<std::vector<PointId>>(points_->size());
            for (std::size_t i = 0; i < all->size(); ++i) (*all)[i] = static_cast<PointId>(i);
            members_ = std::move(all);
        }
        if (members_->empty()) throw std::invalid_argument("constrained structure over an empty set");
        packed_ = BdIndex::pack_members(*points_, *members_);
        xi_ = caifp_xi(eps, gamma);
        m_ = align_exponent(con.d_max / con.d_min, xi_);
        if (m_ < 1) m_ = 1;
        delta_prime_ = delta / static_cast<double>(m_);
        reps_ = boost_repetitions(delta_prime_);
        bd_ = bd_params_for(xi_, members_->size(), cfg_.profile, cfg_.overrides, cfg_.width_multiplier);
        if (bd_.c == 0)
            throw capacity_error("BD group count c = " + std::to_string(bd_.c_real) + " exceeds the limit " +
                                 std::to_string(bd_.theory_c_limit));
    }

    double xi() const { return xi_; }
    long long m() const { return m_; }
    std::size_t num_rungs() const { return static_cast<std::size_t>(m_) + 1; }
    double radius(long long i) const { return con_.d_min * scale_power(xi_, i); }
    double delta_prime() const { return delta_prime_; }
    int repetitions() const { return reps_; }
    const BdParams& bd_params() const { return bd_; }
    const Constraint& constraint() const { return con_; }
    const std::vector<PointId>& members() const { return *members_; }
    std::uint64_t seed() const { return seed_; }

    /// Repetition r of rung i.
    BdIndex rung_structure(long long i, int r) const {
        return BdIndex(points_, members_, con_.r_b, radius(i), bd_, hash_combine(hash_combine(seed_, i), r),
                       cfg_.width_multiplier, cfg_.options, packed_);
    }

    BoostedBd rung(long long i) const {
        return BoostedBd(points_, members_, con_.r_b, radius(i), bd_, reps_, hash_combine(seed_, i),
                         cfg_.width_multiplier, cfg_.options, packed_);
    }

    CaifpAnswer query(const Ball& B, std::span<const double> q, RngStream& rng) const {
        if (!approx_equal(B.radius, con_.r_b)) throw std::invalid_argument("query radius does not match r_B");
        if (q.size() != points_->dim()) throw std::invalid_argument("dimension mismatch");
        CaifpAnswer ans;
        Ball out{std::vector<double>(q.begin(), q.end()), 0.0};
        for (long long i = 0; i <= m_; ++i) {
            out.radius = radius(i);
            ++ans.rungs;
            std::optional<PointId> found;
            for (int r = 0; r < reps_ && !found; ++r) {
                BdAnswer a = rung_structure(i, r).query(B, out, rng);
                ans.probes += a.probes;
                ++ans.bd_queries;
                found = a.point;
            }
            if (!found) return ans;
            ans.point = found;
        }
        return ans;
    }

 private:
    std::shared_ptr<const PointSet> points_;
    std::shared_ptr<const std::vector<PointId>> members_;
    std::shared_ptr<const PackedMembers> packed_;
    double eps_, gamma_, delta_;
    Constraint con_;
    std::uint64_t seed_;
    BdConfig cfg_;
    double xi_ = 0.0;
    long long m_ = 1;
    double delta_prime_ = 0.0;
    int reps_ = 1;
    BdParams bd_;
};

}  // namespace rangeagg
