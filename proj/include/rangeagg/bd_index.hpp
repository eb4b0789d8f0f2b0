#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <memory>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "rangeagg/core.hpp"
#include "rangeagg/stable_lsh.hpp"

namespace rangeagg {

struct BdOverrides {
    std::optional<int> a;
    std::optional<int> b;
    double c_multiplier = 4.0;
    double c_cap = 1e6;
    double theory_c_limit = 1e7;
};

struct BdParams {
    Profile profile = Profile::practical;
    double xi = 0.0;
    std::size_t n = 0;
    double p1 = 0.0, p2 = 0.0;
    double p1p = 0.0, p2p = 0.0;  // (1+P1)/2, (1+P2)/2
    double eta = 0.0;
    int a = 1;
    int b = 1;
    double log_p1pp = 0.0;  // ln(2^{-2a} * 4/9)
    double log_p2pp = 0.0;  // ln(2^{-2a} / 3)
    double rho = 0.0;
    double c_real = 0.0;    // uncapped group count, may be astronomically large
    std::uint64_t c = 0;    // effective group count, 0 when refused
    double t1 = 0.0, t2 = 0.0;
    double theory_c_limit = 1e7;

    int need_in() const { return std::max(0, static_cast<int>(ceil_tol(t1))); }
    int need_out() const { return std::max(0, static_cast<int>(ceil_tol(t2))); }
    double p1pp() const { return std::exp(log_p1pp); }
    double p2pp() const { return std::exp(log_p2pp); }
    std::size_t label_bits() const { return 2 * static_cast<std::size_t>(a) * static_cast<std::size_t>(b); }
    std::uint64_t probe_cap() const { return 3 * c; }
};

inline BdParams derive_bd_params(double xi, std::size_t n, double p1, double p2, Profile profile,
                                 const BdOverrides& ov = {}) {
    if (!(p2 > 0.0 && p2 < p1 && p1 < 1.0)) throw std::invalid_argument("need 0 < P2 < P1 < 1");
    if (n == 0) throw std::invalid_argument("n must be >= 1");
    if (!(xi > 0.0)) throw std::invalid_argument("xi must be positive");
    BdParams bp;
    bp.profile = profile;
    bp.xi = xi;
    bp.n = n;
    bp.p1 = p1;
    bp.p2 = p2;
    bp.p1p = (1.0 + p1) / 2.0;
    bp.p2p = (1.0 + p2) / 2.0;
    bp.eta = (bp.p1p - bp.p2p) / 3.0;
    bp.theory_c_limit = ov.theory_c_limit;

    double a_formula = ceil_tol(2.0 * bp.p1p * std::log(3.0) / (bp.eta * bp.eta));
    if (profile == Profile::theory) {
        if (!(a_formula < 1e9))
            throw capacity_error("bits per block a = " + std::to_string(a_formula) +
                                 " overflows; group count c = 2^(2a) is unbounded");
        bp.a = static_cast<int>(a_formula);
    } else {
        bp.a = ov.a.value_or(1);
        if (bp.a < 1) throw std::invalid_argument("a must be >= 1");
    }
    double a = bp.a;
    bp.log_p1pp = -2.0 * a * std::log(2.0) + std::log(4.0 / 9.0);
    bp.log_p2pp = -2.0 * a * std::log(2.0) - std::log(3.0);
    bp.rho = bp.log_p1pp / bp.log_p2pp;
    double ln_n = std::log(static_cast<double>(n));
    int b_formula = std::max(1, static_cast<int>(ceil_tol(ln_n / -bp.log_p2pp)));
    bp.b = (profile == Profile::practical && ov.b) ? *ov.b : b_formula;
    if (bp.b < 1) throw std::invalid_argument("b must be >= 1");

    double mult = profile == Profile::practical ? ov.c_multiplier : 1.0;
    double log_c = std::log(mult) + bp.rho * ln_n - bp.log_p1pp;
    bp.c_real = log_c > 700.0 ? std::numeric_limits<double>::infinity() : ceil_tol(std::exp(log_c));
    if (profile == Profile::practical) {
        bp.c = static_cast<std::uint64_t>(std::min(bp.c_real, std::floor(ov.c_cap)));
    } else {
        bp.c = bp.c_real <= ov.theory_c_limit ? static_cast<std::uint64_t>(bp.c_real) : 0;
    }
    bp.t1 = bp.p1p * a - bp.eta * a;
    bp.t2 = (1.0 - bp.p2) * a / 2.0 - bp.eta * a;
    return bp;
}

/// Repetitions needed to push a 3/4 per-structure failure rate below delta.
inline int boost_repetitions(double delta) {
    if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in (0,1)");
    return std::max(1, static_cast<int>(ceil_tol(std::log(1.0 / delta) / std::log(4.0 / 3.0))));
}

/// Packed bit string.
struct Label {
    std::vector<std::uint64_t> words;

    explicit Label(std::size_t bits = 0) : words((bits + 63) / 64, 0) {}
    bool get(std::size_t i) const { return (words[i >> 6] >> (i & 63)) & 1U; }
    void set(std::size_t i, bool v) {
        if (v)
            words[i >> 6] |= (std::uint64_t{1} << (i & 63));
        else
            words[i >> 6] &= ~(std::uint64_t{1} << (i & 63));
    }
    bool operator==(const Label&) const = default;
};

struct LabelHash {
    std::size_t operator()(const Label& l) const {
        std::uint64_t h = 0x51ed2701;
        for (auto w : l.words) h = hash_combine(h, w);
        return static_cast<std::size_t>(h);
    }
};

/// Number of positions where two a-bit blocks starting at `from` agree.
inline int common_bits(const Label& x, const Label& y, std::size_t from, int a) {
    int c = 0;
    for (int i = 0; i < a; ++i) c += x.get(from + i) == y.get(from + i);
    return c;
}

struct BdAnswer {
    std::optional<PointId> point;
    std::uint64_t probes = 0;
    std::uint64_t groups = 0;  // groups whose bucket was looked up
};

/// How buckets are kept: `materialized` stores every group's label map,
/// `implicit` recomputes a group's bucket for the probed label by scanning points.
enum class BdStorage { implicit, materialized };

/// How S' is drawn: `per_group` draws a uniform label for every group and filters,
/// `skip` jumps straight to the groups that pass the filter and draws S' conditioned on passing.
enum class LabelSampling { skip, per_group };

struct BdOptions {
    BdStorage storage = BdStorage::implicit;
    LabelSampling sampling = LabelSampling::skip;
};

/// Member coordinates in the two layouts the bucket scan reads: row-major, and blocks of
/// four members with their coordinates interleaved lane by lane (zero padded).
struct PackedMembers {
    static constexpr std::size_t kLanes = 4;
    std::size_t count = 0, dim = 0;
    std::vector<double> rows;
    std::vector<double> lanes;

    PackedMembers(const PointSet& P, const std::vector<PointId>& ids) : count(ids.size()), dim(P.dim()) {
        rows.reserve(count * dim);
        for (PointId id : ids) {
            auto p = P[id];
            rows.insert(rows.end(), p.begin(), p.end());
        }
        const std::size_t blocks = (count + kLanes - 1) / kLanes;
        lanes.assign(blocks * dim * kLanes, 0.0);
        for (std::size_t i = 0; i < count; ++i)
            for (std::size_t j = 0; j < dim; ++j)
                lanes[((i / kLanes) * dim + j) * kLanes + i % kLanes] = rows[i * dim + j];
    }
};

class BdIndex {
 public:
    struct GroupHashes {
        std::vector<StableHash> fns;  // position j*2a + side*a + i
        std::vector<SignMap> signs;
    };

    BdIndex(std::shared_ptr<const PointSet> points, std::shared_ptr<const std::vector<PointId>> members,
            double r_in, double r_out, BdParams params, std::uint64_t seed, double width_multiplier = 4.0,
            BdOptions opt = {}, std::shared_ptr<const PackedMembers> packed = nullptr)
        : points_(std::move(points)),
          members_(std::move(members)),
          r_in_(r_in),
          r_out_(r_out),
          params_(params),
          seed_(seed),
          opt_(opt) {
        if (!points_) throw std::invalid_argument("null point set");
        if (!(r_in > 0.0 && r_out > 0.0)) throw std::invalid_argument("BD radii must be positive");
        if (params_.c == 0)
            throw capacity_error("group count " + std::to_string(params_.c_real) + " exceeds the configured limit");
        if (!members_) {
            auto all = std::make_shared<std::vector<PointId>>(points_->size());
            std::iota(all->begin(), all->end(), PointId{0});
            members_ = std::move(all);
        }
        packed_ = packed ? std::move(packed) : pack_members(*points_, *members_);
        if (packed_->count != members_->size() || packed_->dim != points_->dim())
            throw std::invalid_argument("packed coordinates do not match members");
        w_in_ = width_multiplier * r_in_;
        w_out_ = width_multiplier * r_out_ / (1.0 + params_.xi);
        prepare_filter();
        if (opt_.storage == BdStorage::materialized) materialize();
    }

    const BdParams& params() const { return params_; }
    double r_in() const { return r_in_; }
    double r_out() const { return r_out_; }
    std::uint64_t seed() const { return seed_; }
    const std::vector<PointId>& members() const { return *members_; }
    std::shared_ptr<const std::vector<PointId>> members_ptr() const { return members_; }
    std::shared_ptr<const PackedMembers> packed() const { return packed_; }
    const PointSet& points() const { return *points_; }
    double pass_probability() const { return pass_all_; }

    GroupHashes group_hashes(std::uint64_t k) const {
        const std::size_t bits = params_.label_bits();
        const int a = params_.a;
        GroupHashes g;
        g.fns.reserve(bits);
        g.signs.reserve(bits);
        for (std::size_t pos = 0; pos < bits; ++pos) {
            bool out = (pos / a) % 2 == 1;
            RngStream r(seed_, hash_combine(k, pos));
            g.fns.push_back(sample_hash(points_->dim(), out ? w_out_ : w_in_, r));
            g.signs.push_back(SignMap{r()});
        }
        return g;
    }

    /// Bucket label of a point in group k.
    Label point_label(const GroupHashes& g, std::span<const double> p) const {
        Label l(g.fns.size());
        for (std::size_t pos = 0; pos < g.fns.size(); ++pos) l.set(pos, g.signs[pos](g.fns[pos](p)));
        return l;
    }

    /// Query label S: in-bits from o_in, complemented out-bits from o_out.
    Label query_label(const GroupHashes& g, std::span<const double> o_in, std::span<const double> o_out) const {
        const int a = params_.a;
        Label l(g.fns.size());
        for (std::size_t pos = 0; pos < g.fns.size(); ++pos) {
            bool out = (pos / a) % 2 == 1;
            int bit = g.signs[pos](g.fns[pos](out ? o_out : o_in));
            l.set(pos, out ? 1 - bit : bit);
        }
        return l;
    }

    /// Members of the bucket labelled `label` in group k, in member order.
    std::vector<PointId> bucket(std::uint64_t k, const Label& label) const {
        std::vector<PointId> out;
        if (groups_) {
            auto it = (*groups_)[k].find(label);
            if (it != (*groups_)[k].end()) out = it->second;
            return out;
        }
        auto g = group_hashes(k);
        auto& idx = scan(g, label);
        for (auto i : idx) out.push_back((*members_)[i]);
        return out;
    }

    static std::shared_ptr<const PackedMembers> pack_members(const PointSet& P, const std::vector<PointId>& ids) {
        return std::make_shared<const PackedMembers>(P, ids);
    }

    /// Full bucket map of group k (computed on demand in implicit mode).
    std::unordered_map<Label, std::vector<PointId>, LabelHash> group(std::uint64_t k) const {
        if (groups_) return (*groups_)[k];
        return compute_group(k);
    }

 private:
    std::unordered_map<Label, std::vector<PointId>, LabelHash> compute_group(std::uint64_t k) const {
        std::unordered_map<Label, std::vector<PointId>, LabelHash> m;
        auto g = group_hashes(k);
        for (PointId id : *members_) m[point_label(g, (*points_)[id])].push_back(id);
        return m;
    }

 public:

    bool in_region(PointId id, std::span<const double> o_in, std::span<const double> o_out) const {
        auto p = (*points_)[id];
        return dist(p, o_in) <= (1.0 + params_.xi) * r_in_ && dist(p, o_out) >= r_out_ / (1.0 + params_.xi);
    }

    BdAnswer query(const Ball& b_in, const Ball& b_out, RngStream& rng) const {
        if (!approx_equal(b_in.radius, r_in_) || !approx_equal(b_out.radius, r_out_))
            throw std::invalid_argument("query radii do not match the BD index");
        if (b_in.center.size() != points_->dim() || b_out.center.size() != points_->dim())
            throw std::invalid_argument("dimension mismatch");
        std::span<const double> o_in(b_in.center), o_out(b_out.center);
        BdAnswer ans;
        const std::uint64_t cap = params_.probe_cap();
        const std::uint64_t c = params_.c;

        auto probe_group = [&](std::uint64_t k, const GroupHashes& g, const Label& s_prime) -> bool {
            ++ans.groups;
            if (groups_) {
                auto it = (*groups_)[k].find(s_prime);
                if (it == (*groups_)[k].end()) return false;
                for (PointId id : it->second) {
                    if (ans.probes >= cap) return true;
                    ++ans.probes;
                    if (in_region(id, o_in, o_out)) {
                        ans.point = id;
                        return true;
                    }
                }
                return false;
            }
            // chunked so the scan stops at the first in-region bucket member
            constexpr std::size_t kChunk = 256;
            for (std::size_t from = 0; from < members_->size(); from += kChunk) {
                for (auto i : scan(g, s_prime, from, std::min(members_->size(), from + kChunk))) {
                    PointId id = (*members_)[i];
                    if (ans.probes >= cap) return true;
                    ++ans.probes;
                    if (in_region(id, o_in, o_out)) {
                        ans.point = id;
                        return true;
                    }
                }
            }
            return false;
        };

        if (opt_.sampling == LabelSampling::per_group) {
            const std::size_t bits = params_.label_bits();
            for (std::uint64_t k = 0; k < c; ++k) {
                Label s_prime(bits);
                for (auto& w : s_prime.words) w = rng();
                if (bits % 64) s_prime.words.back() &= (std::uint64_t{1} << (bits % 64)) - 1;
                auto g = group_hashes(k);
                Label s = query_label(g, o_in, o_out);
                if (!passes_filter(s, s_prime)) continue;
                if (probe_group(k, g, s_prime)) break;
            }
            return ans;
        }

        if (!(pass_all_ > 0.0)) return ans;
        const double log_fail = pass_all_ < 1.0 ? std::log1p(-pass_all_) : 0.0;
        std::uint64_t k = 0;
        bool first = true;
        while (true) {
            double skip = 0.0;
            if (pass_all_ < 1.0) skip = std::floor(std::log(rng.uniform_open()) / log_fail);
            double next = (first ? 0.0 : static_cast<double>(k) + 1.0) + skip;
            if (next >= static_cast<double>(c)) break;
            k = static_cast<std::uint64_t>(next);
            first = false;
            auto g = group_hashes(k);
            Label s_prime = query_label(g, o_in, o_out);
            perturb_passing(s_prime, rng);
            if (probe_group(k, g, s_prime)) break;
        }
        return ans;
    }

    bool passes_filter(const Label& s, const Label& s_prime) const {
        const int a = params_.a;
        for (int j = 0; j < params_.b; ++j) {
            std::size_t base = static_cast<std::size_t>(j) * 2 * a;
            if (common_bits(s, s_prime, base, a) < params_.need_in()) return false;
            if (common_bits(s, s_prime, base + a, a) < params_.need_out()) return false;
        }
        return true;
    }

 private:
    /// Indices (into members) of the bucket `label`, in member order. Filters one bit at a
    /// time; each hash is evaluated exactly as StableHash does.
    const std::vector<std::uint32_t>& scan(const GroupHashes& g, const Label& label) const {
        return scan(g, label, 0, members_->size());
    }

    /// Same, restricted to member positions [from, to); `from` must be a multiple of four.
    /// The first bit is evaluated for whole blocks at once, the rest on the survivors. Every lane
    /// accumulates in the same order as StableHash, so the bits agree exactly.
    const std::vector<std::uint32_t>& scan(const GroupHashes& g, const Label& label, std::size_t from,
                                           std::size_t to) const {
        typedef double v4d __attribute__((vector_size(32)));
        constexpr std::size_t L = PackedMembers::kLanes;
        thread_local std::vector<std::uint32_t> idx;
        const std::size_t d = points_->dim();
        const double* X = packed_->rows.data();
        idx.clear();
        if (from >= to || g.fns.empty()) {
            for (std::size_t i = from; i < to; ++i) idx.push_back(static_cast<std::uint32_t>(i));
            return idx;
        }
        {
            const StableHash& h = g.fns[0];
            const double* a = h.direction.data();
            const int want = label.get(0);
            const SignMap sign = g.signs[0];
            idx.resize(to - from + L);
            std::size_t keep = 0;
            for (std::size_t blk = from / L; blk * L < to; ++blk) {
                const double* T = packed_->lanes.data() + blk * d * L;
                v4d s = {h.offset, h.offset, h.offset, h.offset};
                for (std::size_t j = 0; j < d; ++j) {
                    v4d x;
                    std::memcpy(&x, T + j * L, sizeof x);
                    s += a[j] * x;
                }
                const std::size_t base = blk * L;
                for (std::size_t l = 0; l < L && base + l < to; ++l) {
                    idx[keep] = static_cast<std::uint32_t>(base + l);
                    keep += sign(floor_to_int(s[l] / h.width)) == want;
                }
            }
            idx.resize(keep);
        }
        for (std::size_t pos = 1; pos < g.fns.size() && !idx.empty(); ++pos) {
            const StableHash& h = g.fns[pos];
            const double* a = h.direction.data();
            const int want = label.get(pos);
            const SignMap sign = g.signs[pos];
            auto bit = [&](double s) { return sign(floor_to_int(s / h.width)); };
            std::size_t keep = 0, k = 0;
            const std::size_t cnt = idx.size();
            // four members at a time: independent accumulation chains, same per-point order
            for (; k + 4 <= cnt; k += 4) {
                const std::uint32_t i0 = idx[k], i1 = idx[k + 1], i2 = idx[k + 2], i3 = idx[k + 3];
                const double *x0 = X + std::size_t{i0} * d, *x1 = X + std::size_t{i1} * d,
                             *x2 = X + std::size_t{i2} * d, *x3 = X + std::size_t{i3} * d;
                double s0 = h.offset, s1 = h.offset, s2 = h.offset, s3 = h.offset;
                for (std::size_t j = 0; j < d; ++j) {
                    s0 += a[j] * x0[j];
                    s1 += a[j] * x1[j];
                    s2 += a[j] * x2[j];
                    s3 += a[j] * x3[j];
                }
                idx[keep] = i0;
                keep += bit(s0) == want;
                idx[keep] = i1;
                keep += bit(s1) == want;
                idx[keep] = i2;
                keep += bit(s2) == want;
                idx[keep] = i3;
                keep += bit(s3) == want;
            }
            for (; k < cnt; ++k) {
                const std::uint32_t i = idx[k];
                const double* x = X + std::size_t{i} * d;
                double s = h.offset;
                for (std::size_t j = 0; j < d; ++j) s += a[j] * x[j];
                idx[keep] = i;
                keep += bit(s) == want;
            }
            idx.resize(keep);
        }
        return idx;
    }

    /// Distribution of agreements in one a-bit block conditioned on reaching `need`.
    static std::vector<double> conditional_cdf(int a, int need, double& tail) {
        std::vector<double> pmf(a + 1, 0.0);
        double lf_a = std::lgamma(a + 1.0);
        for (int x = 0; x <= a; ++x)
            pmf[x] = std::exp(lf_a - std::lgamma(x + 1.0) - std::lgamma(a - x + 1.0) - a * std::log(2.0));
        tail = 0.0;
        for (int x = std::min(need, a + 1); x <= a; ++x) tail += pmf[x];
        if (need > a) tail = 0.0;
        std::vector<double> cdf(a + 1, 0.0);
        double acc = 0.0;
        for (int x = 0; x <= a; ++x) {
            if (x >= need && tail > 0.0) acc += pmf[x] / tail;
            cdf[x] = acc;
        }
        return cdf;
    }

    void prepare_filter() {
        double tail_in = 0.0, tail_out = 0.0;
        cdf_in_ = conditional_cdf(params_.a, params_.need_in(), tail_in);
        cdf_out_ = conditional_cdf(params_.a, params_.need_out(), tail_out);
        double block = tail_in * tail_out;
        pass_all_ = block >= 1.0 ? 1.0 : std::exp(params_.b * std::log(block));
        if (block <= 0.0) pass_all_ = 0.0;
    }

    int draw_agreements(const std::vector<double>& cdf, RngStream& rng) const {
        double u = rng.uniform();
        auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
        if (it == cdf.end()) --it;
        return static_cast<int>(it - cdf.begin());
    }

    /// Turn the query label S into S' drawn uniformly among labels passing the filter.
    void perturb_passing(Label& s, RngStream& rng) const {
        const int a = params_.a;
        std::vector<int> idx(a);
        for (int j = 0; j < params_.b; ++j) {
            for (int side = 0; side < 2; ++side) {
                int agree = draw_agreements(side == 0 ? cdf_in_ : cdf_out_, rng);
                int flips = a - agree;
                if (flips == 0) continue;
                std::iota(idx.begin(), idx.end(), 0);
                std::size_t base = static_cast<std::size_t>(j) * 2 * a + side * a;
                for (int f = 0; f < flips; ++f) {
                    int pick = f + static_cast<int>(rng.below(a - f));
                    std::swap(idx[f], idx[pick]);
                    s.set(base + idx[f], !s.get(base + idx[f]));
                }
            }
        }
    }

    void materialize() {
        std::vector<std::unordered_map<Label, std::vector<PointId>, LabelHash>> all(params_.c);
        for (std::uint64_t k = 0; k < params_.c; ++k) all[k] = compute_group(k);
        groups_.emplace(std::move(all));
    }

    std::shared_ptr<const PointSet> points_;
    std::shared_ptr<const std::vector<PointId>> members_;
    std::shared_ptr<const PackedMembers> packed_;
    double r_in_, r_out_;
    BdParams params_;
    std::uint64_t seed_;
    BdOptions opt_;
    double w_in_ = 0.0, w_out_ = 0.0;
    std::vector<double> cdf_in_, cdf_out_;
    double pass_all_ = 0.0;
    std::optional<std::vector<std::unordered_map<Label, std::vector<PointId>, LabelHash>>> groups_;
};

/// Builds the hash families for radii (r_in, r_out) with fuzziness xi and derives parameters.
inline BdParams bd_params_for(double xi, std::size_t n, Profile profile, const BdOverrides& ov,
                              double width_multiplier = 4.0) {
    // Both families have ratio 1+xi, so they share (P1, P2); r_near = 1 by scale invariance.
    auto fam = make_sensitive_family(1.0, 1.0 + xi, width_multiplier);
    return derive_bd_params(xi, n, fam.p1, fam.p2, profile, ov);
}

inline BdIndex create_buckets(std::shared_ptr<const PointSet> points, double xi, double r_in, double r_out,
                              const BdParams& params, std::uint64_t seed, double width_multiplier = 4.0,
                              BdOptions opt = {}) {
    if (!approx_equal(params.xi, xi)) throw std::invalid_argument("xi does not match parameters");
    return BdIndex(std::move(points), nullptr, r_in, r_out, params, seed, width_multiplier, opt);
}

/// R independent BD structures over the same points and radii.
class BoostedBd {
 public:
    BoostedBd() = default;
    BoostedBd(std::shared_ptr<const PointSet> points, std::shared_ptr<const std::vector<PointId>> members,
              double r_in, double r_out, const BdParams& params, int repetitions, std::uint64_t seed,
              double width_multiplier = 4.0, BdOptions opt = {},
              std::shared_ptr<const PackedMembers> packed = nullptr) {
        if (repetitions < 1) throw std::invalid_argument("need at least one repetition");
        reps_.reserve(repetitions);
        for (int r = 0; r < repetitions; ++r) {
            reps_.emplace_back(points, members, r_in, r_out, params, hash_combine(seed, r), width_multiplier, opt,
                               packed);
            if (!packed) packed = reps_.back().packed();
            if (!members) members = reps_.back().members_ptr();
        }
    }

    BdAnswer query(const Ball& b_in, const Ball& b_out, RngStream& rng) const {
        BdAnswer total;
        for (const auto& idx : reps_) {
            BdAnswer a = idx.query(b_in, b_out, rng);
            total.probes += a.probes;
            total.groups += a.groups;
            if (a.point) {
                total.point = a.point;
                break;
            }
        }
        return total;
    }

    std::size_t repetitions() const { return reps_.size(); }
    const BdIndex& rep(std::size_t i) const { return reps_.at(i); }

 private:
    std::vector<BdIndex> reps_;
};

}  // namespace rangeagg
