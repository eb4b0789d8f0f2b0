#pragma once

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "rangeagg/aggregation_tree.hpp"
#include "rangeagg/aifp_engine.hpp"
#include "rangeagg/core.hpp"

namespace rangeagg {

static_assert(std::endian::native == std::endian::little, "serialization assumes a little-endian host");

/// Malformed or inconsistent input data.
class data_error : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

inline std::uint64_t fnv1a(const void* data, std::size_t len, std::uint64_t h = 0xcbf29ce484222325ULL) {
    auto p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
        h ^= p[i];
        h *= 0x100000001b3ULL;
    }
    return h;
}

inline std::uint64_t fingerprint(const PointSet& P) {
    std::uint64_t n = P.size(), d = P.dim();
    std::uint64_t h = fnv1a(&n, sizeof n);
    h = fnv1a(&d, sizeof d, h);
    return fnv1a(P.coords().data(), P.coords().size() * sizeof(double), h);
}

// ---- datasets ----

inline PointSet read_text_dataset(std::istream& in) {
    std::vector<double> xs;
    std::size_t dim = 0;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        std::istringstream ss(line);
        std::vector<double> row;
        std::string tok;
        while (ss >> tok) {
            std::size_t used = 0;
            double v = 0.0;
            try {
                v = std::stod(tok, &used);
            } catch (const std::exception&) {
                used = 0;
            }
            if (used != tok.size()) throw data_error("line " + std::to_string(lineno) + ": bad number '" + tok + "'");
            row.push_back(v);
        }
        if (row.empty()) continue;
        if (dim == 0) dim = row.size();
        if (row.size() != dim)
            throw data_error("line " + std::to_string(lineno) + ": expected " + std::to_string(dim) + " values");
        xs.insert(xs.end(), row.begin(), row.end());
    }
    if (dim == 0) throw data_error("dataset is empty");
    try {
        return PointSet(dim, std::move(xs));
    } catch (const std::invalid_argument& e) {
        throw data_error(e.what());
    }
}

inline PointSet read_binary_dataset(std::istream& in) {
    std::uint32_t n = 0, d = 0;
    if (!in.read(reinterpret_cast<char*>(&n), 4) || !in.read(reinterpret_cast<char*>(&d), 4))
        throw data_error("truncated binary header");
    if (n == 0 || d == 0) throw data_error("binary dataset has n = 0 or d = 0");
    std::vector<double> xs(static_cast<std::size_t>(n) * d);
    if (!in.read(reinterpret_cast<char*>(xs.data()), static_cast<std::streamsize>(xs.size() * sizeof(double))))
        throw data_error("truncated binary payload");
    try {
        return PointSet(d, std::move(xs));
    } catch (const std::invalid_argument& e) {
        throw data_error(e.what());
    }
}

inline bool looks_binary(const std::string& path) {
    auto ends = [&](const char* s) {
        std::size_t k = std::strlen(s);
        return path.size() >= k && path.compare(path.size() - k, k, s) == 0;
    };
    return ends(".bin") || ends(".f64");
}

inline PointSet read_dataset(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open " + path);
    return looks_binary(path) ? read_binary_dataset(in) : read_text_dataset(in);
}

inline void write_dataset(const PointSet& P, const std::string& path, bool binary) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write " + path);
    if (binary) {
        std::uint32_t n = static_cast<std::uint32_t>(P.size()), d = static_cast<std::uint32_t>(P.dim());
        out.write(reinterpret_cast<const char*>(&n), 4);
        out.write(reinterpret_cast<const char*>(&d), 4);
        out.write(reinterpret_cast<const char*>(P.coords().data()),
                  static_cast<std::streamsize>(P.coords().size() * sizeof(double)));
    } else {
        out.precision(17);
        for (std::size_t i = 0; i < P.size(); ++i) {
            auto p = P[i];
            for (std::size_t j = 0; j < p.size(); ++j) out << (j ? " " : "") << p[j];
            out << '\n';
        }
    }
    if (!out) throw data_error("write failed: " + path);
}

// ---- workload ----

enum class QueryKind { aifp, ameb, bd };

struct QueryRecord {
    QueryKind kind = QueryKind::aifp;
    Ball ball;
    std::vector<double> q;  // aifp
    Ball out_ball;          // bd
    double xi = 0.5;        // bd
    std::uint64_t seed = 0;
};

inline const char* to_string(QueryKind k) {
    switch (k) {
        case QueryKind::aifp: return "aifp";
        case QueryKind::ameb: return "ameb";
        case QueryKind::bd: return "bd";
    }
    return "?";
}

inline QueryRecord parse_record(const std::string& line, std::size_t dim) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::exception& e) {
        throw data_error(std::string("malformed record: ") + e.what());
    }
    auto vec = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_array()) throw data_error(std::string("record lacks array '") + key + "'");
        auto v = j[key].get<std::vector<double>>();
        if (v.size() != dim) throw data_error(std::string("'") + key + "' has wrong dimension");
        return v;
    };
    auto num = [&](const char* key) {
        if (!j.contains(key) || !j[key].is_number()) throw data_error(std::string("record lacks number '") + key + "'");
        return j[key].get<double>();
    };
    QueryRecord r;
    std::string kind = j.value("kind", "");
    if (kind == "aifp")
        r.kind = QueryKind::aifp;
    else if (kind == "ameb")
        r.kind = QueryKind::ameb;
    else if (kind == "bd")
        r.kind = QueryKind::bd;
    else
        throw data_error("unknown record kind '" + kind + "'");
    r.ball.center = vec("center");
    r.ball.radius = num("radius");
    if (!(r.ball.radius > 0.0)) throw data_error("radius must be positive");
    if (r.kind == QueryKind::aifp) r.q = vec("q");
    if (r.kind == QueryKind::bd) {
        r.out_ball.center = vec("out_center");
        r.out_ball.radius = num("out_radius");
        if (!(r.out_ball.radius > 0.0)) throw data_error("out_radius must be positive");
        if (j.contains("xi")) r.xi = num("xi");
        if (!(r.xi > 0.0)) throw data_error("xi must be positive");
    }
    if (j.contains("seed")) r.seed = j["seed"].get<std::uint64_t>();
    return r;
}

inline std::string format_record(const QueryRecord& r) {
    nlohmann::json j;
    j["kind"] = to_string(r.kind);
    j["center"] = r.ball.center;
    j["radius"] = r.ball.radius;
    if (r.kind == QueryKind::aifp) j["q"] = r.q;
    if (r.kind == QueryKind::bd) {
        j["out_center"] = r.out_ball.center;
        j["out_radius"] = r.out_ball.radius;
        j["xi"] = r.xi;
    }
    j["seed"] = r.seed;
    return j.dump();
}

// ---- manifest ----

inline constexpr char kManifestMagic[8] = {'R', 'A', 'G', 'G', 'M', 'N', 'F', '1'};
inline constexpr std::uint32_t kManifestVersion = 1;

class ByteWriter {
 public:
    template <class T>
    void put(const T& v) {
        static_assert(std::is_trivially_copyable_v<T>);
        auto p = reinterpret_cast<const char*>(&v);
        buf_.insert(buf_.end(), p, p + sizeof(T));
    }
    void bytes(const void* p, std::size_t n) {
        auto c = static_cast<const char*>(p);
        buf_.insert(buf_.end(), c, c + n);
    }
    void section(const char tag[4], const ByteWriter& body) {
        bytes(tag, 4);
        put<std::uint64_t>(body.buf_.size());
        bytes(body.buf_.data(), body.buf_.size());
    }
    const std::vector<char>& data() const { return buf_; }

 private:
    std::vector<char> buf_;
};

class ByteReader {
 public:
    ByteReader(const char* p, std::size_t n) : p_(p), n_(n) {}
    template <class T>
    T get() {
        T v;
        need(sizeof(T));
        std::memcpy(&v, p_ + off_, sizeof(T));
        off_ += sizeof(T);
        return v;
    }
    void read(void* dst, std::size_t n) {
        need(n);
        std::memcpy(dst, p_ + off_, n);
        off_ += n;
    }
    ByteReader sub(std::size_t n) {
        need(n);
        ByteReader r(p_ + off_, n);
        off_ += n;
        return r;
    }
    bool done() const { return off_ == n_; }

 private:
    void need(std::size_t n) const {
        if (off_ + n > n_) throw data_error("manifest truncated");
    }
    const char* p_;
    std::size_t n_;
    std::size_t off_ = 0;
};

struct Manifest {
    GlobalConfig config;
    std::shared_ptr<const PointSet> points;
    std::shared_ptr<const AggregationTree> tree;
    std::uint64_t data_fingerprint = 0;
    std::vector<double> stored_params;  // PARM section, in encode order
    std::vector<long long> stored_lo, stored_hi;
};

inline std::vector<char> encode_manifest(const AifpIndex& idx) {
    const auto& cfg = idx.config();
    const auto& P = idx.points();
    const auto& T = idx.tree();
    ByteWriter conf;
    conf.put(cfg.eps);
    conf.put(cfg.gamma);
    conf.put(cfg.delta);
    conf.put<std::uint8_t>(cfg.profile == Profile::theory);
    conf.put<std::uint64_t>(cfg.seed);
    conf.put<std::uint32_t>(cfg.threads);
    const auto& ov = cfg.overrides;
    conf.put<std::uint8_t>(ov.lambda.has_value());
    conf.put(ov.lambda.value_or(0.0));
    conf.put<std::uint8_t>(ov.a.has_value());
    conf.put<std::int32_t>(ov.a.value_or(0));
    conf.put<std::uint8_t>(ov.b.has_value());
    conf.put<std::int32_t>(ov.b.value_or(0));
    auto put_opt = [&](const std::optional<double>& v) {
        conf.put<std::uint8_t>(v.has_value());
        conf.put(v.value_or(0.0));
    };
    put_opt(ov.gap);
    put_opt(ov.sub_eps);
    put_opt(ov.sub_gamma);
    put_opt(ov.eps0);
    put_opt(ov.w);
    conf.put(ov.c_multiplier);
    conf.put(ov.width_multiplier);
    conf.put(ov.c_cap);
    conf.put(ov.theory_c_limit);

    ByteWriter data;
    data.put<std::uint32_t>(static_cast<std::uint32_t>(P.size()));
    data.put<std::uint32_t>(static_cast<std::uint32_t>(P.dim()));
    data.put<std::uint64_t>(fingerprint(P));
    data.bytes(P.coords().data(), P.coords().size() * sizeof(double));

    ByteWriter tree;
    tree.put<std::uint32_t>(static_cast<std::uint32_t>(T.num_nodes()));
    for (const auto& nd : T.nodes()) {
        tree.put(nd.parent);
        tree.put(nd.left);
        tree.put(nd.right);
        tree.put(nd.size);
        tree.put(nd.merge);
        tree.put(nd.rep);
        tree.put(nd.begin);
        tree.put(nd.end);
    }
    tree.bytes(T.leaf_order().data(), T.leaf_order().size() * sizeof(PointId));

    const auto& pr = idx.params();
    ByteWriter parm;
    parm.put(pr.lambda);
    parm.put(pr.Delta);
    parm.put(pr.gap);
    parm.put(double(pr.gamma_l));
    parm.put(double(pr.gamma_r));
    parm.put(double(pr.big_gamma));
    parm.put(pr.sub_eps);
    parm.put(pr.sub_gamma);
    parm.put(pr.sub_delta);

    const auto& cov = idx.multiscale().cover();
    ByteWriter buck;
    buck.put<std::uint64_t>(cov.lo.size());
    buck.bytes(cov.lo.data(), cov.lo.size() * sizeof(long long));
    buck.bytes(cov.hi.data(), cov.hi.size() * sizeof(long long));

    ByteWriter ann;
    ann.put<std::uint8_t>(0);  // exact scan

    ByteWriter body;
    body.section("CONF", conf);
    body.section("DATA", data);
    body.section("TREE", tree);
    body.section("PARM", parm);
    body.section("BUCK", buck);
    body.section("ANN ", ann);

    ByteWriter file;
    file.bytes(kManifestMagic, 8);
    file.put<std::uint32_t>(kManifestVersion);
    file.put<std::uint64_t>(fnv1a(body.data().data(), body.data().size()));
    file.bytes(body.data().data(), body.data().size());
    return file.data();
}

inline void save_manifest(const AifpIndex& idx, const std::string& path) {
    auto bytes = encode_manifest(idx);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw data_error("cannot write " + path);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw data_error("write failed: " + path);
}

inline Manifest decode_manifest(const std::vector<char>& bytes) {
    ByteReader r(bytes.data(), bytes.size());
    char magic[8];
    r.read(magic, 8);
    if (std::memcmp(magic, kManifestMagic, 8) != 0) throw data_error("not a manifest file");
    auto version = r.get<std::uint32_t>();
    if (version != kManifestVersion)
        throw data_error("unsupported manifest version " + std::to_string(version));
    auto sum = r.get<std::uint64_t>();
    const std::size_t head = 8 + 4 + 8;
    if (fnv1a(bytes.data() + head, bytes.size() - head) != sum) throw data_error("manifest checksum mismatch");

    Manifest m;
    std::optional<ByteReader> conf, data, tree, parm, buck;
    while (!r.done()) {
        char tag[5] = {0};
        r.read(tag, 4);
        auto len = r.get<std::uint64_t>();
        auto body = r.sub(len);
        std::string t(tag);
        if (t == "CONF") conf.emplace(body);
        else if (t == "DATA") data.emplace(body);
        else if (t == "TREE") tree.emplace(body);
        else if (t == "PARM") parm.emplace(body);
        else if (t == "BUCK") buck.emplace(body);
    }
    if (!conf || !data || !tree) throw data_error("manifest lacks a required section");

    auto& c = m.config;
    c.eps = conf->get<double>();
    c.gamma = conf->get<double>();
    c.delta = conf->get<double>();
    c.profile = conf->get<std::uint8_t>() ? Profile::theory : Profile::practical;
    c.seed = conf->get<std::uint64_t>();
    c.threads = conf->get<std::uint32_t>();
    bool has = conf->get<std::uint8_t>();
    double lam = conf->get<double>();
    if (has) c.overrides.lambda = lam;
    has = conf->get<std::uint8_t>();
    auto a = conf->get<std::int32_t>();
    if (has) c.overrides.a = a;
    has = conf->get<std::uint8_t>();
    auto b = conf->get<std::int32_t>();
    if (has) c.overrides.b = b;
    auto get_opt = [&](std::optional<double>& v) {
        bool set = conf->get<std::uint8_t>();
        double x = conf->get<double>();
        if (set) v = x;
    };
    get_opt(c.overrides.gap);
    get_opt(c.overrides.sub_eps);
    get_opt(c.overrides.sub_gamma);
    get_opt(c.overrides.eps0);
    get_opt(c.overrides.w);
    c.overrides.c_multiplier = conf->get<double>();
    c.overrides.width_multiplier = conf->get<double>();
    c.overrides.c_cap = conf->get<double>();
    c.overrides.theory_c_limit = conf->get<double>();

    auto n = data->get<std::uint32_t>();
    auto d = data->get<std::uint32_t>();
    m.data_fingerprint = data->get<std::uint64_t>();
    std::vector<double> xs(static_cast<std::size_t>(n) * d);
    data->read(xs.data(), xs.size() * sizeof(double));
    m.points = std::make_shared<const PointSet>(d, std::move(xs));
    if (fingerprint(*m.points) != m.data_fingerprint) throw data_error("embedded dataset fingerprint mismatch");

    auto count = tree->get<std::uint32_t>();
    std::vector<TreeNode> nodes(count);
    for (auto& nd : nodes) {
        nd.parent = tree->get<NodeId>();
        nd.left = tree->get<NodeId>();
        nd.right = tree->get<NodeId>();
        nd.size = tree->get<double>();
        nd.merge = tree->get<double>();
        nd.rep = tree->get<PointId>();
        nd.begin = tree->get<std::uint32_t>();
        nd.end = tree->get<std::uint32_t>();
    }
    std::vector<PointId> order(n);
    tree->read(order.data(), order.size() * sizeof(PointId));
    try {
        m.tree = std::make_shared<const AggregationTree>(n, std::move(nodes), std::move(order));
    } catch (const std::invalid_argument& e) {
        throw data_error(e.what());
    }
    if (parm) {
        while (!parm->done()) m.stored_params.push_back(parm->get<double>());
    }
    if (buck) {
        auto k = buck->get<std::uint64_t>();
        if (k != m.tree->num_nodes()) throw data_error("bucket table size mismatch");
        m.stored_lo.resize(k);
        m.stored_hi.resize(k);
        buck->read(m.stored_lo.data(), k * sizeof(long long));
        buck->read(m.stored_hi.data(), k * sizeof(long long));
    }
    return m;
}

inline Manifest load_manifest_bytes(const std::string& path, std::vector<char>& bytes) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open " + path);
    bytes.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    return decode_manifest(bytes);
}

inline Manifest load_manifest(const std::string& path) {
    std::vector<char> bytes;
    return load_manifest_bytes(path, bytes);
}

/// Rebuilds the index from a manifest and checks that the stored derived state matches.
inline std::unique_ptr<AifpIndex> index_from_manifest(const Manifest& m) {
    std::unique_ptr<AifpIndex> idx;
    try {
        idx = std::make_unique<AifpIndex>(m.points, m.config, m.tree);
    } catch (const std::invalid_argument& e) {
        throw data_error(std::string("manifest rejected: ") + e.what());
    }
    const auto& pr = idx->params();
    const std::vector<double> now = {pr.lambda,   pr.Delta,   pr.gap,     double(pr.gamma_l), double(pr.gamma_r),
                                     double(pr.big_gamma), pr.sub_eps, pr.sub_gamma, pr.sub_delta};
    if (!m.stored_params.empty() && m.stored_params != now) throw data_error("stored parameters do not match");
    const auto& cov = idx->multiscale().cover();
    if (!m.stored_lo.empty() && (m.stored_lo != cov.lo || m.stored_hi != cov.hi))
        throw data_error("stored bucket intervals do not match");
    return idx;
}

}  // namespace rangeagg
