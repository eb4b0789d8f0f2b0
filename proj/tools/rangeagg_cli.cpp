// rangeagg: dataset generation, index build/persistence, queries, validation and timing.
//
//   rangeagg gen --n 2000 --d 16 --dist clusters --seed 7 -o pts.txt
//   rangeagg make-workload --data pts.txt --kind aifp --count 200 -o q.jsonl
//   rangeagg build --data pts.txt -o idx.ragg --eps 0.3 --gamma 0.3
//   rangeagg query --manifest idx.ragg --workload q.jsonl
//   rangeagg validate --manifest idx.ragg --data pts.txt --workload q.jsonl
//   rangeagg bench --manifest idx.ragg --workload q.jsonl
//
// Exit codes: 0 ok, 1 usage, 2 data error, 3 capacity refusal.
#include <algorithm>
#include <atomic>
#include <chrono>
#include <fstream>
#include <iostream>
#include <mutex>
#include <thread>

#include <CLI11.hpp>
#include <json.hpp>

#include "rangeagg/rangeagg.hpp"

using namespace rangeagg;
using json = nlohmann::json;

namespace {

struct ConfigFlags {
    std::string profile = "practical";
    double eps = 0.3, gamma = 0.3, delta = 0.2;
    std::uint64_t seed = 1;
    std::optional<double> lambda, width, eps0, w;
    std::optional<int> a, b;
    double c_mult = 4.0;
    unsigned threads = 1;

    void add(CLI::App* app) {
        app->add_option("--profile", profile, "theory | practical")->check(CLI::IsMember({"theory", "practical"}));
        app->add_option("--eps", eps);
        app->add_option("--gamma", gamma);
        app->add_option("--delta", delta);
        app->add_option("--seed", seed);
        app->add_option("--lambda-override", lambda);
        app->add_option("--a-override", a);
        app->add_option("--b-override", b, "BD blocks per label");
        app->add_option("--c-multiplier", c_mult);
        app->add_option("--width-multiplier", width, "LSH bucket width as a multiple of the near radius");
        app->add_option("--eps0-override", eps0, "AMEB convergence threshold");
        app->add_option("--w-override", w, "AMEB iteration bound");
    }

    GlobalConfig config() const {
        GlobalConfig c;
        c.profile = parse_profile(profile);
        c.eps = eps;
        c.gamma = gamma;
        c.delta = delta;
        c.seed = seed;
        c.threads = threads;
        c.overrides.lambda = lambda;
        c.overrides.a = a;
        c.overrides.b = b;
        c.overrides.c_multiplier = c_mult;
        if (width) c.overrides.width_multiplier = *width;
        c.overrides.eps0 = eps0;
        c.overrides.w = w;
        c.validate();
        return c;
    }
};

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw data_error("cannot open " + path);
    std::vector<std::string> lines;
    for (std::string s; std::getline(in, s);)
        if (s.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(s);
    return lines;
}

struct Parsed {
    std::optional<QueryRecord> rec;
    std::string error;
};

std::vector<Parsed> parse_workload(const std::string& path, std::size_t dim) {
    std::vector<Parsed> out;
    for (const auto& line : read_lines(path)) {
        Parsed p;
        try {
            p.rec = parse_record(line, dim);
        } catch (const data_error& e) {
            p.error = e.what();
        }
        out.push_back(std::move(p));
    }
    return out;
}

struct Outcome {
    std::optional<RecordResult> res;
    std::string error;
};

/// Runs every parsed record on a small worker pool; results keep record order.
std::vector<Outcome> run_all(const Session& s, const std::vector<Parsed>& recs, unsigned threads) {
    std::vector<Outcome> out(recs.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next++) < recs.size();) {
            if (!recs[k].rec) {
                out[k].error = recs[k].error;
                continue;
            }
            try {
                out[k].res = s.run(*recs[k].rec, k);
            } catch (const capacity_error&) {
                throw;
            } catch (const std::exception& e) {
                out[k].error = e.what();
            }
        }
    };
    std::vector<std::thread> pool;
    std::exception_ptr failure;
    std::mutex mu;
    for (unsigned t = 0; t < std::max(1u, threads); ++t)
        pool.emplace_back([&] {
            try {
                worker();
            } catch (...) {
                std::lock_guard<std::mutex> lk(mu);
                failure = std::current_exception();
                next = recs.size();
            }
        });
    for (auto& th : pool) th.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

std::shared_ptr<const AifpIndex> open_index(const std::string& path, unsigned threads) {
    auto m = load_manifest(path);
    m.config.threads = threads;
    return index_from_manifest(m);
}

double median(std::vector<double> v) {
    if (v.empty()) return 0.0;
    std::sort(v.begin(), v.end());
    std::size_t h = v.size() / 2;
    return v.size() % 2 ? v[h] : 0.5 * (v[h - 1] + v[h]);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Range-aggregate queries: approximate in-range farthest point and minimum enclosing ball"};
    app.require_subcommand(1);

    // gen
    DatasetSpec ds;
    std::string dist = "uniform", gen_out;
    bool gen_binary = false;
    auto* gen = app.add_subcommand("gen", "Generate a synthetic dataset");
    gen->add_option("--n", ds.n)->required();
    gen->add_option("--d", ds.d)->required();
    gen->add_option("--dist", dist, "uniform | clusters | shells");
    gen->add_option("--clusters", ds.clusters);
    gen->add_option("--sigma", ds.sigma);
    gen->add_option("--seed", ds.seed);
    gen->add_option("-o,--out", gen_out)->required();
    gen->add_flag("--binary", gen_binary, "write u32 n, u32 d, f64 coordinates");

    // make-workload
    WorkloadSpec ws;
    std::string wl_data, wl_out, wl_kind = "aifp";
    auto* mkw = app.add_subcommand("make-workload", "Generate seeded query records for a dataset");
    mkw->add_option("--data", wl_data)->required();
    mkw->add_option("--kind", wl_kind)->check(CLI::IsMember({"aifp", "ameb", "bd"}));
    mkw->add_option("--count", ws.count);
    mkw->add_option("--seed", ws.seed);
    mkw->add_option("--r-min", ws.r_min);
    mkw->add_option("--r-max", ws.r_max);
    mkw->add_option("--far-fraction", ws.far_fraction);
    mkw->add_option("--align-lambda", ws.lambda, "snap a quarter of the radii to this grid");
    mkw->add_option("--xi", ws.xi);
    mkw->add_option("-o,--out", wl_out)->required();

    // build
    ConfigFlags bf;
    std::string b_data, b_out;
    auto* build = app.add_subcommand("build", "Build an index and write its manifest");
    build->add_option("--data", b_data)->required();
    build->add_option("-o,--out", b_out)->required();
    bf.add(build);
    build->add_option("--threads", bf.threads);

    // query / validate / bench share these
    std::string m_path, w_path, v_data, q_out;
    unsigned threads = 1;
    std::size_t trials = 1;
    auto* query = app.add_subcommand("query", "Answer a workload, one JSON line per record");
    query->add_option("--manifest", m_path)->required();
    query->add_option("--workload", w_path)->required();
    query->add_option("-o,--out", q_out);
    query->add_option("--threads", threads);

    auto* validate = app.add_subcommand("validate", "Check answers against the brute-force oracles");
    validate->add_option("--manifest", m_path)->required();
    validate->add_option("--data", v_data)->required();
    validate->add_option("--workload", w_path)->required();
    validate->add_option("--trials", trials, "passes over the workload, each with fresh record seeds");
    validate->add_option("--threads", threads);

    auto* bench = app.add_subcommand("bench", "Time a workload");
    bench->add_option("--manifest", m_path)->required();
    bench->add_option("--workload", w_path)->required();
    bench->add_option("--threads", threads);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return e.get_exit_code() == 0 ? 0 : 1;
    }

    try {
        if (*gen) {
            ds.dist = parse_distribution(dist);
            auto P = generate_dataset(ds);
            write_dataset(P, gen_out, gen_binary);
            std::cout << json{{"n", P.size()}, {"d", P.dim()}, {"fingerprint", fingerprint(P)}}.dump() << "\n";
        } else if (*mkw) {
            auto P = read_dataset(wl_data);
            ws.kind = wl_kind == "aifp" ? QueryKind::aifp : wl_kind == "ameb" ? QueryKind::ameb : QueryKind::bd;
            std::ofstream out(wl_out);
            if (!out) throw data_error("cannot write " + wl_out);
            for (const auto& r : make_workload(P, ws)) out << format_record(r) << "\n";
        } else if (*build) {
            auto cfg = bf.config();
            auto P = std::make_shared<const PointSet>(read_dataset(b_data));
            auto t0 = std::chrono::steady_clock::now();
            AifpIndex idx(P, cfg);
            save_manifest(idx, b_out);
            double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            const auto& pr = idx.params();
            const auto& cov = idx.multiscale().cover();
            double nodes = static_cast<double>(idx.tree().num_nodes());
            double span = std::log(pr.Delta * scale_power(pr.lambda, pr.big_gamma) / pr.lambda) / std::log1p(pr.lambda);
            json j{{"n", P->size()},
                   {"d", P->dim()},
                   {"profile", to_string(cfg.profile)},
                   {"lambda", pr.lambda},
                   {"Gamma", pr.big_gamma},
                   {"gap", pr.gap},
                   {"sub_eps", pr.sub_eps},
                   {"sub_gamma", pr.sub_gamma},
                   {"tree_nodes", idx.tree().num_nodes()},
                   {"bucket_memberships", cov.total_memberships()},
                   {"membership_budget", nodes * (span + 1.0)},
                   {"build_seconds", secs},
                   {"manifest", b_out}};
            std::cout << j.dump() << "\n";
        } else if (*query || *bench) {
            Session s(open_index(m_path, threads));
            auto recs = parse_workload(w_path, s.index().points().dim());
            auto t0 = std::chrono::steady_clock::now();
            auto res = run_all(s, recs, threads);
            double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            if (*query) {
                std::ofstream file;
                if (!q_out.empty()) {
                    file.open(q_out);
                    if (!file) throw data_error("cannot write " + q_out);
                }
                std::ostream& out = q_out.empty() ? std::cout : file;
                for (std::size_t k = 0; k < res.size(); ++k) {
                    if (res[k].res)
                        out << result_json(*res[k].res, k).dump() << "\n";
                    else
                        out << json{{"index", k}, {"error", res[k].error}}.dump() << "\n";
                }
            } else {
                std::vector<double> secs, probes;
                std::size_t errors = 0;
                for (const auto& o : res) {
                    if (!o.res) {
                        ++errors;
                        continue;
                    }
                    secs.push_back(o.res->seconds);
                    probes.push_back(static_cast<double>(o.res->probes));
                }
                std::cout << json{{"records", res.size()},
                                  {"errors", errors},
                                  {"wall_seconds", wall},
                                  {"median_seconds", median(secs)},
                                  {"max_seconds", secs.empty() ? 0.0 : *std::max_element(secs.begin(), secs.end())},
                                  {"median_probes", median(probes)}}
                                 .dump()
                          << "\n";
            }
        } else if (*validate) {
            auto idx = open_index(m_path, threads);
            auto P = read_dataset(v_data);
            if (fingerprint(P) != fingerprint(idx->points())) throw data_error("dataset does not match the manifest");
            Session s(idx);
            auto recs = parse_workload(w_path, P.dim());
            std::size_t total = 0, answered = 0, valid_answers = 0, successes = 0, errors = 0;
            std::vector<double> probes;
            for (std::size_t t = 0; t < trials; ++t) {
                auto pass = recs;
                for (auto& p : pass)
                    if (p.rec) p.rec->seed = hash_combine(p.rec->seed, t);
                auto res = run_all(s, pass, threads);
                for (std::size_t k = 0; k < res.size(); ++k) {
                    if (!res[k].res) {
                        ++errors;
                        continue;
                    }
                    const auto& r = *res[k].res;
                    bool ok = s.validate(*pass[k].rec, r);
                    ++total;
                    successes += ok;
                    if (r.point || r.ball) {
                        ++answered;
                        valid_answers += ok;
                    }
                    probes.push_back(static_cast<double>(r.probes));
                }
            }
            json j{{"trials", trials}, {"queries", total}, {"errors", errors}};
            if (total > 0) {
                auto ci = wilson_interval(successes, total);
                j["success_rate"] = static_cast<double>(successes) / static_cast<double>(total);
                j["success_ci95"] = {ci.lo, ci.hi};
                j["non_null"] = answered;
                j["conditional_validity"] =
                    answered ? static_cast<double>(valid_answers) / static_cast<double>(answered) : 1.0;
                j["median_probes"] = median(probes);
                j["max_probes"] = *std::max_element(probes.begin(), probes.end());
            }
            std::cout << j.dump() << "\n";
        }
    } catch (const capacity_error& e) {
        std::cerr << "capacity: " << e.what() << "\n";
        return 3;
    } catch (const data_error& e) {
        std::cerr << "data: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "usage: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
