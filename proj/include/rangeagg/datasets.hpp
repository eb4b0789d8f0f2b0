#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "rangeagg/core.hpp"

namespace rangeagg {

enum class Distribution { uniform_cube, gaussian_clusters, planted_shells };

inline Distribution parse_distribution(const std::string& s) {
    if (s == "uniform" || s == "uniform-cube") return Distribution::uniform_cube;
    if (s == "clusters" || s == "gaussian-clusters") return Distribution::gaussian_clusters;
    if (s == "shells" || s == "planted-shells") return Distribution::planted_shells;
    throw std::invalid_argument("unknown distribution: " + s);
}

struct DatasetSpec {
    std::size_t n = 0;
    std::size_t d = 0;
    Distribution dist = Distribution::uniform_cube;
    std::size_t clusters = 3;  // gaussian clusters
    double sigma = 0.1;        // cluster spread, or shell thickness
    std::uint64_t seed = 1;
};

/// uniform-cube: [0,1]^d. gaussian-clusters: k centers uniform in [0,1]^d with N(0, sigma^2 I)
/// noise. planted-shells: radii alternating between 1 and 2 (plus sigma jitter) around the origin.
inline PointSet generate_dataset(const DatasetSpec& s) {
    if (s.n == 0) throw std::invalid_argument("n must be positive");
    if (s.d == 0) throw std::invalid_argument("d must be positive");
    if (s.dist == Distribution::gaussian_clusters && s.clusters == 0) throw std::invalid_argument("need k >= 1");
    if (!(s.sigma >= 0.0)) throw std::invalid_argument("sigma must be non-negative");
    RngStream rng(s.seed, 0x6e6e);
    std::vector<double> x(s.n * s.d);
    switch (s.dist) {
        case Distribution::uniform_cube:
            for (auto& v : x) v = rng.uniform();
            break;
        case Distribution::gaussian_clusters: {
            std::vector<double> centers(s.clusters * s.d);
            for (auto& v : centers) v = rng.uniform();
            for (std::size_t i = 0; i < s.n; ++i) {
                std::size_t k = rng.below(s.clusters);
                for (std::size_t j = 0; j < s.d; ++j) x[i * s.d + j] = centers[k * s.d + j] + s.sigma * rng.normal();
            }
            break;
        }
        case Distribution::planted_shells:
            for (std::size_t i = 0; i < s.n; ++i) {
                double norm = 0.0;
                for (std::size_t j = 0; j < s.d; ++j) {
                    x[i * s.d + j] = rng.normal();
                    norm += x[i * s.d + j] * x[i * s.d + j];
                }
                norm = std::sqrt(norm);
                double r = (i % 2 == 0 ? 1.0 : 2.0) + s.sigma * (rng.uniform() - 0.5);
                for (std::size_t j = 0; j < s.d; ++j) x[i * s.d + j] *= norm > 0.0 ? r / norm : 0.0;
            }
            break;
    }
    return PointSet(s.d, std::move(x));
}

}  // namespace rangeagg
