#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cnm/series.hpp"

namespace testutil {

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double sd = 1.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, sd);
    std::vector<double> out(n);
    for (auto& v : out) v = d(rng);
    return out;
}

inline cnm::MultivariateSeries make_series(const std::vector<std::vector<double>>& channels, double dt = 1.0) {
    std::vector<std::string> names;
    for (std::size_t k = 0; k < channels.size(); ++k) names.push_back("c" + std::to_string(k));
    return cnm::MultivariateSeries::from_channels(names, dt, channels);
}

inline cnm::MarkerSeries make_marker(const std::vector<double>& values, double dt = 1.0, double t0 = 0.0) {
    cnm::MarkerSeries m;
    for (std::size_t k = 0; k < values.size(); ++k) {
        m.times.push_back(t0 + dt * static_cast<double>(k));
        m.values.push_back(values[k]);
    }
    return m;
}

/// target_{t+1} = a·target_t + c·source_t + noise.
inline std::pair<std::vector<double>, std::vector<double>> ar_pair(std::size_t n, double a, double c, double noise_sd,
                                                                  std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> d(0.0, 1.0);
    std::vector<double> src(n), tgt(n);
    for (auto& v : src) v = d(rng);
    tgt[0] = 0.0;
    for (std::size_t t = 0; t + 1 < n; ++t) tgt[t + 1] = a * tgt[t] + c * src[t] + noise_sd * d(rng);
    return {src, tgt};
}

}  // namespace testutil
