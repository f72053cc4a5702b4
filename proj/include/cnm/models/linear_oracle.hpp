#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cnm/error.hpp"
#include "cnm/series.hpp"

namespace cnm {

/// Diagonal linear system Y_{t+1} = Λ Y_t + ξ_t observed through X = S Y.
/// Mode 1 carries λ_max. In the default fixture x1, x2 load on mode 1 and
/// x3, x4 do not (first column of S is (1, 0.9, 0, 0)).
struct LinearOracleConfig {
    Eigen::MatrixXd S = (Eigen::MatrixXd(4, 4) << 1.0, 0.8, -0.1, 1.0,   //
                         0.9, 0.3, -0.3, -0.9,                            //
                         0.0, -0.7, 0.5, 0.9,                             //
                         0.0, -0.4, -0.8, -0.6)
                            .finished();
    std::vector<double> eigenvalues{0.9, 0.6, 0.3, -0.4};
    std::vector<double> noise_sd{1.0, 1.0, 1.0, 1.0};
    std::size_t steps = 200000;
    std::uint64_t seed = 1;
    /// Start each mode from a draw of its stationary distribution.
    bool stationary_start = true;

    std::size_t n() const { return eigenvalues.size(); }
    double lambda_max() const { return eigenvalues.empty() ? 0.0 : eigenvalues.front(); }
    void set_lambda_max(double v) {
        if (eigenvalues.empty()) throw ConfigError("no eigenvalues configured");
        eigenvalues.front() = v;
    }
};

inline void validate(const LinearOracleConfig& c) {
    const auto n = static_cast<Eigen::Index>(c.n());
    if (n < 1) throw ConfigError("linear oracle needs at least one mode");
    if (c.S.rows() != n || c.S.cols() != n) throw ConfigError("S must be n x n");
    if (c.noise_sd.size() != c.n()) throw ConfigError("noise_sd needs one entry per mode");
    for (double l : c.eigenvalues) {
        if (!(std::abs(l) < 1.0)) throw ConfigError("every |lambda| must be < 1");
    }
    if (!(c.lambda_max() > 0.0)) throw ConfigError("lambda_max must lie in (0, 1)");
    for (std::size_t k = 1; k < c.n(); ++k) {
        if (std::abs(c.eigenvalues[k]) >= c.lambda_max()) throw ConfigError("lambda_1 must be the dominant eigenvalue");
    }
    for (double s : c.noise_sd) {
        if (s < 0.0) throw ConfigError("noise sd must be non-negative");
    }
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(c.S);
    const auto& sv = svd.singularValues();
    if (!(sv(n - 1) > 0.0) || sv(0) / sv(n - 1) >= 1e8) throw ConfigError("S is singular or badly conditioned");
    if (c.steps < 1) throw ConfigError("steps must be at least 1");
}

inline MultivariateSeries simulate_linear_oracle(const LinearOracleConfig& cfg) {
    validate(cfg);
    const std::size_t n = cfg.n();
    std::mt19937_64 rng(cfg.seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::vector<double> y(n, 0.0);
    if (cfg.stationary_start) {
        for (std::size_t k = 0; k < n; ++k) {
            const double l = cfg.eigenvalues[k];
            y[k] = cfg.noise_sd[k] / std::sqrt(1.0 - l * l) * normal(rng);
        }
    }
    std::vector<double> data(n * cfg.steps);
    for (std::size_t t = 0; t < cfg.steps; ++t) {
        for (std::size_t k = 0; k < n; ++k) y[k] = cfg.eigenvalues[k] * y[k] + cfg.noise_sd[k] * normal(rng);
        for (std::size_t i = 0; i < n; ++i) {
            double x = 0.0;
            for (std::size_t k = 0; k < n; ++k) x += cfg.S(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) * y[k];
            data[i * cfg.steps + t] = x;
        }
    }
    std::vector<std::string> names;
    for (std::size_t i = 0; i < n; ++i) names.push_back("x" + std::to_string(i + 1));
    return MultivariateSeries(std::move(names), 1.0, std::move(data), 1.0);
}

}  // namespace cnm
