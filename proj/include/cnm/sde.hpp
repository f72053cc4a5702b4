#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "cnm/error.hpp"
#include "cnm/series.hpp"

namespace cnm {

/// Drift signature shared by every model: writes dx/dt for state x into out.
using DriftFn = std::function<void(std::span<const double> x, std::span<double> out)>;

/// Additive-noise Euler–Maruyama stepper for dx = f(x) dt + Γ dt with
/// <Γ_i(t) Γ_j(t')> = 2D δ_ij δ(t - t'). Each step adds an independent normal
/// increment of variance 2D·h per component. The generator is owned here and
/// never shared.
class EulerMaruyama {
public:
    EulerMaruyama(std::size_t dimension, double noise_amplitude, double h, std::uint64_t seed)
        : rng_(seed), sigma_(std::sqrt(2.0 * noise_amplitude * h)), h_(h), rate_(dimension) {
        if (!(h > 0.0)) throw ConfigError("integration step must be positive");
        if (noise_amplitude < 0.0) throw ConfigError("noise amplitude must be non-negative");
    }

    template <class Drift>
    void step(std::span<double> x, Drift&& drift) {
        drift(std::span<const double>(x), std::span<double>(rate_));
        for (std::size_t i = 0; i < x.size(); ++i) {
            x[i] += rate_[i] * h_;
            if (sigma_ > 0.0) x[i] += sigma_ * normal_(rng_);
        }
    }

    double h() const noexcept { return h_; }
    std::mt19937_64& rng() noexcept { return rng_; }

private:
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    double sigma_;
    double h_;
    std::vector<double> rate_;
};

inline bool all_finite(std::span<const double> x) {
    for (double v : x) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

struct SdeSpec {
    std::size_t dimension = 1;
    DriftFn drift;
    double noise_amplitude = 0.0;  // D
    std::vector<double> initial;
    double dt = 0.01;
    std::size_t steps = 0;
    std::uint64_t seed = 1;
    std::vector<std::string> names;  // defaults to x1..xn
};

/// Integrates `steps` steps and records the state after each one.
inline MultivariateSeries euler_maruyama(const SdeSpec& spec) {
    if (spec.initial.size() != spec.dimension) throw ConfigError("initial state has the wrong dimension");
    if (!spec.drift) throw ConfigError("no drift supplied");
    std::vector<std::string> names = spec.names;
    if (names.empty()) {
        for (std::size_t i = 0; i < spec.dimension; ++i) names.push_back("x" + std::to_string(i + 1));
    }
    EulerMaruyama em(spec.dimension, spec.noise_amplitude, spec.dt, spec.seed);
    std::vector<double> x = spec.initial;
    std::vector<double> data(spec.dimension * spec.steps);
    for (std::size_t t = 0; t < spec.steps; ++t) {
        em.step(x, spec.drift);
        if (!all_finite(x)) throw DivergenceError("state became non-finite", t);
        for (std::size_t i = 0; i < spec.dimension; ++i) data[i * spec.steps + t] = x[i];
    }
    return MultivariateSeries(std::move(names), spec.dt, std::move(data), spec.dt);
}

/// SplitMix64 finaliser; derives independent per-item seeds from one master seed.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

}  // namespace cnm
