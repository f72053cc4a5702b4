#pragma once

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cnm/error.hpp"
#include "cnm/sde.hpp"
#include "cnm/series.hpp"

namespace cnm {

/// Five-gene regulatory circuit driven by the bifurcation parameter P. The
/// unique stable steady state is (1, 0, 1, 3, 2) for every P != 0.
struct GeneticConfig {
    double P = -2.0;
    /// When set, P is ramped linearly from `P` to `P_end` over the recorded steps.
    std::optional<double> P_end;
    double D = 1e-4;
    double dt = 0.01;  // sampling interval
    /// Euler substeps per sample. The drift's fastest eigenvalue is about -201,
    /// so a single Euler step of 0.01 is unstable; the explicit scheme also
    /// inflates a mode's stationary variance by 1/(1 - |λ|h/2).
    std::size_t substeps = 50;
    std::size_t steps = 100000;
    std::size_t burn_in = 0;
    std::uint64_t seed = 1;
};

inline constexpr std::array<double, 5> kGeneticSteadyState{1.0, 0.0, 1.0, 3.0, 2.0};
inline constexpr double kGeneticZ1Guard = 0.55;

template <class Out>
void genetic_drift(std::span<const double> z, double P, Out&& f) {
    const double p = std::abs(P);
    const double z1 = z[0], z2 = z[1], z3 = z[2], z4 = z[3], z5 = z[4];
    f[0] = (90.0 * p - 1236.0) + (240.0 - 120.0 * p) / (1.0 + z3) + 1488.0 * z4 / (1.0 + z4) - 30.0 * p * z1;
    f[1] = (75.0 * p - 150.0) + (60.0 - 30.0 * p) / (4.0 * z1 - 2.0) + (240.0 - 120.0 * p) * z3 / (1.0 + z3) -
           60.0 * z2;
    f[2] = -1056.0 + 1488.0 * z4 / (1.0 + z4) - 60.0 * z3;
    f[3] = -600.0 + 1350.0 * z5 / (1.0 + z5) - 100.0 * z4;
    f[4] = 108.0 + 160.0 / (1.0 + z1) + 40.0 / (1.0 + z2) + 1488.0 / (1.0 + z4) - 300.0 * z5;
}

inline void validate(const GeneticConfig& c) {
    if (!(std::abs(c.P) > 0.0)) throw ConfigError("genetic model needs |P| > 0");
    if (c.P_end && !(std::abs(*c.P_end) > 0.0)) throw ConfigError("genetic ramp end needs |P| > 0");
    if (!(c.dt > 0.0)) throw ConfigError("dt must be positive");
    if (c.substeps < 1) throw ConfigError("substeps must be at least 1");
    if (c.D < 0.0) throw ConfigError("noise amplitude must be non-negative");
    if (c.steps < 1) throw ConfigError("steps must be at least 1");
}

inline MultivariateSeries simulate_genetic(const GeneticConfig& cfg) {
    validate(cfg);
    EulerMaruyama em(5, cfg.D, cfg.dt / static_cast<double>(cfg.substeps), cfg.seed);
    std::vector<double> z(kGeneticSteadyState.begin(), kGeneticSteadyState.end());
    std::vector<double> data(5 * cfg.steps);
    const std::size_t total = cfg.burn_in + cfg.steps;
    for (std::size_t t = 0; t < total; ++t) {
        double P = cfg.P;
        if (cfg.P_end && t >= cfg.burn_in && cfg.steps > 1) {
            const double frac = static_cast<double>(t - cfg.burn_in) / static_cast<double>(cfg.steps - 1);
            P = cfg.P + (*cfg.P_end - cfg.P) * frac;
        }
        for (std::size_t k = 0; k < cfg.substeps; ++k) {
            em.step(z, [P](std::span<const double> x, std::span<double> out) { genetic_drift(x, P, out); });
        }
        if (!all_finite(z)) throw DivergenceError("genetic state became non-finite", t);
        if (z[0] <= kGeneticZ1Guard) throw SingularityError("z1 fell to the 1/(4 z1 - 2) singularity guard", t);
        for (std::size_t i = 1; i < 5; ++i) {
            if (z[i] <= -0.9) throw SingularityError("z" + std::to_string(i + 1) + " approached the 1/(1 + z) pole", t);
        }
        if (t < cfg.burn_in) continue;
        const std::size_t s = t - cfg.burn_in;
        for (std::size_t i = 0; i < 5; ++i) data[i * cfg.steps + s] = z[i];
    }
    return MultivariateSeries({"z1", "z2", "z3", "z4", "z5"}, cfg.dt, std::move(data), cfg.dt);
}

/// Central-difference Jacobian of the drift at the steady state.
inline Eigen::Matrix<double, 5, 5> genetic_jacobian(double P, double step = 1e-6) {
    Eigen::Matrix<double, 5, 5> J;
    std::array<double, 5> plus{}, minus{}, fp{}, fm{};
    for (std::size_t k = 0; k < 5; ++k) {
        plus = kGeneticSteadyState;
        minus = kGeneticSteadyState;
        plus[k] += step;
        minus[k] -= step;
        genetic_drift(plus, P, fp);
        genetic_drift(minus, P, fm);
        for (std::size_t i = 0; i < 5; ++i) J(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = (fp[i] - fm[i]) / (2.0 * step);
    }
    return J;
}

/// Spectral radius of exp(J·dt), the sampled linearisation at the steady state.
inline double genetic_dominant_eigenvalue(double P, double dt) {
    if (!(std::abs(P) > 0.0)) throw ConfigError("genetic model needs |P| > 0");
    const Eigen::Matrix<double, 5, 5> M = (genetic_jacobian(P) * dt).exp();
    return M.eigenvalues().cwiseAbs().maxCoeff();
}

}  // namespace cnm
