#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cnm/error.hpp"
#include "cnm/sde.hpp"
#include "cnm/series.hpp"

namespace cnm {

/// Pollinator–plant mutualistic network with node-independent parameters.
/// Defaults are a calibrated reference set (bistable at debuff 0.3, low-branch
/// fold reachable below debuff 1), not literature values.
struct MutualisticConfig {
    std::size_t n = 20;  // pollinators
    std::size_t m = 15;  // plants
    /// Explicit n×m interaction matrix; generated from density/matrix_seed when empty.
    Eigen::MatrixXd M;
    double density = 0.25;
    std::uint64_t matrix_seed = 1;

    double B = 0.1;
    double C = 1.0;
    double K = 5.0;
    double D = 2.0;
    double E = 0.9;
    double H = 0.1;
    double s = 1.0;
    double debuff = 0.3;

    double noise = 1e-5;
    double dt = 0.01;
    std::size_t sample_every = 10;
    std::size_t steps = 20000;  // recorded samples
    std::size_t burn_in = 0;    // discarded samples
    std::uint64_t seed = 1;
    /// "low", "high", or a number used for every node.
    std::string initial = "low";
};

inline void validate(const MutualisticConfig& c) {
    for (double v : {c.B, c.C, c.K, c.D, c.E, c.H, c.s}) {
        if (!(v > 0.0)) throw ConfigError("mutualistic dynamics parameters must be positive");
    }
    if (!(c.K > c.C)) throw ConfigError("mutualistic model needs K > C");
    if (!(c.debuff > 0.0 && c.debuff <= 1.0)) throw ConfigError("debuff must lie in (0, 1]");
    if (c.n < 1 || c.m < 1) throw ConfigError("network needs at least one pollinator and one plant");
    if (!(c.density > 0.0 && c.density <= 1.0)) throw ConfigError("density must lie in (0, 1]");
    if (c.noise < 0.0) throw ConfigError("noise must be non-negative");
    if (!(c.dt > 0.0) || c.sample_every < 1 || c.steps < 1) throw ConfigError("bad integration settings");
}

/// Bernoulli(density) incidence matrix, redrawn until no row or column is empty.
inline Eigen::MatrixXd random_incidence(std::size_t n, std::size_t m, double density, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::bernoulli_distribution link(density);
    const auto rows = static_cast<Eigen::Index>(n), cols = static_cast<Eigen::Index>(m);
    for (int attempt = 0; attempt < 10000; ++attempt) {
        Eigen::MatrixXd M(rows, cols);
        for (Eigen::Index i = 0; i < rows; ++i) {
            for (Eigen::Index j = 0; j < cols; ++j) M(i, j) = link(rng) ? 1.0 : 0.0;
        }
        if ((M.rowwise().sum().array() > 0.0).all() && (M.colwise().sum().array() > 0.0).all()) return M;
    }
    throw ConfigError("could not draw an incidence matrix without empty rows or columns");
}

inline Eigen::MatrixXd interaction_matrix(const MutualisticConfig& c) {
    if (c.M.size() > 0) {
        if (static_cast<std::size_t>(c.M.rows()) != c.n || static_cast<std::size_t>(c.M.cols()) != c.m) {
            throw ConfigError("interaction matrix shape does not match n x m");
        }
        return c.M;
    }
    return random_incidence(c.n, c.m, c.density, c.matrix_seed);
}

struct BipartiteProjection {
    Eigen::MatrixXd pollinators;  // A, n×n
    Eigen::MatrixXd plants;       // Ā, m×m
};

/// Weighted one-mode projections: A_ij = Σ_k M_ik M_jk / Σ_s M_sk, and
/// Ā_ij = Σ_k M_ki M_kj / Σ_s M_ks.
inline BipartiteProjection project_bipartite(const Eigen::MatrixXd& M) {
    if ((M.array() < 0.0).any()) throw ProjectionError("interaction matrix has negative entries");
    const Eigen::VectorXd col = M.colwise().sum().transpose();
    const Eigen::VectorXd row = M.rowwise().sum();
    for (Eigen::Index k = 0; k < col.size(); ++k) {
        if (col(k) == 0.0) throw ProjectionError("plant column " + std::to_string(k) + " has no partners");
    }
    for (Eigen::Index k = 0; k < row.size(); ++k) {
        if (row(k) == 0.0) throw ProjectionError("pollinator row " + std::to_string(k) + " has no partners");
    }
    BipartiteProjection p;
    p.pollinators = M * col.cwiseInverse().asDiagonal() * M.transpose();
    p.plants = M.transpose() * row.cwiseInverse().asDiagonal() * M;
    return p;
}

struct EffectiveState {
    double x_eff = 0.0;
    double beta_eff = 0.0;
};

/// Mean-field reduction: x_eff = 1ᵀAx / 1ᵀA1, β_eff = 1ᵀA²1 / 1ᵀA1.
inline EffectiveState effective_reduction(const Eigen::MatrixXd& A, std::span<const double> x) {
    if (static_cast<std::size_t>(A.rows()) != x.size()) throw ConfigError("state size does not match network");
    const Eigen::VectorXd in_strength = A.colwise().sum().transpose();  // (1ᵀA)ᵀ
    const double total = in_strength.sum();
    if (!(total > 0.0)) throw DegenerateNetwork("1ᵀA1 is zero");
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
    const Eigen::VectorXd row_strength = A.rowwise().sum();
    return {in_strength.dot(xv) / total, in_strength.dot(row_strength) / total};
}

/// Reduced one-dimensional drift f(β, x) = B + x(1 - x/K)(x/C - 1) + β x² / (D + (E + H) x).
inline double reduced_drift(const MutualisticConfig& c, double beta, double x) {
    return c.B + x * (1.0 - x / c.K) * (x / c.C - 1.0) + beta * x * x / (c.D + (c.E + c.H) * x);
}

inline double reduced_drift_dx(const MutualisticConfig& c, double beta, double x) {
    const double cubic_dx = 2.0 * x / c.C - 1.0 - 3.0 * x * x / (c.K * c.C) + 2.0 * x / c.K;
    const double q = c.D + (c.E + c.H) * x;
    return cubic_dx + beta * (2.0 * x * q - x * x * (c.E + c.H)) / (q * q);
}

/// β solving f(β, x) = 0 for a given x > 0.
inline double resilience_beta(const MutualisticConfig& c, double x) {
    if (!(x > 0.0)) throw ConfigError("resilience function is defined for x > 0 only");
    const double growth = c.B + x * (1.0 - x / c.K) * (x / c.C - 1.0);
    return -growth * (c.D + (c.E + c.H) * x) / (x * x);
}

inline double resilience_beta_dx(const MutualisticConfig& c, double x) {
    const double g = c.B + x * (1.0 - x / c.K) * (x / c.C - 1.0);
    const double gp = 2.0 * x / c.C - 1.0 - 3.0 * x * x / (c.K * c.C) + 2.0 * x / c.K;
    const double q = c.D + (c.E + c.H) * x;
    return -(gp * q * x + g * (c.E + c.H) * x - 2.0 * g * q) / (x * x * x);
}

/// (x, β(x)) for every positive grid point; non-positive points are skipped.
inline std::vector<std::pair<double, double>> resilience_curve(const MutualisticConfig& c,
                                                               const std::vector<double>& xs) {
    std::vector<std::pair<double, double>> out;
    out.reserve(xs.size());
    for (double x : xs) {
        if (x > 0.0) out.emplace_back(x, resilience_beta(c, x));
    }
    return out;
}

struct FoldPoint {
    double x = 0.0;
    double beta = 0.0;
};

/// Lower-branch fold: the first local maximum of β(x), where f = 0 and
/// ∂f/∂x = 0 hold together. Bracketed on a grid, then bisected.
inline FoldPoint find_fold(const MutualisticConfig& c) {
    const double lo = 1e-3 * c.C;
    const double hi = c.K;
    const int grid = 4000;
    double prev_x = lo;
    double prev_d = resilience_beta_dx(c, lo);
    for (int k = 1; k <= grid; ++k) {
        const double x = lo + (hi - lo) * k / grid;
        const double d = resilience_beta_dx(c, x);
        if (prev_d > 0.0 && d <= 0.0) {
            double a = prev_x, b = x;
            while (b - a > 1e-12 * std::max(1.0, b)) {
                const double mid = 0.5 * (a + b);
                if (resilience_beta_dx(c, mid) > 0.0) {
                    a = mid;
                } else {
                    b = mid;
                }
            }
            const double xc = 0.5 * (a + b);
            return {xc, resilience_beta(c, xc)};
        }
        prev_x = x;
        prev_d = d;
    }
    throw NoFoldError("β(x) has no local maximum on (0, K]: the low branch never folds");
}

/// Smallest positive equilibrium of the reduced dynamics at β, if any lies below the fold.
inline std::optional<double> low_branch_state(const MutualisticConfig& c, double beta) {
    const FoldPoint fold = find_fold(c);
    if (beta >= fold.beta) return std::nullopt;
    // f(β, 0+) = B > 0, and f(β, x_c) < 0 below the fold.
    double a = 1e-12, b = fold.x;
    if (reduced_drift(c, beta, b) >= 0.0) return std::nullopt;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (reduced_drift(c, beta, mid) > 0.0) {
            a = mid;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

/// Largest equilibrium of the reduced dynamics (the high branch).
inline double high_branch_state(const MutualisticConfig& c, double beta) {
    double b = c.K;
    while (reduced_drift(c, beta, b) > 0.0) b *= 2.0;
    double a = b;
    while (a > 1e-9 && reduced_drift(c, beta, a) <= 0.0) a *= 0.5;
    // f changes sign from + to - on [a, b] near the top root
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (a + b);
        if (reduced_drift(c, beta, mid) > 0.0) {
            a = mid;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

/// Debuffed pollinator adjacency w·A used by the dynamics.
inline Eigen::MatrixXd pollinator_network(const MutualisticConfig& c) {
    return c.debuff * project_bipartite(interaction_matrix(c)).pollinators;
}

inline std::vector<double> mutualistic_initial_state(const MutualisticConfig& c, const Eigen::MatrixXd& A) {
    const std::vector<double> ones(c.n, 1.0);
    const double beta = effective_reduction(A, ones).beta_eff;
    double x0 = 0.0;
    if (c.initial == "low") {
        const auto low = low_branch_state(c, beta);
        x0 = low ? *low : find_fold(c).x;
    } else if (c.initial == "high") {
        x0 = high_branch_state(c, beta);
    } else {
        try {
            x0 = std::stod(c.initial);
        } catch (const std::exception&) {
            throw ConfigError("initial must be 'low', 'high' or a number");
        }
    }
    return std::vector<double>(c.n, x0);
}

/// Mutualistic drift, s[B + x_i(1 - x_i/K)(x_i/C - 1) + Σ_j A_ij x_i x_j / (D + E x_i + H x_j)].
inline void mutualistic_drift(const MutualisticConfig& c, const Eigen::MatrixXd& A, std::span<const double> x,
                              std::span<double> out) {
    const auto n = static_cast<Eigen::Index>(x.size());
    for (Eigen::Index i = 0; i < n; ++i) {
        const double xi = x[static_cast<std::size_t>(i)];
        double coupling = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const double a = A(i, j);
            if (a == 0.0) continue;
            const double xj = x[static_cast<std::size_t>(j)];
            coupling += a * xi * xj / (c.D + c.E * xi + c.H * xj);
        }
        out[static_cast<std::size_t>(i)] = c.s * (c.B + xi * (1.0 - xi / c.K) * (xi / c.C - 1.0) + coupling);
    }
}

/// Euler–Maruyama on the full network, reflecting negative populations back
/// to non-negative values. Channels are the n pollinators p1..pn.
inline MultivariateSeries simulate_mutualistic(const MutualisticConfig& cfg, std::size_t* reflections = nullptr) {
    validate(cfg);
    const Eigen::MatrixXd A = pollinator_network(cfg);
    std::vector<double> x = mutualistic_initial_state(cfg, A);
    EulerMaruyama em(cfg.n, cfg.noise, cfg.dt, cfg.seed);
    auto drift = [&](std::span<const double> state, std::span<double> out) { mutualistic_drift(cfg, A, state, out); };

    std::vector<double> data(cfg.n * cfg.steps);
    std::size_t reflected = 0;
    const std::size_t total = cfg.burn_in + cfg.steps;
    for (std::size_t t = 0; t < total; ++t) {
        for (std::size_t k = 0; k < cfg.sample_every; ++k) {
            em.step(x, drift);
            for (double& v : x) {
                if (v < 0.0) {
                    v = -v;
                    ++reflected;
                }
            }
        }
        if (!all_finite(x)) throw DivergenceError("mutualistic state became non-finite", t);
        if (t < cfg.burn_in) continue;
        const std::size_t s = t - cfg.burn_in;
        for (std::size_t i = 0; i < cfg.n; ++i) data[i * cfg.steps + s] = x[i];
    }
    if (reflections) *reflections = reflected;
    std::vector<std::string> names;
    for (std::size_t i = 0; i < cfg.n; ++i) names.push_back("p" + std::to_string(i + 1));
    const double sample_dt = cfg.dt * static_cast<double>(cfg.sample_every);
    return MultivariateSeries(std::move(names), sample_dt, std::move(data), sample_dt);
}

/// (x_eff, β_eff) for every sample of a simulated run on network A.
inline std::vector<EffectiveState> effective_trajectory(const MultivariateSeries& s, const Eigen::MatrixXd& A) {
    std::vector<EffectiveState> out(s.samples());
    std::vector<double> x(s.channels());
    for (std::size_t t = 0; t < s.samples(); ++t) {
        for (std::size_t i = 0; i < s.channels(); ++i) x[i] = s(i, t);
        out[t] = effective_reduction(A, x);
    }
    return out;
}

}  // namespace cnm
