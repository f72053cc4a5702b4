#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "cnm/error.hpp"
#include "cnm/sde.hpp"
#include "cnm/series.hpp"

namespace cnm {

enum class TuringField { H, P, Both };

inline TuringField parse_turing_field(const std::string& s) {
    if (s == "H") return TuringField::H;
    if (s == "P") return TuringField::P;
    if (s == "both") return TuringField::Both;
    throw ConfigError("field must be H, P or both");
}

inline std::string to_string(TuringField f) {
    switch (f) {
        case TuringField::H: return "H";
        case TuringField::P: return "P";
        case TuringField::Both: return "both";
    }
    return "P";
}

/// Predator–prey reaction–diffusion lattice with a Beddington–DeAngelis
/// functional response:
///   dH/dt = rH(1 - H/K) - βHP/(B + H + ωP) + D1 ΔH
///   dP/dt = εβHP/(B + H + ωP) - ηP + D2 ΔP
struct TuringConfig {
    double r = 0.5;
    double eps = 1.0;
    double beta = 0.6;
    double B = 0.4;
    double eta = 0.25;
    double omega = 0.4;
    double D1 = 0.01;
    double D2 = 1.0;
    double K = 2.0;

    std::size_t grid = 11;
    double h = 1.0;
    double dt = 0.05;
    std::size_t seconds = 800;
    /// Simulated seconds discarded before recording starts.
    std::size_t burn_in_seconds = 5000;
    double snapshot_seconds = 1.0;
    double noise = 1e-6;
    std::uint64_t seed = 1;
    TuringField field = TuringField::P;
};

inline void validate(const TuringConfig& c) {
    for (double v : {c.r, c.eps, c.beta, c.B, c.eta, c.omega, c.K}) {
        if (!(v > 0.0)) throw ConfigError("Turing reaction parameters must be positive");
    }
    if (c.D1 < 0.0 || c.D2 < 0.0) throw ConfigError("diffusion coefficients must be non-negative");
    if (c.grid != 11) throw ConfigError("the lattice is fixed at 11 x 11");
    if (!(c.h > 0.0) || !(c.dt > 0.0)) throw ConfigError("h and dt must be positive");
    const double dmax = std::max(c.D1, c.D2);
    if (dmax > 0.0 && c.dt > c.h * c.h / (4.0 * dmax)) {
        throw ConfigError("dt violates the explicit stability bound h^2 / (4 max(D1, D2))");
    }
    if (!(c.snapshot_seconds > 0.0)) throw ConfigError("snapshot window must be positive");
    const double per = c.snapshot_seconds / c.dt;
    if (std::abs(per - std::round(per)) > 1e-9 * per || std::round(per) < 1.0) {
        throw ConfigError("snapshot window must be a whole number of steps");
    }
    if (c.seconds < 1) throw ConfigError("seconds must be at least 1");
    if (c.noise < 0.0) throw ConfigError("noise must be non-negative");
}

/// Spatially uniform coexistence equilibrium (H*, P*).
inline std::pair<double, double> turing_equilibrium(const TuringConfig& c) {
    // P from the predator nullcline, substituted into the prey nullcline.
    const double a = c.r * c.eps / c.K;
    const double b = (c.eps * c.beta - c.eta) / c.omega - c.r * c.eps;
    const double q = -c.eta * c.B / c.omega;
    const double disc = b * b - 4.0 * a * q;
    if (disc < 0.0) throw ConfigError("no coexistence equilibrium");
    const double H = (-b + std::sqrt(disc)) / (2.0 * a);
    const double P = ((c.eps * c.beta - c.eta) * H - c.eta * c.B) / (c.eta * c.omega);
    if (!(H > 0.0 && P > 0.0)) throw ConfigError("coexistence equilibrium is not positive");
    return {H, P};
}

class TuringLattice {
public:
    explicit TuringLattice(const TuringConfig& cfg, bool reaction = true)
        : cfg_(cfg), n_(cfg.grid), reaction_(reaction), rng_(cfg.seed),
          sigma_(std::sqrt(2.0 * cfg.noise * cfg.dt)), H_(n_ * n_), P_(n_ * n_), lh_(n_ * n_), lp_(n_ * n_) {
        validate(cfg);
        const auto [h0, p0] = turing_equilibrium(cfg);
        H_.assign(n_ * n_, h0);
        P_.assign(n_ * n_, p0);
    }

    std::vector<double>& H() noexcept { return H_; }
    std::vector<double>& P() noexcept { return P_; }
    const std::vector<double>& H() const noexcept { return H_; }
    const std::vector<double>& P() const noexcept { return P_; }

    void step() {
        laplacian(H_, lh_);
        laplacian(P_, lp_);
        const double dt = cfg_.dt;
        for (std::size_t k = 0; k < n_ * n_; ++k) {
            const double h = H_[k], p = P_[k];
            double fh = cfg_.D1 * lh_[k];
            double fp = cfg_.D2 * lp_[k];
            if (reaction_) {
                const double g = cfg_.beta * h / (cfg_.B + h + cfg_.omega * p);
                fh += cfg_.r * (1.0 - h / cfg_.K) * h - g * p;
                fp += cfg_.eps * g * p - cfg_.eta * p;
            }
            H_[k] = h + dt * fh;
            P_[k] = p + dt * fp;
            if (sigma_ > 0.0) {
                H_[k] += sigma_ * normal_(rng_);
                P_[k] += sigma_ * normal_(rng_);
            }
        }
    }

private:
    /// 5-point stencil with zero-flux boundaries: missing neighbours contribute nothing.
    void laplacian(const std::vector<double>& u, std::vector<double>& out) const {
        const double inv = 1.0 / (cfg_.h * cfg_.h);
        for (std::size_t i = 0; i < n_; ++i) {
            for (std::size_t j = 0; j < n_; ++j) {
                const double c = u[i * n_ + j];
                double s = 0.0;
                if (i > 0) s += u[(i - 1) * n_ + j] - c;
                if (i + 1 < n_) s += u[(i + 1) * n_ + j] - c;
                if (j > 0) s += u[i * n_ + j - 1] - c;
                if (j + 1 < n_) s += u[i * n_ + j + 1] - c;
                out[i * n_ + j] = s * inv;
            }
        }
    }

    TuringConfig cfg_;
    std::size_t n_;
    bool reaction_;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    double sigma_;
    std::vector<double> H_, P_, lh_, lp_;
};

/// Each channel is one cell's field averaged over the preceding snapshot
/// window; channels are named H_r_c / P_r_c (1-based row and column).
inline MultivariateSeries simulate_turing(const TuringConfig& cfg) {
    validate(cfg);
    TuringLattice lattice(cfg);
    const std::size_t cells = cfg.grid * cfg.grid;
    const auto per = static_cast<std::size_t>(std::llround(cfg.snapshot_seconds / cfg.dt));
    const bool want_h = cfg.field != TuringField::P;
    const bool want_p = cfg.field != TuringField::H;
    const std::size_t channels = (want_h ? cells : 0) + (want_p ? cells : 0);
    const std::size_t rows = cfg.seconds;
    std::vector<double> data(channels * rows);
    std::vector<double> acc_h(cells), acc_p(cells);

    const std::size_t total = cfg.burn_in_seconds + cfg.seconds;
    for (std::size_t snap = 0; snap < total; ++snap) {
        std::fill(acc_h.begin(), acc_h.end(), 0.0);
        std::fill(acc_p.begin(), acc_p.end(), 0.0);
        for (std::size_t k = 0; k < per; ++k) {
            lattice.step();
            for (std::size_t c = 0; c < cells; ++c) {
                acc_h[c] += lattice.H()[c];
                acc_p[c] += lattice.P()[c];
            }
        }
        if (!all_finite(acc_h) || !all_finite(acc_p)) {
            throw DivergenceError("Turing lattice became non-finite", snap * per);
        }
        if (snap < cfg.burn_in_seconds) continue;
        const std::size_t t = snap - cfg.burn_in_seconds;
        std::size_t ch = 0;
        if (want_h) {
            for (std::size_t c = 0; c < cells; ++c) data[(ch++) * rows + t] = acc_h[c] / static_cast<double>(per);
        }
        if (want_p) {
            for (std::size_t c = 0; c < cells; ++c) data[(ch++) * rows + t] = acc_p[c] / static_cast<double>(per);
        }
    }

    std::vector<std::string> names;
    for (const char* f : {"H", "P"}) {
        if ((f[0] == 'H' && !want_h) || (f[0] == 'P' && !want_p)) continue;
        for (std::size_t i = 0; i < cfg.grid; ++i) {
            for (std::size_t j = 0; j < cfg.grid; ++j) {
                names.push_back(std::string(f) + "_" + std::to_string(i + 1) + "_" + std::to_string(j + 1));
            }
        }
    }
    return MultivariateSeries(std::move(names), cfg.snapshot_seconds, std::move(data), cfg.snapshot_seconds);
}

/// Population variance across channels at one sample (the lattice's spatial variance).
inline double spatial_variance(const MultivariateSeries& s, std::size_t t) {
    if (t >= s.samples()) throw BoundsError("sample index out of range");
    double mu = 0.0;
    for (std::size_t c = 0; c < s.channels(); ++c) mu += s(c, t);
    mu /= static_cast<double>(s.channels());
    double v = 0.0;
    for (std::size_t c = 0; c < s.channels(); ++c) v += (s(c, t) - mu) * (s(c, t) - mu);
    return v / static_cast<double>(s.channels());
}

}  // namespace cnm
