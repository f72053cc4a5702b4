#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "cnm/error.hpp"
#include "cnm/series.hpp"

namespace cnm {

enum class CausalKind { Gc, TeBinned, TeGaussian };

struct CausalStrength {
    double value = 0.0;  // nats, >= 0
    CausalKind kind = CausalKind::Gc;
    std::size_t source = 0;
    std::size_t target = 0;
};

/// Least-squares fits of the two lag-1 models
///   H0: y[t+1] = a y[t]            + e1
///   H1: y[t+1] = b y[t] + c x[t]   + e2
/// on mean-centred data (no intercept).
struct GcFit {
    double a = 0.0;
    double b = 0.0;
    double c = 0.0;
    double rss0 = 0.0;
    double rss1 = 0.0;
    std::size_t n_eff = 0;
    bool ridge = false;  // the H1 normal equations needed regularisation

    double strength() const { return std::max(0.0, std::log(rss0 / rss1)); }
};

inline constexpr double kRidgeConditionLimit = 1e12;
inline constexpr double kRidgeScale = 1e-8;

inline double pearson_correlation(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DataError("correlation inputs differ in length");
    if (x.size() < 2) throw InsufficientData("correlation needs at least 2 samples");
    const double mx = mean(x);
    const double my = mean(y);
    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) {
        const double dx = x[k] - mx;
        const double dy = y[k] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if (sxx == 0.0 && syy == 0.0) throw DegenerateInput("correlation of two constant sequences");
    if (sxx == 0.0 || syy == 0.0) return 0.0;
    return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

inline GcFit granger_fit(std::span<const double> source, std::span<const double> target) {
    if (source.size() != target.size()) throw DataError("Granger inputs differ in length");
    if (target.size() < 4) throw InsufficientData("Granger causality needs at least 4 samples");
    const auto [tmin, tmax] = std::minmax_element(target.begin(), target.end());
    if (*tmin == *tmax) throw DegenerateInput("Granger target is constant");
    const auto x = centered(source);
    const auto y = centered(target);
    const std::size_t n = y.size() - 1;

    double syy = 0.0, sxx = 0.0, sxy = 0.0, sny = 0.0, snx = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        syy += y[t] * y[t];
        sxx += x[t] * x[t];
        sxy += x[t] * y[t];
        sny += y[t + 1] * y[t];
        snx += y[t + 1] * x[t];
    }
    if (syy == 0.0) throw DegenerateInput("Granger target is constant");

    GcFit fit;
    fit.n_eff = n;
    fit.a = sny / syy;

    // 2x2 symmetric normal equations [syy sxy; sxy sxx] [b c]' = [sny snx]'
    double m11 = syy, m22 = sxx;
    const double m12 = sxy;
    const double half_tr = 0.5 * (m11 + m22);
    const double disc = std::sqrt(std::max(0.0, 0.25 * (m11 - m22) * (m11 - m22) + m12 * m12));
    const double eig_hi = half_tr + disc;
    const double eig_lo = std::max(0.0, half_tr - disc);
    if (eig_lo == 0.0 || eig_hi / eig_lo > kRidgeConditionLimit) {
        const double lambda = kRidgeScale * (m11 + m22);
        m11 += lambda;
        m22 += lambda;
        fit.ridge = true;
    }
    const double det = m11 * m22 - m12 * m12;
    fit.b = (m22 * sny - m12 * snx) / det;
    fit.c = (m11 * snx - m12 * sny) / det;

    double rss0 = 0.0, rss1 = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
        const double e0 = y[t + 1] - fit.a * y[t];
        const double e1 = y[t + 1] - fit.b * y[t] - fit.c * x[t];
        rss0 += e0 * e0;
        rss1 += e1 * e1;
    }
    // H1 nests H0; a ridge solution may land marginally above the H0 optimum.
    rss1 = std::min(rss1, rss0);
    // Exact fits (rss1 == 0) would give an infinite strength; cap near 34.5 nats.
    fit.rss0 = rss0;
    fit.rss1 = std::max(rss1, rss0 * 1e-15);
    if (rss0 == 0.0) fit.rss1 = fit.rss0 = 1.0;  // target a pure geometric sequence: nothing to explain
    return fit;
}

inline CausalStrength granger_causality(std::span<const double> source, std::span<const double> target) {
    return {granger_fit(source, target).strength(), CausalKind::Gc, 0, 0};
}

inline CausalStrength transfer_entropy_gaussian(std::span<const double> source, std::span<const double> target) {
    return {granger_fit(source, target).strength() / 2.0, CausalKind::TeGaussian, 0, 0};
}

namespace detail {

/// Equal-width binning over the sequence's own [min, max]. A constant sequence
/// maps to bin 0.
inline std::vector<unsigned> discretize(std::span<const double> v, unsigned bins) {
    const auto [lo_it, hi_it] = std::minmax_element(v.begin(), v.end());
    const double lo = *lo_it, hi = *hi_it;
    std::vector<unsigned> out(v.size(), 0);
    if (hi == lo) return out;
    const double scale = static_cast<double>(bins) / (hi - lo);
    for (std::size_t k = 0; k < v.size(); ++k) {
        const auto b = static_cast<unsigned>((v[k] - lo) * scale);
        out[k] = std::min(b, bins - 1);
    }
    return out;
}

inline double plugin_entropy(const std::vector<std::size_t>& counts, double total) {
    double h = 0.0;
    for (std::size_t c : counts) {
        if (c == 0) continue;
        const double p = static_cast<double>(c) / total;
        h -= p * std::log(p);
    }
    return h;
}

}  // namespace detail

inline constexpr unsigned kDefaultTeBins = 8;

/// Plug-in TE(X -> Y) = H(Y'|Y) - H(Y'|Y,X) from an equal-width histogram.
inline CausalStrength transfer_entropy_binned(std::span<const double> source, std::span<const double> target,
                                              unsigned bins = kDefaultTeBins) {
    if (bins < 2) throw ConfigError("transfer entropy needs at least 2 bins");
    if (source.size() != target.size()) throw DataError("transfer entropy inputs differ in length");
    if (target.size() < 4) throw InsufficientData("transfer entropy needs at least 4 samples");
    const auto xs = detail::discretize(source, bins);
    const auto ys = detail::discretize(target, bins);
    const std::size_t n = ys.size() - 1;
    const std::size_t b = bins;

    std::vector<std::size_t> c_yy(b * b, 0), c_y(b, 0), c_yyx(b * b * b, 0), c_yx(b * b, 0);
    for (std::size_t t = 0; t < n; ++t) {
        const std::size_t next = ys[t + 1], cur = ys[t], src = xs[t];
        ++c_yy[next * b + cur];
        ++c_y[cur];
        ++c_yyx[(next * b + cur) * b + src];
        ++c_yx[cur * b + src];
    }
    const double total = static_cast<double>(n);
    const double h_next_given_cur = detail::plugin_entropy(c_yy, total) - detail::plugin_entropy(c_y, total);
    const double h_next_given_both = detail::plugin_entropy(c_yyx, total) - detail::plugin_entropy(c_yx, total);
    return {std::max(0.0, h_next_given_cur - h_next_given_both), CausalKind::TeBinned, 0, 0};
}

struct EstimatorOptions {
    unsigned te_bins = kDefaultTeBins;
};

inline double causal_strength(CausalKind kind, std::span<const double> source, std::span<const double> target,
                              const EstimatorOptions& opts = {}) {
    switch (kind) {
        case CausalKind::Gc: return granger_causality(source, target).value;
        case CausalKind::TeGaussian: return transfer_entropy_gaussian(source, target).value;
        case CausalKind::TeBinned: return transfer_entropy_binned(source, target, opts.te_bins).value;
    }
    return 0.0;
}

inline std::string to_string(CausalKind k) {
    switch (k) {
        case CausalKind::Gc: return "gc";
        case CausalKind::TeBinned: return "te-binned";
        case CausalKind::TeGaussian: return "te-gaussian";
    }
    return "unknown";
}

}  // namespace cnm
