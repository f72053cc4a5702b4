#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cnm/config.hpp"
#include "cnm/error.hpp"
#include "cnm/grouping.hpp"
#include "cnm/markers.hpp"
#include "cnm/parallel.hpp"
#include "cnm/sde.hpp"
#include "cnm/series.hpp"

namespace cnm {

struct GridSpec {
    std::string parameter;
    std::vector<double> values;
};

/// "name=start:stop:steps", inclusive of both ends (a single step yields
/// start), or an explicit list "name=v1,v2,...".
inline GridSpec parse_grid_spec(const std::string& text) {
    const auto [name, range] = split_assignment(text);
    if (range.find(':') == std::string::npos) {
        GridSpec g{name, detail::to_list(name, range)};
        return g;
    }
    const auto parts = detail::split(range, ':');
    if (parts.size() != 3) throw ConfigError("grid spec must be name=start:stop:steps or name=v1,v2,...");
    const double start = detail::to_double(name, parts[0]);
    const double stop = detail::to_double(name, parts[1]);
    const auto steps = detail::to_integer<std::size_t>(name, parts[2]);
    if (steps < 1) throw ConfigError("grid needs at least one step");
    GridSpec g{name, {}};
    for (std::size_t k = 0; k < steps; ++k) {
        g.values.push_back(steps == 1 ? start : start + (stop - start) * static_cast<double>(k) / static_cast<double>(steps - 1));
    }
    return g;
}

struct SweepOptions {
    /// Marker window = the last `tail_samples` samples of each run; 0 uses the whole run.
    std::size_t tail_samples = 0;
    std::optional<NodeGrouping> fixed_grouping;
    EstimatorOptions estimator;
    unsigned jobs = 1;
    std::uint64_t master_seed = 1;
    /// When false every point keeps the model's own seed.
    bool derive_seeds = true;
};

struct SweepPoint {
    double parameter = 0.0;
    std::uint64_t seed = 0;
    /// One entry per requested kind; empty when that marker failed.
    std::vector<std::optional<double>> values;
    /// Population variance across channels at the final sample.
    double final_spatial_variance = 0.0;
    std::string status = "ok";
};

struct SweepResult {
    std::string parameter;
    std::vector<MarkerKind> kinds;
    std::vector<SweepPoint> points;
};

inline std::vector<std::optional<double>> tail_markers(const MultivariateSeries& s, const std::vector<MarkerKind>& kinds,
                                                       const SweepOptions& opts, std::string& status) {
    const std::size_t len = opts.tail_samples == 0 ? s.samples() : std::min(opts.tail_samples, s.samples());
    const Window w = extract_window(s, s.samples() - len, len);
    const NodeGrouping g = opts.fixed_grouping ? *opts.fixed_grouping : classify_groups(w);
    std::vector<std::optional<double>> out;
    for (auto kind : kinds) {
        try {
            out.emplace_back(marker_value(kind, w, g, opts.estimator));
        } catch (const Error& e) {
            out.emplace_back();
            status = to_string(kind) + ": " + e.what();
        }
    }
    return out;
}

/// Simulates the model at every grid value and evaluates each marker kind on
/// the tail window. Grid points run in parallel; failures are recorded in the
/// point's status and the sweep continues.
inline SweepResult marker_sweep(const ModelConfig& base, const std::string& parameter, const std::vector<double>& grid,
                                const std::vector<MarkerKind>& kinds, const SweepOptions& opts = {}) {
    if (grid.empty()) throw ConfigError("empty parameter grid");
    if (kinds.empty()) throw ConfigError("no marker kinds requested");
    if (!has_parameter(base, parameter)) {
        throw ConfigError("model " + model_name(base) + " has no parameter '" + parameter + "'");
    }
    SweepResult result{parameter, kinds, std::vector<SweepPoint>(grid.size())};
    parallel_for(grid.size(), opts.jobs, [&](std::size_t k) {
        SweepPoint& p = result.points[k];
        p.parameter = grid[k];
        p.values.assign(kinds.size(), std::nullopt);
        try {
            ModelConfig cfg = base;
            set_parameter(cfg, parameter, grid[k]);
            if (opts.derive_seeds) set_seed(cfg, derive_seed(opts.master_seed, k));
            p.seed = model_seed(cfg);
            const MultivariateSeries s = simulate(cfg);
            std::size_t last = s.samples() - 1;
            double mu = 0.0, var = 0.0;
            for (std::size_t c = 0; c < s.channels(); ++c) mu += s(c, last);
            mu /= static_cast<double>(s.channels());
            for (std::size_t c = 0; c < s.channels(); ++c) var += (s(c, last) - mu) * (s(c, last) - mu);
            p.final_spatial_variance = var / static_cast<double>(s.channels());
            p.values = tail_markers(s, kinds, opts, p.status);
        } catch (const std::exception& e) {
            p.status = e.what();
        }
    });
    return result;
}

/// Index of the largest value of marker column `kind_index`, skipping failed points.
inline std::optional<std::size_t> sweep_argmax(const SweepResult& r, std::size_t kind_index) {
    std::optional<std::size_t> best;
    for (std::size_t k = 0; k < r.points.size(); ++k) {
        const auto& v = r.points[k].values[kind_index];
        if (v && (!best || *v > *r.points[*best].values[kind_index])) best = k;
    }
    return best;
}

inline void write_sweep_csv(std::ostream& out, const SweepResult& r) {
    out << r.parameter << ",seed";
    for (auto k : r.kinds) out << ',' << to_string(k);
    out << ",spatial_variance,status\n";
    for (const auto& p : r.points) {
        out << detail::format_double(p.parameter) << ',' << p.seed;
        for (const auto& v : p.values) out << ',' << (v ? detail::format_double(*v) : std::string());
        std::string status = p.status;
        for (char& c : status) {
            if (c == ',' || c == '\n') c = ';';
        }
        out << ',' << detail::format_double(p.final_spatial_variance) << ',' << status << '\n';
    }
}

}  // namespace cnm
