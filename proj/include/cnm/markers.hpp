#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "cnm/causality.hpp"
#include "cnm/error.hpp"
#include "cnm/grouping.hpp"
#include "cnm/parallel.hpp"
#include "cnm/series.hpp"

namespace cnm {

inline constexpr double kMarkerCeiling = 1e12;
inline constexpr double kDenominatorFloor = 1e-12;

inline void check_grouping(const NodeGrouping& g, std::size_t channels) {
    if (g.dg.empty() || g.ndg.empty()) throw ConfigError("grouping needs non-empty DG and NDG");
    for (auto idx : g.dg) {
        if (idx >= channels) throw BoundsError("DG index out of range");
    }
    for (auto idx : g.ndg) {
        if (idx >= channels) throw BoundsError("NDG index out of range");
    }
}

/// |DG|·|NDG| over the summed DG -> NDG causal strength. A vanishing sum maps
/// to the finite ceiling 1e12.
inline double cnm_from_total(std::size_t dg_size, std::size_t ndg_size, double total_strength) {
    if (total_strength < kDenominatorFloor) return kMarkerCeiling;
    return std::min(kMarkerCeiling, static_cast<double>(dg_size * ndg_size) / total_strength);
}

inline double cnm(const Window& w, const NodeGrouping& g, CausalKind kind, const EstimatorOptions& opts = {}) {
    check_grouping(g, w.channels());
    double total = 0.0;
    for (auto j : g.dg) {
        for (auto i : g.ndg) {
            try {
                total += causal_strength(kind, w.channel(j), w.channel(i), opts);
            } catch (const Error& e) {
                throw DegenerateInput("cs(" + std::to_string(j) + " -> " + std::to_string(i) + "): " + e.what());
            }
        }
    }
    return cnm_from_total(g.dg.size(), g.ndg.size(), total);
}

namespace detail {
inline double abs_pcc_or_zero(std::span<const double> x, std::span<const double> y) {
    try {
        return std::abs(pearson_correlation(x, y));
    } catch (const DegenerateInput&) {
        return 0.0;
    }
}
}  // namespace detail

/// SD_d · PCC_d / PCC_o with mean absolute correlations; PCC_d is 1 for a
/// singleton DG.
inline double dnb(const Window& w, const NodeGrouping& g) {
    check_grouping(g, w.channels());
    double sd = 0.0;
    for (auto j : g.dg) sd += std::sqrt(sample_variance(w.channel(j)));
    sd /= static_cast<double>(g.dg.size());

    double pcc_d = 1.0;
    if (g.dg.size() > 1) {
        double s = 0.0;
        std::size_t pairs = 0;
        for (std::size_t a = 0; a < g.dg.size(); ++a) {
            for (std::size_t b = a + 1; b < g.dg.size(); ++b) {
                s += detail::abs_pcc_or_zero(w.channel(g.dg[a]), w.channel(g.dg[b]));
                ++pairs;
            }
        }
        pcc_d = s / static_cast<double>(pairs);
    }

    double pcc_o = 0.0;
    for (auto j : g.dg) {
        for (auto i : g.ndg) pcc_o += detail::abs_pcc_or_zero(w.channel(j), w.channel(i));
    }
    pcc_o /= static_cast<double>(g.dg.size() * g.ndg.size());
    pcc_o = std::max(pcc_o, kDenominatorFloor);
    return std::min(kMarkerCeiling, sd * pcc_d / pcc_o);
}

inline double marker_value(MarkerKind kind, const Window& w, const NodeGrouping& g, const EstimatorOptions& opts = {}) {
    switch (kind) {
        case MarkerKind::CnmGc: return cnm(w, g, CausalKind::Gc, opts);
        case MarkerKind::CnmTe: return cnm(w, g, CausalKind::TeBinned, opts);
        case MarkerKind::Dnb: return dnb(w, g);
    }
    return 0.0;
}

enum class GroupingMode { PerWindow, Frozen };

inline GroupingMode parse_grouping_mode(const std::string& s) {
    if (s == "per-window") return GroupingMode::PerWindow;
    if (s == "frozen") return GroupingMode::Frozen;
    throw ConfigError("grouping mode must be 'per-window' or 'frozen'");
}

struct StreamOptions {
    std::size_t window_length = 30;
    std::size_t stride = 1;
    GroupingMode grouping = GroupingMode::PerWindow;
    /// Overrides k-means entirely when set.
    std::optional<NodeGrouping> fixed_grouping;
    EstimatorOptions estimator;
    unsigned jobs = 1;
};

/// One marker value per window, stamped at the window's last sample time.
/// Frozen grouping is computed once from the first window. A window that
/// fails to evaluate leaves a gap.
inline MarkerSeries marker_stream(const MultivariateSeries& s, MarkerKind kind, const StreamOptions& opts = {}) {
    if (opts.stride < 1) throw ConfigError("stride must be at least 1");
    if (opts.window_length > s.samples()) throw ConfigError("window longer than the series");
    if (s.channels() < 2) throw DegenerateInput("marker streams need at least 2 channels");

    std::optional<NodeGrouping> frozen = opts.fixed_grouping;
    if (!frozen && opts.grouping == GroupingMode::Frozen) {
        frozen = classify_groups(extract_window(s, 0, opts.window_length));
    }

    const std::size_t count = (s.samples() - opts.window_length) / opts.stride + 1;
    std::vector<std::optional<double>> values(count);
    parallel_for(count, opts.jobs, [&](std::size_t k) {
        try {
            const Window w = extract_window(s, k * opts.stride, opts.window_length);
            const NodeGrouping g = frozen ? *frozen : classify_groups(w);
            values[k] = marker_value(kind, w, g, opts.estimator);
        } catch (const Error&) {
            values[k] = std::nullopt;
        }
    });

    MarkerSeries m;
    m.kind = kind;
    m.window_length = opts.window_length;
    m.stride = opts.stride;
    for (std::size_t k = 0; k < count; ++k) {
        if (!values[k]) continue;
        m.times.push_back(s.time(k * opts.stride + opts.window_length - 1));
        m.values.push_back(*values[k]);
    }
    return m;
}

struct WarningOptions {
    double baseline_seconds = 30.0;
    double kappa = 3.0;
};

/// Trailing z-score rule: a point warns when it exceeds mean + kappa·sd of the
/// points in [t - baseline, t). Raw warnings closer than one baseline to the
/// previous raw warning belong to the same event; the event's first time is
/// reported.
inline std::vector<double> detect_warning(const MarkerSeries& m, const WarningOptions& opts = {}) {
    if (m.empty()) throw EmptyInput("no marker values");
    if (!(opts.baseline_seconds > 0.0)) throw ConfigError("baseline must be positive");
    if (opts.baseline_seconds >= m.times.back() - m.times.front()) {
        throw ConfigError("baseline window is not shorter than the marker series");
    }
    std::vector<double> warnings;
    std::optional<double> last_raw;
    const double slack = 1e-9 * opts.baseline_seconds;
    std::size_t lo = 0;
    for (std::size_t k = 0; k < m.size(); ++k) {
        const double t = m.times[k];
        if (t - m.times.front() < opts.baseline_seconds - slack) continue;  // not enough history yet
        while (m.times[lo] < t - opts.baseline_seconds - slack) ++lo;
        const std::size_t n = k - lo;
        if (n < 1) continue;
        double mu = 0.0;
        for (std::size_t j = lo; j < k; ++j) mu += m.values[j];
        mu /= static_cast<double>(n);
        double var = 0.0;
        for (std::size_t j = lo; j < k; ++j) var += (m.values[j] - mu) * (m.values[j] - mu);
        var = n > 1 ? var / static_cast<double>(n - 1) : 0.0;
        const double sd = std::max(std::sqrt(var), kDenominatorFloor * std::max(1.0, std::abs(mu)));
        if (m.values[k] > mu + opts.kappa * sd) {
            if (!last_raw || t - *last_raw > opts.baseline_seconds) warnings.push_back(t);
            last_raw = t;
        }
    }
    return warnings;
}

struct Event {
    double onset = 0.0;
    double end = 0.0;
};

struct WarningReport {
    std::vector<double> warning_times;
    std::vector<Event> events;
    std::vector<bool> per_event_valid;
    double accuracy = 0.0;
};

inline void check_events(const std::vector<Event>& events) {
    if (events.empty()) throw EmptyInput("no events to evaluate");
    for (std::size_t k = 0; k < events.size(); ++k) {
        if (events[k].end < events[k].onset) throw DataError("event " + std::to_string(k) + " ends before it starts");
        if (k > 0 && events[k].onset < events[k - 1].end) throw DataError("events overlap or are unsorted");
    }
}

/// An event is caught when some warning lies in [onset - lead, onset].
inline WarningReport evaluate_warnings(std::vector<double> warnings, const std::vector<Event>& events,
                                       double lead_window_seconds) {
    check_events(events);
    std::sort(warnings.begin(), warnings.end());
    WarningReport r;
    r.events = events;
    std::size_t hits = 0;
    for (const auto& e : events) {
        const auto it = std::lower_bound(warnings.begin(), warnings.end(), e.onset - lead_window_seconds);
        const bool valid = it != warnings.end() && *it <= e.onset;
        r.per_event_valid.push_back(valid);
        hits += valid ? 1 : 0;
    }
    r.warning_times = std::move(warnings);
    r.accuracy = static_cast<double>(hits) / static_cast<double>(events.size());
    return r;
}

enum class Combination { Any, All };

/// Combined validity across several marker streams; ANY is the union of the
/// members' caught events, ALL the intersection.
inline WarningReport evaluate_combination(const std::vector<std::vector<double>>& members,
                                          const std::vector<Event>& events, double lead_window_seconds,
                                          Combination mode = Combination::Any) {
    check_events(events);
    if (members.empty()) throw EmptyInput("no marker streams to combine");
    WarningReport r;
    r.events = events;
    r.per_event_valid.assign(events.size(), mode == Combination::All);
    for (const auto& w : members) {
        const auto single = evaluate_warnings(w, events, lead_window_seconds);
        for (std::size_t k = 0; k < events.size(); ++k) {
            if (mode == Combination::Any) {
                r.per_event_valid[k] = r.per_event_valid[k] || single.per_event_valid[k];
            } else {
                r.per_event_valid[k] = r.per_event_valid[k] && single.per_event_valid[k];
            }
        }
        r.warning_times.insert(r.warning_times.end(), w.begin(), w.end());
    }
    std::sort(r.warning_times.begin(), r.warning_times.end());
    const auto hits = std::count(r.per_event_valid.begin(), r.per_event_valid.end(), true);
    r.accuracy = static_cast<double>(hits) / static_cast<double>(events.size());
    return r;
}

/// Plain-text accuracy table, one column per named report.
inline std::string format_report_table(const std::vector<std::pair<std::string, WarningReport>>& columns) {
    std::ostringstream out;
    out << "Warning accuracy\n";
    out << "event";
    for (const auto& [name, _] : columns) out << '\t' << name;
    out << '\n';
    const std::size_t n = columns.empty() ? 0 : columns.front().second.events.size();
    for (std::size_t k = 0; k < n; ++k) {
        out << k + 1;
        for (const auto& [_, r] : columns) out << '\t' << (r.per_event_valid[k] ? "valid" : "missed");
        out << '\n';
    }
    out << "accuracy";
    for (const auto& [_, r] : columns) {
        out << '\t' << static_cast<long>(std::lround(r.accuracy * 100.0)) << '%';
    }
    out << '\n';
    return out.str();
}

}  // namespace cnm
