#pragma once

#include <algorithm>
#include <cstddef>
#include <istream>
#include <numeric>
#include <string>
#include <utility>
#include <vector>

#include "cnm/csv.hpp"
#include "cnm/error.hpp"
#include "cnm/series.hpp"

namespace cnm {

/// Dominant group (DG) and non-dominant group (NDG) of a window's channels.
struct NodeGrouping {
    std::vector<std::size_t> dg;   // sorted
    std::vector<std::size_t> ndg;  // sorted
    std::vector<double> variances;
};

struct Split {
    std::vector<std::size_t> high;
    std::vector<std::size_t> low;
};

/// Two-cluster 1-D k-means. Optimal 1-D clusters are contiguous in sorted
/// order, so the global optimum of the within-cluster sum of squares is found
/// by scanning the n - 1 split points with prefix sums. On equal cost the
/// split with the larger low cluster wins.
inline Split kmeans_split(const std::vector<double>& values) {
    const std::size_t n = values.size();
    if (n < 2) throw DegenerateInput("k-means split needs at least 2 values");
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    if (values[order.front()] == values[order.back()]) throw DegenerateInput("all values identical; no split exists");

    // Shift by the median to keep the prefix sums well conditioned.
    const double shift = values[order[n / 2]];
    std::vector<double> s1(n + 1, 0.0), s2(n + 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double v = values[order[k]] - shift;
        s1[k + 1] = s1[k] + v;
        s2[k + 1] = s2[k] + v * v;
    }
    auto wcss = [&](std::size_t lo, std::size_t hi) {  // [lo, hi)
        const double m = static_cast<double>(hi - lo);
        const double s = s1[hi] - s1[lo];
        return std::max(0.0, (s2[hi] - s2[lo]) - s * s / m);
    };

    std::size_t best = 0;
    double best_cost = 0.0;
    for (std::size_t k = 1; k < n; ++k) {
        // equal values may not straddle a split
        if (values[order[k - 1]] == values[order[k]]) continue;
        const double cost = wcss(0, k) + wcss(k, n);
        if (best == 0 || cost <= best_cost) {
            best = k;
            best_cost = cost;
        }
    }

    Split out;
    out.low.assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(best));
    out.high.assign(order.begin() + static_cast<std::ptrdiff_t>(best), order.end());
    std::sort(out.low.begin(), out.low.end());
    std::sort(out.high.begin(), out.high.end());
    return out;
}

inline NodeGrouping classify_groups(const Window& w) {
    if (w.channels() < 2) throw DegenerateInput("grouping needs at least 2 channels");
    NodeGrouping g;
    g.variances = node_variances(w);
    auto split = kmeans_split(g.variances);
    g.dg = std::move(split.high);
    g.ndg = std::move(split.low);
    return g;
}

/// Fixed grouping from channel names. Every channel must be listed exactly once.
inline NodeGrouping grouping_from_names(const std::vector<std::string>& channel_names,
                                        const std::vector<std::string>& dg_names,
                                        const std::vector<std::string>& ndg_names) {
    NodeGrouping g;
    std::vector<int> seen(channel_names.size(), 0);
    auto resolve = [&](const std::vector<std::string>& names, std::vector<std::size_t>& into) {
        for (const auto& name : names) {
            auto it = std::find(channel_names.begin(), channel_names.end(), name);
            if (it == channel_names.end()) throw ConfigError("grouping names unknown channel '" + name + "'");
            const auto idx = static_cast<std::size_t>(it - channel_names.begin());
            if (seen[idx]++) throw ConfigError("channel '" + name + "' listed twice in grouping");
            into.push_back(idx);
        }
        std::sort(into.begin(), into.end());
    };
    resolve(dg_names, g.dg);
    resolve(ndg_names, g.ndg);
    for (std::size_t k = 0; k < seen.size(); ++k) {
        if (!seen[k]) throw ConfigError("grouping omits channel '" + channel_names[k] + "'");
    }
    if (g.dg.empty() || g.ndg.empty()) throw ConfigError("both DG and NDG must be non-empty");
    return g;
}

/// Reads an override file: one `DG:<name>` or `NDG:<name>` per line, '#' comments.
inline NodeGrouping read_grouping(std::istream& in, const std::vector<std::string>& channel_names) {
    std::vector<std::string> dg, ndg;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        std::string_view sv = line;
        if (auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
        sv = detail::trim(sv);
        if (sv.empty()) continue;
        const auto colon = sv.find(':');
        if (colon == std::string_view::npos) throw ParseError("grouping lines are 'DG:<name>' or 'NDG:<name>'", row);
        const auto tag = detail::trim(sv.substr(0, colon));
        const std::string name(detail::trim(sv.substr(colon + 1)));
        if (tag == "DG") {
            dg.push_back(name);
        } else if (tag == "NDG") {
            ndg.push_back(name);
        } else {
            throw ParseError("unknown group tag '" + std::string(tag) + "'", row);
        }
    }
    return grouping_from_names(channel_names, dg, ndg);
}

}  // namespace cnm
