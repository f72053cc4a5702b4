#pragma once

#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cnm/error.hpp"
#include "cnm/series.hpp"

namespace cnm {

struct CsvOptions {
    /// Required when the file has no leading "t" column.
    std::optional<double> dt;
    /// Z-score every channel after loading. Off by default.
    bool normalize = false;
};

namespace detail {

inline std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
    return s;
}

inline std::vector<std::string_view> split(std::string_view line, char sep = ',') {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = line.find(sep, pos);
        out.push_back(trim(line.substr(pos, next == std::string_view::npos ? std::string_view::npos : next - pos)));
        if (next == std::string_view::npos) break;
        pos = next + 1;
    }
    return out;
}

/// Parses a full cell as a double. Returns nullopt on anything but a clean number;
/// "nan"/"inf" parse successfully so the caller can report them as data errors.
inline std::optional<double> parse_double(std::string_view cell) {
    double v = 0.0;
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    const auto [ptr, ec] = std::from_chars(cell.data(), cell.data() + cell.size(), v);
    if (ec != std::errc() || ptr != cell.data() + cell.size() || cell.empty()) return std::nullopt;
    return v;
}

inline std::string format_double(double v) {
    char buf[32];
    const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, ptr);
}

}  // namespace detail

inline MultivariateSeries read_csv(std::istream& in, const CsvOptions& opts = {}) {
    std::string line;
    std::size_t row = 0;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        for (auto f : detail::split(line)) header.emplace_back(f);
        break;
    }
    if (header.empty()) throw ParseError("missing header row", row);
    const bool has_time = header.front() == "t";
    std::vector<std::string> names(header.begin() + (has_time ? 1 : 0), header.end());
    if (names.empty()) throw ParseError("header names no channels", row);

    std::vector<double> times;
    std::vector<std::vector<double>> cols(names.size());
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        const auto cells = detail::split(line);
        if (cells.size() != header.size()) {
            throw ParseError("expected " + std::to_string(header.size()) + " fields, found " +
                                 std::to_string(cells.size()),
                             row);
        }
        for (std::size_t k = 0; k < cells.size(); ++k) {
            const auto v = detail::parse_double(cells[k]);
            if (!v) throw ParseError("cannot parse '" + std::string(cells[k]) + "' as a number", row);
            if (!std::isfinite(*v)) throw DataError("non-finite value at row " + std::to_string(row));
            if (has_time && k == 0) {
                times.push_back(*v);
            } else {
                cols[k - (has_time ? 1 : 0)].push_back(*v);
            }
        }
    }

    double dt = 0.0;
    double start = 0.0;
    if (has_time && times.size() >= 2) {
        start = times.front();
        dt = (times.back() - times.front()) / static_cast<double>(times.size() - 1);
        if (!(dt > 0.0)) throw FormatError("timestamps are not increasing");
        for (std::size_t k = 1; k < times.size(); ++k) {
            if (std::abs((times[k] - times[k - 1]) - dt) > 1e-6 * dt) {
                throw FormatError("timestamps are not uniformly spaced near t=" + detail::format_double(times[k]));
            }
        }
    } else if (opts.dt) {
        dt = *opts.dt;
        if (has_time && !times.empty()) start = times.front();
    } else {
        throw ConfigError("no time column and no sampling interval supplied");
    }

    if (opts.normalize) {
        for (auto& c : cols) {
            if (c.size() < 2) break;
            const double m = mean(c);
            const double sd = std::sqrt(sample_variance(c));
            for (double& v : c) v = sd > 0.0 ? (v - m) / sd : 0.0;
        }
    }
    return MultivariateSeries::from_channels(std::move(names), dt, cols, start);
}

inline MultivariateSeries load_csv(const std::string& path, const CsvOptions& opts = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open '" + path + "'");
    return read_csv(in, opts);
}

inline void write_csv(std::ostream& out, const MultivariateSeries& s) {
    out << 't';
    for (const auto& n : s.names()) out << ',' << n;
    out << '\n';
    for (std::size_t t = 0; t < s.samples(); ++t) {
        out << detail::format_double(s.time(t));
        for (std::size_t c = 0; c < s.channels(); ++c) out << ',' << detail::format_double(s(c, t));
        out << '\n';
    }
}

inline void write_csv(const std::string& path, const MultivariateSeries& s) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write '" + path + "'");
    write_csv(out, s);
}

/// `time,value[,extra...]` with one extra column per named track.
inline void write_marker_csv(std::ostream& out, const MarkerSeries& m,
                             const std::vector<std::pair<std::string, const MarkerSeries*>>& extra = {}) {
    out << "time,value";
    for (const auto& [name, _] : extra) out << ',' << name;
    out << '\n';
    for (std::size_t k = 0; k < m.size(); ++k) {
        out << detail::format_double(m.times[k]) << ',' << detail::format_double(m.values[k]);
        for (const auto& [_, track] : extra) out << ',' << detail::format_double(track->values[k]);
        out << '\n';
    }
}

inline MarkerSeries read_marker_csv(std::istream& in, MarkerKind kind) {
    MarkerSeries m;
    m.kind = kind;
    std::string line;
    std::size_t row = 0;
    bool header = true;
    while (std::getline(in, line)) {
        ++row;
        if (detail::trim(line).empty()) continue;
        if (header) {
            header = false;
            continue;
        }
        const auto cells = detail::split(line);
        if (cells.size() < 2) throw ParseError("marker rows need time and value", row);
        const auto t = detail::parse_double(cells[0]);
        const auto v = detail::parse_double(cells[1]);
        if (!t || !v) throw ParseError("cannot parse marker row", row);
        m.times.push_back(*t);
        m.values.push_back(*v);
    }
    return m;
}

/// One `onset,end` pair per line; '#' starts a comment.
inline std::vector<std::pair<double, double>> read_events(std::istream& in) {
    std::vector<std::pair<double, double>> events;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        std::string_view sv = line;
        if (auto hash = sv.find('#'); hash != std::string_view::npos) sv = sv.substr(0, hash);
        sv = detail::trim(sv);
        if (sv.empty()) continue;
        const auto cells = detail::split(sv);
        if (cells.size() != 2) throw ParseError("event lines are 'onset,end'", row);
        const auto on = detail::parse_double(cells[0]);
        const auto off = detail::parse_double(cells[1]);
        if (!on || !off) {
            // tolerate a header line such as "onset,end"
            if (events.empty() && row == 1) continue;
            throw ParseError("cannot parse event times", row);
        }
        if (*off < *on) throw ParseError("event ends before it starts", row);
        events.emplace_back(*on, *off);
    }
    return events;
}

}  // namespace cnm
