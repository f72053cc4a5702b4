#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cnm/error.hpp"

namespace cnm {

/// n named channels sampled at a fixed interval. Storage is channel-major so
/// every channel is a contiguous span.
class MultivariateSeries {
public:
    MultivariateSeries() = default;

    /// `data` holds channel 0's samples, then channel 1's, and so on.
    MultivariateSeries(std::vector<std::string> names, double dt, std::vector<double> data,
                       double start_time = 0.0)
        : names_(std::move(names)), dt_(dt), start_time_(start_time), data_(std::move(data)) {
        if (!(dt_ > 0.0) || !std::isfinite(dt_)) throw DataError("sampling interval must be positive");
        if (names_.empty()) {
            if (!data_.empty()) throw DataError("samples given without channels");
            return;
        }
        if (data_.size() % names_.size() != 0) throw DataError("channels have unequal lengths");
        samples_ = data_.size() / names_.size();
        for (std::size_t k = 0; k < data_.size(); ++k) {
            if (!std::isfinite(data_[k])) {
                throw DataError("non-finite value in channel '" + names_[k / samples_] + "' at sample " +
                                std::to_string(k % samples_));
            }
        }
    }

    /// Builds a series from one vector per channel.
    static MultivariateSeries from_channels(std::vector<std::string> names, double dt,
                                            const std::vector<std::vector<double>>& channels,
                                            double start_time = 0.0) {
        if (names.size() != channels.size()) throw DataError("channel name count does not match data");
        std::vector<double> flat;
        const std::size_t len = channels.empty() ? 0 : channels.front().size();
        flat.reserve(len * channels.size());
        for (const auto& c : channels) {
            if (c.size() != len) throw DataError("channels have unequal lengths");
            flat.insert(flat.end(), c.begin(), c.end());
        }
        return MultivariateSeries(std::move(names), dt, std::move(flat), start_time);
    }

    std::size_t channels() const noexcept { return names_.size(); }
    std::size_t samples() const noexcept { return samples_; }
    double dt() const noexcept { return dt_; }
    double start_time() const noexcept { return start_time_; }
    double time(std::size_t sample) const noexcept { return start_time_ + static_cast<double>(sample) * dt_; }
    const std::vector<std::string>& names() const noexcept { return names_; }

    std::span<const double> channel(std::size_t c) const {
        return std::span<const double>(data_).subspan(c * samples_, samples_);
    }
    double operator()(std::size_t c, std::size_t t) const { return data_[c * samples_ + t]; }

    /// Index of a channel by name, or channels() when absent.
    std::size_t find(const std::string& name) const {
        auto it = std::find(names_.begin(), names_.end(), name);
        return static_cast<std::size_t>(it - names_.begin());
    }

private:
    std::vector<std::string> names_;
    double dt_ = 1.0;
    double start_time_ = 0.0;
    std::size_t samples_ = 0;
    std::vector<double> data_;
};

/// Non-owning view of a contiguous time slab of a series. The parent must
/// outlive the window.
class Window {
public:
    Window(const MultivariateSeries& parent, std::size_t start, std::size_t length)
        : parent_(&parent), start_(start), length_(length) {}

    const MultivariateSeries& parent() const noexcept { return *parent_; }
    std::size_t start() const noexcept { return start_; }
    std::size_t length() const noexcept { return length_; }
    std::size_t channels() const noexcept { return parent_->channels(); }
    std::span<const double> channel(std::size_t c) const { return parent_->channel(c).subspan(start_, length_); }
    double end_time() const noexcept { return parent_->time(start_ + length_ - 1); }

private:
    const MultivariateSeries* parent_;
    std::size_t start_;
    std::size_t length_;
};

inline constexpr std::size_t kMinWindowLength = 3;

inline Window extract_window(const MultivariateSeries& s, std::size_t start, std::size_t length) {
    if (length < kMinWindowLength) {
        throw BoundsError("window length " + std::to_string(length) + " is below the minimum of 3");
    }
    if (start >= s.samples() || length > s.samples() - start) {
        throw BoundsError("window [" + std::to_string(start) + ", " + std::to_string(start + length) +
                          ") exceeds " + std::to_string(s.samples()) + " samples");
    }
    return Window(s, start, length);
}

inline double mean(std::span<const double> x) {
    if (x.empty()) throw EmptyInput("mean of an empty sequence");
    return std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(x.size());
}

/// Unbiased sample variance (divisor n - 1), two-pass.
inline double sample_variance(std::span<const double> x) {
    if (x.size() < 2) throw InsufficientData("variance needs at least 2 samples");
    const double m = mean(x);
    double ss = 0.0;
    for (double v : x) ss += (v - m) * (v - m);
    return ss / static_cast<double>(x.size() - 1);
}

inline std::vector<double> node_variances(const Window& w) {
    if (w.length() < 2) throw InsufficientData("variance needs at least 2 samples");
    std::vector<double> out(w.channels());
    for (std::size_t c = 0; c < w.channels(); ++c) out[c] = sample_variance(w.channel(c));
    return out;
}

/// Copies a sequence with its mean removed.
inline std::vector<double> centered(std::span<const double> x) {
    const double m = mean(x);
    std::vector<double> out(x.begin(), x.end());
    for (double& v : out) v -= m;
    return out;
}

enum class MarkerKind { CnmGc, CnmTe, Dnb };

inline std::string to_string(MarkerKind k) {
    switch (k) {
        case MarkerKind::CnmGc: return "cnm-gc";
        case MarkerKind::CnmTe: return "cnm-te";
        case MarkerKind::Dnb: return "dnb";
    }
    return "unknown";
}

inline MarkerKind parse_marker_kind(const std::string& s) {
    if (s == "cnm-gc") return MarkerKind::CnmGc;
    if (s == "cnm-te") return MarkerKind::CnmTe;
    if (s == "dnb") return MarkerKind::Dnb;
    throw ConfigError("unknown marker kind '" + s + "' (expected cnm-gc, cnm-te or dnb)");
}

/// Marker values stamped at window end times. Times are strictly increasing;
/// windows that failed to evaluate are simply absent.
struct MarkerSeries {
    MarkerKind kind = MarkerKind::CnmGc;
    std::vector<double> times;
    std::vector<double> values;
    std::size_t window_length = 0;
    std::size_t stride = 1;

    std::size_t size() const noexcept { return times.size(); }
    bool empty() const noexcept { return times.empty(); }
};

/// Trailing moving average: the output at time t averages every point in
/// (t - width, t]. Early points average whatever history exists.
inline MarkerSeries moving_average(const MarkerSeries& m, double width_seconds) {
    if (m.empty()) throw EmptyInput("moving average of an empty marker series");
    if (!(width_seconds > 0.0)) throw ConfigError("moving-average width must be positive");
    MarkerSeries out = m;
    const double slack = 1e-9 * width_seconds;
    std::size_t lo = 0;
    for (std::size_t k = 0; k < m.size(); ++k) {
        while (m.times[lo] <= m.times[k] - width_seconds + slack) ++lo;
        // Summed afresh: clipped 1e12 values would poison a running sum.
        double sum = 0.0;
        for (std::size_t j = lo; j <= k; ++j) sum += m.values[j];
        out.values[k] = sum / static_cast<double>(k - lo + 1);
    }
    return out;
}

}  // namespace cnm
