#pragma once

#include <charconv>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <type_traits>
#include <variant>
#include <vector>

#include "cnm/csv.hpp"
#include "cnm/error.hpp"
#include "cnm/models/genetic.hpp"
#include "cnm/models/linear_oracle.hpp"
#include "cnm/models/mutualistic.hpp"
#include "cnm/models/turing.hpp"
#include "cnm/series.hpp"

namespace cnm {

using ModelConfig = std::variant<GeneticConfig, MutualisticConfig, TuringConfig, LinearOracleConfig>;

inline std::string model_name(const ModelConfig& m) {
    switch (m.index()) {
        case 0: return "genetic";
        case 1: return "mutualistic";
        case 2: return "turing";
        default: return "linear-oracle";
    }
}

inline ModelConfig default_config(const std::string& model) {
    if (model == "genetic") return GeneticConfig{};
    if (model == "mutualistic") return MutualisticConfig{};
    if (model == "turing") return TuringConfig{};
    if (model == "linear-oracle") return LinearOracleConfig{};
    throw ConfigError("unknown model '" + model + "' (expected genetic, mutualistic, turing or linear-oracle)");
}

namespace detail {

inline double to_double(const std::string& key, std::string_view v) {
    const auto d = parse_double(trim(v));
    if (!d || !std::isfinite(*d)) throw ConfigError(key + ": '" + std::string(v) + "' is not a finite number");
    return *d;
}

template <class Int>
Int to_integer(const std::string& key, std::string_view v) {
    v = trim(v);
    Int out{};
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size() || v.empty()) {
        throw ConfigError(key + ": '" + std::string(v) + "' is not a non-negative integer");
    }
    return out;
}

inline bool to_bool(const std::string& key, std::string_view v) {
    v = trim(v);
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw ConfigError(key + ": expected true or false");
}

inline std::vector<double> to_list(const std::string& key, std::string_view v) {
    std::vector<double> out;
    for (auto cell : split(v, ',')) out.push_back(to_double(key, cell));
    return out;
}

inline std::string join(const std::vector<double>& v, char sep = ',') {
    std::string out;
    for (std::size_t k = 0; k < v.size(); ++k) {
        if (k) out += sep;
        out += format_double(v[k]);
    }
    return out;
}

/// Rows separated by ';', entries by ','.
inline Eigen::MatrixXd to_matrix(const std::string& key, std::string_view v) {
    std::vector<std::vector<double>> rows;
    for (auto row : split(v, ';')) {
        if (!row.empty()) rows.push_back(to_list(key, row));
    }
    if (rows.empty()) throw ConfigError(key + ": empty matrix");
    Eigen::MatrixXd M(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows.front().size()) throw ConfigError(key + ": ragged matrix");
        for (std::size_t j = 0; j < rows[i].size(); ++j) {
            M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return M;
}

inline std::string from_matrix(const Eigen::MatrixXd& M) {
    std::string out;
    for (Eigen::Index i = 0; i < M.rows(); ++i) {
        if (i) out += ';';
        for (Eigen::Index j = 0; j < M.cols(); ++j) {
            if (j) out += ',';
            out += format_double(M(i, j));
        }
    }
    return out;
}

template <class Cfg>
struct Field {
    std::string key;
    std::function<void(Cfg&, const std::string&)> set;
    std::function<std::string(const Cfg&)> get;
};

template <class Cfg>
Field<Cfg> real(std::string key, double Cfg::*member) {
    return {key, [key, member](Cfg& c, const std::string& v) { c.*member = to_double(key, v); },
            [member](const Cfg& c) { return format_double(c.*member); }};
}

template <class Cfg, class Int>
Field<Cfg> integer(std::string key, Int Cfg::*member) {
    return {key, [key, member](Cfg& c, const std::string& v) { c.*member = to_integer<Int>(key, v); },
            [member](const Cfg& c) { return std::to_string(c.*member); }};
}

inline const std::vector<Field<GeneticConfig>>& fields(const GeneticConfig*) {
    using C = GeneticConfig;
    static const std::vector<Field<C>> f{
        real("P", &C::P),
        {"P_end", [](C& c, const std::string& v) {
             if (trim(v).empty()) {
                 c.P_end.reset();
             } else {
                 c.P_end = to_double("P_end", v);
             }
         },
         [](const C& c) { return c.P_end ? format_double(*c.P_end) : std::string(); }},
        real("D", &C::D),
        real("dt", &C::dt),
        integer("substeps", &C::substeps),
        integer("steps", &C::steps),
        integer("burn_in", &C::burn_in),
        integer("seed", &C::seed),
    };
    return f;
}

inline const std::vector<Field<MutualisticConfig>>& fields(const MutualisticConfig*) {
    using C = MutualisticConfig;
    static const std::vector<Field<C>> f{
        integer("n", &C::n),
        integer("m", &C::m),
        {"M", [](C& c, const std::string& v) { c.M = trim(v).empty() ? Eigen::MatrixXd() : to_matrix("M", v); },
         [](const C& c) { return from_matrix(c.M); }},
        real("density", &C::density),
        integer("matrix_seed", &C::matrix_seed),
        real("B", &C::B),
        real("C", &C::C),
        real("K", &C::K),
        real("D", &C::D),
        real("E", &C::E),
        real("H", &C::H),
        real("s", &C::s),
        real("debuff", &C::debuff),
        real("noise", &C::noise),
        real("dt", &C::dt),
        integer("sample_every", &C::sample_every),
        integer("steps", &C::steps),
        integer("burn_in", &C::burn_in),
        integer("seed", &C::seed),
        {"initial", [](C& c, const std::string& v) { c.initial = std::string(trim(v)); },
         [](const C& c) { return c.initial; }},
    };
    return f;
}

inline const std::vector<Field<TuringConfig>>& fields(const TuringConfig*) {
    using C = TuringConfig;
    static const std::vector<Field<C>> f{
        real("r", &C::r),
        real("eps", &C::eps),
        real("beta", &C::beta),
        real("B", &C::B),
        real("eta", &C::eta),
        real("omega", &C::omega),
        real("D1", &C::D1),
        real("D2", &C::D2),
        real("K", &C::K),
        integer("grid", &C::grid),
        real("h", &C::h),
        real("dt", &C::dt),
        integer("seconds", &C::seconds),
        integer("burn_in_seconds", &C::burn_in_seconds),
        real("snapshot_seconds", &C::snapshot_seconds),
        real("noise", &C::noise),
        integer("seed", &C::seed),
        {"field", [](C& c, const std::string& v) { c.field = parse_turing_field(std::string(trim(v))); },
         [](const C& c) { return to_string(c.field); }},
    };
    return f;
}

inline const std::vector<Field<LinearOracleConfig>>& fields(const LinearOracleConfig*) {
    using C = LinearOracleConfig;
    static const std::vector<Field<C>> f{
        {"S", [](C& c, const std::string& v) { c.S = to_matrix("S", v); }, [](const C& c) { return from_matrix(c.S); }},
        {"eigenvalues", [](C& c, const std::string& v) { c.eigenvalues = to_list("eigenvalues", v); },
         [](const C& c) { return join(c.eigenvalues); }},
        {"lambda_max", [](C& c, const std::string& v) { c.set_lambda_max(to_double("lambda_max", v)); },
         [](const C& c) { return format_double(c.lambda_max()); }},
        {"noise_sd", [](C& c, const std::string& v) { c.noise_sd = to_list("noise_sd", v); },
         [](const C& c) { return join(c.noise_sd); }},
        integer("steps", &C::steps),
        integer("seed", &C::seed),
        {"stationary_start", [](C& c, const std::string& v) { c.stationary_start = to_bool("stationary_start", v); },
         [](const C& c) { return std::string(c.stationary_start ? "true" : "false"); }},
    };
    return f;
}

}  // namespace detail

/// Sets one key from its textual value; unknown keys are a ConfigError.
inline void set_parameter(ModelConfig& model, const std::string& key, const std::string& value) {
    std::visit(
        [&](auto& cfg) {
            for (const auto& f : detail::fields(&cfg)) {
                if (f.key == key) {
                    f.set(cfg, value);
                    return;
                }
            }
            throw ConfigError("model " + model_name(model) + " has no parameter '" + key + "'");
        },
        model);
}

inline void set_parameter(ModelConfig& model, const std::string& key, double value) {
    set_parameter(model, key, detail::format_double(value));
}

inline bool has_parameter(const ModelConfig& model, const std::string& key) {
    return std::visit(
        [&](const auto& cfg) {
            for (const auto& f : detail::fields(&cfg)) {
                if (f.key == key) return true;
            }
            return false;
        },
        model);
}

/// Every key with its current value, in declaration order.
inline std::vector<std::pair<std::string, std::string>> config_entries(const ModelConfig& model) {
    return std::visit(
        [](const auto& cfg) {
            std::vector<std::pair<std::string, std::string>> out;
            for (const auto& f : detail::fields(&cfg)) out.emplace_back(f.key, f.get(cfg));
            return out;
        },
        model);
}

inline std::uint64_t model_seed(const ModelConfig& model) {
    return std::visit([](const auto& cfg) { return static_cast<std::uint64_t>(cfg.seed); }, model);
}

inline void set_seed(ModelConfig& model, std::uint64_t seed) {
    std::visit([seed](auto& cfg) { cfg.seed = seed; }, model);
}

/// Splits "key=value" at the first '='.
inline std::pair<std::string, std::string> split_assignment(std::string_view text) {
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) throw ConfigError("expected key=value, got '" + std::string(text) + "'");
    const auto key = detail::trim(text.substr(0, eq));
    if (key.empty()) throw ConfigError("empty key in '" + std::string(text) + "'");
    return {std::string(key), std::string(detail::trim(text.substr(eq + 1)))};
}

/// Flat key=value lines; blank lines and '#' comments are skipped.
inline std::vector<std::pair<std::string, std::string>> read_key_values(std::istream& in) {
    std::vector<std::pair<std::string, std::string>> out;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        if (detail::trim(line).empty()) continue;
        try {
            out.push_back(split_assignment(line));
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(row) + ": " + e.what());
        }
    }
    return out;
}

inline void apply_key_values(ModelConfig& model, const std::vector<std::pair<std::string, std::string>>& kv) {
    for (const auto& [k, v] : kv) set_parameter(model, k, v);
}

inline void load_config_file(ModelConfig& model, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    apply_key_values(model, read_key_values(in));
}

inline void write_key_values(std::ostream& out, const ModelConfig& model) {
    out << "# model=" << model_name(model) << '\n';
    for (const auto& [k, v] : config_entries(model)) out << k << '=' << v << '\n';
}

inline MultivariateSeries simulate(const ModelConfig& model) {
    return std::visit(
        [](const auto& cfg) -> MultivariateSeries {
            using C = std::decay_t<decltype(cfg)>;
            if constexpr (std::is_same_v<C, GeneticConfig>) {
                return simulate_genetic(cfg);
            } else if constexpr (std::is_same_v<C, MutualisticConfig>) {
                return simulate_mutualistic(cfg);
            } else if constexpr (std::is_same_v<C, TuringConfig>) {
                return simulate_turing(cfg);
            } else {
                return simulate_linear_oracle(cfg);
            }
        },
        model);
}

}  // namespace cnm
