// cnm: simulate benchmark systems, compute marker streams, sweep parameters
// and score warnings against annotated events.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "cnm/cnm.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kVersion = "0.1.0";
constexpr int kExitUsage = 2;
constexpr int kExitRuntime = 3;

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string config;
    std::vector<std::string> sets;
    std::optional<std::uint64_t> seed;
    std::string out;
    unsigned jobs = cnm::default_jobs();
    bool force = false;
};

void add_common(CLI::App* cmd, Common& c, bool out_required = true) {
    cmd->add_option("--config", c.config, "key=value config file");
    cmd->add_option("--set", c.sets, "override one key (key=value), repeatable");
    cmd->add_option("--seed", c.seed, "master seed");
    auto* out = cmd->add_option("--out", c.out, "output path");
    if (out_required) out->required();
    cmd->add_option("--jobs", c.jobs, "worker threads")->check(CLI::PositiveNumber);
    cmd->add_flag("--force", c.force, "overwrite existing outputs");
}

void refuse_overwrite(const fs::path& p, bool force) {
    if (!force && fs::exists(p)) throw UsageError("refusing to overwrite " + p.string() + " (use --force)");
}

/// Writes through a temporary sibling and renames it into place.
void write_atomic(const fs::path& p, const std::string& content) {
    fs::path tmp = p;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary);
        if (!out) throw cnm::ConfigError("cannot write " + tmp.string());
        out << content;
        if (!out) throw cnm::ConfigError("write failed for " + tmp.string());
    }
    fs::rename(tmp, p);
}

cnm::ModelConfig load_model(const std::string& name, const Common& c) {
    cnm::ModelConfig m = cnm::default_config(name);
    if (!c.config.empty()) cnm::load_config_file(m, c.config);
    for (const auto& s : c.sets) {
        const auto [k, v] = cnm::split_assignment(s);
        cnm::set_parameter(m, k, v);
    }
    if (c.seed) cnm::set_seed(m, *c.seed);
    return m;
}

json config_json(const cnm::ModelConfig& m) {
    json j = json::object();
    for (const auto& [k, v] : cnm::config_entries(m)) j[k] = v;
    return j;
}

json base_manifest(const std::string& command, int argc, char** argv) {
    json j;
    j["command"] = command;
    std::vector<std::string> args(argv, argv + argc);
    j["argv"] = args;
    j["tool_version"] = kVersion;
    return j;
}

void finish_manifest(json& j, const fs::path& path, std::chrono::steady_clock::time_point start) {
    j["wall_seconds"] = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_atomic(path, j.dump(2) + "\n");
}

std::vector<cnm::MarkerKind> parse_kinds(const std::string& list) {
    std::vector<cnm::MarkerKind> out;
    for (auto k : cnm::detail::split(list, ',')) {
        if (!k.empty()) out.push_back(cnm::parse_marker_kind(std::string(k)));
    }
    if (out.empty()) throw cnm::ConfigError("no marker kinds given");
    return out;
}

std::vector<double> read_warning_times(const fs::path& p) {
    std::ifstream in(p);
    if (!in) throw cnm::ConfigError("cannot open " + p.string());
    std::vector<double> out;
    std::string line;
    std::size_t row = 0;
    while (std::getline(in, line)) {
        ++row;
        const auto cell = cnm::detail::trim(line);
        if (cell.empty() || row == 1) continue;
        const auto v = cnm::detail::parse_double(cell);
        if (!v) throw cnm::ParseError("bad warning time in " + p.string(), row);
        out.push_back(*v);
    }
    return out;
}

// ---- simulate ----

struct SimulateArgs {
    std::string model;
    Common common;
};

int run_simulate(const SimulateArgs& a, int argc, char** argv) {
    const auto start = std::chrono::steady_clock::now();
    const cnm::ModelConfig model = load_model(a.model, a.common);
    const fs::path out = a.common.out;
    fs::path manifest = out;
    manifest += ".manifest.json";
    refuse_overwrite(out, a.common.force);
    refuse_overwrite(manifest, a.common.force);

    const cnm::MultivariateSeries s = cnm::simulate(model);
    std::ostringstream csv;
    cnm::write_csv(csv, s);
    write_atomic(out, csv.str());

    json j = base_manifest("simulate", argc, argv);
    j["model"] = cnm::model_name(model);
    j["config"] = config_json(model);
    j["seed"] = cnm::model_seed(model);
    j["outputs"] = {out.string()};
    finish_manifest(j, manifest, start);
    std::cout << "wrote " << out.string() << " (" << s.channels() << " channels, " << s.samples() << " rows)\n";
    return 0;
}

// ---- detect ----

struct DetectArgs {
    std::string input;
    std::string markers = "cnm-gc,cnm-te,dnb";
    std::size_t window = 30;
    std::size_t stride = 1;
    std::string grouping = "per-window";
    std::string grouping_file;
    std::optional<double> dt;
    unsigned te_bins = cnm::kDefaultTeBins;
    double baseline = 30.0;
    double kappa = 3.0;
    Common common;
};

int run_detect(const DetectArgs& a, int argc, char** argv) {
    const auto start = std::chrono::steady_clock::now();
    cnm::CsvOptions copts;
    copts.dt = a.dt;
    const cnm::MultivariateSeries s = cnm::load_csv(a.input, copts);
    if (s.channels() < 2) throw cnm::DataError("detect needs at least 2 channels");
    const auto kinds = parse_kinds(a.markers);

    cnm::StreamOptions opts;
    opts.window_length = a.window;
    opts.stride = a.stride;
    opts.grouping = cnm::parse_grouping_mode(a.grouping);
    opts.estimator.te_bins = a.te_bins;
    opts.jobs = a.common.jobs;
    if (!a.grouping_file.empty()) {
        std::ifstream g(a.grouping_file);
        if (!g) throw cnm::ConfigError("cannot open grouping file " + a.grouping_file);
        opts.fixed_grouping = cnm::read_grouping(g, s.names());
    }
    cnm::WarningOptions wopts{a.baseline, a.kappa};

    const fs::path dir = a.common.out;
    fs::create_directories(dir);
    const fs::path manifest = dir / "manifest.json";
    refuse_overwrite(manifest, a.common.force);
    for (auto kind : kinds) {
        const std::string n = cnm::to_string(kind);
        refuse_overwrite(dir / (n + ".csv"), a.common.force);
        refuse_overwrite(dir / (n + "_warnings.csv"), a.common.force);
        refuse_overwrite(dir / (n + ".svg"), a.common.force);
    }

    json j = base_manifest("detect", argc, argv);
    j["input"] = a.input;
    j["stream"] = {{"window", a.window}, {"stride", a.stride}, {"grouping", a.grouping},
                   {"grouping_file", a.grouping_file}, {"te_bins", a.te_bins}};
    j["warning"] = {{"baseline_seconds", a.baseline}, {"kappa", a.kappa}};
    json outputs = json::array();

    for (auto kind : kinds) {
        const std::string n = cnm::to_string(kind);
        const cnm::MarkerSeries m = cnm::marker_stream(s, kind, opts);
        if (m.empty()) throw cnm::DegenerateInput(n + ": every window failed to evaluate");
        const auto ma5 = cnm::moving_average(m, 5.0);
        const auto ma12 = cnm::moving_average(m, 12.0);
        std::ostringstream csv;
        cnm::write_marker_csv(csv, m, {{"ma5", &ma5}, {"ma12", &ma12}});
        write_atomic(dir / (n + ".csv"), csv.str());

        const auto warnings = cnm::detect_warning(m, wopts);
        std::ostringstream w;
        w << "time\n";
        for (double t : warnings) w << cnm::detail::format_double(t) << '\n';
        write_atomic(dir / (n + "_warnings.csv"), w.str());

        // The plot is rendered from the files just written.
        std::ifstream back(dir / (n + ".csv"));
        const cnm::MarkerSeries raw = cnm::read_marker_csv(back, kind);
        cnm::SvgChart chart;
        chart.title = n;
        chart.x_label = "time (s)";
        chart.y_label = n;
        chart.log_y = kind != cnm::MarkerKind::Dnb;
        chart.tracks.push_back({"raw", raw.times, raw.values, "#9ecae1"});
        chart.tracks.push_back({"ma5", raw.times, cnm::moving_average(raw, 5.0).values, "#1f77b4"});
        chart.tracks.push_back({"ma12", raw.times, cnm::moving_average(raw, 12.0).values, "#2ca02c"});
        chart.ticks = read_warning_times(dir / (n + "_warnings.csv"));
        write_atomic(dir / (n + ".svg"), cnm::render_svg(chart));

        outputs.push_back(n + ".csv");
        outputs.push_back(n + "_warnings.csv");
        outputs.push_back(n + ".svg");
        std::cout << n << ": " << m.size() << " values, " << warnings.size() << " warnings\n";
    }
    j["outputs"] = outputs;
    finish_manifest(j, manifest, start);
    return 0;
}

// ---- sweep ----

struct SweepArgs {
    std::string model;
    std::string grid;
    std::string markers = "cnm-gc,cnm-te";
    std::size_t tail = 0;
    unsigned te_bins = cnm::kDefaultTeBins;
    Common common;
};

int run_sweep(const SweepArgs& a, int argc, char** argv) {
    const auto start = std::chrono::steady_clock::now();
    const cnm::ModelConfig model = load_model(a.model, a.common);
    const cnm::GridSpec grid = cnm::parse_grid_spec(a.grid);
    const auto kinds = parse_kinds(a.markers);

    cnm::SweepOptions opts;
    opts.tail_samples = a.tail;
    opts.estimator.te_bins = a.te_bins;
    opts.jobs = a.common.jobs;
    opts.master_seed = a.common.seed.value_or(cnm::model_seed(model));

    const fs::path dir = a.common.out;
    fs::create_directories(dir);
    refuse_overwrite(dir / "sweep.csv", a.common.force);
    refuse_overwrite(dir / "sweep.svg", a.common.force);
    refuse_overwrite(dir / "manifest.json", a.common.force);

    const cnm::SweepResult r = cnm::marker_sweep(model, grid.parameter, grid.values, kinds, opts);
    std::ostringstream csv;
    cnm::write_sweep_csv(csv, r);
    write_atomic(dir / "sweep.csv", csv.str());

    // Plot from the written CSV.
    cnm::SvgChart chart;
    chart.title = cnm::model_name(model) + " sweep over " + grid.parameter;
    chart.x_label = grid.parameter;
    chart.y_label = "marker";
    chart.log_y = true;
    {
        std::ifstream back(dir / "sweep.csv");
        std::string line;
        std::getline(back, line);
        std::vector<std::vector<double>> cols(kinds.size());
        std::vector<double> xs;
        while (std::getline(back, line)) {
            const auto cells = cnm::detail::split(line);
            xs.push_back(cnm::detail::parse_double(cells[0]).value_or(std::nan("")));
            for (std::size_t k = 0; k < kinds.size(); ++k) {
                cols[k].push_back(cnm::detail::parse_double(cells[2 + k]).value_or(std::nan("")));
            }
        }
        const char* colors[] = {"#1f77b4", "#ff7f0e", "#2ca02c"};
        for (std::size_t k = 0; k < kinds.size(); ++k) {
            chart.tracks.push_back({cnm::to_string(kinds[k]), xs, cols[k], colors[k % 3]});
        }
    }
    write_atomic(dir / "sweep.svg", cnm::render_svg(chart));

    json j = base_manifest("sweep", argc, argv);
    j["model"] = cnm::model_name(model);
    j["config"] = config_json(model);
    j["grid"] = {{"parameter", grid.parameter}, {"values", grid.values}};
    j["master_seed"] = opts.master_seed;
    json seeds = json::array();
    for (const auto& p : r.points) seeds.push_back(p.seed);
    j["point_seeds"] = seeds;
    j["tail_samples"] = a.tail;
    j["te_bins"] = a.te_bins;
    j["outputs"] = {"sweep.csv", "sweep.svg"};
    finish_manifest(j, dir / "manifest.json", start);

    std::size_t failed = 0;
    for (const auto& p : r.points) failed += p.status == "ok" ? 0 : 1;
    std::cout << "wrote " << (dir / "sweep.csv").string() << " (" << r.points.size() << " points, " << failed
              << " failed)\n";
    return 0;
}

// ---- report ----

struct ReportArgs {
    std::string run_dir;
    std::string events;
    double lead = 60.0;
    std::string out;
    bool force = false;
};

int run_report(const ReportArgs& a, int argc, char** argv) {
    const auto start = std::chrono::steady_clock::now();
    const fs::path run = a.run_dir;
    if (!fs::is_directory(run)) throw cnm::ConfigError("run directory " + run.string() + " does not exist");
    std::ifstream ev(a.events);
    if (!ev) throw cnm::ConfigError("cannot open events file " + a.events);
    std::vector<cnm::Event> events;
    for (const auto& [on, off] : cnm::read_events(ev)) events.push_back({on, off});
    if (events.empty()) throw cnm::EmptyInput("events file lists no events");

    std::vector<std::pair<std::string, cnm::WarningReport>> columns;
    std::vector<std::vector<double>> cnm_members;
    for (auto kind : {cnm::MarkerKind::CnmGc, cnm::MarkerKind::CnmTe, cnm::MarkerKind::Dnb}) {
        const std::string n = cnm::to_string(kind);
        const fs::path p = run / (n + "_warnings.csv");
        if (!fs::exists(p)) continue;
        auto warnings = read_warning_times(p);
        columns.emplace_back(n, cnm::evaluate_warnings(warnings, events, a.lead));
        if (kind != cnm::MarkerKind::Dnb) cnm_members.push_back(std::move(warnings));
    }
    if (columns.empty()) throw cnm::ConfigError("no *_warnings.csv files in " + run.string());
    if (!cnm_members.empty()) {
        columns.emplace_back("cnms", cnm::evaluate_combination(cnm_members, events, a.lead, cnm::Combination::Any));
    }

    const fs::path dir = a.out.empty() ? run : fs::path(a.out);
    fs::create_directories(dir);
    refuse_overwrite(dir / "report.txt", a.force);
    for (const auto& [n, _] : columns) refuse_overwrite(dir / (n + "_report.csv"), a.force);

    const std::string table = cnm::format_report_table(columns);
    write_atomic(dir / "report.txt", table);
    for (const auto& [n, r] : columns) {
        std::ostringstream csv;
        csv << "event,onset,valid\n";
        for (std::size_t k = 0; k < r.events.size(); ++k) {
            csv << k + 1 << ',' << cnm::detail::format_double(r.events[k].onset) << ','
                << (r.per_event_valid[k] ? 1 : 0) << '\n';
        }
        write_atomic(dir / (n + "_report.csv"), csv.str());
    }
    json j = base_manifest("report", argc, argv);
    j["run_dir"] = run.string();
    j["events"] = a.events;
    j["lead_seconds"] = a.lead;
    json acc = json::object();
    for (const auto& [n, r] : columns) acc[n] = r.accuracy;
    j["accuracy"] = acc;
    finish_manifest(j, dir / "report_manifest.json", start);
    std::cout << table;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Causal network markers for tipping-point detection"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    SimulateArgs sim;
    auto* simulate = app.add_subcommand("simulate", "simulate a benchmark model to CSV");
    simulate->add_option("model", sim.model, "genetic | mutualistic | turing | linear-oracle")->required();
    add_common(simulate, sim.common);

    DetectArgs det;
    auto* detect = app.add_subcommand("detect", "marker streams and warnings for a CSV");
    detect->add_option("input", det.input, "input CSV")->required();
    detect->add_option("--marker", det.markers, "comma list of cnm-gc, cnm-te, dnb");
    detect->add_option("--window", det.window, "window length in samples");
    detect->add_option("--stride", det.stride, "window stride in samples");
    detect->add_option("--grouping", det.grouping, "per-window | frozen");
    detect->add_option("--grouping-file", det.grouping_file, "fixed DG/NDG file");
    detect->add_option("--dt", det.dt, "sample interval when the CSV has no t column");
    detect->add_option("--te-bins", det.te_bins, "bins per variable for binned TE");
    detect->add_option("--baseline", det.baseline, "warning baseline in seconds");
    detect->add_option("--kappa", det.kappa, "warning threshold in baseline sds");
    add_common(detect, det.common);

    SweepArgs sw;
    auto* sweep = app.add_subcommand("sweep", "marker versus a model parameter");
    sweep->add_option("model", sw.model, "model name")->required();
    sweep->add_option("grid", sw.grid, "name=start:stop:steps or name=v1,v2,...")->required();
    sweep->add_option("--marker", sw.markers, "comma list of cnm-gc, cnm-te, dnb");
    sweep->add_option("--tail", sw.tail, "samples in the evaluation window (0 = whole run)");
    sweep->add_option("--te-bins", sw.te_bins, "bins per variable for binned TE");
    add_common(sweep, sw.common);

    ReportArgs rep;
    auto* report = app.add_subcommand("report", "score warnings against events");
    report->add_option("run_dir", rep.run_dir, "directory written by detect")->required();
    report->add_option("--events", rep.events, "onset,end per line")->required();
    report->add_option("--lead", rep.lead, "lead window in seconds");
    report->add_option("--out", rep.out, "output directory (default: run_dir)");
    report->add_flag("--force", rep.force, "overwrite existing outputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*simulate) return run_simulate(sim, argc, argv);
        if (*detect) return run_detect(det, argc, argv);
        if (*sweep) return run_sweep(sw, argc, argv);
        if (*report) return run_report(rep, argc, argv);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const cnm::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const cnm::ParseError& e) {
        std::cerr << "parse error (line " << e.row() << "): " << e.what() << '\n';
        return kExitUsage;
    } catch (const cnm::FormatError& e) {
        std::cerr << "format error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const cnm::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const cnm::EmptyInput& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "runtime error: " << e.what() << '\n';
        return kExitRuntime;
    }
    return kExitUsage;
}
