#include <catch_amalgamated.hpp>

#include <sstream>

#include "cnm/config.hpp"
#include "cnm/sweep.hpp"

using namespace cnm;
using Catch::Matchers::WithinAbs;

TEST_CASE("default configs exist for every model and reject unknown names", "[config]") {
    for (const std::string name : {"genetic", "mutualistic", "turing", "linear-oracle"}) {
        CHECK(model_name(default_config(name)) == name);
    }
    CHECK_THROWS_AS(default_config("lorenz"), ConfigError);
}

TEST_CASE("key=value files parse with comments and blank lines", "[config]") {
    std::istringstream in("# comment\n\nP = -1.5  # trailing\nseed=7\n");
    ModelConfig m = default_config("genetic");
    apply_key_values(m, read_key_values(in));
    const auto& g = std::get<GeneticConfig>(m);
    CHECK(g.P == -1.5);
    CHECK(model_seed(m) == 7);
}

TEST_CASE("malformed and unknown keys are config errors", "[config]") {
    std::istringstream bad("P=-1\nno equals sign\n");
    try {
        read_key_values(bad);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("line 2") != std::string::npos);
    }
    ModelConfig m = default_config("genetic");
    CHECK_THROWS_AS(set_parameter(m, "gamma", "1"), ConfigError);
    CHECK_THROWS_AS(set_parameter(m, "P", "abc"), ConfigError);
    CHECK_THROWS_AS(set_parameter(m, "steps", "-3"), ConfigError);
    ModelConfig t = default_config("turing");
    CHECK_THROWS_AS(set_parameter(t, "field", "Q"), ConfigError);
}

TEST_CASE("write_key_values round-trips every model", "[config]") {
    for (const std::string name : {"genetic", "mutualistic", "turing", "linear-oracle"}) {
        ModelConfig a = default_config(name);
        set_seed(a, 12345);
        std::ostringstream out;
        write_key_values(out, a);
        ModelConfig b = default_config(name);
        std::istringstream in(out.str());
        apply_key_values(b, read_key_values(in));
        CHECK(config_entries(a) == config_entries(b));
    }
}

TEST_CASE("matrix-valued keys round-trip", "[config]") {
    ModelConfig m = default_config("linear-oracle");
    set_parameter(m, "S", "2,0;0,1");
    set_parameter(m, "eigenvalues", "0.8,0.1");
    set_parameter(m, "noise_sd", "1,1");
    const auto& c = std::get<LinearOracleConfig>(m);
    CHECK(c.S.rows() == 2);
    CHECK(c.S(0, 0) == 2.0);
    CHECK(c.S(0, 1) == 0.0);
    CHECK_THROWS_AS(set_parameter(m, "S", "1,2;3"), ConfigError);
}

TEST_CASE("grid specs: inclusive ranges, lists and invalid input", "[sweep]") {
    const auto g = parse_grid_spec("K=1.2:2.4:5");
    CHECK(g.parameter == "K");
    REQUIRE(g.values.size() == 5);
    CHECK_THAT(g.values.front(), WithinAbs(1.2, 1e-12));
    CHECK_THAT(g.values.back(), WithinAbs(2.4, 1e-12));
    CHECK_THAT(g.values[2], WithinAbs(1.8, 1e-12));

    CHECK(parse_grid_spec("P=-4:-0.5:1").values == std::vector<double>{-4.0});

    const auto l = parse_grid_spec("K=1.2,1.5,2.0");
    CHECK(l.values == std::vector<double>{1.2, 1.5, 2.0});

    CHECK_THROWS_AS(parse_grid_spec("K=1:2:0"), ConfigError);
    CHECK_THROWS_AS(parse_grid_spec("K=1:2"), ConfigError);
    CHECK_THROWS_AS(parse_grid_spec("K1:2:3"), ConfigError);
}

namespace {

ModelConfig small_oracle() {
    ModelConfig m = default_config("linear-oracle");
    set_parameter(m, "steps", "4000");
    return m;
}

}  // namespace

TEST_CASE("sweep records failures per point and keeps going", "[sweep]") {
    const auto r = marker_sweep(small_oracle(), "lambda_max", {0.7, 1.5, 0.8}, {MarkerKind::CnmGc, MarkerKind::Dnb});
    REQUIRE(r.points.size() == 3);
    CHECK(r.points[0].status == "ok");
    CHECK(r.points[0].values[0].has_value());
    CHECK(r.points[1].status != "ok");
    CHECK_FALSE(r.points[1].values[0].has_value());
    CHECK(r.points[2].status == "ok");
    const auto best = sweep_argmax(r, 0);
    REQUIRE(best.has_value());
    CHECK(*best != 1);

    std::ostringstream csv;
    write_sweep_csv(csv, r);
    std::istringstream lines(csv.str());
    std::string header;
    std::getline(lines, header);
    CHECK(header == "lambda_max,seed,cnm-gc,dnb,spatial_variance,status");
}

TEST_CASE("sweep rejects unknown parameters and empty grids", "[sweep]") {
    CHECK_THROWS_AS(marker_sweep(small_oracle(), "gamma", {1.0}, {MarkerKind::CnmGc}), ConfigError);
    CHECK_THROWS_AS(marker_sweep(small_oracle(), "lambda_max", {}, {MarkerKind::CnmGc}), ConfigError);
    CHECK_THROWS_AS(marker_sweep(small_oracle(), "lambda_max", {0.5}, {}), ConfigError);
}

TEST_CASE("sweep is deterministic across reruns and job counts", "[sweep]") {
    SweepOptions one;
    one.jobs = 1;
    SweepOptions four = one;
    four.jobs = 4;
    const std::vector<double> grid{0.65, 0.75, 0.85, 0.95};
    const std::vector<MarkerKind> kinds{MarkerKind::CnmGc, MarkerKind::CnmTe, MarkerKind::Dnb};
    const auto a = marker_sweep(small_oracle(), "lambda_max", grid, kinds, one);
    const auto b = marker_sweep(small_oracle(), "lambda_max", grid, kinds, four);
    std::ostringstream ca, cb;
    write_sweep_csv(ca, a);
    write_sweep_csv(cb, b);
    CHECK(ca.str() == cb.str());
    for (const auto& p : a.points) CHECK(p.status == "ok");
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(a.points[k].seed == derive_seed(1, k));
}

TEST_CASE("sweep without seed derivation keeps the model seed", "[sweep]") {
    SweepOptions o;
    o.derive_seeds = false;
    ModelConfig m = small_oracle();
    set_seed(m, 99);
    const auto r = marker_sweep(m, "lambda_max", {0.7, 0.9}, {MarkerKind::CnmGc}, o);
    for (const auto& p : r.points) CHECK(p.seed == 99);
}

TEST_CASE("sweep tail window uses only the last samples", "[sweep]") {
    SweepOptions whole, tail;
    tail.tail_samples = 500;
    const auto a = marker_sweep(small_oracle(), "lambda_max", {0.8}, {MarkerKind::Dnb}, whole);
    const auto b = marker_sweep(small_oracle(), "lambda_max", {0.8}, {MarkerKind::Dnb}, tail);
    REQUIRE(a.points[0].values[0]);
    REQUIRE(b.points[0].values[0]);
    CHECK(*a.points[0].values[0] != *b.points[0].values[0]);
}
