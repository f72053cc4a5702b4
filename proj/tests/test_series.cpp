#include <catch_amalgamated.hpp>

#include <cmath>
#include <sstream>

#include "cnm/csv.hpp"
#include "cnm/series.hpp"
#include "helpers.hpp"

using Catch::Approx;
using namespace cnm;

TEST_CASE("read_csv with a time column sets dt") {
    std::ostringstream f;
    f << "t,a,b,c\n";
    for (int k = 0; k < 100; ++k) f << k * 0.01 << ',' << k << ',' << 2 * k << ',' << -k << '\n';
    std::istringstream in(f.str());
    const auto s = read_csv(in);
    CHECK(s.channels() == 3);
    CHECK(s.samples() == 100);
    CHECK(s.dt() == Approx(0.01));
    CHECK(s.names() == std::vector<std::string>{"a", "b", "c"});
    CHECK(s(1, 10) == 20.0);
}

TEST_CASE("read_csv reports the row of a wrong-arity line") {
    std::istringstream in("t,a,b\n0,1,2\n1,1\n2,3,4\n");
    try {
        read_csv(in);
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.row() == 3);
    }
}

TEST_CASE("read_csv without a time column takes dt from options") {
    std::istringstream in("a,b\n1,2\n3,4\n5,6\n");
    CsvOptions o;
    o.dt = 0.5;
    const auto s = read_csv(in, o);
    CHECK(s.dt() == 0.5);
    CHECK(s.samples() == 3);

    std::istringstream again("a,b\n1,2\n");
    CHECK_THROWS_AS(read_csv(again), ConfigError);
}

TEST_CASE("read_csv rejects uneven timestamps and non-finite cells") {
    std::istringstream uneven("t,a\n0,1\n1,2\n2.5,3\n");
    CHECK_THROWS_AS(read_csv(uneven), FormatError);
    std::istringstream nan("t,a\n0,1\n1,nan\n");
    CHECK_THROWS_AS(read_csv(nan), DataError);
    std::istringstream junk("t,a\n0,1\n1,x\n");
    CHECK_THROWS_AS(read_csv(junk), ParseError);
}

TEST_CASE("write_csv then read_csv round-trips") {
    const auto s = testutil::make_series({testutil::white_noise(50, 1), testutil::white_noise(50, 2, 1e-7)}, 0.25);
    std::ostringstream out;
    write_csv(out, s);
    std::istringstream in(out.str());
    const auto r = read_csv(in);
    REQUIRE(r.channels() == 2);
    REQUIRE(r.samples() == 50);
    CHECK(r.dt() == Approx(0.25).epsilon(1e-12));
    for (std::size_t c = 0; c < 2; ++c) {
        for (std::size_t t = 0; t < 50; ++t) CHECK(r(c, t) == Approx(s(c, t)).epsilon(1e-9));
    }
}

TEST_CASE("node_variances uses the unbiased divisor") {
    const auto s = testutil::make_series({{5, 5, 5}, {0, 2, 1}});
    const auto v = node_variances(extract_window(s, 0, 3));
    CHECK(v[0] == 0.0);
    CHECK(v[1] == Approx(1.0));
    const std::vector<double> two{0.0, 2.0};
    CHECK(sample_variance(two) == Approx(2.0));
    const std::vector<double> one{1.0};
    CHECK_THROWS_AS(sample_variance(one), InsufficientData);
}

TEST_CASE("node_variances is translation invariant and scales quadratically") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-5, 5);
    for (int trial = 0; trial < 50; ++trial) {
        auto x = testutil::white_noise(40, 100 + trial);
        const double shift = u(rng), scale = u(rng);
        std::vector<double> shifted = x, scaled = x;
        for (auto& v : shifted) v += shift;
        for (auto& v : scaled) v *= scale;
        const double base = sample_variance(x);
        CHECK(sample_variance(shifted) == Approx(base).epsilon(1e-12));
        CHECK(sample_variance(scaled) == Approx(base * scale * scale).epsilon(1e-12));
    }
}

TEST_CASE("extract_window bounds") {
    const auto s = testutil::make_series({{1, 2, 3, 4, 5}, {5, 4, 3, 2, 1}});
    const auto whole = extract_window(s, 0, 5);
    CHECK(whole.length() == 5);
    const auto last = extract_window(s, 2, 3);
    CHECK(last.channel(0)[0] == 3.0);
    CHECK(last.end_time() == 4.0);
    CHECK_THROWS_AS(extract_window(s, 5, 1), BoundsError);
    CHECK_THROWS_AS(extract_window(s, 3, 3), BoundsError);
    CHECK_THROWS_AS(extract_window(s, 0, 2), BoundsError);
}

TEST_CASE("series construction validates input") {
    CHECK_THROWS_AS(MultivariateSeries({"a"}, 0.0, {1.0}), DataError);
    CHECK_THROWS_AS(MultivariateSeries({"a", "b"}, 1.0, {1.0, 2.0, 3.0}), DataError);
    CHECK_THROWS_AS(MultivariateSeries({"a"}, 1.0, {1.0, INFINITY}), DataError);
}

TEST_CASE("moving_average examples") {
    const auto constant = moving_average(testutil::make_marker(std::vector<double>(20, 3.0)), 5.0);
    for (double v : constant.values) CHECK(v == Approx(3.0));

    const auto impulse = moving_average(testutil::make_marker({0, 0, 10, 0, 0}), 2.0);
    CHECK(impulse.values == std::vector<double>{0, 0, 5, 5, 0});

    CHECK_THROWS_AS(moving_average(MarkerSeries{}, 5.0), EmptyInput);
}

TEST_CASE("moving_average of a ramp lags by v(width - dt)/2") {
    std::vector<double> ramp;
    const double v = 0.7;
    for (int k = 0; k < 100; ++k) ramp.push_back(v * k * 0.5);
    const auto m = testutil::make_marker(ramp, 0.5);
    const auto ma = moving_average(m, 6.0);
    for (std::size_t k = 20; k < 100; ++k) CHECK(ma.values[k] == Approx(ramp[k] - v * (6.0 - 0.5) / 2.0));
}

TEST_CASE("moving_average with width one interval is the identity") {
    const auto m = testutil::make_marker(testutil::white_noise(30, 3), 0.1);
    const auto ma = moving_average(m, 0.1);
    CHECK(ma.values == m.values);
}

TEST_CASE("read_events skips comments and a header") {
    std::istringstream in("onset,end\n# first seizure\n10,20\n30,35 # second\n");
    const auto ev = read_events(in);
    REQUIRE(ev.size() == 2);
    CHECK(ev[1].first == 30.0);
    CHECK(ev[1].second == 35.0);
}
