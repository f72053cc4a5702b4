#include <catch_amalgamated.hpp>

#include <cmath>
#include <map>
#include <random>
#include <tuple>

#include "cnm/causality.hpp"
#include "helpers.hpp"

using Catch::Approx;
using namespace cnm;

namespace {

// Conditional mutual information I(Y'; X | Y) summed term by term from the
// joint histogram, independent of the entropy-difference form.
double cmi_oracle(const std::vector<unsigned>& x, const std::vector<unsigned>& y) {
    std::map<std::tuple<unsigned, unsigned, unsigned>, double> pyyx;
    std::map<std::pair<unsigned, unsigned>, double> pyy, pyx;
    std::map<unsigned, double> py;
    const double n = static_cast<double>(y.size() - 1);
    for (std::size_t t = 0; t + 1 < y.size(); ++t) {
        pyyx[{y[t + 1], y[t], x[t]}] += 1.0 / n;
        pyy[{y[t + 1], y[t]}] += 1.0 / n;
        pyx[{y[t], x[t]}] += 1.0 / n;
        py[y[t]] += 1.0 / n;
    }
    double s = 0.0;
    for (const auto& [k, p] : pyyx) {
        const auto [yn, yc, xc] = k;
        s += p * std::log(p * py[yc] / (pyy[{yn, yc}] * pyx[{yc, xc}]));
    }
    return s;
}

}  // namespace

TEST_CASE("pearson_correlation examples") {
    const auto x = testutil::white_noise(100, 1);
    CHECK(pearson_correlation(x, x) == Approx(1.0));
    std::vector<double> y;
    for (double v : x) y.push_back(-2.0 * v + 7.0);
    CHECK(pearson_correlation(x, y) == Approx(-1.0));
    const auto a = testutil::white_noise(10000, 2), b = testutil::white_noise(10000, 3);
    CHECK(std::abs(pearson_correlation(a, b)) < 0.05);
    const std::vector<double> c1(10, 1.0), c2(10, 2.0);
    CHECK_THROWS_AS(pearson_correlation(c1, c2), DegenerateInput);
    CHECK(pearson_correlation(c1, testutil::white_noise(10, 4)) == 0.0);
}

TEST_CASE("GC of independent white noise is small") {
    const auto a = testutil::white_noise(100000, 11), b = testutil::white_noise(100000, 12);
    CHECK(granger_causality(a, b).value < 0.001);
}

TEST_CASE("GC on the AR fixture is ln 17") {
    const auto [src, tgt] = testutil::ar_pair(100000, 0.5, 0.4, 0.1, 5);
    CHECK(granger_causality(src, tgt).value == Approx(std::log(17.0)).margin(0.05));
    CHECK(transfer_entropy_gaussian(src, tgt).value == Approx(std::log(17.0) / 2.0).margin(0.025));
}

TEST_CASE("GC of a series onto itself takes the ridge path and is near zero") {
    std::mt19937_64 rng(3);
    std::normal_distribution<double> d;
    std::vector<double> x(5000);
    for (std::size_t t = 1; t < x.size(); ++t) x[t] = 0.8 * x[t - 1] + d(rng);
    const auto fit = granger_fit(x, x);
    CHECK(fit.ridge);
    CHECK(fit.strength() < 1e-6);
}

TEST_CASE("GC errors") {
    const std::vector<double> c(10, 1.0);
    const auto x = testutil::white_noise(10, 1);
    CHECK_THROWS_AS(granger_causality(x, c), DegenerateInput);
    const std::vector<double> three{1, 2, 3};
    CHECK_THROWS_AS(granger_causality(three, three), InsufficientData);
}

TEST_CASE("GC is invariant under affine rescaling") {
    std::mt19937_64 rng(99);
    std::uniform_real_distribution<double> u(0.2, 5.0), off(-100, 100), sign(0, 1);
    for (int trial = 0; trial < 100; ++trial) {
        auto [src, tgt] = testutil::ar_pair(500, 0.6, 0.3, 1.0, 1000 + trial);
        const double g0 = granger_causality(src, tgt).value;
        const double a = u(rng) * (sign(rng) < 0.5 ? -1 : 1), b = off(rng);
        const double c = u(rng) * (sign(rng) < 0.5 ? -1 : 1), e = off(rng);
        for (auto& v : src) v = a * v + b;
        for (auto& v : tgt) v = c * v + e;
        CHECK(granger_causality(src, tgt).value == Approx(g0).epsilon(1e-9));
    }
}

TEST_CASE("GC nesting: rss1 never exceeds rss0") {
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> len(4, 60);
    for (int trial = 0; trial < 500; ++trial) {
        const auto n = static_cast<std::size_t>(len(rng));
        const auto x = testutil::white_noise(n, 2 * trial), y = testutil::white_noise(n, 2 * trial + 1);
        const auto fit = granger_fit(x, y);
        CHECK(fit.rss1 <= fit.rss0 * (1.0 + 1e-9));
        CHECK(fit.n_eff == n - 1);
        CHECK(fit.strength() >= 0.0);
    }
}

TEST_CASE("TE gaussian is exactly half of GC") {
    for (int trial = 0; trial < 50; ++trial) {
        const auto [src, tgt] = testutil::ar_pair(200, 0.3, 0.5, 1.0, 300 + trial);
        CHECK(transfer_entropy_gaussian(src, tgt).value == granger_causality(src, tgt).value / 2.0);
    }
    const auto a = testutil::white_noise(100000, 21), b = testutil::white_noise(100000, 22);
    CHECK(transfer_entropy_gaussian(a, b).value < 0.0005);
}

TEST_CASE("binned TE of independent noise is small") {
    const auto a = testutil::white_noise(100000, 31), b = testutil::white_noise(100000, 32);
    CHECK(transfer_entropy_binned(a, b, 8).value < 0.005);
}

TEST_CASE("binned TE of the delayed binary copy is ln 2") {
    std::mt19937_64 rng(8);
    std::bernoulli_distribution coin(0.5);
    std::vector<double> x(100000), y(100000, 0.0);
    for (auto& v : x) v = coin(rng) ? 1.0 : 0.0;
    for (std::size_t t = 0; t + 1 < x.size(); ++t) y[t + 1] = x[t];
    CHECK(transfer_entropy_binned(x, y, 2).value == Approx(std::log(2.0)).margin(0.01));
}

TEST_CASE("binned TE with a constant target is zero and bins < 2 is rejected") {
    const std::vector<double> c(100, 4.0);
    const auto x = testutil::white_noise(100, 1);
    CHECK(transfer_entropy_binned(x, c).value == 0.0);
    CHECK_THROWS_AS(transfer_entropy_binned(x, x, 1), ConfigError);
}

TEST_CASE("binned TE matches the term-by-term CMI and is non-negative") {
    std::mt19937_64 rng(77);
    std::uniform_int_distribution<int> len(4, 200), bins(2, 10);
    for (int trial = 0; trial < 300; ++trial) {
        const auto n = static_cast<std::size_t>(len(rng));
        const auto b = static_cast<unsigned>(bins(rng));
        const auto x = testutil::white_noise(n, 5000 + trial), y = testutil::white_noise(n, 9000 + trial);
        const double te = transfer_entropy_binned(x, y, b).value;
        const double oracle = cmi_oracle(detail::discretize(x, b), detail::discretize(y, b));
        CHECK(te >= 0.0);
        CHECK(oracle > -1e-12);
        CHECK(te == Approx(std::max(0.0, oracle)).margin(1e-12));
    }
}

TEST_CASE("binned TE is invariant under increasing affine maps") {
    const auto [src, tgt] = testutil::ar_pair(5000, 0.5, 0.5, 0.5, 4);
    const double te = transfer_entropy_binned(src, tgt).value;
    std::vector<double> s2 = src, t2 = tgt;
    for (auto& v : s2) v *= 4.0;
    for (auto& v : t2) v *= 0.5;
    CHECK(transfer_entropy_binned(s2, t2).value == te);
    for (auto& v : s2) v = 3.7 * v - 11.0;
    CHECK(transfer_entropy_binned(s2, tgt).value == Approx(te).margin(2e-3));
}

TEST_CASE("binned TE agrees with the Gaussian TE on a linear-Gaussian pair") {
    const auto [src, tgt] = testutil::ar_pair(100000, 0.5, 0.4, 0.3, 6);
    const double gauss = transfer_entropy_gaussian(src, tgt).value;
    CHECK(transfer_entropy_binned(src, tgt, 12).value == Approx(gauss).epsilon(0.25));
}
