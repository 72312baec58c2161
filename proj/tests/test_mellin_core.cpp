#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/math/special_functions/erf.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cmath>
#include <numbers>

#include "expsample/errors.hpp"
#include "expsample/kernels.hpp"
#include "expsample/mellin_core.hpp"
#include "oracles.hpp"

using namespace expsample;

TEST_CASE("integrate_log: constants and low-degree polynomials") {
    const QuadratureConfig cfg;
    CHECK(integrate_log([](double) { return 1.0; }, {0.0, 1.0}, cfg) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(std::abs(integrate_log([](double u) { return u * u; }, {0.0, 1.0}, cfg) - 1.0 / 3.0) < 1e-15);
    CHECK(integrate_log([](double) { return 5.0; }, {2.0, 2.0}, cfg) == 0.0);
}

TEST_CASE("integrate_log: Gaussian against a 50-digit reference") {
    using boost::multiprecision::cpp_bin_float_50;
    const cpp_bin_float_50 six = 6;
    const cpp_bin_float_50 ref = sqrt(boost::math::constants::pi<cpp_bin_float_50>()) * boost::math::erf(six);
    const double got = integrate_log([](double u) { return std::exp(-u * u); }, {-6.0, 6.0}, QuadratureConfig{});
    CHECK(std::abs(got - static_cast<double>(ref)) <= 1e-12);
}

TEST_CASE("integrate_log: exact up to the Gauss degree bound") {
    // Width 1, panels of 0.5 with 10 nodes each: exact through degree 19.
    const QuadratureConfig cfg;
    CHECK(panel_layout(1.0, cfg).panels == 2);
    CHECK(panel_layout(1.0, cfg).nodes == 10);
    for (int d = 0; d <= 19; ++d) {
        const double got = integrate_log([d](double u) { return std::pow(u, d); }, {0.0, 1.0}, cfg);
        const double exact = 1.0 / (d + 1);
        CHECK(std::abs(got - exact) <= 1e-13 * exact);
    }
}

TEST_CASE("integrate_log: linearity on random polynomials") {
    const QuadratureConfig cfg;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> a(6), b(6);
        for (auto& c : a) c = oracle::uniform(-3, 3);
        for (auto& c : b) c = oracle::uniform(-3, 3);
        const double alpha = oracle::uniform(-10, 10);
        auto poly = [](const std::vector<double>& c, double u) {
            double s = 0.0;
            for (auto it = c.rbegin(); it != c.rend(); ++it) s = s * u + *it;
            return s;
        };
        const LogInterval iv{oracle::uniform(-2, 0), oracle::uniform(0.1, 3)};
        const double i1 = integrate_log([&](double u) { return poly(a, u); }, iv, cfg);
        const double i2 = integrate_log([&](double u) { return poly(b, u); }, iv, cfg);
        const double ic = integrate_log([&](double u) { return alpha * poly(a, u) + poly(b, u); }, iv, cfg);
        CHECK(std::abs(ic - (alpha * i1 + i2)) <= 1e-14 * (1 + std::abs(alpha * i1) + std::abs(i2)));
    }
}

TEST_CASE("integrate_log: non-finite values name the node") {
    auto bad = [](double u) { return u > 0.3 ? std::numeric_limits<double>::quiet_NaN() : 1.0; };
    try {
        (void)integrate_log(bad, {0.0, 1.0}, QuadratureConfig{});
        FAIL("expected an EvaluationError");
    } catch (const EvaluationError& e) {
        CHECK(std::string(e.what()).find("log-node u =") != std::string::npos);
    }
}

TEST_CASE("configuration validation") {
    CHECK_THROWS_AS(LogInterval({1.0, 0.0}).validate(), ConfigError);
    CHECK_THROWS_AS(LogInterval({0.0, INFINITY}).validate(), ConfigError);
    CHECK_THROWS_AS((QuadratureConfig{1, 0.5}).validate(), ConfigError);
    CHECK_THROWS_AS((QuadratureConfig{20, 0.0}).validate(), ConfigError);
    CHECK_NOTHROW((QuadratureConfig{2, 3.0}).validate());
}

TEST_CASE("gauss_legendre rules") {
    for (int n : {1, 2, 7, 64, 128}) {
        const GaussRule& r = gauss_legendre(n);
        double s = 0.0;
        for (double wt : r.weights) s += wt;
        CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
        CHECK(r.nodes.size() == static_cast<std::size_t>(n));
    }
    CHECK_THROWS(gauss_legendre(0));
    CHECK_THROWS(gauss_legendre(129));
}

TEST_CASE("central difference weights") {
    const auto w1 = central_difference_weights(1, 1);
    CHECK(w1[0] == doctest::Approx(-0.5));
    CHECK(w1[1] == doctest::Approx(0.0));
    CHECK(w1[2] == doctest::Approx(0.5));
    const auto w2 = central_difference_weights(2, 1);
    CHECK(w2[0] == doctest::Approx(1.0));
    CHECK(w2[1] == doctest::Approx(-2.0));
    CHECK(w2[2] == doctest::Approx(1.0));
    const auto w4 = central_difference_weights(4, 2);
    const double expect[] = {1, -4, 6, -4, 1};
    for (int i = 0; i < 5; ++i) CHECK(w4[i] == doctest::Approx(expect[i]));
}

TEST_CASE("mellin_derivative: examples") {
    CHECK(std::abs(mellin_derivative([](double) { return 3.0; }, 1.7, 1)) < 1e-12);
    CHECK(mellin_derivative([](double x) { return x; }, 2.0, 1) == doctest::Approx(2.0).epsilon(1e-6));
    auto logsq = [](double x) { return std::log(x) * std::log(x); };
    CHECK(mellin_derivative(logsq, std::numbers::e, 1) == doctest::Approx(2.0).epsilon(1e-8));
    CHECK(mellin_derivative(logsq, 3.0, 2) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("mellin_derivative: argument checks") {
    auto f = [](double x) { return x; };
    CHECK_THROWS_AS(mellin_derivative(f, 1.0, 7), ConfigError);
    CHECK_THROWS_AS(mellin_derivative(f, 1.0, 0), ConfigError);
    CHECK_THROWS_AS(mellin_derivative(f, 1.0, 1, 0.0), ConfigError);
    CHECK_THROWS_AS(mellin_derivative(f, 1.0, 1, -1e-3), ConfigError);
    CHECK_THROWS_AS(mellin_derivative(f, -1.0, 1), ConfigError);
}

TEST_CASE("mellin_derivative: second-order convergence") {
    auto f = [](double x) { return std::sin(std::log(x)); };
    const double x = 2.0;
    const double exact = std::cos(std::log(x));
    const double e1 = std::abs(mellin_derivative(f, x, 1, 0.1) - exact);
    const double e2 = std::abs(mellin_derivative(f, x, 1, 0.05) - exact);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("mellin_derivative: higher orders of sin(log x)") {
    auto f = [](double x) { return std::sin(std::log(x)); };
    const double u = std::log(3.0);
    const double exact[] = {std::cos(u), -std::sin(u), -std::cos(u), std::sin(u), std::cos(u), -std::sin(u)};
    for (int r = 1; r <= 6; ++r) {
        CHECK(std::abs(mellin_derivative(f, 3.0, r) - exact[r - 1]) < 1e-3);
    }
}

TEST_CASE("mellin_transform of Mellin B-splines") {
    auto spline = [](int n) { return [n](double x) { return bspline_eval(n, x); }; };
    auto knots = [](int n) {
        std::vector<double> k;
        for (int j = 0; j <= n; ++j) k.push_back(-0.5 * n + j);
        return k;
    };
    for (int n = 1; n <= 6; ++n) {
        const auto k = knots(n);
        const auto v = mellin_transform(spline(n), k, MellinPoint{0.0, 0.0});
        CHECK(std::abs(v - 1.0) <= 1e-10);
    }
    const auto k2 = knots(2);
    const double s2 = std::pow(std::sin(0.5) / 0.5, 2);
    CHECK(std::abs(mellin_transform(spline(2), k2, MellinPoint{0.0, 1.0}) - s2) <= 1e-12);
    const auto k4 = knots(4);
    CHECK(std::abs(mellin_transform(spline(4), k4, MellinPoint{0.0, 2.0}) - std::pow(std::sin(1.0), 4)) <= 1e-12);
}

TEST_CASE("mellin_transform rejects unbounded support") {
    auto f = [](double) { return 1.0; };
    CHECK_THROWS_AS(mellin_transform(f, LogInterval{-INFINITY, 0.0}, MellinPoint{}), ConfigError);
    const double bad[] = {0.0, INFINITY};
    CHECK_THROWS_AS(mellin_transform(f, bad, MellinPoint{}), ConfigError);
}

TEST_CASE("mellin_transform on a shifted line") {
    // Indicator of [1, e): integral of e^{s u} over [0, 1] = (e^s - 1)/s.
    auto ind = [](double x) { return (x >= 1.0 && x < std::numbers::e) ? 1.0 : 0.0; };
    const MellinPoint p{0.5, 1.5};
    const auto got = mellin_transform(ind, LogInterval{0.0, 1.0}, p);
    const auto want = (std::exp(p.s()) - 1.0) / p.s();
    CHECK(std::abs(got - want) < 1e-13);
}
