#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <json.hpp>
#include <numbers>

#include "expsample/analysis.hpp"
#include "expsample/errors.hpp"

using namespace expsample;

namespace {

OperatorSpec make(const Kernel& chi, const Kernel& phi) { return OperatorSpec{chi, phi, 1.0, std::nullopt, {}}; }

const Kernel& b4() {
    static const Kernel k = Kernel::bspline(4);
    return k;
}
const Kernel& b2() {
    static const Kernel k = Kernel::bspline(2);
    return k;
}

}  // namespace

TEST_CASE("error_table: examples") {
    const ErrorTable t1 = error_table(builtin("fig1"), {plain(make(b4(), b4()))}, {4.22}, {90.0});
    REQUIRE(t1.rows.size() == 1);
    CHECK(t1.rows[0].abs_err() == doctest::Approx(0.1869).epsilon(0.01));

    const ErrorTable t2 = error_table(builtin("fig2"), {combined(make(b4(), b2()), 3)}, {2.85}, {10.0});
    // Printed to four decimals only.
    CHECK(std::abs(t2.rows[0].abs_err() - 0.0002) <= 5e-5);
    CHECK(t2.rows[0].label == "10;p=3");
    CHECK(t2.rows[0].p == 3);

    const ErrorTable t3 = error_table(builtin("const:1"), {plain(make(b4(), b2())), combined(make(b4(), b2()), 2)},
                                      {0.5, 1.0, 3.0}, {5.0, 25.0});
    CHECK(t3.rows.size() == 12);
    for (const auto& r : t3.rows) CHECK(r.abs_err() <= 1e-10);
}

TEST_CASE("error_table: row order and serialization") {
    const std::vector<Approximant> cols{plain(make(b4(), b2())), combined(make(b4(), b2()), 3)};
    const ErrorTable t = error_table(builtin("fig2"), cols, {1.75, 2.1}, {10.0, 20.0});
    REQUIRE(t.rows.size() == 8);
    CHECK(t.rows[0].x == 1.75);
    CHECK(t.rows[0].label == "10");
    CHECK(t.rows[1].label == "20");
    CHECK(t.rows[2].label == "10;p=3");
    CHECK(t.rows[3].label == "20;p=3");
    CHECK(t.rows[4].x == 2.1);
    const std::string csv = t.to_csv();
    CHECK(csv.rfind("x,w,fx,Iwfx,abs_err\n", 0) == 0);
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
    // Deterministic: identical config gives byte-identical output.
    const ErrorTable again = error_table(builtin("fig2"), cols, {1.75, 2.1}, {10.0, 20.0});
    CHECK(again.to_csv() == csv);
    CHECK(again.digest.hex == t.digest.hex);

    const auto j = nlohmann::json::parse(t.to_json());
    CHECK(j["config"]["digest"] == t.digest.hex);
    CHECK(j["config"]["chi"] == "bspline:4");
    CHECK(j["config"]["version"] == kVersion);
    CHECK(j["rows"].size() == 8);
    CHECK(j["rows"][2]["p"] == 3);
}

TEST_CASE("config digest") {
    const Approximant a = plain(make(b4(), b2()));
    const RealFunction f = builtin("fig2");
    const ConfigDigest d1 = make_digest("table", a, f, {1.0, 2.0}, {10.0});
    CHECK(d1.hex.size() == 16);
    CHECK(d1.canonical.find("chi=bspline:4") != std::string::npos);
    CHECK(d1.canonical.find("version=") != std::string::npos);
    CHECK(make_digest("table", a, f, {1.0, 2.0}, {10.0}).hex == d1.hex);
    CHECK(make_digest("table", a, f, {1.0, 2.0}, {11.0}).hex != d1.hex);
    CHECK(make_digest("table", plain(make(b4(), b4())), f, {1.0, 2.0}, {10.0}).hex != d1.hex);
    // Reference FNV-1a values.
    CHECK(fnv1a_hex("") == "cbf29ce484222325");
    CHECK(fnv1a_hex("a") == "af63dc4c8601ec8c");
}

TEST_CASE("richardson_step removes a 1/w term") {
    auto a = [](double w) { return 3.0 + 5.0 / w; };
    CHECK(richardson_step(10.0, a(10.0), 20.0, a(20.0)) == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(richardson_step(7.0, a(7.0), 21.0, a(21.0)) == doctest::Approx(3.0).epsilon(1e-14));
}

TEST_CASE("empirical_order: examples") {
    const std::vector<double> ws{50, 100, 200, 400};
    const RateReport r2 = empirical_order(builtin("sinlog"), plain(make(b4(), b2())), 2.0, ws);
    CHECK(r2.fitted_order == doctest::Approx(2.0).epsilon(0.1));
    CHECK(r2.errors.size() == 4);
    // The extrapolated constant is lim w^2 (I f - f) = theta^2 f / 4.
    CHECK(r2.extrapolated_constant == doctest::Approx(-std::sin(std::log(2.0)) / 4.0).epsilon(1e-3));

    const RateReport r1 = empirical_order(builtin("sinlog"), plain(make(b2(), Kernel::characteristic())), 2.0, ws);
    CHECK(r1.fitted_order == doctest::Approx(1.0).epsilon(0.1));

    const RateReport r3 = empirical_order(builtin("fig2"), combined(make(b4(), b2()), 3), 2.1, {10, 20, 40, 80});
    CHECK(r3.fitted_order >= 2.7);
}

TEST_CASE("empirical_order: edge cases") {
    const RateReport z = empirical_order(builtin("const:2"), plain(make(b4(), b2())), 1.0, {10, 20, 40});
    // Constants are reproduced to roundoff; if an error is exactly zero the sentinel is used.
    if (z.zero_error) CHECK(std::isinf(z.fitted_order));
    CHECK_THROWS_AS(empirical_order(builtin("sinlog"), plain(make(b4(), b2())), 2.0, {10, 20}), ConfigError);
    CHECK_THROWS_AS(empirical_order(builtin("sinlog"), plain(make(b4(), b2())), 2.0, {10, 30, 20}), ConfigError);
    const RealFunction zero = builtin("const:0");
    const RateReport zz = empirical_order(zero, plain(make(b4(), b2())), 1.5, {10, 20, 40});
    CHECK(zz.zero_error);
    CHECK(std::isinf(zz.fitted_order));
}

TEST_CASE("voronovskaya_check: examples") {
    const std::vector<double> ws{50, 100, 200, 400};
    const RealFunction s = builtin("sinlog");
    const VoronovskayaRecord v = voronovskaya_check(s, plain(make(b4(), b2())), 2.0, ws, 2);
    CHECK(v.predicted == doctest::Approx(-std::sin(std::log(2.0)) / 4.0).epsilon(1e-12));
    CHECK(v.relative_deviation <= 0.05);
    CHECK_FALSE(v.diverged);

    // For psi the moment formula is evaluated at u = x^w; at a lattice point
    // (x = e, integer w) that gives (1/6 + m2(psi))/2 = (1/6 - 6)/2 = -35/12.
    const Kernel psi = Kernel::translates(2, -2.0, -3.0);
    const double pred = predicted_constant(s, plain(make(psi, b2())), std::numbers::e, 400.0, 2);
    CHECK(pred == doctest::Approx(-35.0 / 12.0 * -std::sin(1.0)).epsilon(1e-12));

    const VoronovskayaRecord k =
        voronovskaya_check(builtin("logsq"), plain(make(b2(), Kernel::characteristic())), 3.0, ws, 1);
    CHECK(k.predicted == doctest::Approx(std::log(3.0)).epsilon(1e-12));
    CHECK(k.relative_deviation <= 0.05);

    CHECK_THROWS_AS(voronovskaya_check(builtin("fig2"), plain(make(b4(), b2())), 2.0, ws, 2), ConfigError);
    CHECK_THROWS_AS(voronovskaya_check(s, plain(make(b4(), b2())), 2.0, ws, 0), ConfigError);
    const auto j = nlohmann::json::parse(v.to_json());
    CHECK(j["order"] == 2);
}
