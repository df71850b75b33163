#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <numbers>
#include <vector>

#include "dwell/numerics.hpp"
#include "dwell/spectrum.hpp"
#include "oracles.hpp"

using namespace dwell;

namespace {
const Tolerance kTight{1e-12, 1e-12, 200};
}

TEST_CASE("find_root: analytic roots") {
    const double r1 = find_root([](double x) { return x * x - 4.0; }, {0.0, 10.0}, kTight);
    CHECK(r1 == doctest::Approx(2.0).epsilon(1e-12));

    const double r2 = find_root([](double x) { return std::cos(x); }, {1.0, 2.0}, kTight);
    CHECK(r2 == doctest::Approx(std::numbers::pi / 2.0).epsilon(1e-12));
}

TEST_CASE("find_root: REF even residual root matches the scan oracle") {
    const WellGeometry geom = oracle::ref_geometry();
    const auto residual = [&](double E) { return even_residual(E, geom, 1); };

    // oracle: dense scan over (0, V) followed by bisection
    const double lo = 1e-9 * geom.V, hi = geom.V * (1.0 - 1e-9);
    const double e_oracle = oracle::scan_bisect(residual, lo, hi, 1000000, 1e-12);

    // the implementation path: first sign-change bracket from a coarse scan
    const double e_coarse = oracle::scan_bisect(residual, lo, hi, 4096, 1e-3);
    const double e_impl =
        find_root(residual, {e_coarse - 1e-2, e_coarse + 1e-2}, kTight);

    CHECK(std::fabs(e_impl - e_oracle) < 1e-9);
    CHECK(std::fabs(residual(e_impl)) < 1e-10);
}

TEST_CASE("find_root: error paths") {
    CHECK_THROWS_AS(find_root([](double x) { return x * x + 1.0; }, {0.0, 1.0}, kTight),
                    NoSignChangeError);
    // starving the iteration budget with an extremely tight width target
    const Tolerance starved{1e-300, 1e-300, 2};
    CHECK_THROWS_AS(find_root([](double x) { return std::cos(x); }, {1.0, 2.0}, starved),
                    MaxIterationsError);
    CHECK_THROWS_AS(find_root([](double x) { return x; }, {-1.0, 1.0},
                              Tolerance{-1.0, 1e-12, 100}),
                    DomainError);
}

TEST_CASE("find_root: deterministic, endpoint roots accepted") {
    const auto f = [](double x) { return std::sin(x) - 0.4; };
    const double a = find_root(f, {0.0, 1.5}, kTight);
    const double b = find_root(f, {0.0, 1.5}, kTight);
    CHECK(std::memcmp(&a, &b, sizeof a) == 0);

    // f(lo) exactly within tolerance: lo is returned as the root
    const double r = find_root([](double x) { return x; }, {0.0, 1.0}, kTight);
    CHECK(r == 0.0);
}

TEST_CASE("integrate_1d: analytic integrals") {
    CHECK(integrate_1d([](double x) { return x; }, 0.0, 1.0, kTight) ==
          doctest::Approx(0.5).epsilon(1e-13));
    CHECK(integrate_1d([](double x) { return std::sin(x); }, 0.0, std::numbers::pi, kTight) ==
          doctest::Approx(2.0).epsilon(1e-12));
    // reversed limits flip the sign
    CHECK(integrate_1d([](double x) { return x; }, 1.0, 0.0, kTight) ==
          doctest::Approx(-0.5).epsilon(1e-13));
}

TEST_CASE("integrate_1d: REF initial density normalizes to 1") {
    const WavePacket& packet = oracle::ref_packet();
    const auto density = [&](double x) { return rho(packet, x, 0.0); };
    const double breakpoints[] = {-packet.geom.b, packet.geom.b};
    const double result =
        integrate_1d(density, -packet.geom.a, packet.geom.a, breakpoints, kTight);
    const double reference =
        oracle::trapezoid(density, -packet.geom.a, packet.geom.a, 1000000);
    CHECK(std::fabs(result - 1.0) < 1e-8);
    CHECK(std::fabs(result - reference) < 1e-8);
}

TEST_CASE("integrate_1d: breakpoints keep kinked integrands exact") {
    const double breakpoints[] = {0.0};
    const double r = integrate_1d([](double x) { return std::fabs(x); }, -1.0, 1.0,
                                  breakpoints, kTight);
    CHECK(r == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("integrate_1d: halving abs_tol never worsens polynomial integrals") {
    oracle::Rng rng(20240811);
    for (int trial = 0; trial < 20; ++trial) {
        double c[7];
        for (double& ci : c) ci = rng.uniform(-2.0, 2.0);
        const auto poly = [&](double x) {
            double acc = 0.0;
            for (int k = 6; k >= 0; --k) acc = acc * x + c[k];
            return acc;
        };
        // exact integral over [0, 2] from the antiderivative
        double exact = 0.0;
        for (int k = 0; k <= 6; ++k) exact += c[k] * std::pow(2.0, k + 1) / (k + 1);

        double prev_err = -1.0;
        for (double tol = 1e-4; tol > 1e-11; tol *= 0.5) {
            const double err =
                std::fabs(integrate_1d(poly, 0.0, 2.0, Tolerance{tol, 1e-300, 100000}) - exact);
            if (prev_err >= 0.0) CHECK(err <= prev_err + 1e-14);
            prev_err = err;
        }
    }
}

TEST_CASE("integrate_1d: budget exhaustion raises") {
    const Tolerance starved{1e-14, 1e-14, 1};
    CHECK_THROWS_AS(integrate_1d([](double x) { return std::sin(37.0 * x) + x * x; }, 0.0,
                                 10.0, starved),
                    MaxIterationsError);
}

TEST_CASE("integrate_ode: constant velocity") {
    const OdePath path =
        integrate_ode([](double, double) { return 1.0; }, 0.0, 0.0, 2.0, kTight);
    CHECK(path.t_begin() == 0.0);
    CHECK(path.t_end() == doctest::Approx(2.0).epsilon(1e-15));
    CHECK(path.x_end() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("integrate_ode: stationary field returns an exactly constant path") {
    const OdePath path =
        integrate_ode([](double, double) { return 0.0; }, 0.3, 0.0, 5.0, kTight);
    for (const OdeSample& s : path.samples) CHECK(s.x == 0.3);
    CHECK(path.position_at(2.345) == 0.3);
}

TEST_CASE("integrate_ode: exponential growth hits e") {
    const Tolerance tol{1e-12, 1e-12, 100000};
    const OdePath path = integrate_ode([](double x, double) { return x; }, 1.0, 0.0, 1.0, tol);
    CHECK(path.x_end() == doctest::Approx(std::numbers::e).epsilon(1e-10));
    // dense output between steps stays on the analytic solution
    CHECK(path.position_at(0.5) == doctest::Approx(std::exp(0.5)).epsilon(1e-8));
}

TEST_CASE("integrate_ode: failure modes") {
    // finite-time blow-up forces the step below the underflow threshold
    CHECK_THROWS_AS(integrate_ode([](double, double t) { return 1.0 / (0.5 - t); }, 0.0, 0.0,
                                  1.0, Tolerance{1e-10, 1e-10, 1000000}),
                    StepUnderflowError);
    CHECK_THROWS_AS(integrate_ode([](double, double t) { return std::cos(10.0 * t); }, 0.0,
                                  0.0, 1000.0, Tolerance{1e-13, 1e-13, 1}),
                    MaxIterationsError);
    // callback exceptions surface unchanged
    CHECK_THROWS_AS(integrate_ode(
                        [](double, double) -> double {
                            throw DensityFloorError("node encountered");
                        },
                        0.0, 0.0, 1.0, kTight),
                    DensityFloorError);
}
