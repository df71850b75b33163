#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "dwell/spectrum.hpp"
#include "oracles.hpp"

using namespace dwell;

namespace {

const Tolerance kTol{1e-13, 1e-13, 300};

EigenMode ref_mode(Parity parity) {
    return solve_mode(parity, 1, oracle::ref_geometry(), kTol);
}

}  // namespace

TEST_CASE("residuals: domain guards") {
    const WellGeometry geom = oracle::ref_geometry();
    CHECK_THROWS_AS(even_residual(-1.0, geom, 1), DomainError);
    CHECK_THROWS_AS(even_residual(0.0, geom, 1), DomainError);
    CHECK_THROWS_AS(odd_residual(60.0, geom, 1), DomainError);
    CHECK_THROWS_AS(even_residual(1.0, WellGeometry{1.0, 1.5, 60.0}, 1), DomainError);
}

TEST_CASE("residuals: exactly one sign change on (0, V) for the REF branch") {
    const WellGeometry geom = oracle::ref_geometry();
    const double lo = 1e-9 * geom.V, hi = geom.V * (1.0 - 1e-9);
    CHECK(oracle::count_sign_changes([&](double E) { return even_residual(E, geom, 1); }, lo,
                                     hi, 1000000) == 1);
    CHECK(oracle::count_sign_changes([&](double E) { return odd_residual(E, geom, 1); }, lo,
                                     hi, 1000000) == 1);
}

TEST_CASE("solve_mode: REF eigenvalues against the dense-scan oracle") {
    const WellGeometry geom = oracle::ref_geometry();
    const EigenMode even = ref_mode(Parity::Even);
    const EigenMode odd = ref_mode(Parity::Odd);

    const double lo = 1e-9 * geom.V, hi = geom.V * (1.0 - 1e-9);
    const double e_even = oracle::scan_bisect(
        [&](double E) { return even_residual(E, geom, 1); }, lo, hi, 1000000, 1e-12);
    const double e_odd = oracle::scan_bisect(
        [&](double E) { return odd_residual(E, geom, 1); }, lo, hi, 1000000, 1e-12);

    CHECK(std::fabs(even.energy - e_even) < 1e-9);
    CHECK(std::fabs(odd.energy - e_odd) < 1e-9);
    CHECK(std::fabs(even_residual(even.energy, geom, 1)) < 1e-10);
    CHECK(std::fabs(odd_residual(odd.energy, geom, 1)) < 1e-10);

    // frozen regression anchors (cross-checked against an independent solver)
    CHECK(even.energy == doctest::Approx(6.1512356666274668).epsilon(1e-10));
    CHECK(odd.energy == doctest::Approx(6.2265428212063449).epsilon(1e-10));

    CHECK(even.energy < odd.energy);
    CHECK(odd.energy < geom.V);
    CHECK(even.wavenumber == doctest::Approx(std::sqrt(2.0 * even.energy)).epsilon(1e-15));
    CHECK(even.decay ==
          doctest::Approx(std::sqrt(2.0 * (geom.V - even.energy))).epsilon(1e-15));
}

TEST_CASE("solve_mode: infinite-wall limit reproduces the closed box") {
    const WellGeometry tall{1.0, 0.2, 1e6};
    const double e_box = std::numbers::pi * std::numbers::pi / (2.0 * 0.8 * 0.8);
    for (Parity parity : {Parity::Even, Parity::Odd}) {
        const EigenMode mode = solve_mode(parity, 1, tall, kTol);
        CHECK(std::fabs(mode.energy - e_box) < 0.01 * e_box);
    }
}

TEST_CASE("solve_mode: higher branches and NoBoundMode") {
    const WellGeometry geom = oracle::ref_geometry();
    const EigenMode e1 = ref_mode(Parity::Even);
    const EigenMode e2 = solve_mode(Parity::Even, 2, geom, kTol);
    CHECK(e1.energy < e2.energy);
    CHECK(e2.energy < geom.V);
    CHECK(std::fabs(even_residual(e2.energy, geom, 2)) < 1e-10);

    CHECK_THROWS_AS(solve_mode(Parity::Even, 4, geom, kTol), NoBoundModeError);
    // a barrier too low for any bound branch
    CHECK_THROWS_AS(solve_mode(Parity::Even, 1, WellGeometry{1.0, 0.2, 1.0}, kTol),
                    NoBoundModeError);
}

TEST_CASE("eval_mode: walls, center, and domain guard") {
    const WellGeometry geom = oracle::ref_geometry();
    const EigenMode even = ref_mode(Parity::Even);
    const EigenMode odd = ref_mode(Parity::Odd);

    for (double t : {0.0, 0.37, 12.9}) {
        CHECK(std::abs(eval_mode(even, geom, geom.a, t)) == 0.0);
        CHECK(std::abs(eval_mode(even, geom, -geom.a, t)) == 0.0);
        CHECK(std::abs(eval_mode(odd, geom, geom.a, t)) == 0.0);
        CHECK(std::abs(eval_mode(odd, geom, 0.0, t)) == 0.0);
    }
    CHECK_THROWS_AS(eval_mode(even, geom, 1.0000001, 0.0), DomainError);
    CHECK_THROWS_AS(eval_mode(odd, geom, -1.5, 0.0), DomainError);

    // phase factor i e^{-iEt} has unit magnitude
    const std::complex<double> v = eval_mode(even, geom, -0.5, 3.21);
    CHECK(std::abs(v) == doctest::Approx(std::fabs(mode_profile(even, geom, -0.5))));
}

TEST_CASE("profiles: value and slope match at the barrier edges") {
    const WellGeometry geom = oracle::ref_geometry();
    for (Parity parity : {Parity::Even, Parity::Odd}) {
        const EigenMode mode = solve_mode(parity, 1, geom, kTol);
        for (double edge : {-geom.b, geom.b}) {
            // exactly at the edge the outer piece applies; one ulp inward
            // gives the barrier piece's one-sided limit
            const double inward = std::nextafter(edge, 0.0);
            const double u_out = mode_profile(mode, geom, edge);
            const double u_in = mode_profile(mode, geom, inward);
            CHECK(std::fabs(u_in - u_out) < 1e-8 * std::fabs(u_out) + 1e-14);
            const double du_out = mode_profile_dx(mode, geom, edge);
            const double du_in = mode_profile_dx(mode, geom, inward);
            CHECK(std::fabs(du_in - du_out) < 1e-8 * std::fabs(du_out) + 1e-12);
        }
        // finite-difference slope probe straddling the matching point
        for (double edge : {-geom.b, geom.b}) {
            const double h = 1e-6;
            const double fd =
                (mode_profile(mode, geom, edge + h) - mode_profile(mode, geom, edge - h)) /
                (2.0 * h);
            const double an = 0.5 * (mode_profile_dx(mode, geom, edge - h) +
                                     mode_profile_dx(mode, geom, edge + h));
            CHECK(std::fabs(fd - an) < 1e-5 * std::fabs(an) + 1e-8);
        }
    }
}

TEST_CASE("profiles: analytic derivative against central differences") {
    const WellGeometry geom = oracle::ref_geometry();
    const EigenMode even = ref_mode(Parity::Even);
    const EigenMode odd = ref_mode(Parity::Odd);

    CHECK(std::fabs(mode_profile_dx(even, geom, 0.0)) < 1e-14);

    const double h = 1e-6;
    for (double x : {-0.9, -0.6, -0.35, -0.1, 0.05, 0.12, 0.4, 0.7, 0.93}) {
        for (const EigenMode* mode : {&even, &odd}) {
            const double fd =
                (mode_profile(*mode, geom, x + h) - mode_profile(*mode, geom, x - h)) /
                (2.0 * h);
            const double an = mode_profile_dx(*mode, geom, x);
            CHECK(std::fabs(fd - an) <= 1e-5 * std::max(std::fabs(an), 1.0));
        }
    }

    // wall slope of the odd mode is the full sine slope N k
    const double slope = std::fabs(mode_profile_dx(odd, geom, geom.a));
    CHECK(slope == doctest::Approx(odd.norm * odd.wavenumber).epsilon(1e-12));
    CHECK(slope > 0.0);
}

TEST_CASE("profiles: parity property on sampled positions") {
    const WellGeometry geom = oracle::ref_geometry();
    const EigenMode even = ref_mode(Parity::Even);
    const EigenMode odd = ref_mode(Parity::Odd);
    oracle::Rng rng(777);
    for (int i = 0; i < 400; ++i) {
        const double x = rng.uniform(-geom.a, geom.a);
        CHECK(std::fabs(mode_profile(even, geom, -x) - mode_profile(even, geom, x)) < 1e-10);
        CHECK(std::fabs(mode_profile(odd, geom, -x) + mode_profile(odd, geom, x)) < 1e-10);
    }
}

TEST_CASE("profiles: orthogonality and normalization") {
    const WellGeometry geom = oracle::ref_geometry();
    const EigenMode even = ref_mode(Parity::Even);
    const EigenMode odd = ref_mode(Parity::Odd);
    const double breakpoints[] = {-geom.b, geom.b};

    const double overlap = integrate_1d(
        [&](double x) { return mode_profile(even, geom, x) * mode_profile(odd, geom, x); },
        -geom.a, geom.a, breakpoints, kTol);
    CHECK(std::fabs(overlap) < 1e-10);

    for (const EigenMode* mode : {&even, &odd}) {
        const double norm2 = integrate_1d(
            [&](double x) {
                const double u = mode_profile(*mode, geom, x);
                return u * u;
            },
            -geom.a, geom.a, breakpoints, kTol);
        CHECK(std::fabs(norm2 - 1.0) < 1e-8);
        // the full mode keeps unit norm at any time
        const double norm_t = integrate_1d(
            [&](double x) { return std::norm(eval_mode(*mode, geom, x, 17.3)); }, -geom.a,
            geom.a, breakpoints, kTol);
        CHECK(std::fabs(norm_t - 1.0) < 1e-8);
    }
}

TEST_CASE("eigenvalue ordering: positive tunneling splitting across geometries") {
    const WellGeometry cases[] = {
        {1.0, 0.2, 60.0}, {1.0, 0.1, 40.0}, {2.0, 0.5, 25.0}, {1.5, 0.3, 120.0},
        {1.0, 0.2, 500.0},
    };
    for (const WellGeometry& geom : cases) {
        const EigenMode even = solve_mode(Parity::Even, 1, geom, kTol);
        const EigenMode odd = solve_mode(Parity::Odd, 1, geom, kTol);
        CHECK(even.energy < odd.energy);
        CHECK(odd.energy < geom.V);
    }
}

TEST_CASE("overflow guard: huge barriers stay finite and matched") {
    // alpha*b ~ 895 here; naive cosh ratios would overflow
    const WellGeometry huge{1.0, 0.2, 1e7};
    for (Parity parity : {Parity::Even, Parity::Odd}) {
        const EigenMode mode = solve_mode(parity, 1, huge, kTol);
        CHECK(std::isfinite(mode.energy));
        CHECK(std::isfinite(mode.norm));
        for (double x : {-0.9, -0.2, -0.1, 0.0, 0.1, 0.2, 0.9}) {
            CHECK(std::isfinite(mode_profile(mode, huge, x)));
        }
        const double u_out = mode_profile(mode, huge, -huge.b);
        const double u_in = mode_profile(mode, huge, std::nextafter(-huge.b, 0.0));
        CHECK(std::fabs(u_in - u_out) < 1e-8 * std::fabs(u_out) + 1e-14);
        const double du_out = mode_profile_dx(mode, huge, -huge.b);
        const double du_in = mode_profile_dx(mode, huge, std::nextafter(-huge.b, 0.0));
        CHECK(std::fabs(du_in - du_out) < 1e-6 * std::fabs(du_out) + 1e-12);
    }
}
