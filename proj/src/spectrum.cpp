#include "dwell/spectrum.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace dwell {

namespace {

constexpr double kPi = std::numbers::pi;

// Hyperbolic ratios with the denominator argument possibly huge. Above the
// log-space threshold both cosh and sinh reduce to exp(|y|)/2 correction
// factors, so the ratio is formed from exp(|y| - yb) directly.
constexpr double kLogSpaceThreshold = 300.0;

// cosh(y)/cosh(yb), y in [-yb, yb]
double cosh_over_cosh(double y, double yb) {
    if (yb <= kLogSpaceThreshold) return std::cosh(y) / std::cosh(yb);
    const double ay = std::fabs(y);
    return std::exp(ay - yb) * (1.0 + std::exp(-2.0 * ay)) / (1.0 + std::exp(-2.0 * yb));
}

// sinh(y)/sinh(yb), odd in y
double sinh_over_sinh(double y, double yb) {
    if (yb <= kLogSpaceThreshold) return std::sinh(y) / std::sinh(yb);
    const double ay = std::fabs(y);
    const double mag = std::exp(ay - yb) * (-std::expm1(-2.0 * ay)) / (-std::expm1(-2.0 * yb));
    return y < 0.0 ? -mag : mag;
}

// sinh(y)/cosh(yb)
double sinh_over_cosh(double y, double yb) {
    if (yb <= kLogSpaceThreshold) return std::sinh(y) / std::cosh(yb);
    const double ay = std::fabs(y);
    const double mag = std::exp(ay - yb) * (-std::expm1(-2.0 * ay)) / (1.0 + std::exp(-2.0 * yb));
    return y < 0.0 ? -mag : mag;
}

// cosh(y)/sinh(yb)
double cosh_over_sinh(double y, double yb) {
    if (yb <= kLogSpaceThreshold) return std::cosh(y) / std::sinh(yb);
    const double ay = std::fabs(y);
    return std::exp(ay - yb) * (1.0 + std::exp(-2.0 * ay)) / (-std::expm1(-2.0 * yb));
}

double residual_impl(double E, const WellGeometry& g, int n, Parity parity) {
    g.validate();
    if (n < 1) throw DomainError("residual: branch index must be positive");
    if (!(E > 0.0) || !(E < g.V)) {
        std::ostringstream msg;
        msg << "residual: energy " << E << " outside (0, " << g.V << ")";
        throw DomainError(msg.str());
    }
    const double k = std::sqrt(2.0 * E);
    const double alpha_b = g.b * std::sqrt(2.0 * (g.V - E));
    const double ratio = std::sqrt(E) / std::sqrt(g.V - E);
    const double hyp = parity == Parity::Even ? ratio / std::tanh(alpha_b)   // coth
                                              : ratio * std::tanh(alpha_b);  // tanh
    return std::atan(hyp) - n * kPi + (g.a - g.b) * k;
}

// Unnormalised spatial profile. The outer pieces are sin(k(x+a)) on the left
// and its parity image on the right; the barrier piece is the matching
// hyperbolic bridge, continuous at +-b by construction. Equality of the
// derivatives there is exactly the quantisation condition.
double raw_profile(const EigenMode& m, const WellGeometry& g, double x) {
    const double k = m.wavenumber;
    const double alpha = m.decay;
    if (x <= -g.b) return std::sin(k * (x + g.a));
    if (x >= g.b)
        return m.parity == Parity::Even ? -std::sin(k * (x - g.a)) : std::sin(k * (x - g.a));
    const double edge = std::sin(k * (g.a - g.b));
    if (m.parity == Parity::Even) return edge * cosh_over_cosh(alpha * x, alpha * g.b);
    return -edge * sinh_over_sinh(alpha * x, alpha * g.b);
}

double raw_profile_dx(const EigenMode& m, const WellGeometry& g, double x) {
    const double k = m.wavenumber;
    const double alpha = m.decay;
    if (x <= -g.b) return k * std::cos(k * (x + g.a));
    if (x >= g.b)
        return m.parity == Parity::Even ? -k * std::cos(k * (x - g.a))
                                        : k * std::cos(k * (x - g.a));
    const double edge = std::sin(k * (g.a - g.b));
    if (m.parity == Parity::Even) return edge * alpha * sinh_over_cosh(alpha * x, alpha * g.b);
    return -edge * alpha * cosh_over_sinh(alpha * x, alpha * g.b);
}

void check_in_box(const WellGeometry& g, double x) {
    if (std::fabs(x) > g.a) {
        std::ostringstream msg;
        msg << "position " << x << " outside the box [-" << g.a << ", " << g.a << "]";
        throw DomainError(msg.str());
    }
}

}  // namespace

void WellGeometry::validate() const {
    if (!(b > 0.0) || !(b < a) || !(V > 0.0)) {
        std::ostringstream msg;
        msg << "invalid well geometry: a=" << a << " b=" << b << " V=" << V
            << " (need 0 < b < a and V > 0)";
        throw DomainError(msg.str());
    }
}

double even_residual(double E, const WellGeometry& geom, int n) {
    return residual_impl(E, geom, n, Parity::Even);
}

double odd_residual(double E, const WellGeometry& geom, int n) {
    return residual_impl(E, geom, n, Parity::Odd);
}

EigenMode solve_mode(Parity parity, int n, const WellGeometry& geom, const Tolerance& tol) {
    geom.validate();
    tol.validate();
    const auto residual = [&](double E) { return residual_impl(E, geom, n, parity); };

    // uniform scan for the first sign change
    constexpr int kScanPoints = 4096;
    const double eps = 1e-9 * geom.V;
    const double lo = eps, hi = geom.V - eps;
    double e_prev = lo;
    double r_prev = residual(e_prev);
    Bracket bracket{0.0, 0.0};
    bool found = false;
    for (int i = 1; i < kScanPoints; ++i) {
        const double e = lo + (hi - lo) * static_cast<double>(i) / (kScanPoints - 1);
        const double r = residual(e);
        if (r_prev == 0.0 || (r_prev < 0.0) != (r < 0.0)) {
            bracket = {e_prev, e};
            found = true;
            break;
        }
        e_prev = e;
        r_prev = r;
    }
    if (!found) {
        std::ostringstream msg;
        msg << "no bound " << (parity == Parity::Even ? "even" : "odd") << " mode for branch n="
            << n << " below V=" << geom.V;
        throw NoBoundModeError(msg.str());
    }

    const double E = find_root(residual, bracket, tol);
    EigenMode mode{parity, n, E, std::sqrt(2.0 * E), std::sqrt(2.0 * (geom.V - E)), 1.0};

    const double breakpoints[] = {-geom.b, geom.b};
    const Tolerance quad{1e-13, 1e-13, 100000};
    const double norm_sq = integrate_1d(
        [&](double x) {
            const double u = raw_profile(mode, geom, x);
            return u * u;
        },
        -geom.a, geom.a, breakpoints, quad);
    mode.norm = 1.0 / std::sqrt(norm_sq);
    return mode;
}

double mode_profile(const EigenMode& mode, const WellGeometry& geom, double x) {
    check_in_box(geom, x);
    return mode.norm * raw_profile(mode, geom, x);
}

double mode_profile_dx(const EigenMode& mode, const WellGeometry& geom, double x) {
    check_in_box(geom, x);
    return mode.norm * raw_profile_dx(mode, geom, x);
}

double mode_profile_extended(const EigenMode& mode, const WellGeometry& geom, double x) {
    return mode.norm * raw_profile(mode, geom, x);
}

double mode_profile_dx_extended(const EigenMode& mode, const WellGeometry& geom, double x) {
    return mode.norm * raw_profile_dx(mode, geom, x);
}

std::complex<double> eval_mode(const EigenMode& mode, const WellGeometry& geom, double x,
                               double t) {
    const double u = mode_profile(mode, geom, x);
    const std::complex<double> phase{std::sin(mode.energy * t), std::cos(mode.energy * t)};
    return u * phase;  // i * e^{-iEt} = sin(Et) + i cos(Et)
}

std::complex<double> eval_mode_dx(const EigenMode& mode, const WellGeometry& geom, double x,
                                  double t) {
    const double du = mode_profile_dx(mode, geom, x);
    const std::complex<double> phase{std::sin(mode.energy * t), std::cos(mode.energy * t)};
    return du * phase;
}

}  // namespace dwell
