#include "dwell/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace dwell {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

}  // namespace

void Tolerance::validate() const {
    if (!(abs_tol > 0.0) || !(rel_tol > 0.0) || max_iterations < 1) {
        std::ostringstream msg;
        msg << "invalid tolerance: abs_tol=" << abs_tol << " rel_tol=" << rel_tol
            << " max_iterations=" << max_iterations;
        throw DomainError(msg.str());
    }
}

double find_root(const ScalarFn& f, Bracket bracket, const Tolerance& tol) {
    tol.validate();
    double a = bracket.lo;
    double b = bracket.hi;
    if (!(a < b)) throw DomainError("find_root: bracket requires lo < hi");

    double fa = f(a);
    double fb = f(b);
    if (std::fabs(fa) <= tol.abs_tol) return a;
    if (std::fabs(fb) <= tol.abs_tol) return b;
    if (sign_of(fa) == sign_of(fb)) {
        std::ostringstream msg;
        msg << "find_root: no sign change on [" << a << ", " << b << "]: f(lo)=" << fa
            << " f(hi)=" << fb;
        throw NoSignChangeError(msg.str());
    }

    // Brent: b is the best iterate, a the previous one, c brackets b.
    double c = a, fc = fa;
    double d = b - a, e = d;
    for (int iter = 0; iter < tol.max_iterations; ++iter) {
        if (sign_of(fb) == sign_of(fc)) {
            c = a;
            fc = fa;
            e = d = b - a;
        }
        if (std::fabs(fc) < std::fabs(fb)) {
            a = b;
            b = c;
            c = a;
            fa = fb;
            fb = fc;
            fc = fa;
        }
        const double tol1 = 2.0 * kEps * std::fabs(b) + 0.5 * (tol.rel_tol * std::fabs(b) + tol.abs_tol);
        const double xm = 0.5 * (c - b);
        if (std::fabs(xm) <= tol1 || std::fabs(fb) <= tol.abs_tol) return b;

        if (std::fabs(e) >= tol1 && std::fabs(fa) > std::fabs(fb)) {
            // secant / inverse quadratic step
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc;
                const double r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::fabs(p);
            const double min1 = 3.0 * xm * q - std::fabs(tol1 * q);
            const double min2 = std::fabs(e * q);
            if (2.0 * p < std::min(min1, min2)) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        if (std::fabs(d) > tol1)
            b += d;
        else
            b += (xm > 0.0 ? tol1 : -tol1);
        fb = f(b);
    }
    throw MaxIterationsError("find_root: iteration budget exhausted");
}

namespace {

struct SimpsonWorker {
    const ScalarFn& f;
    long budget;  // remaining interval subdivisions

    double recurse(double a, double b, double fa, double fm, double fb, double whole,
                   double eps, int depth) {
        const double m = 0.5 * (a + b);
        const double lm = 0.5 * (a + m);
        const double rm = 0.5 * (m + b);
        const double flm = f(lm);
        const double frm = f(rm);
        const double h = b - a;
        const double left = (h / 12.0) * (fa + 4.0 * flm + fm);
        const double right = (h / 12.0) * (fm + 4.0 * frm + fb);
        const double delta = left + right - whole;
        // depth cap guards against non-integrable behaviour at panel ends
        if (std::fabs(delta) <= 15.0 * eps || depth >= 52 || h <= kEps * (std::fabs(a) + std::fabs(b)))
            return left + right + delta / 15.0;
        if (--budget < 0) throw MaxIterationsError("integrate_1d: refinement budget exhausted");
        return recurse(a, m, fa, flm, fm, left, 0.5 * eps, depth + 1) +
               recurse(m, b, fm, frm, fb, right, 0.5 * eps, depth + 1);
    }

    double integrate(double a, double b, double eps) {
        const double m = 0.5 * (a + b);
        const double fa = f(a), fm = f(m), fb = f(b);
        const double whole = ((b - a) / 6.0) * (fa + 4.0 * fm + fb);
        return recurse(a, b, fa, fm, fb, whole, eps, 0);
    }
};

}  // namespace

double integrate_1d(const ScalarFn& f, double lo, double hi, const Tolerance& tol) {
    return integrate_1d(f, lo, hi, std::span<const double>{}, tol);
}

double integrate_1d(const ScalarFn& f, double lo, double hi,
                    std::span<const double> breakpoints, const Tolerance& tol) {
    tol.validate();
    if (lo == hi) return 0.0;
    const double flip = lo < hi ? 1.0 : -1.0;
    const double a = std::min(lo, hi);
    const double b = std::max(lo, hi);

    std::vector<double> nodes;
    nodes.push_back(a);
    for (double bp : breakpoints)
        if (bp > a && bp < b) nodes.push_back(bp);
    nodes.push_back(b);
    std::sort(nodes.begin(), nodes.end());

    // crude magnitude estimate so rel_tol has something to act on
    double scale = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double w = nodes[i + 1] - nodes[i];
        const double m = 0.5 * (nodes[i] + nodes[i + 1]);
        scale += std::fabs(f(m)) * w;
    }
    const double eps_total = tol.abs_tol + tol.rel_tol * scale;

    SimpsonWorker worker{f, static_cast<long>(tol.max_iterations) * 64L};
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
        const double w = nodes[i + 1] - nodes[i];
        total += worker.integrate(nodes[i], nodes[i + 1], eps_total * (w / (b - a)));
    }
    return flip * total;
}

double OdePath::position_at(double t) const {
    if (samples.empty()) throw DomainError("OdePath: empty path");
    if (t <= samples.front().t) return samples.front().x;
    if (t >= samples.back().t) return samples.back().x;
    // binary search for the segment containing t
    std::size_t lo = 0, hi = samples.size() - 1;
    while (hi - lo > 1) {
        const std::size_t mid = (lo + hi) / 2;
        if (samples[mid].t <= t)
            lo = mid;
        else
            hi = mid;
    }
    const OdeSample& s0 = samples[lo];
    const OdeSample& s1 = samples[hi];
    const double h = s1.t - s0.t;
    if (h <= 0.0) return s0.x;
    const double s = (t - s0.t) / h;
    const double s2 = s * s;
    const double s3 = s2 * s;
    const double h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    const double h10 = s3 - 2.0 * s2 + s;
    const double h01 = -2.0 * s3 + 3.0 * s2;
    const double h11 = s3 - s2;
    return h00 * s0.x + h10 * h * s0.v + h01 * s1.x + h11 * h * s1.v;
}

namespace {

// Dormand-Prince 5(4) coefficients
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                 b5 = -2187.0 / 6784, b6 = 11.0 / 84;
// 5th-minus-4th order error weights
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

}  // namespace

OdePath integrate_ode(const VelocityFn& v, double x0, double t0, double t1,
                      const Tolerance& tol) {
    tol.validate();
    if (!(t1 > t0)) throw DomainError("integrate_ode: requires t1 > t0");

    OdePath path;
    double t = t0;
    double x = x0;
    double k1 = v(x, t);
    path.samples.push_back({t, x, k1});

    const double span = t1 - t0;
    const double h_max = span / 64.0;  // bounds trial-stage excursions
    double h = span / 256.0;
    long steps = 0;
    const long max_steps = static_cast<long>(tol.max_iterations) * 1024L;

    while (t < t1) {
        if (++steps > max_steps) throw MaxIterationsError("integrate_ode: step budget exhausted");
        h = std::min({h, h_max, t1 - t});
        if (h < 16.0 * kEps * std::max(std::fabs(t), 1.0))
            throw StepUnderflowError("integrate_ode: step size underflow");

        const double k2 = v(x + h * a21 * k1, t + c2 * h);
        const double k3 = v(x + h * (a31 * k1 + a32 * k2), t + c3 * h);
        const double k4 = v(x + h * (a41 * k1 + a42 * k2 + a43 * k3), t + c4 * h);
        const double k5 = v(x + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), t + c5 * h);
        const double k6 =
            v(x + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), t + h);
        const double x5 = x + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        const double k7 = v(x5, t + h);  // FSAL stage

        const double err_raw =
            h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        const double sc = tol.abs_tol + tol.rel_tol * std::max(std::fabs(x), std::fabs(x5));
        const double err = std::fabs(err_raw) / sc;

        if (err <= 1.0) {
            t += h;
            x = x5;
            k1 = k7;
            path.samples.push_back({t, x, k1});
        }
        const double factor =
            err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
        h *= factor;
    }
    return path;
}

}  // namespace dwell
