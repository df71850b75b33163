#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dwell/errors.hpp"

namespace dwell {

struct Tolerance {
    double abs_tol = 1e-12;
    double rel_tol = 1e-12;
    int max_iterations = 200;

    void validate() const;
};

struct Bracket {
    double lo;
    double hi;
};

using ScalarFn = std::function<double(double)>;
// velocity field v(x, t)
using VelocityFn = std::function<double(double, double)>;

/// Brent-style bracketed root finder (inverse quadratic / secant steps with a
/// bisection fallback). Stops when |f(x)| <= abs_tol or the bracket width has
/// shrunk below rel_tol*|x| + abs_tol. An endpoint already satisfying the
/// function tolerance is returned directly.
double find_root(const ScalarFn& f, Bracket bracket, const Tolerance& tol);

/// Adaptive composite Simpson quadrature over [lo, hi].
double integrate_1d(const ScalarFn& f, double lo, double hi, const Tolerance& tol);

/// Same, with interior breakpoints so piecewise integrands stay smooth per
/// panel. Breakpoints outside (lo, hi) are ignored.
double integrate_1d(const ScalarFn& f, double lo, double hi,
                    std::span<const double> breakpoints, const Tolerance& tol);

struct OdeSample {
    double t;
    double x;
    double v;  // dx/dt at the accepted point, kept for dense output
};

/// Solution path from the adaptive integrator. Accepted steps are the
/// samples; positions between them come from cubic Hermite interpolation.
struct OdePath {
    std::vector<OdeSample> samples;

    double t_begin() const { return samples.front().t; }
    double t_end() const { return samples.back().t; }
    double x_begin() const { return samples.front().x; }
    double x_end() const { return samples.back().x; }

    /// Dense-output position, t clamped to [t_begin, t_end].
    double position_at(double t) const;
};

/// Integrate dx/dt = v(x, t) from (t0, x0) to t1 with an embedded
/// Dormand-Prince 4(5) pair. Local error per step is held below
/// abs_tol + rel_tol*|x|. Exceptions thrown by the velocity callback
/// (e.g. DensityFloorError) propagate unchanged.
OdePath integrate_ode(const VelocityFn& v, double x0, double t0, double t1,
                      const Tolerance& tol);

}  // namespace dwell
