#pragma once

#include <complex>

#include "dwell/numerics.hpp"

namespace dwell {

/// Box on [-a, a] with infinite walls and a rectangular barrier of height V
/// on [-b, b]. Atomic units (hbar = m = 1) throughout.
struct WellGeometry {
    double a;  // half box length
    double b;  // half barrier length
    double V;  // barrier height

    void validate() const;
};

enum class Parity { Even, Odd };

/// One stationary solution of the double well with energy below the barrier.
/// The spatial profile u(x) is real; the evaluator carries the overall factor
/// i and the phase e^{-iEt}. norm is real and positive, fixing the gauge.
struct EigenMode {
    Parity parity;
    int branch;         // branch index n of the quantisation condition
    double energy;      // E, 0 < E < V
    double wavenumber;  // k = sqrt(2E)
    double decay;       // alpha = sqrt(2(V-E))
    double norm;        // N with integral of (N u)^2 over the box = 1
};

/// Quantisation residual for even modes,
///   arctan(sqrt(E/(V-E)) coth(b sqrt(2(V-E)))) - n pi + (a-b) sqrt(2E).
/// Eigenvalues are its zeros; strictly increasing in E on (0, V).
double even_residual(double E, const WellGeometry& geom, int n);

/// Odd-mode counterpart with tanh in place of coth.
double odd_residual(double E, const WellGeometry& geom, int n);

/// Solve branch n of the requested parity: scan (0, V) on a uniform grid for
/// the first sign change of the residual, polish with find_root, then fix the
/// normalisation by quadrature. Throws NoBoundModeError when the branch has
/// no root below the barrier.
EigenMode solve_mode(Parity parity, int n, const WellGeometry& geom, const Tolerance& tol);

/// Normalised spatial profile N*u(x). Exactly zero at the walls.
double mode_profile(const EigenMode& mode, const WellGeometry& geom, double x);

/// Analytic spatial derivative of mode_profile.
double mode_profile_dx(const EigenMode& mode, const WellGeometry& geom, double x);

/// Same formulas without the box-domain guard: the piecewise expressions
/// continue analytically past the walls. Adaptive integrators probe trial
/// positions slightly outside the box; the continuation keeps those
/// evaluations finite (and restoring, since u ~ x+a near a wall).
double mode_profile_extended(const EigenMode& mode, const WellGeometry& geom, double x);
double mode_profile_dx_extended(const EigenMode& mode, const WellGeometry& geom, double x);

/// Full mode value N * i * e^{-iEt} * u(x).
std::complex<double> eval_mode(const EigenMode& mode, const WellGeometry& geom, double x,
                               double t);

/// Spatial derivative of eval_mode.
std::complex<double> eval_mode_dx(const EigenMode& mode, const WellGeometry& geom, double x,
                                  double t);

}  // namespace dwell
