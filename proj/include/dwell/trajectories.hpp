#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "dwell/wavepacket.hpp"

namespace dwell {

struct CriticalPoints;  // defined in timing.hpp

/// Fate of a trajectory by starting region (regions are closed on the left:
/// a start exactly on a boundary belongs to the lower region).
enum class TrajectoryClass { LeftStayer, Returner, Traveller, InsideAtStart, RightSide };

std::string_view to_string(TrajectoryClass c);

/// One Bohmian path x(t) with its dense solution and barrier-edge events.
struct Trajectory {
    double x0 = 0.0;
    double weight = 1.0;
    OdePath path;
    std::vector<double> crossings_minus_b;  // times of passage at -b, ascending
    std::vector<double> crossings_plus_b;   // times of passage at +b, ascending
    std::optional<TrajectoryClass> fate;

    double position_at(double t) const { return path.position_at(t); }
    double t_end() const { return path.t_end(); }
};

/// Integrate a single trajectory from x0 at t = 0 to t_end, locating all
/// barrier-edge crossings on the dense output (bisection to 1e-10 in t).
/// Fate stays unset; classify() assigns it once critical points are known.
Trajectory run_trajectory(const WavePacket& packet, double x0, double t_end,
                          const Tolerance& tol);

/// Start position at cumulative initial probability q in (0, 1).
double quantile_start(const WavePacket& packet, double q, const Tolerance& tol);

/// Ensemble with starts at the (N - 1/2)/n_tot quantiles of rho(., 0), each
/// carrying weight 1/n_tot.
std::vector<Trajectory> build_ensemble(const WavePacket& packet, int n_tot, double t_end,
                                       const Tolerance& tol);

/// Equal-probability starts restricted to the band (x_lo, x_hi); used for
/// per-class statistics. Weights are 1/n of the band mass.
std::vector<Trajectory> band_ensemble(const WavePacket& packet, double x_lo, double x_hi,
                                      int n, double t_end, const Tolerance& tol);

/// Transmission/reflection bifurcation start point, located by bisection on
/// the predicate "the trajectory has passed +b by the half period".
/// tol.abs_tol is the position tolerance.
double bifurcation_s2(const WavePacket& packet, const Tolerance& tol);

/// Region-based classification, cross-checked against the realized
/// crossings; throws ClassMismatchError when the two disagree for a start
/// farther than 1e-5*(2a) from every region boundary.
TrajectoryClass classify(const Trajectory& traj, const CriticalPoints& critical,
                         const WellGeometry& geom);

/// Time spent inside the barrier during [0, t_hi]; valid for t_hi within the
/// first half period, where the flow is unidirectional.
double barrier_residence(const Trajectory& traj, const WellGeometry& geom, double t_hi);

}  // namespace dwell
