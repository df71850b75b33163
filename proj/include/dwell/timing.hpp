#pragma once

#include <optional>
#include <string>
#include <vector>

#include "dwell/trajectories.hpp"
#include "dwell/wavepacket.hpp"

namespace dwell {

/// Critical positions and times of the half-period story. All quantities
/// here come from the density route; the identities t_m = t_half - t_p and
/// t_n = t_half + t_m are verified, not imposed (t_p and t_m are located
/// from independent conditions).
struct CriticalPoints {
    double s1;      // left edge of the reflection band
    double s2;      // reflection/transmission bifurcation start
    double t_p;     // last traveller entrance time at -b
    double t_m;     // first traveller arrival time at +b
    double t_n;     // last returner exit time at -b
    double t_half;  // pi / (E_odd - E_even)
};

struct TimeWindow {
    double lo;
    double hi;
};

/// Normalised arrival-time distribution Pi(t) = j(x1, t) / integral of j
/// over the window; valid in the single-crossing regime where j keeps one
/// sign on the window.
struct ArrivalDistribution {
    double x1;
    TimeWindow window;
    double normalizer;  // integral of j over the window

    double density(const WavePacket& packet, double t) const;
};

/// s1 from the balance between the never-entering left mass and the mass
/// already past the barrier at t = 0.
double find_s1(const WavePacket& packet, const Tolerance& tol);

/// s2 from the balance between the reflection band and the barrier mass.
double find_s2(const WavePacket& packet, double s1, const Tolerance& tol);

/// Transmission probability: initial mass between s2 and -b.
double transmission_coefficient(const WavePacket& packet, double s2,
                                const Tolerance& tol = Tolerance{1e-12, 1e-12, 100000});

/// Reflection probability: initial mass between s1 and s2 (equals the
/// constant barrier probability).
double reflection_coefficient(const WavePacket& packet, double s1, double s2,
                              const Tolerance& tol = Tolerance{1e-12, 1e-12, 100000});

/// Last traveller entrance time: the left side at t_p holds exactly the
/// initial mass left of s2.
double find_tp(const WavePacket& packet, double s2, const Tolerance& tol);

/// First traveller arrival at +b: the right side at t_m holds the initial
/// mass right of -b.
double find_tm(const WavePacket& packet, const Tolerance& tol);

/// All critical points by the density route.
CriticalPoints critical_points(const WavePacket& packet, const Tolerance& tol);

/// Average dwell time t_half * (barrier probability); constancy of the
/// barrier probability is asserted.
double dwell_time(const WavePacket& packet,
                  const Tolerance& tol = Tolerance{1e-12, 1e-12, 100000});

ArrivalDistribution arrival_distribution(const WavePacket& packet, double x1,
                                         TimeWindow window,
                                         const Tolerance& tol = Tolerance{1e-12, 1e-12, 100000});

/// Flux-weighted mean arrival time at x1 over the window.
double mean_arrival(const WavePacket& packet, double x1, TimeWindow window,
                    const Tolerance& tol = Tolerance{1e-12, 1e-12, 100000});

/// Mean exit arrival at +b minus mean entrance arrival at -b.
double transmission_time(const WavePacket& packet, const CriticalPoints& cp,
                         const Tolerance& tol = Tolerance{1e-12, 1e-12, 100000});

/// Mean outgoing passage at -b on [t_half, t_n] minus mean incoming passage
/// on [t_p, t_half]; the outgoing window uses |j| since the flow reverses.
double reflection_time(const WavePacket& packet, const CriticalPoints& cp,
                       const Tolerance& tol = Tolerance{1e-12, 1e-12, 100000});

struct ReportOptions {
    int n_class_ensemble = 512;   // per-class trajectory count for route A
    int n_dwell_ensemble = 1024;  // global ensemble size for the residence average
    Tolerance root{1e-12, 1e-12, 200};
    Tolerance quad{1e-12, 1e-12, 100000};
    Tolerance ode{1e-10, 1e-10, 100000};
    bool with_trajectories = true;  // route A can be disabled for quick reports
};

/// Everything, by both routes, with consistency checks.
struct TimingReport {
    // spectrum echo
    double energy_even = 0.0;
    double energy_odd = 0.0;
    double t_half = 0.0;

    bool degenerate = false;  // single-mode packet: no flux anywhere

    std::optional<CriticalPoints> critical;  // density route

    // probabilities (route B); the transmission coefficient by all density
    // and flux routes
    double transmission = 0.0;
    double transmission_complement = 0.0;
    double transmission_flux_entry = 0.0;
    double transmission_flux_exit = 0.0;
    double reflection = 0.0;
    double never_enter = 0.0;
    double inside_at_start = 0.0;
    double right_side = 0.0;

    // times (route B); null where the flux vanishes
    double dwell = 0.0;
    std::optional<double> mean_arrival_entry;
    std::optional<double> mean_arrival_exit;
    std::optional<double> time_transmission;
    std::optional<double> time_reflection;

    // route A (trajectory) counterparts
    struct RouteA {
        int n_class_ensemble = 0;
        int n_dwell_ensemble = 0;
        double s2 = 0.0;
        double t_p = 0.0;
        double t_m = 0.0;
        double mean_arrival_entry = 0.0;
        double mean_arrival_exit = 0.0;
        double time_transmission = 0.0;
        double time_reflection = 0.0;
        double dwell = 0.0;
    };
    std::optional<RouteA> route_a;

    struct Check {
        std::string name;
        double residual;
        double tolerance;
        bool pass;
    };
    std::vector<Check> checks;

    bool all_pass() const;
};

TimingReport full_report(const WavePacket& packet, const ReportOptions& opts = {});

}  // namespace dwell
