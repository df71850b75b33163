#include "dwell/timing.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace dwell {

namespace {

// initial-density cumulative mass from the left wall
double cdf0(const WavePacket& p, double x, const Tolerance& quad) {
    const double breakpoints[] = {-p.geom.b, p.geom.b};
    return integrate_1d([&](double u) { return rho(p, u, 0.0); }, -p.geom.a, x, breakpoints,
                        quad);
}

double side_mass(const WavePacket& p, double lo, double hi, double t, const Tolerance& quad) {
    return integrate_1d([&](double x) { return rho(p, x, t); }, lo, hi, quad);
}

double flux_integral(const WavePacket& p, double x1, TimeWindow w, const Tolerance& quad) {
    return integrate_1d([&](double t) { return current(p, x1, t); }, w.lo, w.hi, quad);
}

bool has_flux(const WavePacket& p) {
    return std::abs(p.c_even) * std::abs(p.c_odd) >= 1e-15;
}

}  // namespace

double find_s1(const WavePacket& packet, const Tolerance& tol) {
    tol.validate();
    const Tolerance quad{1e-13, 1e-13, 100000};
    const double a = packet.geom.a;
    const double b = packet.geom.b;
    const double right_mass = side_mass(packet, b, a, 0.0, quad);
    try {
        return find_root([&](double s) { return cdf0(packet, s, quad) - right_mass; },
                         Bracket{-a, -b}, tol);
    } catch (const NoSignChangeError& e) {
        throw BisectionFailureError(std::string("find_s1: ") + e.what());
    }
}

double find_s2(const WavePacket& packet, double s1, const Tolerance& tol) {
    tol.validate();
    const Tolerance quad{1e-13, 1e-13, 100000};
    const double b = packet.geom.b;
    const double barrier_mass = side_mass(packet, -b, b, 0.0, quad);
    const double base = cdf0(packet, s1, quad);
    try {
        return find_root([&](double s) { return cdf0(packet, s, quad) - base - barrier_mass; },
                         Bracket{s1, -b}, tol);
    } catch (const NoSignChangeError& e) {
        throw BisectionFailureError(std::string("find_s2: ") + e.what());
    }
}

double transmission_coefficient(const WavePacket& packet, double s2, const Tolerance& tol) {
    if (!has_flux(packet)) return 0.0;
    return integrate_1d([&](double x) { return rho(packet, x, 0.0); }, s2, -packet.geom.b,
                        tol);
}

double reflection_coefficient(const WavePacket& packet, double s1, double s2,
                              const Tolerance& tol) {
    return integrate_1d([&](double x) { return rho(packet, x, 0.0); }, s1, s2, tol);
}

double find_tp(const WavePacket& packet, double s2, const Tolerance& tol) {
    tol.validate();
    const Tolerance quad{1e-13, 1e-13, 100000};
    const double a = packet.geom.a;
    const double b = packet.geom.b;
    const double target = cdf0(packet, s2, quad);
    const double t_half = half_period(packet);
    try {
        return find_root(
            [&](double t) { return side_mass(packet, -a, -b, t, quad) - target; },
            Bracket{0.0, t_half}, tol);
    } catch (const NoSignChangeError& e) {
        throw BisectionFailureError(std::string("find_tp: ") + e.what());
    }
}

double find_tm(const WavePacket& packet, const Tolerance& tol) {
    tol.validate();
    const Tolerance quad{1e-13, 1e-13, 100000};
    const double a = packet.geom.a;
    const double b = packet.geom.b;
    const double target = side_mass(packet, -b, b, 0.0, quad) + side_mass(packet, b, a, 0.0, quad);
    const double t_half = half_period(packet);
    try {
        return find_root(
            [&](double t) { return side_mass(packet, b, a, t, quad) - target; },
            Bracket{0.0, t_half}, tol);
    } catch (const NoSignChangeError& e) {
        throw BisectionFailureError(std::string("find_tm: ") + e.what());
    }
}

CriticalPoints critical_points(const WavePacket& packet, const Tolerance& tol) {
    const double t_half = half_period(packet);
    const double s1 = find_s1(packet, tol);
    const double s2 = find_s2(packet, s1, tol);
    const double t_p = find_tp(packet, s2, tol);
    const double t_m = find_tm(packet, tol);
    return CriticalPoints{s1, s2, t_p, t_m, t_half + t_m, t_half};
}

double dwell_time(const WavePacket& packet, const Tolerance& tol) {
    const double t_half = half_period(packet);
    const double p0 = barrier_probability(packet, 0.0, tol);
    for (double t : {t_half / 3.0, t_half}) {
        const double pt = barrier_probability(packet, t, tol);
        if (std::fabs(pt - p0) > 1e-6) {
            std::ostringstream msg;
            msg << "dwell_time: barrier probability not constant: " << p0 << " vs " << pt
                << " at t=" << t;
            throw DomainError(msg.str());
        }
    }
    return t_half * p0;
}

double ArrivalDistribution::density(const WavePacket& packet, double t) const {
    if (t < window.lo || t > window.hi) return 0.0;
    return current(packet, x1, t) / normalizer;
}

ArrivalDistribution arrival_distribution(const WavePacket& packet, double x1,
                                         TimeWindow window, const Tolerance& tol) {
    const double norm = flux_integral(packet, x1, window, tol);
    if (std::fabs(norm) < 1e-14) {
        std::ostringstream msg;
        msg << "arrival_distribution: flux through x=" << x1 << " integrates to " << norm;
        throw ZeroFluxError(msg.str());
    }
    return ArrivalDistribution{x1, window, norm};
}

double mean_arrival(const WavePacket& packet, double x1, TimeWindow window,
                    const Tolerance& tol) {
    const double m0 = flux_integral(packet, x1, window, tol);
    if (std::fabs(m0) < 1e-14) {
        std::ostringstream msg;
        msg << "mean_arrival: flux through x=" << x1 << " integrates to " << m0;
        throw ZeroFluxError(msg.str());
    }
    const double m1 = integrate_1d([&](double t) { return t * current(packet, x1, t); },
                                   window.lo, window.hi, tol);
    return m1 / m0;
}

double transmission_time(const WavePacket& packet, const CriticalPoints& cp,
                         const Tolerance& tol) {
    const double entry = mean_arrival(packet, -packet.geom.b, {0.0, cp.t_p}, tol);
    const double exit = mean_arrival(packet, packet.geom.b, {cp.t_m, cp.t_half}, tol);
    return exit - entry;
}

double reflection_time(const WavePacket& packet, const CriticalPoints& cp,
                       const Tolerance& tol) {
    const double b = packet.geom.b;
    const double entry = mean_arrival(packet, -b, {cp.t_p, cp.t_half}, tol);
    // outgoing branch: flow through -b has reversed, average against |j|
    const double m0 = integrate_1d([&](double t) { return std::fabs(current(packet, -b, t)); },
                                   cp.t_half, cp.t_n, tol);
    if (std::fabs(m0) < 1e-14) throw ZeroFluxError("reflection_time: no outgoing flux at -b");
    const double m1 =
        integrate_1d([&](double t) { return t * std::fabs(current(packet, -b, t)); },
                     cp.t_half, cp.t_n, tol);
    return m1 / m0 - entry;
}

bool TimingReport::all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

void add_check(TimingReport& report, std::string name, double residual, double tolerance) {
    report.checks.push_back({std::move(name), residual, tolerance, residual <= tolerance});
}

double mean(const std::vector<double>& xs) {
    double s = 0.0;
    for (double x : xs) s += x;
    return s / static_cast<double>(xs.size());
}

double rel_diff(double x, double ref) {
    return std::fabs(x - ref) / std::max(std::fabs(ref), 1e-300);
}

// first crossing strictly inside (lo, hi]
std::optional<double> first_crossing(const std::vector<double>& ts, double lo, double hi) {
    for (double t : ts)
        if (t > lo && t <= hi) return t;
    return std::nullopt;
}

}  // namespace

TimingReport full_report(const WavePacket& packet, const ReportOptions& opts) {
    TimingReport report;
    report.energy_even = packet.even_mode.energy;
    report.energy_odd = packet.odd_mode.energy;
    report.t_half = half_period(packet);
    const double t_half = report.t_half;
    const double a = packet.geom.a;
    const double b = packet.geom.b;
    const Tolerance& quad = opts.quad;

    // norm and barrier-probability constancy hold for every packet
    double norm_residual = 0.0;
    for (double t : {0.0, 0.25 * t_half, 0.5 * t_half, 0.75 * t_half, t_half}) {
        const double breakpoints[] = {-b, b};
        const double total = integrate_1d([&](double x) { return rho(packet, x, t); }, -a, a,
                                          breakpoints, quad);
        norm_residual = std::max(norm_residual, std::fabs(total - 1.0));
    }
    add_check(report, "norm_conservation", norm_residual, 1e-8);

    const double p_barrier = barrier_probability(packet, 0.0, quad);
    double constancy_residual = 0.0;
    for (double t : {t_half / 3.0, 0.5 * t_half, t_half})
        constancy_residual = std::max(
            constancy_residual, std::fabs(barrier_probability(packet, t, quad) - p_barrier));
    add_check(report, "barrier_probability_constant", constancy_residual, 1e-8);

    report.dwell = t_half * p_barrier;
    report.inside_at_start = p_barrier;
    report.right_side = side_mass(packet, b, a, 0.0, quad);

    if (!has_flux(packet)) {
        // single-mode packet: nothing moves, no transmission story
        report.degenerate = true;
        report.never_enter = side_mass(packet, -a, -b, 0.0, quad);
        const double sum =
            report.never_enter + report.inside_at_start + report.right_side;
        add_check(report, "probabilities_sum_to_one", std::fabs(sum - 1.0), 1e-8);
        return report;
    }

    const CriticalPoints cp = critical_points(packet, opts.root);
    report.critical = cp;

    report.transmission = transmission_coefficient(packet, cp.s2, quad);
    report.transmission_complement =
        1.0 - 2.0 * (report.inside_at_start + report.right_side);
    report.transmission_flux_entry = flux_integral(packet, -b, {0.0, cp.t_p}, quad);
    report.transmission_flux_exit = flux_integral(packet, b, {cp.t_m, cp.t_half}, quad);
    report.reflection = reflection_coefficient(packet, cp.s1, cp.s2, quad);
    report.never_enter = side_mass(packet, -a, cp.s1, 0.0, quad);

    const double prob_sum = report.transmission + report.reflection + report.never_enter +
                            report.inside_at_start + report.right_side;
    add_check(report, "probabilities_sum_to_one", std::fabs(prob_sum - 1.0), 1e-8);

    double range_residual = 0.0;
    for (double pr : {report.transmission, report.reflection, report.never_enter,
                      report.inside_at_start, report.right_side})
        range_residual = std::max({range_residual, -pr, pr - 1.0});
    add_check(report, "probabilities_in_unit_interval", std::max(0.0, range_residual), 1e-12);

    double t2_spread = 0.0;
    const double t2[] = {report.transmission, report.transmission_complement,
                         report.transmission_flux_entry, report.transmission_flux_exit};
    for (double x : t2)
        for (double y : t2) t2_spread = std::max(t2_spread, std::fabs(x - y));
    add_check(report, "transmission_three_way", t2_spread, 1e-6);

    add_check(report, "tm_identity", std::fabs(cp.t_m - (t_half - cp.t_p)), 1e-6 * t_half);

    double entry_flux_min = 0.0, exit_flux_max = 0.0;
    for (int i = 0; i <= 1000; ++i) {
        const double t_in = t_half * i / 1000.0;
        entry_flux_min = std::min(entry_flux_min, current(packet, -b, t_in));
        const double t_out = t_half + (cp.t_n - t_half) * i / 1000.0;
        exit_flux_max = std::max(exit_flux_max, current(packet, -b, t_out));
    }
    add_check(report, "flux_unidirectional_first_half", std::max(0.0, -entry_flux_min), 1e-12);
    add_check(report, "flux_reversed_return_window", std::max(0.0, exit_flux_max), 1e-12);

    try {
        report.mean_arrival_entry = mean_arrival(packet, -b, {0.0, cp.t_p}, quad);
        report.mean_arrival_exit = mean_arrival(packet, b, {cp.t_m, cp.t_half}, quad);
        report.time_transmission = transmission_time(packet, cp, quad);
        report.time_reflection = reflection_time(packet, cp, quad);
    } catch (const ZeroFluxError&) {
        // leave the affected fields null; probabilities already recorded
    }

    if (report.time_transmission && report.time_reflection) {
        add_check(report, "channel_times_positive",
                  std::max({0.0, -*report.time_transmission, -*report.time_reflection}),
                  1e-15);
        const double decomposed = report.transmission * *report.time_transmission +
                                  report.reflection * *report.time_reflection;
        add_check(report, "dwell_decomposition", rel_diff(decomposed, report.dwell), 1e-3);
    }

    if (opts.with_trajectories) {
        TimingReport::RouteA ra;
        ra.n_class_ensemble = opts.n_class_ensemble;
        ra.n_dwell_ensemble = opts.n_dwell_ensemble;

        Tolerance s2_tol = opts.root;
        s2_tol.abs_tol = 1e-7 * 2.0 * a;
        ra.s2 = bifurcation_s2(packet, s2_tol);
        add_check(report, "s2_route_agreement", std::fabs(ra.s2 - cp.s2), 1e-5 * 2.0 * a);

        const Trajectory from_s2 = run_trajectory(packet, cp.s2, cp.t_half, opts.ode);
        const auto tp_event = first_crossing(from_s2.crossings_minus_b, 0.0, cp.t_half);
        ra.t_p = tp_event.value_or(cp.t_half);
        add_check(report, "tp_trajectory_agreement", std::fabs(ra.t_p - cp.t_p),
                  1e-4 * t_half);

        const Trajectory from_minus_b = run_trajectory(packet, -b, cp.t_half, opts.ode);
        const auto tm_event = first_crossing(from_minus_b.crossings_plus_b, 0.0, cp.t_half);
        ra.t_m = tm_event.value_or(cp.t_half);
        add_check(report, "tm_trajectory_agreement", std::fabs(ra.t_m - cp.t_m),
                  1e-4 * t_half);

        // traveller statistics: equal-probability starts inside (s2, -b)
        std::vector<double> entries, exits, spans;
        for (const Trajectory& tr : band_ensemble(packet, cp.s2, -b, opts.n_class_ensemble,
                                                  1.02 * t_half, opts.ode)) {
            const auto entry = first_crossing(tr.crossings_minus_b, 0.0, tr.t_end());
            const auto exit = first_crossing(tr.crossings_plus_b, 0.0, tr.t_end());
            if (!entry || !exit)
                throw ClassMismatchError("full_report: traveller without both crossings");
            entries.push_back(*entry);
            exits.push_back(*exit);
            spans.push_back(*exit - *entry);
        }
        ra.mean_arrival_entry = mean(entries);
        ra.mean_arrival_exit = mean(exits);
        ra.time_transmission = mean(spans);
        if (report.mean_arrival_entry)
            add_check(report, "mean_entry_route_agreement",
                      std::fabs(ra.mean_arrival_entry - *report.mean_arrival_entry),
                      1e-3 * t_half);
        if (report.mean_arrival_exit)
            add_check(report, "mean_exit_route_agreement",
                      std::fabs(ra.mean_arrival_exit - *report.mean_arrival_exit),
                      1e-3 * t_half);
        if (report.time_transmission)
            add_check(report, "transmission_time_route_agreement",
                      rel_diff(ra.time_transmission, *report.time_transmission), 1e-3);

        // returner statistics: starts inside (s1, s2), observed until past t_n
        std::vector<double> round_trips;
        for (const Trajectory& tr : band_ensemble(packet, cp.s1, cp.s2, opts.n_class_ensemble,
                                                  cp.t_n + 0.05 * t_half, opts.ode)) {
            const auto entry = first_crossing(tr.crossings_minus_b, 0.0, cp.t_half);
            const auto exit = first_crossing(tr.crossings_minus_b, cp.t_half, tr.t_end());
            if (!entry || !exit)
                throw ClassMismatchError("full_report: returner without entry/exit pair");
            round_trips.push_back(*exit - *entry);
        }
        ra.time_reflection = mean(round_trips);
        if (report.time_reflection)
            add_check(report, "reflection_time_route_agreement",
                      rel_diff(ra.time_reflection, *report.time_reflection), 1e-3);

        // residence average over the Fig. 3 style global ensemble
        double residence = 0.0;
        for (const Trajectory& tr :
             build_ensemble(packet, opts.n_dwell_ensemble, t_half, opts.ode))
            residence += tr.weight * barrier_residence(tr, packet.geom, t_half);
        ra.dwell = residence;
        add_check(report, "dwell_route_agreement", rel_diff(ra.dwell, report.dwell), 1e-3);

        report.route_a = ra;
    }

    return report;
}

}  // namespace dwell
