#include "dwell/trajectories.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "dwell/timing.hpp"

namespace dwell {

namespace {

constexpr double kEventTimeTol = 1e-10;

// Hermite basis evaluation on one accepted step, s in [0, 1]
double hermite(const OdeSample& s0, const OdeSample& s1, double s) {
    const double h = s1.t - s0.t;
    const double s2 = s * s, s3 = s2 * s;
    return (2.0 * s3 - 3.0 * s2 + 1.0) * s0.x + (s3 - 2.0 * s2 + s) * h * s0.v +
           (-2.0 * s3 + 3.0 * s2) * s1.x + (s3 - s2) * h * s1.v;
}

void append_crossing(std::vector<double>& out, double t) {
    if (!out.empty() && std::fabs(out.back() - t) < 1e-9) return;
    out.push_back(t);
}

// Velocity field on the analytic continuation of the mode profiles, so that
// integrator trial stages probing past a wall stay evaluable. Inside the box
// it coincides with velocity().
double velocity_extended(const WavePacket& p, double x, double t) {
    const std::complex<double> phase_e{std::sin(p.even_mode.energy * t),
                                       std::cos(p.even_mode.energy * t)};
    const std::complex<double> phase_o{std::sin(p.odd_mode.energy * t),
                                       std::cos(p.odd_mode.energy * t)};
    const std::complex<double> amp =
        p.c_even * phase_e * mode_profile_extended(p.even_mode, p.geom, x) +
        p.c_odd * phase_o * mode_profile_extended(p.odd_mode, p.geom, x);
    const double density = std::norm(amp);
    if (density < p.density_floor) {
        std::ostringstream msg;
        msg << "velocity: density " << density << " below floor " << p.density_floor
            << " at x=" << x << " t=" << t;
        throw DensityFloorError(msg.str());
    }
    const std::complex<double> damp =
        p.c_even * phase_e * mode_profile_dx_extended(p.even_mode, p.geom, x) +
        p.c_odd * phase_o * mode_profile_dx_extended(p.odd_mode, p.geom, x);
    return std::imag(std::conj(amp) * damp) / density;
}

// All roots of hermite(s) = edge on one step, found per monotone piece.
void find_crossings(const OdeSample& s0, const OdeSample& s1, double edge,
                    std::vector<double>& out) {
    const double h = s1.t - s0.t;
    if (h <= 0.0) return;

    // derivative of the cubic is quadratic A s^2 + B s + C
    const double hv0 = h * s0.v, hv1 = h * s1.v;
    const double A = 6.0 * (s0.x - s1.x) + 3.0 * (hv0 + hv1);
    const double B = -6.0 * (s0.x - s1.x) - 4.0 * hv0 - 2.0 * hv1;
    const double C = hv0;

    double splits[4] = {0.0, 1.0, 1.0, 1.0};
    int n_splits = 2;
    if (std::fabs(A) > 0.0) {
        const double disc = B * B - 4.0 * A * C;
        if (disc > 0.0) {
            const double sq = std::sqrt(disc);
            for (double r : {(-B - sq) / (2.0 * A), (-B + sq) / (2.0 * A)})
                if (r > 0.0 && r < 1.0) splits[n_splits++] = r;
        }
    } else if (std::fabs(B) > 0.0) {
        const double r = -C / B;
        if (r > 0.0 && r < 1.0) splits[n_splits++] = r;
    }
    std::sort(splits, splits + n_splits);

    for (int i = 0; i + 1 < n_splits; ++i) {
        double lo = splits[i], hi = splits[i + 1];
        if (hi - lo <= 0.0) continue;
        double glo = hermite(s0, s1, lo) - edge;
        double ghi = hermite(s0, s1, hi) - edge;
        if (ghi == 0.0) {
            append_crossing(out, s0.t + hi * h);
            continue;
        }
        if (glo == 0.0 || glo * ghi > 0.0) continue;
        while ((hi - lo) * h > kEventTimeTol) {
            const double mid = 0.5 * (lo + hi);
            const double gm = hermite(s0, s1, mid) - edge;
            if (gm == 0.0) {
                lo = hi = mid;
                break;
            }
            if ((gm < 0.0) == (glo < 0.0)) {
                lo = mid;
                glo = gm;
            } else {
                hi = mid;
            }
        }
        append_crossing(out, s0.t + 0.5 * (lo + hi) * h);
    }
}

}  // namespace

std::string_view to_string(TrajectoryClass c) {
    switch (c) {
        case TrajectoryClass::LeftStayer: return "LeftStayer";
        case TrajectoryClass::Returner: return "Returner";
        case TrajectoryClass::Traveller: return "Traveller";
        case TrajectoryClass::InsideAtStart: return "InsideAtStart";
        case TrajectoryClass::RightSide: return "RightSide";
    }
    return "?";
}

Trajectory run_trajectory(const WavePacket& packet, double x0, double t_end,
                          const Tolerance& tol) {
    const double a = packet.geom.a;
    if (std::fabs(x0) >= a) {
        std::ostringstream msg;
        msg << "run_trajectory: start " << x0 << " not strictly inside the box";
        throw DomainError(msg.str());
    }
    if (rho(packet, x0, 0.0) < packet.density_floor) {
        std::ostringstream msg;
        msg << "run_trajectory: initial density below floor at x0=" << x0;
        throw DensityFloorError(msg.str());
    }

    Trajectory traj;
    traj.x0 = x0;
    traj.path = integrate_ode(
        [&](double x, double t) { return velocity_extended(packet, x, t); }, x0, 0.0, t_end,
        tol);

    const double b = packet.geom.b;
    if (x0 == -b) append_crossing(traj.crossings_minus_b, 0.0);
    if (x0 == b) append_crossing(traj.crossings_plus_b, 0.0);
    for (std::size_t i = 0; i + 1 < traj.path.samples.size(); ++i) {
        find_crossings(traj.path.samples[i], traj.path.samples[i + 1], -b,
                       traj.crossings_minus_b);
        find_crossings(traj.path.samples[i], traj.path.samples[i + 1], b,
                       traj.crossings_plus_b);
    }
    return traj;
}

double quantile_start(const WavePacket& packet, double q, const Tolerance& tol) {
    if (!(q > 0.0) || !(q < 1.0))
        throw QuantileFailureError("quantile_start: q must lie in (0, 1)");
    const double a = packet.geom.a;
    const Tolerance quad{1e-13, 1e-13, 100000};
    const double breakpoints[] = {-packet.geom.b, packet.geom.b};
    const auto cdf = [&](double x) {
        return integrate_1d([&](double u) { return rho(packet, u, 0.0); }, -a, x, breakpoints,
                            quad);
    };
    const double total = cdf(a);
    try {
        return find_root([&](double x) { return cdf(x) - q * total; }, Bracket{-a, a}, tol);
    } catch (const NoSignChangeError& e) {
        throw QuantileFailureError(std::string("quantile_start: ") + e.what());
    }
}

std::vector<Trajectory> build_ensemble(const WavePacket& packet, int n_tot, double t_end,
                                       const Tolerance& tol) {
    if (n_tot < 1) throw DomainError("build_ensemble: n_tot must be positive");
    std::vector<Trajectory> ensemble;
    ensemble.reserve(n_tot);
    for (int k = 1; k <= n_tot; ++k) {
        const double q = (k - 0.5) / n_tot;
        Trajectory traj = run_trajectory(packet, quantile_start(packet, q, tol), t_end, tol);
        traj.weight = 1.0 / n_tot;
        ensemble.push_back(std::move(traj));
    }
    return ensemble;
}

std::vector<Trajectory> band_ensemble(const WavePacket& packet, double x_lo, double x_hi,
                                      int n, double t_end, const Tolerance& tol) {
    if (n < 1) throw DomainError("band_ensemble: n must be positive");
    if (!(x_lo < x_hi)) throw DomainError("band_ensemble: requires x_lo < x_hi");
    const double a = packet.geom.a;
    const Tolerance quad{1e-13, 1e-13, 100000};
    const double breakpoints[] = {-packet.geom.b, packet.geom.b};
    const auto cdf = [&](double x) {
        return integrate_1d([&](double u) { return rho(packet, u, 0.0); }, -a, x, breakpoints,
                            quad);
    };
    const double total = cdf(a);
    const double q_lo = cdf(x_lo) / total;
    const double q_hi = cdf(x_hi) / total;
    if (!(q_hi - q_lo > 0.0))
        throw QuantileFailureError("band_ensemble: band carries no probability");

    std::vector<Trajectory> ensemble;
    ensemble.reserve(n);
    for (int k = 1; k <= n; ++k) {
        const double q = q_lo + (q_hi - q_lo) * (k - 0.5) / n;
        Trajectory traj = run_trajectory(packet, quantile_start(packet, q, tol), t_end, tol);
        traj.weight = (q_hi - q_lo) / n;
        ensemble.push_back(std::move(traj));
    }
    return ensemble;
}

double bifurcation_s2(const WavePacket& packet, const Tolerance& tol) {
    tol.validate();
    const double a = packet.geom.a;
    const double b = packet.geom.b;
    const double t_half = half_period(packet);

    const Tolerance ode{1e-11, 1e-11, 100000};
    const auto passed_barrier = [&](double x0) {
        return run_trajectory(packet, x0, t_half, ode).path.x_end() > b;
    };

    // coarse scan for a predicate bracket; margins keep the density healthy
    const double margin = 1e-3 * (a - b);
    const double lo = -a + margin;
    const double hi = -b - margin;
    constexpr int kGrid = 48;
    double x_false = lo, x_true = hi;
    bool have_false = false, have_true = false;
    for (int i = 0; i < kGrid; ++i) {
        const double x = lo + (hi - lo) * static_cast<double>(i) / (kGrid - 1);
        if (passed_barrier(x)) {
            x_true = x;
            have_true = true;
            break;
        }
        x_false = x;
        have_false = true;
    }
    if (!have_false || !have_true)
        throw BisectionFailureError(
            "bifurcation_s2: predicate does not change over the scanned starts");

    while (x_true - x_false > tol.abs_tol) {
        const double mid = 0.5 * (x_false + x_true);
        if (passed_barrier(mid))
            x_true = mid;
        else
            x_false = mid;
    }
    return 0.5 * (x_false + x_true);
}

namespace {

TrajectoryClass region_of(double x0, const CriticalPoints& cp, double b) {
    if (x0 <= cp.s1) return TrajectoryClass::LeftStayer;
    if (x0 <= cp.s2) return TrajectoryClass::Returner;
    if (x0 <= -b) return TrajectoryClass::Traveller;
    if (x0 <= b) return TrajectoryClass::InsideAtStart;
    return TrajectoryClass::RightSide;
}

// first element of xs in (lo, hi], or nothing
std::optional<double> first_in(const std::vector<double>& xs, double lo, double hi) {
    for (double x : xs)
        if (x > lo && x <= hi) return x;
    return std::nullopt;
}

int count_in(const std::vector<double>& xs, double lo, double hi) {
    int n = 0;
    for (double x : xs)
        if (x > lo && x <= hi) ++n;
    return n;
}

}  // namespace

TrajectoryClass classify(const Trajectory& traj, const CriticalPoints& cp,
                         const WellGeometry& geom) {
    const double b = geom.b;
    const TrajectoryClass cls = region_of(traj.x0, cp, b);

    if (traj.t_end() < cp.t_n * (1.0 - 1e-9))
        throw DomainError("classify: trajectory must be integrated to at least t_n");

    // starts too close to a region boundary are exempt from verification
    const double x_tol = 1e-5 * 2.0 * geom.a;
    const double boundaries[] = {cp.s1, cp.s2, -b, b};
    for (double edge : boundaries)
        if (std::fabs(traj.x0 - edge) <= x_tol) return cls;

    const double ts = 1e-5 * cp.t_half;  // slack on event-time windows
    const auto& in = traj.crossings_minus_b;
    const auto& out = traj.crossings_plus_b;
    const int n_in_half = count_in(in, 0.0, cp.t_half);
    const int n_out_half = count_in(out, 0.0, cp.t_half);

    bool ok = false;
    switch (cls) {
        case TrajectoryClass::LeftStayer:
            ok = n_in_half == 0 && n_out_half == 0;
            break;
        case TrajectoryClass::Returner: {
            const auto enter = first_in(in, 0.0, cp.t_half);
            const auto leave = first_in(in, cp.t_half, cp.t_n + ts);
            ok = n_in_half == 1 && n_out_half == 0 && enter && *enter > cp.t_p - ts && leave &&
                 *leave > cp.t_half;
            break;
        }
        case TrajectoryClass::Traveller: {
            const auto enter = traj.x0 == -b ? std::optional<double>(0.0)
                                             : first_in(in, 0.0, cp.t_half);
            const auto leave = first_in(out, 0.0, cp.t_half + ts);
            ok = enter && *enter <= cp.t_p + ts && leave && *leave >= cp.t_m - ts;
            break;
        }
        case TrajectoryClass::InsideAtStart: {
            const auto leave = first_in(out, 0.0, cp.t_half);
            ok = n_in_half == 0 && leave && *leave <= cp.t_m + ts;
            break;
        }
        case TrajectoryClass::RightSide:
            ok = n_in_half == 0 && n_out_half == 0;
            break;
    }
    if (!ok) {
        std::ostringstream msg;
        msg << "classify: region class " << to_string(cls) << " for x0=" << traj.x0
            << " contradicts realized crossings";
        throw ClassMismatchError(msg.str());
    }
    return cls;
}

double barrier_residence(const Trajectory& traj, const WellGeometry& geom, double t_hi) {
    const double b = geom.b;
    double t_enter;
    if (traj.x0 >= b) return 0.0;
    if (traj.x0 > -b) {
        t_enter = 0.0;
    } else {
        const auto enter = first_in(traj.crossings_minus_b, -1.0, t_hi);
        if (!enter) return 0.0;
        t_enter = std::max(*enter, 0.0);
    }
    const auto leave = first_in(traj.crossings_plus_b, t_enter, t_hi);
    return (leave ? *leave : t_hi) - t_enter;
}

}  // namespace dwell
