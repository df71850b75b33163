#include "dwell/wavepacket.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace dwell {

WavePacket make_packet(const WellGeometry& geom, const EigenMode& even_mode,
                       const EigenMode& odd_mode, std::complex<double> c_even,
                       std::complex<double> c_odd, double density_floor) {
    geom.validate();
    if (even_mode.parity != Parity::Even || odd_mode.parity != Parity::Odd)
        throw DomainError("make_packet: modes must be one even, one odd");
    const double norm = std::norm(c_even) + std::norm(c_odd);
    if (std::fabs(norm - 1.0) > 1e-12) {
        std::ostringstream msg;
        msg << "make_packet: |c_even|^2 + |c_odd|^2 = " << norm << ", expected 1";
        throw DomainError(msg.str());
    }
    if (!(density_floor > 0.0)) throw DomainError("make_packet: density floor must be positive");
    return WavePacket{geom, even_mode, odd_mode, c_even, c_odd, density_floor};
}

WavePacket make_default_packet(const WellGeometry& geom, int n_even, int n_odd,
                               const Tolerance& tol, double density_floor) {
    const EigenMode fe = solve_mode(Parity::Even, n_even, geom, tol);
    const EigenMode fo = solve_mode(Parity::Odd, n_odd, geom, tol);
    const double c = 1.0 / std::numbers::sqrt2;
    return make_packet(geom, fe, fo, c, c, density_floor);
}

std::complex<double> psi(const WavePacket& p, double x, double t) {
    return p.c_even * eval_mode(p.even_mode, p.geom, x, t) +
           p.c_odd * eval_mode(p.odd_mode, p.geom, x, t);
}

std::complex<double> psi_dx(const WavePacket& p, double x, double t) {
    return p.c_even * eval_mode_dx(p.even_mode, p.geom, x, t) +
           p.c_odd * eval_mode_dx(p.odd_mode, p.geom, x, t);
}

double rho(const WavePacket& p, double x, double t) { return std::norm(psi(p, x, t)); }

double current(const WavePacket& p, double x, double t) {
    return std::imag(std::conj(psi(p, x, t)) * psi_dx(p, x, t));
}

double velocity(const WavePacket& p, double x, double t) {
    const std::complex<double> amp = psi(p, x, t);
    const double density = std::norm(amp);
    if (density < p.density_floor) {
        std::ostringstream msg;
        msg << "velocity: density " << density << " below floor " << p.density_floor << " at x="
            << x << " t=" << t;
        throw DensityFloorError(msg.str());
    }
    return std::imag(std::conj(amp) * psi_dx(p, x, t)) / density;
}

FieldSample sample_field(const WavePacket& p, double x, double t) {
    const std::complex<double> amp = psi(p, x, t);
    const double density = std::norm(amp);
    const double flux = std::imag(std::conj(amp) * psi_dx(p, x, t));
    std::optional<double> vel;
    if (density >= p.density_floor) vel = flux / density;
    return FieldSample{x, t, amp, density, flux, vel};
}

double half_period(const WavePacket& p) {
    const double gap = p.odd_mode.energy - p.even_mode.energy;
    if (!(gap > 0.0)) {
        std::ostringstream msg;
        msg << "half_period: modes degenerate, E_odd - E_even = " << gap;
        throw DegenerateModesError(msg.str());
    }
    return std::numbers::pi / gap;
}

double barrier_probability(const WavePacket& p, double t, const Tolerance& tol) {
    return integrate_1d([&](double x) { return rho(p, x, t); }, -p.geom.b, p.geom.b, tol);
}

}  // namespace dwell
