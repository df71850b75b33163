#pragma once

#include <complex>
#include <optional>

#include "dwell/spectrum.hpp"

namespace dwell {

/// Two-mode superposition c_e f_e + c_o f_o of the lowest even and odd
/// bound modes (or any requested branches). Immutable after construction.
struct WavePacket {
    WellGeometry geom;
    EigenMode even_mode;
    EigenMode odd_mode;
    std::complex<double> c_even;
    std::complex<double> c_odd;
    double density_floor = 1e-12;
};

struct FieldSample {
    double x;
    double t;
    std::complex<double> psi;
    double rho;
    double j;
    std::optional<double> v;  // only defined where rho >= density_floor
};

/// Build a packet from already-solved modes, checking the coefficient
/// normalisation |c_e|^2 + |c_o|^2 = 1 (to 1e-12) and the parity pairing.
WavePacket make_packet(const WellGeometry& geom, const EigenMode& even_mode,
                       const EigenMode& odd_mode, std::complex<double> c_even,
                       std::complex<double> c_odd, double density_floor = 1e-12);

/// Solve both modes for the given branches and combine them with the
/// default equal real coefficients 1/sqrt(2).
WavePacket make_default_packet(const WellGeometry& geom, int n_even = 1, int n_odd = 1,
                               const Tolerance& tol = Tolerance{},
                               double density_floor = 1e-12);

std::complex<double> psi(const WavePacket& packet, double x, double t);
std::complex<double> psi_dx(const WavePacket& packet, double x, double t);

double rho(const WavePacket& packet, double x, double t);

/// Probability current j = Im(psi* d_x psi) with hbar = m = 1.
double current(const WavePacket& packet, double x, double t);

/// Bohmian velocity j / rho. Throws DensityFloorError below the floor.
double velocity(const WavePacket& packet, double x, double t);

FieldSample sample_field(const WavePacket& packet, double x, double t);

/// Half period pi / (E_odd - E_even): the packet's side-to-side travel time.
double half_period(const WavePacket& packet);

/// Probability inside the barrier at time t (constant in t for this packet).
double barrier_probability(const WavePacket& packet, double t,
                           const Tolerance& tol = Tolerance{1e-12, 1e-12, 100000});

}  // namespace dwell
