#pragma once

#include <complex>
#include <string>
#include <vector>

#include "dwell/spectrum.hpp"

namespace dwell {

/// Fully-resolved run configuration: config-file values with CLI overrides
/// applied. Every run is deterministic; there is no seed.
struct RunConfig {
    WellGeometry geometry{1.0, 0.2, 60.0};
    int n_even = 1;
    int n_odd = 1;
    std::complex<double> c_even{0.70710678118654752, 0.0};
    std::complex<double> c_odd{0.70710678118654752, 0.0};
    int n_trajectories = 64;
    double tol_root = 1e-12;
    double tol_quad = 1e-12;
    double tol_ode = 1e-10;
    double density_floor = 1e-12;
    int nx = 512;
    int nt = 2;
    std::vector<double> density_times;  // extra dump times for the density command
    int report_class_ensemble = 512;
    int report_dwell_ensemble = 1024;

    void validate() const;  // throws ConfigError naming the offending key
};

/// Parse a config JSON document; unknown keys are an error.
RunConfig parse_config(const std::string& text);

/// Entry point behind the executable; returns the process exit code
/// (0 ok, 1 config error, 2 spectrum failure, 3 integration failure,
/// 4 invariant violation).
int run_cli(int argc, const char* const* argv);

}  // namespace dwell
