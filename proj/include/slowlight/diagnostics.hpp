#pragma once

// Observables extracted from a propagation: centroid delay and group
// velocity, transmission, adiabaticity, transparency windows, EIT absorption
// length, adiabatons, light forces and the dark-state projection.

#include <vector>

#include "slowlight/maxwell_bloch.hpp"

namespace slowlight {

struct PulseMetrics {
    double delay = 0.0;                // s
    double group_velocity = 0.0;       // m/s
    double transmission_energy = 0.0;  // pulse energy relative to the input
    double transmission_peak = 0.0;    // peak |Omega_p| relative to the input
    double fitted_width = 0.0;         // s, moment width of |Omega_p|^2
};

/// Centroid delay tau_d(z) = int tau |Omega_p|^2 dtau / int |Omega_p|^2 dtau
/// at a stored slice. Throws numerical_error when the probe energy is zero.
double pulse_delay(const PropagationResult& result, double z);

/// v_g = c / (1 + c tau_d(z) / z); requires z > 0.
double group_velocity(const PropagationResult& result, double z);

struct AdiabaticityProfile {
    std::vector<double> omega_minus;  // nonadiabatic coupling rate over tau
    std::vector<double> omega_total;  // sqrt(|Omega_p|^2 + |Omega_c|^2)
    double max_ratio = 0.0;           // max over tau of |Omega_minus| / Omega
};

/// Omega_minus = (d|Omega_c|/dt |Omega_p| - d|Omega_p|/dt |Omega_c|) / Omega^2
/// with central time differences. Throws numerical_error when the total
/// field vanishes anywhere in the window.
AdiabaticityProfile adiabaticity_profile(const PropagationResult& result, double z);

/// Transparency window at interaction time Theta. Closed variant:
/// Omega^2/A + 1/Theta. Open variant divides by the branch ratios and both
/// Rabi frequencies, so it requires gamma_out > 0 and nonzero fields.
double transparency_window(const AtomParams& atoms, const LaserParams& lasers,
                           double interaction_time, SystemVariant variant);

/// EIT absorption length (A/kappa_p) [Omega_c^2 / (2 gamma_cp A) + 1].
/// Returns +infinity for gamma_cp = 0 (no EIT attenuation channel).
double eit_absorption_length(const AtomParams& atoms, const LaserParams& lasers);

/// Relative coupling-intensity modulation max | |Omega_c(z,tau)|^2 -
/// Omega_c(0)^2 | / Omega_c(0)^2 at a stored slice.
double adiabaton_depth(const PropagationResult& result, double z);

struct ForceTrace {
    std::vector<double> f_rp;   // radiation-pressure force over tau, N
    std::vector<double> f_dip;  // dipole force over tau, N
    double impulse_rp = 0.0;    // time integrals, kg m/s
    double impulse_dip = 0.0;
};

/// Longitudinal light forces at a stored slice:
///   F_rp  = hbar k_p Im(Omega_p rho_ep)
///   F_dip = hbar Re((d Omega_p/dz) rho_ep), with the exact wave-equation
/// source i kappa_p rho_ep as the z derivative.
ForceTrace forces(const PropagationResult& result, double z, const AtomParams& atoms);

/// Population of the noncoupled state <NC|rho|NC>.
double nc_projection(const BlochState& state, cplx omega_c, cplx omega_p);

/// Delay, group velocity, transmissions and moment width at a stored slice
/// with z > 0.
PulseMetrics pulse_metrics(const PropagationResult& result, double z);

/// Peak-normalised worst deviation of |Omega_p(z,tau)| from the Gaussian
/// with the slice's own peak, centroid and moment width.
double gaussian_shape_residual(const PropagationResult& result, double z);

}  // namespace slowlight
