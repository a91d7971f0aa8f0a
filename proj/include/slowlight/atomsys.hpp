#pragma once

// Parameter types and the rotating-frame optical Bloch equations of an open
// three-level lambda system: ground states |p> and |c> coupled to a common
// excited state |e> by the probe and coupling lasers, with excited-state
// decay branching into |c>, |p> and a sink |out> that neither laser drives.

#include <cmath>
#include <complex>
#include <numbers>

#include "slowlight/constants.hpp"
#include "slowlight/errors.hpp"

namespace slowlight {

using cplx = std::complex<double>;

enum class Geometry { copropagating, counterpropagating, orthogonal };

// open: excited population decays at A = gamma_c + gamma_p + gamma_out.
// closed_repumped: a repumper empties the sink, so the population decay is
// gamma_c + gamma_p while the optical coherences still decay at A/2.
enum class SystemVariant { open, closed_repumped };

struct AtomParams {
    double A = 0.0;          // total excited-state decay rate, rad/s
    double gamma_c = 0.0;    // branch rate into |c>, rad/s
    double gamma_p = 0.0;    // branch rate into |p>, rad/s
    double gamma_out = 0.0;  // branch rate into the sink, rad/s
    double gamma_cp = 0.0;   // ground-state coherence decay, rad/s
    double mass = 0.0;       // kg
    double lambda_c = 0.0;   // coupling transition wavelength, m
    double lambda_p = 0.0;   // probe transition wavelength, m
    double dipole_c = 0.0;   // C m
    double dipole_p = 0.0;   // C m
    Geometry geometry = Geometry::orthogonal;

    double k_c() const { return 2.0 * std::numbers::pi / lambda_c; }
    double k_p() const { return 2.0 * std::numbers::pi / lambda_p; }
    double omega_c() const { return 2.0 * std::numbers::pi * constants::c0 / lambda_c; }
    double omega_p() const { return 2.0 * std::numbers::pi * constants::c0 / lambda_p; }

    void validate() const;  // throws validation_error
    bool operator==(const AtomParams&) const = default;
};

struct LaserParams {
    double omega_c_rabi = 0.0;  // constant coupling Rabi frequency, rad/s
    double omega_p_peak = 0.0;  // probe peak Rabi frequency, rad/s
    double pulse_width = 0.0;   // Gaussian width T, s
    double delta_c = 0.0;       // one-photon detunings, rad/s
    double delta_p = 0.0;
    double density = 0.0;       // atoms / m^3

    double delta_raman() const { return delta_c - delta_p; }

    void validate() const;
    bool operator==(const LaserParams&) const = default;
};

// Populations plus the independent rotating-frame coherences
// rho_ep = <e|rho|p>, rho_ec = <e|rho|c>, rho_cp = <c|rho|p>.
// The sink population is tracked, so the extended trace stays 1.
struct BlochState {
    double rho_pp = 0.0;
    double rho_cc = 0.0;
    double rho_ee = 0.0;
    double rho_out = 0.0;
    cplx rho_ep{};
    cplx rho_ec{};
    cplx rho_cp{};

    double trace() const { return rho_pp + rho_cc + rho_ee + rho_out; }

    static BlochState ground_p() {
        BlochState s;
        s.rho_pp = 1.0;
        return s;
    }

    bool finite() const {
        return std::isfinite(rho_pp) && std::isfinite(rho_cc) && std::isfinite(rho_ee) &&
               std::isfinite(rho_out) && std::isfinite(rho_ep.real()) &&
               std::isfinite(rho_ep.imag()) && std::isfinite(rho_ec.real()) &&
               std::isfinite(rho_ec.imag()) && std::isfinite(rho_cp.real()) &&
               std::isfinite(rho_cp.imag());
    }
};

inline BlochState operator+(BlochState a, const BlochState& b) {
    a.rho_pp += b.rho_pp;
    a.rho_cc += b.rho_cc;
    a.rho_ee += b.rho_ee;
    a.rho_out += b.rho_out;
    a.rho_ep += b.rho_ep;
    a.rho_ec += b.rho_ec;
    a.rho_cp += b.rho_cp;
    return a;
}

inline BlochState operator*(double s, BlochState a) {
    a.rho_pp *= s;
    a.rho_cc *= s;
    a.rho_ee *= s;
    a.rho_out *= s;
    a.rho_ep *= s;
    a.rho_ec *= s;
    a.rho_cp *= s;
    return a;
}

namespace detail {

// Right-hand side of the rotating-frame OBE with an explicit ground-coherence
// decay rate (the momentum mode augments it with the local kinetic rate).
//
//   d rho_ee = -Gamma_e rho_ee + Im(Wp* rho_ep) + Im(Wc* rho_ec)
//   d rho_ep = (i dp - A/2) rho_ep + (i/2) Wp (rho_pp - rho_ee) + (i/2) Wc rho_cp
//   d rho_ec = (i dc - A/2) rho_ec + (i/2) Wc (rho_cc - rho_ee) + (i/2) Wp rho_cp*
//   d rho_cp = (-i dR - gamma) rho_cp + (i/2) (Wc* rho_ep - Wp rho_ec*)
//
// with dR = dc - dp and feeding terms gamma_c/gamma_p/gamma_out * rho_ee into
// the respective populations (no sink feeding in the repumped variant).
// The coherent pump terms are shared between populations so the extended
// trace derivative cancels exactly in floating point.
inline BlochState obe_rhs_core(const BlochState& s, cplx wc, cplx wp, const AtomParams& a,
                               const LaserParams& l, SystemVariant variant,
                               double gamma_ground) noexcept {
    const bool open = variant == SystemVariant::open;
    const double gamma_e = open ? a.A : a.gamma_c + a.gamma_p;
    const double feed_out = open ? a.gamma_out : 0.0;

    const double pump_p = std::imag(std::conj(wp) * s.rho_ep);
    const double pump_c = std::imag(std::conj(wc) * s.rho_ec);

    constexpr cplx ih{0.0, 0.5};

    BlochState d;
    d.rho_pp = a.gamma_p * s.rho_ee - pump_p;
    d.rho_cc = a.gamma_c * s.rho_ee - pump_c;
    d.rho_ee = -gamma_e * s.rho_ee + pump_p + pump_c;
    d.rho_out = feed_out * s.rho_ee;
    d.rho_ep = cplx(-0.5 * a.A, l.delta_p) * s.rho_ep + ih * wp * (s.rho_pp - s.rho_ee) +
               ih * wc * s.rho_cp;
    d.rho_ec = cplx(-0.5 * a.A, l.delta_c) * s.rho_ec + ih * wc * (s.rho_cc - s.rho_ee) +
               ih * wp * std::conj(s.rho_cp);
    d.rho_cp = cplx(-gamma_ground, -l.delta_raman()) * s.rho_cp +
               ih * (std::conj(wc) * s.rho_ep - wp * std::conj(s.rho_ec));
    return d;
}

}  // namespace detail

/// OBE right-hand side in the rotating frame. Rejects non-finite input.
BlochState obe_rhs(const BlochState& state, cplx omega_c, cplx omega_p, const AtomParams& atoms,
                   const LaserParams& lasers, SystemVariant variant);

/// Rabi frequency D E / hbar.
double rabi_from_field(double field_amplitude, double dipole);

/// Field amplitude hbar Omega / D, the inverse of rabi_from_field.
double field_from_rabi(double rabi, double dipole);

/// Dipole moment from a branch decay rate: D^2 = 3 pi eps0 hbar c^3 rate / omega^3.
double dipole_from_decay(double partial_rate, double omega);

/// |k_c - k_p|^2 for the configured beam geometry. Copropagating beams of
/// (near) equal wavelength carry no net two-photon momentum.
double momentum_kick_sq(const AtomParams& atoms);

/// Kinetic decoherence rate of the noncoupled state,
/// gamma_k = hbar |k_c - k_p|^2 / (2 M) * Omega_p^2 / (Omega_p^2 + Omega_c^2).
/// Throws numerical_error when both Rabi frequencies vanish.
double gamma_k(double omega_p, double omega_c, const AtomParams& atoms);

/// Density matrix of the noncoupled (dark) state
/// |NC> = (Omega_p |c> - Omega_c |p>) / Omega.
BlochState dark_state_projector(cplx omega_c, cplx omega_p);

}  // namespace slowlight
