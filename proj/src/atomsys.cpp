#include "slowlight/atomsys.hpp"

#include <cmath>
#include <string>

namespace slowlight {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw validation_error(what);
}

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void AtomParams::validate() const {
    require(finite(A) && A > 0.0, "AtomParams: A must be a positive rate");
    require(gamma_c >= 0.0 && gamma_p >= 0.0 && gamma_out >= 0.0,
            "AtomParams: branch rates must be >= 0");
    require(gamma_cp >= 0.0, "AtomParams: gamma_cp must be >= 0");
    // A = Gamma_c + Gamma_p + Gamma_out, allowing rounding from ratios like A/3.
    const double sum = gamma_c + gamma_p + gamma_out;
    require(std::abs(sum - A) <= 1e-12 * A,
            "AtomParams: gamma_c + gamma_p + gamma_out must equal A");
    require(finite(mass) && mass > 0.0, "AtomParams: mass must be > 0");
    require(finite(lambda_c) && lambda_c > 0.0 && finite(lambda_p) && lambda_p > 0.0,
            "AtomParams: wavelengths must be > 0");
    require(finite(dipole_c) && dipole_c >= 0.0 && finite(dipole_p) && dipole_p >= 0.0,
            "AtomParams: dipole moments must be >= 0");
}

void LaserParams::validate() const {
    require(finite(pulse_width) && pulse_width > 0.0, "LaserParams: pulse_width must be > 0");
    // density = 0 is the vacuum reference case, omega_c_rabi = 0 the bare
    // two-level absorber; both are legitimate scenarios.
    require(finite(density) && density >= 0.0, "LaserParams: density must be >= 0");
    require(finite(omega_p_peak) && omega_p_peak >= 0.0,
            "LaserParams: omega_p_peak must be >= 0");
    require(finite(omega_c_rabi) && omega_c_rabi >= 0.0,
            "LaserParams: omega_c_rabi must be >= 0");
    require(finite(delta_c) && finite(delta_p), "LaserParams: detunings must be finite");
}

BlochState obe_rhs(const BlochState& state, cplx omega_c, cplx omega_p, const AtomParams& atoms,
                   const LaserParams& lasers, SystemVariant variant) {
    if (!state.finite() || !std::isfinite(std::abs(omega_c)) || !std::isfinite(std::abs(omega_p)))
        throw numerical_error("obe_rhs: non-finite state or field");
    return detail::obe_rhs_core(state, omega_c, omega_p, atoms, lasers, variant, atoms.gamma_cp);
}

double rabi_from_field(double field_amplitude, double dipole) {
    if (!std::isfinite(field_amplitude) || !std::isfinite(dipole) || dipole <= 0.0)
        throw numerical_error("rabi_from_field: needs finite field and dipole > 0");
    return dipole * field_amplitude / constants::hbar;
}

double field_from_rabi(double rabi, double dipole) {
    if (!std::isfinite(rabi) || !std::isfinite(dipole) || dipole <= 0.0)
        throw numerical_error("field_from_rabi: needs finite rabi and dipole > 0");
    return constants::hbar * rabi / dipole;
}

double dipole_from_decay(double partial_rate, double omega) {
    if (!std::isfinite(partial_rate) || partial_rate < 0.0 || !std::isfinite(omega) ||
        omega <= 0.0)
        throw numerical_error("dipole_from_decay: needs rate >= 0 and omega > 0");
    const double d2 = 3.0 * std::numbers::pi * constants::eps0 * constants::hbar *
                      constants::c0 * constants::c0 * constants::c0 * partial_rate /
                      (omega * omega * omega);
    return std::sqrt(d2);
}

double momentum_kick_sq(const AtomParams& atoms) {
    const double kc = atoms.k_c();
    const double kp = atoms.k_p();
    switch (atoms.geometry) {
        case Geometry::copropagating:
            return 0.0;
        case Geometry::counterpropagating:
            return (kc + kp) * (kc + kp);
        case Geometry::orthogonal:
            return kc * kc + kp * kp;
    }
    return 0.0;
}

double gamma_k(double omega_p, double omega_c, const AtomParams& atoms) {
    const double total_sq = omega_p * omega_p + omega_c * omega_c;
    if (!(total_sq > 0.0))
        throw numerical_error("gamma_k: undefined for zero total Rabi frequency");
    const double prefactor =
        constants::hbar * momentum_kick_sq(atoms) / (2.0 * atoms.mass);
    return prefactor * omega_p * omega_p / total_sq;
}

BlochState dark_state_projector(cplx omega_c, cplx omega_p) {
    const double total_sq = std::norm(omega_c) + std::norm(omega_p);
    if (!(total_sq > 0.0))
        throw numerical_error("dark_state_projector: undefined for zero total field");
    BlochState s;
    s.rho_pp = std::norm(omega_c) / total_sq;
    s.rho_cc = std::norm(omega_p) / total_sq;
    s.rho_cp = -omega_p * std::conj(omega_c) / total_sq;
    return s;
}

}  // namespace slowlight
