#include "slowlight/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace slowlight {

namespace {

// Trapezoidal quadrature of samples on the uniform tau grid.
double trapz(const std::vector<double>& y, double dt) {
    double sum = 0.5 * (y.front() + y.back());
    for (std::size_t j = 1; j + 1 < y.size(); ++j) sum += y[j];
    return sum * dt;
}

int station_index(const PropagationResult& r, double z) {
    const double dz = r.grid.dz();
    const int idx = static_cast<int>(std::llround(z / dz));
    return std::clamp(idx, 0, r.grid.n_z);
}

}  // namespace

double pulse_delay(const PropagationResult& result, double z) {
    const auto& slice = result.slice_at(z);
    const double dt = result.grid.dt();
    const std::size_t n = result.tau.size();
    std::vector<double> w(n), tw(n);
    for (std::size_t j = 0; j < n; ++j) {
        w[j] = std::norm(slice.fields.omega_p[j]);
        tw[j] = result.tau[j] * w[j];
    }
    const double energy = trapz(w, dt);
    if (!(energy > 0.0))
        throw numerical_error("pulse_delay: zero probe energy, delay undefined");
    return trapz(tw, dt) / energy;
}

double group_velocity(const PropagationResult& result, double z) {
    if (!(z > 0.0)) throw numerical_error("group_velocity: requires z > 0");
    const double delay = pulse_delay(result, z);
    return constants::c0 / (1.0 + constants::c0 * delay / z);
}

AdiabaticityProfile adiabaticity_profile(const PropagationResult& result, double z) {
    const auto& slice = result.slice_at(z);
    const double dt = result.grid.dt();
    const std::size_t n = result.tau.size();

    std::vector<double> ac(n), ap(n);
    AdiabaticityProfile prof;
    prof.omega_total.resize(n);
    prof.omega_minus.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        ac[j] = std::abs(slice.fields.omega_c[j]);
        ap[j] = std::abs(slice.fields.omega_p[j]);
        prof.omega_total[j] = std::hypot(ac[j], ap[j]);
        if (prof.omega_total[j] <= 0.0)
            throw numerical_error("adiabaticity_profile: total field vanishes in the window");
    }
    const auto ddt = [&](const std::vector<double>& a, std::size_t j) {
        if (j == 0) return (a[1] - a[0]) / dt;
        if (j + 1 == n) return (a[n - 1] - a[n - 2]) / dt;
        return (a[j + 1] - a[j - 1]) / (2.0 * dt);
    };
    for (std::size_t j = 0; j < n; ++j) {
        const double om2 = prof.omega_total[j] * prof.omega_total[j];
        prof.omega_minus[j] = (ddt(ac, j) * ap[j] - ddt(ap, j) * ac[j]) / om2;
        prof.max_ratio =
            std::max(prof.max_ratio, std::abs(prof.omega_minus[j]) / prof.omega_total[j]);
    }
    return prof;
}

double transparency_window(const AtomParams& atoms, const LaserParams& lasers,
                           double interaction_time, SystemVariant variant) {
    if (!(interaction_time > 0.0))
        throw numerical_error("transparency_window: interaction time must be > 0");
    const double wc = lasers.omega_c_rabi;
    const double wp = lasers.omega_p_peak;
    const double om_sq = wc * wc + wp * wp;
    if (variant == SystemVariant::closed_repumped)
        return om_sq / atoms.A + 1.0 / interaction_time;
    if (!(atoms.gamma_out > 0.0) || !(wc > 0.0) || !(wp > 0.0))
        throw numerical_error(
            "transparency_window: open formula needs gamma_out > 0 and nonzero fields");
    const double bracket = (1.0 + atoms.gamma_p / atoms.gamma_out) / (wp * wp) +
                           (1.0 + atoms.gamma_c / atoms.gamma_out) / (wc * wc);
    return om_sq / (2.0 * std::sqrt(atoms.A * interaction_time)) * std::sqrt(bracket);
}

double eit_absorption_length(const AtomParams& atoms, const LaserParams& lasers) {
    const MediumConstants mc = medium_constants(atoms, lasers);
    if (atoms.gamma_cp == 0.0 || mc.kappa_p == 0.0)
        return std::numeric_limits<double>::infinity();
    const double wc = lasers.omega_c_rabi;
    return atoms.A / mc.kappa_p * (wc * wc / (2.0 * atoms.gamma_cp * atoms.A) + 1.0);
}

double adiabaton_depth(const PropagationResult& result, double z) {
    const auto& slice = result.slice_at(z);
    const double ref = result.lasers.omega_c_rabi * result.lasers.omega_c_rabi;
    if (ref <= 0.0) return 0.0;
    double depth = 0.0;
    for (const cplx& w : slice.fields.omega_c)
        depth = std::max(depth, std::abs(std::norm(w) - ref) / ref);
    return depth;
}

ForceTrace forces(const PropagationResult& result, double z, const AtomParams& atoms) {
    const auto& slice = result.slice_at(z);
    const std::size_t n = result.tau.size();
    const double kp = atoms.k_p();

    ForceTrace tr;
    tr.f_rp.resize(n);
    tr.f_dip.resize(n);
    for (std::size_t j = 0; j < n; ++j) {
        const cplx wp = slice.fields.omega_p[j];
        const cplx rep = slice.bloch[j].rho_ep;
        tr.f_rp[j] = constants::hbar * kp * std::imag(wp * rep);
        // d Omega_p / dz = i kappa_p rho_ep, so Re((dW/dz) rho_ep) = -kappa Im(rho_ep^2).
        tr.f_dip[j] = -constants::hbar * result.kappa_p * std::imag(rep * rep);
    }
    tr.impulse_rp = trapz(tr.f_rp, result.grid.dt());
    tr.impulse_dip = trapz(tr.f_dip, result.grid.dt());
    return tr;
}

double nc_projection(const BlochState& state, cplx omega_c, cplx omega_p) {
    const double total_sq = std::norm(omega_c) + std::norm(omega_p);
    if (!(total_sq > 0.0))
        throw numerical_error("nc_projection: undefined for zero total field");
    const double value = std::norm(omega_p) * state.rho_cc + std::norm(omega_c) * state.rho_pp -
                         2.0 * std::real(std::conj(omega_p) * omega_c * state.rho_cp);
    return value / total_sq;
}

PulseMetrics pulse_metrics(const PropagationResult& result, double z) {
    PulseMetrics m;
    m.delay = pulse_delay(result, z);
    m.group_velocity = group_velocity(result, z);

    const int iz = station_index(result, z);
    m.transmission_energy = result.probe_energy[0] > 0.0
                                ? result.probe_energy[iz] / result.probe_energy[0]
                                : 0.0;
    m.transmission_peak =
        result.probe_peak[0] > 0.0 ? result.probe_peak[iz] / result.probe_peak[0] : 0.0;

    const auto& slice = result.slice_at(z);
    const double dt = result.grid.dt();
    const std::size_t n = result.tau.size();
    std::vector<double> w(n), m2(n);
    for (std::size_t j = 0; j < n; ++j) w[j] = std::norm(slice.fields.omega_p[j]);
    const double energy = trapz(w, dt);
    for (std::size_t j = 0; j < n; ++j) {
        const double d = result.tau[j] - m.delay;
        m2[j] = d * d * w[j];
    }
    // |Omega_p|^2 of a Gaussian amplitude of width T has variance T^2/2.
    m.fitted_width = energy > 0.0 ? std::sqrt(2.0 * trapz(m2, dt) / energy) : 0.0;
    return m;
}

double gaussian_shape_residual(const PropagationResult& result, double z) {
    const auto& slice = result.slice_at(z);
    const PulseMetrics m = pulse_metrics(result, z);
    const std::size_t n = result.tau.size();
    double peak = 0.0;
    for (const cplx& w : slice.fields.omega_p) peak = std::max(peak, std::abs(w));
    if (!(peak > 0.0) || !(m.fitted_width > 0.0))
        throw numerical_error("gaussian_shape_residual: degenerate pulse");
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double d = result.tau[j] - m.delay;
        const double model = peak * std::exp(-d * d / (2.0 * m.fitted_width * m.fitted_width));
        worst = std::max(worst, std::abs(std::abs(slice.fields.omega_p[j]) - model));
    }
    return worst / peak;
}

}  // namespace slowlight
