#include "slowlight/maxwell_bloch.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

namespace slowlight {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw validation_error(what);
}

double trapezoid_energy(std::span<const cplx> field, double dt) {
    const std::size_t n = field.size();
    double sum = 0.5 * (std::norm(field[0]) + std::norm(field[n - 1]));
    for (std::size_t j = 1; j + 1 < n; ++j) sum += std::norm(field[j]);
    return sum * dt;
}

double peak_abs(std::span<const cplx> field) {
    double peak = 0.0;
    for (const cplx& v : field) peak = std::max(peak, std::abs(v));
    return peak;
}

}  // namespace

MediumConstants medium_constants(const AtomParams& atoms, const LaserParams& lasers) {
    MediumConstants mc;
    const double scale = lasers.density / (constants::c0 * constants::eps0 * constants::hbar);
    mc.kappa_c = atoms.omega_c() * atoms.dipole_c * atoms.dipole_c * scale;
    mc.kappa_p = atoms.omega_p() * atoms.dipole_p * atoms.dipole_p * scale;
    mc.zeta_p = mc.kappa_p > 0.0 ? atoms.A / mc.kappa_p
                                 : std::numeric_limits<double>::infinity();
    return mc;
}

double estimate_delay(const AtomParams& atoms, const LaserParams& lasers, double z) {
    const MediumConstants mc = medium_constants(atoms, lasers);
    if (mc.kappa_p <= 0.0 || z <= 0.0) return 0.0;
    const double wc = lasers.omega_c_rabi;
    // Weak-probe dispersion slope 2 kappa_p / Omega_c^2; without a coupling
    // field the two-level dispersion carries no slow-light delay.
    if (wc <= 0.0) return 0.0;
    return 2.0 * mc.kappa_p * z / (wc * wc);
}

void Grid::validate(const AtomParams& atoms, const LaserParams& lasers) const {
    require(n_tau >= 2, "Grid: n_tau must be at least 2");
    require(n_z >= 1, "Grid: n_z must be at least 1");
    require(std::isfinite(tau_min) && std::isfinite(tau_max) && tau_max > tau_min,
            "Grid: tau window must be finite with tau_max > tau_min");
    require(std::isfinite(z_max) && z_max > 0.0, "Grid: z_max must be > 0");

    const double T = lasers.pulse_width;
    require(tau_min < -3.0 * T, "Grid: tau_min must lie below -3 pulse widths");
    const double delay = 1.5 * estimate_delay(atoms, lasers, z_max);
    require(tau_max > 3.0 * T + delay,
            "Grid: tau_max must exceed 3 pulse widths plus 1.5x the estimated delay");

    require(T / dt() >= 16.0 * (1.0 - 1e-12),
            "Grid: fewer than 16 time samples per pulse width");

    const MediumConstants mc = medium_constants(atoms, lasers);
    if (std::isfinite(mc.zeta_p)) {
        require(static_cast<double>(n_z) * mc.zeta_p / z_max >= 4.0 * (1.0 - 1e-12),
                "Grid: fewer than 4 z-steps per Beer length");
    }
}

Grid resolve_grid(const Scenario& sc) {
    sc.atoms.validate();
    sc.lasers.validate();
    const MediumConstants mc = medium_constants(sc.atoms, sc.lasers);

    Grid g;
    g.z_max = sc.z_max.beer_lengths && sc.z_max.value == 0.0 ? 0.0
                                                             : sc.z_max.resolve(mc.zeta_p);
    require(std::isfinite(g.z_max),
            "Grid: z_max in Beer lengths requires an absorbing medium (finite zeta_p)");
    require(g.z_max > 0.0, "Grid: z_max must be > 0");

    const double T = sc.lasers.pulse_width;
    const double delay = 1.5 * estimate_delay(sc.atoms, sc.lasers, g.z_max);
    g.tau_min = sc.tau_min.value_or(-4.0 * T);
    g.tau_max = sc.tau_max.value_or(3.5 * T + delay);

    if (sc.n_tau) {
        g.n_tau = *sc.n_tau;
    } else {
        const double dt_target = std::min(0.5 / sc.atoms.A, T / 32.0);
        g.n_tau = static_cast<int>(std::ceil((g.tau_max - g.tau_min) / dt_target)) + 1;
    }
    if (sc.n_z) {
        g.n_z = *sc.n_z;
    } else if (std::isfinite(mc.zeta_p)) {
        g.n_z = std::max(16, static_cast<int>(std::ceil(8.0 * g.z_max / mc.zeta_p)));
    } else {
        g.n_z = 16;
    }
    return g;
}

const PropagationResult::Slice& PropagationResult::slice_at(double z) const {
    const double tol = 0.5 * grid.dz() + 1e-12 * grid.z_max;
    for (const Slice& s : slices)
        if (std::abs(s.z - z) <= tol) return s;
    std::ostringstream msg;
    msg << "no stored slice near z = " << z << "; stored:";
    for (const Slice& s : slices) msg << ' ' << s.z;
    throw validation_error(msg.str());
}

const PropagationResult::Slice& PropagationResult::final_slice() const {
    if (slices.empty()) throw validation_error("propagation stored no slices");
    return slices.back();
}

std::vector<BlochState> integrate_slice(const BlochState& initial, std::span<const cplx> omega_c,
                                        std::span<const cplx> omega_p, double dt,
                                        const AtomParams& atoms, const LaserParams& lasers,
                                        SystemVariant variant, bool momentum_mode,
                                        double* max_drift) {
    require(omega_c.size() == omega_p.size() && omega_c.size() >= 2,
            "integrate_slice: field arrays need equal length >= 2");
    if (!initial.finite() || !(dt > 0.0))
        throw numerical_error("integrate_slice: non-finite initial state or bad step");

    const double kick_pref =
        momentum_mode ? constants::hbar * momentum_kick_sq(atoms) / (2.0 * atoms.mass) : 0.0;
    const auto gamma_ground = [&](const cplx& wc, const cplx& wp) {
        if (!momentum_mode) return atoms.gamma_cp;
        const double ps = std::norm(wp);
        const double total = ps + std::norm(wc);
        // No light, no light-induced decoherence.
        return total > 0.0 ? atoms.gamma_cp + kick_pref * ps / total : atoms.gamma_cp;
    };

    const std::size_t n = omega_c.size();
    std::vector<BlochState> out(n);
    out[0] = initial;
    BlochState y = initial;
    double drift = std::abs(y.trace() - 1.0);

    for (std::size_t j = 0; j + 1 < n; ++j) {
        const cplx wc0 = omega_c[j], wp0 = omega_p[j];
        const cplx wc1 = omega_c[j + 1], wp1 = omega_p[j + 1];
        const cplx wcm = 0.5 * (wc0 + wc1), wpm = 0.5 * (wp0 + wp1);
        const double g0 = gamma_ground(wc0, wp0);
        const double gm = gamma_ground(wcm, wpm);
        const double g1 = gamma_ground(wc1, wp1);

        const BlochState k1 = detail::obe_rhs_core(y, wc0, wp0, atoms, lasers, variant, g0);
        const BlochState k2 = detail::obe_rhs_core(y + (0.5 * dt) * k1, wcm, wpm, atoms, lasers,
                                                   variant, gm);
        const BlochState k3 = detail::obe_rhs_core(y + (0.5 * dt) * k2, wcm, wpm, atoms, lasers,
                                                   variant, gm);
        const BlochState k4 = detail::obe_rhs_core(y + dt * k3, wc1, wp1, atoms, lasers, variant,
                                                   g1);
        y = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        out[j + 1] = y;

        drift = std::max(drift, std::abs(y.trace() - 1.0));
        if (drift > trace_tolerance || !y.finite()) {
            std::ostringstream msg;
            msg << "integrate_slice: trace drift " << drift << " exceeds " << trace_tolerance
                << " at tau step " << j + 1 << "; refine the grid";
            throw integration_error(msg.str());
        }
    }
    if (max_drift) *max_drift = drift;
    return out;
}

PropagationResult propagate(const Scenario& sc) {
    const auto t_start = std::chrono::steady_clock::now();

    PropagationResult res;
    res.atoms = sc.atoms;
    res.lasers = sc.lasers;
    res.variant = sc.variant;
    res.momentum_mode = sc.momentum_mode;
    res.grid = resolve_grid(sc);
    res.grid.validate(sc.atoms, sc.lasers);

    const MediumConstants mc = medium_constants(sc.atoms, sc.lasers);
    res.kappa_c = mc.kappa_c;
    res.kappa_p = mc.kappa_p;
    res.zeta_p = mc.zeta_p;

    const Grid& g = res.grid;
    const double dt = g.dt();
    const double dz = g.dz();
    const int n = g.n_tau;

    res.tau.resize(n);
    for (int j = 0; j < n; ++j) res.tau[j] = g.tau_min + j * dt;

    // Input envelopes: constant coupling over the whole window (the
    // counterintuitive order), Gaussian probe centred at tau = 0.
    FieldEnvelope cur;
    cur.omega_c.assign(n, cplx(sc.lasers.omega_c_rabi, 0.0));
    cur.omega_p.resize(n);
    const double T = sc.lasers.pulse_width;
    for (int j = 0; j < n; ++j) {
        const double t = res.tau[j];
        cur.omega_p[j] = cplx(sc.lasers.omega_p_peak * std::exp(-t * t / (2.0 * T * T)), 0.0);
    }

    // Requested output stations, snapped to the z grid.
    std::set<int> stations;
    std::vector<ZLength> requests = sc.slices;
    if (requests.empty())
        requests = {ZLength{0.0, false}, ZLength{0.5 * g.z_max, false}, ZLength{g.z_max, false}};
    for (const ZLength& zl : requests) {
        const double zr = zl.beer_lengths && zl.value == 0.0 ? 0.0 : zl.resolve(mc.zeta_p);
        require(std::isfinite(zr) && zr >= 0.0 && zr <= g.z_max * (1.0 + 1e-9),
                "Scenario: output slice outside [0, z_max]");
        stations.insert(std::clamp(static_cast<int>(std::llround(zr / dz)), 0, g.n_z));
    }

    const double field_cap =
        blowup_factor * std::max({sc.lasers.omega_p_peak, sc.lasers.omega_c_rabi, 1.0});

    const cplx ikc(0.0, mc.kappa_c);
    const cplx ikp(0.0, mc.kappa_p);

    res.z_stations.resize(g.n_z + 1);
    res.probe_energy.resize(g.n_z + 1);
    res.probe_peak.resize(g.n_z + 1);

    FieldEnvelope pred;
    pred.omega_c.resize(n);
    pred.omega_p.resize(n);

    double drift = 0.0;
    for (int iz = 0;; ++iz) {
        const double z = iz * dz;
        double slice_drift = 0.0;
        std::vector<BlochState> traj =
            integrate_slice(BlochState::ground_p(), cur.omega_c, cur.omega_p, dt, sc.atoms,
                            sc.lasers, sc.variant, sc.momentum_mode, &slice_drift);
        drift = std::max(drift, slice_drift);
        res.stats.rhs_evals += 4 * (n - 1);

        res.z_stations[iz] = z;
        res.probe_energy[iz] = trapezoid_energy(cur.omega_p, dt);
        res.probe_peak[iz] = peak_abs(cur.omega_p);

        const bool store = stations.count(iz) > 0;
        if (store) res.slices.push_back({z, cur, std::move(traj)});
        if (iz == g.n_z) break;

        const std::vector<BlochState>& src = store ? res.slices.back().bloch : traj;

        // Euler predictor with the current sources.
        #pragma omp simd
        for (int j = 0; j < n; ++j) {
            pred.omega_c[j] = cur.omega_c[j] + dz * (ikc * src[j].rho_ec);
            pred.omega_p[j] = cur.omega_p[j] + dz * (ikp * src[j].rho_ep);
        }

        double pred_drift = 0.0;
        const std::vector<BlochState> traj2 =
            integrate_slice(BlochState::ground_p(), pred.omega_c, pred.omega_p, dt, sc.atoms,
                            sc.lasers, sc.variant, sc.momentum_mode, &pred_drift);
        drift = std::max(drift, pred_drift);
        res.stats.rhs_evals += 4 * (n - 1);

        // Trapezoidal correction with the averaged sources.
        double peak = 0.0;
        for (int j = 0; j < n; ++j) {
            cur.omega_c[j] += (0.5 * dz) * (ikc * (src[j].rho_ec + traj2[j].rho_ec));
            cur.omega_p[j] += (0.5 * dz) * (ikp * (src[j].rho_ep + traj2[j].rho_ep));
            peak = std::max({peak, std::abs(cur.omega_c[j]), std::abs(cur.omega_p[j])});
        }
        if (!(peak <= field_cap)) {
            std::ostringstream msg;
            msg << "propagate: field envelope grew past " << blowup_factor
                << "x the input at z = " << z + dz << " m (numerical instability)";
            throw integration_error(msg.str());
        }
    }

    res.stats.max_trace_drift = drift;
    res.stats.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return res;
}

}  // namespace slowlight
