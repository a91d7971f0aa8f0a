#pragma once

// Coupled field-matter marching: the OBE is integrated over the co-moving
// time grid at each spatial station, then both Rabi envelopes advance in z
// through the reduced wave equation d/dz Omega_a = i kappa_a rho_ea.

#include <cstdint>
#include <span>
#include <vector>

#include "slowlight/atomsys.hpp"
#include "slowlight/scenario.hpp"

namespace slowlight {

// Trace drift beyond this aborts a slice integration.
inline constexpr double trace_tolerance = 1e-6;

// Any envelope growing past this multiple of the input fields is treated as
// a numerical instability.
inline constexpr double blowup_factor = 1e3;

struct Grid {
    double tau_min = 0.0;  // co-moving time window, s
    double tau_max = 0.0;
    int n_tau = 0;         // time samples (stations)
    double z_max = 0.0;    // propagation depth, m
    int n_z = 0;           // spatial steps; stations are n_z + 1

    double dt() const { return (tau_max - tau_min) / (n_tau - 1); }
    double dz() const { return z_max / n_z; }

    /// Enforces the window and sampling rules; throws validation_error.
    void validate(const AtomParams& atoms, const LaserParams& lasers) const;

    bool operator==(const Grid&) const = default;
};

struct MediumConstants {
    double kappa_c = 0.0;  // 1/(m s)
    double kappa_p = 0.0;
    double zeta_p = 0.0;   // probe Beer length A / kappa_p, m (inf in vacuum)
};

/// kappa_a = omega_a N D_a^2 / (c eps0 hbar) and the probe Beer length.
MediumConstants medium_constants(const AtomParams& atoms, const LaserParams& lasers);

/// Weak-probe analytic delay estimate at depth z (no safety factor).
double estimate_delay(const AtomParams& atoms, const LaserParams& lasers, double z);

/// Grid with the default sizing rules applied: window [-4T, 3T + 1.5 delay
/// + margin], time step min(0.5/A, T/32), 8 z-steps per Beer length.
/// Explicit scenario overrides (n_z, n_tau, tau bounds) win over defaults.
Grid resolve_grid(const Scenario& scenario);

struct FieldEnvelope {
    std::vector<cplx> omega_c;  // over tau at one z station
    std::vector<cplx> omega_p;
};

struct PropagationResult {
    std::vector<double> tau;  // shared time grid

    struct Slice {
        double z = 0.0;
        FieldEnvelope fields;
        std::vector<BlochState> bloch;
    };
    std::vector<Slice> slices;  // strictly increasing z

    // Per-station probe records, kept at every z step for attenuation fits.
    std::vector<double> z_stations;
    std::vector<double> probe_energy;  // int |Omega_p|^2 dtau, rad^2/s
    std::vector<double> probe_peak;    // max |Omega_p|, rad/s

    double kappa_c = 0.0;
    double kappa_p = 0.0;
    double zeta_p = 0.0;

    AtomParams atoms;
    LaserParams lasers;
    SystemVariant variant = SystemVariant::open;
    bool momentum_mode = false;
    Grid grid;

    struct Stats {
        std::int64_t rhs_evals = 0;
        double max_trace_drift = 0.0;
        double wall_seconds = 0.0;
    } stats;

    /// Stored slice nearest z; throws validation_error when none is within
    /// half a step.
    const Slice& slice_at(double z) const;
    const Slice& final_slice() const;
};

/// Integrates the OBE over the tau grid at one z station with fixed-step
/// RK4, starting from `initial` (atoms are prepared in |p> at tau_min).
/// Fields are sampled on the grid; stage midpoints use the interval mean.
/// With momentum_mode the ground-coherence decay is augmented by gamma_k of
/// the local instantaneous fields (zero where both fields vanish).
/// Throws integration_error when the extended trace drifts beyond
/// trace_tolerance; `max_drift` (optional) receives the observed maximum.
std::vector<BlochState> integrate_slice(const BlochState& initial, std::span<const cplx> omega_c,
                                        std::span<const cplx> omega_p, double dt,
                                        const AtomParams& atoms, const LaserParams& lasers,
                                        SystemVariant variant, bool momentum_mode,
                                        double* max_drift = nullptr);

/// Marches the coupled system from z = 0 to z_max. The z-advance is a
/// second-order predictor-corrector: an Euler predictor with the current
/// slice sources, a re-integration at the predicted fields, then the
/// trapezoidal correction. Both envelopes evolve. The sweep axis of the
/// scenario is ignored here; run() expands sweeps.
PropagationResult propagate(const Scenario& scenario);

}  // namespace slowlight
