#pragma once

// Declarative description of one numerical experiment: atoms, lasers, grid
// sizing, optional sweep axis and output requests. The scenarios module owns
// parsing and presets; maxwell_bloch consumes a single resolved point.

#include <optional>
#include <string>
#include <vector>

#include "slowlight/atomsys.hpp"
#include "slowlight/errors.hpp"

namespace slowlight {

// Lengths along z may be given in metres or in probe Beer lengths; the Beer
// length depends on the density, so resolution happens per sweep point.
struct ZLength {
    double value = 0.0;
    bool beer_lengths = false;

    double resolve(double zeta_p) const {
        return beer_lengths ? value * zeta_p : value;
    }
    bool operator==(const ZLength&) const = default;
};

enum class SweepAxis { none, density, omega_c, pulse_width, gamma_cp, delta };

struct Scenario {
    AtomParams atoms;
    LaserParams lasers;
    SystemVariant variant = SystemVariant::open;
    bool momentum_mode = false;

    ZLength z_max{};
    std::optional<int> n_z;          // spatial steps; auto-sized when absent
    std::optional<int> n_tau;        // time samples; auto-sized when absent
    std::optional<double> tau_min;   // s; auto-sized when absent
    std::optional<double> tau_max;   // s

    SweepAxis sweep_axis = SweepAxis::none;
    std::vector<double> sweep_values;  // SI units of the axis

    std::vector<ZLength> slices;  // stored z stations; empty = {0, z_max/2, z_max}
    bool emit_metrics = true;
    bool emit_pulse = true;
    bool emit_forces = false;

    int workers = 0;  // sweep-point worker count; 0 = available parallelism
    std::string seed_label;

    void validate() const;  // throws validation_error

    bool operator==(const Scenario&) const = default;
};

/// Copy of the scenario with one sweep value applied to its axis and the
/// sweep cleared. Returns the scenario unchanged for SweepAxis::none.
Scenario apply_sweep_value(const Scenario& scenario, double value);

}  // namespace slowlight
