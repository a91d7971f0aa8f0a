#pragma once

// Scenario files, presets, sweep execution and CSV output.
//
// Scenario files are flat `key = value` text with `#` comments. Rates accept
// absolute rad/s or multiples of A ("0.18A", "A/3"); times accept seconds or
// "80/A"; z lengths accept metres or Beer lengths ("63zp"). Keys are
// documented in the README; unknown keys are rejected with a line number.

#include <filesystem>
#include <string>
#include <vector>

#include "slowlight/diagnostics.hpp"
#include "slowlight/scenario.hpp"

namespace slowlight {

struct ForceSummary {
    double z = 0.0;
    double max_rp = 0.0;
    double max_dip = 0.0;
    double impulse_rp = 0.0;
    double impulse_dip = 0.0;
};

struct SweepPoint {
    double sweep_value = 0.0;  // SI value of the axis; point index when no sweep
    Scenario scenario;         // resolved single-point scenario
    PropagationResult prop;
    PulseMetrics metrics;      // at z = z_max
    double adiabaton_depth_max = 0.0;  // over stored slices with z > 0
    double window_closed = 0.0;        // transparency windows at Theta = T
    double window_open = 0.0;          // NaN where the formula is undefined
    std::vector<ForceSummary> forces;  // one per stored slice when requested
    double trace_drift = 0.0;
    double wall_seconds = 0.0;
};

struct RunRecord {
    Scenario scenario;
    std::vector<SweepPoint> points;  // one per sweep point, in sweep order
};

/// Parses and fully validates a scenario file.
Scenario load_scenario(const std::filesystem::path& path);

/// Applies the keys present in `path` on top of `base` (presets + overrides).
Scenario load_scenario_overlay(const std::filesystem::path& path, Scenario base);

/// Writes a scenario as a loadable key = value file.
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

std::vector<std::string> preset_names();

/// Built-in scenario by name; throws validation_error for unknown names.
Scenario preset(const std::string& name);

/// Runs every sweep point (work distributed over the configured workers)
/// and collects metrics. Identical scenarios give bit-identical records.
RunRecord run(const Scenario& scenario);

/// Writes metrics.csv plus per-slice pulse_z*.csv / forces_z*.csv tables
/// into `dir`; returns the written paths in a fixed order.
std::vector<std::filesystem::path> emit_csv(const RunRecord& record,
                                            const std::filesystem::path& dir);

}  // namespace slowlight
