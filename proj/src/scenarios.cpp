#include "slowlight/scenarios.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <limits>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace slowlight {

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw validation_error(what);
}

std::string trim(std::string s) {
    const auto issp = [](unsigned char c) { return std::isspace(c) != 0; };
    while (!s.empty() && issp(s.front())) s.erase(s.begin());
    while (!s.empty() && issp(s.back())) s.pop_back();
    return s;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(s);
    while (std::getline(in, item, ',')) out.push_back(trim(item));
    while (!out.empty() && out.back().empty()) out.pop_back();
    return out;
}

double parse_number(const std::string& raw, const std::string& ctx) {
    const std::string s = trim(raw);
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
        throw validation_error(ctx + ": expected a number, got '" + raw + "'");
    return v;
}

// Rates: "<num>" rad/s, "<num>A", "A/<num>", or bare "A".
double parse_rate(const std::string& raw, double A, const std::string& ctx) {
    const std::string s = trim(raw);
    const bool relative = !s.empty() && (s == "A" || s.front() == 'A' || s.back() == 'A');
    if (relative && !(A > 0.0))
        throw validation_error(ctx + ": set A before A-relative values");
    if (s == "A") return A;
    if (s.rfind("A/", 0) == 0) return A / parse_number(s.substr(2), ctx);
    if (!s.empty() && s.back() == 'A') return parse_number(s.substr(0, s.size() - 1), ctx) * A;
    return parse_number(s, ctx);
}

// Times: "<num>" seconds or "<num>/A".
double parse_time(const std::string& raw, double A, const std::string& ctx) {
    const std::string s = trim(raw);
    if (s.size() > 2 && s.compare(s.size() - 2, 2, "/A") == 0) {
        if (!(A > 0.0)) throw validation_error(ctx + ": set A before A-relative values");
        return parse_number(s.substr(0, s.size() - 2), ctx) / A;
    }
    return parse_number(s, ctx);
}

// Lengths along z: "<num>" metres or "<num>zp" Beer lengths.
ZLength parse_zlen(const std::string& raw, const std::string& ctx) {
    const std::string s = trim(raw);
    if (s.size() > 2 && s.compare(s.size() - 2, 2, "zp") == 0)
        return {parse_number(s.substr(0, s.size() - 2), ctx), true};
    return {parse_number(s, ctx), false};
}

bool parse_bool(const std::string& raw, const std::string& ctx) {
    const std::string s = trim(raw);
    if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
    if (s == "false" || s == "0" || s == "no" || s == "off") return false;
    throw validation_error(ctx + ": expected a boolean, got '" + raw + "'");
}

int parse_int(const std::string& raw, const std::string& ctx) {
    const double v = parse_number(raw, ctx);
    if (v != std::floor(v)) throw validation_error(ctx + ": expected an integer");
    return static_cast<int>(v);
}

Geometry parse_geometry(const std::string& raw, const std::string& ctx) {
    const std::string s = trim(raw);
    if (s == "copropagating") return Geometry::copropagating;
    if (s == "counterpropagating") return Geometry::counterpropagating;
    if (s == "orthogonal") return Geometry::orthogonal;
    throw validation_error(ctx + ": unknown geometry '" + raw + "'");
}

SystemVariant parse_variant(const std::string& raw, const std::string& ctx) {
    const std::string s = trim(raw);
    if (s == "open") return SystemVariant::open;
    if (s == "closed" || s == "closed_repumped") return SystemVariant::closed_repumped;
    throw validation_error(ctx + ": unknown variant '" + raw + "'");
}

SweepAxis parse_axis(const std::string& raw, const std::string& ctx) {
    const std::string s = trim(raw);
    if (s == "none") return SweepAxis::none;
    if (s == "density") return SweepAxis::density;
    if (s == "omega_c") return SweepAxis::omega_c;
    if (s == "pulse_width") return SweepAxis::pulse_width;
    if (s == "gamma_cp") return SweepAxis::gamma_cp;
    if (s == "delta") return SweepAxis::delta;
    throw validation_error(ctx + ": unknown sweep axis '" + raw + "'");
}

const char* axis_name(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::none: return "none";
        case SweepAxis::density: return "density";
        case SweepAxis::omega_c: return "omega_c";
        case SweepAxis::pulse_width: return "pulse_width";
        case SweepAxis::gamma_cp: return "gamma_cp";
        case SweepAxis::delta: return "delta";
    }
    return "none";
}

const char* axis_header(SweepAxis axis) {
    switch (axis) {
        case SweepAxis::none: return "index (1)";
        case SweepAxis::density: return "density (m^-3)";
        case SweepAxis::omega_c: return "omega_c (rad/s)";
        case SweepAxis::pulse_width: return "pulse_width (s)";
        case SweepAxis::gamma_cp: return "gamma_cp (rad/s)";
        case SweepAxis::delta: return "delta (rad/s)";
    }
    return "index (1)";
}

const std::set<std::string>& known_keys() {
    static const std::set<std::string> keys = {
        "A",          "gamma_c",     "gamma_p",      "gamma_out",   "gamma_cp",
        "lambda_c",   "lambda_p",    "mass",         "geometry",    "density",
        "omega_c",    "omega_p_peak", "pulse_width", "delta_c",     "delta_p",
        "z_max",      "n_z",         "n_tau",        "tau_min",     "tau_max",
        "variant",    "momentum_mode", "sweep_axis", "sweep_values", "slices",
        "outputs",    "workers",     "seed_label"};
    return keys;
}

struct KeyValues {
    std::map<std::string, std::string> values;
    std::map<std::string, int> lines;

    bool has(const std::string& k) const { return values.count(k) > 0; }
    std::string ctx(const std::string& k) const {
        return "line " + std::to_string(lines.at(k)) + ", key '" + k + "'";
    }
};

KeyValues parse_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw validation_error("cannot open scenario file " + path.string());
    KeyValues kv;
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        const std::string stripped = trim(line);
        if (stripped.empty()) continue;
        const auto eq = stripped.find('=');
        if (eq == std::string::npos)
            throw validation_error("line " + std::to_string(lineno) +
                                   ": expected 'key = value'");
        const std::string key = trim(stripped.substr(0, eq));
        const std::string value = trim(stripped.substr(eq + 1));
        if (!known_keys().count(key))
            throw validation_error("line " + std::to_string(lineno) + ": unknown key '" + key +
                                   "'");
        if (kv.has(key))
            throw validation_error("line " + std::to_string(lineno) + ": duplicate key '" + key +
                                   "'");
        kv.values[key] = value;
        kv.lines[key] = lineno;
    }
    return kv;
}

void apply_keys(const KeyValues& kv, Scenario& sc) {
    auto& a = sc.atoms;
    auto& l = sc.lasers;

    if (kv.has("A")) a.A = parse_number(kv.values.at("A"), kv.ctx("A"));
    const double A = a.A;

    const auto rate = [&](const char* k, double& field) {
        if (kv.has(k)) field = parse_rate(kv.values.at(k), A, kv.ctx(k));
    };
    rate("gamma_c", a.gamma_c);
    rate("gamma_p", a.gamma_p);
    rate("gamma_out", a.gamma_out);
    rate("gamma_cp", a.gamma_cp);
    rate("omega_c", l.omega_c_rabi);
    rate("omega_p_peak", l.omega_p_peak);
    rate("delta_c", l.delta_c);
    rate("delta_p", l.delta_p);

    if (kv.has("lambda_c")) a.lambda_c = parse_number(kv.values.at("lambda_c"), kv.ctx("lambda_c"));
    if (kv.has("lambda_p")) a.lambda_p = parse_number(kv.values.at("lambda_p"), kv.ctx("lambda_p"));
    if (kv.has("mass")) a.mass = parse_number(kv.values.at("mass"), kv.ctx("mass"));
    if (kv.has("geometry")) a.geometry = parse_geometry(kv.values.at("geometry"), kv.ctx("geometry"));
    if (kv.has("density")) l.density = parse_number(kv.values.at("density"), kv.ctx("density"));
    if (kv.has("pulse_width"))
        l.pulse_width = parse_time(kv.values.at("pulse_width"), A, kv.ctx("pulse_width"));

    if (kv.has("z_max")) sc.z_max = parse_zlen(kv.values.at("z_max"), kv.ctx("z_max"));
    if (kv.has("n_z")) sc.n_z = parse_int(kv.values.at("n_z"), kv.ctx("n_z"));
    if (kv.has("n_tau")) sc.n_tau = parse_int(kv.values.at("n_tau"), kv.ctx("n_tau"));
    if (kv.has("tau_min")) sc.tau_min = parse_time(kv.values.at("tau_min"), A, kv.ctx("tau_min"));
    if (kv.has("tau_max")) sc.tau_max = parse_time(kv.values.at("tau_max"), A, kv.ctx("tau_max"));

    if (kv.has("variant")) sc.variant = parse_variant(kv.values.at("variant"), kv.ctx("variant"));
    if (kv.has("momentum_mode"))
        sc.momentum_mode = parse_bool(kv.values.at("momentum_mode"), kv.ctx("momentum_mode"));

    if (kv.has("sweep_axis"))
        sc.sweep_axis = parse_axis(kv.values.at("sweep_axis"), kv.ctx("sweep_axis"));
    if (kv.has("sweep_values")) {
        const std::string ctx = kv.ctx("sweep_values");
        sc.sweep_values.clear();
        for (const std::string& item : split_list(kv.values.at("sweep_values"))) {
            switch (sc.sweep_axis) {
                case SweepAxis::pulse_width:
                    sc.sweep_values.push_back(parse_time(item, A, ctx));
                    break;
                case SweepAxis::omega_c:
                case SweepAxis::gamma_cp:
                case SweepAxis::delta:
                    sc.sweep_values.push_back(parse_rate(item, A, ctx));
                    break;
                default:
                    sc.sweep_values.push_back(parse_number(item, ctx));
            }
        }
    }
    if (kv.has("slices")) {
        const std::string ctx = kv.ctx("slices");
        sc.slices.clear();
        for (const std::string& item : split_list(kv.values.at("slices")))
            sc.slices.push_back(parse_zlen(item, ctx));
    }
    if (kv.has("outputs")) {
        sc.emit_metrics = sc.emit_pulse = sc.emit_forces = false;
        for (const std::string& item : split_list(kv.values.at("outputs"))) {
            if (item == "metrics") sc.emit_metrics = true;
            else if (item == "pulse") sc.emit_pulse = true;
            else if (item == "forces") sc.emit_forces = true;
            else
                throw validation_error(kv.ctx("outputs") + ": unknown output '" + item + "'");
        }
    }
    if (kv.has("workers")) sc.workers = parse_int(kv.values.at("workers"), kv.ctx("workers"));
    if (kv.has("seed_label")) sc.seed_label = kv.values.at("seed_label");

    // Dipole moments follow from the branch decay rates and wavelengths.
    if (a.A > 0.0 && a.lambda_c > 0.0 && a.lambda_p > 0.0) {
        a.dipole_c = dipole_from_decay(a.gamma_c, a.omega_c());
        a.dipole_p = dipole_from_decay(a.gamma_p, a.omega_p());
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fmt_zlen(const ZLength& z) {
    return z.beer_lengths ? fmt(z.value) + "zp" : fmt(z.value);
}

}  // namespace

void Scenario::validate() const {
    atoms.validate();
    lasers.validate();
    require(std::isfinite(z_max.value) && z_max.value > 0.0, "Scenario: z_max must be > 0");
    if (n_z) require(*n_z >= 1, "Scenario: n_z must be >= 1");
    if (n_tau) require(*n_tau >= 2, "Scenario: n_tau must be >= 2");
    require(workers >= 0, "Scenario: workers must be >= 0");

    if (sweep_axis == SweepAxis::none) {
        require(sweep_values.empty(), "Scenario: sweep_values given without sweep_axis");
    } else {
        require(!sweep_values.empty(), "Scenario: sweep_axis given without sweep_values");
        for (const double v : sweep_values) {
            require(std::isfinite(v), "Scenario: sweep value must be finite");
            switch (sweep_axis) {
                case SweepAxis::density:
                    require(v >= 0.0, "Scenario: density sweep values must be >= 0");
                    break;
                case SweepAxis::omega_c:
                    require(v >= 0.0, "Scenario: omega_c sweep values must be >= 0");
                    break;
                case SweepAxis::pulse_width:
                    require(v > 0.0, "Scenario: pulse_width sweep values must be > 0");
                    break;
                case SweepAxis::gamma_cp:
                    require(v >= 0.0, "Scenario: gamma_cp sweep values must be >= 0");
                    break;
                default:
                    break;
            }
        }
    }
    for (const ZLength& s : slices) {
        require(std::isfinite(s.value) && s.value >= 0.0,
                "Scenario: slices must be finite and >= 0");
        if (s.beer_lengths == z_max.beer_lengths)
            require(s.value <= z_max.value * (1.0 + 1e-9),
                    "Scenario: output slice beyond z_max");
    }
}

Scenario apply_sweep_value(const Scenario& scenario, double value) {
    Scenario sc = scenario;
    sc.sweep_axis = SweepAxis::none;
    sc.sweep_values.clear();
    switch (scenario.sweep_axis) {
        case SweepAxis::none:
            break;
        case SweepAxis::density:
            sc.lasers.density = value;
            break;
        case SweepAxis::omega_c:
            sc.lasers.omega_c_rabi = value;
            break;
        case SweepAxis::pulse_width:
            sc.lasers.pulse_width = value;
            break;
        case SweepAxis::gamma_cp:
            sc.atoms.gamma_cp = value;
            break;
        case SweepAxis::delta:
            sc.lasers.delta_c = value;
            sc.lasers.delta_p = value;
            break;
    }
    return sc;
}

Scenario load_scenario(const std::filesystem::path& path) {
    const KeyValues kv = parse_file(path);
    for (const char* k :
         {"A", "gamma_c", "gamma_p", "gamma_out", "lambda_c", "lambda_p", "mass", "geometry",
          "density", "omega_c", "omega_p_peak", "pulse_width", "z_max"})
        if (!kv.has(k))
            throw validation_error(std::string("missing mandatory key '") + k + "'");
    Scenario sc;
    apply_keys(kv, sc);
    sc.validate();
    return sc;
}

Scenario load_scenario_overlay(const std::filesystem::path& path, Scenario base) {
    const KeyValues kv = parse_file(path);
    apply_keys(kv, base);
    base.validate();
    return base;
}

void save_scenario(const Scenario& sc, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write scenario file " + path.string());
    out << "A = " << fmt(sc.atoms.A) << "\n";
    out << "gamma_c = " << fmt(sc.atoms.gamma_c) << "\n";
    out << "gamma_p = " << fmt(sc.atoms.gamma_p) << "\n";
    out << "gamma_out = " << fmt(sc.atoms.gamma_out) << "\n";
    out << "gamma_cp = " << fmt(sc.atoms.gamma_cp) << "\n";
    out << "mass = " << fmt(sc.atoms.mass) << "\n";
    out << "lambda_c = " << fmt(sc.atoms.lambda_c) << "\n";
    out << "lambda_p = " << fmt(sc.atoms.lambda_p) << "\n";
    switch (sc.atoms.geometry) {
        case Geometry::copropagating: out << "geometry = copropagating\n"; break;
        case Geometry::counterpropagating: out << "geometry = counterpropagating\n"; break;
        case Geometry::orthogonal: out << "geometry = orthogonal\n"; break;
    }
    out << "density = " << fmt(sc.lasers.density) << "\n";
    out << "omega_c = " << fmt(sc.lasers.omega_c_rabi) << "\n";
    out << "omega_p_peak = " << fmt(sc.lasers.omega_p_peak) << "\n";
    out << "pulse_width = " << fmt(sc.lasers.pulse_width) << "\n";
    out << "delta_c = " << fmt(sc.lasers.delta_c) << "\n";
    out << "delta_p = " << fmt(sc.lasers.delta_p) << "\n";
    out << "z_max = " << fmt_zlen(sc.z_max) << "\n";
    if (sc.n_z) out << "n_z = " << *sc.n_z << "\n";
    if (sc.n_tau) out << "n_tau = " << *sc.n_tau << "\n";
    if (sc.tau_min) out << "tau_min = " << fmt(*sc.tau_min) << "\n";
    if (sc.tau_max) out << "tau_max = " << fmt(*sc.tau_max) << "\n";
    out << "variant = "
        << (sc.variant == SystemVariant::open ? "open" : "closed_repumped") << "\n";
    out << "momentum_mode = " << (sc.momentum_mode ? "true" : "false") << "\n";
    if (sc.sweep_axis != SweepAxis::none) {
        out << "sweep_axis = " << axis_name(sc.sweep_axis) << "\n";
        out << "sweep_values = ";
        for (std::size_t i = 0; i < sc.sweep_values.size(); ++i)
            out << (i ? ", " : "") << fmt(sc.sweep_values[i]);
        out << "\n";
    }
    if (!sc.slices.empty()) {
        out << "slices = ";
        for (std::size_t i = 0; i < sc.slices.size(); ++i)
            out << (i ? ", " : "") << fmt_zlen(sc.slices[i]);
        out << "\n";
    }
    out << "outputs = ";
    {
        bool first = true;
        const auto item = [&](bool on, const char* name) {
            if (!on) return;
            out << (first ? "" : ", ") << name;
            first = false;
        };
        item(sc.emit_metrics, "metrics");
        item(sc.emit_pulse, "pulse");
        item(sc.emit_forces, "forces");
    }
    out << "\n";
    out << "workers = " << sc.workers << "\n";
    if (!sc.seed_label.empty()) out << "seed_label = " << sc.seed_label << "\n";
}

namespace {

Scenario preset_fig2() {
    Scenario sc;
    sc.seed_label = "fig2";
    AtomParams& a = sc.atoms;
    a.A = 2.0 * std::numbers::pi * 5.9e6;
    a.gamma_c = a.A / 3.0;
    a.gamma_p = a.A / 2.0;
    a.gamma_out = a.A - a.gamma_c - a.gamma_p;
    a.gamma_cp = 0.0;
    a.mass = 22.98976928 * constants::amu;
    a.lambda_c = 589.0e-9;
    a.lambda_p = 589.0e-9;
    a.geometry = Geometry::orthogonal;
    a.dipole_c = dipole_from_decay(a.gamma_c, a.omega_c());
    a.dipole_p = dipole_from_decay(a.gamma_p, a.omega_p());

    LaserParams& l = sc.lasers;
    l.omega_c_rabi = 0.18 * a.A;
    l.omega_p_peak = 0.1 * a.A;
    l.pulse_width = 80.0 / a.A;
    l.delta_c = 0.0;
    l.delta_p = 0.0;
    l.density = 3.3e18;

    sc.z_max = {63.0, true};
    sc.slices = {{0.0, true}, {30.0, true}, {63.0, true}};
    sc.variant = SystemVariant::open;
    return sc;
}

Scenario preset_fig3(double omega_c_in_A, const std::string& label) {
    Scenario sc = preset_fig2();
    sc.seed_label = label;
    sc.lasers.omega_c_rabi = omega_c_in_A * sc.atoms.A;
    sc.sweep_axis = SweepAxis::density;
    sc.sweep_values = {0.5e18, 1.0e18, 2.0e18, 3.3e18, 5.0e18};
    sc.slices = {{0.0, true}, {63.0, true}};
    return sc;
}

Scenario preset_fig4() {
    Scenario sc = preset_fig2();
    sc.seed_label = "fig4";
    sc.sweep_axis = SweepAxis::pulse_width;
    sc.sweep_values = {40.0 / sc.atoms.A, 80.0 / sc.atoms.A, 160.0 / sc.atoms.A};
    sc.slices = {{0.0, true}, {63.0, true}};
    return sc;
}

Scenario preset_fig5() {
    Scenario sc = preset_fig2();
    sc.seed_label = "fig5";
    sc.lasers.delta_c = -sc.atoms.A;
    sc.lasers.delta_p = -sc.atoms.A;
    return sc;
}

Scenario preset_fig6() {
    Scenario sc = preset_fig5();
    sc.seed_label = "fig6";
    sc.emit_forces = true;
    return sc;
}

}  // namespace

std::vector<std::string> preset_names() {
    return {"fig2", "fig3a", "fig3b", "fig4", "fig5", "fig6"};
}

Scenario preset(const std::string& name) {
    if (name == "fig2") return preset_fig2();
    if (name == "fig3a") return preset_fig3(0.56, "fig3a");
    if (name == "fig3b") return preset_fig3(0.18, "fig3b");
    if (name == "fig4") return preset_fig4();
    if (name == "fig5") return preset_fig5();
    if (name == "fig6") return preset_fig6();
    throw validation_error("unknown preset '" + name + "'");
}

namespace {

SweepPoint run_point(const Scenario& base, double sweep_value, bool swept) {
    const auto t0 = std::chrono::steady_clock::now();
    SweepPoint pt;
    pt.sweep_value = sweep_value;
    pt.scenario = swept ? apply_sweep_value(base, sweep_value) : base;
    Scenario& sc = pt.scenario;
    sc.validate();

    // Stored slices always include input and exit stations.
    Scenario work = sc;
    work.slices.push_back({0.0, false});
    work.slices.push_back(work.z_max);

    pt.prop = propagate(work);
    pt.metrics = pulse_metrics(pt.prop, pt.prop.grid.z_max);
    pt.trace_drift = pt.prop.stats.max_trace_drift;

    pt.window_closed = transparency_window(sc.atoms, sc.lasers, sc.lasers.pulse_width,
                                           SystemVariant::closed_repumped);
    if (sc.atoms.gamma_out > 0.0 && sc.lasers.omega_c_rabi > 0.0 && sc.lasers.omega_p_peak > 0.0)
        pt.window_open = transparency_window(sc.atoms, sc.lasers, sc.lasers.pulse_width,
                                             SystemVariant::open);
    else
        pt.window_open = std::numeric_limits<double>::quiet_NaN();

    for (const auto& slice : pt.prop.slices) {
        if (slice.z > 0.0)
            pt.adiabaton_depth_max =
                std::max(pt.adiabaton_depth_max, adiabaton_depth(pt.prop, slice.z));
        if (sc.emit_forces) {
            const ForceTrace tr = forces(pt.prop, slice.z, sc.atoms);
            ForceSummary fs;
            fs.z = slice.z;
            for (double f : tr.f_rp) fs.max_rp = std::max(fs.max_rp, std::abs(f));
            for (double f : tr.f_dip) fs.max_dip = std::max(fs.max_dip, std::abs(f));
            fs.impulse_rp = tr.impulse_rp;
            fs.impulse_dip = tr.impulse_dip;
            pt.forces.push_back(fs);
        }
    }
    pt.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return pt;
}

}  // namespace

RunRecord run(const Scenario& scenario) {
    scenario.validate();
    RunRecord rec;
    rec.scenario = scenario;

    const bool swept = scenario.sweep_axis != SweepAxis::none;
    std::vector<double> values = swept ? scenario.sweep_values : std::vector<double>{0.0};
    const int n = static_cast<int>(values.size());
    rec.points.resize(n);

    int workers = scenario.workers;
    if (workers <= 0) {
#ifdef _OPENMP
        workers = omp_get_max_threads();
#else
        workers = 1;
#endif
    }

    std::vector<std::exception_ptr> errors(n);
    const auto worker = [&](int i) {
        try {
            rec.points[i] = run_point(scenario, values[i], swept);
        } catch (const std::exception& e) {
            std::ostringstream msg;
            msg << "sweep point " << i;
            if (swept) msg << " (" << axis_name(scenario.sweep_axis) << " = " << values[i] << ")";
            msg << ": " << e.what();
            try {
                throw;
            } catch (const validation_error&) {
                errors[i] = std::make_exception_ptr(validation_error(msg.str()));
            } catch (const numerical_error&) {
                errors[i] = std::make_exception_ptr(numerical_error(msg.str()));
            } catch (const std::exception&) {
                errors[i] = std::make_exception_ptr(integration_error(msg.str()));
            }
        }
    };

    if (workers <= 1 || n == 1) {
        for (int i = 0; i < n; ++i) worker(i);  // serial reference path
    } else {
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(workers)
        for (int i = 0; i < n; ++i) worker(i);
#else
        for (int i = 0; i < n; ++i) worker(i);
#endif
    }
    for (const std::exception_ptr& e : errors)
        if (e) std::rethrow_exception(e);
    return rec;
}

namespace {

// Slice tag for file names: the Beer-length multiple when that is well
// defined, otherwise the slice ordinal.
std::vector<std::string> slice_labels(const PropagationResult& prop) {
    std::vector<std::string> labels;
    std::set<std::string> seen;
    bool collide = false;
    for (const auto& s : prop.slices) {
        std::string lab;
        if (std::isfinite(prop.zeta_p))
            lab = "z" + std::to_string(static_cast<long long>(std::llround(s.z / prop.zeta_p)));
        if (lab.empty() || !seen.insert(lab).second) collide = true;
        labels.push_back(lab);
    }
    if (collide) {
        labels.clear();
        for (std::size_t i = 0; i < prop.slices.size(); ++i)
            labels.push_back("i" + std::to_string(i));
    }
    return labels;
}

void write_pulse_csv(const PropagationResult& prop, const PropagationResult::Slice& slice,
                     const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write " + path.string());
    out << "tau (s),re_omega_p (rad/s),im_omega_p (rad/s),abs_omega_p (rad/s),abs_omega_c "
           "(rad/s)\n";
    for (std::size_t j = 0; j < prop.tau.size(); ++j) {
        out << fmt(prop.tau[j]) << ',' << fmt(slice.fields.omega_p[j].real()) << ','
            << fmt(slice.fields.omega_p[j].imag()) << ',' << fmt(std::abs(slice.fields.omega_p[j]))
            << ',' << fmt(std::abs(slice.fields.omega_c[j])) << '\n';
    }
}

void write_forces_csv(const PropagationResult& prop, double z, const AtomParams& atoms,
                      const std::filesystem::path& path) {
    const ForceTrace tr = forces(prop, z, atoms);
    std::ofstream out(path);
    if (!out) throw validation_error("cannot write " + path.string());
    out << "tau (s),f_rp (N),f_dip (N)\n";
    for (std::size_t j = 0; j < prop.tau.size(); ++j)
        out << fmt(prop.tau[j]) << ',' << fmt(tr.f_rp[j]) << ',' << fmt(tr.f_dip[j]) << '\n';
}

}  // namespace

std::vector<std::filesystem::path> emit_csv(const RunRecord& record,
                                            const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    std::vector<std::filesystem::path> written;
    const Scenario& sc = record.scenario;

    if (sc.emit_metrics) {
        const std::filesystem::path path = dir / "metrics.csv";
        std::ofstream out(path);
        if (!out) throw validation_error("cannot write " + path.string());
        out << axis_header(sc.sweep_axis)
            << ",v_g (m/s),delay (s),transmission_energy (1),transmission_peak (1),"
               "fitted_width (s),adiabaton_depth (1),trace_drift (1)\n";
        for (std::size_t i = 0; i < record.points.size(); ++i) {
            const SweepPoint& pt = record.points[i];
            const double axis =
                sc.sweep_axis == SweepAxis::none ? static_cast<double>(i) : pt.sweep_value;
            out << fmt(axis) << ',' << fmt(pt.metrics.group_velocity) << ','
                << fmt(pt.metrics.delay) << ',' << fmt(pt.metrics.transmission_energy) << ','
                << fmt(pt.metrics.transmission_peak) << ',' << fmt(pt.metrics.fitted_width)
                << ',' << fmt(pt.adiabaton_depth_max) << ',' << fmt(pt.trace_drift) << '\n';
        }
        written.push_back(path);
    }

    const bool swept = sc.sweep_axis != SweepAxis::none;
    for (std::size_t i = 0; i < record.points.size(); ++i) {
        const SweepPoint& pt = record.points[i];
        const std::vector<std::string> labels = slice_labels(pt.prop);
        char prefix[24] = "";
        if (swept) std::snprintf(prefix, sizeof prefix, "p%02zu_", i);
        for (std::size_t k = 0; k < pt.prop.slices.size(); ++k) {
            if (sc.emit_pulse) {
                const auto path = dir / ("pulse_" + std::string(prefix) + labels[k] + ".csv");
                write_pulse_csv(pt.prop, pt.prop.slices[k], path);
                written.push_back(path);
            }
            if (sc.emit_forces) {
                const auto path = dir / ("forces_" + std::string(prefix) + labels[k] + ".csv");
                write_forces_csv(pt.prop, pt.prop.slices[k].z, pt.scenario.atoms, path);
                written.push_back(path);
            }
        }
    }
    return written;
}

}  // namespace slowlight
