#pragma once

#include <fstream>
#include <json.hpp>
#include <optional>
#include <set>
#include <string>

#include "qring/errors.hpp"
#include "qring/model.hpp"
#include "qring/observables.hpp"
#include "qring/sweep.hpp"

namespace qring {

struct OutputConfig {
    std::string path = "sweep.csv";
    std::string format = "csv";  // csv | json
    int precision = 17;          // significant digits in CSV payloads
};

// Mirrors the config file schema. Optional drive/sweep frequencies default to
// values derived from the device (omega_bar_d and omega_bar_d +/- 4 J0).
struct RunConfig {
    DeviceParams device;
    double eps_d = 0.05;
    std::optional<double> omega_d;
    double phi = M_PI / 2.0;
    std::optional<double> omega_d_lo, omega_d_hi;
    int omega_d_points = 101;
    double phi_lo = 0.0;
    double phi_hi = kTwoPi;
    int phi_points = 121;
    Solver solver = Solver::Rates;
    int threads = 0;
    OutputConfig output;
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown_keys(const json& obj, const std::set<std::string>& allowed,
                                const std::string& section) {
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError("unknown config key '" + (section.empty() ? it.key() : section + "." + it.key()) + "'");
}

inline double get_number(const json& obj, const char* key, double fallback,
                         const std::string& section) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number())
        throw ConfigError("config key '" + section + "." + key + "' must be a number");
    return obj[key].get<double>();
}

inline int get_int(const json& obj, const char* key, int fallback, const std::string& section) {
    if (!obj.contains(key)) return fallback;
    if (!obj[key].is_number_integer())
        throw ConfigError("config key '" + section + "." + key + "' must be an integer");
    return obj[key].get<int>();
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& j) {
    using detail::get_int;
    using detail::get_number;
    RunConfig cfg;
    if (!j.is_object()) throw ConfigError("config root must be a JSON object");
    detail::reject_unknown_keys(j, {"device", "drive", "sweep", "output"}, "");

    if (j.contains("device")) {
        const auto& d = j["device"];
        if (!d.is_object()) throw ConfigError("config key 'device' must be an object");
        detail::reject_unknown_keys(d,
                                    {"n_sites", "omega_q", "omega_c", "g", "j0", "kappa", "gamma",
                                     "gamma_phi", "deltas", "hierarchy_factor"},
                                    "device");
        cfg.device.n_sites = get_int(d, "n_sites", cfg.device.n_sites, "device");
        cfg.device.omega_q = get_number(d, "omega_q", cfg.device.omega_q, "device");
        cfg.device.omega_c = get_number(d, "omega_c", cfg.device.omega_c, "device");
        cfg.device.g = get_number(d, "g", cfg.device.g, "device");
        cfg.device.j0 = get_number(d, "j0", cfg.device.j0, "device");
        cfg.device.kappa = get_number(d, "kappa", cfg.device.kappa, "device");
        cfg.device.gamma = get_number(d, "gamma", cfg.device.gamma, "device");
        cfg.device.gamma_phi = get_number(d, "gamma_phi", cfg.device.gamma_phi, "device");
        cfg.device.hierarchy_factor =
            get_number(d, "hierarchy_factor", cfg.device.hierarchy_factor, "device");
        if (d.contains("deltas")) {
            if (!d["deltas"].is_array()) throw ConfigError("config key 'device.deltas' must be an array");
            for (const auto& v : d["deltas"]) {
                if (!v.is_number()) throw ConfigError("config key 'device.deltas' must hold numbers");
                cfg.device.deltas.push_back(v.get<double>());
            }
        }
    }
    if (j.contains("drive")) {
        const auto& d = j["drive"];
        if (!d.is_object()) throw ConfigError("config key 'drive' must be an object");
        detail::reject_unknown_keys(d, {"omega_d", "phi", "eps_d"}, "drive");
        if (d.contains("omega_d")) cfg.omega_d = get_number(d, "omega_d", 0.0, "drive");
        cfg.phi = normalize_phase(get_number(d, "phi", cfg.phi, "drive"));
        cfg.eps_d = get_number(d, "eps_d", cfg.eps_d, "drive");
        if (cfg.eps_d < 0.0) throw ConfigError("config key 'drive.eps_d' must be >= 0");
    }
    if (j.contains("sweep")) {
        const auto& s = j["sweep"];
        if (!s.is_object()) throw ConfigError("config key 'sweep' must be an object");
        detail::reject_unknown_keys(s,
                                    {"omega_d_lo", "omega_d_hi", "omega_d_points", "phi_lo",
                                     "phi_hi", "phi_points", "solver", "threads"},
                                    "sweep");
        if (s.contains("omega_d_lo")) cfg.omega_d_lo = get_number(s, "omega_d_lo", 0.0, "sweep");
        if (s.contains("omega_d_hi")) cfg.omega_d_hi = get_number(s, "omega_d_hi", 0.0, "sweep");
        cfg.omega_d_points = get_int(s, "omega_d_points", cfg.omega_d_points, "sweep");
        cfg.phi_lo = get_number(s, "phi_lo", cfg.phi_lo, "sweep");
        cfg.phi_hi = get_number(s, "phi_hi", cfg.phi_hi, "sweep");
        cfg.phi_points = get_int(s, "phi_points", cfg.phi_points, "sweep");
        if (s.contains("solver")) {
            if (!s["solver"].is_string()) throw ConfigError("config key 'sweep.solver' must be a string");
            cfg.solver = solver_from_name(s["solver"].get<std::string>());
        }
        cfg.threads = get_int(s, "threads", cfg.threads, "sweep");
    }
    if (j.contains("output")) {
        const auto& o = j["output"];
        if (!o.is_object()) throw ConfigError("config key 'output' must be an object");
        detail::reject_unknown_keys(o, {"path", "format", "precision"}, "output");
        if (o.contains("path")) {
            if (!o["path"].is_string()) throw ConfigError("config key 'output.path' must be a string");
            cfg.output.path = o["path"].get<std::string>();
        }
        if (o.contains("format")) {
            if (!o["format"].is_string()) throw ConfigError("config key 'output.format' must be a string");
            cfg.output.format = o["format"].get<std::string>();
            if (cfg.output.format != "csv" && cfg.output.format != "json")
                throw ConfigError("config key 'output.format' must be 'csv' or 'json'");
        }
        cfg.output.precision = get_int(o, "precision", cfg.output.precision, "output");
        if (cfg.output.precision < 6 || cfg.output.precision > 17)
            throw ConfigError("config key 'output.precision' must be in [6, 17]");
    }
    return cfg;
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("config file '" + path + "' is not valid JSON: " + e.what());
    }
    return parse_config(j);
}

// Drive point with config defaults resolved (omega_d falls back to the
// Raman-resonance center omega_bar_d).
inline DriveParams effective_drive(const RunConfig& cfg) {
    DriveParams drv;
    drv.eps_d = cfg.eps_d;
    drv.phi = cfg.phi;
    drv.omega_d = cfg.omega_d ? *cfg.omega_d : omega_d_bar(cfg.device, cfg.eps_d);
    return drv;
}

inline SweepSpec sweep_spec_from_config(const RunConfig& cfg) {
    SweepSpec spec = default_sweep_spec(cfg.device, cfg.eps_d);
    if (cfg.omega_d_lo) spec.omega_d_lo = *cfg.omega_d_lo;
    if (cfg.omega_d_hi) spec.omega_d_hi = *cfg.omega_d_hi;
    spec.omega_d_points = cfg.omega_d_points;
    spec.phi_lo = cfg.phi_lo;
    spec.phi_hi = cfg.phi_hi;
    spec.phi_points = cfg.phi_points;
    spec.solver = cfg.solver;
    spec.threads = cfg.threads;
    return spec;
}

}  // namespace qring
