#pragma once

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <string>
#include <vector>

#include "qring/errors.hpp"
#include "qring/observables.hpp"
#include "qring/sweep.hpp"

namespace qring {

// Locale-independent float formatting with a fixed number of significant
// digits (printf %.Ng semantics via to_chars).
inline std::string format_sig(double v, int precision = 17) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, precision);
    return std::string(buf, res.ptr);
}

inline std::string csv_header(int n_sites) {
    std::string h = "omega_d,phi,current_natural,current_per_sec,n_ground";
    for (int k = 0; k < n_sites; ++k) h += ",n_k" + std::to_string(k);
    h += ",trace_err,residual,solver_status";
    return h;
}

// Canonical interchange format. Row order is row-major with phi outer and
// omega_d inner; payload bytes depend only on the sweep content.
inline std::string sweep_to_csv(const SweepResult& sweep, int precision = 17) {
    const int n = sweep.meta.device.n_sites;
    std::string out = csv_header(n);
    out += '\n';
    for (const auto& c : sweep.cells) {
        out += format_sig(c.omega_d, precision);
        out += ',';
        out += format_sig(c.phi, precision);
        out += ',';
        out += format_sig(c.current_natural, precision);
        out += ',';
        out += format_sig(c.current_si, precision);
        out += ',';
        out += format_sig(c.n_ground, precision);
        for (int k = 0; k < n; ++k) {
            out += ',';
            out += format_sig(k < c.n_k.size() ? c.n_k(k) : 0.0, precision);
        }
        out += ',';
        out += format_sig(c.trace_err, precision);
        out += ',';
        out += format_sig(c.residual, precision);
        out += ',';
        out += c.status;
        out += '\n';
    }
    return out;
}

inline nlohmann::ordered_json device_to_json(const DeviceParams& d) {
    nlohmann::ordered_json j;
    j["n_sites"] = d.n_sites;
    j["omega_q"] = d.omega_q;
    j["omega_c"] = d.omega_c;
    j["g"] = d.g;
    j["j0"] = d.j0;
    j["kappa"] = d.kappa;
    j["gamma"] = d.gamma;
    j["gamma_phi"] = d.gamma_phi;
    if (!d.deltas.empty()) j["deltas"] = d.deltas;
    return j;
}

inline nlohmann::ordered_json point_to_json(const PointResult& c) {
    nlohmann::ordered_json cell;
    cell["omega_d"] = c.omega_d;
    cell["phi"] = c.phi;
    cell["current_natural"] = c.current_natural;
    cell["current_per_sec"] = c.current_si;
    cell["n_ground"] = c.n_ground;
    std::vector<double> nk(c.n_k.data(), c.n_k.data() + c.n_k.size());
    cell["n_k"] = nk;
    std::vector<double> bonds(c.bond_currents.data(), c.bond_currents.data() + c.bond_currents.size());
    cell["bond_currents"] = bonds;
    cell["trace_err"] = c.trace_err;
    cell["residual"] = c.residual;
    cell["min_eigenvalue"] = c.min_eigenvalue;
    cell["solver"] = c.solver;
    cell["solver_status"] = c.status;
    return cell;
}

// JSON mirror of the CSV payload plus metadata. Wall-clock timing is
// deliberately not part of the file so reruns are byte-identical.
inline std::string sweep_to_json(const SweepResult& sweep) {
    nlohmann::ordered_json j;
    j["version"] = std::string(sweep.meta.version);
    j["solver"] = solver_name(sweep.meta.solver);
    j["device"] = device_to_json(sweep.meta.device);
    j["eps_d"] = sweep.meta.eps_d;
    j["axes"]["omega_d"] = sweep.omega_d;
    j["axes"]["phi"] = sweep.phi;
    nlohmann::ordered_json cells = nlohmann::ordered_json::array();
    for (const auto& c : sweep.cells) cells.push_back(point_to_json(c));
    j["cells"] = std::move(cells);
    return j.dump(2) + "\n";
}

inline void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw ConfigError("failed writing output file '" + path + "'");
}

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    for (char ch : line) {
        if (ch == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (ch != '\r') {
            cur += ch;
        }
    }
    fields.push_back(cur);
    return fields;
}

inline double parse_double(const std::string& s, const std::string& context) {
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end == s.c_str() || *end != '\0')
        throw ConfigError("malformed number '" + s + "' in " + context);
    return v;
}
}  // namespace detail

// Reads a sweep back from its CSV form. The device metadata cannot be
// recovered from the payload; n_sites is inferred from the n_k columns and
// the rest stays at defaults (callers needing exact metadata use JSON).
inline SweepResult read_sweep_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sweep file '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw ConfigError("sweep file '" + path + "' is empty");

    const auto header = detail::split_csv_line(line);
    int n_sites = 0;
    for (const auto& h : header)
        if (h.rfind("n_k", 0) == 0) ++n_sites;
    if (n_sites < 3 || header != detail::split_csv_line(csv_header(n_sites)))
        throw ConfigError("sweep file '" + path + "' has an unexpected header");

    SweepResult sweep;
    sweep.meta.device.n_sites = n_sites;
    size_t row = 0;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto f = detail::split_csv_line(line);
        if (f.size() != header.size())
            throw ConfigError("sweep file '" + path + "': wrong column count at data row " +
                              std::to_string(row + 1));
        const std::string ctx = path + " row " + std::to_string(row + 1);
        PointResult c;
        c.omega_d = detail::parse_double(f[0], ctx);
        c.phi = detail::parse_double(f[1], ctx);
        c.current_natural = detail::parse_double(f[2], ctx);
        c.current_si = detail::parse_double(f[3], ctx);
        c.n_ground = detail::parse_double(f[4], ctx);
        c.n_k.resize(n_sites);
        for (int k = 0; k < n_sites; ++k) c.n_k(k) = detail::parse_double(f[5 + k], ctx);
        c.trace_err = detail::parse_double(f[5 + n_sites], ctx);
        c.residual = detail::parse_double(f[6 + n_sites], ctx);
        c.status = f[7 + n_sites];
        c.bond_currents = Eigen::VectorXd::Zero(n_sites);
        sweep.cells.push_back(std::move(c));
        ++row;
    }
    if (sweep.cells.empty()) throw ConfigError("sweep file '" + path + "' has no data rows");

    // reconstruct axes from the row-major (phi outer, omega_d inner) order
    for (const auto& c : sweep.cells) {
        if (!sweep.omega_d.empty() && c.omega_d == sweep.omega_d.front()) break;
        sweep.omega_d.push_back(c.omega_d);
    }
    const size_t nw = sweep.omega_d.size();
    if (nw == 0 || sweep.cells.size() % nw != 0)
        throw ConfigError("sweep file '" + path + "' is not a complete grid");
    for (size_t i = 0; i < sweep.cells.size(); i += nw) sweep.phi.push_back(sweep.cells[i].phi);
    for (size_t i = 0; i < sweep.cells.size(); ++i) {
        if (sweep.cells[i].omega_d != sweep.omega_d[i % nw] ||
            sweep.cells[i].phi != sweep.phi[i / nw])
            throw ConfigError("sweep file '" + path + "' rows are not in grid order");
    }
    return sweep;
}

inline SweepResult read_sweep_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sweep file '" + path + "'");
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("sweep file '" + path + "' is not valid JSON: " + e.what());
    }
    try {
        SweepResult sweep;
        sweep.meta.version = j.at("version").get<std::string>();
        sweep.meta.solver = solver_from_name(j.at("solver").get<std::string>());
        const auto& d = j.at("device");
        sweep.meta.device.n_sites = d.at("n_sites").get<int>();
        sweep.meta.device.omega_q = d.at("omega_q").get<double>();
        sweep.meta.device.omega_c = d.at("omega_c").get<double>();
        sweep.meta.device.g = d.at("g").get<double>();
        sweep.meta.device.j0 = d.at("j0").get<double>();
        sweep.meta.device.kappa = d.at("kappa").get<double>();
        sweep.meta.device.gamma = d.at("gamma").get<double>();
        sweep.meta.device.gamma_phi = d.at("gamma_phi").get<double>();
        if (d.contains("deltas")) sweep.meta.device.deltas = d["deltas"].get<std::vector<double>>();
        sweep.meta.eps_d = j.at("eps_d").get<double>();
        sweep.omega_d = j.at("axes").at("omega_d").get<std::vector<double>>();
        sweep.phi = j.at("axes").at("phi").get<std::vector<double>>();
        for (const auto& cj : j.at("cells")) {
            PointResult c;
            c.omega_d = cj.at("omega_d").get<double>();
            c.phi = cj.at("phi").get<double>();
            c.current_natural = cj.at("current_natural").get<double>();
            c.current_si = cj.at("current_per_sec").get<double>();
            c.n_ground = cj.at("n_ground").get<double>();
            const auto nk = cj.at("n_k").get<std::vector<double>>();
            c.n_k = Eigen::Map<const Eigen::VectorXd>(nk.data(), nk.size());
            const auto bonds = cj.at("bond_currents").get<std::vector<double>>();
            c.bond_currents = Eigen::Map<const Eigen::VectorXd>(bonds.data(), bonds.size());
            c.trace_err = cj.at("trace_err").get<double>();
            c.residual = cj.at("residual").get<double>();
            c.min_eigenvalue = cj.at("min_eigenvalue").get<double>();
            c.solver = cj.at("solver").get<std::string>();
            c.status = cj.at("solver_status").get<std::string>();
            sweep.cells.push_back(std::move(c));
        }
        if (sweep.cells.size() != sweep.omega_d.size() * sweep.phi.size())
            throw ConfigError("sweep file '" + path + "': cell count does not match axes");
        return sweep;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("sweep file '" + path + "' has an unexpected layout: " + e.what());
    }
}

inline SweepResult read_sweep_any(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open sweep file '" + path + "'");
    char first = 0;
    in >> first;
    in.close();
    return first == '{' ? read_sweep_json(path) : read_sweep_csv(path);
}

// Standalone matplotlib renderer for a sweep CSV: current heatmap with the
// 2N zero-current guide lines and the N resonance curves, plus one
// population map per momentum. Only the CSV path is referenced; all model
// constants are embedded at generation time.
inline std::string generate_plot_script(const std::string& csv_path, const DeviceParams& dev,
                                        double eps_d) {
    const int n = dev.n_sites;
    const double wbar = omega_d_bar(dev, eps_d);
    std::ostringstream py;
    py << "#!/usr/bin/env python3\n";
    py << "# Auto-generated heatmap renderer. Requires numpy and matplotlib.\n";
    py << "import numpy as np\n";
    py << "import matplotlib\n";
    py << "matplotlib.use(\"Agg\")\n";
    py << "import matplotlib.pyplot as plt\n\n";
    py << "CSV = \"" << csv_path << "\"\n";
    py << "N = " << n << "\n";
    py << "J0 = " << format_sig(dev.j0) << "\n";
    py << "WBAR = " << format_sig(wbar) << "\n\n";
    py << "data = np.genfromtxt(CSV, delimiter=\",\", names=True)\n";
    py << "omega = np.unique(data[\"omega_d\"])\n";
    py << "phi = np.unique(data[\"phi\"])\n";
    py << "grid = lambda col: data[col].reshape(len(phi), len(omega))\n";
    py << "phis = np.linspace(phi.min(), phi.max(), 512)\n\n";
    py << "fig, ax = plt.subplots(figsize=(7.2, 5.2))\n";
    py << "scale = 2.0 * J0 / N\n";
    py << "pm = ax.pcolormesh(omega, phi, grid(\"current_natural\"), cmap=\"RdBu_r\",\n";
    py << "                   vmin=-scale, vmax=scale, shading=\"nearest\")\n";
    py << "fig.colorbar(pm, ax=ax, label=\"current (2pi GHz)\")\n";
    for (int g = 0; g < 2 * n; ++g)
        py << "ax.axhline(" << g << " * np.pi / N, color=\"k\", ls=\"--\", lw=0.8)  # zero-current guide\n";
    for (int k = 0; k < n; ++k)
        py << "ax.plot(WBAR - J0 * np.cos(2 * np.pi * " << k
           << " / N + phis), phis, color=\"g\", ls=\"--\", lw=1.1)  # resonance curve k=" << k << "\n";
    py << "ax.set_xlim(omega.min(), omega.max())\n";
    py << "ax.set_ylim(phi.min(), phi.max())\n";
    py << "ax.set_xlabel(\"omega_d (2pi GHz)\")\n";
    py << "ax.set_ylabel(\"phi (rad)\")\n";
    py << "ax.set_title(\"steady-state excitation current\")\n";
    py << "fig.savefig(CSV + \".current.png\", dpi=160, bbox_inches=\"tight\")\n\n";
    py << "fig2, axes = plt.subplots(1, N, figsize=(3.6 * N, 4.2), sharey=True)\n";
    py << "for k, axk in enumerate(np.atleast_1d(axes)):\n";
    py << "    pmk = axk.pcolormesh(omega, phi, grid(\"n_k%d\" % k), cmap=\"viridis\",\n";
    py << "                         vmin=0.0, shading=\"nearest\")\n";
    py << "    axk.plot(WBAR - J0 * np.cos(2 * np.pi * k / N + phis), phis,\n";
    py << "             color=\"w\", ls=\"--\", lw=1.0)\n";
    py << "    fig2.colorbar(pmk, ax=axk, label=\"n_k%d\" % k)\n";
    py << "    axk.set_xlabel(\"omega_d (2pi GHz)\")\n";
    py << "np.atleast_1d(axes)[0].set_ylabel(\"phi (rad)\")\n";
    py << "fig2.savefig(CSV + \".populations.png\", dpi=160, bbox_inches=\"tight\")\n";
    py << "print(\"wrote\", CSV + \".current.png\", \"and\", CSV + \".populations.png\")\n";
    return py.str();
}

}  // namespace qring
