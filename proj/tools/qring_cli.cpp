// Command-line front end: parameter validation, single-point solves,
// (omega_d, phi) sweeps, sweep comparison, and plot-script generation.

#include <CLI11.hpp>
#include <chrono>
#include <cstdio>
#include <iostream>
#include <json.hpp>
#include <string>

#include "qring/config.hpp"
#include "qring/observables.hpp"
#include "qring/output.hpp"
#include "qring/sweep.hpp"
#include "qring/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitSolver = 3;

qring::RunConfig load_or_default(const std::string& path) {
    if (path.empty()) return qring::RunConfig{};
    return qring::load_config(path);
}

int cmd_validate(const std::string& config_path) {
    const qring::RunConfig cfg = load_or_default(config_path);
    const qring::ValidationReport rep = qring::validate(cfg.device);
    std::printf("device: N=%d  omega_q=%g  omega_c=%g  g=%g  J0=%g  kappa=%g  gamma=%g  gamma_phi=%g\n",
                cfg.device.n_sites, cfg.device.omega_q, cfg.device.omega_c, cfg.device.g,
                cfg.device.j0, cfg.device.kappa, cfg.device.gamma, cfg.device.gamma_phi);
    std::printf("hierarchy factor: %g\n", cfg.device.hierarchy_factor);
    for (const auto& c : rep.checks)
        std::printf("  %-18s ratio %-12.6g %s\n", c.label.c_str(), c.ratio, c.pass ? "pass" : "WARN");
    for (const auto& w : rep.warnings) std::printf("warning: %s\n", w.c_str());
    std::printf(rep.all_pass() ? "hierarchy: all checks pass\n" : "hierarchy: warnings present\n");
    return kExitOk;
}

void print_point(const qring::PointResult& r, const qring::DeviceParams& dev) {
    std::printf("omega_d = %.10g  phi = %.10g  solver = %s\n", r.omega_d, r.phi, r.solver.c_str());
    std::printf("current: %.12g (2pi GHz) = %.6g excitations/s\n", r.current_natural, r.current_si);
    std::printf("n_ground = %.12g\n", r.n_ground);
    for (int k = 0; k < dev.n_sites; ++k) std::printf("n_k%d = %.12g\n", k, r.n_k(k));
    std::printf("diagnostics: trace_err = %.3g  residual = %.3g  min_eig = %.3g  status = %s\n",
                r.trace_err, r.residual, r.min_eigenvalue, r.status.c_str());
}

int cmd_point(const std::string& config_path, double* omega_d, double* phi,
              const std::string& solver, const std::string& json_out) {
    const qring::RunConfig cfg = load_or_default(config_path);
    qring::validate(cfg.device);
    qring::DriveParams drv = qring::effective_drive(cfg);
    if (omega_d) drv.omega_d = *omega_d;
    if (phi) drv.phi = qring::normalize_phase(*phi);
    const qring::Solver sv = solver.empty() ? cfg.solver : qring::solver_from_name(solver);

    const qring::PointResult r = qring::solve_point(cfg.device, drv, sv);
    print_point(r, cfg.device);
    nlohmann::ordered_json j = qring::point_to_json(r);
    j["version"] = std::string(qring::kVersion);
    if (!json_out.empty())
        qring::write_file(json_out, j.dump(2) + "\n");
    else
        std::printf("%s\n", j.dump().c_str());
    return kExitOk;
}

int cmd_sweep(const std::string& config_path, const std::string& out_path,
              const std::string& format, const std::string& solver, int threads, bool strict) {
    const qring::RunConfig cfg = load_or_default(config_path);
    qring::SweepSpec spec = qring::sweep_spec_from_config(cfg);
    if (!solver.empty()) spec.solver = qring::solver_from_name(solver);
    if (threads >= 0) spec.threads = threads;
    const std::string path = out_path.empty() ? cfg.output.path : out_path;
    const std::string fmt = format.empty() ? cfg.output.format : format;
    if (fmt != "csv" && fmt != "json") throw qring::ConfigError("format must be 'csv' or 'json'");

    const auto t0 = std::chrono::steady_clock::now();
    const qring::SweepResult sweep = qring::run_sweep(spec);
    const double ms =
        std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();

    int failed = 0;
    for (const auto& c : sweep.cells)
        if (c.status != "ok") ++failed;

    qring::write_file(path, fmt == "csv" ? qring::sweep_to_csv(sweep, cfg.output.precision)
                                         : qring::sweep_to_json(sweep));
    std::fprintf(stderr, "sweep: %zu x %zu grid, solver=%s, %d failed cells, %.1f ms -> %s\n",
                 sweep.phi.size(), sweep.omega_d.size(), qring::solver_name(spec.solver), failed,
                 ms, path.c_str());
    if (failed > 0 && strict) {
        std::fprintf(stderr, "error: %d cells failed and --strict is set\n", failed);
        return kExitSolver;
    }
    return kExitOk;
}

int cmd_compare(const std::string& path_a, const std::string& path_b, double floor,
                const std::string& json_out) {
    const qring::SweepResult a = qring::read_sweep_any(path_a);
    const qring::SweepResult b = qring::read_sweep_any(path_b);
    const qring::ComparisonReport rep = qring::compare_sweeps(a, b, floor);
    std::printf("floor: %.6g (2pi GHz)\n", rep.floor);
    std::printf("unmasked cells: %d\n", rep.unmasked);
    std::printf("sign agreement: %.6f\n", rep.agreement);
    std::printf("disagreement clusters: %zu\n", rep.clusters.size());
    for (size_t i = 0; i < rep.clusters.size() && i < 8; ++i) {
        const auto& c = rep.clusters[i];
        std::printf("  cluster %zu: %d cells, phi rows [%d, %d], omega_d cols [%d, %d]\n", i,
                    c.size, c.phi_min, c.phi_max, c.omega_min, c.omega_max);
    }
    if (!json_out.empty()) {
        nlohmann::ordered_json j;
        j["floor"] = rep.floor;
        j["unmasked"] = rep.unmasked;
        j["agreements"] = rep.agreements;
        j["agreement"] = rep.agreement;
        j["clusters"] = nlohmann::ordered_json::array();
        for (const auto& c : rep.clusters)
            j["clusters"].push_back({{"size", c.size},
                                     {"phi_rows", {c.phi_min, c.phi_max}},
                                     {"omega_cols", {c.omega_min, c.omega_max}}});
        qring::write_file(json_out, j.dump(2) + "\n");
    }
    return kExitOk;
}

int cmd_plot_script(const std::string& sweep_path, const std::string& out_path,
                    const std::string& config_path) {
    // validates the CSV payload before emitting anything
    const qring::SweepResult sweep = qring::read_sweep_csv(sweep_path);
    qring::RunConfig cfg = load_or_default(config_path);
    if (cfg.device.n_sites != sweep.meta.device.n_sites)
        throw qring::ConfigError("config n_sites does not match the sweep file");
    const std::string script = qring::generate_plot_script(sweep_path, cfg.device, cfg.eps_d);
    qring::write_file(out_path, script);
    std::printf("wrote %s (run with: python3 %s)\n", out_path.c_str(), out_path.c_str());
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "qring: nonequilibrium steady states of a driven-dissipative qubit ring\n"
        "with a synthetic magnetic flux. Computes chiral-state populations and the\n"
        "permanent excitation current over (omega_d, phi) drive grids."};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(qring::kVersion));
    app.footer(
        "Config file keys (JSON; all optional, unknown keys rejected):\n"
        "  device.n_sites            int    ring size N >= 3            [3]\n"
        "  device.omega_q            2piGHz qubit splitting             [7.0]\n"
        "  device.omega_c            2piGHz cavity frequency            [6.0]\n"
        "  device.g                  2piGHz Rabi coupling               [0.1]\n"
        "  device.j0                 2piGHz hopping amplitude           [0.001]\n"
        "  device.kappa              2piGHz cavity damping              [0.0001]\n"
        "  device.gamma              2piGHz qubit decay                 [1e-05]\n"
        "  device.gamma_phi          2piGHz qubit dephasing             [1e-06]\n"
        "  device.deltas             array  per-site offsets, validation only [absent]\n"
        "  device.hierarchy_factor   float  min ratio between scales    [3.0]\n"
        "  drive.eps_d               2piGHz cavity drive amplitude      [0.05]\n"
        "  drive.omega_d             2piGHz drive frequency             [omega_bar_d]\n"
        "  drive.phi                 rad    coupler phase, in [0, 2pi)  [pi/2]\n"
        "  sweep.omega_d_lo/hi       2piGHz omega_d window              [omega_bar_d -/+ 4 J0]\n"
        "  sweep.omega_d_points      int    omega_d samples (closed)    [101]\n"
        "  sweep.phi_lo/hi           rad    phi window (half-open)      [0, 2pi)\n"
        "  sweep.phi_points          int    phi samples                 [121]\n"
        "  sweep.solver              str    rates | nullspace | analytic [rates]\n"
        "  sweep.threads             int    workers, 0 = hardware       [0]\n"
        "  output.path               str    sweep output file           [sweep.csv]\n"
        "  output.format             str    csv | json                  [csv]\n"
        "  output.precision          int    CSV significant digits      [17]");

    std::string config_path;
    auto add_config = [&config_path](CLI::App* cmd) {
        cmd->add_option("-c,--config", config_path, "JSON config file (defaults used when absent)");
    };

    auto* validate_cmd =
        app.add_subcommand("validate", "check device parameters and the frequency hierarchy");
    add_config(validate_cmd);

    auto* point_cmd = app.add_subcommand("point", "solve the steady state at one (omega_d, phi)");
    add_config(point_cmd);
    double omega_d_opt = 0.0, phi_opt = 0.0;
    std::string solver_opt, json_out;
    auto* wopt = point_cmd->add_option("--omega-d", omega_d_opt, "drive frequency (2pi GHz)");
    auto* popt = point_cmd->add_option("--phi", phi_opt, "coupler phase (rad)");
    point_cmd->add_option("--solver", solver_opt, "rates | nullspace | analytic");
    point_cmd->add_option("--json", json_out, "write the machine-readable result to this file");

    auto* sweep_cmd = app.add_subcommand("sweep", "evaluate the (omega_d, phi) grid");
    add_config(sweep_cmd);
    std::string out_path, format_opt;
    int threads = -1;
    bool strict = false;
    sweep_cmd->add_option("--out", out_path, "output file (overrides output.path)");
    sweep_cmd->add_option("--format", format_opt, "csv | json (overrides output.format)");
    sweep_cmd->add_option("--solver", solver_opt, "rates | nullspace | analytic");
    sweep_cmd->add_option("--threads", threads, "worker count, 0 = hardware concurrency");
    sweep_cmd->add_flag("--strict", strict, "exit 3 if any grid cell fails");

    auto* compare_cmd =
        app.add_subcommand("compare", "cellwise sign agreement between two sweep files");
    std::string path_a, path_b;
    double floor = -1.0;
    compare_cmd->add_option("a", path_a, "first sweep file (csv or json)")->required();
    compare_cmd->add_option("b", path_b, "second sweep file (csv or json)")->required();
    compare_cmd->add_option("--floor", floor,
                            "mask cells with |current| below this (default 1% of 2 J0/N)");
    compare_cmd->add_option("--json", json_out, "write the comparison report to this file");

    auto* plot_cmd = app.add_subcommand(
        "plot-script", "emit a standalone matplotlib script rendering a sweep CSV");
    add_config(plot_cmd);
    std::string sweep_path, plot_out = "plot_sweep.py";
    plot_cmd->add_option("sweep", sweep_path, "sweep CSV file")->required();
    plot_cmd->add_option("--out", plot_out, "script path to write");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? kExitOk : kExitConfig;
    }

    try {
        if (validate_cmd->parsed()) return cmd_validate(config_path);
        if (point_cmd->parsed())
            return cmd_point(config_path, wopt->count() ? &omega_d_opt : nullptr,
                             popt->count() ? &phi_opt : nullptr, solver_opt, json_out);
        if (sweep_cmd->parsed())
            return cmd_sweep(config_path, out_path, format_opt, solver_opt, threads, strict);
        if (compare_cmd->parsed()) return cmd_compare(path_a, path_b, floor, json_out);
        if (plot_cmd->parsed()) return cmd_plot_script(sweep_path, plot_out, config_path);
    } catch (const qring::ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const qring::InvalidParameter& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const qring::AxisMismatch& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitConfig;
    } catch (const qring::Error& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return kExitSolver;
    }
    return kExitOk;
}
