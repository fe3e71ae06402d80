#pragma once

#include <Eigen/Dense>
#include <atomic>
#include <cmath>
#include <string>
#include <thread>
#include <vector>

#include "qring/errors.hpp"
#include "qring/model.hpp"
#include "qring/observables.hpp"
#include "qring/rates.hpp"
#include "qring/spectrum.hpp"
#include "qring/steadystate.hpp"
#include "qring/version.hpp"

namespace qring {

enum class Solver { Rates, Nullspace, Analytic };

inline const char* solver_name(Solver s) {
    switch (s) {
        case Solver::Rates: return "rates";
        case Solver::Nullspace: return "nullspace";
        case Solver::Analytic: return "analytic";
    }
    return "?";
}

inline Solver solver_from_name(const std::string& s) {
    if (s == "rates") return Solver::Rates;
    if (s == "nullspace") return Solver::Nullspace;
    if (s == "analytic") return Solver::Analytic;
    throw ConfigError("unknown solver '" + s + "' (expected rates, nullspace or analytic)");
}

struct SweepSpec {
    DeviceParams device;
    double eps_d = 0.05;
    double omega_d_lo = 0.0, omega_d_hi = 0.0;  // closed interval
    int omega_d_points = 101;
    double phi_lo = 0.0, phi_hi = kTwoPi;  // half-open interval
    int phi_points = 121;
    Solver solver = Solver::Rates;
    int threads = 0;  // 0 = hardware concurrency

    void validate_spec() const {
        if (omega_d_points < 2 || phi_points < 2) throw ConfigError("sweep: step counts must be >= 2");
        if (!std::isfinite(omega_d_lo) || !std::isfinite(omega_d_hi) || !std::isfinite(phi_lo) ||
            !std::isfinite(phi_hi))
            throw ConfigError("sweep: ranges must be finite");
        if (!(omega_d_hi > omega_d_lo) || !(phi_hi > phi_lo))
            throw ConfigError("sweep: ranges must be increasing");
        if (threads < 0) throw ConfigError("sweep: threads must be >= 0");
    }

    std::vector<double> omega_d_axis() const {
        std::vector<double> v(omega_d_points);
        const double step = (omega_d_hi - omega_d_lo) / (omega_d_points - 1);
        for (int i = 0; i < omega_d_points; ++i) v[i] = omega_d_lo + i * step;
        return v;
    }
    std::vector<double> phi_axis() const {
        std::vector<double> v(phi_points);
        const double step = (phi_hi - phi_lo) / phi_points;
        for (int i = 0; i < phi_points; ++i) v[i] = phi_lo + i * step;
        return v;
    }
};

// Default grid: omega_d centered on omega_bar_d +/- 4 J0, phi over one full
// period.
inline SweepSpec default_sweep_spec(const DeviceParams& dev, double eps_d) {
    SweepSpec spec;
    spec.device = dev;
    spec.eps_d = eps_d;
    const double wbar = omega_d_bar(dev, eps_d);
    spec.omega_d_lo = wbar - 4.0 * dev.j0;
    spec.omega_d_hi = wbar + 4.0 * dev.j0;
    return spec;
}

// Full-numerics point solve with the secular rate-equation solver:
// exact diagonalization, FGR rates, stationary populations.
inline PointResult solve_point_rates(const DeviceParams& dev, const DriveParams& drv) {
    const EigenSystem eig = diagonalize(build_h_sigma(dev, drv));
    const RateMatrix pump = pump_rates_full(eig, dev, drv);
    const RateSolution sol = steady_state_rate_equation(eig, pump, dev);

    const Matrix rho =
        eig.states * sol.populations.cast<Complex>().asDiagonal() * eig.states.adjoint();

    PointResult r;
    r.omega_d = drv.omega_d;
    r.phi = drv.phi;
    r.solver = "rates";
    const BondCurrents bc = current_operator_expectation(rho, dev, drv);
    r.bond_currents = bc.bond;
    r.current_natural = bc.mean;
    r.current_si = bc.mean * kNaturalToPerSecond;
    const ChiralPopulations pops = populations_nk(rho, dev);
    r.n_k = pops.n_k;
    r.n_ground = pops.n_ground;
    r.trace_err = std::abs(sol.populations.sum() - 1.0);
    r.residual = sol.residual;
    r.min_eigenvalue = sol.populations.minCoeff();
    return r;
}

// Full-numerics point solve through the Liouvillian null space, with local
// decay/dephasing jumps plus the Davies pump jumps in the eigenbasis.
inline PointResult solve_point_nullspace(const DeviceParams& dev, const DriveParams& drv) {
    const Matrix h = build_h_sigma(dev, drv);
    const EigenSystem eig = diagonalize(h);
    const RateMatrix pump = pump_rates_full(eig, dev, drv);

    std::vector<JumpOp> jumps = dissipative_jumps(dev);
    const int dim = eig.dim();
    for (int m = 0; m < dim; ++m)
        for (int n = 0; n < dim; ++n) {
            if (m == n || pump(m, n) == 0.0) continue;
            JumpOp j;
            j.rate = pump(m, n);
            j.op = eig.states.col(n) * eig.states.col(m).adjoint();
            jumps.push_back(std::move(j));
        }

    const Liouvillian l = build_liouvillian(h, jumps);
    const SteadyStateSolution sol = steady_state_nullspace(l);

    PointResult r;
    r.omega_d = drv.omega_d;
    r.phi = drv.phi;
    r.solver = "nullspace";
    const BondCurrents bc = current_operator_expectation(sol.rho, dev, drv);
    r.bond_currents = bc.bond;
    r.current_natural = bc.mean;
    r.current_si = bc.mean * kNaturalToPerSecond;
    const ChiralPopulations pops = populations_nk(sol.rho, dev);
    r.n_k = pops.n_k;
    r.n_ground = pops.n_ground;
    r.trace_err = sol.check.trace_err;
    r.residual = sol.residual;
    r.min_eigenvalue = sol.check.min_eigenvalue;
    return r;
}

// Analytic-prediction point: each |k> is occupied independently with a
// Lorentzian-weighted pump rate saturating at Gamma / (Gamma + gamma +
// 2 gamma_phi (N-1)/N), then the current follows from the population formula.
inline PointResult solve_point_analytic(const DeviceParams& dev, const DriveParams& drv) {
    const int n = dev.n_sites;
    PointResult r;
    r.omega_d = drv.omega_d;
    r.phi = drv.phi;
    r.solver = "analytic";
    r.n_k.resize(n);
    const double leak = dev.gamma + 2.0 * dev.gamma_phi * (n - 1) / n;
    for (int k = 0; k < n; ++k) {
        const double pump = pump_rate_analytic(k, dev, drv);
        r.n_k(k) = pump > 0.0 ? pump / (pump + leak) : 0.0;
    }
    r.n_ground = std::max(0.0, 1.0 - r.n_k.sum());
    r.current_natural = current_from_populations(r.n_k, drv.phi, dev);
    r.current_si = r.current_natural * kNaturalToPerSecond;
    r.bond_currents = Eigen::VectorXd::Constant(n, r.current_natural);
    r.min_eigenvalue = 0.0;
    return r;
}

inline PointResult solve_point(const DeviceParams& dev, const DriveParams& drv, Solver solver) {
    switch (solver) {
        case Solver::Rates: return solve_point_rates(dev, drv);
        case Solver::Nullspace: return solve_point_nullspace(dev, drv);
        case Solver::Analytic: return solve_point_analytic(dev, drv);
    }
    throw ConfigError("solve_point: unknown solver");
}

struct SweepMetadata {
    DeviceParams device;
    double eps_d = 0.05;
    Solver solver = Solver::Rates;
    std::string version = std::string(kVersion);
};

struct SweepResult {
    std::vector<double> omega_d;  // inner axis
    std::vector<double> phi;      // outer axis
    std::vector<PointResult> cells;  // row-major: phi outer, omega_d inner
    SweepMetadata meta;

    const PointResult& at(int phi_idx, int omega_idx) const {
        return cells[static_cast<size_t>(phi_idx) * omega_d.size() + omega_idx];
    }
    bool all_ok() const {
        for (const auto& c : cells)
            if (c.status != "ok") return false;
        return true;
    }
};

// Evaluates the grid with an index-keyed parallel map: output is a pure
// function of the spec, independent of worker count and scheduling. Failed
// cells carry an error marker instead of aborting the sweep.
inline SweepResult run_sweep(const SweepSpec& spec) {
    spec.validate_spec();
    validate(spec.device);

    SweepResult out;
    out.omega_d = spec.omega_d_axis();
    out.phi = spec.phi_axis();
    out.meta.device = spec.device;
    out.meta.eps_d = spec.eps_d;
    out.meta.solver = spec.solver;

    const size_t total = out.omega_d.size() * out.phi.size();
    out.cells.resize(total);

    unsigned n_workers = spec.threads > 0 ? static_cast<unsigned>(spec.threads)
                                          : std::max(1u, std::thread::hardware_concurrency());
    n_workers = std::min<unsigned>(n_workers, static_cast<unsigned>(total));

    std::atomic<size_t> next{0};
    auto worker = [&]() {
        for (;;) {
            const size_t idx = next.fetch_add(1);
            if (idx >= total) return;
            const size_t pi = idx / out.omega_d.size();
            const size_t wi = idx % out.omega_d.size();
            DriveParams drv;
            drv.omega_d = out.omega_d[wi];
            drv.phi = out.phi[pi];
            drv.eps_d = spec.eps_d;
            try {
                out.cells[idx] = solve_point(spec.device, drv, spec.solver);
            } catch (const Error& e) {
                PointResult r;
                r.omega_d = drv.omega_d;
                r.phi = drv.phi;
                r.solver = solver_name(spec.solver);
                r.status = std::string("failed:") + e.what();
                r.n_k = Eigen::VectorXd::Zero(spec.device.n_sites);
                r.bond_currents = Eigen::VectorXd::Zero(spec.device.n_sites);
                out.cells[idx] = std::move(r);
            }
        }
    };

    if (n_workers <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(n_workers);
        for (unsigned i = 0; i < n_workers; ++i) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    return out;
}

inline SweepResult analytic_sweep(SweepSpec spec) {
    spec.solver = Solver::Analytic;
    return run_sweep(spec);
}

struct SignCluster {
    int size = 0;
    int phi_min = 0, phi_max = 0;
    int omega_min = 0, omega_max = 0;
};

struct ComparisonReport {
    double floor = 0.0;
    int unmasked = 0;
    int agreements = 0;
    double agreement = 1.0;  // 1.0 when no cell is unmasked
    std::vector<SignCluster> clusters;  // contiguous disagreement regions
};

// Cellwise sign agreement between two sweeps on identical axes. Cells where
// either current is below the floor are masked out; disagreement cells are
// grouped into 4-connected clusters.
inline ComparisonReport compare_sweeps(const SweepResult& a, const SweepResult& b,
                                       double floor = -1.0) {
    if (a.omega_d != b.omega_d || a.phi != b.phi)
        throw AxisMismatch("compare_sweeps: sweeps have different axes");
    ComparisonReport rep;
    rep.floor = floor >= 0.0 ? floor
                             : 0.02 * a.meta.device.j0 / a.meta.device.n_sites;  // 1% of 2 J0/N
    const int np = static_cast<int>(a.phi.size());
    const int nw = static_cast<int>(a.omega_d.size());
    std::vector<char> disagree(static_cast<size_t>(np) * nw, 0);
    auto sgn = [](double x) { return (x > 0.0) - (x < 0.0); };
    for (int p = 0; p < np; ++p)
        for (int w = 0; w < nw; ++w) {
            const double ia = a.at(p, w).current_natural;
            const double ib = b.at(p, w).current_natural;
            if (std::abs(ia) < rep.floor || std::abs(ib) < rep.floor) continue;
            ++rep.unmasked;
            if (sgn(ia) == sgn(ib))
                ++rep.agreements;
            else
                disagree[static_cast<size_t>(p) * nw + w] = 1;
        }
    rep.agreement = rep.unmasked > 0 ? static_cast<double>(rep.agreements) / rep.unmasked : 1.0;

    // 4-connected flood fill over disagreement cells
    std::vector<char> seen(disagree.size(), 0);
    for (int p = 0; p < np; ++p)
        for (int w = 0; w < nw; ++w) {
            const size_t start = static_cast<size_t>(p) * nw + w;
            if (!disagree[start] || seen[start]) continue;
            SignCluster cl;
            cl.phi_min = cl.phi_max = p;
            cl.omega_min = cl.omega_max = w;
            std::vector<std::pair<int, int>> stack{{p, w}};
            seen[start] = 1;
            while (!stack.empty()) {
                auto [cp, cw] = stack.back();
                stack.pop_back();
                ++cl.size;
                cl.phi_min = std::min(cl.phi_min, cp);
                cl.phi_max = std::max(cl.phi_max, cp);
                cl.omega_min = std::min(cl.omega_min, cw);
                cl.omega_max = std::max(cl.omega_max, cw);
                const int dp[4] = {1, -1, 0, 0};
                const int dw[4] = {0, 0, 1, -1};
                for (int d = 0; d < 4; ++d) {
                    const int qp = cp + dp[d], qw = cw + dw[d];
                    if (qp < 0 || qp >= np || qw < 0 || qw >= nw) continue;
                    const size_t qi = static_cast<size_t>(qp) * nw + qw;
                    if (disagree[qi] && !seen[qi]) {
                        seen[qi] = 1;
                        stack.emplace_back(qp, qw);
                    }
                }
            }
            rep.clusters.push_back(cl);
        }
    std::sort(rep.clusters.begin(), rep.clusters.end(),
              [](const SignCluster& x, const SignCluster& y) { return x.size > y.size; });
    return rep;
}

}  // namespace qring
