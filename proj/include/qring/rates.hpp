#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "qring/errors.hpp"
#include "qring/model.hpp"
#include "qring/operators.hpp"
#include "qring/spectrum.hpp"

namespace qring {

// Directed Fermi-Golden-Rule rates between eigenstates; rates(m, n) is the
// m -> n transition rate, diagonal zero, all entries >= 0.
using RateMatrix = Eigen::MatrixXd;

// Lorentzian cavity density of states, normalized to unit integral:
// rho(w) = (kappa/2pi) / [(w - w_c)^2 + kappa^2/4].
inline double lorentzian_dos(double omega, double omega_c, double kappa) {
    if (!(kappa > 0.0)) throw InvalidParameter("lorentzian_dos: kappa must be > 0");
    const double d = omega - omega_c;
    return (kappa / kTwoPi) / (d * d + 0.25 * kappa * kappa);
}

// Transition matrix element of the two-photon Raman pump,
// Lambda^2 = (g/Delta)^6 (1 + 2 Delta/Delta_c)^2 eps_d^4 / Delta_q^2.
inline double pump_matrix_element_sq(const DeviceParams& dev, const DriveParams& drv) {
    const DerivedScales s = derived_scales(dev, drv);
    if (std::abs(s.delta_q) < 1e-9 || std::abs(s.delta_c) < 1e-9)
        throw PerturbationInvalid("pump rate: resonant denominator (Delta_q or Delta_c ~ 0)");
    const double r = dev.g / s.delta;
    const double e2 = drv.eps_d * drv.eps_d;
    const double f = 1.0 + 2.0 * s.delta / s.delta_c;
    return std::pow(r, 6) * f * f * e2 * e2 / (s.delta_q * s.delta_q);
}

// Closed-form pump rate Gamma_{0 -> k} = 2 pi Lambda^2 rho(w_d + E0~ - Ek~)
// using the perturbative spectrum.
inline double pump_rate_analytic(int k_index, const DeviceParams& dev, const DriveParams& drv) {
    if (k_index < 0 || k_index >= dev.n_sites)
        throw IndexOutOfRange("pump_rate_analytic: momentum index out of range");
    if (drv.eps_d == 0.0) return 0.0;
    const double lambda_sq = pump_matrix_element_sq(dev, drv);
    const AnalyticSpectrum sp = analytic_spectrum(dev, drv);
    const double arg = drv.omega_d + sp.tilde_E_0 - sp.tilde_E_k(k_index);
    return kTwoPi * lambda_sq * lorentzian_dos(arg, dev.omega_c, dev.kappa);
}

// Generalized FGR rate for one transition channel |m> -> |n>. Each cavity is
// an independent zero-temperature bath of photon fluctuations coupled through
// sigma^z_i:
//   Gamma_{m->n} = 2 pi (g/Delta)^4 |Delta a_bar + eps_d/2|^2
//                  * sum_i |<n|sz_i|m>|^2 * rho(w_d + E_m - E_n).
inline double pump_rate_between(const Vector& from, double e_from, const Vector& to, double e_to,
                                const DeviceParams& dev, const DriveParams& drv) {
    if (drv.eps_d == 0.0) return 0.0;
    const DerivedScales s = derived_scales(dev, drv);
    const double r2 = (dev.g / s.delta) * (dev.g / s.delta);
    const double coupling = std::norm(s.delta * s.a_bar + 0.5 * drv.eps_d);
    double elem_sq = 0.0;
    for (int i = 0; i < dev.n_sites; ++i)
        elem_sq += std::norm(Complex(to.dot(pauli_site(Pauli::Z, i, dev.n_sites) * from)));
    const double rho = lorentzian_dos(drv.omega_d + e_from - e_to, dev.omega_c, dev.kappa);
    return kTwoPi * r2 * r2 * coupling * elem_sq * rho;
}

// Generalized FGR rate matrix between all eigenstates of the untruncated
// Hamiltonian (same bath model as pump_rate_between). Only fluctuation
// emission is kept; the Lorentzian suppresses far-off-resonant channels, no
// hard cutoff is applied.
inline RateMatrix pump_rates_full(const EigenSystem& eig, const DeviceParams& dev,
                                  const DriveParams& drv) {
    const int dim = eig.dim();
    RateMatrix rates = RateMatrix::Zero(dim, dim);
    if (drv.eps_d == 0.0) return rates;

    const DerivedScales s = derived_scales(dev, drv);
    const double r2 = (dev.g / s.delta) * (dev.g / s.delta);
    const double coupling = std::norm(s.delta * s.a_bar + 0.5 * drv.eps_d);
    const double prefactor = kTwoPi * r2 * r2 * coupling;

    Eigen::MatrixXd elem_sq = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dev.n_sites; ++i) {
        const Matrix z = eig.states.adjoint() * pauli_site(Pauli::Z, i, dev.n_sites) * eig.states;
        elem_sq += z.cwiseAbs2();
    }
    for (int m = 0; m < dim; ++m)
        for (int n = 0; n < dim; ++n) {
            if (m == n) continue;
            const double rho =
                lorentzian_dos(drv.omega_d + eig.energies(m) - eig.energies(n), dev.omega_c, dev.kappa);
            rates(m, n) = prefactor * elem_sq(n, m) * rho;
        }
    return rates;
}

struct JumpOp {
    double rate = 0.0;  // prefactor; the Lindblad operator is sqrt(rate) * op
    Matrix op;
};

// Local dissipators of the master equation: qubit decay {sqrt(gamma) s-_i}
// and dephasing {sqrt(gamma_phi/2) sz_i}. Projected onto the 0/1-excitation
// manifold these reproduce the collective rates gamma and 2 gamma_phi / N.
inline std::vector<JumpOp> dissipative_jumps(const DeviceParams& dev) {
    detail::check_ring(dev);
    std::vector<JumpOp> jumps;
    if (dev.gamma > 0.0)
        for (int i = 0; i < dev.n_sites; ++i)
            jumps.push_back({dev.gamma, pauli_site(Pauli::Minus, i, dev.n_sites)});
    if (dev.gamma_phi > 0.0)
        for (int i = 0; i < dev.n_sites; ++i)
            jumps.push_back({0.5 * dev.gamma_phi, pauli_site(Pauli::Z, i, dev.n_sites)});
    return jumps;
}

}  // namespace qring
