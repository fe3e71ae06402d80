#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "qring/errors.hpp"
#include "qring/model.hpp"
#include "qring/operators.hpp"

namespace qring {

struct EigenSystem {
    Eigen::VectorXd energies;        // ascending
    Matrix states;                   // column-orthonormal, deterministic phase
    std::vector<int> excitation_labels;  // nearest-integer number expectation

    int dim() const { return static_cast<int>(energies.size()); }
};

namespace detail {

// Deterministic phase: rotate each column so its largest-magnitude component
// is real and positive. Near-ties resolve to the lowest basis index.
inline void fix_phases(Matrix& v) {
    for (int c = 0; c < v.cols(); ++c) {
        int best = 0;
        double best_mag = 0.0;
        for (int r = 0; r < v.rows(); ++r) {
            const double mag = std::abs(v(r, c));
            if (mag > best_mag * (1.0 + 1e-12)) {
                best_mag = mag;
                best = r;
            }
        }
        if (best_mag > 0.0) v.col(c) *= std::conj(v(best, c)) / std::abs(v(best, c));
    }
}

inline int largest_component_index(const Vector& v) {
    int best = 0;
    double best_mag = 0.0;
    for (int r = 0; r < v.size(); ++r) {
        const double mag = std::abs(v(r));
        if (mag > best_mag * (1.0 + 1e-12)) {
            best_mag = mag;
            best = r;
        }
    }
    return best;
}

// Re-diagonalizes a degenerate cluster in the eigenbasis of the ring
// translation operator. H commutes with the translation for every drive, so
// this is a canonical re-orthogonalization: it labels cluster states by
// quasi-momentum, which makes the chiral-overlap sort below exact and keeps
// populations of counter-propagating partners symmetric at the
// time-reversal-invariant phases. Skipped when the cluster is not
// translation-invariant (generic external H).
inline void adapt_cluster_to_translation(Matrix& states, int first, int count, const Matrix& t_op) {
    auto block = states.middleCols(first, count);
    const Matrix w = block.adjoint() * t_op * block;
    // unitary iff the cluster spans a translation-invariant subspace
    if ((w * w.adjoint() - Matrix::Identity(count, count)).cwiseAbs().maxCoeff() > 1e-8) return;
    Eigen::ComplexEigenSolver<Matrix> es(w);
    if (es.info() != Eigen::Success) return;
    Matrix u = es.eigenvectors();
    std::vector<int> order(count);
    std::iota(order.begin(), order.end(), 0);
    // T|k> = e^{-ik}|k>, so the momentum label is arg of the conjugate
    std::vector<double> angle(count);
    for (int i = 0; i < count; ++i) {
        double a = std::arg(std::conj(es.eigenvalues()(i)));
        if (a < -1e-9) a += kTwoPi;
        angle[i] = a;
    }
    std::sort(order.begin(), order.end(), [&](int a, int b) { return angle[a] < angle[b]; });
    Matrix u_sorted(count, count);
    for (int i = 0; i < count; ++i) u_sorted.col(i) = u.col(order[i]);
    // eigenvectors of a unitary are orthogonal across distinct eigenvalues;
    // QR re-orthonormalizes within repeated ones without mixing sectors
    Eigen::HouseholderQR<Matrix> qr(u_sorted);
    Matrix q = qr.householderQ() * Matrix::Identity(count, count);
    states.middleCols(first, count) = block * q;
}

}  // namespace detail

// Exact diagonalization of a Hermitian qubit operator. Energies ascending;
// eigenvectors carry a deterministic phase. Within an energy-degenerate
// cluster (gap < 1e-10) vectors are re-orthogonalized along the ring
// translation eigenbasis and sorted by descending overlap with the chiral
// states |k>, then by lowest basis index of the largest component.
inline EigenSystem diagonalize(const Matrix& h) {
    const int dim = static_cast<int>(h.rows());
    if (dim != h.cols() || dim < 2) throw DimensionMismatch("diagonalize: matrix must be square");
    int n_sites = 0;
    while ((1 << n_sites) < dim) ++n_sites;
    if ((1 << n_sites) != dim) throw DimensionMismatch("diagonalize: dimension must be a power of 2");
    if (!is_hermitian(h)) throw NotHermitian("diagonalize: operator is not Hermitian");

    Eigen::SelfAdjointEigenSolver<Matrix> es;
    es.compute(Matrix(0.5 * (h + h.adjoint())));
    if (es.info() != Eigen::Success) throw EigenFailure("diagonalize: eigensolver did not converge");

    EigenSystem sys;
    sys.energies = es.eigenvalues();
    sys.states = es.eigenvectors();

    const double cluster_gap = 1e-10 * std::max(1.0, sys.energies.cwiseAbs().maxCoeff());
    const Matrix t_op = translation_op(n_sites);

    // chiral single-excitation states for the overlap sort
    std::vector<Vector> chiral;
    if (n_sites >= 3) {
        DeviceParams ring;
        ring.n_sites = n_sites;
        for (int k = 0; k < n_sites; ++k) chiral.push_back(chiral_state(k, ring));
    }

    int first = 0;
    while (first < dim) {
        int last = first;
        while (last + 1 < dim && sys.energies(last + 1) - sys.energies(last) < cluster_gap) ++last;
        const int count = last - first + 1;
        if (count > 1) {
            detail::adapt_cluster_to_translation(sys.states, first, count, t_op);
            std::vector<int> order(count);
            std::iota(order.begin(), order.end(), 0);
            std::vector<double> overlap(count, 0.0);
            std::vector<int> anchor(count, 0);
            for (int i = 0; i < count; ++i) {
                const Vector v = sys.states.col(first + i);
                for (const auto& k : chiral) overlap[i] = std::max(overlap[i], std::abs(k.dot(v)));
                anchor[i] = detail::largest_component_index(v);
            }
            std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
                if (std::abs(overlap[a] - overlap[b]) > 1e-12) return overlap[a] > overlap[b];
                return anchor[a] < anchor[b];
            });
            Matrix sorted(dim, count);
            for (int i = 0; i < count; ++i) sorted.col(i) = sys.states.col(first + order[i]);
            sys.states.middleCols(first, count) = sorted;
        }
        first = last + 1;
    }

    detail::fix_phases(sys.states);

    const Matrix num = number_op(n_sites);
    sys.excitation_labels.resize(dim);
    for (int c = 0; c < dim; ++c) {
        const double x = std::real(Complex(sys.states.col(c).dot(num * sys.states.col(c))));
        sys.excitation_labels[c] = static_cast<int>(std::lround(x));
    }
    return sys;
}

struct AnalyticSpectrum {
    Eigen::VectorXd E_k;        // bare dispersion E_k = eps_k - omega_d
    double tilde_E_0 = 0.0;     // perturbed ground energy
    Eigen::VectorXd tilde_E_k;  // perturbed one-excitation energies
    Vector tilde_ground;        // |0~> in the full 2^N basis
    Matrix tilde_k_states;      // |k~> columns in the full 2^N basis
    double perturbative_ratio = 0.0;  // (g/Delta) sqrt(N) eps_d / Delta_q
    bool perturbative_ok = true;      // ratio < 0.2
};

// Perturbative spectrum of the truncated Hamiltonian: the drive admixes
// |k=0> into the ground state at first order in (g/Delta)(eps_d/Delta_q).
inline AnalyticSpectrum analytic_spectrum(const DeviceParams& dev, const DriveParams& drv) {
    detail::check_ring(dev);
    const DerivedScales s = derived_scales(dev, drv);
    if (std::abs(s.delta_q) < 1e-9)
        throw PerturbationInvalid("analytic_spectrum: drive resonant with qubit (Delta_q ~ 0)");

    const int n = dev.n_sites;
    const double r = dev.g / s.delta;
    const double eta = r * std::sqrt(static_cast<double>(n)) * drv.eps_d / s.delta_q;
    const double shift = r * r * n * drv.eps_d * drv.eps_d / s.delta_q;

    AnalyticSpectrum out;
    out.perturbative_ratio = std::abs(eta);
    out.perturbative_ok = out.perturbative_ratio < 0.2;
    out.E_k.resize(n);
    out.tilde_E_k.resize(n);
    for (int k = 0; k < n; ++k) {
        const double kval = kTwoPi * k / n;
        out.E_k(k) = s.h_z - 2.0 * dev.j0 * std::cos(kval + drv.phi);
        out.tilde_E_k(k) = out.E_k(k) - 0.5 * shift;
    }
    out.tilde_E_0 = -shift;

    const Vector vac = ground_state(dev);
    const Vector k0 = chiral_state(0, dev);
    out.tilde_ground = (vac - eta * k0).normalized();
    out.tilde_k_states.resize(vac.size(), n);
    for (int k = 0; k < n; ++k) {
        Vector v = chiral_state(k, dev);
        if (k == 0) v += eta * vac;
        out.tilde_k_states.col(k) = v.normalized();
    }
    return out;
}

}  // namespace qring
