#pragma once

#include <Eigen/Dense>
#include <complex>

#include "qring/errors.hpp"
#include "qring/model.hpp"

namespace qring {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

// Basis convention for the 2^N qubit Hilbert space: site i maps to bit i
// (site 0 = least significant bit), bit value 1 = |up>, basis index
// sum_i b_i 2^i. Index 0 is the all-down state |0...0>.

enum class Pauli { X, Y, Z, Plus, Minus };

namespace detail {
inline void check_sites(int n_sites) {
    if (n_sites < 1) throw InvalidParameter("n_sites must be >= 1");
    if (n_sites > kMaxSites) throw InvalidParameter("n_sites exceeds the dense-matrix limit of 12");
}
inline void check_ring(const DeviceParams& dev) {
    if (dev.n_sites < 3) throw InvalidParameter("ring operators need n_sites >= 3");
    check_sites(dev.n_sites);
}
}  // namespace detail

inline int hilbert_dim(int n_sites) {
    detail::check_sites(n_sites);
    return 1 << n_sites;
}

inline Matrix pauli_site(Pauli kind, int site, int n_sites) {
    detail::check_sites(n_sites);
    if (site < 0 || site >= n_sites) throw IndexOutOfRange("pauli_site: site index out of range");
    const int dim = 1 << n_sites;
    const int mask = 1 << site;
    Matrix m = Matrix::Zero(dim, dim);
    for (int b = 0; b < dim; ++b) {
        const bool up = (b & mask) != 0;
        switch (kind) {
            case Pauli::Z:
                m(b, b) = up ? 1.0 : -1.0;
                break;
            case Pauli::X:
                m(b ^ mask, b) = 1.0;
                break;
            case Pauli::Y:
                // sigma^y = -i sigma^+ + i sigma^-
                m(b ^ mask, b) = up ? Complex(0.0, 1.0) : Complex(0.0, -1.0);
                break;
            case Pauli::Plus:
                if (!up) m(b | mask, b) = 1.0;
                break;
            case Pauli::Minus:
                if (up) m(b & ~mask, b) = 1.0;
                break;
        }
    }
    return m;
}

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline bool is_hermitian(const Matrix& m, double rel_tol = 1e-12) {
    const double scale = max_abs(m);
    if (scale == 0.0) return true;
    return max_abs(m - m.adjoint()) < rel_tol * scale;
}

// Effective rotating-frame qubit Hamiltonian on the full 2^N space:
//   H = sum_i [h_x sx_i/2 + h_z sz_i/2]
//       - J0 sum_i [e^{i phi} s+_i s-_{i+1} + h.c.]     (periodic, i+1 mod N)
inline Matrix build_h_sigma(const DeviceParams& dev, const DriveParams& drv) {
    detail::check_ring(dev);
    const DerivedScales s = derived_scales(dev, drv);
    const int n = dev.n_sites;
    const int dim = 1 << n;
    const Complex hop = -dev.j0 * std::exp(Complex(0.0, drv.phi));

    Matrix h = Matrix::Zero(dim, dim);
    for (int b = 0; b < dim; ++b) {
        const int ups = __builtin_popcount(static_cast<unsigned>(b));
        h(b, b) = 0.5 * s.h_z * (2 * ups - n);
        for (int i = 0; i < n; ++i) {
            const int bi = 1 << i;
            const int bj = 1 << ((i + 1) % n);
            // transverse drive
            h(b ^ bi, b) += 0.5 * s.h_x;
            // hop excitation from site i+1 to site i (amplitude -J0 e^{i phi})
            if ((b & bj) && !(b & bi)) h((b & ~bj) | bi, b) += hop;
            // hermitian conjugate: site i to site i+1
            if ((b & bi) && !(b & bj)) h((b & ~bi) | bj, b) += std::conj(hop);
        }
    }
    return h;
}

// Bond current operator I_bond = -i J0 [e^{i phi} s+_b s-_{b+1} - h.c.];
// Hermitian and traceless.
inline Matrix build_current_op(int bond, const DeviceParams& dev, const DriveParams& drv) {
    detail::check_ring(dev);
    if (bond < 0 || bond >= dev.n_sites)
        throw IndexOutOfRange("build_current_op: bond index out of range");
    const int n = dev.n_sites;
    const int dim = 1 << n;
    const Complex amp = Complex(0.0, -1.0) * dev.j0 * std::exp(Complex(0.0, drv.phi));

    Matrix m = Matrix::Zero(dim, dim);
    const int bi = 1 << bond;
    const int bj = 1 << ((bond + 1) % n);
    for (int b = 0; b < dim; ++b) {
        if ((b & bj) && !(b & bi)) m((b & ~bj) | bi, b) += amp;
        if ((b & bi) && !(b & bj)) m((b & ~bi) | bj, b) += std::conj(amp);
    }
    return m;
}

// Chiral single-excitation plane wave |k> = 1/sqrt(N) sum_i e^{i k i} |i>
// with k = 2 pi n / N.
inline Vector chiral_state(int n_index, const DeviceParams& dev) {
    detail::check_ring(dev);
    const int n = dev.n_sites;
    if (n_index < 0 || n_index >= n) throw IndexOutOfRange("chiral_state: momentum index out of range");
    const int dim = 1 << n;
    const double k = kTwoPi * n_index / n;
    Vector v = Vector::Zero(dim);
    const double norm = 1.0 / std::sqrt(static_cast<double>(n));
    for (int i = 0; i < n; ++i) v(1 << i) = norm * std::exp(Complex(0.0, k * i));
    return v;
}

inline Vector ground_state(const DeviceParams& dev) {
    detail::check_ring(dev);
    Vector v = Vector::Zero(1 << dev.n_sites);
    v(0) = 1.0;
    return v;
}

// One-site ring translation (site j -> j+1). Commutes with build_h_sigma for
// every phi and drive: the effective model is translationally invariant.
inline Matrix translation_op(int n_sites) {
    detail::check_sites(n_sites);
    const int dim = 1 << n_sites;
    const int mask = dim - 1;
    Matrix t = Matrix::Zero(dim, dim);
    for (int b = 0; b < dim; ++b) {
        const int rotated = ((b << 1) | (b >> (n_sites - 1))) & mask;
        t(rotated, b) = 1.0;
    }
    return t;
}

// Diagonal excitation-number operator sum_i (sz_i + 1)/2.
inline Matrix number_op(int n_sites) {
    detail::check_sites(n_sites);
    const int dim = 1 << n_sites;
    Matrix m = Matrix::Zero(dim, dim);
    for (int b = 0; b < dim; ++b) m(b, b) = __builtin_popcount(static_cast<unsigned>(b));
    return m;
}

}  // namespace qring
