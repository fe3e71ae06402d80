#pragma once

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <cmath>
#include <vector>

#include "qring/errors.hpp"
#include "qring/operators.hpp"
#include "qring/rates.hpp"
#include "qring/spectrum.hpp"

namespace qring {

struct DensityCheck {
    double trace_err = 0.0;
    double hermiticity_err = 0.0;
    double min_eigenvalue = 0.0;
};

inline DensityCheck check_density_matrix(const Matrix& rho) {
    DensityCheck c;
    c.trace_err = std::abs(rho.trace() - Complex(1.0, 0.0));
    c.hermiticity_err = max_abs(rho - rho.adjoint());
    Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix(0.5 * (rho + rho.adjoint())));
    c.min_eigenvalue = es.eigenvalues().minCoeff();
    return c;
}

// Lindblad generator in column-stacked vectorized form,
//   L(rho) = -i [H, rho] + sum_X ( X rho X^+ - {X^+ X, rho}/2 ),
// acting on vec(rho) as a dense 4^N x 4^N matrix.
struct Liouvillian {
    Matrix mat;
    int dim = 0;  // Hilbert-space dimension (mat is dim^2 x dim^2)
};

namespace detail {
inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (int i = 0; i < a.rows(); ++i)
        for (int j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}
}  // namespace detail

// jumps carry their rate; the Lindblad operator used is sqrt(rate) * op.
inline Liouvillian build_liouvillian(const Matrix& h, const std::vector<JumpOp>& jumps) {
    const int dim = static_cast<int>(h.rows());
    if (h.cols() != dim) throw DimensionMismatch("build_liouvillian: H must be square");
    if (!is_hermitian(h)) throw NotHermitian("build_liouvillian: H is not Hermitian");

    const Matrix id = Matrix::Identity(dim, dim);
    Liouvillian l;
    l.dim = dim;
    l.mat = Complex(0.0, -1.0) * (detail::kron(id, h) - detail::kron(h.transpose(), id));
    for (const auto& j : jumps) {
        if (j.op.rows() != dim || j.op.cols() != dim)
            throw DimensionMismatch("build_liouvillian: jump operator dimension mismatch");
        if (j.rate == 0.0) continue;
        if (!(j.rate > 0.0) || !std::isfinite(j.rate))
            throw InvalidParameter("build_liouvillian: jump rate must be finite and >= 0");
        const Matrix x = std::sqrt(j.rate) * j.op;
        const Matrix xdx = x.adjoint() * x;
        l.mat += detail::kron(x.conjugate(), x);
        l.mat -= 0.5 * (detail::kron(id, xdx) + detail::kron(xdx.transpose(), id));
    }
    return l;
}

inline Vector vectorize(const Matrix& rho) {
    return Eigen::Map<const Vector>(rho.data(), rho.size());
}

inline Matrix unvectorize(const Vector& v, int dim) {
    return Eigen::Map<const Matrix>(v.data(), dim, dim);
}

struct SteadyStateSolution {
    Matrix rho;
    double residual = 0.0;  // ||L vec(rho)||_max / ||L||_max
    DensityCheck check;
};

// Steady state as the null space of the Liouvillian: smallest singular vector,
// Hermitized and trace-normalized. Positivity is never repaired silently;
// violations beyond -1e-8 raise SolverFailure.
inline SteadyStateSolution steady_state_nullspace(const Liouvillian& l) {
    const int d2 = static_cast<int>(l.mat.rows());
    Eigen::BDCSVD<Matrix> svd(l.mat, Eigen::ComputeFullV);
    const auto& sv = svd.singularValues();
    const double smax = sv(0);
    if (smax == 0.0) throw DegenerateSteadyState("steady_state_nullspace: zero Liouvillian");
    if (d2 >= 2 && sv(d2 - 2) < 1e-10 * smax)
        throw DegenerateSteadyState("steady_state_nullspace: numerical null space dimension > 1");

    Matrix rho = unvectorize(svd.matrixV().col(d2 - 1), l.dim);
    rho = 0.5 * (rho + rho.adjoint());
    const Complex tr = rho.trace();
    if (std::abs(tr) < 1e-12) throw SolverFailure("steady_state_nullspace: traceless null vector");
    rho /= tr;

    SteadyStateSolution sol;
    sol.rho = rho;
    const double l_scale = max_abs(l.mat);
    sol.residual = (l.mat * vectorize(rho)).cwiseAbs().maxCoeff() / l_scale;
    if (sol.residual > 1e-10)
        throw SolverFailure("steady_state_nullspace: residual " + std::to_string(sol.residual) +
                            " exceeds 1e-10");
    sol.check = check_density_matrix(rho);
    if (sol.check.min_eigenvalue < -1e-8)
        throw SolverFailure("steady_state_nullspace: negative population beyond -1e-8");
    return sol;
}

struct RateSolution {
    Eigen::VectorXd populations;  // over eigenstates, sums to 1
    double residual = 0.0;        // ||W p||_inf on the scaled generator
};

// Total directed rate matrix of the secular (Davies) master equation:
// pump rates plus decay gamma sum_i |<n|s-_i|m>|^2 and dephasing
// (gamma_phi/2) sum_i |<n|sz_i|m>|^2 between distinct eigenstates.
inline RateMatrix total_rate_matrix(const EigenSystem& eig, const RateMatrix& pump,
                                    const DeviceParams& dev) {
    const int dim = eig.dim();
    if (pump.rows() != dim || pump.cols() != dim)
        throw DimensionMismatch("total_rate_matrix: pump matrix dimension mismatch");
    RateMatrix r = pump;
    Eigen::MatrixXd decay = Eigen::MatrixXd::Zero(dim, dim);
    Eigen::MatrixXd dephase = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < dev.n_sites; ++i) {
        const Matrix sm = eig.states.adjoint() * pauli_site(Pauli::Minus, i, dev.n_sites) * eig.states;
        const Matrix sz = eig.states.adjoint() * pauli_site(Pauli::Z, i, dev.n_sites) * eig.states;
        decay += sm.cwiseAbs2();
        dephase += sz.cwiseAbs2();
    }
    for (int m = 0; m < dim; ++m)
        for (int n = 0; n < dim; ++n) {
            if (m == n) continue;
            r(m, n) += dev.gamma * decay(n, m) + 0.5 * dev.gamma_phi * dephase(n, m);
        }
    r.diagonal().setZero();
    return r;
}

// Solves W p = 0, sum(p) = 1 for the classical generator W built from the
// directed rates. Raises DegenerateSteadyState when the stationary
// distribution is not unique.
inline RateSolution steady_state_rate_equation(const EigenSystem& eig, const RateMatrix& pump,
                                               const DeviceParams& dev) {
    const int dim = eig.dim();
    const RateMatrix rates = total_rate_matrix(eig, pump, dev);

    Eigen::MatrixXd w = Eigen::MatrixXd::Zero(dim, dim);
    for (int m = 0; m < dim; ++m)
        for (int n = 0; n < dim; ++n) {
            if (m == n) continue;
            w(n, m) += rates(m, n);
            w(m, m) -= rates(m, n);
        }
    const double scale = w.cwiseAbs().maxCoeff();
    if (scale == 0.0)
        throw SingularRateGraph("steady_state_rate_equation: all rates vanish");
    const Eigen::MatrixXd ws = w / scale;

    {
        Eigen::JacobiSVD<Eigen::MatrixXd> svd(ws);
        const auto& sv = svd.singularValues();
        int nullity = 0;
        for (int i = 0; i < dim; ++i)
            if (sv(i) < 1e-12 * sv(0) * dim) ++nullity;
        if (nullity > 1)
            throw DegenerateSteadyState("steady_state_rate_equation: stationary distribution not unique");
        if (nullity == 0 && sv(dim - 1) > 1e-6 * sv(0))
            throw SingularRateGraph("steady_state_rate_equation: generator has no stationary state");
    }

    Eigen::MatrixXd a(dim + 1, dim);
    a.topRows(dim) = ws;
    a.bottomRows(1).setOnes();
    Eigen::VectorXd b = Eigen::VectorXd::Zero(dim + 1);
    b(dim) = 1.0;
    Eigen::VectorXd p = a.colPivHouseholderQr().solve(b);

    RateSolution sol;
    sol.populations = p;
    sol.residual = (ws * p).cwiseAbs().maxCoeff();
    if (p.minCoeff() < -1e-12)
        throw SolverFailure("steady_state_rate_equation: negative population beyond -1e-12");
    if (std::abs(p.sum() - 1.0) > 1e-10)
        throw SolverFailure("steady_state_rate_equation: populations do not sum to 1");
    return sol;
}

struct Trajectory {
    std::vector<double> times;
    std::vector<Matrix> states;
};

// Fourth-order Runge-Kutta integration of d vec(rho)/dt = L vec(rho).
// Samples the trajectory every `stride` steps (always includes t_final).
inline Trajectory time_evolve(const Matrix& rho0, const Liouvillian& l, double t_final, double dt,
                              int stride = 0) {
    if (rho0.rows() != l.dim || rho0.cols() != l.dim)
        throw DimensionMismatch("time_evolve: state dimension mismatch");
    if (!(dt > 0.0) || !(t_final >= 0.0)) throw InvalidParameter("time_evolve: bad time step");
    // max total rate per row bounds the stiffest decay/oscillation scale
    const double max_rate = l.mat.cwiseAbs().rowwise().sum().maxCoeff();
    if (dt * max_rate >= 0.1)
        throw StepSizeTooLarge("time_evolve: dt * max rate = " + std::to_string(dt * max_rate) +
                               " >= 0.1");

    const long n_steps = static_cast<long>(std::ceil(t_final / dt - 1e-12));
    if (stride <= 0) stride = static_cast<int>(std::max(1L, n_steps / 200));

    Trajectory traj;
    Vector v = vectorize(rho0);
    traj.times.push_back(0.0);
    traj.states.push_back(rho0);
    double t = 0.0;
    for (long step = 0; step < n_steps; ++step) {
        const double h = std::min(dt, t_final - t);
        const Vector k1 = l.mat * v;
        const Vector k2 = l.mat * (v + 0.5 * h * k1);
        const Vector k3 = l.mat * (v + 0.5 * h * k2);
        const Vector k4 = l.mat * (v + h * k3);
        v += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
        if ((step + 1) % stride == 0 || step + 1 == n_steps) {
            Matrix rho = unvectorize(v, l.dim);
            const double trace_err = std::abs(rho.trace() - Complex(1.0, 0.0));
            if (trace_err > 1e-8)
                throw SolverFailure("time_evolve: trace drift " + std::to_string(trace_err));
            traj.times.push_back(t);
            traj.states.push_back(std::move(rho));
        }
    }
    return traj;
}

}  // namespace qring
