#include <catch2/catch_amalgamated.hpp>

#include "qring/model.hpp"
#include "qring/operators.hpp"

using namespace qring;

namespace {
DeviceParams ring(int n = 3) {
    DeviceParams d;
    d.n_sites = n;
    return d;
}

DriveParams drive(double omega_d, double phi, double eps_d) {
    DriveParams drv;
    drv.omega_d = omega_d;
    drv.phi = phi;
    drv.eps_d = eps_d;
    return drv;
}
}  // namespace

TEST_CASE("single-qubit sigma_z with |down> at index 0") {
    const Matrix z = pauli_site(Pauli::Z, 0, 1);
    CHECK(z(0, 0) == Complex(-1.0, 0.0));
    CHECK(z(1, 1) == Complex(1.0, 0.0));
    CHECK(z(0, 1) == Complex(0.0, 0.0));
}

TEST_CASE("sigma_plus raises the site bit") {
    // |downdown> = index 0 -> |up at site 0> = index 1
    const Matrix p = pauli_site(Pauli::Plus, 0, 2);
    Vector v = Vector::Zero(4);
    v(0) = 1.0;
    const Vector w = p * v;
    CHECK(std::abs(w(1) - Complex(1.0, 0.0)) < 1e-15);
    CHECK(w.cwiseAbs().sum() == 1.0);

    const Matrix p1 = pauli_site(Pauli::Plus, 1, 2);
    const Vector w1 = p1 * v;
    CHECK(std::abs(w1(2) - Complex(1.0, 0.0)) < 1e-15);
}

TEST_CASE("Pauli algebra: s+s- + s-s+ = identity") {
    for (int site = 0; site < 3; ++site) {
        const Matrix p = pauli_site(Pauli::Plus, site, 3);
        const Matrix m = pauli_site(Pauli::Minus, site, 3);
        const Matrix sum = p * m + m * p;
        CHECK(max_abs(sum - Matrix::Identity(8, 8)) < 1e-15);
    }
}

TEST_CASE("sigma^x,y,z from ladder operators") {
    for (int site = 0; site < 2; ++site) {
        const Matrix p = pauli_site(Pauli::Plus, site, 2);
        const Matrix m = pauli_site(Pauli::Minus, site, 2);
        CHECK(max_abs(pauli_site(Pauli::X, site, 2) - (p + m)) < 1e-15);
        CHECK(max_abs(pauli_site(Pauli::Y, site, 2) -
                      (Complex(0, -1) * p + Complex(0, 1) * m)) < 1e-15);
        CHECK(max_abs(pauli_site(Pauli::Z, site, 2) - (p * m - m * p)) < 1e-15);
    }
}

TEST_CASE("site index bounds") {
    CHECK_THROWS_AS(pauli_site(Pauli::X, 3, 3), IndexOutOfRange);
    CHECK_THROWS_AS(pauli_site(Pauli::X, -1, 3), IndexOutOfRange);
    CHECK_THROWS_AS(build_current_op(3, ring(3), drive(6.5, 0.1, 0.0)), IndexOutOfRange);
    CHECK_THROWS_AS(chiral_state(5, ring(3)), IndexOutOfRange);
}

TEST_CASE("H_sigma is Hermitian") {
    auto phi = GENERATE(0.0, 0.3, M_PI / 3, 1.9, 5.5);
    const Matrix h = build_h_sigma(ring(3), drive(6.5, phi, 0.05));
    CHECK(max_abs(h - h.adjoint()) < 1e-12 * max_abs(h));
}

TEST_CASE("J0 = 0, eps_d = 0 gives a diagonal Zeeman Hamiltonian") {
    DeviceParams dev = ring(3);
    dev.j0 = 0.0;  // decoupled qubits
    const DriveParams drv = drive(6.5, 0.7, 0.0);
    const DerivedScales s = derived_scales(dev, drv);
    const Matrix h = build_h_sigma(dev, drv);
    CHECK(max_abs(Matrix(h - Matrix(h.diagonal().asDiagonal()))) == 0.0);
    for (int b = 0; b < 8; ++b) {
        const int ups = __builtin_popcount(static_cast<unsigned>(b));
        const int downs = 3 - ups;
        CHECK_THAT(std::real(h(b, b)), Catch::Matchers::WithinAbs(0.5 * s.h_z * (ups - downs), 1e-14));
    }
}

TEST_CASE("phi -> phi + 2pi gives the identical matrix") {
    const Matrix a = build_h_sigma(ring(3), drive(6.5, 0.37, 0.05));
    const Matrix b = build_h_sigma(ring(3), drive(6.5, 0.37 + kTwoPi, 0.05));
    CHECK(max_abs(a - b) < 1e-12 * max_abs(a));
}

TEST_CASE("complex conjugation of H(phi) equals H(-phi)") {
    auto phi = GENERATE(0.2, 1.1, 2.7);
    const Matrix a = build_h_sigma(ring(3), drive(6.5, phi, 0.05));
    const Matrix b = build_h_sigma(ring(3), drive(6.5, -phi, 0.05));
    CHECK(max_abs(a.conjugate() - b) < 1e-12 * max_abs(a));
}

TEST_CASE("hopping conserves total excitation number") {
    // [sum_i sz_i, hopping part] = 0; the drive term is the only offender
    const DeviceParams dev = ring(4);
    const Matrix h0 = build_h_sigma(dev, drive(6.5, 0.9, 0.0));
    Matrix sz_tot = Matrix::Zero(16, 16);
    for (int i = 0; i < 4; ++i) sz_tot += pauli_site(Pauli::Z, i, 4);
    CHECK(max_abs(h0 * sz_tot - sz_tot * h0) < 1e-13);
}

TEST_CASE("current operators are Hermitian and traceless") {
    const DeviceParams dev = ring(3);
    const DriveParams drv = drive(6.5, 1.234, 0.05);
    for (int b = 0; b < 3; ++b) {
        const Matrix cur = build_current_op(b, dev, drv);
        CHECK(max_abs(cur - cur.adjoint()) < 1e-14);
        CHECK(std::abs(cur.trace()) < 1e-14);
    }
}

TEST_CASE("chiral state at k = 0 is the uniform single-excitation superposition") {
    const Vector v = chiral_state(0, ring(3));
    const double c = 1.0 / std::sqrt(3.0);
    CHECK(std::abs(v(1) - Complex(c, 0)) < 1e-15);
    CHECK(std::abs(v(2) - Complex(c, 0)) < 1e-15);
    CHECK(std::abs(v(4) - Complex(c, 0)) < 1e-15);
    CHECK(std::abs(v.norm() - 1.0) < 1e-15);
}

TEST_CASE("chiral states are orthonormal") {
    const DeviceParams dev = ring(3);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) {
            const Complex ov = chiral_state(a, dev).dot(chiral_state(b, dev));
            CHECK(std::abs(ov - (a == b ? 1.0 : 0.0)) < 1e-14);
        }
}

TEST_CASE("chiral states diagonalize H at zero drive") {
    // H |k> = E_k |k> with E_k = h_z - 2 J0 cos(k + phi), relative to the
    // vacuum energy -N h_z / 2
    const DeviceParams dev = ring(3);
    auto phi = GENERATE(0.15, 1.0, 2.2);
    const DriveParams drv = drive(6.5, phi, 0.0);
    const DerivedScales s = derived_scales(dev, drv);
    const Matrix h = build_h_sigma(dev, drv);
    const double e_vac = -1.5 * s.h_z;
    for (int k = 0; k < 3; ++k) {
        const Vector v = chiral_state(k, dev);
        const double ek = s.h_z - 2.0 * dev.j0 * std::cos(kTwoPi * k / 3.0 + phi);
        CHECK((h * v - (e_vac + ek) * v).cwiseAbs().maxCoeff() < 1e-12);
    }
}

TEST_CASE("current expectation in a chiral state matches (2J0/N) sin(k+phi)") {
    const DeviceParams dev = ring(3);
    auto phi = GENERATE(0.3, 1.4, 4.0);
    const DriveParams drv = drive(6.5, phi, 0.0);
    for (int k = 0; k < 3; ++k) {
        const Vector v = chiral_state(k, dev);
        for (int b = 0; b < 3; ++b) {
            const Complex expect = v.dot(build_current_op(b, dev, drv) * v);
            const double analytic = 2.0 * dev.j0 / 3.0 * std::sin(kTwoPi * k / 3.0 + phi);
            CHECK_THAT(expect.real(), Catch::Matchers::WithinAbs(analytic, 1e-14));
            CHECK(std::abs(expect.imag()) < 1e-14);
        }
    }
}

TEST_CASE("no current in the vacuum or in real-amplitude states at phi = 0") {
    const DeviceParams dev = ring(3);
    const DriveParams drv = drive(6.5, 0.0, 0.0);
    const Vector vac = ground_state(dev);
    for (int b = 0; b < 3; ++b)
        CHECK(std::abs(vac.dot(build_current_op(b, dev, drv) * vac)) < 1e-15);

    // any real-amplitude state: time-reversal invariant Hamiltonian
    Vector v = Vector::Zero(8);
    v(1) = 0.6;
    v(2) = -0.3;
    v(6) = 0.742;
    v.normalize();
    for (int b = 0; b < 3; ++b)
        CHECK(std::abs(std::real(v.dot(build_current_op(b, dev, drv) * v))) < 1e-14);
}

TEST_CASE("gauge rotation shifts phi by 2pi/N at zero drive") {
    // U sz U^+ diagonal gauge with angle 2 pi j / N on site j maps
    // H(phi) -> H(phi - 2pi/N); its inverse realizes phi -> phi + 2pi/N.
    // The sigma^x drive is not gauge covariant, so this is exact at eps_d = 0.
    const DeviceParams dev = ring(3);
    const int dim = 8;
    Matrix gauge = Matrix::Zero(dim, dim);
    for (int b = 0; b < dim; ++b) {
        double angle = 0.0;
        for (int j = 0; j < 3; ++j)
            if (b & (1 << j)) angle += kTwoPi * j / 3.0;
        gauge(b, b) = std::exp(Complex(0.0, -angle));
    }
    auto phi = GENERATE(0.3, 1.9);
    const Matrix h = build_h_sigma(dev, drive(6.5, phi, 0.0));
    const Matrix h_shift = build_h_sigma(dev, drive(6.5, phi + kTwoPi / 3.0, 0.0));
    CHECK(max_abs(Matrix(gauge * h * gauge.adjoint()) - h_shift) < 1e-12);
    // the current operator transforms identically
    const Matrix cur = build_current_op(0, dev, drive(6.5, phi, 0.0));
    const Matrix cur_shift = build_current_op(0, dev, drive(6.5, phi + kTwoPi / 3.0, 0.0));
    CHECK(max_abs(Matrix(gauge * cur * gauge.adjoint()) - cur_shift) < 1e-12);
}

TEST_CASE("translation operator commutes with H_sigma for any drive") {
    const DeviceParams dev = ring(3);
    const Matrix t = translation_op(3);
    auto phi = GENERATE(0.0, 0.8, 2.1);
    const Matrix h = build_h_sigma(dev, drive(6.5, phi, 0.05));
    CHECK(max_abs(h * t - t * h) < 1e-13);
    CHECK(max_abs(Matrix(t * t.adjoint()) - Matrix::Identity(8, 8)) < 1e-15);
}

TEST_CASE("size guard rejects oversized rings") {
    DeviceParams dev = ring(3);
    dev.n_sites = 13;
    CHECK_THROWS_AS(build_h_sigma(dev, drive(6.5, 0.0, 0.0)), InvalidParameter);
}
