#include <catch2/catch_amalgamated.hpp>

#include "qring/model.hpp"

using namespace qring;

namespace {
DeviceParams paper_device() {
    DeviceParams d;  // defaults are the paper set
    return d;
}
}  // namespace

TEST_CASE("validate accepts the paper parameter set") {
    const ValidationReport rep = validate(paper_device());
    REQUIRE(rep.ok);
    CHECK(rep.all_pass());
    CHECK(rep.warnings.empty());
}

TEST_CASE("validate flags each hierarchy link") {
    DeviceParams d = paper_device();
    d.deltas = {0.01, -0.01, 0.02};
    const ValidationReport rep = validate(d);
    // Delta/g, g/|delta|, |delta|/J0, J0/kappa, kappa/gamma, gamma/gamma_phi
    REQUIRE(rep.checks.size() == 6);
    CHECK(rep.all_pass());
}

TEST_CASE("hierarchy violations warn but do not abort") {
    DeviceParams d = paper_device();
    d.j0 = 0.09;  // g/J0 = 1.1 < 3
    const ValidationReport rep = validate(d);
    REQUIRE(rep.ok);
    CHECK_FALSE(rep.all_pass());
    CHECK_FALSE(rep.warnings.empty());
}

TEST_CASE("hard parameter errors") {
    DeviceParams d = paper_device();
    d.gamma = 0.0;
    CHECK_THROWS_AS(validate(d), InvalidParameter);

    d = paper_device();
    d.n_sites = 2;
    CHECK_THROWS_AS(validate(d), InvalidParameter);

    d = paper_device();
    d.kappa = -1e-4;
    CHECK_THROWS_AS(validate(d), InvalidParameter);

    d = paper_device();
    d.omega_q = 5.0;  // below omega_c
    CHECK_THROWS_AS(validate(d), InvalidParameter);

    d = paper_device();
    d.g = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(validate(d), InvalidParameter);

    d = paper_device();
    d.n_sites = 13;
    CHECK_THROWS_AS(validate(d), InvalidParameter);
}

TEST_CASE("derived scales at the paper point, eps_d = 0") {
    DriveParams drv;
    drv.omega_d = 6.5;
    drv.eps_d = 0.0;
    const DerivedScales s = derived_scales(paper_device(), drv);
    CHECK(s.delta == 1.0);
    CHECK(s.delta_q == 0.5);
    CHECK(s.delta_c == 0.5);
    CHECK_THAT(s.lamb_shift, Catch::Matchers::WithinAbs(0.01, 1e-15));
    CHECK(s.h_x == 0.0);
    CHECK(std::abs(s.a_bar) == 0.0);
}

TEST_CASE("derived scales at the paper point, eps_d = 0.05") {
    DriveParams drv;
    drv.omega_d = 6.5;
    drv.eps_d = 0.05;
    const DerivedScales s = derived_scales(paper_device(), drv);
    // direct evaluation of the quoted formulas
    CHECK_THAT(s.lamb_shift, Catch::Matchers::WithinAbs(0.0103, 1e-12));
    CHECK_THAT(s.omega_d_bar, Catch::Matchers::WithinAbs(6.5051875, 1e-9));
    CHECK_THAT(s.h_x, Catch::Matchers::WithinAbs(2.0 * 0.1 * 0.05, 1e-15));
    CHECK_THAT(s.h_z, Catch::Matchers::WithinAbs(0.5 + 0.0103, 1e-12));
}

TEST_CASE("detuning identity holds exactly") {
    auto omega = GENERATE(5.9, 6.2, 6.5, 6.5051875, 6.99);
    DriveParams drv;
    drv.omega_d = omega;
    drv.eps_d = 0.03;
    const DerivedScales s = derived_scales(paper_device(), drv);
    CHECK(s.delta_q + s.delta_c - s.delta == 0.0);
}

TEST_CASE("derived_scales is pure") {
    DriveParams drv;
    drv.omega_d = 6.4321;
    drv.eps_d = 0.0123;
    const DerivedScales a = derived_scales(paper_device(), drv);
    const DerivedScales b = derived_scales(paper_device(), drv);
    CHECK(a.lamb_shift == b.lamb_shift);
    CHECK(a.a_bar == b.a_bar);
    CHECK(a.omega_d_bar == b.omega_d_bar);
    CHECK(a.h_x == b.h_x);
    CHECK(a.h_z == b.h_z);
}

TEST_CASE("classical background bound |a_bar| <= eps_d/(kappa/2)") {
    DeviceParams dev = paper_device();
    DriveParams drv;
    drv.eps_d = 0.05;
    for (double w : {6.0, 6.00005, 6.2, 6.5}) {
        drv.omega_d = w;
        const DerivedScales s = derived_scales(dev, drv);
        CHECK(std::abs(s.a_bar) <= drv.eps_d / (dev.kappa / 2.0) * (1.0 + 1e-12));
    }
}

TEST_CASE("zero drive gives zero background and transverse field") {
    DriveParams drv;
    drv.omega_d = 6.7;
    drv.eps_d = 0.0;
    const DerivedScales s = derived_scales(paper_device(), drv);
    CHECK(s.a_bar == std::complex<double>(0.0, 0.0));
    CHECK(s.h_x == 0.0);
}

TEST_CASE("bare Schrieffer-Wolff shift at zero drive") {
    DeviceParams d = paper_device();
    DriveParams drv;
    drv.omega_d = 6.3;
    drv.eps_d = 0.0;
    const DerivedScales s = derived_scales(d, drv);
    const double r = d.g / (d.omega_q - d.omega_c);
    CHECK(s.lamb_shift == r * r * (d.omega_q - d.omega_c));
}

TEST_CASE("phase normalization") {
    CHECK(normalize_phase(0.0) == 0.0);
    CHECK_THAT(normalize_phase(kTwoPi + 0.5), Catch::Matchers::WithinAbs(0.5, 1e-15));
    CHECK_THAT(normalize_phase(-0.5), Catch::Matchers::WithinAbs(kTwoPi - 0.5, 1e-15));
    CHECK(normalize_phase(kTwoPi) == 0.0);
}

TEST_CASE("invalid drive amplitude") {
    DriveParams drv;
    drv.eps_d = -0.1;
    CHECK_THROWS_AS(derived_scales(paper_device(), drv), InvalidParameter);
}
