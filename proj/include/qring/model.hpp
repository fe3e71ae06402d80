#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>
#include <vector>

#include "qring/errors.hpp"

namespace qring {

// All angular frequencies and rates are stored in units of 2*pi GHz, i.e. the
// bare numbers as they appear in typical circuit-QED parameter tables. The
// single conversion constant below is the only place where SI enters.
inline constexpr double kNaturalToPerSecond = 2.0 * M_PI * 1e9;

inline constexpr double kTwoPi = 2.0 * M_PI;

// Largest ring the dense-matrix backend accepts (2^12 = 4096 states).
inline constexpr int kMaxSites = 12;

struct DeviceParams {
    int n_sites = 3;
    double omega_q = 7.0;     // qubit base splitting
    double omega_c = 6.0;     // cavity base frequency
    double g = 0.1;           // Rabi coupling
    double j0 = 1e-3;         // hopping amplitude
    double kappa = 1e-4;      // cavity damping
    double gamma = 1e-5;      // qubit decay
    double gamma_phi = 1e-6;  // qubit dephasing
    // Per-site offsets delta_i. Only used by validate(): the effective
    // rotating-frame model is translationally invariant.
    std::vector<double> deltas;
    double hierarchy_factor = 3.0;
};

struct DriveParams {
    double omega_d = 6.5;  // cavity microwave drive frequency
    double phi = 0.0;      // coupler phase, normalized into [0, 2pi)
    double eps_d = 0.05;   // drive amplitude (uniform over sites)
};

inline double normalize_phase(double phi) {
    double p = std::fmod(phi, kTwoPi);
    if (p < 0.0) p += kTwoPi;
    // fmod can return 2pi - epsilon rounding back up to 2pi
    if (p >= kTwoPi) p = 0.0;
    return p;
}

struct HierarchyCheck {
    std::string label;  // e.g. "Delta >> g"
    double ratio = 0.0;
    bool pass = false;
};

struct ValidationReport {
    bool ok = true;  // false only for hard errors (throws happen instead)
    std::vector<HierarchyCheck> checks;
    std::vector<std::string> warnings;

    bool all_pass() const {
        for (const auto& c : checks)
            if (!c.pass) return false;
        return true;
    }
};

namespace detail {
inline void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw InvalidParameter(std::string(name) + " must be finite");
}
inline void require_positive(double v, const char* name) {
    require_finite(v, name);
    if (v <= 0.0) throw InvalidParameter(std::string(name) + " must be strictly positive");
}
}  // namespace detail

// Checks hard invariants (throws InvalidParameter) and reports the frequency
// hierarchy Delta >> g >> |delta_i| >> J0 >> kappa >> gamma >> gamma_phi as
// pass/warn entries. A failed ratio is a warning, not an error.
inline ValidationReport validate(const DeviceParams& d) {
    if (d.n_sites < 3)
        throw InvalidParameter("n_sites must be >= 3 (a ring with flux needs >= 3 bonds)");
    if (d.n_sites > kMaxSites)
        throw InvalidParameter("n_sites exceeds the dense-matrix limit of 12");
    detail::require_finite(d.omega_q, "omega_q");
    detail::require_finite(d.omega_c, "omega_c");
    detail::require_positive(d.g, "g");
    detail::require_positive(d.j0, "j0");
    detail::require_positive(d.kappa, "kappa");
    detail::require_positive(d.gamma, "gamma");
    detail::require_positive(d.gamma_phi, "gamma_phi");
    if (!(d.omega_q > d.omega_c)) throw InvalidParameter("omega_q must exceed omega_c");
    if (!std::isfinite(d.hierarchy_factor) || d.hierarchy_factor <= 1.0)
        throw InvalidParameter("hierarchy_factor must be > 1");
    for (double dl : d.deltas) detail::require_finite(dl, "deltas[i]");
    if (!d.deltas.empty() && static_cast<int>(d.deltas.size()) != d.n_sites)
        throw InvalidParameter("deltas must be empty or have one entry per site");

    ValidationReport rep;
    const double f = d.hierarchy_factor;
    auto check = [&](const std::string& label, double hi, double lo) {
        HierarchyCheck c;
        c.label = label;
        c.ratio = lo > 0.0 ? hi / lo : std::numeric_limits<double>::infinity();
        c.pass = c.ratio >= f;
        rep.checks.push_back(c);
        if (!c.pass)
            rep.warnings.push_back("hierarchy ratio " + label + " = " + std::to_string(c.ratio) +
                                   " below factor " + std::to_string(f));
    };

    const double delta = d.omega_q - d.omega_c;
    check("Delta/g", delta, d.g);
    if (!d.deltas.empty()) {
        double amax = 0.0, amin = std::numeric_limits<double>::infinity();
        for (double dl : d.deltas) {
            amax = std::max(amax, std::abs(dl));
            amin = std::min(amin, std::abs(dl));
        }
        check("g/|delta_i|max", d.g, amax);
        check("|delta_i|min/J0", amin, d.j0);
        // adjacent-site splittings drive the couplers; equal offsets give
        // Delta_i = 0 which cannot be matched by a time-dependent coupler
        for (int i = 0; i < d.n_sites; ++i) {
            const double di = d.deltas[i] - d.deltas[(i + 1) % d.n_sites];
            if (di == 0.0)
                rep.warnings.push_back("delta_" + std::to_string(i) + " - delta_" +
                                       std::to_string((i + 1) % d.n_sites) +
                                       " = 0: coupler drive frequency would vanish");
        }
    } else {
        check("g/J0", d.g, d.j0);
    }
    check("J0/kappa", d.j0, d.kappa);
    check("kappa/gamma", d.kappa, d.gamma);
    check("gamma/gamma_phi", d.gamma, d.gamma_phi);
    rep.ok = true;
    return rep;
}

struct DerivedScales {
    double delta = 0.0;       // Delta   = omega_q - omega_c
    double delta_q = 0.0;     // Delta_q = omega_q - omega_d
    double delta_c = 0.0;     // Delta_c = omega_d - omega_c
    double lamb_shift = 0.0;  // drive-renormalized Lamb shift
    std::complex<double> a_bar{0.0, 0.0};
    double h_x = 0.0;
    double h_z = 0.0;
    double omega_d_bar = 0.0;
};

// Pure function of (device, drive); identical inputs give bit-identical
// outputs.
inline DerivedScales derived_scales(const DeviceParams& dev, const DriveParams& drv) {
    detail::require_finite(drv.omega_d, "omega_d");
    detail::require_finite(drv.eps_d, "eps_d");
    if (drv.eps_d < 0.0) throw InvalidParameter("eps_d must be >= 0");

    DerivedScales s;
    s.delta = dev.omega_q - dev.omega_c;
    s.delta_q = dev.omega_q - drv.omega_d;
    s.delta_c = drv.omega_d - dev.omega_c;

    const double r = dev.g / s.delta;
    const double eps = drv.eps_d;
    s.lamb_shift = r * r * s.delta * (1.0 + 12.0 * (eps / s.delta) * (eps / s.delta));

    const std::complex<double> den(s.delta_c, dev.kappa / 2.0);
    if (std::abs(den) == 0.0)
        throw DegenerateDrive("omega_d = omega_c with kappa = 0: classical background diverges");
    s.a_bar = eps / den;

    s.h_x = 2.0 * r * eps;
    s.h_z = s.delta_q + s.lamb_shift;
    s.omega_d_bar =
        0.5 * (dev.omega_c + dev.omega_q + s.lamb_shift + r * r * dev.n_sites * eps * eps / s.delta);
    return s;
}

}  // namespace qring
