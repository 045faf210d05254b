#pragma once

#include <cmath>
#include <memory>

#include "bil/eigensolver.hpp"
#include "bil/special_functions.hpp"
#include "bil/quadrature.hpp"

namespace bil {

// Closed-form Neumann mode of the rectangle [0,a] x [0,b]:
//   phi = c * cos(m pi x / a) cos(n pi y / b),  k = pi * hypot(m/a, n/b),
// with c chosen so the L2(Omega) norm equals norm_target exactly.
inline EigenMode square_mode(double a, double b, int m, int n, int npw = 12,
                             double norm_target = 1.0) {
    if (a <= 0.0 || b <= 0.0) throw Error("BadEdgeData", "rectangle sides must be positive");
    if (m < 0 || n < 0) throw Error("BadIndices", "mode indices must be nonnegative");
    if (m == 0 && n == 0) throw Error("BadIndices", "constant mode has k = 0");
    const double k = PI * std::hypot(m / a, n / b);
    const double c = norm_target * std::sqrt((m == 0 ? 1.0 : 2.0) * (n == 0 ? 1.0 : 2.0) / (a * b));

    EigenMode mode;
    mode.k = k;
    auto mesh = std::make_shared<BoundaryMesh>(build_mesh(make_rectangle(a, b), k, npw));
    mode.mesh = mesh;
    mode.trace.resize(mesh->size());
    for (int i = 0; i < mesh->size(); ++i) {
        const Vec2 p = mesh->nodes[i].pos;
        mode.trace[i] = c * std::cos(m * PI * p.x / a) * std::cos(n * PI * p.y / b);
    }
    apply_phase_gauge(mode.trace);
    mode.normalized = true;
    mode.provenance = "oracle";
    return mode;
}

// Closed-form Neumann mode of the unit disc:
//   phi = c * J_m(k r) e^{i m theta},  k = n-th positive root of J'_m,
// where for m = 0 the trivial root at zero is not counted (disc_mode(0, 1)
// has k ~ 3.8317).  The radial normalization integral int_0^1 J_m(kr)^2 r dr
// is evaluated by composite Gauss quadrature well below 1e-10 error.
inline EigenMode disc_mode(int m, int n_radial, int npw = 12, double norm_target = 1.0) {
    if (m < 0 || n_radial < 1) throw Error("BadIndices", "need m >= 0 and n_radial >= 1");
    const double k = jprime_zero(m, n_radial);

    const QuadRule& gl = gauss_legendre(16);
    const int panels = 8 * n_radial + 8 * (m / 4) + 8;
    double radial = 0.0;
    for (int p = 0; p < panels; ++p) {
        const double lo = static_cast<double>(p) / panels, hi = (p + 1.0) / panels;
        for (size_t g = 0; g < gl.x.size(); ++g) {
            const double r = 0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.x[g];
            const double w = 0.5 * (hi - lo) * gl.w[g];
            const double jm = bessel_j_ladder(m, k * r)[m];
            radial += w * jm * jm * r;
        }
    }
    const double c = norm_target / std::sqrt(2.0 * PI * radial);

    EigenMode mode;
    mode.k = k;
    auto mesh = std::make_shared<BoundaryMesh>(build_mesh(make_disc(1.0), k, npw));
    mode.mesh = mesh;
    mode.trace.resize(mesh->size());
    for (int i = 0; i < mesh->size(); ++i) {
        const Vec2 p = mesh->nodes[i].pos;
        const double r = p.norm(), th = std::atan2(p.y, p.x);
        const double jm = bessel_j_ladder(m, k * r)[m];
        mode.trace[i] = c * jm * std::exp(cplx(0.0, m * th));
    }
    apply_phase_gauge(mode.trace);
    mode.normalized = true;
    mode.provenance = "oracle";
    return mode;
}

// Exact interior values of the oracle modes, for cross-checks.
inline cplx square_mode_value(double a, double b, int m, int n, Vec2 p,
                              double norm_target = 1.0) {
    const double c = norm_target * std::sqrt((m == 0 ? 1.0 : 2.0) * (n == 0 ? 1.0 : 2.0) / (a * b));
    return c * std::cos(m * PI * p.x / a) * std::cos(n * PI * p.y / b);
}

} // namespace bil
