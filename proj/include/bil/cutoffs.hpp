#pragma once

#include <cmath>
#include <algorithm>

#include "bil/geometry.hpp"
#include "bil/quadrature.hpp"

namespace bil {

// Smooth cutoff family used by the microlocal filters and the commutator
// audit: an odd ramp chi_tilde, an even plateau psi_tilde, corner bumps at
// scale h^delta, and the 2-D commutant fields chi(x,y), rho(x,y).
//
// Everything is built from one C-infinity switch
//     smooth_step(t) = e^{-1/t} / (e^{-1/t} + e^{-1/(1-t)}),
// which is 0 for t <= 0, 1 for t >= 1, and satisfies S(t) + S(1-t) = 1.

inline double smooth_step(double t) {
    if (t <= 0.0) return 0.0;
    if (t >= 1.0) return 1.0;
    const double a = std::exp(-1.0 / t);
    const double b = std::exp(-1.0 / (1.0 - t));
    return a / (a + b);
}

inline double smooth_step_d1(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double s = smooth_step(t);
    const double q = 1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t));
    return s * (1.0 - s) * q;
}

inline double smooth_step_d2(double t) {
    if (t <= 0.0 || t >= 1.0) return 0.0;
    const double s = smooth_step(t);
    const double q = 1.0 / (t * t) + 1.0 / ((1.0 - t) * (1.0 - t));
    const double qp = -2.0 / (t * t * t) + 2.0 / ((1.0 - t) * (1.0 - t) * (1.0 - t));
    const double s1 = s * (1.0 - s) * q;
    return s1 * (1.0 - 2.0 * s) * q + s * (1.0 - s) * qp;
}

// psi_tilde: even, == 1 on [-1,1], == 0 outside [-2,2], nonincreasing on s >= 0.
inline double psi_tilde(double s) { return 1.0 - smooth_step(std::abs(s) - 1.0); }

inline double psi_tilde_d1(double s) {
    const double d = -smooth_step_d1(std::abs(s) - 1.0);
    return s < 0.0 ? -d : d;
}

inline double psi_tilde_d2(double s) { return -smooth_step_d2(std::abs(s) - 1.0); }

// chi_tilde' on [1,3]: ramps from 1/2 down to 0 with all derivatives vanishing
// at both ends; its integral over [1,3] is exactly 1/2 because
// int_0^1 smooth_step = 1/2 by the S(t)+S(1-t)=1 symmetry.
inline double chi_tilde_d1(double s) {
    const double a = std::abs(s);
    if (a <= 1.0) return 0.5;
    if (a >= 3.0) return 0.0;
    return 0.5 * (1.0 - smooth_step(0.5 * (a - 1.0)));
}

inline double chi_tilde_d2(double s) {
    const double a = std::abs(s);
    if (a <= 1.0 || a >= 3.0) return 0.0;
    const double v = -0.25 * smooth_step_d1(0.5 * (a - 1.0));
    return s < 0.0 ? -v : v;
}

// chi_tilde: odd, nondecreasing, = s/2 on [-1,1], == +-1 outside [+-3].
inline double chi_tilde(double s) {
    const double a = std::abs(s);
    double v;
    if (a <= 1.0) {
        v = 0.5 * a;
    } else if (a >= 3.0) {
        v = 1.0;
    } else {
        // 1/2 + int_1^a chi_tilde'(t) dt, by 24-point Gauss-Legendre
        const QuadRule& gl = gauss_legendre(24);
        const double mid = 0.5 * (1.0 + a), half = 0.5 * (a - 1.0);
        double acc = 0.0;
        for (int i = 0; i < 24; ++i)
            acc += half * gl.w[i] * chi_tilde_d1(mid + half * gl.x[i]);
        v = 0.5 + acc;
    }
    return s < 0.0 ? -v : v;
}

// Corner bump: psi_tilde-shaped, plateau within c0*h^delta of the corner,
// support radius 2*c0*h^delta.
inline double corner_psi(double dist, double h, double delta, double c0 = 1.0) {
    if (!(h > 0.0) || !(c0 > 0.0)) throw Error("BadParams", "corner_psi needs h > 0 and c0 > 0");
    return psi_tilde(std::abs(dist) / (c0 * std::pow(h, delta)));
}

// Parameters shared by the corner cutoffs and the glancing frequency window.
struct CutoffSpec {
    double delta = 0.45;  // corner-cutoff scale exponent, in [0, 1)
    double eps0 = 0.1;    // glancing aperture, in (0, 1/2)
    double c0 = 0.5;      // corner-cutoff width constant

    void validate() const {
        if (!(delta >= 0.0 && delta < 1.0)) throw Error("BadParams", "delta must lie in [0, 1)");
        if (!(eps0 > 0.0 && eps0 < 0.5)) throw Error("BadParams", "eps0 must lie in (0, 1/2)");
        if (!(c0 > 0.0)) throw Error("BadParams", "c0 must be positive");
    }

    double corner_scale(double h) const { return c0 * std::pow(h, delta); }

    // Width constant tied to the shortest edge, so corner bumps on any edge
    // stay clear of its midpoint for small h.
    static CutoffSpec for_domain(const DomainSpec& dom, double delta, double eps0 = 0.1) {
        CutoffSpec spec;
        spec.delta = delta;
        spec.eps0 = eps0;
        double min_len = 1e300;
        for (const Edge& e : dom.edges) min_len = std::min(min_len, e.length);
        spec.c0 = 0.5 * min_len;
        spec.validate();
        return spec;
    }
};

// 2-D commutant fields for the Rellich audit, expressed in local coordinates
// (u, v) in which the boundary is the graph v = u (unit-slope frame).  The
// field paired with d/du is
//     chi(u,v) = chi_tilde(u/hd) psi_tilde(u/eps) psi_tilde(v/eps),
// and the field paired with d/dv is
//     rho(u,v) = chi_tilde(v/hd) psi_tilde(u/eps) psi_tilde(v/eps),
// so that rho = chi on the boundary diagonal.  hd = h^delta is the small
// scale, eps the fixed macroscopic window.
struct CommutantFields {
    double chi_u = 0.0, chi_v = 0.0, lap_chi = 0.0;
    double rho_u = 0.0, rho_v = 0.0, lap_rho = 0.0;
    double gamma_sq = 0.0;  // gamma(u/hd) * gamma(v/hd) lower-bound weight
};

inline CommutantFields commutant_fields(double u, double v, double hd, double eps) {
    if (!(hd > 0.0) || !(eps > 0.0)) throw Error("BadParams", "cutoff scales must be positive");
    const double cu = chi_tilde(u / hd), cu1 = chi_tilde_d1(u / hd), cu2 = chi_tilde_d2(u / hd);
    const double cv = chi_tilde(v / hd), cv1 = chi_tilde_d1(v / hd), cv2 = chi_tilde_d2(v / hd);
    const double pu = psi_tilde(u / eps), pu1 = psi_tilde_d1(u / eps), pu2 = psi_tilde_d2(u / eps);
    const double pv = psi_tilde(v / eps), pv1 = psi_tilde_d1(v / eps), pv2 = psi_tilde_d2(v / eps);

    CommutantFields f;
    f.chi_u = cu1 / hd * pu * pv + cu * pu1 / eps * pv;
    f.chi_v = cu * pu * pv1 / eps;
    const double chi_uu = cu2 / (hd * hd) * pu * pv + 2.0 * (cu1 / hd) * (pu1 / eps) * pv +
                          cu * pu2 / (eps * eps) * pv;
    const double chi_vv = cu * pu * pv2 / (eps * eps);
    f.lap_chi = chi_uu + chi_vv;

    f.rho_v = cv1 / hd * pu * pv + cv * pu * pv1 / eps;
    f.rho_u = cv * pu1 / eps * pv;
    const double rho_vv = cv2 / (hd * hd) * pu * pv + 2.0 * (cv1 / hd) * (pu * pv1 / eps) +
                          cv * pu * pv2 / (eps * eps);
    const double rho_uu = cv * pu2 / (eps * eps) * pv;
    f.lap_rho = rho_uu + rho_vv;

    f.gamma_sq = chi_tilde_d1(u / hd) * chi_tilde_d1(v / hd);
    return f;
}

// Arclength distance from edge-local arclength s to the nearest endpoint of
// that edge (the corner collar coordinate used by the corner weights).
inline double edge_end_distance(const Edge& e, double s) {
    return std::min(std::abs(s), std::abs(e.length - s));
}

}  // namespace bil
