#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "bil/cutoffs.hpp"
#include "bil/eigensolver.hpp"
#include "bil/interior_quadrature.hpp"

namespace bil {

// Boundary-concentration audit: integrates the commutator identity
//   sum 2 chi_x h^2 |d phi|^2-type terms  =  boundary flux + lower-order bulk
// over a window around a boundary point, in the 45-degree frame where the
// boundary is the graph v = u.  The reported ratio
//   h^{-delta} * (mass of the hd-ball at p0) / (|LHS| + 1)
// stays O(1) across a frequency ladder exactly when the mode's near-boundary
// mass is controlled by its commutator flux.
struct RellichReport {
    double lhs = 0.0;        // commutant bulk integral
    double ball = 0.0;       // h^{-delta} * half-ball (or sector) mass at p0
    double rhs_lower = 0.0;  // gamma-weighted lower-bound integrand, diagnostic
    double ratio = 0.0;      // ball / (|lhs| + 1)
    double hd = 0.0;         // h^delta, the audit scale
    long points = 0;         // field evaluations spent
};

// Batch evaluator: real mode values at a list of global points.
using PointEvaluator = std::function<std::vector<double>(const std::vector<Vec2>&)>;

// Evaluator backed by the double-layer representation of a solved mode.
// Phase-gauged so values are real up to the solver's imaginary residual.
inline PointEvaluator mode_evaluator(const EigenMode& mode, double near_beta = 1.0) {
    auto trace = mode.trace;
    apply_phase_gauge(trace);
    auto mesh = mode.mesh;
    const double k = mode.k;
    return [mesh, trace, k, near_beta](const std::vector<Vec2>& pts) {
        std::vector<double> out(pts.size());
        const std::size_t chunk = 16384;
        for (std::size_t i0 = 0; i0 < pts.size(); i0 += chunk) {
            const std::size_t n = std::min(chunk, pts.size() - i0);
            const std::vector<Vec2> sub(pts.begin() + i0, pts.begin() + i0 + n);
            const auto vals = interior_eval_corrected(*mesh, trace, k, sub, near_beta);
            for (std::size_t j = 0; j < n; ++j) out[i0 + j] = vals[j].real();
        }
        return out;
    };
}

namespace rellich_detail {

// 4th-order central difference weights on offsets {-2,-1,0,1,2}.
inline constexpr double FD1[5] = {1.0 / 12.0, -8.0 / 12.0, 0.0, 8.0 / 12.0, -1.0 / 12.0};
inline constexpr double FD2[5] = {-1.0 / 12.0, 16.0 / 12.0, -30.0 / 12.0, 16.0 / 12.0,
                                  -1.0 / 12.0};
inline constexpr double FDOFF[5] = {-2.0, -1.0, 0.0, 1.0, 2.0};

struct Grid1D {
    std::vector<double> x, w;
};

inline Grid1D panel_gl(double a, double b, double panel, int npt = 8) {
    const QuadRule& gl = gauss_legendre(npt);
    Grid1D g;
    const int nseg = std::max(2, static_cast<int>(std::ceil((b - a) / panel)));
    for (int s = 0; s < nseg; ++s) {
        const double lo = a + (b - a) * s / nseg, hi = a + (b - a) * (s + 1) / nseg;
        for (int i = 0; i < npt; ++i) {
            g.x.push_back(0.5 * (lo + hi) + 0.5 * (hi - lo) * gl.x[i]);
            g.w.push_back(0.5 * (hi - lo) * gl.w[i]);
        }
    }
    return g;
}

// Second-order fields of the corner pair
//   chi = chi~(p/hd) psi~(p/eps) psi~(q/eps)            (paired with d/dp)
//   rho = A chi~(q/(A hd)) psi~(p/eps) psi~(q/eps)      (paired with d/dq)
// for a wedge whose edges are the graphs q = +-A p over the bisector axis.
inline CommutantFields corner_fields(double p, double q, double hd, double eps, double A) {
    const double cu = chi_tilde(p / hd), cu1 = chi_tilde_d1(p / hd), cu2 = chi_tilde_d2(p / hd);
    const double hq = A * hd;
    const double cv = chi_tilde(q / hq), cv1 = chi_tilde_d1(q / hq), cv2 = chi_tilde_d2(q / hq);
    const double pu = psi_tilde(p / eps), pu1 = psi_tilde_d1(p / eps), pu2 = psi_tilde_d2(p / eps);
    const double pv = psi_tilde(q / eps), pv1 = psi_tilde_d1(q / eps), pv2 = psi_tilde_d2(q / eps);
    CommutantFields f;
    f.chi_u = cu1 / hd * pu * pv + cu * pu1 / eps * pv;
    f.chi_v = cu * pu * pv1 / eps;
    f.lap_chi = cu2 / (hd * hd) * pu * pv + 2.0 * (cu1 / hd) * (pu1 / eps) * pv +
                cu * pu2 / (eps * eps) * pv + cu * pu * pv2 / (eps * eps);
    f.rho_v = A * (cv1 / hq * pu * pv + cv * pu * pv1 / eps);
    f.rho_u = A * cv * pu1 / eps * pv;
    f.lap_rho = A * (cv2 / (hq * hq) * pu * pv + 2.0 * (cv1 / hq) * (pu * pv1 / eps) +
                     cv * pu * pv2 / (eps * eps) + cv * pu2 / (eps * eps) * pv);
    f.gamma_sq = cu1 * cv1;
    return f;
}

// Assemble LHS/ball/rhs from a prepared list of sample frames.
struct SampleFrame {
    double u = 0.0, v = 0.0, w = 0.0;  // local coords and quadrature weight
};

}  // namespace rellich_detail

// Window audit centered at arclength s0 of a flat edge.  The window spans
// |x| <= W = 2 sqrt(2) eps along the edge and 0 < y <= W into the domain;
// finite differences step h/10 and reach across the edge via even reflection,
// which is exact for a Neumann mode on a flat edge.
inline RellichReport rellich_flat(const DomainSpec& dom, const PointEvaluator& eval, double k,
                                  int edge, double s0, double delta, double eps = 0.15) {
    if (!(delta >= 0.0 && delta <= 0.5)) throw Error("BadParams", "delta must lie in [0, 1/2]");
    if (!(eps > 0.0 && eps < 0.5)) throw Error("BadParams", "eps must lie in (0, 1/2)");
    if (edge < 0 || edge >= dom.num_edges()) throw Error("BadParams", "edge out of range");
    if (dom.edges[edge].kind != EdgeKind::Segment)
        throw Error("CoordinateFrameFailure", "window frame requires a flat edge");
    const double h = 1.0 / k, hd = std::pow(h, delta);
    const double W = 2.0 * std::sqrt(2.0) * eps;
    const double len = dom.edges[edge].length;
    if (!(s0 >= 0.0 && s0 <= len)) throw Error("BadParams", "s0 outside the edge");
    if (std::min(s0, len - s0) < W)
        throw Error("CoordinateFrameFailure", "audit window exceeds the host edge");

    const BoundaryPointInfo bp = dom.at(edge, s0);
    const Vec2 t = bp.tangent, inward = bp.normal * -1.0;
    if (!dom.contains(bp.pos + inward * (0.5 * W)))
        throw Error("CoordinateFrameFailure", "window does not open into the domain");

    auto global = [&](double u, double v) {
        const double x = (u + v) / std::sqrt(2.0);
        const double y = std::abs(v - u) / std::sqrt(2.0);  // even reflection across the edge
        return bp.pos + t * x + inward * y;
    };

    const double d = h / 10.0;
    const double panel = std::min(hd / 2.0, (2.0 * PI / k) / 4.0);
    const auto gx = rellich_detail::panel_gl(-W, W, panel);
    const auto gy = rellich_detail::panel_gl(0.0, W, panel);
    std::vector<rellich_detail::SampleFrame> frames;
    frames.reserve(gx.x.size() * gy.x.size());
    for (std::size_t i = 0; i < gx.x.size(); ++i)
        for (std::size_t j = 0; j < gy.x.size(); ++j) {
            rellich_detail::SampleFrame f;
            f.u = (gx.x[i] - gy.x[j]) / std::sqrt(2.0);
            f.v = (gx.x[i] + gy.x[j]) / std::sqrt(2.0);
            f.w = gx.w[i] * gy.w[j];
            frames.push_back(f);
        }
    const std::size_t ng = frames.size();

    // Point layout: [center][4 u-offsets][4 v-offsets][16 uv crosses][ball].
    std::vector<Vec2> pts;
    pts.reserve(ng * 25 + 48 * 48);
    for (const auto& f : frames) pts.push_back(global(f.u, f.v));
    for (int io = 0; io < 5; ++io) {
        if (io == 2) continue;
        for (const auto& f : frames)
            pts.push_back(global(f.u + rellich_detail::FDOFF[io] * d, f.v));
    }
    for (int io = 0; io < 5; ++io) {
        if (io == 2) continue;
        for (const auto& f : frames)
            pts.push_back(global(f.u, f.v + rellich_detail::FDOFF[io] * d));
    }
    for (int io = 0; io < 5; ++io) {
        if (io == 2) continue;
        for (int jo = 0; jo < 5; ++jo) {
            if (jo == 2) continue;
            for (const auto& f : frames)
                pts.push_back(global(f.u + rellich_detail::FDOFF[jo] * d,
                                     f.v + rellich_detail::FDOFF[io] * d));
        }
    }
    const QuadRule& gl48 = gauss_legendre(48);
    std::vector<double> ball_w;
    ball_w.reserve(48 * 48);
    for (int ir = 0; ir < 48; ++ir) {
        const double r = 0.5 * hd * (gl48.x[ir] + 1.0), wr = 0.5 * hd * gl48.w[ir];
        for (int it = 0; it < 48; ++it) {
            const double th = 0.5 * PI * (gl48.x[it] + 1.0), wt = 0.5 * PI * gl48.w[it];
            pts.push_back(bp.pos + t * (r * std::cos(th)) + inward * (r * std::sin(th)));
            ball_w.push_back(wr * wt * r);
        }
    }

    const std::vector<double> vals = eval(pts);

    RellichReport rep;
    rep.hd = hd;
    rep.points = static_cast<long>(pts.size());
    auto at = [&](std::size_t block, std::size_t i) { return vals[block * ng + i]; };
    for (std::size_t i = 0; i < ng; ++i) {
        const auto& f = frames[i];
        const double p0 = at(0, i);
        double pu = 0.0, pv = 0.0, puu = rellich_detail::FD2[2] * p0,
               pvv = rellich_detail::FD2[2] * p0, puv = 0.0;
        std::size_t blk = 1;
        for (int io = 0; io < 5; ++io) {
            if (io == 2) continue;
            const double fv = at(blk++, i);
            pu += rellich_detail::FD1[io] * fv;
            puu += rellich_detail::FD2[io] * fv;
        }
        for (int io = 0; io < 5; ++io) {
            if (io == 2) continue;
            const double fv = at(blk++, i);
            pv += rellich_detail::FD1[io] * fv;
            pvv += rellich_detail::FD2[io] * fv;
        }
        for (int io = 0; io < 5; ++io) {
            if (io == 2) continue;
            for (int jo = 0; jo < 5; ++jo) {
                if (jo == 2) continue;
                puv += rellich_detail::FD1[io] * rellich_detail::FD1[jo] * at(blk++, i);
            }
        }
        pu /= d;
        pv /= d;
        puu /= d * d;
        pvv /= d * d;
        puv /= d * d;

        const CommutantFields cf = commutant_fields(f.u, f.v, hd, eps);
        const double Ix =
            (-2.0 * cf.chi_u * h * h * puu - 2.0 * cf.chi_v * h * h * puv - h * h * cf.lap_chi * pu) *
            p0;
        const double Iy =
            (-2.0 * cf.rho_v * h * h * pvv - 2.0 * cf.rho_u * h * h * puv - h * h * cf.lap_rho * pv) *
            p0;
        rep.lhs += f.w * (Ix + Iy);
        rep.rhs_lower += f.w * cf.gamma_sq * p0 * p0 / hd;
    }
    double ball = 0.0;
    const std::size_t ball0 = ng * 25;
    for (std::size_t i = 0; i < ball_w.size(); ++i) {
        const double p = vals[ball0 + i];
        ball += ball_w[i] * p * p;
    }
    rep.ball = ball / hd;
    rep.ratio = rep.ball / (std::abs(rep.lhs) + 1.0);
    return rep;
}

// Same audit in the bisector frame of a right-angled corner: the two edges
// are the graphs q = +-p over the bisector, chi pairs with the bisector
// derivative and the common rho with the perpendicular one, and the ball is
// the hd-sector at the corner.  Reflection across either edge extends the
// finite-difference stencil, which restricts this variant to right corners.
inline RellichReport rellich_corner(const DomainSpec& dom, const PointEvaluator& eval, double k,
                                    int corner, double delta, double eps = 0.15) {
    if (!(delta >= 0.0 && delta <= 0.5)) throw Error("BadParams", "delta must lie in [0, 1/2]");
    if (!(eps > 0.0 && eps < 0.5)) throw Error("BadParams", "eps must lie in (0, 1/2)");
    if (corner < 0 || corner >= static_cast<int>(dom.corners.size()))
        throw Error("BadParams", "corner out of range");
    const Corner& c = dom.corners[corner];
    if (std::abs(c.angle - 0.5 * PI) > 1e-9)
        throw Error("CoordinateFrameFailure", "corner audit requires a right corner");
    const Edge& ein = dom.edges[c.edge_in];
    const Edge& eout = dom.edges[c.edge_out];
    if (ein.kind != EdgeKind::Segment || eout.kind != EdgeKind::Segment)
        throw Error("CoordinateFrameFailure", "corner audit requires flat incident edges");

    const double h = 1.0 / k, hd = std::pow(h, delta);
    const double W = 2.0 * std::sqrt(2.0) * eps;
    if (std::min(ein.length, eout.length) < W)
        throw Error("CoordinateFrameFailure", "audit window exceeds the incident edges");

    const Vec2 ta = dom.at(c.edge_out, 1e-9 * eout.length).tangent;            // away from corner
    const Vec2 tb = dom.at(c.edge_in, ein.length * (1.0 - 1e-9)).tangent * -1.0;  // away from corner
    const double A = std::tan(0.5 * c.angle);  // 1 for a right corner
    auto global = [&](double p, double q) {
        // bisector frame -> edge frame, with even reflection across both edges
        const Vec2 bis = (ta + tb) * (1.0 / (ta + tb).norm());
        const Vec2 perp = bis.rot_plus90();
        const Vec2 loc = bis * p + perp * q;
        const double a = loc.dot(ta), b = loc.dot(tb);
        return c.pos + ta * std::abs(a) + tb * std::abs(b);
    };

    const double d = h / 10.0;
    const double panel = std::min(hd / 2.0, (2.0 * PI / k) / 4.0);
    const auto gp = rellich_detail::panel_gl(0.0, W, panel);
    std::vector<rellich_detail::SampleFrame> frames;
    for (std::size_t i = 0; i < gp.x.size(); ++i) {
        const double p = gp.x[i], qlim = A * p;
        const auto gq = rellich_detail::panel_gl(-qlim, qlim, panel);
        for (std::size_t j = 0; j < gq.x.size(); ++j) {
            rellich_detail::SampleFrame f;
            f.u = p;
            f.v = gq.x[j];
            f.w = gp.w[i] * gq.w[j];
            frames.push_back(f);
        }
    }
    const std::size_t ng = frames.size();

    std::vector<Vec2> pts;
    pts.reserve(ng * 25 + 48 * 48);
    for (const auto& f : frames) pts.push_back(global(f.u, f.v));
    for (int io = 0; io < 5; ++io) {
        if (io == 2) continue;
        for (const auto& f : frames)
            pts.push_back(global(f.u + rellich_detail::FDOFF[io] * d, f.v));
    }
    for (int io = 0; io < 5; ++io) {
        if (io == 2) continue;
        for (const auto& f : frames)
            pts.push_back(global(f.u, f.v + rellich_detail::FDOFF[io] * d));
    }
    for (int io = 0; io < 5; ++io) {
        if (io == 2) continue;
        for (int jo = 0; jo < 5; ++jo) {
            if (jo == 2) continue;
            for (const auto& f : frames)
                pts.push_back(global(f.u + rellich_detail::FDOFF[jo] * d,
                                     f.v + rellich_detail::FDOFF[io] * d));
        }
    }
    const double omega = 0.5 * c.angle;
    const QuadRule& gl48 = gauss_legendre(48);
    std::vector<double> ball_w;
    for (int ir = 0; ir < 48; ++ir) {
        const double r = 0.5 * hd * (gl48.x[ir] + 1.0), wr = 0.5 * hd * gl48.w[ir];
        for (int it = 0; it < 48; ++it) {
            const double th = omega * gl48.x[it], wt = omega * gl48.w[it];
            pts.push_back(global(r * std::cos(th), r * std::sin(th)));
            ball_w.push_back(wr * wt * r);
        }
    }

    const std::vector<double> vals = eval(pts);

    RellichReport rep;
    rep.hd = hd;
    rep.points = static_cast<long>(pts.size());
    auto at = [&](std::size_t block, std::size_t i) { return vals[block * ng + i]; };
    for (std::size_t i = 0; i < ng; ++i) {
        const auto& f = frames[i];
        const double p0 = at(0, i);
        double pu = 0.0, pv = 0.0, puu = rellich_detail::FD2[2] * p0,
               pvv = rellich_detail::FD2[2] * p0, puv = 0.0;
        std::size_t blk = 1;
        for (int io = 0; io < 5; ++io) {
            if (io == 2) continue;
            const double fv = at(blk++, i);
            pu += rellich_detail::FD1[io] * fv;
            puu += rellich_detail::FD2[io] * fv;
        }
        for (int io = 0; io < 5; ++io) {
            if (io == 2) continue;
            const double fv = at(blk++, i);
            pv += rellich_detail::FD1[io] * fv;
            pvv += rellich_detail::FD2[io] * fv;
        }
        for (int io = 0; io < 5; ++io) {
            if (io == 2) continue;
            for (int jo = 0; jo < 5; ++jo) {
                if (jo == 2) continue;
                puv += rellich_detail::FD1[io] * rellich_detail::FD1[jo] * at(blk++, i);
            }
        }
        pu /= d;
        pv /= d;
        puu /= d * d;
        pvv /= d * d;
        puv /= d * d;

        const CommutantFields cf = rellich_detail::corner_fields(f.u, f.v, hd, eps, A);
        const double Ix =
            (-2.0 * cf.chi_u * h * h * puu - 2.0 * cf.chi_v * h * h * puv - h * h * cf.lap_chi * pu) *
            p0;
        const double Iy =
            (-2.0 * cf.rho_v * h * h * pvv - 2.0 * cf.rho_u * h * h * puv - h * h * cf.lap_rho * pv) *
            p0;
        rep.lhs += f.w * (Ix + Iy);
        rep.rhs_lower += f.w * cf.gamma_sq * p0 * p0 / hd;
    }
    double ball = 0.0;
    const std::size_t ball0 = ng * 25;
    for (std::size_t i = 0; i < ball_w.size(); ++i) {
        const double p = vals[ball0 + i];
        ball += ball_w[i] * p * p;
    }
    rep.ball = ball / hd;
    rep.ratio = rep.ball / (std::abs(rep.lhs) + 1.0);
    return rep;
}

namespace rellich_detail {

inline void require_certified(const EigenMode& mode) {
    if (mode.provenance == "oracle") return;
    if (mode.spurious || mode.residuals.jumps < 0.0 || mode.residuals.jumps > 1e-5)
        throw Error("UncertifiedMode", "mode must pass the jumps-residual certificate");
}

}  // namespace rellich_detail

inline RellichReport rellich_check(const EigenMode& mode, int edge, double s0, double delta,
                                   double eps = 0.15) {
    rellich_detail::require_certified(mode);
    return rellich_flat(mode.mesh->domain, mode_evaluator(mode), mode.k, edge, s0, delta, eps);
}

inline RellichReport rellich_check_corner(const EigenMode& mode, int corner, double delta,
                                          double eps = 0.15) {
    rellich_detail::require_certified(mode);
    return rellich_corner(mode.mesh->domain, mode_evaluator(mode), mode.k, corner, delta, eps);
}

}  // namespace bil
