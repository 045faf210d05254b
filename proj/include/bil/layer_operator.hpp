#pragma once

#include <vector>
#include <cmath>
#include <algorithm>

#include "bil/constants.hpp"
#include "bil/mesh.hpp"
#include "bil/linalg.hpp"
#include "bil/special_functions.hpp"

namespace bil {

// Raw double-layer kernel (i/4) k <nu(q'), (q-q')/d> H1(kd).  The assembled
// operator scales this by KERNEL_SIGN * 2 * w_j (see constants.hpp).
inline cplx kernel_eval(Vec2 q, Vec2 qp, Vec2 nu_qp, double k) {
    const Vec2 r = q - qp;
    const double d = r.norm();
    if (d < 1e-15) throw Error("CoincidentPoints", "kernel needs q != q'");
    const double c = nu_qp.dot(r) / d;
    if (c == 0.0) return {0.0, 0.0};  // flat-edge pairs: normal perpendicular to chord
    return cplx(0.0, 0.25) * k * c * hankel1(1, k * d);
}

namespace bie_detail {

// Kernel with the curvature limit at near-coincidence.  The crossover must sit
// well above sqrt(eps): below it <nu', q-q'> is cancellation noise that the
// Hankel singularity amplifies like 1/d^2, while the limit's own error is only
// O(curvature * (kd)^2).
inline cplx kernel_near(Vec2 q, Vec2 qp, Vec2 nu_qp, double curv_qp, double k) {
    const double d = (q - qp).norm();
    if (d < 1e-7) return {DIAG_CURVATURE_FACTOR * curv_qp, 0.0};
    return kernel_eval(q, qp, nu_qp, k);
}

} // namespace bie_detail

// Stationary-phase surrogate for the operator kernel at separation x = d/h >= 10:
//   (2 pi h)^{-1/2} e^{i d/h} a(q,q') b(d/h),
//   a(q,q') = e^{3 i pi/4} <nu(q'), q-q'> / (Gamma(3/2) d^{3/2}).
// b_terms = 0 uses the full conormal integral; n > 0 truncates the expansion at n terms.
inline cplx kernel_wkb(Vec2 q, Vec2 qp, Vec2 nu_qp, double k, int b_terms = 0) {
    const Vec2 r = q - qp;
    const double d = r.norm();
    const double x = k * d;
    if (x < 10.0) throw Error("BadParams", "surrogate requires |q-q'|/h >= 10");
    const double gam32 = 0.5 * std::sqrt(PI);  // Gamma(3/2)
    const cplx a = std::polar(1.0, 0.75 * PI) * (nu_qp.dot(r) / (gam32 * std::pow(d, 1.5)));
    const cplx b = (b_terms <= 0) ? conormal_b(x) : conormal_b_expansion(x, b_terms);
    return std::sqrt(k / (2.0 * PI)) * std::polar(1.0, x) * a * b;
}

struct LayerOperator {
    double k = 0.0;
    CMatrix matrix;  // the discretized operator N(h), calibration applied
    const BoundaryMesh* mesh = nullptr;
};

namespace bie_detail {

// integrate kernel * panel Lagrange basis over [a, b], refining dyadically toward `sing`
inline void panel_block_integral(const BoundaryMesh& mesh, Vec2 qi, const MeshPanel& pan,
                                 double sing, int levels, std::vector<cplx>& out) {
    const DomainSpec& dom = mesh.domain;
    const int ngl = pan.count;
    const QuadRule& glq = gauss_legendre(16);
    const QuadRule& glp = gauss_legendre(ngl);
    static thread_local std::vector<double> bw;  // barycentric weights for ngl ref nodes
    static thread_local int bw_n = -1;
    if (bw_n != ngl) {
        bw = barycentric_weights(glp.x);
        bw_n = ngl;
    }
    out.assign(ngl, cplx(0.0, 0.0));
    const double mid = 0.5 * (pan.s_lo + pan.s_hi), hl = 0.5 * pan.length();

    auto accumulate_segment = [&](double a, double b) {
        for (size_t g = 0; g < glq.x.size(); ++g) {
            const double s = 0.5 * (a + b) + 0.5 * (b - a) * glq.x[g];
            const double w = 0.5 * (b - a) * glq.w[g];
            const BoundaryPointInfo bp = dom.at(pan.edge, s);
            const cplx kv = kernel_near(qi, bp.pos, bp.normal, bp.curvature, mesh.k);
            const double xi = (s - mid) / hl;  // reference coordinate
            const std::vector<double> lag = barycentric_coeffs(glp.x, bw, xi);
            for (int j = 0; j < ngl; ++j) out[j] += w * kv * lag[j];
        }
    };

    for (int side = 0; side < 2; ++side) {
        const double endpoint = side == 0 ? pan.s_lo : pan.s_hi;
        const double len = std::abs(endpoint - sing);
        if (len < 1e-15) continue;
        double prev = sing;
        for (int l = levels; l >= 0; --l) {
            const double t = sing + (endpoint - sing) * std::pow(0.5, l);
            if (side == 0) accumulate_segment(t, prev);
            else accumulate_segment(prev, t);
            prev = t;
        }
    }
}

inline double panel_distance(const BoundaryMesh& mesh, int node, const MeshPanel& pan,
                             double& s_closest) {
    const MeshNode& nd = mesh.nodes[node];
    // nodes of the panel give a cheap bracket; refine by ternary search
    double best = 1e300;
    s_closest = pan.s_lo;
    for (int j = 0; j < pan.count; ++j) {
        const MeshNode& mj = mesh.nodes[pan.first + j];
        const double d = (nd.pos - mj.pos).norm();
        if (d < best) {
            best = d;
            s_closest = mj.s;
        }
    }
    double lo = pan.s_lo, hi = pan.s_hi;
    auto dist = [&](double s) { return (nd.pos - mesh.domain.at(pan.edge, s).pos).norm(); };
    for (int it = 0; it < 60; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        if (dist(m1) < dist(m2)) hi = m2;
        else lo = m1;
    }
    const double s_t = 0.5 * (lo + hi);
    if (dist(s_t) < best) {
        best = dist(s_t);
        s_closest = s_t;
    }
    return best;
}

inline bool same_flat_edge(const BoundaryMesh& mesh, int ei, int ej) {
    return ei == ej && mesh.domain.edges[ei].flat;
}

} // namespace bie_detail

// Dense Nystrom discretization of the double-layer jumps operator with local
// dyadic correction near the diagonal and across corners.
inline LayerOperator assemble_operator(const BoundaryMesh& mesh, double k = 0.0,
                                       double near_beta = 1.0) {
    if (k <= 0.0) k = mesh.k;
    if (std::abs(k - mesh.k) > 1e-12 * mesh.k)
        throw Error("BadParams", "mesh was built for a different wavenumber");
    const int n = mesh.size();
    LayerOperator op;
    op.k = k;
    op.mesh = &mesh;
    op.matrix = CMatrix(n, n);
    CMatrix& A = op.matrix;

    const double scale = KERNEL_SIGN * 2.0;

    for (int i = 0; i < n; ++i) {
        const MeshNode& ni = mesh.nodes[i];
        for (int j = 0; j < n; ++j) {
            if (i == j) {
                A(i, i) = scale * ni.w * DIAG_CURVATURE_FACTOR * ni.curvature;
                continue;
            }
            const MeshNode& nj = mesh.nodes[j];
            if (bie_detail::same_flat_edge(mesh, ni.edge, nj.edge)) continue;  // exact zero
            A(i, j) = scale * nj.w * kernel_eval(ni.pos, nj.pos, nj.normal, k);
        }
    }
    if (near_beta <= 0.0) return op;  // plain Nystrom: scanning-grade accuracy

    // near-panel correction (includes the self panel, which covers the diagonal)
    std::vector<cplx> block;
    for (int i = 0; i < n; ++i) {
        const MeshNode& ni = mesh.nodes[i];
        for (size_t pi = 0; pi < mesh.panels.size(); ++pi) {
            const MeshPanel& pan = mesh.panels[pi];
            if (bie_detail::same_flat_edge(mesh, ni.edge, pan.edge)) continue;
            const bool self = (ni.panel == static_cast<int>(pi));
            double s_star = ni.s;
            double dist = 0.0;
            if (!self) {
                // cheap node-distance prefilter; exact min is within a panel length
                double nodemin = 1e300;
                for (int j = 0; j < pan.count; ++j)
                    nodemin = std::min(nodemin, (ni.pos - mesh.nodes[pan.first + j].pos).norm());
                if (nodemin > (near_beta + 1.0) * pan.length()) continue;
                dist = bie_detail::panel_distance(mesh, i, pan, s_star);
                if (dist > near_beta * pan.length()) continue;
            }
            const double dfloor = std::max(dist, 1e-12);
            const int levels = std::max(
                4, std::min(40, static_cast<int>(std::ceil(std::log2(
                                    std::max(pan.length() / dfloor, 2.0)))) + 4));
            bie_detail::panel_block_integral(mesh, ni.pos, pan, self ? ni.s : s_star, levels,
                                             block);
            for (int j = 0; j < pan.count; ++j) A(i, pan.first + j) = scale * block[j];
        }
    }
    return op;
}

// Laplace double-layer kernel (1/2pi) <nu(q'), q-q'>/|q-q'|^2 (Gauss-identity sanity)
inline double laplace_kernel_eval(Vec2 q, Vec2 qp, Vec2 nu_qp) {
    const Vec2 r = q - qp;
    const double d2 = r.dot(r);
    if (d2 < 1e-30) throw Error("CoincidentPoints", "kernel needs q != q'");
    return (0.5 / PI) * nu_qp.dot(r) / d2;
}

inline double gauss_identity_value(const BoundaryMesh& mesh, Vec2 target) {
    double acc = 0.0;
    for (const MeshNode& nd : mesh.nodes)
        acc += nd.w * laplace_kernel_eval(target, nd.pos, nd.normal);
    return INTERIOR_FACTOR * acc;
}

// Double-layer representation at interior targets.
inline std::vector<cplx> interior_eval(const BoundaryMesh& mesh,
                                       const std::vector<cplx>& trace, double k,
                                       const std::vector<Vec2>& targets,
                                       bool check_targets = true) {
    if (static_cast<int>(trace.size()) != mesh.size())
        throw Error("BadParams", "trace length must match mesh size");
    std::vector<cplx> out(targets.size());
    for (size_t t = 0; t < targets.size(); ++t) {
        const Vec2 x = targets[t];
        if (check_targets) {
            if (!mesh.domain.contains(x)) throw Error("TargetOutside", "target not inside the domain");
            for (const MeshNode& nd : mesh.nodes)
                if ((x - nd.pos).norm() < 3.0 * nd.spacing)
                    throw Error("TargetTooClose", "target within 3 node spacings of the boundary");
        }
        cplx acc(0.0, 0.0);
        for (int j = 0; j < mesh.size(); ++j) {
            const MeshNode& nd = mesh.nodes[j];
            acc += nd.w * kernel_eval(x, nd.pos, nd.normal, k) * trace[j];
        }
        out[t] = INTERIOR_FACTOR * acc;
    }
    return out;
}

// Image-augmented representation for targets near one flat edge: Green's
// identity with the mirror kernel makes the flat-edge contribution vanish
// exactly, so near-edge targets lose the accuracy cliff.  Exact for Neumann
// traces on domains where edge `flat_edge` is a straight segment.
inline std::vector<cplx> interior_eval_reflect(const BoundaryMesh& mesh,
                                               const std::vector<cplx>& trace, double k,
                                               const std::vector<Vec2>& targets,
                                               int flat_edge) {
    if (!mesh.domain.edges[flat_edge].flat)
        throw Error("NotFlat", "reflection evaluator needs a flat edge");
    if (static_cast<int>(trace.size()) != mesh.size())
        throw Error("BadParams", "trace length must match mesh size");
    const Edge& e = mesh.domain.edges[flat_edge];
    const Vec2 a = e.p0;
    const Vec2 nrm = (e.p1 - e.p0).normalized().rot_minus90();
    std::vector<cplx> out(targets.size());
    for (size_t t = 0; t < targets.size(); ++t) {
        const Vec2 x = targets[t];
        const Vec2 xm = x - nrm * (2.0 * (x - a).dot(nrm));
        cplx acc(0.0, 0.0);
        for (int j = 0; j < mesh.size(); ++j) {
            const MeshNode& nd = mesh.nodes[j];
            if (nd.edge == flat_edge) continue;
            acc += nd.w * (kernel_eval(x, nd.pos, nd.normal, k) +
                           kernel_eval(xm, nd.pos, nd.normal, k)) *
                   trace[j];
        }
        out[t] = INTERIOR_FACTOR * acc;
    }
    return out;
}

} // namespace bil
