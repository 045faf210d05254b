#pragma once

#include <vector>
#include <cmath>

#include "bil/geometry.hpp"
#include "bil/mesh.hpp"
#include "bil/layer_operator.hpp"

namespace bil {

struct InteriorQuadrature {
    std::vector<Vec2> points;
    std::vector<double> weights;  // sum = area of the domain (up to polyline resolution)

    double area() const {
        double a = 0.0;
        for (double w : weights) a += w;
        return a;
    }
};

namespace iq_detail {

// Dunavant degree-5 rule on a triangle: barycentric abscissae and weights.
struct Tri7 {
    double l1, l2, w;
};
inline const Tri7* tri7() {
    static const double a = 0.470142064105115, b = 0.101286507323456;
    static const double wa = 0.132394152788506, wb = 0.125939180544827;
    static const Tri7 r[7] = {{1.0 / 3.0, 1.0 / 3.0, 0.225},
                              {a, a, wa}, {a, 1 - 2 * a, wa}, {1 - 2 * a, a, wa},
                              {b, b, wb}, {b, 1 - 2 * b, wb}, {1 - 2 * b, b, wb}};
    return r;
}

inline void push_triangle(InteriorQuadrature& q, Vec2 p0, Vec2 p1, Vec2 p2) {
    const double area = 0.5 * std::abs((p1 - p0).cross(p2 - p0));
    if (area <= 0.0) return;
    const Tri7* r = tri7();
    for (int i = 0; i < 7; ++i) {
        const double l3 = 1.0 - r[i].l1 - r[i].l2;
        q.points.push_back(p0 * r[i].l1 + p1 * r[i].l2 + p2 * l3);
        q.weights.push_back(area * r[i].w);
    }
}

} // namespace iq_detail

// Boundary-conforming quadrature of a convex domain.  Boundary samples are
// taken per edge with corners as mandatory cell endpoints; the outermost strip
// uses curved tensor-product cells (blending the exact boundary arc with the
// first inner ring, 4x4 Gauss with the analytic Jacobian), so no chord-vs-arc
// sliver is lost; the interior is filled by straight triangles between scaled
// copies of the sample polygon, with a degree-5 rule per triangle.
inline InteriorQuadrature build_interior_quadrature(const DomainSpec& dom, double target_h) {
    struct BSample {
        int edge;
        double s, s_end;  // arc section to the next sample, within this edge
        Vec2 pos;
    };
    std::vector<BSample> samp;
    for (size_t e = 0; e < dom.edges.size(); ++e) {
        const double len = dom.edges[e].length;
        const int ne = std::max(dom.edges.size() == 1 ? 8 : 2,
                                static_cast<int>(std::ceil(len / target_h)));
        for (int j = 0; j < ne; ++j) {
            const double s = len * j / ne, s_end = len * (j + 1.0) / ne;
            samp.push_back({static_cast<int>(e), s, s_end, dom.at(static_cast<int>(e), s).pos});
        }
    }
    const int m = static_cast<int>(samp.size());

    Vec2 c{0, 0};
    double area2 = 0.0;
    for (int i = 0; i < m; ++i) {
        const Vec2 a = samp[i].pos, b = samp[(i + 1) % m].pos;
        const double cr = a.cross(b);
        area2 += cr;
        c = c + (a + b) * cr;
    }
    c = c * (1.0 / (3.0 * area2));

    double rho = 0.0;
    for (const BSample& s : samp) rho = std::max(rho, (s.pos - c).norm());
    const int nr = std::max(3, static_cast<int>(std::ceil(rho / target_h)));
    auto at_depth = [&](int i, int r) {
        return c + (samp[i % m].pos - c) * (1.0 - static_cast<double>(r) / nr);
    };

    InteriorQuadrature q;
    q.points.reserve(static_cast<size_t>(m) * (nr * 14 + 16));

    // curved outer strip
    const QuadRule& gl4 = gauss_legendre(4);
    for (int i = 0; i < m; ++i) {
        const BSample& bs = samp[i];
        const Vec2 r0 = at_depth(i, 1), r1 = at_depth(i + 1, 1);
        const double ds = bs.s_end - bs.s;
        for (size_t a = 0; a < gl4.x.size(); ++a) {
            const double t = 0.5 + 0.5 * gl4.x[a];
            const BoundaryPointInfo g = dom.at(bs.edge, bs.s + t * ds);
            const Vec2 gp = g.tangent * ds;           // dG/dt, arclength parametrization
            const Vec2 ct = r0 + (r1 - r0) * t;       // inner chord point
            const Vec2 cp = r1 - r0;                  // dC/dt
            for (size_t b = 0; b < gl4.x.size(); ++b) {
                const double u = 0.5 + 0.5 * gl4.x[b];
                const Vec2 pt = g.pos * (1.0 - u) + ct * u;
                const Vec2 dt = gp * (1.0 - u) + cp * u;
                const Vec2 du = ct - g.pos;
                const double jac = std::abs(dt.cross(du));
                q.points.push_back(pt);
                q.weights.push_back(0.25 * gl4.w[a] * gl4.w[b] * jac);
            }
        }
    }
    // straight triangles inward
    for (int r = 1; r < nr; ++r) {
        for (int i = 0; i < m; ++i) {
            const Vec2 o0 = at_depth(i, r), o1 = at_depth(i + 1, r);
            if (r + 1 == nr) {
                iq_detail::push_triangle(q, o0, o1, c);
            } else {
                const Vec2 n0 = at_depth(i, r + 1), n1 = at_depth(i + 1, r + 1);
                iq_detail::push_triangle(q, o0, o1, n1);
                iq_detail::push_triangle(q, o0, n1, n0);
            }
        }
    }
    return q;
}

// Interior evaluation with dyadic correction of near-boundary panels, so
// targets may approach the boundary far closer than the plain evaluator's
// 3-spacing cliff.  Density on each corrected panel is its Lagrange interpolant.
inline std::vector<cplx> interior_eval_corrected(const BoundaryMesh& mesh,
                                                 const std::vector<cplx>& trace, double k,
                                                 const std::vector<Vec2>& targets,
                                                 double near_beta = 1.0) {
    if (static_cast<int>(trace.size()) != mesh.size())
        throw Error("BadParams", "trace length must match mesh size");
    if (std::abs(k - mesh.k) > 1e-12 * mesh.k)
        throw Error("BadParams", "mesh was built for a different wavenumber");
    std::vector<cplx> out(targets.size());
    std::vector<cplx> block;
    for (size_t t = 0; t < targets.size(); ++t) {
        const Vec2 x = targets[t];
        cplx acc(0.0, 0.0);
        for (int j = 0; j < mesh.size(); ++j) {
            const MeshNode& nd = mesh.nodes[j];
            acc += nd.w * kernel_eval(x, nd.pos, nd.normal, k) * trace[j];
        }
        for (size_t pi = 0; pi < mesh.panels.size(); ++pi) {
            const MeshPanel& pan = mesh.panels[pi];
            double nodemin = 1e300;
            for (int j = 0; j < pan.count; ++j)
                nodemin = std::min(nodemin, (x - mesh.nodes[pan.first + j].pos).norm());
            if (nodemin > (near_beta + 1.0) * pan.length()) continue;
            double s_star = 0.0;
            double lo = pan.s_lo, hi = pan.s_hi;
            auto dist = [&](double s) { return (x - mesh.domain.at(pan.edge, s).pos).norm(); };
            for (int it = 0; it < 60; ++it) {
                const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
                if (dist(m1) < dist(m2)) hi = m2;
                else lo = m1;
            }
            s_star = 0.5 * (lo + hi);
            const double d = dist(s_star);
            if (d > near_beta * pan.length()) continue;
            // subtract the plain contribution of this panel, add the corrected one
            for (int j = 0; j < pan.count; ++j) {
                const MeshNode& nd = mesh.nodes[pan.first + j];
                acc -= nd.w * kernel_eval(x, nd.pos, nd.normal, k) * trace[pan.first + j];
            }
            const double dfloor = std::max(d, 1e-9 * std::max(1.0, mesh.domain.L));
            const int levels = std::max(
                4, std::min(40, static_cast<int>(std::ceil(std::log2(
                                    std::max(pan.length() / dfloor, 2.0)))) + 4));
            bie_detail::panel_block_integral(mesh, x, pan, s_star, levels, block);
            for (int j = 0; j < pan.count; ++j) acc += block[j] * trace[pan.first + j];
        }
        out[t] = INTERIOR_FACTOR * acc;
    }
    return out;
}

// L2(Omega) norm of the double-layer representation of `trace`.
inline double interior_l2_norm(const BoundaryMesh& mesh, const std::vector<cplx>& trace,
                               double k, const InteriorQuadrature& quad) {
    const std::vector<cplx> vals = interior_eval_corrected(mesh, trace, k, quad.points);
    double acc = 0.0;
    for (size_t i = 0; i < vals.size(); ++i) acc += quad.weights[i] * std::norm(vals[i]);
    return std::sqrt(acc);
}

} // namespace bil
