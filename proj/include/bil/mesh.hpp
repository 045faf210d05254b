#pragma once

#include <vector>
#include <utility>

#include "bil/geometry.hpp"
#include "bil/quadrature.hpp"

namespace bil {

struct MeshNode {
    double y = 0.0;  // global arclength
    double s = 0.0;  // arclength within edge
    int edge = -1, panel = -1;
    Vec2 pos, tangent, normal;
    double curvature = 0.0;
    double w = 0.0;        // arclength quadrature weight
    double spacing = 0.0;  // local node spacing estimate
};

struct MeshPanel {
    int edge = -1;
    double s_lo = 0.0, s_hi = 0.0;
    int first = 0, count = 0;
    double length() const { return s_hi - s_lo; }
};

struct BoundaryMesh {
    DomainSpec domain;
    double k = 0.0;
    int npw = 10;    // nodes per wavelength target
    int ngl = 12;    // Gauss-Legendre points per panel
    double p = 3.0;  // corner grading exponent
    std::vector<MeshNode> nodes;
    std::vector<MeshPanel> panels;
    std::vector<std::pair<int, int>> edge_nodes;   // (first, count) per edge
    std::vector<std::pair<int, int>> edge_panels;  // (first, count) per edge

    int size() const { return static_cast<int>(nodes.size()); }

    double min_spacing() const {
        double m = 1e300;
        for (const auto& n : nodes) m = std::min(m, n.spacing);
        return m;
    }
};

inline BoundaryMesh build_mesh(const DomainSpec& dom, double k, int npw = 10, double p = 3.0,
                               int ngl = 12, int max_nodes = 20000) {
    if (k <= 0.0 || npw < 6 || p < 2.0 || ngl < 4)
        throw Error("BadParams", "need k > 0, nodes_per_wavelength >= 6, grading p >= 2");
    BoundaryMesh mesh;
    mesh.domain = dom;
    mesh.k = k;
    mesh.npw = npw;
    mesh.ngl = ngl;
    mesh.p = p;

    const double lambda = 2.0 * PI / k;
    const double panel_target = ngl * lambda / npw;  // max panel length
    const QuadRule& gl = gauss_legendre(ngl);

    long long projected = 0;
    for (const Edge& e : dom.edges)
        projected += static_cast<long long>(std::ceil(e.length / panel_target) + 8) * ngl;
    if (projected > max_nodes)
        throw Error("MeshTooCoarse", "node budget exceeded: needs ~" + std::to_string(projected) +
                                         " nodes (cap " + std::to_string(max_nodes) + ")");

    for (int ei = 0; ei < dom.num_edges(); ++ei) {
        const Edge& e = dom.edges[ei];
        bool corner_lo = false, corner_hi = false;
        for (const Corner& c : dom.corners) {
            if (c.edge_out == ei) corner_lo = true;
            if (c.edge_in == ei) corner_hi = true;
        }

        std::vector<double> brk;
        if (!corner_lo && !corner_hi) {
            const int m = std::max(2, static_cast<int>(std::ceil(e.length / panel_target)));
            for (int i = 0; i <= m; ++i) brk.push_back(e.length * i / m);
        } else {
            // graded half-edges: largest panel ~ p*(L/2)/m must resolve the wavelength
            const int m_half =
                std::max(4, static_cast<int>(std::ceil(p * 0.5 * e.length / panel_target)));
            brk = graded_breakpoints(e.length, m_half, p, corner_lo, corner_hi);
        }

        mesh.edge_panels.emplace_back(static_cast<int>(mesh.panels.size()),
                                      static_cast<int>(brk.size()) - 1);
        mesh.edge_nodes.emplace_back(static_cast<int>(mesh.nodes.size()),
                                     (static_cast<int>(brk.size()) - 1) * ngl);

        for (size_t bi = 0; bi + 1 < brk.size(); ++bi) {
            MeshPanel pan;
            pan.edge = ei;
            pan.s_lo = brk[bi];
            pan.s_hi = brk[bi + 1];
            pan.first = static_cast<int>(mesh.nodes.size());
            pan.count = ngl;
            const int pidx = static_cast<int>(mesh.panels.size());
            for (int g = 0; g < ngl; ++g) {
                MeshNode nd;
                nd.edge = ei;
                nd.panel = pidx;
                nd.s = 0.5 * (pan.s_lo + pan.s_hi) + 0.5 * pan.length() * gl.x[g];
                nd.y = dom.edge_offset[ei] + nd.s;
                nd.w = 0.5 * pan.length() * gl.w[g];
                const BoundaryPointInfo bp = dom.at(ei, nd.s);
                nd.pos = bp.pos;
                nd.tangent = bp.tangent;
                nd.normal = bp.normal;
                nd.curvature = bp.curvature;
                nd.spacing = nd.w;  // GL weight as local spacing measure
                mesh.nodes.push_back(nd);
            }
            mesh.panels.push_back(pan);
        }
    }
    if (mesh.size() > max_nodes)
        throw Error("MeshTooCoarse", "node budget exceeded after grading");
    return mesh;
}

} // namespace bil
