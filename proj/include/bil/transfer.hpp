#pragma once

#include <vector>

#include "bil/frequency_filter.hpp"
#include "bil/layer_operator.hpp"
#include "bil/linalg.hpp"
#include "bil/mesh.hpp"

namespace bil {

enum class TransferVariant { Full, Geometric, Diffractive };

// The glancing pass inside the transfer composition acts on corner-collared
// signals, which vanish identically near both edge ends; running its DFT on a
// zero-padded doubled period is then exact and halves the frequency-lattice
// spacing, which the coarsest meshes need to resolve the glancing band.  The
// transversal pass sees raw source densities, so it keeps the native edge
// period.
inline constexpr int kGlancingPad = 2;

// Edge-to-edge block of the jumps operator, wrapped in the microlocal
// filters: rows live on the target edge's graded nodes (with the corner
// collars removed and the glancing frequency pass applied), columns on the
// source edge's nodes.
struct TransferMatrix {
    int target_edge = -1;
    int source_edge = -1;
    double h = 0.0;
    CutoffSpec cutoffs;
    TransferVariant variant = TransferVariant::Full;
    CMatrix m;
    std::vector<double> row_w, col_w;  // arclength quadrature weights
};

namespace transfer_detail {

inline bool edges_adjacent(const DomainSpec& dom, int j, int k_edge) {
    const int n = dom.num_edges();
    return k_edge == (j + 1) % n || k_edge == (j + n - 1) % n;
}

// Interior opening angle at the corner shared by edges j and k_edge, from the
// domain's corner table.
inline double shared_corner_angle(const DomainSpec& dom, int j, int k_edge) {
    for (const Corner& c : dom.corners) {
        if ((c.edge_in == j && c.edge_out == k_edge) || (c.edge_in == k_edge && c.edge_out == j))
            return c.angle;
    }
    throw Error("NotAdjacent", "edges share no corner");
}

// Arclength position of the shared corner within edge `e` (0 or the edge
// length, depending on orientation).
inline double shared_corner_s(const DomainSpec& dom, int e, int other) {
    const int n = dom.num_edges();
    if (other == (e + 1) % n) return dom.edges[e].length;  // corner at this edge's end
    if (other == (e + n - 1) % n) return 0.0;              // corner at this edge's start
    throw Error("NotAdjacent", "edges share no corner");
}

}  // namespace transfer_detail

// Build the filtered transfer block
//   [glancing pass on edge j] o [diag(1 - psi_j^delta)] o [N block j x k] o [R],
// where R is the variant's source-side factor: identity for the full
// operator, diag(psi_k^{2delta}) about the shared corner for the diffractive
// part, and diag(1 - psi_k^{2delta}) o [transversal corner-angle pass] for
// the geometric part.
inline TransferMatrix assemble_transfer(const DomainSpec& dom, int j, int k_edge, double h,
                                        const CutoffSpec& cutoffs,
                                        TransferVariant variant = TransferVariant::Full,
                                        int npw = 12, int samples_per_wavelength = 0) {
    cutoffs.validate();
    if (!(h > 0.0)) throw Error("BadParams", "h must be positive");
    if (j < 0 || j >= dom.num_edges() || k_edge < 0 || k_edge >= dom.num_edges())
        throw Error("BadParams", "edge index out of range");
    if (j == k_edge) throw Error("BadParams", "transfer needs two distinct edges");
    if (!dom.edges[j].flat) throw Error("NotFlat", "target edge must be flat");
    const bool adjacent = transfer_detail::edges_adjacent(dom, j, k_edge);
    if (variant != TransferVariant::Full && !adjacent)
        throw Error("NotAdjacent", "geometric/diffractive variants need adjacent edges");
    if (variant == TransferVariant::Geometric && !dom.edges[k_edge].flat)
        throw Error("NotFlat", "geometric variant filters the source edge in frequency");

    const double k_wave = 1.0 / h;
    BoundaryMesh mesh = build_mesh(dom, k_wave, npw);
    const auto [jfirst, jcount] = mesh.edge_nodes[j];
    const auto [kfirst, kcount] = mesh.edge_nodes[k_edge];

    TransferMatrix tm;
    tm.target_edge = j;
    tm.source_edge = k_edge;
    tm.h = h;
    tm.cutoffs = cutoffs;
    tm.variant = variant;
    tm.row_w.resize(jcount);
    tm.col_w.resize(kcount);
    for (int r = 0; r < jcount; ++r) tm.row_w[r] = mesh.nodes[jfirst + r].w;
    for (int c = 0; c < kcount; ++c) tm.col_w[c] = mesh.nodes[kfirst + c].w;

    // Raw jumps-operator block with Nystrom column weights.  Rows near the
    // shared corner are later suppressed by (1 - psi_j), which keeps the
    // nearly singular corner pairs out of the plain kernel's reach.
    CMatrix block(jcount, kcount);
    for (int r = 0; r < jcount; ++r) {
        const MeshNode& nr = mesh.nodes[jfirst + r];
        for (int c = 0; c < kcount; ++c) {
            const MeshNode& nc = mesh.nodes[kfirst + c];
            block(r, c) =
                KERNEL_SIGN * 2.0 * nc.w * kernel_eval(nr.pos, nc.pos, nc.normal, k_wave);
        }
    }

    const double scale_j = cutoffs.corner_scale(h);
    const double scale_k = cutoffs.c0 * std::pow(h, 2.0 * cutoffs.delta);

    // Source-side factor.
    if (variant == TransferVariant::Diffractive || variant == TransferVariant::Geometric) {
        const double cs = transfer_detail::shared_corner_s(dom, k_edge, j);
        for (int c = 0; c < kcount; ++c) {
            const double dist = std::abs(mesh.nodes[kfirst + c].s - cs);
            const double psi = psi_tilde(dist / scale_k);
            const double f = variant == TransferVariant::Diffractive ? psi : 1.0 - psi;
            for (int r = 0; r < jcount; ++r) block(r, c) *= f;
        }
    }
    if (variant == TransferVariant::Geometric) {
        const double alpha = transfer_detail::shared_corner_angle(dom, j, k_edge);
        auto win = [alpha, e = cutoffs.eps0](double xi) { return transversal_window(xi, alpha, e); };
        CMatrix tr = frequency_multiplier_matrix(mesh, k_edge, h, win, samples_per_wavelength);
        block = matmul(block, tr);
    }

    // Target-side corner collars, then the glancing pass.
    const double lenj = dom.edges[j].length;
    for (int r = 0; r < jcount; ++r) {
        const double dist = std::min(mesh.nodes[jfirst + r].s, lenj - mesh.nodes[jfirst + r].s);
        const double f = 1.0 - psi_tilde(dist / scale_j);
        for (int c = 0; c < kcount; ++c) block(r, c) *= f;
    }
    CMatrix glance = frequency_multiplier_matrix(mesh, j, h, cutoffs.eps0, FreqPass::Glancing,
                                                 samples_per_wavelength, kGlancingPad);
    tm.m = matmul(glance, block);
    return tm;
}

/// Largest singular value of W_j^{1/2} M W_k^{-1/2}: the discrete
// L^2(Gamma_k) -> L^2(Gamma_j) operator norm.
inline double operator_norm(const TransferMatrix& tm) {
    if (tm.m.rows == 0 || tm.m.cols == 0) return 0.0;
    CMatrix a = tm.m;
    for (int r = 0; r < a.rows; ++r) {
        const double sr = std::sqrt(tm.row_w[r]);
        for (int c = 0; c < a.cols; ++c) a(r, c) *= sr / std::sqrt(tm.col_w[c]);
    }
    auto sv = singular_values(a);
    return sv.empty() ? 0.0 : sv.front();
}

// Mixed second derivative d^2/dy dy' structure of the chord length
// S(y, y') = |q(y) - q(y')| between two boundary points, evaluated as
// <t(y), rho-perp> <t(y'), rho-perp> / S with rho the unit chord direction.
inline double glancing_hessian(const DomainSpec& dom, double y, double yp) {
    const auto a = dom.at_global(y);
    const auto b = dom.at_global(yp);
    const Vec2 r = a.pos - b.pos;
    const double d = r.norm();
    if (d < 1e-14) throw Error("CoincidentPoints", "hessian needs distinct boundary points");
    const Vec2 rho_perp = Vec2{r.x / d, r.y / d}.rot_plus90();
    return a.tangent.dot(rho_perp) * b.tangent.dot(rho_perp) / d;
}

// Corner-local model of the same quantity for a wedge of opening angle
// alpha, in the normalized parameters of the two sides (leading term only;
// vanishes at the glancing degeneracy t = 1).
inline double glancing_hessian_corner(double alpha, double s, double t) {
    const double denom = std::pow((s - t) * (s - t) + alpha * alpha * (1.0 - t) * (1.0 - t), 1.5);
    if (denom == 0.0) throw Error("CoincidentPoints", "corner model needs s != t or t != 1");
    return 2.0 * alpha * alpha * (t - 1.0) * (1.0 - s) / denom;
}

}  // namespace bil
