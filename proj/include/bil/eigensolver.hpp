#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <string>
#include <vector>

#include "bil/geometry.hpp"
#include "bil/mesh.hpp"
#include "bil/layer_operator.hpp"
#include "bil/linalg.hpp"
#include "bil/interior_quadrature.hpp"

namespace bil {

struct ModeResiduals {
    double jumps = -1.0;    // ||u - N(k)u||_2 / ||u||_2
    double pde = -1.0;      // max |Lap_h phi + k^2 phi| over interior stencils
    double neumann = -1.0;  // max one-sided normal-derivative estimate / k
};

struct EigenMode {
    double k = 0.0;
    std::shared_ptr<const BoundaryMesh> mesh;
    std::vector<cplx> trace;
    bool normalized = false;
    ModeResiduals residuals;
    std::string provenance;  // "solver" | "oracle"
    bool degenerate_pair = false;
    bool spurious = false;   // failed the PDE-residual defense
};

// Rotate so the largest-magnitude sample is real positive.
inline void apply_phase_gauge(std::vector<cplx>& v) {
    size_t imax = 0;
    double best = -1.0;
    for (size_t i = 0; i < v.size(); ++i) {
        const double a = std::abs(v[i]);
        if (a > best) {
            best = a;
            imax = i;
        }
    }
    if (best <= 0.0) return;
    const cplx phase = std::conj(v[imax]) / best;
    for (auto& z : v) z *= phase;
}

// Relative L2 distance between traces after optimal phase alignment (the
// largest-sample gauge can flip sign when several samples tie in magnitude).
inline double gauge_distance(const std::vector<cplx>& u, const std::vector<cplx>& v,
                             const std::vector<double>* w = nullptr) {
    cplx inner(0.0, 0.0);
    double den = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        const double wi = w ? (*w)[i] : 1.0;
        inner += wi * std::conj(v[i]) * u[i];
        den += wi * std::norm(v[i]);
    }
    const double ai = std::abs(inner);
    const cplx phase = ai > 0.0 ? inner / ai : cplx(1.0, 0.0);
    double num = 0.0;
    for (size_t i = 0; i < u.size(); ++i) {
        const double wi = w ? (*w)[i] : 1.0;
        num += wi * std::norm(u[i] - phase * v[i]);
    }
    return std::sqrt(num / den);
}

inline double weyl_count_estimate(double area, double perimeter, double K) {
    return area * K * K / (4.0 * PI) + perimeter * K / (4.0 * PI);
}

inline double weyl_spacing(double area, double k) { return 2.0 * PI / (k * area); }

inline CMatrix jumps_matrix(const LayerOperator& op) {
    CMatrix a(op.matrix.rows, op.matrix.cols);
    for (int i = 0; i < a.rows; ++i)
        for (int j = 0; j < a.cols; ++j)
            a(i, j) = (i == j ? cplx(1.0, 0.0) : cplx(0.0, 0.0)) - op.matrix(i, j);
    return a;
}

// sigma_min of I - N(k) on a fresh mesh; plain (uncorrected) assembly by default
// for scanning speed.
inline double sigma_min_at(const DomainSpec& dom, double k, int npw, double near_beta = 0.0,
                           int iters = 10) {
    const BoundaryMesh mesh = build_mesh(dom, k, npw);
    const LayerOperator op = assemble_operator(mesh, k, near_beta);
    return sigma_min_inverse_iteration(jumps_matrix(op), iters).sigma;
}

struct ScanCandidate {
    double k_lo = 0.0, k_hi = 0.0;  // bracket
    double k_min = 0.0;             // grid sample at the dip
    double sigma = 0.0;
};

struct SpectrumScan {
    std::vector<double> ks, sigmas;
    std::vector<ScanCandidate> candidates;
    double weyl_dk = 0.0;   // estimated eigenvalue spacing at the top of the range
    bool too_coarse = false;
};

struct ScanOptions {
    int npw = 10;
    double sigma_threshold = 0.1;  // dips above this are not candidates
    bool strict = false;           // escalate the Weyl warning to an error
    int iters = 10;
};

inline SpectrumScan scan_spectrum(const DomainSpec& dom, double k_lo, double k_hi, double dk,
                                  const ScanOptions& opt = {}) {
    if (k_lo <= 0.0 || dk <= 0.0) throw Error("BadParams", "k range and step must be positive");
    SpectrumScan scan;
    if (k_hi <= k_lo) return scan;
    const double area = domain_area(dom);
    scan.weyl_dk = weyl_spacing(area, k_hi);
    scan.too_coarse = dk > 0.5 * scan.weyl_dk;
    if (scan.too_coarse && opt.strict)
        throw Error("ResolutionTooCoarse",
                    "scan step exceeds half the Weyl spacing 2pi/(k*Area) at k_hi");
    const int n = static_cast<int>(std::floor((k_hi - k_lo) / dk + 1e-9)) + 1;
    scan.ks.resize(n);
    scan.sigmas.resize(n);
    for (int i = 0; i < n; ++i) {
        scan.ks[i] = k_lo + i * dk;
        scan.sigmas[i] = sigma_min_at(dom, scan.ks[i], opt.npw, 0.0, opt.iters);
    }
    for (int i = 1; i + 1 < n; ++i) {
        if (scan.sigmas[i] < scan.sigmas[i - 1] && scan.sigmas[i] <= scan.sigmas[i + 1] &&
            scan.sigmas[i] < opt.sigma_threshold) {
            scan.candidates.push_back(
                {scan.ks[i - 1], scan.ks[i + 1], scan.ks[i], scan.sigmas[i]});
        }
    }
    return scan;
}

struct RefineOptions {
    int npw_search = 10;      // plain-assembly mesh density for the golden phase
    int npw = 12;             // corrected-assembly density for certification
    double tol_rel = 1e-9;    // golden-section stop: |interval| <= tol_rel * k
    double no_dip_sigma = 0.05;
    double degeneracy_offset = 1e-8;
    double norm_cells_per_wavelength = 3.0;  // triangulation resolution
    double pde_gate_factor = 1e-3;           // spurious defense: pde < factor * k^2
    int residual_budget = 16;
    bool certify = true;      // corrected polish + residual diagnostics
};

namespace eig_detail {

inline double parabola_vertex(double x0, double f0, double x1, double f1, double x2, double f2) {
    const double d1 = (f1 - f0) / (x1 - x0), d2 = (f2 - f1) / (x2 - x1);
    const double curv = (d2 - d1) / (x2 - x0);
    if (!(curv > 0.0)) return x1;
    return 0.5 * (x0 + x1 - d1 / curv);
}

// Golden-section minimize sigma(k), then a parabolic polish on sigma^2 (the dip
// is V-shaped in sigma, parabolic in sigma^2).
template <typename F>
double golden_parabolic(F&& sigma, double lo, double hi, double tol_abs) {
    const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = sigma(x1), f2 = sigma(x2);
    while (b - a > tol_abs) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = sigma(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = sigma(x2);
        }
    }
    const double xm = 0.5 * (a + b), h = std::max(0.5 * (b - a), 0.25 * tol_abs);
    const double fm = sigma(xm), fl = sigma(xm - h), fr = sigma(xm + h);
    const double v = parabola_vertex(xm - h, fl * fl, xm, fm * fm, xm + h, fr * fr);
    return (v > lo && v < hi) ? v : xm;
}

} // namespace eig_detail

// Interior-triangulation L2 normalization; returns the norm that was divided out.
inline double normalize_mode(EigenMode& mode, double cells_per_wavelength = 3.0) {
    const double lambda = 2.0 * PI / mode.k;
    const InteriorQuadrature quad =
        build_interior_quadrature(mode.mesh->domain, lambda / cells_per_wavelength);
    const double nrm = interior_l2_norm(*mode.mesh, mode.trace, mode.k, quad);
    if (!(nrm > 0.0)) throw Error("BadParams", "mode trace has zero interior norm");
    for (auto& z : mode.trace) z /= nrm;
    apply_phase_gauge(mode.trace);
    mode.normalized = true;
    return nrm;
}

// Residual diagnostics for a normalized mode.  `op` may supply a pre-assembled
// corrected operator at mode.k to avoid re-assembly.
inline ModeResiduals mode_residuals(const EigenMode& mode, int budget = 16,
                                    const LayerOperator* op = nullptr) {
    const BoundaryMesh& mesh = *mode.mesh;
    const DomainSpec& dom = mesh.domain;
    const double k = mode.k;
    ModeResiduals res;

    // jumps
    LayerOperator local;
    if (!op) {
        local = assemble_operator(mesh, k, 1.0);
        op = &local;
    }
    {
        const auto nu = matvec(op->matrix, mode.trace);
        double num = 0.0, den = 0.0;
        for (size_t i = 0; i < nu.size(); ++i) {
            num += std::norm(mode.trace[i] - nu[i]);
            den += std::norm(mode.trace[i]);
        }
        res.jumps = std::sqrt(num / den);
    }

    // interior sample centers, away from the boundary
    const int npts = std::max(4, budget);
    const int mfine = 256;
    Vec2 c{0, 0};
    double area2 = 0.0;
    {
        std::vector<Vec2> ring(mfine);
        for (int i = 0; i < mfine; ++i) ring[i] = dom.at_global(dom.L * (i + 0.5) / mfine).pos;
        for (int i = 0; i < mfine; ++i) {
            const Vec2 a = ring[i], b = ring[(i + 1) % mfine];
            const double cr = a.cross(b);
            area2 += cr;
            c = c + (a + b) * cr;
        }
        c = c * (1.0 / (3.0 * area2));
    }
    std::vector<Vec2> centers;
    for (int j = 0; j < npts; ++j) {
        const double frac = (j + 0.37) / npts;
        const double t = (j % 2 == 0) ? 0.35 : 0.6;
        const Vec2 b = dom.at_global(dom.L * frac).pos;
        centers.push_back(c + (b - c) * t);
    }

    // pde: Richardson-extrapolated 5-point Laplacian, h and h/2
    {
        const double h = 0.01 * 2.0 * PI / k;
        std::vector<Vec2> targets;
        for (const Vec2& x : centers) {
            targets.push_back(x);
            for (const double s : {h, 0.5 * h}) {
                targets.push_back({x.x + s, x.y});
                targets.push_back({x.x - s, x.y});
                targets.push_back({x.x, x.y + s});
                targets.push_back({x.x, x.y - s});
            }
        }
        const auto vals = interior_eval_corrected(mesh, mode.trace, k, targets);
        double worst = 0.0;
        for (size_t j = 0; j < centers.size(); ++j) {
            const cplx* v = &vals[9 * j];
            const cplx lap_h = (v[1] + v[2] + v[3] + v[4] - 4.0 * v[0]) / (h * h);
            const cplx lap_h2 = (v[5] + v[6] + v[7] + v[8] - 4.0 * v[0]) / (0.25 * h * h);
            const cplx lap = (4.0 * lap_h2 - lap_h) / 3.0;
            worst = std::max(worst, std::abs(lap + k * k * v[0]));
        }
        res.pde = worst;
    }

    // neumann: one-sided normal difference at edge-interior nodes (never
    // corners), from strictly interior samples -- involving the trace value
    // itself would divide the boundary-limit mismatch (Nu - u)/2 by t
    {
        const double t = 3e-3 / k;
        std::vector<Vec2> targets;
        std::vector<int> nodes;
        const int per_edge = std::max(1, budget / static_cast<int>(dom.edges.size()) / 2);
        for (size_t e = 0; e < dom.edges.size(); ++e) {
            for (int j = 0; j < per_edge; ++j) {
                const double s_frac = (j + 1.0) / (per_edge + 1.0);
                // nearest mesh node to this fraction of the edge
                int best = -1;
                double bd = 1e300;
                const auto [nfirst, ncount] = mesh.edge_nodes[e];
                for (int idx = nfirst; idx < nfirst + ncount; ++idx) {
                    const double d = std::abs(mesh.nodes[idx].s - s_frac * dom.edges[e].length);
                    if (d < bd) {
                        bd = d;
                        best = idx;
                    }
                }
                if (best < 0) continue;
                nodes.push_back(best);
                const MeshNode& nd = mesh.nodes[best];
                targets.push_back(nd.pos - nd.normal * t);
                targets.push_back(nd.pos - nd.normal * (2.0 * t));
                targets.push_back(nd.pos - nd.normal * (3.0 * t));
            }
        }
        const auto vals = interior_eval_corrected(mesh, mode.trace, k, targets);
        double worst = 0.0;
        for (size_t j = 0; j < nodes.size(); ++j) {
            const cplx f1 = vals[3 * j], f2 = vals[3 * j + 1], f3 = vals[3 * j + 2];
            // d/dt phi(q - t nu) at t -> 0 is -d_nu phi; second-order extrapolating
            // difference from the three interior samples
            const cplx dn = -(-2.5 * f1 + 4.0 * f2 - 1.5 * f3) / t;
            worst = std::max(worst, std::abs(dn) / k);
        }
        res.neumann = worst;
    }
    return res;
}

// Refine one scan bracket into one mode (or a split near-degenerate pair).
inline std::vector<EigenMode> refine_bracket(const DomainSpec& dom, double k_lo, double k_hi,
                                             const RefineOptions& opt = {}) {
    if (!(k_lo > 0.0 && k_hi > k_lo)) throw Error("BadParams", "bad bracket");

    auto sigma_plain = [&](double k) { return sigma_min_at(dom, k, opt.npw_search, 0.0, 12); };

    // presample to confirm an interior dip
    const int pres = 9;
    double best_k = 0.0, best_sig = 1e300;
    int best_i = -1;
    for (int i = 0; i < pres; ++i) {
        const double k = k_lo + (k_hi - k_lo) * i / (pres - 1.0);
        const double s = sigma_plain(k);
        if (s < best_sig) {
            best_sig = s;
            best_k = k;
            best_i = i;
        }
    }
    if (best_i == 0 || best_i == pres - 1)
        throw Error("NoDipInBracket", "sigma_min decreasing toward the bracket edge");

    const double step = (k_hi - k_lo) / (pres - 1.0);
    const double tol_abs = opt.tol_rel * best_k;
    double k_star = eig_detail::golden_parabolic(sigma_plain, best_k - step, best_k + step,
                                                 tol_abs);
    if (sigma_plain(k_star) > opt.no_dip_sigma)
        throw Error("NoDipInBracket", "minimum sigma stayed above the dip threshold");

    // certification mesh + corrected operator; parabolic re-polish on the
    // corrected sigma since plain assembly can shift the dip slightly
    auto sigma_corr = [&](double k, BoundaryMesh* mesh_out,
                          CMatrix* jm_out) -> double {
        BoundaryMesh mesh = build_mesh(dom, k, opt.npw);
        const LayerOperator op = assemble_operator(mesh, k, 1.0);
        CMatrix jm = jumps_matrix(op);
        const double s = sigma_min_inverse_iteration(jm, 14).sigma;
        if (mesh_out) *mesh_out = std::move(mesh);
        if (jm_out) *jm_out = std::move(jm);
        return s;
    };

    if (opt.certify) {
        // The plain-assembly dip can sit ~1e-4 relative off the corrected one, so
        // re-polish on the corrected sigma: sigma^2 is parabolic near the dip, and
        // two shrinking rounds recover the vertex to well below 1e-6 relative.
        double dk = std::max(2e-5 * k_star, 20.0 * tol_abs);
        for (int round = 0; round < 3; ++round) {
            const double f0 = sigma_corr(k_star - dk, nullptr, nullptr);
            const double f1 = sigma_corr(k_star, nullptr, nullptr);
            const double f2 = sigma_corr(k_star + dk, nullptr, nullptr);
            const double v = eig_detail::parabola_vertex(k_star - dk, f0 * f0, k_star, f1 * f1,
                                                         k_star + dk, f2 * f2);
            const double shift = std::abs(v - k_star);
            if (shift < 5.0 * dk) k_star = v;
            if (shift < 0.05 * dk) break;
            dk = std::max(0.1 * dk, std::max(shift * 0.3, 2.0 * tol_abs));
        }
    }

    auto mesh = std::make_shared<BoundaryMesh>();
    CMatrix jm;
    {
        BoundaryMesh tmp;
        sigma_corr(k_star, &tmp, &jm);
        *mesh = std::move(tmp);
    }
    const SigmaLadder ladder = sigma_smallest_subspace(jm, 3, 18);
    const double s1 = ladder.sigmas[0], s2 = ladder.sigmas[1], s3 = ladder.sigmas[2];
    if (s3 < 10.0 * s1 + opt.degeneracy_offset)
        throw Error("DegenerateCluster", "more than two tiny singular values at k*");
    const bool pair = s2 < 10.0 * s1 + opt.degeneracy_offset;

    std::vector<EigenMode> out;
    const int count = pair ? 2 : 1;
    for (int j = 0; j < count; ++j) {
        EigenMode mode;
        mode.k = k_star;
        mode.mesh = mesh;
        mode.trace = ladder.right[j];
        mode.provenance = "solver";
        mode.degenerate_pair = pair;
        apply_phase_gauge(mode.trace);
        normalize_mode(mode, opt.norm_cells_per_wavelength);
        if (opt.certify) {
            LayerOperator op;
            op.k = k_star;
            op.mesh = mesh.get();
            op.matrix = CMatrix(jm.rows, jm.cols);
            for (int r = 0; r < jm.rows; ++r)
                for (int c2 = 0; c2 < jm.cols; ++c2)
                    op.matrix(r, c2) = (r == c2 ? cplx(1.0, 0.0) : cplx(0.0, 0.0)) - jm(r, c2);
            mode.residuals = mode_residuals(mode, opt.residual_budget, &op);
            mode.spurious = mode.residuals.pde > opt.pde_gate_factor * k_star * k_star;
        }
        out.push_back(std::move(mode));
    }
    return out;
}

inline EigenMode refine_mode(const DomainSpec& dom, double k_lo, double k_hi,
                             const RefineOptions& opt = {}) {
    return refine_bracket(dom, k_lo, k_hi, opt).front();
}

} // namespace bil
