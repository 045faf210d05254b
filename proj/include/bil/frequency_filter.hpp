#pragma once

#include <complex>
#include <functional>
#include <vector>

#include <fftw3.h>

#include "bil/cutoffs.hpp"
#include "bil/linalg.hpp"
#include "bil/mesh.hpp"

namespace bil {

enum class FreqPass { Glancing, Transversal };

// Glancing window: 1 on | |xi| - 1 | <= eps0, 0 beyond 2*eps0, smooth
// monotone shoulders in between.
inline double glancing_window(double xi, double eps0) {
    const double d = std::abs(std::abs(xi) - 1.0);
    if (d <= eps0) return 1.0;
    if (d >= 2.0 * eps0) return 0.0;
    return 1.0 - smooth_step(d / eps0 - 1.0);
}

// Transversal-incidence window about |xi| = cos(pi - alpha) for a corner of
// opening angle alpha.  The plateau covers the exact preimage of the glancing
// band under free propagation across the corner: a unit direction with
// target-tangential component in 1 +- 2*eps0 has source-tangential component
// within 2*eps0*|cos b| + 2*sqrt(eps0(1-eps0))*sin b of cos b, b = pi - alpha
// (the sqrt comes from the tangency degeneracy), so a fixed O(eps0) width
// would lose the bulk of the geometric transfer.
inline double transversal_window(double xi, double alpha, double eps0) {
    const double b = PI - alpha;
    const double center = std::abs(std::cos(b));
    const double half = 2.0 * eps0 * center +
                        2.0 * std::sqrt(eps0 * (1.0 - eps0)) * std::abs(std::sin(b));
    const double d = std::abs(std::abs(xi) - center);
    if (d <= half) return 1.0;
    if (d >= 2.0 * half) return 0.0;
    return 1.0 - smooth_step(d / half - 1.0);
}

namespace freq_detail {

// Uniform midpoint grid arclengths for one edge.
inline std::vector<double> uniform_grid(double len, int m) {
    std::vector<double> x(m);
    const double dx = len / m;
    for (int i = 0; i < m; ++i) x[i] = dx * (i + 0.5);
    return x;
}

// Interpolate edge-local node values to arbitrary arclengths via the
// panel-wise barycentric Lagrange form of the underlying quadrature mesh.
inline std::vector<cplx> graded_to_points(const BoundaryMesh& mesh, int edge,
                                          const std::vector<cplx>& vals,
                                          const std::vector<double>& targets) {
    const auto [pfirst, pcount] = mesh.edge_panels[edge];
    const auto [nfirst, ncount] = mesh.edge_nodes[edge];
    (void)ncount;
    std::vector<cplx> out(targets.size());
    for (std::size_t t = 0; t < targets.size(); ++t) {
        const double s = targets[t];
        int lo = pfirst, hi = pfirst + pcount - 1;
        while (lo < hi) {
            const int mid = (lo + hi) / 2;
            if (mesh.panels[mid].s_hi < s)
                lo = mid + 1;
            else
                hi = mid;
        }
        const MeshPanel& pan = mesh.panels[lo];
        cplx num = 0.0;
        double den = 0.0;
        bool exact = false;
        for (int j = 0; j < pan.count && !exact; ++j) {
            const double sj = mesh.nodes[pan.first + j].s;
            if (std::abs(s - sj) < 1e-14 * std::max(1.0, std::abs(s))) {
                out[t] = vals[pan.first + j - nfirst];
                exact = true;
            }
        }
        if (exact) continue;
        for (int j = 0; j < pan.count; ++j) {
            const double sj = mesh.nodes[pan.first + j].s;
            double bw = 1.0;
            for (int l = 0; l < pan.count; ++l)
                if (l != j) bw /= (sj - mesh.nodes[pan.first + l].s);
            const double r = bw / (s - sj);
            num += r * vals[pan.first + j - nfirst];
            den += r;
        }
        out[t] = num / den;
    }
    return out;
}

// Signed frequency index of DFT bin l on an m-point grid.
inline int signed_bin(int l, int m) { return l <= m / 2 ? l : l - m; }

struct FftPlan {
    int m;
    std::vector<cplx> buf;
    fftw_plan fwd, bwd;

    explicit FftPlan(int m_) : m(m_), buf(m_) {
        auto* p = reinterpret_cast<fftw_complex*>(buf.data());
        fwd = fftw_plan_dft_1d(m, p, p, FFTW_FORWARD, FFTW_ESTIMATE);
        bwd = fftw_plan_dft_1d(m, p, p, FFTW_BACKWARD, FFTW_ESTIMATE);
    }
    ~FftPlan() {
        fftw_destroy_plan(fwd);
        fftw_destroy_plan(bwd);
    }
    FftPlan(const FftPlan&) = delete;
    FftPlan& operator=(const FftPlan&) = delete;
};

}  // namespace freq_detail

// Spectral multiplier on a flat edge.  The trace, given on the edge's graded
// quadrature nodes, is resampled to a uniform grid by band-limited (mesh
// polynomial) interpolation, transformed by a length-|Gamma_j| DFT whose mode
// l carries semiclassical frequency xi = 2*pi*l*h/|Gamma_j|, multiplied by
// window(xi), and evaluated back at the graded nodes from the trigonometric
// series.  The window argument makes the glancing, transversal, and
// corner-angle passes share one code path.
// period_pad > 1 runs the DFT on a zero-padded interval of period_pad*len,
// refining the frequency lattice by that factor.  Exact for traces that
// vanish smoothly at both edge ends (corner-collared signals); a padded
// transform of a non-vanishing trace pays a periodization jump, so the
// default keeps the native edge period.
inline std::vector<cplx> frequency_multiplier(const BoundaryMesh& mesh, int edge,
                                              const std::vector<cplx>& trace, double h,
                                              const std::function<double(double)>& window,
                                              int samples_per_wavelength = 0, int period_pad = 1) {
    if (edge < 0 || edge >= mesh.domain.num_edges()) throw Error("BadParams", "edge out of range");
    if (!mesh.domain.edges[edge].flat)
        throw Error("NotFlat", "frequency multiplier requires a flat edge");
    if (!(h > 0.0)) throw Error("BadParams", "h must be positive");
    if (period_pad < 1) throw Error("BadParams", "period_pad must be at least 1");
    const auto [nfirst, ncount] = mesh.edge_nodes[edge];
    (void)nfirst;
    if (static_cast<int>(trace.size()) != ncount)
        throw Error("BadParams", "trace length does not match the edge node count");

    const double len = mesh.domain.edges[edge].length;
    const double lam = 2.0 * PI * h;
    if (static_cast<double>(ncount) * lam / len < 6.0)
        throw Error("TooFewSamples", "edge mesh resolves fewer than 6 nodes per wavelength");
    int spw = samples_per_wavelength > 0 ? samples_per_wavelength : 2 * mesh.npw;
    if (spw < 6) throw Error("TooFewSamples", "need at least 6 uniform samples per wavelength");

    const int m = std::max(32, static_cast<int>(std::ceil(spw * len / lam)));
    const int M = m * period_pad;
    const double P = len * period_pad;
    const auto xu = freq_detail::uniform_grid(len, m);
    auto uni = freq_detail::graded_to_points(mesh, edge, trace, xu);

    freq_detail::FftPlan plan(M);
    std::fill(plan.buf.begin(), plan.buf.end(), cplx(0.0, 0.0));
    std::copy(uni.begin(), uni.end(), plan.buf.begin());
    fftw_execute(plan.fwd);
    for (int l = 0; l < M; ++l) {
        const double xi = 2.0 * PI * freq_detail::signed_bin(l, M) * h / P;
        plan.buf[l] *= window(xi) / static_cast<double>(M);
    }

    // Evaluate the windowed series at the graded node arclengths.
    std::vector<cplx> out(ncount, cplx(0.0, 0.0));
    const double x0 = 0.5 * len / m;
    for (int l = 0; l < M; ++l) {
        const cplx c = plan.buf[l];
        if (std::abs(c) == 0.0) continue;
        const double om = 2.0 * PI * freq_detail::signed_bin(l, M) / P;
        for (int i = 0; i < ncount; ++i) {
            const double s = mesh.nodes[nfirst + i].s - x0;
            out[i] += c * std::polar(1.0, om * s);
        }
    }
    return out;
}

inline std::vector<cplx> frequency_multiplier(const BoundaryMesh& mesh, int edge,
                                              const std::vector<cplx>& trace, double h,
                                              double eps0, FreqPass pass,
                                              int samples_per_wavelength = 0, int period_pad = 1) {
    if (!(eps0 > 0.0 && eps0 < 0.5)) throw Error("BadParams", "eps0 must lie in (0, 1/2)");
    auto win = [eps0, pass](double xi) {
        const double g = glancing_window(xi, eps0);
        return pass == FreqPass::Glancing ? g : 1.0 - g;
    };
    return frequency_multiplier(mesh, edge, trace, h, win, samples_per_wavelength, period_pad);
}

// Dense matrix form of the same multiplier, acting on edge-node values.
inline CMatrix frequency_multiplier_matrix(const BoundaryMesh& mesh, int edge, double h,
                                           const std::function<double(double)>& window,
                                           int samples_per_wavelength = 0, int period_pad = 1) {
    if (edge < 0 || edge >= mesh.domain.num_edges()) throw Error("BadParams", "edge out of range");
    if (!mesh.domain.edges[edge].flat)
        throw Error("NotFlat", "frequency multiplier requires a flat edge");
    if (!(h > 0.0)) throw Error("BadParams", "h must be positive");
    if (period_pad < 1) throw Error("BadParams", "period_pad must be at least 1");
    const auto [nfirst, ncount] = mesh.edge_nodes[edge];
    const double len = mesh.domain.edges[edge].length;
    const double lam = 2.0 * PI * h;
    if (static_cast<double>(ncount) * lam / len < 6.0)
        throw Error("TooFewSamples", "edge mesh resolves fewer than 6 nodes per wavelength");
    int spw = samples_per_wavelength > 0 ? samples_per_wavelength : 2 * mesh.npw;
    if (spw < 6) throw Error("TooFewSamples", "need at least 6 uniform samples per wavelength");

    const int m = std::max(32, static_cast<int>(std::ceil(spw * len / lam)));
    const int M = m * period_pad;
    const double P = len * period_pad;
    const auto xu = freq_detail::uniform_grid(len, m);

    // Columns of the graded->uniform interpolation operator.
    CMatrix interp(m, ncount);
    {
        std::vector<cplx> e(ncount, cplx(0.0, 0.0));
        for (int c = 0; c < ncount; ++c) {
            e[c] = 1.0;
            auto col = freq_detail::graded_to_points(mesh, edge, e, xu);
            for (int i = 0; i < m; ++i) interp(i, c) = col[i];
            e[c] = 0.0;
        }
    }

    std::vector<double> win(M);
    std::vector<double> om(M);
    for (int l = 0; l < M; ++l) {
        const int lb = freq_detail::signed_bin(l, M);
        win[l] = window(2.0 * PI * lb * h / P);
        om[l] = 2.0 * PI * lb / P;
    }

    // Windowed spectra of the interpolation columns ...
    freq_detail::FftPlan plan(M);
    CMatrix spec(M, ncount);
    for (int c = 0; c < ncount; ++c) {
        std::fill(plan.buf.begin(), plan.buf.end(), cplx(0.0, 0.0));
        for (int i = 0; i < m; ++i) plan.buf[i] = interp(i, c);
        fftw_execute(plan.fwd);
        for (int l = 0; l < M; ++l) spec(l, c) = plan.buf[l] * (win[l] / static_cast<double>(M));
    }

    // ... evaluated at the graded nodes through a precomputed phase table.
    const double x0 = 0.5 * len / m;
    CMatrix phase(ncount, M);
    for (int r = 0; r < ncount; ++r) {
        const double s = mesh.nodes[nfirst + r].s - x0;
        for (int l = 0; l < M; ++l)
            phase(r, l) = win[l] == 0.0 ? cplx(0.0, 0.0) : std::polar(1.0, om[l] * s);
    }
    return matmul(phase, spec);
}

inline CMatrix frequency_multiplier_matrix(const BoundaryMesh& mesh, int edge, double h,
                                           double eps0, FreqPass pass,
                                           int samples_per_wavelength = 0, int period_pad = 1) {
    if (!(eps0 > 0.0 && eps0 < 0.5)) throw Error("BadParams", "eps0 must lie in (0, 1/2)");
    auto win = [eps0, pass](double xi) {
        const double g = glancing_window(xi, eps0);
        return pass == FreqPass::Glancing ? g : 1.0 - g;
    };
    return frequency_multiplier_matrix(mesh, edge, h, win, samples_per_wavelength, period_pad);
}

}  // namespace bil
