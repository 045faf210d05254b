#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <vector>

#include "bil/eigensolver.hpp"
#include "bil/interior_quadrature.hpp"

namespace bil {

namespace measure_detail {

// Distance from p to the boundary polyline, refined on the nearest edge.
inline double boundary_distance(const DomainSpec& dom, Vec2 p) {
    double best = 1e300;
    int best_edge = -1;
    double best_s = 0.0;
    const int per_edge = 128;
    for (int e = 0; e < dom.num_edges(); ++e) {
        const double len = dom.edges[e].length;
        for (int q = 0; q <= per_edge; ++q) {
            const double s = len * q / per_edge;
            const double d = (dom.at(e, s).pos - p).norm();
            if (d < best) {
                best = d;
                best_edge = e;
                best_s = s;
            }
        }
    }
    const double len = dom.edges[best_edge].length;
    double lo = std::max(0.0, best_s - len / per_edge);
    double hi = std::min(len, best_s + len / per_edge);
    for (int it = 0; it < 60; ++it) {
        const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
        const double d1 = (dom.at(best_edge, m1).pos - p).norm();
        const double d2 = (dom.at(best_edge, m2).pos - p).norm();
        if (d1 < d2)
            hi = m2;
        else
            lo = m1;
    }
    return std::min(best, (dom.at(best_edge, 0.5 * (lo + hi)).pos - p).norm());
}

inline bool closure_contains(const DomainSpec& dom, Vec2 p, double tol) {
    if (dom.contains(p)) return true;
    return boundary_distance(dom, p) <= tol;
}

// Exit distance of the ray p + t*dir through the boundary; 0 when the ray
// leaves the (convex) domain immediately.
inline double exit_distance(const DomainSpec& dom, Vec2 p, Vec2 dir) {
    std::vector<geo_detail::RayHit> hits;
    for (int e = 0; e < dom.num_edges(); ++e) geo_detail::ray_edge_hits(dom, e, p, dir, hits);
    if (hits.empty()) return 0.0;
    double t = 1e300;
    for (const auto& h : hits) t = std::min(t, h.ray_t);
    // A boundary start point whose ray points outward can still produce a
    // grazing far hit; check the midpoint stays inside.
    if (!dom.contains(p + dir * (0.5 * t), 0.0) && !closure_contains(dom, p + dir * (0.5 * t), 1e-9 * std::max(1.0, dom.L)))
        return 0.0;
    return t;
}

}  // namespace measure_detail

struct BallMassResult {
    double value = 0.0;
    double error_estimate = 0.0;
    int points = 0;
};

// L^2 mass of the mode on B(p0, r) intersected with the domain, by polar
// quadrature about p0 clipped to the boundary along each ray, refined until
// two consecutive resolutions agree within 1e-3*(value + h).
inline BallMassResult ball_mass_detailed(const EigenMode& mode, Vec2 p0, double r,
                                         double near_beta = 1.0) {
    const BoundaryMesh& mesh = *mode.mesh;
    const DomainSpec& dom = mesh.domain;
    if (!(r > 0.0)) throw Error("BadParams", "radius must be positive");
    if (!measure_detail::closure_contains(dom, p0, 1e-7 * std::max(1.0, dom.L)))
        throw Error("CenterOutside", "ball center must lie in the closed domain");
    const double lambda = 2.0 * PI / mode.k;
    double near_spacing = 0.0;
    double near_dist = 1e300;
    for (const auto& n : mesh.nodes) {
        const double d = (n.pos - p0).norm();
        if (d < near_dist) {
            near_dist = d;
            near_spacing = n.spacing;
        }
    }
    if (r < 3.0 * near_spacing)
        throw Error("RadiusTooSmallForMesh",
                    "radius below 3 local mesh spacings at the ball center");

    const double h = 1.0 / mode.k;
    const QuadRule& gl8 = gauss_legendre(8);

    auto evaluate = [&](int level, int& npts) {
        const int nth_pan = std::max(6, static_cast<int>(std::ceil(2.0 * PI * r / lambda * 1.5)))
                            << level;
        std::vector<Vec2> targets;
        std::vector<double> weights;
        for (int tp = 0; tp < nth_pan; ++tp) {
            const double th_lo = 2.0 * PI * tp / nth_pan;
            const double th_hi = 2.0 * PI * (tp + 1) / nth_pan;
            for (int a = 0; a < 8; ++a) {
                const double th = 0.5 * (th_lo + th_hi) + 0.5 * (th_hi - th_lo) * gl8.x[a];
                const double wth = 0.5 * (th_hi - th_lo) * gl8.w[a];
                const Vec2 dir{std::cos(th), std::sin(th)};
                const double rmax =
                    std::min(r, measure_detail::exit_distance(dom, p0, dir));
                if (rmax <= 0.0) continue;
                const int nr_pan =
                    std::max(2, static_cast<int>(std::ceil(rmax / lambda * 2.5))) << level;
                for (int rp = 0; rp < nr_pan; ++rp) {
                    const double r_lo = rmax * rp / nr_pan, r_hi = rmax * (rp + 1) / nr_pan;
                    for (int b = 0; b < 8; ++b) {
                        const double rr = 0.5 * (r_lo + r_hi) + 0.5 * (r_hi - r_lo) * gl8.x[b];
                        const double wr = 0.5 * (r_hi - r_lo) * gl8.w[b];
                        targets.push_back(p0 + dir * rr);
                        weights.push_back(wth * wr * rr);
                    }
                }
            }
        }
        npts = static_cast<int>(targets.size());
        const auto vals = interior_eval_corrected(mesh, mode.trace, mode.k, targets, near_beta);
        double acc = 0.0;
        for (std::size_t i = 0; i < vals.size(); ++i) acc += weights[i] * std::norm(vals[i]);
        return acc;
    };

    BallMassResult res;
    int npts = 0;
    double prev = evaluate(0, npts);
    for (int level = 1; level <= 3; ++level) {
        const double cur = evaluate(level, npts);
        res.value = cur;
        res.error_estimate = std::abs(cur - prev);
        res.points = npts;
        if (res.error_estimate <= 0.5e-3 * (std::abs(cur) + h)) return res;
        prev = cur;
    }
    return res;
}

inline double ball_mass(const EigenMode& mode, Vec2 p0, double r, double near_beta = 1.0) {
    return ball_mass_detailed(mode, p0, r, near_beta).value;
}

// Arclength window on one edge.
struct EdgeWindow {
    enum class Kind { Full, ExcludeCollars, Explicit };
    Kind kind = Kind::Full;
    double collar = 0.0;        // ExcludeCollars: width removed at each end
    double s_lo = 0.0, s_hi = 0.0;  // Explicit bounds

    static EdgeWindow full() { return {}; }
    static EdgeWindow exclude_collars(double width) {
        EdgeWindow w;
        w.kind = Kind::ExcludeCollars;
        w.collar = width;
        return w;
    }
    static EdgeWindow range(double lo, double hi) {
        EdgeWindow w;
        w.kind = Kind::Explicit;
        w.s_lo = lo;
        w.s_hi = hi;
        return w;
    }
};

// L^2 norm of the boundary trace over the window, by the mesh quadrature
// weights of the nodes inside it.
inline double restriction_norm(const EigenMode& mode, int edge, const EdgeWindow& window) {
    const BoundaryMesh& mesh = *mode.mesh;
    if (edge < 0 || edge >= mesh.domain.num_edges())
        throw Error("BadParams", "edge out of range");
    const double len = mesh.domain.edges[edge].length;
    double lo = 0.0, hi = len;
    switch (window.kind) {
        case EdgeWindow::Kind::Full:
            break;
        case EdgeWindow::Kind::ExcludeCollars:
            if (window.collar < 0.0) throw Error("BadWindow", "collar width must be nonnegative");
            lo = window.collar;
            hi = len - window.collar;
            break;
        case EdgeWindow::Kind::Explicit:
            if (!(window.s_lo >= 0.0 && window.s_hi <= len && window.s_lo <= window.s_hi))
                throw Error("BadWindow", "window must satisfy 0 <= s_lo <= s_hi <= edge length");
            lo = window.s_lo;
            hi = window.s_hi;
            break;
    }
    if (hi <= lo) return 0.0;
    const auto [nfirst, ncount] = mesh.edge_nodes[edge];
    if (static_cast<int>(mode.trace.size()) != mesh.size())
        throw Error("BadParams", "trace length does not match the mesh");
    double acc = 0.0;
    for (int i = 0; i < ncount; ++i) {
        const MeshNode& n = mesh.nodes[nfirst + i];
        if (n.s >= lo && n.s <= hi) acc += n.w * std::norm(mode.trace[nfirst + i]);
    }
    return std::sqrt(acc);
}

enum class FitMethod { LeastSquares, UpperEnvelope };

struct ScalingFit {
    std::vector<std::pair<double, double>> samples;  // (h, value)
    double slope = 0.0;                              // least-squares d log v / d log h
    double intercept = 0.0;
    double r2 = 0.0;
    double envelope_slope = 0.0;  // fit through per-dyadic-bin maxima
    double envelope_intercept = 0.0;
    FitMethod method = FitMethod::LeastSquares;

    double primary_slope() const {
        return method == FitMethod::UpperEnvelope ? envelope_slope : slope;
    }
};

namespace measure_detail {

struct LineFit {
    double slope = 0.0, intercept = 0.0, r2 = 1.0;
};

inline LineFit least_squares(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    LineFit f;
    const double den = n * sxx - sx * sx;
    if (den == 0.0) throw Error("DegenerateSpan", "all abscissae coincide");
    f.slope = (n * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / n;
    double ss_res = 0.0, ss_tot = 0.0;
    const double ybar = sy / n;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double fit = f.slope * x[i] + f.intercept;
        ss_res += (y[i] - fit) * (y[i] - fit);
        ss_tot += (y[i] - ybar) * (y[i] - ybar);
    }
    f.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
    return f;
}

}  // namespace measure_detail

// Slope of log value against log h: plain least squares, plus the fit
// through per-dyadic-bin maxima (the right statistic for one-sided O(.)
// bounds, where only the envelope is constrained).
inline ScalingFit fit_exponent(const std::vector<std::pair<double, double>>& samples,
                               FitMethod method = FitMethod::LeastSquares) {
    if (samples.size() < 4) throw Error("TooFewSamples", "need at least 4 (h, value) samples");
    double hmin = 1e300, hmax = 0.0;
    for (const auto& [h, v] : samples) {
        if (!(h > 0.0) || !(v > 0.0))
            throw Error("BadParams", "log-log fit needs positive h and value");
        hmin = std::min(hmin, h);
        hmax = std::max(hmax, h);
    }
    if (hmax / hmin < std::sqrt(10.0))
        throw Error("DegenerateSpan", "samples must span at least half a decade in h");

    ScalingFit fit;
    fit.samples = samples;
    fit.method = method;
    std::vector<double> lx, ly;
    for (const auto& [h, v] : samples) {
        lx.push_back(std::log(h));
        ly.push_back(std::log(v));
    }
    const auto ls = measure_detail::least_squares(lx, ly);
    fit.slope = ls.slope;
    fit.intercept = ls.intercept;
    fit.r2 = ls.r2;

    // Dyadic bins in h, maxima per bin.
    std::map<long, std::pair<double, double>> bins;
    for (const auto& [h, v] : samples) {
        const long b = static_cast<long>(std::floor(std::log2(h / hmin) * (1.0 - 1e-12)));
        auto it = bins.find(b);
        if (it == bins.end() || v > it->second.second) bins[b] = {h, v};
    }
    std::vector<double> ex, ey;
    for (const auto& [b, hv] : bins) {
        (void)b;
        ex.push_back(std::log(hv.first));
        ey.push_back(std::log(hv.second));
    }
    if (ex.size() >= 2) {
        const auto env = measure_detail::least_squares(ex, ey);
        fit.envelope_slope = env.slope;
        fit.envelope_intercept = env.intercept;
    } else {
        fit.envelope_slope = fit.slope;
        fit.envelope_intercept = fit.intercept;
    }
    return fit;
}

}  // namespace bil
