#pragma once

#include <vector>
#include <map>
#include <mutex>
#include <cmath>
#include <stdexcept>
#include <functional>

#define LAPACK_COMPLEX_CPP
#include "bil/lapack_config.hpp"

namespace bil {

struct QuadRule {
    std::vector<double> x;
    std::vector<double> w;
};

namespace detail {

// Golub-Welsch: nodes/weights from the symmetric tridiagonal Jacobi matrix.
inline QuadRule golub_welsch(std::vector<double> diag, std::vector<double> off, double mu0) {
    const int n = static_cast<int>(diag.size());
    std::vector<double> z(static_cast<size_t>(n) * n);
    const lapack_int info = LAPACKE_dstev(LAPACK_ROW_MAJOR, 'V', n, diag.data(), off.data(),
                                          z.data(), n);
    if (info != 0) throw std::runtime_error("dstev failed in quadrature construction");
    QuadRule r;
    r.x = std::move(diag);
    r.w.resize(n);
    for (int j = 0; j < n; ++j) {
        const double v0 = z[static_cast<size_t>(j)];  // first row of eigenvector j
        r.w[j] = mu0 * v0 * v0;
    }
    return r;
}

inline const QuadRule& cached(std::map<int, QuadRule>& cache, std::mutex& mtx, int n,
                              const std::function<QuadRule(int)>& make) {
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, make(n)).first;
    return it->second;
}

} // namespace detail

// Gauss-Legendre on [-1, 1].
inline const QuadRule& gauss_legendre(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mtx;
    return detail::cached(cache, mtx, n, [](int m) {
        std::vector<double> diag(m, 0.0), off(m > 1 ? m - 1 : 0);
        for (int i = 1; i < m; ++i) off[i - 1] = i / std::sqrt(4.0 * i * i - 1.0);
        return detail::golub_welsch(std::move(diag), std::move(off), 2.0);
    });
}

// Gauss-Hermite, weight exp(-x^2) on (-inf, inf).
inline const QuadRule& gauss_hermite(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mtx;
    return detail::cached(cache, mtx, n, [](int m) {
        std::vector<double> diag(m, 0.0), off(m > 1 ? m - 1 : 0);
        for (int i = 1; i < m; ++i) off[i - 1] = std::sqrt(0.5 * i);
        return detail::golub_welsch(std::move(diag), std::move(off), std::sqrt(M_PI));
    });
}

// Gauss-Laguerre, weight exp(-x) on [0, inf).
inline const QuadRule& gauss_laguerre(int n) {
    static std::map<int, QuadRule> cache;
    static std::mutex mtx;
    return detail::cached(cache, mtx, n, [](int m) {
        std::vector<double> diag(m), off(m > 1 ? m - 1 : 0);
        for (int i = 0; i < m; ++i) diag[i] = 2.0 * i + 1.0;
        for (int i = 1; i < m; ++i) off[i - 1] = static_cast<double>(i);
        return detail::golub_welsch(std::move(diag), std::move(off), 1.0);
    });
}

// Map a reference rule to [a, b].
inline void map_rule(const QuadRule& ref, double a, double b,
                     std::vector<double>& x, std::vector<double>& w) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    x.resize(ref.x.size());
    w.resize(ref.w.size());
    for (size_t i = 0; i < ref.x.size(); ++i) {
        x[i] = mid + half * ref.x[i];
        w[i] = half * ref.w[i];
    }
}

// Composite Gauss-Legendre over [a, b] with panels no wider than max_panel.
inline QuadRule composite_gl(double a, double b, double max_panel, int pts_per_panel = 8) {
    const int nseg = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel)));
    const QuadRule& ref = gauss_legendre(pts_per_panel);
    QuadRule out;
    out.x.reserve(static_cast<size_t>(nseg) * pts_per_panel);
    out.w.reserve(static_cast<size_t>(nseg) * pts_per_panel);
    for (int s = 0; s < nseg; ++s) {
        const double pa = a + (b - a) * s / nseg;
        const double pb = a + (b - a) * (s + 1) / nseg;
        std::vector<double> x, w;
        map_rule(ref, pa, pb, x, w);
        out.x.insert(out.x.end(), x.begin(), x.end());
        out.w.insert(out.w.end(), w.begin(), w.end());
    }
    return out;
}

// Panel breakpoints on [0, L] graded toward both ends: (L/2)*(i/m)^p from each side.
// With grade_left/right false the corresponding half is uniform at comparable density.
inline std::vector<double> graded_breakpoints(double L, int m_half, double p,
                                              bool grade_left = true, bool grade_right = true) {
    std::vector<double> brk;
    brk.reserve(2 * m_half + 1);
    const double half = 0.5 * L;
    for (int i = 0; i <= m_half; ++i) {
        const double f = static_cast<double>(i) / m_half;
        brk.push_back(half * (grade_left ? std::pow(f, p) : f));
    }
    for (int i = m_half - 1; i >= 0; --i) {
        const double f = static_cast<double>(i) / m_half;
        brk.push_back(L - half * (grade_right ? std::pow(f, p) : f));
    }
    return brk;
}

// Barycentric Lagrange weights for interpolation nodes.
inline std::vector<double> barycentric_weights(const std::vector<double>& nodes) {
    const size_t n = nodes.size();
    std::vector<double> w(n, 1.0);
    for (size_t j = 0; j < n; ++j)
        for (size_t k = 0; k < n; ++k)
            if (k != j) w[j] /= (nodes[j] - nodes[k]);
    return w;
}

// Evaluate barycentric interpolation coefficients of target t against nodes:
// p(t) = sum_j c_j(t) f_j.
inline std::vector<double> barycentric_coeffs(const std::vector<double>& nodes,
                                              const std::vector<double>& bw, double t) {
    const size_t n = nodes.size();
    std::vector<double> c(n, 0.0);
    for (size_t j = 0; j < n; ++j) {
        const double d = t - nodes[j];
        if (std::abs(d) < 1e-14 * (std::abs(t) + 1.0)) {
            std::fill(c.begin(), c.end(), 0.0);
            c[j] = 1.0;
            return c;
        }
        c[j] = bw[j] / d;
    }
    double s = 0.0;
    for (double v : c) s += v;
    for (double& v : c) v /= s;
    return c;
}

} // namespace bil
