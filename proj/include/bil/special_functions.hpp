#pragma once

#include <complex>
#include <vector>
#include <cmath>
#include <stdexcept>
#include <functional>

#include "bil/constants.hpp"
#include "bil/quadrature.hpp"

namespace bil {

struct Bessel01 {
    double j0, y0, j1, y1;
};

namespace sf_detail {

// Ascending series, reliable for x < ~12 before cancellation bites.
inline Bessel01 bessel01_series(double x) {
    const double q = 0.25 * x * x;
    double term = 1.0, j0 = 1.0;
    for (int m = 1; m < 80; ++m) {
        term *= -q / (static_cast<double>(m) * m);
        j0 += term;
        if (std::abs(term) < 1e-18 * std::abs(j0)) break;
    }
    term = 1.0;
    double j1s = 1.0;
    for (int m = 1; m < 80; ++m) {
        term *= -q / (static_cast<double>(m) * (m + 1));
        j1s += term;
        if (std::abs(term) < 1e-18 * std::abs(j1s)) break;
    }
    const double j1 = 0.5 * x * j1s;

    double s = 0.0, Hm = 0.0;
    term = 1.0;
    for (int m = 1; m < 80; ++m) {
        term *= q / (static_cast<double>(m) * m);
        Hm += 1.0 / m;
        s += (m % 2 == 1) ? term * Hm : -term * Hm;
        if (term * Hm < 1e-18 * std::max(std::abs(s), 1e-30)) break;
    }
    const double logf = std::log(0.5 * x) + EULER_GAMMA;
    const double y0 = (2.0 / PI) * (logf * j0 + s);

    s = 0.0;
    term = 1.0;
    Hm = 0.0;
    double Hm1 = 1.0;
    for (int m = 0; m < 80; ++m) {
        if (m > 0) {
            term *= q / (static_cast<double>(m) * (m + 1));
            Hm += 1.0 / m;
            Hm1 += 1.0 / (m + 1);
        }
        const double c = (Hm + Hm1) * term;
        s += (m % 2 == 0) ? c : -c;
        if (c < 1e-18 * std::max(std::abs(s), 1e-30)) break;
    }
    const double y1 = (2.0 / PI) * (logf * j1 - 1.0 / x - 0.25 * x * s);
    return {j0, y0, j1, y1};
}

// Exact integral representation via Gauss-Hermite after t = s^2:
// H_nu(x) = sqrt(2/(pi x)) e^{i(x - nu pi/2 - pi/4)} / Gamma(nu+1/2)
//           * int_0^inf e^-t t^{nu-1/2} (1 + i t/(2x))^{nu-1/2} dt
inline std::complex<double> hankel_via_integral(int nu, double x) {
    const QuadRule& gh = gauss_hermite(120);
    std::complex<double> acc(0.0, 0.0);
    for (size_t i = 0; i < gh.x.size(); ++i) {
        const double t = gh.x[i] * gh.x[i];
        const std::complex<double> g = std::sqrt(std::complex<double>(1.0, t / (2.0 * x)));
        const std::complex<double> f = (nu == 0) ? 1.0 / g : t * g;
        acc += gh.w[i] * f;
    }
    const double gam = (nu == 0) ? std::sqrt(PI) : 0.5 * std::sqrt(PI);
    const double ph = x - nu * 0.5 * PI - 0.25 * PI;
    const std::complex<double> pref =
        std::sqrt(2.0 / (PI * x)) * std::complex<double>(std::cos(ph), std::sin(ph));
    return pref * acc / gam;
}

// Large-argument expansion, truncated adaptively at the smallest term.
inline std::complex<double> hankel_asymptotic(int nu, double x) {
    const double mu = 4.0 * nu * nu;
    std::complex<double> sum(1.0, 0.0), term(1.0, 0.0);
    double prev = 1.0;
    for (int k = 1; k < 60; ++k) {
        const double odd = 2.0 * k - 1.0;
        term *= std::complex<double>(0.0, 1.0) * ((mu - odd * odd) / (8.0 * k * x));
        const double mag = std::abs(term);
        if (mag >= prev) break;  // divergence onset
        sum += term;
        prev = mag;
        if (mag < 1e-17) break;
    }
    const double ph = x - nu * 0.5 * PI - 0.25 * PI;
    return std::sqrt(2.0 / (PI * x)) * std::complex<double>(std::cos(ph), std::sin(ph)) * sum;
}

} // namespace sf_detail

// J0, Y0, J1, Y1 with a three-regime evaluation:
// series below 10, integral representation on [10, 15), asymptotic above.
inline Bessel01 bessel01(double x) {
    if (!(x > 0.0)) throw std::domain_error("bessel01: argument must be positive");
    if (x < 10.0) return sf_detail::bessel01_series(x);
    std::complex<double> h0, h1;
    if (x < 15.0) {
        h0 = sf_detail::hankel_via_integral(0, x);
        h1 = sf_detail::hankel_via_integral(1, x);
    } else {
        h0 = sf_detail::hankel_asymptotic(0, x);
        h1 = sf_detail::hankel_asymptotic(1, x);
    }
    return {h0.real(), h0.imag(), h1.real(), h1.imag()};
}

// H_n^(1)(x) for n in {0, 1}.
inline std::complex<double> hankel1(int order, double x) {
    if (order != 0 && order != 1) throw std::domain_error("hankel1: order must be 0 or 1");
    if (!(x > 0.0)) throw std::domain_error("hankel1: argument must be positive");
    const Bessel01 b = bessel01(x);
    return (order == 0) ? std::complex<double>(b.j0, b.y0) : std::complex<double>(b.j1, b.y1);
}

// J_m(x) for m = 0..mmax by downward recurrence with even-sum normalization.
inline std::vector<double> bessel_j_ladder(int mmax, double x) {
    std::vector<double> out(mmax + 1, 0.0);
    if (x == 0.0) {
        out[0] = 1.0;
        return out;
    }
    const double ax = std::abs(x);
    const int mstart = mmax + 20 + static_cast<int>(2.0 * std::sqrt(ax) + ax);
    double jp = 0.0, jc = 1e-300, evensum = 0.0;
    for (int m = mstart; m >= 0; --m) {
        const double jm = (2.0 * (m + 1) / x) * jc - jp;
        jp = jc;
        jc = jm;
        if (std::abs(jc) > 1e250) {
            jc *= 1e-250;
            jp *= 1e-250;
            evensum *= 1e-250;
            for (double& v : out) v *= 1e-250;
        }
        if (m <= mmax) out[m] = jc;
        if (m >= 2 && m % 2 == 0) evensum += 2.0 * jc;
    }
    const double norm = jc + evensum;  // jc == J_0 seed value here
    for (double& v : out) v /= norm;
    return out;
}

// d/dx J_m(x).
inline double bessel_j_prime(int m, double x) {
    const auto J = bessel_j_ladder(m + 1, x);
    return (m == 0) ? -J[1] : 0.5 * (J[m - 1] - J[m + 1]);
}

namespace sf_detail {

// Brent root refinement on a bracketing interval.
inline double brent(const std::function<double(double)>& f, double a, double b,
                    double fa, double fb, double xtol = 1e-14, int maxit = 200) {
    if (fa * fb > 0.0) throw std::invalid_argument("brent: interval does not bracket");
    double c = a, fc = fa, d = b - a, e = d;
    for (int it = 0; it < maxit; ++it) {
        if (std::abs(fc) < std::abs(fb)) {
            a = b; b = c; c = a;
            fa = fb; fb = fc; fc = fa;
        }
        const double tol = 2.0 * 1e-16 * std::abs(b) + 0.5 * xtol;
        const double xm = 0.5 * (c - b);
        if (std::abs(xm) <= tol || fb == 0.0) return b;
        if (std::abs(e) >= tol && std::abs(fa) > std::abs(fb)) {
            double p, q;
            const double s = fb / fa;
            if (a == c) {
                p = 2.0 * xm * s;
                q = 1.0 - s;
            } else {
                const double qq = fa / fc, r = fb / fc;
                p = s * (2.0 * xm * qq * (qq - r) - (b - a) * (r - 1.0));
                q = (qq - 1.0) * (r - 1.0) * (s - 1.0);
            }
            if (p > 0.0) q = -q;
            p = std::abs(p);
            if (2.0 * p < std::min(3.0 * xm * q - std::abs(tol * q), std::abs(e * q))) {
                e = d;
                d = p / q;
            } else {
                d = xm;
                e = d;
            }
        } else {
            d = xm;
            e = d;
        }
        a = b;
        fa = fb;
        b += (std::abs(d) > tol) ? d : (xm > 0 ? tol : -tol);
        fb = f(b);
        if ((fb > 0.0) == (fc > 0.0)) {
            c = a;
            fc = fa;
            d = b - a;
            e = d;
        }
    }
    return b;
}

} // namespace sf_detail

// n-th positive zero of J'_m (n >= 1).
inline double jprime_zero(int m, int n) {
    if (n < 1) throw std::domain_error("jprime_zero: n >= 1");
    auto f = [m](double x) { return bessel_j_prime(m, x); };
    const double lo = std::max(1e-3, m + 1e-9);
    const double hi = m + 3.5 + (n + 2.0) * (PI + 2.0 * std::cbrt(std::max(1.0, static_cast<double>(m))));
    const double step = 0.02;
    double xp = lo, fp = f(lo);
    int found = 0;
    for (double x = lo + step; x < hi; x += step) {
        const double fx = f(x);
        if (fp == 0.0) {
            if (++found == n) return xp;
        } else if (fp * fx < 0.0) {
            const double r = sf_detail::brent(f, xp, x, fp, fx);
            if (++found == n) return r;
        }
        xp = x;
        fp = fx;
    }
    throw std::runtime_error("jprime_zero: root not found in scan window");
}

// Conormal amplitude b(x) = int_0^inf e^-tau tau^{1/2} (1 - tau/(2ix))^{1/2} dtau,
// evaluated on the substitution tau = u^2 with composite Gauss panels sized to
// clear the branch point at |u| = sqrt(2x). Absolute error well under 1e-10.
inline std::complex<double> conormal_b(double x) {
    if (!(x > 0.0)) throw std::domain_error("conormal_b: argument must be positive");
    const double panel = std::min(0.25, 0.5 * std::sqrt(x));
    const QuadRule q = composite_gl(0.0, 9.0, panel, 12);
    std::complex<double> acc(0.0, 0.0);
    for (size_t i = 0; i < q.x.size(); ++i) {
        const double u = q.x[i], t = u * u;
        const std::complex<double> g = std::sqrt(std::complex<double>(1.0, t / (2.0 * x)));
        acc += q.w[i] * 2.0 * std::exp(-t) * t * g;
    }
    return acc;
}

// Truncated expansion b(x) ~ sum_j c_j x^-j with c_0 = Gamma(3/2).
inline std::complex<double> conormal_b_expansion(double x, int terms) {
    // (1 - tau/(2ix))^{1/2} = sum_j binom(1/2, j) (i tau / (2x))^j
    // => c_j = binom(1/2, j) (i/2)^j Gamma(j + 3/2)
    std::complex<double> sum(0.0, 0.0);
    double binom = 1.0;           // binom(1/2, j)
    double gam = 0.5 * std::sqrt(PI);  // Gamma(3/2)
    std::complex<double> pw(1.0, 0.0);
    for (int j = 0; j < terms; ++j) {
        sum += binom * pw * gam;
        binom *= (0.5 - j) / (j + 1.0);
        gam *= (j + 1.5);
        pw *= std::complex<double>(0.0, 0.5) / x;
    }
    return sum;
}

// Computable envelope bound: |b(x)| <= int e^-tau tau^{1/2} (1 + tau/(2x))^{1/2} dtau.
inline double conormal_b_bound(double x) {
    const double panel = std::min(0.25, 0.5 * std::sqrt(x));
    const QuadRule q = composite_gl(0.0, 9.0, panel, 12);
    double acc = 0.0;
    for (size_t i = 0; i < q.x.size(); ++i) {
        const double u = q.x[i], t = u * u;
        acc += q.w[i] * 2.0 * std::exp(-t) * t * std::sqrt(1.0 + t / (2.0 * x));
    }
    return acc;
}

} // namespace bil
