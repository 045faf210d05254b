#pragma once

#include <complex>
#include <vector>
#include <stdexcept>
#include <cmath>
#include <random>
#include <string>

#include "bil/lapack_config.hpp"

namespace bil {

using cplx = std::complex<double>;

// Dense row-major complex matrix.
struct CMatrix {
    int rows = 0, cols = 0;
    std::vector<cplx> a;

    CMatrix() = default;
    CMatrix(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c) {}

    cplx& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const cplx& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    static CMatrix identity(int n) {
        CMatrix m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline std::vector<cplx> matvec(const CMatrix& m, const std::vector<cplx>& x) {
    if (static_cast<int>(x.size()) != m.cols) throw std::invalid_argument("matvec shape");
    std::vector<cplx> y(m.rows);
    for (int i = 0; i < m.rows; ++i) {
        cplx s = 0.0;
        const cplx* row = &m.a[static_cast<size_t>(i) * m.cols];
        for (int j = 0; j < m.cols; ++j) s += row[j] * x[j];
        y[i] = s;
    }
    return y;
}

// y = M^H x
inline std::vector<cplx> matvec_adj(const CMatrix& m, const std::vector<cplx>& x) {
    if (static_cast<int>(x.size()) != m.rows) throw std::invalid_argument("matvec_adj shape");
    std::vector<cplx> y(m.cols, 0.0);
    for (int i = 0; i < m.rows; ++i) {
        const cplx* row = &m.a[static_cast<size_t>(i) * m.cols];
        const cplx xi = x[i];
        for (int j = 0; j < m.cols; ++j) y[j] += std::conj(row[j]) * xi;
    }
    return y;
}

inline CMatrix matmul(const CMatrix& A, const CMatrix& B) {
    if (A.cols != B.rows) throw std::invalid_argument("matmul shape");
    CMatrix C(A.rows, B.cols);
    for (int i = 0; i < A.rows; ++i) {
        for (int k = 0; k < A.cols; ++k) {
            const cplx aik = A(i, k);
            if (aik == 0.0) continue;
            const cplx* brow = &B.a[static_cast<size_t>(k) * B.cols];
            cplx* crow = &C.a[static_cast<size_t>(i) * C.cols];
            for (int j = 0; j < B.cols; ++j) crow[j] += aik * brow[j];
        }
    }
    return C;
}

inline double norm2(const std::vector<cplx>& v) {
    double s = 0.0;
    for (const auto& z : v) s += std::norm(z);
    return std::sqrt(s);
}

inline double norm2(const std::vector<double>& v) {
    double s = 0.0;
    for (double z : v) s += z * z;
    return std::sqrt(s);
}

// All singular values, descending.
inline std::vector<double> singular_values(CMatrix m) {
    const int mn = std::min(m.rows, m.cols);
    std::vector<double> s(mn);
    std::vector<double> superb(std::max(1, mn - 1));
    const lapack_int info = LAPACKE_zgesvd(LAPACK_ROW_MAJOR, 'N', 'N', m.rows, m.cols,
                                           m.a.data(), m.cols, s.data(), nullptr, 1,
                                           nullptr, 1, superb.data());
    if (info != 0) throw std::runtime_error("zgesvd failed: info=" + std::to_string(info));
    return s;
}

struct SvdResult {
    std::vector<double> s;  // descending
    CMatrix u;              // rows x min
    CMatrix vh;             // min x cols
};

inline SvdResult svd_thin(CMatrix m) {
    const int mn = std::min(m.rows, m.cols);
    SvdResult r;
    r.s.resize(mn);
    r.u = CMatrix(m.rows, mn);
    r.vh = CMatrix(mn, m.cols);
    std::vector<double> superb(std::max(1, mn - 1));
    const lapack_int info = LAPACKE_zgesvd(LAPACK_ROW_MAJOR, 'S', 'S', m.rows, m.cols,
                                           m.a.data(), m.cols, r.s.data(),
                                           r.u.a.data(), mn, r.vh.a.data(), m.cols,
                                           superb.data());
    if (info != 0) throw std::runtime_error("zgesvd failed: info=" + std::to_string(info));
    return r;
}

// LU factorization wrapper (square), reusable for many solves.
struct LuFactor {
    CMatrix lu;
    std::vector<lapack_int> ipiv;

    explicit LuFactor(CMatrix m) : lu(std::move(m)), ipiv(lu.rows) {
        if (lu.rows != lu.cols) throw std::invalid_argument("LuFactor: square only");
        const lapack_int info = LAPACKE_zgetrf(LAPACK_ROW_MAJOR, lu.rows, lu.cols,
                                               lu.a.data(), lu.cols, ipiv.data());
        singular = (info > 0);
        if (info < 0) throw std::runtime_error("zgetrf failed: info=" + std::to_string(info));
    }

    bool singular = false;

    // Solve A x = b (trans 'N'), A^H x = b (trans 'C').
    std::vector<cplx> solve(std::vector<cplx> b, char trans = 'N') const {
        if (singular) throw std::runtime_error("LuFactor: exactly singular matrix");
        const lapack_int info = LAPACKE_zgetrs(LAPACK_ROW_MAJOR, trans, lu.rows, 1,
                                               lu.a.data(), lu.cols, ipiv.data(),
                                               b.data(), 1);
        if (info != 0) throw std::runtime_error("zgetrs failed: info=" + std::to_string(info));
        return b;
    }
};

// Smallest singular value and right singular vector via inverse iteration on A^H A,
// implemented as alternating solves with A and A^H. Deterministic start.
struct SigmaMinResult {
    double sigma = 0.0;
    std::vector<cplx> right;  // unit right singular vector
};

inline SigmaMinResult sigma_min_inverse_iteration(const CMatrix& A, int iters = 12,
                                                  unsigned seed = 12345u) {
    if (A.rows != A.cols) throw std::invalid_argument("sigma_min: square only");
    const int n = A.rows;
    LuFactor lu(A);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<cplx> x(n);
    for (auto& z : x) z = cplx(unif(rng), unif(rng));
    double nx = norm2(x);
    for (auto& z : x) z /= nx;
    if (lu.singular) {
        // exactly singular at machine precision: sigma_min indistinguishable from 0
        return {0.0, x};
    }
    for (int it = 0; it < iters; ++it) {
        auto y = lu.solve(x, 'C');             // y = A^{-H} x
        auto z = lu.solve(std::move(y), 'N');  // z = A^{-1} y = (A^H A)^{-1} x
        const double nz = norm2(z);
        for (auto& v : z) v /= nz;
        x = std::move(z);
    }
    const auto ax = matvec(A, x);
    return {norm2(ax), x};
}

// The m smallest singular values (ascending) with right singular vectors, via
// block inverse iteration on A^H A followed by a Rayleigh-Ritz extraction.
struct SigmaLadder {
    std::vector<double> sigmas;       // ascending
    std::vector<std::vector<cplx>> right;
};

inline SigmaLadder sigma_smallest_subspace(const CMatrix& A, int m, int iters = 16,
                                           unsigned seed = 12345u) {
    if (A.rows != A.cols) throw std::invalid_argument("sigma_smallest_subspace: square only");
    const int n = A.rows;
    m = std::min(m, n);
    LuFactor lu(A);
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<std::vector<cplx>> q(m, std::vector<cplx>(n));
    for (auto& col : q)
        for (auto& z : col) z = cplx(unif(rng), unif(rng));

    auto orthonormalize = [&]() {
        for (int j = 0; j < m; ++j) {
            for (int i = 0; i < j; ++i) {
                cplx dotp(0.0, 0.0);
                for (int r = 0; r < n; ++r) dotp += std::conj(q[i][r]) * q[j][r];
                for (int r = 0; r < n; ++r) q[j][r] -= dotp * q[i][r];
            }
            const double nq = norm2(q[j]);
            for (auto& z : q[j]) z /= nq;
        }
    };
    orthonormalize();
    if (!lu.singular) {
        for (int it = 0; it < iters; ++it) {
            for (int j = 0; j < m; ++j) {
                auto y = lu.solve(q[j], 'C');
                q[j] = lu.solve(std::move(y), 'N');
            }
            orthonormalize();
        }
    }
    // Rayleigh-Ritz: thin SVD of A*Q gives the ladder and the rotation of Q
    CMatrix w(n, m);
    for (int j = 0; j < m; ++j) {
        const auto aq = matvec(A, q[j]);
        for (int r = 0; r < n; ++r) w(r, j) = aq[r];
    }
    SvdResult sv = svd_thin(std::move(w));  // w = U S V^H, V is m x m
    SigmaLadder out;
    out.sigmas.assign(sv.s.rbegin(), sv.s.rend());  // ascending
    out.right.assign(m, std::vector<cplx>(n, cplx(0.0, 0.0)));
    for (int idx = 0; idx < m; ++idx) {
        const int col = m - 1 - idx;  // svd order is descending
        for (int j = 0; j < m; ++j) {
            const cplx vj = sv.vh(col, j);  // V^H row `col` -> conj gives V(:, col)
            for (int r = 0; r < n; ++r) out.right[idx][r] += std::conj(vj) * q[j][r];
        }
        const double nr = norm2(out.right[idx]);
        for (auto& z : out.right[idx]) z /= nr;
    }
    return out;
}

// Largest singular value by power iteration on A^H A (cross-check path; SVD is primary).
inline double sigma_max_power_iteration(const CMatrix& A, int iters = 60, unsigned seed = 777u) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    std::vector<cplx> x(A.cols);
    for (auto& z : x) z = cplx(unif(rng), unif(rng));
    double nx = norm2(x);
    for (auto& z : x) z /= nx;
    double sig = 0.0;
    for (int it = 0; it < iters; ++it) {
        auto y = matvec(A, x);
        auto z = matvec_adj(A, y);
        const double nz = norm2(z);
        if (nz == 0.0) return 0.0;
        sig = std::sqrt(nz);
        for (auto& v : z) v /= nz;
        x = std::move(z);
    }
    return sig;
}

} // namespace bil
