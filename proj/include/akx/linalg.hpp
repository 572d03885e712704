#pragma once

// Small dense complex matrices and a cyclic Jacobi eigensolver for Hermitian
// matrices. Everything here works at desk scale (dimensions up to a few
// hundred); no attempt is made at cache blocking or vectorization.

#include <algorithm>
#include <cassert>
#include <cmath>
#include <utility>

#include "akx/common.hpp"

namespace akx {

struct Mat {
    int rows = 0;
    int cols = 0;
    std::vector<cplx> a;  // row-major

    Mat() = default;
    Mat(int r, int c) : rows(r), cols(c), a(static_cast<size_t>(r) * c, cplx{0.0, 0.0}) {}

    static Mat identity(int n) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    cplx& operator()(int i, int j) { return a[static_cast<size_t>(i) * cols + j]; }
    const cplx& operator()(int i, int j) const { return a[static_cast<size_t>(i) * cols + j]; }

    Mat& operator+=(const Mat& o) {
        assert(rows == o.rows && cols == o.cols);
        for (size_t k = 0; k < a.size(); ++k) a[k] += o.a[k];
        return *this;
    }
    Mat& operator-=(const Mat& o) {
        assert(rows == o.rows && cols == o.cols);
        for (size_t k = 0; k < a.size(); ++k) a[k] -= o.a[k];
        return *this;
    }
    Mat& operator*=(cplx s) {
        for (auto& v : a) v *= s;
        return *this;
    }
};

inline Mat operator+(Mat x, const Mat& y) { return x += y; }
inline Mat operator-(Mat x, const Mat& y) { return x -= y; }
inline Mat operator*(cplx s, Mat x) { return x *= s; }

inline Mat operator*(const Mat& x, const Mat& y) {
    assert(x.cols == y.rows);
    Mat r(x.rows, y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int k = 0; k < x.cols; ++k) {
            const cplx xv = x(i, k);
            if (xv == cplx{0.0, 0.0}) continue;
            for (int j = 0; j < y.cols; ++j) r(i, j) += xv * y(k, j);
        }
    return r;
}

inline Mat adjoint(const Mat& x) {
    Mat r(x.cols, x.rows);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) r(j, i) = std::conj(x(i, j));
    return r;
}

inline cplx trace(const Mat& x) {
    assert(x.rows == x.cols);
    cplx t{0.0, 0.0};
    for (int i = 0; i < x.rows; ++i) t += x(i, i);
    return t;
}

inline double frobenius(const Mat& x) {
    double s = 0.0;
    for (const auto& v : x.a) s += std::norm(v);
    return std::sqrt(s);
}

inline Mat kron(const Mat& x, const Mat& y) {
    Mat r(x.rows * y.rows, x.cols * y.cols);
    for (int i = 0; i < x.rows; ++i)
        for (int j = 0; j < x.cols; ++j) {
            const cplx xv = x(i, j);
            if (xv == cplx{0.0, 0.0}) continue;
            for (int k = 0; k < y.rows; ++k)
                for (int l = 0; l < y.cols; ++l)
                    r(i * y.rows + k, j * y.cols + l) = xv * y(k, l);
        }
    return r;
}

/// Max |g_ij - conj(g_ji)| over all entries; 0 for an exactly Hermitian matrix.
inline double hermitian_defect(const Mat& g) {
    assert(g.rows == g.cols);
    double d = 0.0;
    for (int i = 0; i < g.rows; ++i)
        for (int j = i; j < g.cols; ++j)
            d = std::max(d, std::abs(g(i, j) - std::conj(g(j, i))));
    return d;
}

/// Eigenvalues of a Hermitian matrix by cyclic Jacobi rotations, ascending.
/// The input is symmetrized first; off-diagonal mass is annihilated with
/// complex plane rotations until it drops below `tol` times the initial
/// Frobenius norm (absolute accuracy well under 1e-11 at sizes <= 512).
inline std::vector<double> hermitian_eigenvalues(const Mat& g_in, double tol = 1e-14) {
    assert(g_in.rows == g_in.cols);
    const int n = g_in.rows;
    Mat g(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) g(i, j) = 0.5 * (g_in(i, j) + std::conj(g_in(j, i)));

    double scale = frobenius(g);
    if (scale == 0.0) return std::vector<double>(static_cast<size_t>(n), 0.0);

    auto off_norm = [&]() {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = i + 1; j < n; ++j) s += 2.0 * std::norm(g(i, j));
        return std::sqrt(s);
    };

    const int max_sweeps = 60;
    for (int sweep = 0; sweep < max_sweeps && off_norm() > tol * scale; ++sweep) {
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const cplx apq = g(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double app = g(p, p).real();
                const double aqq = g(q, q).real();
                // Unitary 2x2 rotation [c, -s*e^{i phi}; s*e^{-i phi}, c]
                const double phi = std::arg(apq);
                const double m = std::abs(apq);
                const double theta = 0.5 * std::atan2(2.0 * m, app - aqq);
                const double c = std::cos(theta), s = std::sin(theta);
                const cplx e = std::polar(1.0, phi);

                for (int k = 0; k < n; ++k) {
                    const cplx gkp = g(k, p), gkq = g(k, q);
                    g(k, p) = c * gkp + s * std::conj(e) * gkq;
                    g(k, q) = -s * e * gkp + c * gkq;
                }
                for (int k = 0; k < n; ++k) {
                    const cplx gpk = g(p, k), gqk = g(q, k);
                    g(p, k) = c * gpk + s * e * gqk;
                    g(q, k) = -s * std::conj(e) * gpk + c * gqk;
                }
                g(p, q) = cplx{0.0, 0.0};
                g(q, p) = cplx{0.0, 0.0};
            }
        }
    }

    std::vector<double> ev(static_cast<size_t>(n));
    for (int i = 0; i < n; ++i) ev[static_cast<size_t>(i)] = g(i, i).real();
    std::sort(ev.begin(), ev.end());
    return ev;
}

/// Spectral norm (largest singular value) via eigenvalues of X^H X.
inline double spectral_norm(const Mat& x) {
    const Mat h = adjoint(x) * x;
    const auto ev = hermitian_eigenvalues(h);
    return ev.empty() ? 0.0 : std::sqrt(std::max(0.0, ev.back()));
}

}  // namespace akx
