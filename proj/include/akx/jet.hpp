#pragma once

// Truncated jet vectors J_z(f) = (f(z), f'(z), f''(z)/2!, ...), the shift
// and differentiation matrices acting on them, lifts of coefficient-space
// operators, and the n!-weighted (Fock) inner product on coefficient
// arrays.

#include <cmath>

#include "akx/common.hpp"
#include "akx/linalg.hpp"
#include "akx/series.hpp"

namespace akx {

struct JetVector {
    cplx z{0.0, 0.0};
    int order = 0;   // N entries
    int p = 1;
    std::vector<cplx> entries;  // entry n at [n*p .. n*p+p)
    int dirty = 0;   // top entries polluted by finite truncation

    int clean_entries() const { return order - dirty; }
};

/// Jet of f at z to order N; entry 0 equals f(z).
inline JetVector jet_of(const EntireFunctionRep& f, cplx z, int n_entries) {
    if (n_entries < 1) throw std::invalid_argument("jet_of requires N >= 1");
    JetVector j;
    j.z = z;
    j.order = n_entries;
    j.p = f.p;
    j.entries.assign(static_cast<size_t>(n_entries) * f.p, cplx{0.0, 0.0});
    if (f.p == 1) {
        const auto g = taylor_shift(f, z);
        for (int n = 0; n < n_entries && n < static_cast<int>(g.size()); ++n)
            j.entries[static_cast<size_t>(n)] = g[static_cast<size_t>(n)];
    } else {
        const int m = f.degree();
        for (int comp = 0; comp < f.p; ++comp) {
            std::vector<cplx> col(static_cast<size_t>(m) + 1);
            for (int k = 0; k <= m; ++k) col[static_cast<size_t>(k)] = f.coeffs[static_cast<size_t>(k) * f.p + comp];
            const auto g = taylor_shift(col, z, f.radius);
            for (int n = 0; n < n_entries && n <= m; ++n)
                j.entries[static_cast<size_t>(n) * f.p + comp] = g[static_cast<size_t>(n)];
        }
    }
    return j;
}

/// A finite N x N matrix acting on jets, built from one of the named
/// semi-infinite templates (or any caller-supplied matrix). `dirty` counts
/// how many top entries of an image jet are invalidated by truncation: the
/// number of populated superdiagonals.
struct JetOperator {
    Mat mat;
    int dirty = 0;

    static JetOperator from_matrix(Mat m) {
        JetOperator op;
        int d = 0;
        for (int i = 0; i < m.rows; ++i)
            for (int j = 0; j < m.cols; ++j)
                if (m(i, j) != cplx{0.0, 0.0}) d = std::max(d, j - i);
        op.mat = std::move(m);
        op.dirty = d;
        return op;
    }

    /// Subdiagonal unit shift: entry (n+1, n) = 1.
    static JetOperator shift_z(int n) {
        Mat m(n, n);
        for (int i = 0; i + 1 < n; ++i) m(i + 1, i) = 1.0;
        return {std::move(m), 0};
    }

    /// Differentiation template: entry (n, n+1) = n+1.
    static JetOperator derivative_s(int n) {
        Mat m(n, n);
        for (int i = 0; i + 1 < n; ++i) m(i, i + 1) = static_cast<double>(i + 1);
        return {std::move(m), 1};
    }

    /// Multiplication-by-zeta template: z I + Z.
    static JetOperator mult_by_zeta(int n, cplx z) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = z;
        for (int i = 0; i + 1 < n; ++i) m(i + 1, i) = 1.0;
        return {std::move(m), 0};
    }

    /// Diagonal scaling D(M) = diag(1, M, M^2, ...).
    static JetOperator diagonal_m(int n, double scale_m) {
        Mat m(n, n);
        double v = 1.0;
        for (int i = 0; i < n; ++i) {
            m(i, i) = v;
            v *= scale_m;
        }
        return {std::move(m), 0};
    }
};

/// Matrix-vector action on a jet (p = 1). The image inherits the operator's
/// dirty count on top of the argument's.
inline JetVector apply(const JetOperator& op, const JetVector& j) {
    if (j.p != 1) throw std::invalid_argument("apply requires p == 1 jets");
    if (op.mat.rows != j.order || op.mat.cols != j.order)
        throw std::invalid_argument("jet/operator size mismatch");
    JetVector r = j;
    for (int i = 0; i < j.order; ++i) {
        cplx s{0.0, 0.0};
        for (int k = 0; k < j.order; ++k) s += op.mat(i, k) * j.entries[static_cast<size_t>(k)];
        r.entries[static_cast<size_t>(i)] = s;
    }
    r.dirty = std::min(j.order, j.dirty + op.dirty);
    return r;
}

struct CommutatorReport {
    double leading_deviation = 0.0;  // max |(SZ - ZS - I)| on the (N-1) block
    double bottom_right = 0.0;       // the truncation-edge entry, reported as-is
};

/// SZ - ZS equals the identity on the leading (N-1) x (N-1) block; the
/// bottom-right entry is a finite-truncation artifact.
inline CommutatorReport commutator_check(int n) {
    if (n < 3) throw std::invalid_argument("commutator_check requires N >= 3");
    const auto z = JetOperator::shift_z(n);
    const auto s = JetOperator::derivative_s(n);
    const Mat c = s.mat * z.mat - z.mat * s.mat;
    CommutatorReport rep;
    for (int i = 0; i + 1 < n; ++i)
        for (int j = 0; j + 1 < n; ++j) {
            const cplx want = i == j ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
            rep.leading_deviation = std::max(rep.leading_deviation, std::abs(c(i, j) - want));
        }
    rep.bottom_right = c(n - 1, n - 1).real();
    return rep;
}

/// A concrete operator on Taylor-coefficient space: a square M x M matrix
/// acting on coefficient arrays, the finite stand-in for T in B(H(K)).
struct CoefficientOperator {
    Mat mat;

    int dim() const { return mat.rows; }

    static CoefficientOperator identity(int m) { return {Mat::identity(m)}; }

    static CoefficientOperator zero_op(int m) { return {Mat(m, m)}; }

    /// Coefficient shift implementing multiplication by zeta.
    static CoefficientOperator mult_by_zeta(int m) {
        Mat x(m, m);
        for (int k = 0; k + 1 < m; ++k) x(k + 1, k) = 1.0;
        return {std::move(x)};
    }

    /// Coefficient action of d/dzeta.
    static CoefficientOperator differentiation(int m) {
        Mat x(m, m);
        for (int k = 0; k + 1 < m; ++k) x(k, k + 1) = static_cast<double>(k + 1);
        return {std::move(x)};
    }

    std::vector<cplx> apply_coeffs(const std::vector<cplx>& c) const {
        if (static_cast<int>(c.size()) > mat.cols)
            throw std::invalid_argument("operator dimension smaller than coefficient array");
        std::vector<cplx> out(static_cast<size_t>(mat.rows), cplx{0.0, 0.0});
        for (int i = 0; i < mat.rows; ++i) {
            cplx s{0.0, 0.0};
            for (int k = 0; k < static_cast<int>(c.size()); ++k) s += mat(i, k) * c[static_cast<size_t>(k)];
            out[static_cast<size_t>(i)] = s;
        }
        return out;
    }

    EntireFunctionRep apply_fn(const EntireFunctionRep& f) const {
        if (f.p != 1) throw std::invalid_argument("coefficient operators act on p == 1 functions");
        return EntireFunctionRep::scalar(apply_coeffs(f.coeffs), f.radius);
    }
};

/// The natural extension T~(J(f)) = J(Tf): apply T on coefficients, then
/// take the jet at z.
inline JetVector extend_operator(const CoefficientOperator& t, const EntireFunctionRep& f,
                                 cplx z, int n_entries) {
    return jet_of(t.apply_fn(f), z, n_entries);
}

/// The algebra-side lift T_A: equals the weak evaluation of Tf, i.e.
/// sum <a,A^n> (Tf)^(n)(z)/n!.
inline EvalWeakResult lift_t_a(const CoefficientOperator& t, const EntireFunctionRep& f, cplx z,
                               const AlgebraElement& arg, const DualFunctional& a,
                               const TruncationPolicy& pol, double level = 0.0) {
    return eval_weak(t.apply_fn(f), z, arg, a, pol, level);
}

/// Fock-space pairing on coefficient arrays:  sum_n n! f_n conj(g_n),
/// truncated at the common length. Componentwise dot for p > 1.
inline cplx fock_inner(const EntireFunctionRep& f, const EntireFunctionRep& g) {
    if (f.p != g.p) throw std::invalid_argument("fock_inner: component count mismatch");
    const int common = std::min(f.degree(), g.degree());
    cplx s{0.0, 0.0};
    double fact = 1.0;
    for (int n = 0; n <= common; ++n) {
        if (n > 0) fact *= n;
        for (int i = 0; i < f.p; ++i)
            s += fact * f.coeffs[static_cast<size_t>(n) * f.p + i] *
                 std::conj(g.coeffs[static_cast<size_t>(n) * g.p + i]);
    }
    return s;
}

/// Adjoint of a coefficient operator under the n!-weighted inner product:
/// T*[i][j] = (j!/i!) conj(T[j][i]).
inline CoefficientOperator fock_adjoint(const CoefficientOperator& t) {
    const int m = t.dim();
    Mat r(m, m);
    std::vector<double> fact(static_cast<size_t>(m), 1.0);
    for (int i = 1; i < m; ++i) fact[static_cast<size_t>(i)] = fact[static_cast<size_t>(i) - 1] * i;
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j)
            r(i, j) = (fact[static_cast<size_t>(j)] / fact[static_cast<size_t>(i)]) * std::conj(t.mat(j, i));
    return {std::move(r)};
}

}  // namespace akx
