#pragma once

// Power-series evaluation of analytic functions at shifted algebra
// arguments: f(z+A) = sum A^n f^(n)(z)/n!, its weak (dual-paired) variant,
// and the l2 sequence vector X(a,A) that indexes the extended kernels.
// Every truncated sum is returned together with a certified bound on the
// discarded tail.

#include <cmath>

#include "akx/algebra.hpp"
#include "akx/common.hpp"

namespace akx {

/// An analytic function as Taylor coefficients at 0 with a convergence
/// radius (infinite for the entire case). Coefficients beyond the stored
/// array are zero for entire representations; finite-radius representations
/// additionally carry the constructive coefficient bound max |c_k| R^k used
/// to certify the beyond-array remainder.
struct EntireFunctionRep {
    int p = 1;                  // component count of the K^p-valued case
    std::vector<cplx> coeffs;   // degree-major, coeffs[k*p + i]
    double radius = kInf;

    int degree() const { return static_cast<int>(coeffs.size()) / p - 1; }

    cplx c(int k) const {
        if (p != 1) throw std::invalid_argument("scalar coefficient access requires p == 1");
        return coeffs[static_cast<size_t>(k)];
    }

    static EntireFunctionRep scalar(std::vector<cplx> c, double r = kInf) {
        if (c.empty()) throw std::invalid_argument("empty coefficient array");
        if (!(r > 0.0)) throw std::invalid_argument("radius must be positive");
        EntireFunctionRep f;
        f.p = 1;
        f.coeffs = std::move(c);
        f.radius = r;
        return f;
    }
};

/// Named coefficient presets. exp/sin/cos are entire; geom is 1/(1-zeta)
/// with radius 1 and the exact coefficient law c_k = 1.
inline EntireFunctionRep function_preset(const std::string& name, int terms = 0) {
    if (name == "exp") {
        const int m = terms > 0 ? terms : 48;
        std::vector<cplx> c(static_cast<size_t>(m) + 1);
        double f = 1.0;
        for (int k = 0; k <= m; ++k) {
            if (k > 0) f *= k;
            c[static_cast<size_t>(k)] = 1.0 / f;
        }
        return EntireFunctionRep::scalar(std::move(c));
    }
    if (name == "sin" || name == "cos") {
        const int m = terms > 0 ? terms : 48;
        std::vector<cplx> c(static_cast<size_t>(m) + 1, cplx{0.0, 0.0});
        double f = 1.0;
        for (int k = 0; k <= m; ++k) {
            if (k > 0) f *= k;
            const int phase = name == "sin" ? 1 : 0;
            if (k % 2 == phase) c[static_cast<size_t>(k)] = ((k - phase) % 4 == 0 ? 1.0 : -1.0) / f;
        }
        return EntireFunctionRep::scalar(std::move(c));
    }
    if (name == "geom") {
        const int m = terms > 0 ? terms : 64;
        std::vector<cplx> c(static_cast<size_t>(m) + 1, cplx{1.0, 0.0});
        return EntireFunctionRep::scalar(std::move(c), 1.0);
    }
    throw std::invalid_argument("unknown function preset: " + name);
}

struct TruncationPolicy {
    int order = 16;
    double tail_tol = 1e-10;
    int max_terms = 256;

    void validate() const {
        if (order < 1 || max_terms < order)
            throw std::invalid_argument("truncation policy requires 1 <= order <= max_terms");
        if (!(tail_tol > 0.0)) throw std::invalid_argument("tail_tol must be positive");
    }
};

/// Recenter a scalar coefficient array: returns g with g_n = f^(n)(z)/n!,
/// by the Horner synthetic-division cascade. Exact for polynomials; the
/// z = 0 case returns the array unchanged.
inline std::vector<cplx> taylor_shift(const std::vector<cplx>& coeffs, cplx z,
                                      double radius = kInf) {
    if (!(std::abs(z) < radius))
        throw std::domain_error("taylor_shift: |z| must be less than the convergence radius");
    std::vector<cplx> g = coeffs;
    if (z == cplx{0.0, 0.0}) return g;
    const int m = static_cast<int>(g.size()) - 1;
    for (int i = 0; i < m; ++i)
        for (int j = m - 1; j >= i; --j) g[static_cast<size_t>(j)] += z * g[static_cast<size_t>(j) + 1];
    return g;
}

inline std::vector<cplx> taylor_shift(const EntireFunctionRep& f, cplx z) {
    if (f.p != 1) throw std::invalid_argument("taylor_shift requires p == 1");
    return taylor_shift(f.coeffs, z, f.radius);
}

namespace detail {

// Remainder bounds for sum_n g_n A^n after the recentering at z.
// remainder_after(k) bounds |sum_{n>k} g_n A^n| by
//   sum_{n=k+1..M} |g_n| d^{n-1} ||A||^n  +  beyond-array closure,
// where the closure is zero for entire representations and, for radius R,
//   (C0 R/(R-|z|)) q^{M+1}/(1-q),  q = d ||A|| / (R - |z|),
// with C0 = max_k |c_k| R^k realized over the stored base array. A violated
// margin (q >= 1) makes every remainder infinite.
struct TailTable {
    std::vector<double> suffix;  // suffix[k] = sum_{n>=k} b_n over the array
    double closure = 0.0;

    double remainder_after(int k) const {
        const int m = static_cast<int>(suffix.size());
        const double in_array = (k + 1 < m) ? suffix[static_cast<size_t>(k) + 1] : 0.0;
        return in_array + closure;
    }
};

inline TailTable make_tail_table(const std::vector<cplx>& shifted, double norm_a, double d,
                                 const EntireFunctionRep& base, cplx z) {
    TailTable t;
    const int m = static_cast<int>(shifted.size());
    std::vector<double> b(static_cast<size_t>(m));
    for (int n = 0; n < m; ++n) {
        const double pw = n == 0 ? 1.0 : std::pow(d, n - 1) * std::pow(norm_a, n);
        b[static_cast<size_t>(n)] = std::abs(shifted[static_cast<size_t>(n)]) * pw;
    }
    t.suffix.assign(static_cast<size_t>(m) + 1, 0.0);
    for (int n = m - 1; n >= 0; --n)
        t.suffix[static_cast<size_t>(n)] = t.suffix[static_cast<size_t>(n) + 1] + b[static_cast<size_t>(n)];
    t.suffix.pop_back();

    if (std::isfinite(base.radius)) {
        const double r = base.radius;
        const double margin = r - std::abs(z);
        const double q = d * norm_a / margin;
        if (q >= 1.0) {
            t.closure = kInf;
        } else {
            double c0 = 0.0;
            double rk = 1.0;
            for (int k = 0; k <= base.degree(); ++k) {
                c0 = std::max(c0, std::abs(base.c(k)) * rk);
                rk *= r;
            }
            t.closure = (c0 * r / margin) * std::pow(q, m) / (1.0 - q);
        }
    }
    return t;
}

}  // namespace detail

struct EvalExtResult {
    AlgebraElement value;
    double tail_bound = 0.0;
    int terms_used = 0;   // terms n = 0 .. terms_used-1 were summed
    bool converged = false;
    bool exact = false;   // nilpotent termination, zero tail
};

/// f(z+A) truncated with a certified tail. Grassmann arguments with zero
/// body terminate exactly after N_generators + 1 terms. If the certificate
/// cannot be brought below tail_tol within max_terms (or the finite-radius
/// margin is violated), the last partial sum is returned with
/// converged = false.
inline EvalExtResult eval_ext(const EntireFunctionRep& f, cplx z, const AlgebraElement& arg,
                              const TruncationPolicy& pol, double level = 0.0) {
    pol.validate();
    const auto g = taylor_shift(f, z);
    const int m = static_cast<int>(g.size()) - 1;
    const auto witness = strong_witness(arg.descriptor, level);

    EvalExtResult res;
    res.value = zero(arg.descriptor);

    if (arg.descriptor.kind == AlgebraKind::grassmann && has_zero_body(arg)) {
        const int nmax = std::min(arg.descriptor.n, m);
        AlgebraElement pw = unit(arg.descriptor);
        for (int n = 0; n <= nmax; ++n) {
            if (n > 0) pw = mul(pw, arg);
            res.value = add(res.value, scale(pw, g[static_cast<size_t>(n)]));
        }
        res.terms_used = nmax + 1;
        res.tail_bound = 0.0;
        res.converged = true;
        res.exact = true;
        return res;
    }

    const double norm_a = level_norm(arg, level);
    const auto tails = detail::make_tail_table(g, norm_a, witness.d_t, f, z);
    const int cap = std::min(m, pol.max_terms);

    AlgebraElement pw = unit(arg.descriptor);
    int n = 0;
    for (;; ++n) {
        if (n > 0) pw = mul(pw, arg);
        res.value = add(res.value, scale(pw, g[static_cast<size_t>(n)]));
        if (n + 1 > pol.order && tails.remainder_after(n) <= pol.tail_tol) break;
        if (n >= cap) break;
    }
    res.terms_used = n + 1;
    res.tail_bound = tails.remainder_after(n);
    res.converged = res.tail_bound <= pol.tail_tol;
    return res;
}

struct EvalWeakResult {
    cplx value{0.0, 0.0};
    double tail_bound = 0.0;
    int terms_used = 0;
    bool converged = false;
};

/// F(a,z,A) = sum <a,A^n> f^(n)(z)/n!, the weak evaluation. Agrees with
/// pair(a, eval_ext(...)) within tail_tol * (1 + ||a||').
inline EvalWeakResult eval_weak(const EntireFunctionRep& f, cplx z, const AlgebraElement& arg,
                                const DualFunctional& a, const TruncationPolicy& pol,
                                double level = 0.0) {
    pol.validate();
    detail::require_same(a.descriptor, arg.descriptor);
    const auto g = taylor_shift(f, z);
    const int m = static_cast<int>(g.size()) - 1;
    const auto witness = strong_witness(arg.descriptor, level);
    const double na = dual_norm(a, level);

    EvalWeakResult res;

    if (arg.descriptor.kind == AlgebraKind::grassmann && has_zero_body(arg)) {
        const int nmax = std::min(arg.descriptor.n, m);
        AlgebraElement pw = unit(arg.descriptor);
        for (int n = 0; n <= nmax; ++n) {
            if (n > 0) pw = mul(pw, arg);
            res.value += pair(a, pw) * g[static_cast<size_t>(n)];
        }
        res.terms_used = nmax + 1;
        res.converged = true;
        return res;
    }

    const double norm_a = level_norm(arg, level);
    const auto tails = detail::make_tail_table(g, norm_a, witness.d_t, f, z);
    const int cap = std::min(m, pol.max_terms);

    AlgebraElement pw = unit(arg.descriptor);
    int n = 0;
    for (;; ++n) {
        if (n > 0) pw = mul(pw, arg);
        res.value += pair(a, pw) * g[static_cast<size_t>(n)];
        if (n + 1 > pol.order && na * tails.remainder_after(n) <= pol.tail_tol) break;
        if (n >= cap) break;
    }
    res.terms_used = n + 1;
    res.tail_bound = na * tails.remainder_after(n);
    res.converged = res.tail_bound <= pol.tail_tol;
    return res;
}

struct XVector {
    std::vector<cplx> entries;  // entry n = <a*, A^n>
};

/// The truncated l2(N0) vector with entries <dual_involution(a), A^n>.
inline XVector x_vector(const DualFunctional& a, const AlgebraElement& arg, int n_entries) {
    if (n_entries < 1) throw std::invalid_argument("x_vector requires N >= 1");
    const auto ai = dual_involution(a);
    XVector x;
    x.entries.reserve(static_cast<size_t>(n_entries));
    AlgebraElement pw = unit(arg.descriptor);
    for (int n = 0; n < n_entries; ++n) {
        if (n > 0) pw = mul(pw, arg);
        x.entries.push_back(pair(ai, pw));
    }
    return x;
}

struct Ell2Report {
    bool summable = false;
    bool certified = false;   // geometric certificate vs. numeric plateau
    double tail_ratio = 0.0;  // squared-term geometric ratio when certified
    double partial_sum = 0.0;
    int terms = 0;
};

/// Summability of sum_n |<a*,A^n>|^2, certified by the geometric bound
/// |<a*,A^n>| <= ||a||' d^{n-1} ||A||_t^n when d ||A||_t < 1 (and by
/// nilpotence for Grassmann souls); otherwise decided numerically by
/// partial-sum plateau detection.
inline Ell2Report ell2_check(const DualFunctional& a, const AlgebraElement& arg, double t = 0.0,
                             int probe_terms = 160) {
    const auto witness = strong_witness(arg.descriptor, t);
    Ell2Report rep;

    if (arg.descriptor.kind == AlgebraKind::grassmann && has_zero_body(arg)) {
        rep.summable = true;
        rep.certified = true;
        rep.tail_ratio = 0.0;
        const auto x = x_vector(a, arg, arg.descriptor.n + 1);
        for (const auto& e : x.entries) rep.partial_sum += std::norm(e);
        rep.terms = static_cast<int>(x.entries.size());
        return rep;
    }

    const double rho = witness.d_t * level_norm(arg, t);
    if (rho < 1.0) {
        rep.summable = true;
        rep.certified = true;
        rep.tail_ratio = rho * rho;
        const auto x = x_vector(a, arg, 32);
        for (const auto& e : x.entries) rep.partial_sum += std::norm(e);
        rep.terms = 32;
        return rep;
    }

    const auto x = x_vector(a, arg, probe_terms);
    double sum = 0.0;
    int flat_run = 0;
    for (int n = 0; n < probe_terms; ++n) {
        const double inc = std::norm(x.entries[static_cast<size_t>(n)]);
        sum += inc;
        if (inc <= 1e-14 * (1.0 + sum))
            ++flat_run;
        else
            flat_run = 0;
        rep.terms = n + 1;
        if (flat_run >= 12) {
            rep.summable = true;
            break;
        }
    }
    rep.partial_sum = sum;
    rep.certified = false;
    return rep;
}

/// Truncated A-valued sum  sum_n A_n f_n.
inline AlgebraElement a_valued_sum(const std::vector<AlgebraElement>& seq,
                                   const std::vector<cplx>& vals) {
    if (seq.size() != vals.size()) throw std::invalid_argument("a_valued_sum: length mismatch");
    if (seq.empty()) throw std::invalid_argument("a_valued_sum: empty input");
    AlgebraElement acc = zero(seq.front().descriptor);
    for (size_t n = 0; n < seq.size(); ++n) acc = add(acc, scale(seq[n], vals[n]));
    return acc;
}

}  // namespace akx
