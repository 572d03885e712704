#pragma once

// Concrete topological algebras over the real or complex field, with
// involution, duality pairing and graded norms. Four algebra kinds are
// supported:
//
//   matrix(n)          n x n matrices, entries row-major
//   quaternion         Hamilton quaternions over the reals, basis (1,i,j,k)
//   grassmann(N)       exterior algebra on N generators, coefficients
//                      indexed by subsets of {1..N} in graded-lex order
//   weighted_seq(L,b)  truncated sequences under the Cauchy product, with
//                      the level norms ||x||_t = sum |x_n| b^{-n t}
//
// Coordinates are stored over the complex field even when the field tag is
// real; constructors pin the imaginary parts to zero so a single arithmetic
// path serves both fields.

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <numeric>

#include "akx/common.hpp"

namespace akx {

enum class AlgebraKind { matrix, quaternion, grassmann, weighted_seq };

inline std::string to_string(AlgebraKind k) {
    switch (k) {
        case AlgebraKind::matrix: return "matrix";
        case AlgebraKind::quaternion: return "quaternion";
        case AlgebraKind::grassmann: return "grassmann";
        case AlgebraKind::weighted_seq: return "weighted_seq";
    }
    return "?";
}

struct AlgebraDescriptor {
    AlgebraKind kind = AlgebraKind::matrix;
    int n = 1;           // matrix order / grassmann generators / sequence length
    double beta = 2.0;   // weighted_seq base, > 1
    ScalarField field = ScalarField::complex_;

    static AlgebraDescriptor matrix(int order, ScalarField f = ScalarField::complex_) {
        if (order < 1) throw std::invalid_argument("matrix algebra requires n >= 1");
        return {AlgebraKind::matrix, order, 2.0, f};
    }
    static AlgebraDescriptor quaternion() {
        // the quaternions are an R-algebra; the field tag is forced
        return {AlgebraKind::quaternion, 1, 2.0, ScalarField::real};
    }
    static AlgebraDescriptor grassmann(int generators, ScalarField f = ScalarField::complex_) {
        if (generators < 0 || generators > 12)
            throw std::invalid_argument("grassmann algebra requires 0 <= N <= 12");
        return {AlgebraKind::grassmann, generators, 2.0, f};
    }
    static AlgebraDescriptor weighted_seq(int length, double base,
                                          ScalarField f = ScalarField::complex_) {
        if (length < 1) throw std::invalid_argument("weighted_seq requires L >= 1");
        if (!(base > 1.0)) throw std::invalid_argument("weighted_seq requires beta > 1");
        return {AlgebraKind::weighted_seq, length, base, f};
    }

    int dimension() const {
        switch (kind) {
            case AlgebraKind::matrix: return n * n;
            case AlgebraKind::quaternion: return 4;
            case AlgebraKind::grassmann: return 1 << n;
            case AlgebraKind::weighted_seq: return n;
        }
        return 0;
    }

    bool operator==(const AlgebraDescriptor& o) const {
        if (kind != o.kind || field != o.field) return false;
        if (kind == AlgebraKind::weighted_seq) return n == o.n && beta == o.beta;
        if (kind == AlgebraKind::quaternion) return true;
        return n == o.n;
    }
};

namespace detail {

// Basis bookkeeping for the Grassmann algebra: bitmask <-> graded-lex index
// tables plus the reordering signs of the wedge product.
struct GrassmannBasis {
    int generators = 0;
    std::vector<std::uint32_t> index_to_mask;
    std::vector<int> mask_to_index;

    explicit GrassmannBasis(int n) : generators(n) {
        const int dim = 1 << n;
        index_to_mask.resize(static_cast<size_t>(dim));
        std::iota(index_to_mask.begin(), index_to_mask.end(), 0u);
        auto elements = [n](std::uint32_t m) {
            std::vector<int> e;
            for (int i = 0; i < n; ++i)
                if (m & (1u << i)) e.push_back(i);
            return e;
        };
        std::sort(index_to_mask.begin(), index_to_mask.end(),
                  [&](std::uint32_t x, std::uint32_t y) {
                      const int px = std::popcount(x), py = std::popcount(y);
                      if (px != py) return px < py;
                      return elements(x) < elements(y);
                  });
        mask_to_index.resize(static_cast<size_t>(dim));
        for (int i = 0; i < dim; ++i) mask_to_index[index_to_mask[static_cast<size_t>(i)]] = i;
    }

    // sign of e_S * e_T as (-1)^{#{(s,t) in S x T : s > t}}; assumes S, T disjoint
    static int wedge_sign(std::uint32_t s, std::uint32_t t) {
        int inversions = 0;
        for (std::uint32_t rest = t; rest;) {
            const int bit = std::countr_zero(rest);
            rest &= rest - 1;
            const std::uint32_t above = s & ~((2u << bit) - 1u);
            inversions += std::popcount(above);
        }
        return (inversions & 1) ? -1 : 1;
    }

    // reversal sign (-1)^{k(k-1)/2} on a degree-k basis element
    static int reversal_sign(int degree) {
        return ((degree * (degree - 1) / 2) & 1) ? -1 : 1;
    }
};

inline const GrassmannBasis& grassmann_basis(int n) {
    static const std::vector<GrassmannBasis> all = [] {
        std::vector<GrassmannBasis> v;
        v.reserve(13);
        for (int i = 0; i <= 12; ++i) v.emplace_back(i);
        return v;
    }();
    return all[static_cast<size_t>(n)];
}

inline void pin_real(std::vector<cplx>& coords, ScalarField f) {
    if (f == ScalarField::real)
        for (auto& c : coords) c = cplx{c.real(), 0.0};
}

}  // namespace detail

struct AlgebraElement {
    AlgebraDescriptor descriptor;
    std::vector<cplx> coords;

    AlgebraElement() = default;
    AlgebraElement(AlgebraDescriptor d, std::vector<cplx> c)
        : descriptor(d), coords(std::move(c)) {
        if (static_cast<int>(coords.size()) != descriptor.dimension())
            throw std::invalid_argument("coordinate length does not match algebra dimension");
        detail::pin_real(coords, descriptor.field);
    }
};

/// Element of the topological dual; same coordinate layout as the algebra.
struct DualFunctional {
    AlgebraDescriptor descriptor;
    std::vector<cplx> coords;

    DualFunctional() = default;
    DualFunctional(AlgebraDescriptor d, std::vector<cplx> c)
        : descriptor(d), coords(std::move(c)) {
        if (static_cast<int>(coords.size()) != descriptor.dimension())
            throw std::invalid_argument("coordinate length does not match algebra dimension");
        detail::pin_real(coords, descriptor.field);
    }
};

inline AlgebraElement zero(const AlgebraDescriptor& d) {
    return {d, std::vector<cplx>(static_cast<size_t>(d.dimension()), cplx{0.0, 0.0})};
}

inline AlgebraElement unit(const AlgebraDescriptor& d) {
    std::vector<cplx> c(static_cast<size_t>(d.dimension()), cplx{0.0, 0.0});
    switch (d.kind) {
        case AlgebraKind::matrix:
            for (int i = 0; i < d.n; ++i) c[static_cast<size_t>(i * d.n + i)] = 1.0;
            break;
        case AlgebraKind::quaternion:
        case AlgebraKind::grassmann:   // graded-lex puts the empty set first
        case AlgebraKind::weighted_seq:
            c[0] = 1.0;
            break;
    }
    return {d, std::move(c)};
}

namespace detail {
inline void require_same(const AlgebraDescriptor& x, const AlgebraDescriptor& y) {
    if (!(x == y)) throw std::invalid_argument("descriptor mismatch");
}
}  // namespace detail

inline AlgebraElement add(const AlgebraElement& x, const AlgebraElement& y) {
    detail::require_same(x.descriptor, y.descriptor);
    AlgebraElement r = x;
    for (size_t i = 0; i < r.coords.size(); ++i) r.coords[i] += y.coords[i];
    return r;
}

inline AlgebraElement scale(const AlgebraElement& x, cplx s) {
    AlgebraElement r = x;
    for (auto& c : r.coords) c *= s;
    return r;
}

/// Associative product of the algebra.
inline AlgebraElement mul(const AlgebraElement& x, const AlgebraElement& y) {
    detail::require_same(x.descriptor, y.descriptor);
    const auto& d = x.descriptor;
    AlgebraElement r = zero(d);
    switch (d.kind) {
        case AlgebraKind::matrix: {
            const int n = d.n;
            for (int i = 0; i < n; ++i)
                for (int k = 0; k < n; ++k) {
                    const cplx xv = x.coords[static_cast<size_t>(i * n + k)];
                    if (xv == cplx{0.0, 0.0}) continue;
                    for (int j = 0; j < n; ++j)
                        r.coords[static_cast<size_t>(i * n + j)] +=
                            xv * y.coords[static_cast<size_t>(k * n + j)];
                }
            break;
        }
        case AlgebraKind::quaternion: {
            const cplx a = x.coords[0], b = x.coords[1], c = x.coords[2], e = x.coords[3];
            const cplx f = y.coords[0], g = y.coords[1], h = y.coords[2], k = y.coords[3];
            r.coords[0] = a * f - b * g - c * h - e * k;
            r.coords[1] = a * g + b * f + c * k - e * h;
            r.coords[2] = a * h - b * k + c * f + e * g;
            r.coords[3] = a * k + b * h - c * g + e * f;
            break;
        }
        case AlgebraKind::grassmann: {
            const auto& basis = detail::grassmann_basis(d.n);
            const int dim = d.dimension();
            for (int i = 0; i < dim; ++i) {
                const cplx xv = x.coords[static_cast<size_t>(i)];
                if (xv == cplx{0.0, 0.0}) continue;
                const std::uint32_t ms = basis.index_to_mask[static_cast<size_t>(i)];
                for (int j = 0; j < dim; ++j) {
                    const cplx yv = y.coords[static_cast<size_t>(j)];
                    if (yv == cplx{0.0, 0.0}) continue;
                    const std::uint32_t mt = basis.index_to_mask[static_cast<size_t>(j)];
                    if (ms & mt) continue;  // repeated generator
                    const int sign = detail::GrassmannBasis::wedge_sign(ms, mt);
                    r.coords[static_cast<size_t>(basis.mask_to_index[ms | mt])] +=
                        static_cast<double>(sign) * xv * yv;
                }
            }
            break;
        }
        case AlgebraKind::weighted_seq: {
            const int L = d.n;
            for (int i = 0; i < L; ++i) {
                const cplx xv = x.coords[static_cast<size_t>(i)];
                if (xv == cplx{0.0, 0.0}) continue;
                for (int j = 0; j + i < L; ++j)
                    r.coords[static_cast<size_t>(i + j)] += xv * y.coords[static_cast<size_t>(j)];
            }
            break;
        }
    }
    return r;
}

inline AlgebraElement operator+(const AlgebraElement& x, const AlgebraElement& y) { return add(x, y); }
inline AlgebraElement operator*(const AlgebraElement& x, const AlgebraElement& y) { return mul(x, y); }
inline AlgebraElement operator*(cplx s, const AlgebraElement& x) { return scale(x, s); }

/// A^n with A^0 = unit, computed by iterated multiplication.
inline AlgebraElement power(const AlgebraElement& x, int n) {
    if (n < 0) throw std::invalid_argument("power requires n >= 0");
    AlgebraElement r = unit(x.descriptor);
    for (int i = 0; i < n; ++i) r = mul(r, x);
    return r;
}

/// All powers A^0..A^n in one pass, for series evaluation.
inline std::vector<AlgebraElement> powers_upto(const AlgebraElement& x, int n) {
    std::vector<AlgebraElement> p;
    p.reserve(static_cast<size_t>(n) + 1);
    p.push_back(unit(x.descriptor));
    for (int i = 1; i <= n; ++i) p.push_back(mul(p.back(), x));
    return p;
}

namespace detail {
inline std::vector<cplx> involute_coords(const AlgebraDescriptor& d,
                                         const std::vector<cplx>& in) {
    std::vector<cplx> out(in.size());
    switch (d.kind) {
        case AlgebraKind::matrix: {
            const int n = d.n;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    out[static_cast<size_t>(j * n + i)] =
                        std::conj(in[static_cast<size_t>(i * n + j)]);
            break;
        }
        case AlgebraKind::quaternion:
            out[0] = std::conj(in[0]);
            for (int i = 1; i < 4; ++i) out[static_cast<size_t>(i)] = -std::conj(in[static_cast<size_t>(i)]);
            break;
        case AlgebraKind::grassmann: {
            const auto& basis = grassmann_basis(d.n);
            for (size_t i = 0; i < in.size(); ++i) {
                const int deg = std::popcount(basis.index_to_mask[i]);
                out[i] = static_cast<double>(GrassmannBasis::reversal_sign(deg)) * std::conj(in[i]);
            }
            break;
        }
        case AlgebraKind::weighted_seq:
            for (size_t i = 0; i < in.size(); ++i) out[i] = std::conj(in[i]);
            break;
    }
    return out;
}
}  // namespace detail

/// Conjugate-linear involution A -> A*: conjugate transpose, quaternion
/// conjugate, coefficient conjugation with the degree reversal sign, or
/// entrywise conjugation. Product-reversing: (AB)* = B* A*.
inline AlgebraElement involution(const AlgebraElement& x) {
    return {x.descriptor, detail::involute_coords(x.descriptor, x.coords)};
}

/// The matching involution a -> a* on the dual, so that conj<a,A> = <a*,A*>.
inline DualFunctional dual_involution(const DualFunctional& a) {
    return {a.descriptor, detail::involute_coords(a.descriptor, a.coords)};
}

/// Duality pairing <a,A>. Matrix: trace(a^H A); quaternion: Re(conj(a) A);
/// grassmann and weighted_seq: coordinate pairing sum conj(a_i) A_i.
inline cplx pair(const DualFunctional& a, const AlgebraElement& x) {
    detail::require_same(a.descriptor, x.descriptor);
    switch (a.descriptor.kind) {
        case AlgebraKind::quaternion: {
            // Re(conj(a) x) reduces to the Euclidean coordinate dot product
            double s = 0.0;
            for (int i = 0; i < 4; ++i)
                s += a.coords[static_cast<size_t>(i)].real() * x.coords[static_cast<size_t>(i)].real();
            return {s, 0.0};
        }
        case AlgebraKind::matrix:
        case AlgebraKind::grassmann:
        case AlgebraKind::weighted_seq: {
            cplx s{0.0, 0.0};
            for (size_t i = 0; i < x.coords.size(); ++i) s += std::conj(a.coords[i]) * x.coords[i];
            return s;
        }
    }
    return {0.0, 0.0};
}

/// Level norm ||A||_t. The level t only grades the weighted_seq family;
/// the other algebras carry a single Banach norm (Frobenius, modulus, l1).
inline double level_norm(const AlgebraElement& x, double t = 0.0) {
    switch (x.descriptor.kind) {
        case AlgebraKind::matrix:
        case AlgebraKind::quaternion: {
            double s = 0.0;
            for (const auto& c : x.coords) s += std::norm(c);
            return std::sqrt(s);
        }
        case AlgebraKind::grassmann: {
            double s = 0.0;
            for (const auto& c : x.coords) s += std::abs(c);
            return s;
        }
        case AlgebraKind::weighted_seq: {
            double s = 0.0;
            for (size_t i = 0; i < x.coords.size(); ++i)
                s += std::abs(x.coords[i]) * std::pow(x.descriptor.beta, -static_cast<double>(i) * t);
            return s;
        }
    }
    return 0.0;
}

/// Dual norm ||a||' induced by the pairing against ||.||_t, so that
/// |<a,A>| <= ||a||' ||A||_t holds in every algebra.
inline double dual_norm(const DualFunctional& a, double t = 0.0) {
    switch (a.descriptor.kind) {
        case AlgebraKind::matrix:
        case AlgebraKind::quaternion: {
            double s = 0.0;
            for (const auto& c : a.coords) s += std::norm(c);
            return std::sqrt(s);
        }
        case AlgebraKind::grassmann: {
            double m = 0.0;
            for (const auto& c : a.coords) m = std::max(m, std::abs(c));
            return m;
        }
        case AlgebraKind::weighted_seq: {
            double m = 0.0;
            for (size_t i = 0; i < a.coords.size(); ++i)
                m = std::max(m, std::abs(a.coords[i]) *
                                    std::pow(a.descriptor.beta, static_cast<double>(i) * t));
            return m;
        }
    }
    return 0.0;
}

/// Witness constants for the graded product inequality
/// ||AB||_s <= c_{s,t} ||A||_t ||B||_s. The toy weighted-sequence family
/// attains h(t) = t and c = 1; the Banach algebras are the degenerate case.
struct StrongAlgebraWitness {
    double t = 0.0;
    double h_of_t = 0.0;
    double c_st = 1.0;
    double d_t = 1.0;  // = c_{h(t),t}
};

inline StrongAlgebraWitness strong_witness(const AlgebraDescriptor&, double t = 0.0) {
    return {t, t, 1.0, 1.0};
}

/// Bound d_t^{n-1} ||A||_t^n on ||A^n||_{h(t)}; n = 0 returns ||unit||.
inline double power_norm_bound(const AlgebraElement& x, int n, double t = 0.0) {
    if (n <= 0) return level_norm(unit(x.descriptor), t);
    const auto w = strong_witness(x.descriptor, t);
    return std::pow(w.d_t, n - 1) * std::pow(level_norm(x, t), n);
}

struct StrongInequalityReport {
    int samples = 0;
    double max_ratio = 0.0;       // max ||AB||_s / (||A||_t ||B||_s)
    double t = 0.0;
    double s = 0.0;
};

inline AlgebraElement random_element(const AlgebraDescriptor& d, Rng& rng,
                                     double half_width = 1.0) {
    std::vector<cplx> c(static_cast<size_t>(d.dimension()));
    const bool real_only = d.field == ScalarField::real;
    for (auto& v : c) v = rng.complex_in_box(half_width, real_only);
    return {d, std::move(c)};
}

inline DualFunctional random_functional(const AlgebraDescriptor& d, Rng& rng,
                                        double half_width = 1.0) {
    std::vector<cplx> c(static_cast<size_t>(d.dimension()));
    const bool real_only = d.field == ScalarField::real;
    for (auto& v : c) v = rng.complex_in_box(half_width, real_only);
    return {d, std::move(c)};
}

/// Samples random truncated sequences and reports the worst observed ratio
/// in the defining inequality of a strong algebra (expected <= 1 here).
inline StrongInequalityReport verify_strong_inequality(const AlgebraDescriptor& d, int samples,
                                                       double t, double s,
                                                       std::uint64_t seed = 1) {
    if (d.kind != AlgebraKind::weighted_seq)
        throw std::invalid_argument("verify_strong_inequality expects a weighted_seq algebra");
    if (s < t) throw std::invalid_argument("verify_strong_inequality requires s >= t");
    Rng rng(seed);
    StrongInequalityReport rep;
    rep.samples = samples;
    rep.t = t;
    rep.s = s;
    for (int i = 0; i < samples; ++i) {
        const auto a = random_element(d, rng);
        const auto b = random_element(d, rng);
        const double den = level_norm(a, t) * level_norm(b, s);
        if (den == 0.0) continue;
        rep.max_ratio = std::max(rep.max_ratio, level_norm(mul(a, b), s) / den);
    }
    return rep;
}

// Grassmann body/soul decomposition helpers.
inline cplx grassmann_body(const AlgebraElement& x) {
    if (x.descriptor.kind != AlgebraKind::grassmann)
        throw std::invalid_argument("body/soul requires a grassmann element");
    return x.coords[0];
}

inline bool has_zero_body(const AlgebraElement& x) {
    return grassmann_body(x) == cplx{0.0, 0.0};
}

}  // namespace akx
