#pragma once

// Kernel representations and the derivative-kernel machinery: bivariate
// coefficient grids K(z,w) = sum c[j][k] z^j conj(w)^k, the blocks
// K_{n,m}(z,w) = (1/n!m!) d^{n+m}K / dz^n dwbar^m computed exactly by
// combinatorial reindexing, the jet factorization checks, the extended
// dual-pairing kernel, and the four closed-form specializations (Fock,
// matrix trace, quaternion, Grassmann).

#include <cmath>

#include "akx/algebra.hpp"
#include "akx/common.hpp"
#include "akx/jet.hpp"
#include "akx/linalg.hpp"
#include "akx/series.hpp"

namespace akx {

/// Thrown when a request is outside the method's certified domain (scaling
/// past M0, uncertifiable tails, l2 failures). Distinct from argument
/// errors: the CLI maps this to its "method says no" exit code.
class method_error : public std::runtime_error {
  public:
    explicit method_error(const std::string& what) : std::runtime_error(what) {}
};

/// Bivariate kernel coefficients: K(z,w) = sum_{j,k} c[j][k] z^j conj(w)^k
/// with p x p blocks, Hermitian-symmetric (c[j][k] = c[k][j]^H) so that
/// K(z,w) = K(w,z)^H.
struct KernelCoefficients {
    int p = 1;
    int deg = 0;              // grid covers j,k in [0, deg]
    std::vector<cplx> c;      // [(j*(deg+1)+k)*p*p + r*p + s]
    double radius = kInf;

    cplx& at(int j, int k, int r = 0, int s = 0) {
        return c[(static_cast<size_t>(j) * (deg + 1) + k) * p * p + static_cast<size_t>(r) * p + s];
    }
    const cplx& at(int j, int k, int r = 0, int s = 0) const {
        return c[(static_cast<size_t>(j) * (deg + 1) + k) * p * p + static_cast<size_t>(r) * p + s];
    }

    Mat block(int j, int k) const {
        Mat b(p, p);
        for (int r = 0; r < p; ++r)
            for (int s = 0; s < p; ++s) b(r, s) = at(j, k, r, s);
        return b;
    }

    void validate_hermitian(double tol = 1e-12) const {
        double scale = 0.0;
        for (const auto& v : c) scale = std::max(scale, std::abs(v));
        for (int j = 0; j <= deg; ++j)
            for (int k = j; k <= deg; ++k)
                for (int r = 0; r < p; ++r)
                    for (int s = 0; s < p; ++s)
                        if (std::abs(at(j, k, r, s) - std::conj(at(k, j, s, r))) > tol * (1.0 + scale))
                            throw std::invalid_argument("kernel coefficients are not Hermitian-symmetric");
    }

    static KernelCoefficients scalar_grid(int degree, double r = kInf) {
        KernelCoefficients k;
        k.p = 1;
        k.deg = degree;
        k.c.assign(static_cast<size_t>(degree + 1) * (degree + 1), cplx{0.0, 0.0});
        k.radius = r;
        return k;
    }

    /// Constructive coefficient bound max |c[j][k]| R^{j+k} over the grid,
    /// used to certify beyond-grid tails of finite-radius kernels.
    double coefficient_bound() const {
        double c0 = 0.0;
        for (int j = 0; j <= deg; ++j)
            for (int k = 0; k <= deg; ++k) {
                double m = 0.0;
                for (int r = 0; r < p; ++r)
                    for (int s = 0; s < p; ++s) m = std::max(m, std::abs(at(j, k, r, s)));
                const double w = std::isfinite(radius) ? std::pow(radius, j + k) : 1.0;
                c0 = std::max(c0, m * w);
            }
        return c0;
    }
};

/// Kernel presets: "fock" (e^{z wbar}), "geom" (1/(1 - z wbar), radius 1),
/// "poly2" ((1 + z wbar)^2).
inline KernelCoefficients kernel_preset(const std::string& name, int degree = 0) {
    if (name == "fock") {
        const int d = degree > 0 ? degree : 48;
        auto k = KernelCoefficients::scalar_grid(d);
        double f = 1.0;
        for (int j = 0; j <= d; ++j) {
            if (j > 0) f *= j;
            k.at(j, j) = 1.0 / f;
        }
        return k;
    }
    if (name == "geom") {
        const int d = degree > 0 ? degree : 96;
        auto k = KernelCoefficients::scalar_grid(d, 1.0);
        for (int j = 0; j <= d; ++j) k.at(j, j) = 1.0;
        return k;
    }
    if (name == "poly2") {
        auto k = KernelCoefficients::scalar_grid(2);
        k.at(0, 0) = 1.0;
        k.at(1, 1) = 2.0;
        k.at(2, 2) = 1.0;
        return k;
    }
    throw std::invalid_argument("unknown kernel preset: " + name);
}

struct KernelValue {
    Mat value;
    double tail_bound = 0.0;
};

namespace detail {
inline void require_in_domain(const KernelCoefficients& k, cplx z, cplx w) {
    if (std::isfinite(k.radius) && !(std::abs(z) < k.radius && std::abs(w) < k.radius))
        throw std::domain_error("kernel arguments outside the domain of analyticity");
}

inline std::vector<cplx> geometric_powers(cplx base, int n) {
    std::vector<cplx> p(static_cast<size_t>(n) + 1);
    p[0] = 1.0;
    for (int i = 1; i <= n; ++i) p[static_cast<size_t>(i)] = p[static_cast<size_t>(i) - 1] * base;
    return p;
}
}  // namespace detail

/// K(z,w) by the truncated double series, with a beyond-grid certificate
/// for finite-radius kernels (zero for entire grids, whose beyond-grid
/// coefficients are zero by representation contract).
inline KernelValue kernel_eval(const KernelCoefficients& k, cplx z, cplx w) {
    detail::require_in_domain(k, z, w);
    const auto zp = detail::geometric_powers(z, k.deg);
    const auto wp = detail::geometric_powers(std::conj(w), k.deg);
    KernelValue out;
    out.value = Mat(k.p, k.p);
    for (int j = 0; j <= k.deg; ++j)
        for (int kk = 0; kk <= k.deg; ++kk) {
            const cplx f = zp[static_cast<size_t>(j)] * wp[static_cast<size_t>(kk)];
            if (f == cplx{0.0, 0.0}) continue;
            for (int r = 0; r < k.p; ++r)
                for (int s = 0; s < k.p; ++s) out.value(r, s) += f * k.at(j, kk, r, s);
        }
    if (std::isfinite(k.radius)) {
        const double x = std::abs(z) / k.radius, y = std::abs(w) / k.radius;
        double sx = 0.0, sy = 0.0, px = 1.0, py = 1.0;
        for (int j = 0; j <= k.deg; ++j) {
            sx += px;
            sy += py;
            px *= x;
            py *= y;
        }
        const double fullx = 1.0 / (1.0 - x), fully = 1.0 / (1.0 - y);
        out.tail_bound = k.coefficient_bound() * std::max(0.0, fullx * fully - sx * sy);
    }
    return out;
}

/// The (n,m) derivative block (1/n!m!) d^{n+m} K / dz^n dwbar^m, computed
/// exactly from the coefficient grid:
///   sum_{j>=n,k>=m} C(j,n) C(k,m) c[j][k] z^{j-n} conj(w)^{k-m}.
inline Mat derivative_kernel(const KernelCoefficients& k, cplx z, cplx w, int n, int m) {
    if (n < 0 || m < 0) throw std::out_of_range("derivative_kernel: index out of range");
    detail::require_in_domain(k, z, w);
    // orders past the grid differentiate away every stored coefficient
    if (n > k.deg || m > k.deg) return Mat(k.p, k.p);
    const auto zp = detail::geometric_powers(z, k.deg);
    const auto wp = detail::geometric_powers(std::conj(w), k.deg);
    Mat b(k.p, k.p);
    for (int j = n; j <= k.deg; ++j) {
        const double cjn = binomial(j, n);
        for (int kk = m; kk <= k.deg; ++kk) {
            const cplx f = cjn * binomial(kk, m) * zp[static_cast<size_t>(j - n)] * wp[static_cast<size_t>(kk - m)];
            if (f == cplx{0.0, 0.0}) continue;
            for (int r = 0; r < k.p; ++r)
                for (int s = 0; s < k.p; ++s) b(r, s) += f * k.at(j, kk, r, s);
        }
    }
    return b;
}

struct RadiusEstimate {
    double m0 = kInf;   // infinite sentinel for entire kernels
    double big_c = 0.0; // realized sup of |K_nm(z,w)| M^{n+m} over computed blocks
};

/// Largest admissible scaling M0 at (z,w) by the triangle-inequality margin
/// |z| + M0 < R (policy epsilon 1e-3), plus the realized constant C.
inline RadiusEstimate radius_estimate(const KernelCoefficients& k, cplx z, cplx w,
                                      int probe_blocks = 12) {
    detail::require_in_domain(k, z, w);
    RadiusEstimate est;
    constexpr double eps = 1e-3;
    if (std::isfinite(k.radius)) {
        est.m0 = k.radius - std::max(std::abs(z), std::abs(w)) - eps;
        if (est.m0 <= 0.0) throw std::domain_error("no positive scaling radius at (z,w)");
    }
    const double m_for_c = std::isfinite(k.radius) ? est.m0 : 2.0;
    const int nb = std::min(probe_blocks, k.deg + 1);
    for (int n = 0; n < nb; ++n)
        for (int m = 0; m < nb; ++m) {
            const Mat b = derivative_kernel(k, z, w, n, m);
            est.big_c = std::max(est.big_c, frobenius(b) * std::pow(m_for_c, n + m));
        }
    return est;
}

struct ScriptKBlock {
    int n = 0;            // truncation order
    int p = 1;
    Mat blocks;           // (n*p) x (n*p), block (i,j) = K_{i,j}(z,w)
    double bound = 0.0;   // constructive operator-norm bound
    double m_used = 0.0;
    double big_c = 0.0;
};

/// All derivative blocks with n,m < N, plus the constructive Cauchy-Schwarz
/// bound C/(1 - 1/M^2) (entire, with M = 2) or C/(1 - M/M0) (finite
/// radius, with M = M0/2); C is realized over the computed blocks, which
/// makes the bound valid for the truncated operator.
inline ScriptKBlock script_k_block(const KernelCoefficients& k, cplx z, cplx w, int order) {
    if (order < 1) throw std::invalid_argument("script_k_block requires N >= 1");
    detail::require_in_domain(k, z, w);

    ScriptKBlock out;
    out.n = order;
    out.p = k.p;
    out.blocks = Mat(order * k.p, order * k.p);

    double m_pick;
    double denom;
    if (std::isfinite(k.radius)) {
        const double m0 = radius_estimate(k, z, w).m0;
        m_pick = 0.5 * m0;
        denom = 1.0 - m_pick / m0;
    } else {
        m_pick = 2.0;
        denom = 1.0 - 1.0 / (m_pick * m_pick);
    }

    for (int n = 0; n < order; ++n)
        for (int m = 0; m < order; ++m) {
            const Mat b = derivative_kernel(k, z, w, n, m);
            out.big_c = std::max(out.big_c, frobenius(b) * std::pow(m_pick, n + m));
            for (int r = 0; r < k.p; ++r)
                for (int s = 0; s < k.p; ++s) out.blocks(n * k.p + r, m * k.p + s) = b(r, s);
        }
    out.m_used = m_pick;
    out.bound = out.big_c / denom;
    return out;
}

// ---------------------------------------------------------------------------
// H(K) pairing and jet factorization for diagonal coefficient grids
// ---------------------------------------------------------------------------

inline bool is_diagonal_kernel(const KernelCoefficients& k) {
    if (k.p != 1) return false;
    for (int j = 0; j <= k.deg; ++j)
        for (int m = 0; m <= k.deg; ++m)
            if (j != m && k.at(j, m) != cplx{0.0, 0.0}) return false;
    return true;
}

/// Coefficient array of D_{m,w} : zeta -> (1/m!) d^m K(zeta, w) / dwbar^m,
/// an element of H(K) for every m and w in the domain.
inline std::vector<cplx> d_function_coeffs(const KernelCoefficients& k, int m, cplx w) {
    if (k.p != 1) throw std::invalid_argument("d_function_coeffs supports p == 1 kernels");
    if (m < 0) throw std::out_of_range("d_function_coeffs: index out of range");
    std::vector<cplx> d(static_cast<size_t>(k.deg) + 1, cplx{0.0, 0.0});
    if (m > k.deg) return d;  // the m-th derivative kills the whole grid
    const auto wp = detail::geometric_powers(std::conj(w), k.deg);
    for (int j = 0; j <= k.deg; ++j) {
        cplx s{0.0, 0.0};
        for (int kk = m; kk <= k.deg; ++kk)
            s += binomial(kk, m) * k.at(j, kk) * wp[static_cast<size_t>(kk - m)];
        d[static_cast<size_t>(j)] = s;
    }
    return d;
}

/// H(K) inner product for diagonal kernels K = sum gamma_k (z wbar)^k:
/// <f,g> = sum f_k conj(g_k) / gamma_k. Members must vanish where
/// gamma_k = 0. Fock (gamma_k = 1/k!) reproduces fock_inner.
inline cplx hk_inner(const KernelCoefficients& k, const std::vector<cplx>& f,
                     const std::vector<cplx>& g) {
    if (!is_diagonal_kernel(k))
        throw method_error("H(K) pairing implemented for diagonal coefficient grids only");
    double scale = 0.0;
    for (const auto& v : f) scale = std::max(scale, std::abs(v));
    for (const auto& v : g) scale = std::max(scale, std::abs(v));
    cplx s{0.0, 0.0};
    const size_t common = std::min({f.size(), g.size(), static_cast<size_t>(k.deg) + 1});
    for (size_t j = 0; j < common; ++j) {
        const cplx gamma = k.at(static_cast<int>(j), static_cast<int>(j));
        if (gamma == cplx{0.0, 0.0}) {
            if (std::abs(f[j]) > 1e-12 * (1.0 + scale) || std::abs(g[j]) > 1e-12 * (1.0 + scale))
                throw method_error("function is not a member of H(K)");
            continue;
        }
        s += f[j] * std::conj(g[j]) / gamma;
    }
    return s;
}

/// Verifies the factorization K_block(z,w) = J_z J_w^* two ways:
/// (a) every block K_{n,m}(z,w) against the H(K) pairing of the kernel
///     sections <D_{m,w}, D_{n,z}>, and
/// (b) for each supplied eta, the jet of sum_m D_{m,w} eta_m at z against
///     the block-matrix action K_block(z,w) eta.
/// Returns the max entrywise deviation.
inline double factorization_check(const KernelCoefficients& k,
                                  const std::vector<std::vector<cplx>>& etas, cplx z, cplx w,
                                  int order) {
    if (k.p != 1) throw method_error("factorization check supports p == 1 kernels");
    if (!is_diagonal_kernel(k)) throw method_error("unsupported kernel family");
    double dev = 0.0;

    std::vector<std::vector<cplx>> dw(static_cast<size_t>(order)), dz(static_cast<size_t>(order));
    for (int m = 0; m < order; ++m) {
        dw[static_cast<size_t>(m)] = d_function_coeffs(k, m, w);
        dz[static_cast<size_t>(m)] = d_function_coeffs(k, m, z);
    }

    ScriptKBlock blk = script_k_block(k, z, w, order);
    for (int n = 0; n < order; ++n)
        for (int m = 0; m < order; ++m) {
            const cplx via_inner = hk_inner(k, dw[static_cast<size_t>(m)], dz[static_cast<size_t>(n)]);
            dev = std::max(dev, std::abs(via_inner - blk.blocks(n, m)));
        }

    for (const auto& eta : etas) {
        if (static_cast<int>(eta.size()) != order)
            throw std::invalid_argument("eta length must equal the truncation order");
        std::vector<cplx> h(static_cast<size_t>(k.deg) + 1, cplx{0.0, 0.0});
        for (int m = 0; m < order; ++m)
            for (size_t j = 0; j < h.size(); ++j)
                h[j] += dw[static_cast<size_t>(m)][j] * eta[static_cast<size_t>(m)];
        const auto jet = jet_of(EntireFunctionRep::scalar(std::move(h), k.radius), z, order);
        for (int n = 0; n < order; ++n) {
            cplx want{0.0, 0.0};
            for (int m = 0; m < order; ++m) want += blk.blocks(n, m) * eta[static_cast<size_t>(m)];
            dev = std::max(dev, std::abs(jet.entries[static_cast<size_t>(n)] - want));
        }
    }
    return dev;
}

// ---------------------------------------------------------------------------
// Extended kernels over algebra tuples
// ---------------------------------------------------------------------------

/// One argument slot of an extended kernel: base point, the sequence
/// entries X_n = <a, A_n*> (for the power case A_n = (A*)^n this is
/// <a, A^n>), and the geometric growth data backing tail certificates.
/// A generic finite sequence carries ratio 0: it has no continuation, so
/// truncating at its length is exact.
struct XSeries {
    cplx z{0.0, 0.0};
    std::vector<cplx> x;
    double growth_scale = 0.0;
    double growth_ratio = 0.0;
    bool complete = false;  // no nonzero entries exist beyond x.size()
};

/// X-series of the special power case A_n = (A*)^n.
inline XSeries power_x_series(cplx z, const AlgebraElement& arg, const DualFunctional& a,
                              int n_entries, double level = 0.0) {
    XSeries s;
    s.z = z;
    s.x.reserve(static_cast<size_t>(n_entries));
    AlgebraElement pw = unit(arg.descriptor);
    for (int n = 0; n < n_entries; ++n) {
        if (n > 0) pw = mul(pw, arg);
        s.x.push_back(pair(a, pw));
    }
    const auto witness = strong_witness(arg.descriptor, level);
    s.growth_scale = dual_norm(a, level) / witness.d_t;
    s.growth_ratio = witness.d_t * level_norm(arg, level);
    s.complete = arg.descriptor.kind == AlgebraKind::grassmann && has_zero_body(arg) &&
                 n_entries > arg.descriptor.n;  // nilpotent tail fully enumerated
    return s;
}

/// X-series of an explicitly given sequence (A_n): entries <a, A_n*>.
inline XSeries sequence_x_series(cplx z, const std::vector<AlgebraElement>& seq,
                                 const DualFunctional& a) {
    XSeries s;
    s.z = z;
    s.x.reserve(seq.size());
    for (const auto& el : seq) s.x.push_back(pair(a, involution(el)));
    s.complete = true;
    return s;
}

struct ExtendedValue {
    cplx value{0.0, 0.0};
    double tail_bound = 0.0;
};

namespace detail {
// sum over (n,m) outside [0,N)^2 of ra^n rb^m, for ra, rb in [0,1)
inline double double_geometric_tail(double ra, double rb, int order) {
    if (ra >= 1.0 || rb >= 1.0) return kInf;
    auto partial = [order](double r) {
        double s = 0.0, p = 1.0;
        for (int i = 0; i < order; ++i) {
            s += p;
            p *= r;
        }
        return s;
    };
    const double full = 1.0 / ((1.0 - ra) * (1.0 - rb));
    return std::max(0.0, full - partial(ra) * partial(rb));
}

inline double x_entry_bound(const XSeries& s) {
    double m = 0.0;
    for (const auto& v : s.x) m = std::max(m, std::abs(v));
    return m;
}
}  // namespace detail

/// The extended kernel
///   sum_{n,m} <a,A_n*> K_{n,m}(z,w) conj(<b,B_m*>)
/// truncated at N, with a certificate combining the kernel-block decay
/// |K_{n,m}| <= C / M^{n+m} and the geometric growth of the X entries.
inline ExtendedValue extended_kernel(const KernelCoefficients& k, const XSeries& xa,
                                     const XSeries& xb, int order) {
    if (k.p != 1) throw std::invalid_argument("extended_kernel supports p == 1 kernels");
    const int na = std::min<int>(order, static_cast<int>(xa.x.size()));
    const int nb = std::min<int>(order, static_cast<int>(xb.x.size()));

    // a side is closed when every nonzero entry it has was summed
    const bool a_closed = xa.complete && static_cast<int>(xa.x.size()) <= order;
    const bool b_closed = xb.complete && static_cast<int>(xb.x.size()) <= order;
    const double ga = a_closed ? 0.0 : xa.growth_ratio;
    const double gb = b_closed ? 0.0 : xb.growth_ratio;

    ExtendedValue out;
    double big_c = 0.0;
    double m_pick;
    if (std::isfinite(k.radius)) {
        const double m0 = radius_estimate(k, xa.z, xb.z).m0;
        m_pick = 0.5 * m0;
        if (ga >= m_pick || gb >= m_pick) m_pick = kInf;  // uncertifiable growth
    } else {
        m_pick = 2.0 * std::max({1.0, ga, gb});
    }

    for (int n = 0; n < na; ++n)
        for (int m = 0; m < nb; ++m) {
            const Mat b = derivative_kernel(k, xa.z, xb.z, n, m);
            if (std::isfinite(m_pick))
                big_c = std::max(big_c, std::abs(b(0, 0)) * std::pow(m_pick, n + m));
            out.value += xa.x[static_cast<size_t>(n)] * b(0, 0) * std::conj(xb.x[static_cast<size_t>(m)]);
        }

    if (a_closed && b_closed) {
        out.tail_bound = 0.0;
    } else if (!std::isfinite(m_pick)) {
        out.tail_bound = kInf;
    } else {
        const double sa = a_closed ? detail::x_entry_bound(xa) : xa.growth_scale;
        const double sb = b_closed ? detail::x_entry_bound(xb) : xb.growth_scale;
        out.tail_bound = sa * sb * big_c *
                         detail::double_geometric_tail(ga / m_pick, gb / m_pick, order);
    }
    return out;
}

/// One evaluation tuple (z, A, a) for the direct extended-Fock kernels.
struct EvalTuple {
    cplx z{0.0, 0.0};
    AlgebraElement arg;
    DualFunctional a;
};

struct SeriesKernelValue {
    cplx value{0.0, 0.0};
    double tail_bound = 0.0;
    int terms_used = 0;
    bool converged = false;
};

/// The extended Fock kernel in its direct, un-recentered form:
///   sum_u <a,(z+A)^u> conj(<b,(w+B)^u>) / u!
/// with the factorial-decay tail certificate.
inline SeriesKernelValue fock_extended(const EvalTuple& ta, const EvalTuple& tb,
                                       const TruncationPolicy& pol, double level = 0.0) {
    pol.validate();
    detail::require_same(ta.arg.descriptor, tb.arg.descriptor);
    const auto shifted_a = add(scale(unit(ta.arg.descriptor), ta.z), ta.arg);
    const auto shifted_b = add(scale(unit(tb.arg.descriptor), tb.z), tb.arg);
    const auto wa = strong_witness(ta.arg.descriptor, level);
    const double ga = wa.d_t * level_norm(shifted_a, level);
    const double gb = wa.d_t * level_norm(shifted_b, level);
    const double scale_ab = dual_norm(ta.a, level) * dual_norm(tb.a, level) / (wa.d_t * wa.d_t);
    const double x = ga * gb;

    SeriesKernelValue out;
    AlgebraElement pa = unit(ta.arg.descriptor);
    AlgebraElement pb = unit(tb.arg.descriptor);
    double fact = 1.0;
    double term_bound = scale_ab;  // bound on |term u| = scale * x^u / u!
    for (int u = 0;; ++u) {
        if (u > 0) {
            fact *= u;
            pa = mul(pa, shifted_a);
            pb = mul(pb, shifted_b);
            term_bound *= x / u;
        }
        out.value += pair(ta.a, pa) * std::conj(pair(tb.a, pb)) / fact;
        out.terms_used = u + 1;
        // remaining terms are bounded by term_bound * x/(u+1) * sum r^k, r = x/(u+2)
        const double ratio = x / (u + 2);
        const double tail =
            ratio < 1.0 ? term_bound * (x / (u + 1)) / (1.0 - ratio) : kInf;
        if (u + 1 >= pol.order && tail <= pol.tail_tol) {
            out.tail_bound = tail;
            out.converged = true;
            break;
        }
        if (u >= pol.max_terms) {
            out.tail_bound = tail;
            out.converged = tail <= pol.tail_tol;
            break;
        }
    }
    return out;
}

/// Matrix specialization through the Kronecker route:
///   Tr( (a^H kron b) exp((z I + A) kron (wbar I + B^H)) ),
/// the exponential evaluated by series on the n^2 x n^2 product using
/// (M kron N)^u = M^u kron N^u.
inline SeriesKernelValue matrix_trace_kernel(const DualFunctional& a, const AlgebraElement& arg_a,
                                             cplx z, const DualFunctional& b,
                                             const AlgebraElement& arg_b, cplx w,
                                             const TruncationPolicy& pol) {
    pol.validate();
    if (arg_a.descriptor.kind != AlgebraKind::matrix || !(arg_a.descriptor == arg_b.descriptor))
        throw std::invalid_argument("matrix_trace_kernel requires matching matrix algebras");
    const int n = arg_a.descriptor.n;

    auto to_mat = [n](const std::vector<cplx>& coords) {
        Mat m(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) m(i, j) = coords[static_cast<size_t>(i * n + j)];
        return m;
    };

    Mat m1 = to_mat(arg_a.coords);
    for (int i = 0; i < n; ++i) m1(i, i) += z;
    Mat m2 = adjoint(to_mat(arg_b.coords));
    for (int i = 0; i < n; ++i) m2(i, i) += std::conj(w);
    const Mat weight = kron(adjoint(to_mat(a.coords)), to_mat(b.coords));

    const double x = frobenius(m1) * frobenius(m2);
    const double wf = frobenius(weight);

    SeriesKernelValue out;
    Mat p1 = Mat::identity(n), p2 = Mat::identity(n);
    double fact = 1.0;
    double term_bound = wf * std::sqrt(static_cast<double>(n) * n);  // |Tr(W kron-power)| <= ||W||_F ||...||_F
    for (int u = 0;; ++u) {
        if (u > 0) {
            fact *= u;
            p1 = p1 * m1;
            p2 = p2 * m2;
            term_bound *= x / u;
        }
        out.value += trace(weight * kron(p1, p2)) / fact;
        out.terms_used = u + 1;
        const double ratio = x / (u + 2);
        const double tail =
            ratio < 1.0 ? term_bound * (x / (u + 1)) / (1.0 - ratio) : kInf;
        if (u + 1 >= pol.order && tail <= pol.tail_tol) {
            out.tail_bound = tail;
            out.converged = true;
            break;
        }
        if (u >= pol.max_terms) {
            out.tail_bound = tail;
            out.converged = tail <= pol.tail_tol;
            break;
        }
    }
    return out;
}

/// Quaternionic extended Fock kernel,
///   sum_u Re( conj(a) (t+p)^u ) Re( conj(q+s)^u b ) / u!.
/// The conjugation on the second slot covers the whole point q+s; this is
/// what the general extended kernel reduces to over the quaternions and is
/// what makes the kernel symmetric and positive definite.
inline SeriesKernelValue quaternion_kernel(const DualFunctional& a, const AlgebraElement& p_el,
                                           double t, const DualFunctional& b,
                                           const AlgebraElement& s_el, double q,
                                           const TruncationPolicy& pol) {
    pol.validate();
    if (p_el.descriptor.kind != AlgebraKind::quaternion ||
        s_el.descriptor.kind != AlgebraKind::quaternion)
        throw std::invalid_argument("quaternion_kernel requires quaternion arguments");
    const auto d = p_el.descriptor;
    const auto left = add(scale(unit(d), t), p_el);
    const auto right = involution(add(scale(unit(d), q), s_el));
    const auto b_rev = dual_involution(b);  // Re(X b) = <b*, X>

    const double x = level_norm(left) * level_norm(right);
    const double scale_ab = dual_norm(a) * dual_norm(b);

    SeriesKernelValue out;
    AlgebraElement pl = unit(d), pr = unit(d);
    double fact = 1.0;
    double term_bound = scale_ab;
    for (int u = 0;; ++u) {
        if (u > 0) {
            fact *= u;
            pl = mul(pl, left);
            pr = mul(pr, right);
            term_bound *= x / u;
        }
        out.value += pair(a, pl).real() * pair(b_rev, pr).real() / fact;
        out.terms_used = u + 1;
        const double ratio = x / (u + 2);
        const double tail =
            ratio < 1.0 ? term_bound * (x / (u + 1)) / (1.0 - ratio) : kInf;
        if (u + 1 >= pol.order && tail <= pol.tail_tol) {
            out.tail_bound = tail;
            out.converged = true;
            break;
        }
        if (u >= pol.max_terms) {
            out.tail_bound = tail;
            out.converged = tail <= pol.tail_tol;
            break;
        }
    }
    return out;
}

/// Grassmann closed form: the Taylor re-expansion of K at the bodies,
///   sum_{n,m <= N_gen} K_{n,m}(z_B, w_B) z_S^n (w_S*)^m,
/// exact by nilpotence of the souls (zero tail). Algebra-valued.
inline AlgebraElement grassmann_closed_form(const KernelCoefficients& k, cplx z_body,
                                            const AlgebraElement& z_soul, cplx w_body,
                                            const AlgebraElement& w_soul) {
    if (k.p != 1) throw std::invalid_argument("grassmann_closed_form supports p == 1 kernels");
    if (z_soul.descriptor.kind != AlgebraKind::grassmann ||
        !(z_soul.descriptor == w_soul.descriptor))
        throw std::invalid_argument("grassmann_closed_form requires matching grassmann souls");
    if (!has_zero_body(z_soul) || !has_zero_body(w_soul))
        throw std::invalid_argument("soul arguments must have zero body");
    detail::require_in_domain(k, z_body, w_body);

    const int ngen = z_soul.descriptor.n;
    const int top = std::min(ngen, k.deg);
    const auto zp = powers_upto(z_soul, top);
    const auto wp = powers_upto(involution(w_soul), top);

    AlgebraElement acc = zero(z_soul.descriptor);
    for (int n = 0; n <= top; ++n)
        for (int m = 0; m <= top; ++m) {
            const cplx knm = derivative_kernel(k, z_body, w_body, n, m)(0, 0);
            if (knm == cplx{0.0, 0.0}) continue;
            acc = add(acc, scale(mul(zp[static_cast<size_t>(n)], wp[static_cast<size_t>(m)]), knm));
        }
    return acc;
}

/// Scalar comparison form of the Grassmann closed form: the two slots are
/// paired with dual functionals factor by factor,
///   sum_{n,m} <a, z_S^n> K_{n,m}(z_B,w_B) conj(<b, w_S^m>),
/// which coincides exactly with extended_kernel over the sequences
/// A_n = (z_S*)^n, B_m = (w_S*)^m.
inline cplx grassmann_closed_form_paired(const KernelCoefficients& k, const DualFunctional& a,
                                         cplx z_body, const AlgebraElement& z_soul,
                                         const DualFunctional& b, cplx w_body,
                                         const AlgebraElement& w_soul) {
    if (k.p != 1) throw std::invalid_argument("grassmann_closed_form supports p == 1 kernels");
    if (!has_zero_body(z_soul) || !has_zero_body(w_soul))
        throw std::invalid_argument("soul arguments must have zero body");
    const int ngen = z_soul.descriptor.n;
    const int top = std::min(ngen, k.deg);
    const auto zp = powers_upto(z_soul, top);
    const auto wp = powers_upto(w_soul, top);
    cplx acc{0.0, 0.0};
    for (int n = 0; n <= top; ++n)
        for (int m = 0; m <= top; ++m) {
            const cplx knm = derivative_kernel(k, z_body, w_body, n, m)(0, 0);
            acc += pair(a, zp[static_cast<size_t>(n)]) * knm *
                   std::conj(pair(b, wp[static_cast<size_t>(m)]));
        }
    return acc;
}

/// The D(M)-scaled kernel <D(M) K_block(z,w) D(M) X_b, X_a>:
///   sum_{n,m} X_a[n] M^{n+m} K_{n,m}(z,w) conj(X_b[m]).
/// Refuses M >= M0(z,w). Equals extended_kernel with A_n replaced by
/// M^n A_n, exactly at truncation.
inline ExtendedValue scaled_kernel(const KernelCoefficients& k, cplx z, cplx w, double m_scale,
                                   const XSeries& xa, const XSeries& xb, int order) {
    if (!(m_scale > 0.0)) throw std::invalid_argument("scaling M must be positive");
    if (k.p != 1) throw std::invalid_argument("scaled_kernel supports p == 1 kernels");
    const auto est = radius_estimate(k, z, w);
    if (m_scale >= est.m0) throw method_error("scaling M exceeds the admissible radius M0");

    const int na = std::min<int>(order, static_cast<int>(xa.x.size()));
    const int nb = std::min<int>(order, static_cast<int>(xb.x.size()));
    // certificate anchor: |K_nm| M_c^{n+m} <= C realized over computed blocks,
    // with M_c strictly above the requested scaling
    const double m_c = std::isfinite(est.m0) ? est.m0 : 2.0 * m_scale + 2.0;
    const double rho = m_scale / m_c;

    ExtendedValue out;
    double big_c = 0.0;
    for (int n = 0; n < std::max(na, 2); ++n) {
        for (int m = 0; m < std::max(nb, 2); ++m) {
            const cplx knm = derivative_kernel(k, z, w, n, m)(0, 0);
            big_c = std::max(big_c, std::abs(knm) * std::pow(m_c, n + m));
            if (n < na && m < nb)
                out.value += xa.x[static_cast<size_t>(n)] * std::pow(m_scale, n + m) * knm *
                             std::conj(xb.x[static_cast<size_t>(m)]);
        }
    }
    out.tail_bound = detail::x_entry_bound(xa) * detail::x_entry_bound(xb) * big_c *
                     detail::double_geometric_tail(rho, rho, order);
    return out;
}

}  // namespace akx
