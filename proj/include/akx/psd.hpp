#pragma once

// Gram assembly over sampled argument tuples, Hermitian/PSD certification
// via the Jacobi eigensolver, and the jet-space isometry check.

#include <cstdlib>
#include <functional>
#include <thread>

#include "akx/common.hpp"
#include "akx/jet.hpp"
#include "akx/kernel.hpp"
#include "akx/linalg.hpp"

namespace akx {

/// Deterministic sample plan: either extended-kernel tuples (z, A, a) or
/// scalar point pairs, generated from the seed.
struct SamplePlan {
    std::uint64_t seed = 1;
    int count = 0;
    std::vector<EvalTuple> tuples;
    std::vector<std::pair<cplx, cplx>> point_pairs;
};

inline SamplePlan make_tuple_plan(const AlgebraDescriptor& d, std::uint64_t seed, int count,
                                  double z_width = 0.7, double el_width = 0.4,
                                  double fn_width = 1.0) {
    if (count < 1 || count > 512) throw std::invalid_argument("sample plan count must be in [1, 512]");
    SamplePlan plan;
    plan.seed = seed;
    plan.count = count;
    Rng rng(seed);
    const bool real_only = d.field == ScalarField::real;
    for (int i = 0; i < count; ++i) {
        EvalTuple t;
        t.z = rng.complex_in_box(z_width, real_only);
        t.arg = random_element(d, rng, el_width);
        t.a = random_functional(d, rng, fn_width);
        plan.tuples.push_back(std::move(t));
    }
    return plan;
}

inline SamplePlan make_pair_plan(std::uint64_t seed, int count, double width = 0.7) {
    if (count < 1 || count > 512) throw std::invalid_argument("sample plan count must be in [1, 512]");
    SamplePlan plan;
    plan.seed = seed;
    plan.count = count;
    Rng rng(seed);
    for (int i = 0; i < count; ++i)
        plan.point_pairs.emplace_back(rng.complex_in_box(width, false),
                                      rng.complex_in_box(width, false));
    return plan;
}

inline int thread_budget() {
    if (const char* env = std::getenv("AKX_THREADS")) {
        const int v = std::atoi(env);
        if (v >= 1) return v;
    }
    return 1;
}

/// Full Gram matrix G[i][j] = kernel(tuple_i, tuple_j). Both triangles are
/// computed so the reported Hermitian defect measures the kernel itself.
/// Entries are independent; rows are distributed over the AKX_THREADS
/// budget with a deterministic result regardless of thread count.
inline Mat gram(const std::function<cplx(int, int)>& kernel_entry, int n) {
    Mat g(n, n);
    const int threads = std::min(thread_budget(), n);
    if (threads <= 1) {
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) g(i, j) = kernel_entry(i, j);
        return g;
    }
    std::vector<std::thread> pool;
    pool.reserve(static_cast<size_t>(threads));
    for (int t = 0; t < threads; ++t)
        pool.emplace_back([&, t] {
            for (int i = t; i < n; i += threads)
                for (int j = 0; j < n; ++j) g(i, j) = kernel_entry(i, j);
        });
    for (auto& th : pool) th.join();
    return g;
}

/// Smallest eigenvalue of a Hermitian matrix. The input is rejected if its
/// Hermitian defect exceeds the tolerance, then symmetrized and solved by
/// cyclic Jacobi rotations.
inline double min_eigenvalue(const Mat& g, double hermitian_tol = 1e-8) {
    double scale = 0.0;
    for (const auto& v : g.a) scale = std::max(scale, std::abs(v));
    if (hermitian_defect(g) > hermitian_tol * (1.0 + scale))
        throw std::invalid_argument("matrix is not Hermitian within tolerance");
    const auto ev = hermitian_eigenvalues(g);
    return ev.empty() ? 0.0 : ev.front();
}

struct PsdReport {
    int size = 0;
    double min_eigenvalue = 0.0;
    double hermitian_defect = 0.0;
    double tolerance = 0.0;
    bool pass = false;
};

/// PSD verdict for a Gram matrix. The default tolerance 1e-9 is scaled by
/// the largest diagonal entry, which dominates the certified truncation
/// tails perturbing the spectrum.
inline PsdReport psd_report(const Mat& g, double tol = 1e-9) {
    PsdReport rep;
    rep.size = g.rows;
    double diag = 0.0;
    for (int i = 0; i < g.rows; ++i) diag = std::max(diag, std::abs(g(i, i)));
    rep.tolerance = tol * std::max(1.0, diag);
    rep.hermitian_defect = hermitian_defect(g);
    const auto ev = hermitian_eigenvalues(g);
    rep.min_eigenvalue = ev.empty() ? 0.0 : ev.front();
    rep.pass = rep.min_eigenvalue >= -rep.tolerance && rep.hermitian_defect <= rep.tolerance;
    return rep;
}

/// Checks <J(f),J(g)> = <f,g> through the reproducing route: each g is
/// rewritten as a kernel-section combination g = sum_m D_{m,w} eta_m by
/// series division against e^{zeta conj(w)}, and the jet pairing
/// <J(f)(w), eta> is compared with fock_inner(f, g). Exact for polynomials
/// of degree below the truncation order.
inline double jet_isometry_check(const std::vector<EntireFunctionRep>& fs,
                                 const std::vector<EntireFunctionRep>& gs,
                                 const std::vector<cplx>& w_samples, int order) {
    double dev = 0.0;
    for (const auto& w : w_samples) {
        // coefficients of e^{-zeta conj(w)}
        std::vector<cplx> expneg(static_cast<size_t>(order), cplx{0.0, 0.0});
        cplx pw{1.0, 0.0};
        double fact = 1.0;
        for (int k = 0; k < order; ++k) {
            if (k > 0) {
                fact *= k;
                pw *= -std::conj(w);
            }
            expneg[static_cast<size_t>(k)] = pw / fact;
        }
        for (const auto& g : gs) {
            if (g.p != 1) throw std::invalid_argument("jet_isometry_check requires p == 1");
            // eta_m = m! [zeta^m] (g(zeta) e^{-zeta conj(w)})
            std::vector<cplx> eta(static_cast<size_t>(order), cplx{0.0, 0.0});
            double mf = 1.0;
            for (int m = 0; m < order; ++m) {
                if (m > 0) mf *= m;
                cplx conv{0.0, 0.0};
                for (int k = 0; k <= m && k <= g.degree(); ++k)
                    conv += g.coeffs[static_cast<size_t>(k)] * expneg[static_cast<size_t>(m - k)];
                eta[static_cast<size_t>(m)] = mf * conv;
            }
            for (const auto& f : fs) {
                const auto jf = jet_of(f, w, order);
                cplx via_jets{0.0, 0.0};
                for (int m = 0; m < order; ++m)
                    via_jets += jf.entries[static_cast<size_t>(m)] * std::conj(eta[static_cast<size_t>(m)]);
                dev = std::max(dev, std::abs(via_jets - fock_inner(f, g)));
            }
        }
    }
    return dev;
}

}  // namespace akx
