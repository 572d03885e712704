// Acceptance suite: runs every criterion end-to-end at its stated
// tolerance and prints one pass/fail line per criterion. Exits nonzero if
// any criterion fails. argv[1] must point at the CLI binary (used by the
// refusal and determinism criteria).

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>

#include <sys/wait.h>

#include "akx/akx.hpp"
#include "oracles.hpp"

using namespace akx;

namespace {

std::string g_cli_path;
int g_failures = 0;

void criterion(int number, const std::string& label, double time_limit_s,
               const std::function<bool(std::string&)>& body) {
    std::string detail;
    const auto t0 = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = body(detail);
    } catch (const std::exception& e) {
        detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > time_limit_s) {
        ok = false;
        detail += (detail.empty() ? "" : "; ") + std::string("exceeded time limit");
    }
    std::printf("[%s] %2d. %-58s (%.3f s)%s%s\n", ok ? "PASS" : "FAIL", number, label.c_str(), secs,
                detail.empty() ? "" : " -- ", detail.c_str());
    if (!ok) ++g_failures;
}

std::vector<AlgebraDescriptor> all_descriptors() {
    return {AlgebraDescriptor::matrix(2), AlgebraDescriptor::quaternion(),
            AlgebraDescriptor::grassmann(3), AlgebraDescriptor::weighted_seq(8, 2.0)};
}

int run_cli(const std::string& args) {
    const std::string cmd = g_cli_path + " " + args + " --quiet 2>/dev/null >/dev/null";
    const int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3g", v);
    return buf;
}

bool c1_involution(std::string& detail) {
    Rng rng(301);
    double worst = 0.0;
    for (const auto& d : all_descriptors())
        for (int rep = 0; rep < 500; ++rep) {
            const auto a = random_functional(d, rng);
            const auto x = random_element(d, rng);
            worst = std::max(worst,
                             std::abs(std::conj(pair(a, x)) - pair(dual_involution(a), involution(x))));
        }
    detail = "max defect " + fmt(worst);
    return worst <= 1e-12;
}

bool c2_nilpotent_exactness(std::string& detail) {
    Rng rng(307);
    const auto f = function_preset("exp");
    for (int ngen = 1; ngen <= 3; ++ngen) {
        const auto d = AlgebraDescriptor::grassmann(ngen);
        for (int rep = 0; rep < 10; ++rep) {
            auto s = random_element(d, rng);
            s.coords[0] = cplx{0.0, 0.0};
            const auto res = eval_ext(f, 0.0, s, {8, 1e-12, 64});
            if (!res.exact || res.tail_bound != 0.0) return false;
            auto want = zero(d);
            AlgebraElement pw = unit(d);
            for (int n = 0; n <= ngen; ++n) {
                if (n > 0) pw = mul(pw, s);
                want = add(want, scale(pw, f.coeffs[static_cast<size_t>(n)]));
            }
            if (oracles::max_coord_dev(res.value, want) != 0.0) {
                detail = "series vs closed sum deviated";
                return false;
            }
        }
    }

    // closed form vs direct evaluation, exact in dyadic arithmetic
    const auto poly2 = kernel_preset("poly2");
    for (int ngen = 1; ngen <= 3; ++ngen) {
        const auto d = AlgebraDescriptor::grassmann(ngen);
        std::vector<cplx> zc(static_cast<size_t>(d.dimension()), cplx{0.0, 0.0});
        std::vector<cplx> wc = zc;
        for (int i = 1; i < d.dimension(); ++i) {
            zc[static_cast<size_t>(i)] = cplx{std::ldexp(1.0, -(i % 3 + 1)), 0.0};
            wc[static_cast<size_t>(i)] = cplx{std::ldexp(1.0, -((i + 1) % 3 + 1)), 0.0};
        }
        const AlgebraElement zs(d, zc), ws(d, wc);
        const auto closed = grassmann_closed_form(poly2, 0.5, zs, 0.25, ws);

        const auto zfull = add(scale(unit(d), 0.5), zs);
        const auto wfull = involution(add(scale(unit(d), 0.25), ws));
        auto direct = zero(d);
        const auto zp = powers_upto(zfull, poly2.deg);
        const auto wp = powers_upto(wfull, poly2.deg);
        for (int j = 0; j <= poly2.deg; ++j)
            for (int m = 0; m <= poly2.deg; ++m) {
                const cplx c = poly2.at(j, m);
                if (c != cplx{0.0, 0.0})
                    direct = add(direct, scale(mul(zp[static_cast<size_t>(j)], wp[static_cast<size_t>(m)]), c));
            }
        if (oracles::max_coord_dev(closed, direct) != 0.0) {
            detail = "closed form vs direct deviated at N_gen " + std::to_string(ngen);
            return false;
        }
    }
    return true;
}

bool c3_closed_form_oracles(std::string& detail) {
    Rng rng(311);
    const auto dm = AlgebraDescriptor::matrix(3);
    const auto f = function_preset("exp");
    double worst_rel = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const auto sample = oracles::random_diagonalizable(3, rng, 2.0);
        const auto arg = oracles::mat_as_element(sample.a, dm);
        const auto res = eval_ext(f, 0.0, arg, {20, 1e-13, 64});
        if (!res.converged) return false;
        const double err = oracles::max_coord_dev(res.value, oracles::mat_as_element(sample.exp_a, dm));
        worst_rel = std::max(worst_rel, err / std::max(1.0, frobenius(sample.exp_a)));
    }
    if (worst_rel > 1e-9) {
        detail = "matrix rel err " + fmt(worst_rel);
        return false;
    }

    const auto dq = AlgebraDescriptor::quaternion();
    double worst_q = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        const auto q = random_element(dq, rng, 1.2);
        const auto res = eval_ext(f, 0.0, q, {12, 1e-13, 64});
        if (!res.converged) return false;
        worst_q = std::max(worst_q, oracles::max_coord_dev(res.value, oracles::quaternion_exp(q)));
    }
    detail = "matrix rel " + fmt(worst_rel) + ", quaternion abs " + fmt(worst_q);
    return worst_q <= 1e-12;
}

bool c4_weak_strong(std::string& detail) {
    Rng rng(313);
    const auto f = function_preset("exp");
    const TruncationPolicy pol{10, 1e-10, 96};
    double worst_margin = 0.0;
    for (const auto& d : all_descriptors())
        for (int rep = 0; rep < 200; ++rep) {
            const auto arg = random_element(d, rng, 0.6);
            const auto a = random_functional(d, rng);
            const cplx z = d.field == ScalarField::real ? cplx{rng.symmetric(), 0.0}
                                                        : rng.complex_in_box(0.7, false);
            const auto strong = eval_ext(f, z, arg, pol);
            const auto weak = eval_weak(f, z, arg, a, pol);
            if (!strong.converged || !weak.converged) return false;
            const double gap = std::abs(weak.value - pair(a, strong.value));
            const double budget = pol.tail_tol * (1.0 + dual_norm(a));
            worst_margin = std::max(worst_margin, gap / budget);
        }
    detail = "worst gap/budget " + fmt(worst_margin);
    return worst_margin <= 1.0;
}

bool c5_factorization(std::string& detail) {
    const auto fock = kernel_preset("fock");
    Rng rng(317);
    std::vector<std::vector<cplx>> etas;
    for (int e = 0; e < 2; ++e) {
        std::vector<cplx> eta(10);
        for (auto& v : eta) v = rng.complex_in_box(1.0, false);
        etas.push_back(std::move(eta));
    }
    auto in_disk = [&rng] {
        for (;;) {
            const cplx z = rng.complex_in_box(1.0, false);
            if (std::abs(z) < 1.0) return z;
        }
    };
    double worst = 0.0;
    for (int rep = 0; rep < 10; ++rep)
        worst = std::max(worst, factorization_check(fock, etas, in_disk(), in_disk(), 10));
    detail = "max deviation " + fmt(worst);
    return worst <= 1e-10;
}

bool c6_commutation(std::string& detail) {
    const auto rep = commutator_check(16);
    detail = "leading deviation " + fmt(rep.leading_deviation) + ", edge " +
             fmt(rep.bottom_right);
    return rep.leading_deviation == 0.0;
}

bool c7_operator_extensions(std::string& detail) {
    Rng rng(331);
    const int order = 12;
    double worst = 0.0;
    for (int rep = 0; rep < 40; ++rep) {
        std::vector<cplx> c(9);
        for (auto& v : c) v = rng.complex_in_box(1.0, false);
        const auto f = EntireFunctionRep::scalar(c);
        const cplx z = rng.complex_in_box(0.8, false);
        const auto jf = jet_of(f, z, order);

        const auto mz_jet = apply(JetOperator::mult_by_zeta(order, z), jf);
        const auto mz_co = extend_operator(CoefficientOperator::mult_by_zeta(10), f, z, order);
        for (int i = 0; i < mz_jet.clean_entries(); ++i)
            worst = std::max(worst, std::abs(mz_jet.entries[static_cast<size_t>(i)] -
                                             mz_co.entries[static_cast<size_t>(i)]));

        const auto s_jet = apply(JetOperator::derivative_s(order), jf);
        const auto s_co = extend_operator(CoefficientOperator::differentiation(9), f, z, order);
        for (int i = 0; i < s_jet.clean_entries(); ++i)
            worst = std::max(worst, std::abs(s_jet.entries[static_cast<size_t>(i)] -
                                             s_co.entries[static_cast<size_t>(i)]));

        // composition and the n!-weighted adjoint
        const auto t = CoefficientOperator::mult_by_zeta(10);
        const auto s = CoefficientOperator::differentiation(10);
        const CoefficientOperator ts{t.mat * s.mat};
        const auto lhs = extend_operator(ts, f, z, order);
        const auto rhs = extend_operator(t, s.apply_fn(f), z, order);
        for (int i = 0; i < std::min(lhs.clean_entries(), rhs.clean_entries()); ++i)
            worst = std::max(worst, std::abs(lhs.entries[static_cast<size_t>(i)] -
                                             rhs.entries[static_cast<size_t>(i)]));

        std::vector<cplx> e(9);
        for (auto& v : e) v = rng.complex_in_box(1.0, false);
        const auto g = EntireFunctionRep::scalar(e);
        Mat tm(10, 10);
        for (auto& v : tm.a) v = rng.complex_in_box(1.0, false);
        const CoefficientOperator randt{tm};
        worst = std::max(worst, std::abs(fock_inner(randt.apply_fn(f), g) -
                                         fock_inner(f, fock_adjoint(randt).apply_fn(g))));
    }
    detail = "max deviation " + fmt(worst);
    return worst <= 1e-10;
}

bool c8_psd_grams(std::string& detail) {
    const TruncationPolicy pol{18, 1e-11, 96};
    double worst_eig = 0.0, worst_defect = 0.0;
    for (const auto& d : {AlgebraDescriptor::matrix(2), AlgebraDescriptor::quaternion()}) {
        const auto plan = make_tuple_plan(d, 17, 20);
        const auto g = gram(
            [&](int i, int j) {
                return fock_extended(plan.tuples[static_cast<size_t>(i)],
                                     plan.tuples[static_cast<size_t>(j)], pol)
                    .value;
            },
            20);
        const double defect = hermitian_defect(g);
        const double eig = min_eigenvalue(g);
        worst_defect = std::max(worst_defect, defect);
        worst_eig = std::min(worst_eig, eig);
    }
    detail = "min eig " + fmt(worst_eig) + ", defect " + fmt(worst_defect);
    return worst_eig >= -1e-9 && worst_defect <= 1e-10;
}

bool c9_cross_oracle(std::string& detail) {
    const auto fock = kernel_preset("fock");
    const auto d = AlgebraDescriptor::matrix(2);
    Rng rng(337);
    const TruncationPolicy pol{20, 1e-12, 96};
    double worst = 0.0;
    for (int rep = 0; rep < 50; ++rep) {
        EvalTuple ta{rng.complex_in_box(0.6, false), random_element(d, rng, 0.4),
                     random_functional(d, rng)};
        EvalTuple tb{rng.complex_in_box(0.6, false), random_element(d, rng, 0.4),
                     random_functional(d, rng)};
        const auto direct = fock_extended(ta, tb, pol);
        const auto traced = matrix_trace_kernel(ta.a, ta.arg, ta.z, tb.a, tb.arg, tb.z, pol);
        const auto recentered =
            extended_kernel(fock, power_x_series(ta.z, ta.arg, ta.a, 20),
                            power_x_series(tb.z, tb.arg, tb.a, 20), 20);
        if (!direct.converged || !traced.converged) return false;
        worst = std::max({worst, std::abs(direct.value - traced.value),
                          std::abs(direct.value - recentered.value),
                          std::abs(traced.value - recentered.value)});
    }
    detail = "max pairwise deviation " + fmt(worst);
    return worst <= 1e-9;
}

bool c10_strong_algebra(std::string& detail) {
    const auto d = AlgebraDescriptor::weighted_seq(32, 2.0);
    const auto rep = verify_strong_inequality(d, 1000, 0.5, 1.0, 7);
    if (rep.max_ratio > 1.0 + 1e-12) {
        detail = "ratio " + fmt(rep.max_ratio);
        return false;
    }
    Rng rng(347);
    for (int i = 0; i < 10; ++i) {
        const auto arg = random_element(d, rng, 4.0);  // arbitrary norm
        const auto res = eval_ext(function_preset("exp"), 0.0, arg, {8, 1e-9, 128});
        if (!res.converged || res.tail_bound > 1e-9) {
            detail = "series failed to certify at norm " + fmt(level_norm(arg));
            return false;
        }
    }
    detail = "max ratio " + fmt(rep.max_ratio);
    return true;
}

bool c11_radius(std::string& detail) {
    const auto geom = kernel_preset("geom");
    const auto d = AlgebraDescriptor::matrix(2);
    Rng rng(349);
    EvalTuple t{cplx{0.1, 0.0}, random_element(d, rng, 0.1), random_functional(d, rng)};
    const auto xs = power_x_series(t.z, t.arg, t.a, 12);
    const auto est = radius_estimate(geom, t.z, t.z);

    const auto ok = scaled_kernel(geom, t.z, t.z, 0.25, xs, xs, 12);
    if (!std::isfinite(ok.tail_bound)) {
        detail = "in-range scaling lacks a certificate";
        return false;
    }
    bool refused = false;
    try {
        scaled_kernel(geom, t.z, t.z, est.m0 + 0.01, xs, xs, 12);
    } catch (const method_error&) {
        refused = true;
    }
    if (!refused) {
        detail = "out-of-range scaling was not refused";
        return false;
    }

    // the CLI surfaces the refusal as exit code 2
    const std::string cfg_path = "acceptance_c11_config.json";
    {
        std::ofstream os(cfg_path);
        os << R"({"command":"kernel","op":"scaled","kernel":"geom",
                  "algebra":{"kind":"matrix","n":2},
                  "left":{"z":[0.1,0],"A":[[0.05,0],[0,0],[0,0],[0.05,0]],"a":[[1,0],[0,0],[0,0],[1,0]]},
                  "right":{"z":[0.1,0],"A":[[0.05,0],[0,0],[0,0],[0.05,0]],"a":[[1,0],[0,0],[0,0],[1,0]]},
                  "N":10,"M":0.95})";
    }
    const int code = run_cli("--config " + cfg_path);
    std::remove(cfg_path.c_str());
    if (code != 2) {
        detail = "CLI exit code " + std::to_string(code) + " for refused scaling";
        return false;
    }
    detail = "M0 " + fmt(est.m0) + ", certificate " + fmt(ok.tail_bound);
    return true;
}

bool c12_determinism(std::string& detail) {
    const std::string cfg_path = "acceptance_c12_config.json";
    {
        std::ofstream os(cfg_path);
        os << R"({"command":"gram","kernel":"fock_extended","algebra":{"kind":"matrix","n":2},
                  "seed":5,"count":8,"truncation":{"N":14,"tail_tol":1e-10}})";
    }
    const std::string out1 = "acceptance_c12_a.json", out2 = "acceptance_c12_b.json";
    const int c1 = run_cli("--config " + cfg_path + " --out " + out1);
    const int c2 = run_cli("--config " + cfg_path + " --out " + out2);
    const bool same = slurp(out1) == slurp(out2) && !slurp(out1).empty();
    std::remove(cfg_path.c_str());
    std::remove(out1.c_str());
    std::remove(out2.c_str());
    if (c1 != 0 || c2 != 0) {
        detail = "CLI exit codes " + std::to_string(c1) + "/" + std::to_string(c2);
        return false;
    }
    detail = same ? "byte-identical" : "outputs differ";
    return same;
}

}  // namespace

int main(int argc, char** argv) {
    if (argc < 2) {
        std::cerr << "usage: acceptance <path-to-akx-cli>\n";
        return 2;
    }
    g_cli_path = argv[1];

    criterion(1, "involution axiom over all four algebras", 1.0, c1_involution);
    criterion(2, "nilpotent exactness of grassmann evaluation", 1.0, c2_nilpotent_exactness);
    criterion(3, "series vs closed-form exponentials", 2.0, c3_closed_form_oracles);
    criterion(4, "weak/strong evaluation consistency", 2.0, c4_weak_strong);
    criterion(5, "jet factorization of the derivative kernel", 2.0, c5_factorization);
    criterion(6, "canonical commutation SZ - ZS = I", 0.1, c6_commutation);
    criterion(7, "operator extension identities", 1.0, c7_operator_extensions);
    criterion(8, "PSD Grams for extended Fock kernels", 5.0, c8_psd_grams);
    criterion(9, "cross-oracle triangle on 2x2 matrices", 5.0, c9_cross_oracle);
    criterion(10, "strong-algebra inequality and certified series", 2.0, c10_strong_algebra);
    criterion(11, "scaling radius: certificates and refusal", 1.0, c11_radius);
    criterion(12, "CLI determinism under a fixed seed", 5.0, c12_determinism);

    if (g_failures > 0) {
        std::printf("%d criterion(s) failed\n", g_failures);
        return 1;
    }
    std::printf("all criteria passed\n");
    return 0;
}
