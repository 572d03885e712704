#include <catch2/catch_amalgamated.hpp>

#include "akx/psd.hpp"
#include "oracles.hpp"

using namespace akx;
using Catch::Approx;

TEST_CASE("jacobi eigenvalues: identity, diagonal, and known spectra") {
    CHECK(min_eigenvalue(Mat::identity(5)) == Approx(1.0).margin(1e-12));

    Mat d(2, 2);
    d(0, 0) = 3.0;
    d(1, 1) = -2.0;
    CHECK(min_eigenvalue(d) == Approx(-2.0).margin(1e-12));

    // 2x2 Hermitian with known eigenvalues 1 and 3
    Mat h(2, 2);
    h(0, 0) = 2.0;
    h(1, 1) = 2.0;
    h(0, 1) = cplx{0.0, 1.0};
    h(1, 0) = cplx{0.0, -1.0};
    const auto ev = hermitian_eigenvalues(h);
    CHECK(ev[0] == Approx(1.0).margin(1e-12));
    CHECK(ev[1] == Approx(3.0).margin(1e-12));
}

TEST_CASE("random Gram matrices B^H B are PSD for the solver") {
    Rng rng(227);
    for (int rep = 0; rep < 10; ++rep) {
        const int n = 4 + static_cast<int>(rng.next_u64() % 28);
        Mat b(n, n);
        for (auto& v : b.a) v = rng.complex_in_box(1.0, false);
        const Mat g = adjoint(b) * b;
        REQUIRE(min_eigenvalue(g) >= -1e-12);
    }
}

TEST_CASE("jacobi accuracy against a constructed spectrum") {
    // conjugate a known diagonal by a product of random complex rotations
    Rng rng(229);
    const int n = 24;
    std::vector<double> want(static_cast<size_t>(n));
    for (auto& v : want) v = 3.0 * rng.symmetric();
    std::sort(want.begin(), want.end());
    Mat g(n, n);
    for (int i = 0; i < n; ++i) g(i, i) = want[static_cast<size_t>(i)];
    for (int rot = 0; rot < 200; ++rot) {
        const int p = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
        int q = static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
        if (q == p) q = (q + 1) % n;
        const double th = rng.symmetric() * 1.5;
        const double ph = rng.symmetric() * 3.0;
        // U = [[c, -s],[conj(s), c]] with real c: apply G <- U^H G U
        const cplx c = std::cos(th), s = std::polar(std::sin(th), ph);
        for (int k = 0; k < n; ++k) {
            const cplx gkp = g(k, p), gkq = g(k, q);
            g(k, p) = c * gkp + std::conj(s) * gkq;
            g(k, q) = -s * gkp + c * gkq;
        }
        for (int k = 0; k < n; ++k) {
            const cplx gpk = g(p, k), gqk = g(q, k);
            g(p, k) = c * gpk + s * gqk;
            g(q, k) = -std::conj(s) * gpk + c * gqk;
        }
    }
    const auto got = hermitian_eigenvalues(g);
    for (int i = 0; i < n; ++i)
        REQUIRE(std::abs(got[static_cast<size_t>(i)] - want[static_cast<size_t>(i)]) <= 1e-11);
}

TEST_CASE("min_eigenvalue rejects visibly non-Hermitian input") {
    Mat g(2, 2);
    g(0, 1) = 5.0;
    CHECK_THROWS_AS(min_eigenvalue(g), std::invalid_argument);
}

TEST_CASE("gram: single point and coincident points") {
    const auto d = AlgebraDescriptor::quaternion();
    const TruncationPolicy pol{12, 1e-11, 64};
    const auto plan = make_tuple_plan(d, 3, 1);
    const auto single = gram(
        [&](int i, int j) {
            return fock_extended(plan.tuples[static_cast<size_t>(i)],
                                 plan.tuples[static_cast<size_t>(j)], pol)
                .value;
        },
        1);
    CHECK(single(0, 0).real() >= 0.0);
    CHECK(std::abs(single(0, 0).imag()) <= 1e-14);

    // duplicated tuple: rank drops, min eigenvalue hits zero
    std::vector<EvalTuple> doubled = {plan.tuples[0], plan.tuples[0]};
    const auto g2 = gram(
        [&](int i, int j) {
            return fock_extended(doubled[static_cast<size_t>(i)], doubled[static_cast<size_t>(j)], pol)
                .value;
        },
        2);
    CHECK(min_eigenvalue(g2) == Approx(0.0).margin(1e-10));
}

TEST_CASE("gram of 20 extended-Fock tuples is PSD") {
    const auto d = AlgebraDescriptor::matrix(2);
    const TruncationPolicy pol{18, 1e-11, 96};
    const auto plan = make_tuple_plan(d, 17, 20);
    const auto g = gram(
        [&](int i, int j) {
            return fock_extended(plan.tuples[static_cast<size_t>(i)],
                                 plan.tuples[static_cast<size_t>(j)], pol)
                .value;
        },
        20);
    const auto rep = psd_report(g);
    CHECK(rep.pass);
    CHECK(rep.min_eigenvalue >= -1e-10);
    CHECK(rep.hermitian_defect <= 1e-10);
}

TEST_CASE("permuting the sample plan conjugates the Gram and fixes the spectrum") {
    const auto d = AlgebraDescriptor::quaternion();
    const TruncationPolicy pol{14, 1e-11, 64};
    auto plan = make_tuple_plan(d, 23, 10);
    auto entry = [&](const std::vector<EvalTuple>& ts, int i, int j) {
        return fock_extended(ts[static_cast<size_t>(i)], ts[static_cast<size_t>(j)], pol).value;
    };
    const auto g = gram([&](int i, int j) { return entry(plan.tuples, i, j); }, 10);

    auto shuffled = plan.tuples;
    std::rotate(shuffled.begin(), shuffled.begin() + 3, shuffled.end());
    const auto gp = gram([&](int i, int j) { return entry(shuffled, i, j); }, 10);

    CHECK(std::abs(min_eigenvalue(g) - min_eigenvalue(gp)) <= 1e-11);
}

TEST_CASE("scaling a functional scales its row and column, preserving PSD") {
    const auto d = AlgebraDescriptor::matrix(2);
    const TruncationPolicy pol{16, 1e-11, 96};
    auto plan = make_tuple_plan(d, 29, 8);
    auto entry = [&](const std::vector<EvalTuple>& ts, int i, int j) {
        return fock_extended(ts[static_cast<size_t>(i)], ts[static_cast<size_t>(j)], pol).value;
    };
    const auto g = gram([&](int i, int j) { return entry(plan.tuples, i, j); }, 8);

    const cplx lambda{0.7, 0.4};
    auto scaled_tuples = plan.tuples;
    for (auto& c : scaled_tuples[2].a.coords) c *= lambda;
    const auto gs = gram([&](int i, int j) { return entry(scaled_tuples, i, j); }, 8);

    // the tuple-2 row scales conjugate-linearly in the first slot, the
    // column linearly in the second; off-row entries are untouched
    for (int j = 0; j < 8; ++j) {
        if (j == 2) continue;
        REQUIRE(std::abs(gs(2, j) - std::conj(lambda) * g(2, j)) <= 1e-11);
        REQUIRE(std::abs(gs(j, 2) - lambda * g(j, 2)) <= 1e-11);
    }
    REQUIRE(std::abs(gs(2, 2) - std::norm(lambda) * g(2, 2)) <= 1e-11);
    CHECK(min_eigenvalue(gs) >= -1e-9 * std::max(1.0, std::abs(gs(2, 2))));
}

TEST_CASE("jet isometry: trivial and polynomial cases") {
    const auto one = EntireFunctionRep::scalar({{1, 0}});
    const auto zeta = EntireFunctionRep::scalar({{0, 0}, {1, 0}});
    CHECK(jet_isometry_check({one}, {one}, {cplx{0.0, 0.0}}, 8) <= 1e-14);
    CHECK(jet_isometry_check({zeta}, {zeta}, {cplx{0.0, 0.0}}, 8) <= 1e-14);

    Rng rng(233);
    std::vector<EntireFunctionRep> fs, gs;
    for (int i = 0; i < 4; ++i) {
        std::vector<cplx> c(7), e(7);
        for (auto& v : c) v = rng.complex_in_box(1.0, false);
        for (auto& v : e) v = rng.complex_in_box(1.0, false);
        fs.push_back(EntireFunctionRep::scalar(std::move(c)));
        gs.push_back(EntireFunctionRep::scalar(std::move(e)));
    }
    std::vector<cplx> ws;
    for (int i = 0; i < 5; ++i) ws.push_back(rng.complex_in_box(0.8, false));
    CHECK(jet_isometry_check(fs, gs, ws, 12) <= 1e-9);
}

TEST_CASE("gram is independent of the thread budget") {
    const auto d = AlgebraDescriptor::matrix(2);
    const TruncationPolicy pol{14, 1e-11, 64};
    const auto plan = make_tuple_plan(d, 31, 12);
    auto entry = [&](int i, int j) {
        return fock_extended(plan.tuples[static_cast<size_t>(i)], plan.tuples[static_cast<size_t>(j)], pol)
            .value;
    };
    const auto serial = gram(entry, 12);
    setenv("AKX_THREADS", "4", 1);
    const auto parallel = gram(entry, 12);
    unsetenv("AKX_THREADS");
    for (int i = 0; i < 12; ++i)
        for (int j = 0; j < 12; ++j) REQUIRE(serial(i, j) == parallel(i, j));
}

TEST_CASE("sample plans are deterministic in the seed") {
    const auto d = AlgebraDescriptor::matrix(2);
    const auto p1 = make_tuple_plan(d, 99, 5);
    const auto p2 = make_tuple_plan(d, 99, 5);
    for (int i = 0; i < 5; ++i) {
        CHECK(p1.tuples[static_cast<size_t>(i)].z == p2.tuples[static_cast<size_t>(i)].z);
        CHECK(oracles::max_coord_dev(p1.tuples[static_cast<size_t>(i)].arg,
                                     p2.tuples[static_cast<size_t>(i)].arg) == 0.0);
    }
    CHECK_THROWS_AS(make_tuple_plan(d, 1, 513), std::invalid_argument);
}

TEST_CASE("quaternion kernel Grams over random triples are PSD") {
    const auto d = AlgebraDescriptor::quaternion();
    const TruncationPolicy pol{18, 1e-11, 96};
    const auto plan = make_tuple_plan(d, 41, 15);
    const auto g = gram(
        [&](int i, int j) {
            const auto& ti = plan.tuples[static_cast<size_t>(i)];
            const auto& tj = plan.tuples[static_cast<size_t>(j)];
            return cplx{
                quaternion_kernel(ti.a, ti.arg, ti.z.real(), tj.a, tj.arg, tj.z.real(), pol).value};
        },
        15);
    const auto rep = psd_report(g);
    CHECK(rep.pass);
    CHECK(rep.min_eigenvalue >= -1e-9 * std::max(1.0, std::abs(g(0, 0))));
}

TEST_CASE("matrix-trace and recentered extended-kernel Grams are PSD") {
    const auto d = AlgebraDescriptor::matrix(2);
    const TruncationPolicy pol{18, 1e-11, 96};
    const auto plan = make_tuple_plan(d, 47, 12);

    const auto g_trace = gram(
        [&](int i, int j) {
            const auto& ti = plan.tuples[static_cast<size_t>(i)];
            const auto& tj = plan.tuples[static_cast<size_t>(j)];
            return matrix_trace_kernel(ti.a, ti.arg, ti.z, tj.a, tj.arg, tj.z, pol).value;
        },
        12);
    CHECK(psd_report(g_trace).pass);

    const auto fock = kernel_preset("fock");
    std::vector<XSeries> xs;
    for (const auto& t : plan.tuples) xs.push_back(power_x_series(t.z, t.arg, t.a, 18));
    const auto g_ext = gram(
        [&](int i, int j) {
            return extended_kernel(fock, xs[static_cast<size_t>(i)], xs[static_cast<size_t>(j)], 18)
                .value;
        },
        12);
    CHECK(psd_report(g_ext).pass);
}

TEST_CASE("grassmann paired-kernel Grams are PSD") {
    const auto d = AlgebraDescriptor::grassmann(2);
    const auto fock = kernel_preset("fock");
    Rng rng(239);
    const int n = 10;
    std::vector<cplx> zb(static_cast<size_t>(n));
    std::vector<AlgebraElement> souls;
    std::vector<DualFunctional> funcs;
    for (int i = 0; i < n; ++i) {
        zb[static_cast<size_t>(i)] = rng.complex_in_box(0.5, false);
        auto s = random_element(d, rng, 0.6);
        s.coords[0] = cplx{0.0, 0.0};
        souls.push_back(std::move(s));
        funcs.push_back(random_functional(d, rng));
    }
    const auto g = gram(
        [&](int i, int j) {
            return grassmann_closed_form_paired(fock, funcs[static_cast<size_t>(i)],
                                                zb[static_cast<size_t>(i)], souls[static_cast<size_t>(i)],
                                                funcs[static_cast<size_t>(j)], zb[static_cast<size_t>(j)],
                                                souls[static_cast<size_t>(j)]);
        },
        n);
    const auto rep = psd_report(g);
    CHECK(rep.pass);
}
