#include <catch2/catch.hpp>

#include "testers.hpp"

using namespace multindex;

namespace {

MethodSpec share_spec(Method m, double rho = 0.0) {
    MethodSpec s;
    s.method = m;
    s.rho = rho;
    return s;
}

} // namespace

TEST_CASE("build_dad") {
    std::mt19937_64 rng(401);

    SECTION("column targets are one for every share method") {
        const Dataset d = testers::random_dataset(rng, 4, 3, 0.7);
        for (Method m : {Method::RAO, Method::IDB, Method::ARITH}) {
            const DadTriplet t = build_dad(d, share_spec(m));
            for (double dj : t.d) CHECK(std::abs(dj - 1.0) <= 1e-12);
        }
    }

    SECTION("IDB equals gen-mean at rho -1") {
        const Dataset d = testers::random_dataset(rng, 4, 3, 0.7);
        const DadTriplet idb = build_dad(d, share_spec(Method::IDB));
        const DadTriplet gm = build_dad(d, share_spec(Method::GEN_MEAN, -1.0));
        CHECK(idb.a == gm.a);
        CHECK(idb.c == gm.c);
        CHECK(idb.d == gm.d);
        CHECK(idb.rho == gm.rho);
    }

    SECTION("uniform dataset gives constant weights") {
        const Dataset d = validate_dataset(Matrix(2, 3, 1.0), Matrix(2, 3, 1.0));
        const DadTriplet t = build_dad(d, share_spec(Method::ARITH));
        for (std::size_t i = 0; i < 2; ++i)
            for (std::size_t j = 0; j < 3; ++j) CHECK(t.a(i, j) == Approx(t.a(0, 0)));
    }

    SECTION("support equals the quantity support") {
        const Dataset d = testers::random_dataset(rng, 5, 4, 0.4);
        const DadTriplet t = build_dad(d, share_spec(Method::GEN_MEAN, 2.5));
        for (std::size_t i = 0; i < 5; ++i)
            for (std::size_t j = 0; j < 4; ++j)
                CHECK((t.a(i, j) > 0.0) == (d.quantities(i, j) > 0.0));
    }
}

TEST_CASE("dad_fixed_point") {
    SECTION("single commodity, two countries, solved by hand") {
        DadTriplet t;
        t.a = Matrix{{0.5, 0.5}};
        t.c = {1.0};
        t.d = {0.5, 0.5};
        const DadFixedPointResult r = dad_fixed_point(t, {1.0, 1.0}, 1e-12, 1000);
        CHECK(r.x[0] == Approx(0.5).epsilon(1e-11));
        CHECK(r.x[1] == Approx(0.5).epsilon(1e-11));
        CHECK(r.residual <= 1e-11);
        CHECK(r.lambda == Approx(1.0).margin(1e-10));
    }

    SECTION("uniform dataset fixes the uniform vector") {
        const Dataset d = validate_dataset(Matrix(3, 4, 1.0), Matrix(3, 4, 1.0));
        const DadTriplet t = build_dad(d, share_spec(Method::ARITH));
        const DadFixedPointResult r = dad_fixed_point(t, {2.0, 0.5, 1.0, 3.0}, 1e-12, 10000);
        for (double x : r.x) CHECK(x == Approx(0.25).epsilon(1e-10));
    }

    SECTION("incompatible triplets are surfaced, not iterated") {
        DadTriplet t;
        t.a = Matrix{{1, 0}, {0, 1}};
        t.c = {1.0, 2.0};
        t.d = {2.0, 1.0};
        CHECK_THROWS_AS(dad_fixed_point(t, {1.0, 1.0}, 1e-12, 100), IncompatibleTripletError);
    }

    SECTION("convergence diagnostics are monotone after warm-up (soft)") {
        std::mt19937_64 rng(402);
        const Dataset d = testers::random_connected_dataset(rng, 5, 4);
        const DadTriplet t = build_dad(d, share_spec(Method::IDB));
        const DadFixedPointResult r =
            dad_fixed_point(t, std::vector<double>(4, 1.0), 1e-12, 10000);
        for (std::size_t k = 5; k + 1 < r.delta_history.size(); ++k)
            CHECK_NOFAIL(r.delta_history[k + 1] <= r.delta_history[k] * (1.0 + 1e-9));
    }
}

TEST_CASE("solve_share_system: uniform prices give unit parities") {
    std::mt19937_64 rng(403);
    Matrix p(3, 4);
    const std::vector<double> base = {0.4, 5.0, 1.3};
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 4; ++j) p(i, j) = base[i];
    const Dataset d = validate_dataset(p, testers::random_quantities(rng, 3, 4, 0.8));
    for (Method m : {Method::RAO, Method::IDB, Method::ARITH, Method::GEN_MEAN}) {
        const Solution s = solve_share_system(d, share_spec(m, 0.7));
        for (double x : s.ppp) CHECK(x == Approx(1.0).epsilon(1e-9));
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(s.p_int[i] == Approx(base[i]).epsilon(1e-9));
    }
}

TEST_CASE("solve_share_system: residuals meet the fixed-point contract") {
    std::mt19937_64 rng(404);
    for (Method m : {Method::RAO, Method::IDB, Method::ARITH, Method::GEN_MEAN}) {
        for (int trial = 0; trial < 8; ++trial) {
            const Dataset d = testers::random_connected_dataset(rng, 3 + trial % 4, 3 + trial % 3);
            const double rho = m == Method::GEN_MEAN ? (trial % 2 ? 1.8 : -0.6) : 0.0;
            const Solution s = solve_share_system(d, share_spec(m, rho));
            CHECK(s.residual_norm <= 1e-9);
        }
    }
}

TEST_CASE("solve_share_system: rho-family coherence") {
    std::mt19937_64 rng(405);
    const Dataset d = testers::random_connected_dataset(rng, 5, 4);

    SECTION("gen-mean at rho -1 is IDB") {
        const std::vector<double> a =
            testers::geomean_one_ppp(solve_share_system(d, share_spec(Method::IDB)));
        const std::vector<double> b =
            testers::geomean_one_ppp(solve_share_system(d, share_spec(Method::GEN_MEAN, -1.0)));
        CHECK(testers::max_rel_dev(a, b) <= 1e-10);
    }

    SECTION("gen-mean at rho 1 is the arithmetic system") {
        const std::vector<double> a =
            testers::geomean_one_ppp(solve_share_system(d, share_spec(Method::ARITH)));
        const std::vector<double> b =
            testers::geomean_one_ppp(solve_share_system(d, share_spec(Method::GEN_MEAN, 1.0)));
        CHECK(testers::max_rel_dev(a, b) <= 1e-10);
    }

    SECTION("gen-mean at rho 1e-6 approaches RAO") {
        const std::vector<double> a =
            testers::geomean_one_ppp(solve_share_system(d, share_spec(Method::RAO)));
        const std::vector<double> b =
            testers::geomean_one_ppp(solve_share_system(d, share_spec(Method::GEN_MEAN, 1e-6)));
        CHECK(testers::max_rel_dev(a, b) <= 1e-4);
    }

    SECTION("gen-mean at rho 0 takes the exact RAO path") {
        const std::vector<double> a =
            testers::geomean_one_ppp(solve_share_system(d, share_spec(Method::RAO)));
        const std::vector<double> b =
            testers::geomean_one_ppp(solve_share_system(d, share_spec(Method::GEN_MEAN, 0.0)));
        CHECK(testers::max_rel_dev(a, b) <= 1e-12);
    }
}

TEST_CASE("solve_share_system: split dataset is refused") {
    std::mt19937_64 rng(406);
    const Dataset d = testers::example_dataset(3, rng);
    for (Method m : {Method::RAO, Method::IDB, Method::ARITH, Method::GEN_MEAN})
        CHECK_THROWS_AS(solve_share_system(d, share_spec(m, 1.4)), DisconnectedError);
}

TEST_CASE("automatic compatibility of share triplets, including the RAO path") {
    std::mt19937_64 rng(407);
    for (int trial = 0; trial < 15; ++trial) {
        const Dataset d = testers::random_connected_dataset(rng, 3 + trial % 3, 3 + trial % 4, 0.5);
        for (Method m : {Method::RAO, Method::IDB, Method::ARITH, Method::GEN_MEAN}) {
            const DadTriplet t = build_dad(d, share_spec(m, -2.2));
            const CompatibilityReport rep = compatibility_check(t.a, t.c, t.d);
            CHECK(rep.compatible);
            CHECK(rep.strict);
        }
    }
}

TEST_CASE("commodity-unit invariance for the share family") {
    std::mt19937_64 rng(408);
    const Dataset d = testers::random_connected_dataset(rng, 4, 4);
    const double lambda = 2.6;
    Matrix p2 = d.prices;
    Matrix q2 = d.quantities;
    for (std::size_t j = 0; j < d.n_countries; ++j) {
        p2(0, j) *= lambda;
        q2(0, j) /= lambda;
    }
    const Dataset d2 = validate_dataset(p2, q2);
    for (Method m : {Method::RAO, Method::IDB, Method::ARITH, Method::GEN_MEAN}) {
        const MethodSpec spec = share_spec(m, 0.9);
        const Solution base = solve_share_system(d, spec);
        const Solution moved = solve_share_system(d2, spec);
        CHECK(testers::max_rel_dev(moved.ppp, base.ppp) <= 1e-10);
        CHECK(moved.p_int[0] == Approx(base.p_int[0] * lambda).epsilon(1e-10));
        for (std::size_t i = 1; i < d.n_commodities; ++i)
            CHECK(moved.p_int[i] == Approx(base.p_int[i]).epsilon(1e-10));
    }
}

TEST_CASE("degenerate shapes solve across families") {
    SECTION("a single country always has unit parity and domestic prices") {
        const Dataset d = validate_dataset(Matrix{{2.0}, {3.0}}, Matrix{{1.0}, {4.0}});
        for (Method m : {Method::GK, Method::EWGK, Method::RAO, Method::IDB, Method::ARITH}) {
            MethodSpec spec;
            spec.method = m;
            const Solution s = solve(d, spec);
            CHECK(s.ppp[0] == Approx(1.0).epsilon(1e-12));
            CHECK(s.p_int[0] == Approx(2.0).epsilon(1e-12));
            CHECK(s.p_int[1] == Approx(3.0).epsilon(1e-12));
        }
    }
    SECTION("a single commodity makes every method the price-ratio index") {
        const Dataset d = validate_dataset(Matrix{{2.0, 6.0, 1.0}}, Matrix{{1.0, 2.0, 3.0}});
        for (Method m : {Method::GK, Method::EWGK, Method::RAO, Method::IDB, Method::ARITH}) {
            MethodSpec spec;
            spec.method = m;
            const Solution s = solve(d, spec);
            CHECK(s.ppp[0] == Approx(1.0).epsilon(1e-10));
            CHECK(s.ppp[1] == Approx(3.0).epsilon(1e-10));
            CHECK(s.ppp[2] == Approx(0.5).epsilon(1e-10));
        }
    }
}

TEST_CASE("uniqueness probe") {
    std::mt19937_64 rng(409);

    SECTION("connected datasets probe unique") {
        const Dataset d = testers::random_connected_dataset(rng, 4, 4);
        for (Method m : {Method::RAO, Method::IDB, Method::ARITH, Method::GEN_MEAN}) {
            const UniquenessProbe probe = uniqueness_probe(d, share_spec(m, 1.3), 8);
            CHECK(probe.unique);
            CHECK(probe.spread <= 1e-6);
        }
    }

    SECTION("the split example reveals two free scales") {
        const Dataset d = testers::example_dataset(3, rng);
        for (Method m : {Method::RAO, Method::IDB, Method::ARITH, Method::GEN_MEAN}) {
            const UniquenessProbe probe = uniqueness_probe(d, share_spec(m, -0.7), 8);
            CHECK_FALSE(probe.unique);
            CHECK(probe.spread > 1e-3);
        }
    }

    SECTION("probe is deterministic per seed") {
        const Dataset d = testers::random_connected_dataset(rng, 3, 3);
        const UniquenessProbe a = uniqueness_probe(d, share_spec(Method::IDB), 4, 99);
        const UniquenessProbe b = uniqueness_probe(d, share_spec(Method::IDB), 4, 99);
        CHECK(a.spread == b.spread);
        CHECK(a.seed == 99);
    }

    SECTION("probe needs at least two starts") {
        const Dataset d = testers::random_connected_dataset(rng, 3, 3);
        CHECK_THROWS_AS(uniqueness_probe(d, share_spec(Method::IDB), 1), Error);
    }

    SECTION("probe covers the linear family too") {
        const Dataset d = testers::example_dataset(3, rng);
        MethodSpec gk;
        gk.method = Method::GK;
        const UniquenessProbe probe = uniqueness_probe(d, gk, 6);
        CHECK_FALSE(probe.unique);
        CHECK(probe.spread > 1e-3);
    }
}
