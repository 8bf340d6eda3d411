#include <catch2/catch.hpp>

#include "testers.hpp"

using namespace multindex;

namespace {

MethodSpec gk_spec() {
    MethodSpec s;
    s.method = Method::GK;
    return s;
}

} // namespace

TEST_CASE("build_cd constructions") {
    std::mt19937_64 rng(301);

    SECTION("GK substitutes prices times quantities and quantities") {
        const Dataset d = validate_dataset(Matrix{{1, 2}}, Matrix{{1, 1}});
        const LinearWeights w = build_cd(d, gk_spec());
        CHECK(w.c == Matrix{{1, 2}});
        CHECK(w.d == Matrix{{1, 1}});
        CHECK(w.rho == 1.0);
    }

    SECTION("GGK with unit beta equals GK") {
        const Dataset d = testers::random_dataset(rng, 4, 3);
        MethodSpec ggk;
        ggk.method = Method::GGK;
        ggk.beta = {1, 1, 1};
        const LinearWeights a = build_cd(d, gk_spec());
        const LinearWeights b = build_cd(d, ggk);
        CHECK(a.c == b.c);
        CHECK(a.d == b.d);
    }

    SECTION("EWGK induces the same ppp-block equations as GK") {
        const Dataset d = testers::random_dataset(rng, 5, 4);
        const LinearWeights gk = build_cd(d, gk_spec());
        MethodSpec espec;
        espec.method = Method::EWGK;
        const LinearWeights ew = build_cd(d, espec);
        // a_ij = d_ij / colsum(c) coincides: w_ij / p_ij == q_ij / sum p q.
        const std::vector<double> gk_cols = gk.c.col_sums();
        const std::vector<double> ew_cols = ew.c.col_sums();
        for (std::size_t i = 0; i < d.n_commodities; ++i)
            for (std::size_t j = 0; j < d.n_countries; ++j) {
                const double a_gk = gk.d(i, j) / gk_cols[j];
                const double a_ew = ew.d(i, j) / ew_cols[j];
                CHECK(std::abs(a_gk - a_ew) <= 1e-14 * std::max(a_gk, 1.0));
            }
    }

    SECTION("support of c and d equals support of q") {
        for (Method m : {Method::GK, Method::GGK, Method::EWGK, Method::GK_MEAN}) {
            MethodSpec spec;
            spec.method = m;
            if (m == Method::GGK || m == Method::GK_MEAN) spec.beta = {2, 0.5, 1, 3};
            if (m == Method::GK_MEAN) spec.rho = -0.8;
            const Dataset d = testers::random_dataset(rng, 5, 4, 0.5);
            const LinearWeights w = build_cd(d, spec);
            for (std::size_t i = 0; i < 5; ++i)
                for (std::size_t j = 0; j < 4; ++j) {
                    CHECK((w.c(i, j) > 0.0) == (d.quantities(i, j) > 0.0));
                    CHECK((w.d(i, j) > 0.0) == (d.quantities(i, j) > 0.0));
                }
        }
    }

    SECTION("non-linear methods are rejected") {
        const Dataset d = testers::random_dataset(rng, 3, 3);
        MethodSpec bad;
        bad.method = Method::RAO;
        CHECK_THROWS_AS(build_cd(d, bad), UnsupportedMethodError);
    }
}

TEST_CASE("build_F: hand example and stochasticity") {
    SECTION("single commodity, two countries") {
        const Dataset d = validate_dataset(Matrix{{1, 2}}, Matrix{{1, 1}});
        const Matrix f = build_F(build_cd(d, gk_spec()));
        REQUIRE(f.rows() == 2);
        CHECK(f(0, 0) == Approx(0.5).epsilon(1e-15));
        CHECK(f(0, 1) == Approx(0.5).epsilon(1e-15));
        CHECK(f(1, 0) == Approx(0.5).epsilon(1e-15));
        CHECK(f(1, 1) == Approx(0.5).epsilon(1e-15));
    }

    SECTION("columns of F and B sum to one for every method") {
        std::mt19937_64 rng(302);
        for (Method m : {Method::GK, Method::GGK, Method::EWGK, Method::GK_MEAN}) {
            MethodSpec spec;
            spec.method = m;
            if (m == Method::GGK || m == Method::GK_MEAN)
                spec.beta = testers::random_positive_vector(rng, 4, 0.5, 2.0);
            if (m == Method::GK_MEAN) spec.rho = 1.7;
            for (int trial = 0; trial < 10; ++trial) {
                const Dataset d = testers::random_dataset(rng, 5, 4, 0.6);
                const LinearWeights w = build_cd(d, spec);
                for (double s : build_F(w).col_sums()) CHECK(std::abs(s - 1.0) <= 1e-12);
                for (double s : build_B(w).col_sums()) CHECK(std::abs(s - 1.0) <= 1e-12);
            }
        }
    }

    SECTION("a split dataset yields a block-structured F") {
        std::mt19937_64 rng(303);
        const Dataset d = testers::example_dataset(3, rng);
        const Matrix f = build_F(build_cd(d, gk_spec()));
        for (std::size_t k : {0, 1})
            for (std::size_t j : {2, 3}) {
                CHECK(f(k, j) == 0.0);
                CHECK(f(j, k) == 0.0);
            }
    }
}

TEST_CASE("solve_eigen") {
    SECTION("doubly stochastic symmetric matrix") {
        const EigenResult e = solve_eigen(Matrix{{0.5, 0.5}, {0.5, 0.5}}, 1e-12, 1000);
        CHECK(e.converged);
        CHECK(e.lambda == Approx(1.0).margin(1e-11));
        CHECK(e.x[0] == Approx(e.x[1]).epsilon(1e-11));
        CHECK(e.unique);
    }

    SECTION("periodic permutation oscillates raw, converges shifted") {
        const Matrix flip{{0, 1}, {1, 0}};
        std::vector<double> start = {0.75, 0.25};
        CHECK_THROWS_AS(solve_eigen(flip, 1e-12, 500, false, &start), NoConvergenceError);
        const EigenResult e = solve_eigen(flip, 1e-12, 5000, true, &start);
        CHECK(e.converged);
        CHECK(e.x[0] == Approx(0.5).epsilon(1e-10));
        CHECK(e.lambda == Approx(1.0).margin(1e-10));
    }

    SECTION("reducible matrix is flagged non-unique") {
        std::mt19937_64 rng(304);
        const Dataset d = testers::example_dataset(3, rng);
        const EigenResult e = solve_eigen(build_F(build_cd(d, gk_spec())), 1e-12, 10000);
        CHECK(e.converged);
        CHECK_FALSE(e.unique);
    }

    SECTION("column sums are validated") {
        CHECK_THROWS_AS(solve_eigen(Matrix{{0.5, 0.2}, {0.5, 0.2}}, 1e-12, 100), Error);
    }
}

TEST_CASE("solve_linear: closed-form cases") {
    SECTION("one commodity, two countries: ppp equals the price ratio") {
        const Dataset d = validate_dataset(Matrix{{1, 2}}, Matrix{{1, 1}});
        const Solution s = solve_linear(d, gk_spec());
        CHECK(s.ppp[0] == 1.0);
        CHECK(s.ppp[1] == Approx(2.0).epsilon(1e-11));
        CHECK(s.p_int[0] == Approx(1.0).epsilon(1e-11));
        CHECK(s.residual_norm <= 1e-10);
    }

    SECTION("uniform prices across countries solve with unit parities") {
        std::mt19937_64 rng(305);
        Matrix p(3, 4);
        const std::vector<double> base = {2.5, 0.3, 7.0};
        for (std::size_t i = 0; i < 3; ++i)
            for (std::size_t j = 0; j < 4; ++j) p(i, j) = base[i];
        const Dataset d = validate_dataset(p, testers::random_quantities(rng, 3, 4, 0.8));
        const Solution s = solve_linear(d, gk_spec());
        for (double x : s.ppp) CHECK(x == Approx(1.0).epsilon(1e-10));
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(s.p_int[i] == Approx(base[i]).epsilon(1e-10));
    }

    SECTION("2x2 GK matches the dense null-space oracle") {
        const Dataset d = validate_dataset(Matrix{{1, 2}, {3, 4}}, Matrix{{1, 1}, {1, 1}});
        const MethodSpec spec = gk_spec();
        const Solution s = solve_linear(d, spec);
        const std::vector<std::vector<double>> basis = nullspace_oracle(build_F(build_cd(d, spec)));
        REQUIRE(basis.size() == 1);
        const std::vector<double> col_c = build_cd(d, spec).c.col_sums();
        std::vector<double> oracle_ppp(2);
        for (std::size_t j = 0; j < 2; ++j) oracle_ppp[j] = col_c[j] / basis[0][j];
        // compare up to scale
        const double ratio_solver = s.ppp[1] / s.ppp[0];
        const double ratio_oracle = oracle_ppp[1] / oracle_ppp[0];
        CHECK(std::abs(ratio_solver - ratio_oracle) <= 1e-10 * ratio_oracle);
    }
}

TEST_CASE("solve_linear: paper-style golden datasets") {
    std::mt19937_64 rng(306);

    SECTION("complete example with random prices solves tightly") {
        const Dataset d = testers::example_dataset(1, rng);
        const Solution s = solve_linear(d, gk_spec());
        CHECK(s.residual_norm <= 1e-10);
        CHECK(std::abs(s.lambda_estimate - 1.0) <= 1e-9);
    }

    SECTION("split example is refused with its components") {
        const Dataset d = testers::example_dataset(3, rng);
        try {
            solve_linear(d, gk_spec());
            FAIL("expected DisconnectedError");
        } catch (const DisconnectedError& e) {
            REQUIRE(e.report.country_components.size() == 2);
            CHECK(e.report.country_components[0] == std::vector<std::size_t>{0, 1});
            CHECK(e.report.country_components[1] == std::vector<std::size_t>{2, 3});
        }
    }
}

TEST_CASE("solve_linear: family reductions and invariants") {
    std::mt19937_64 rng(307);

    SECTION("gk-mean at rho 1 equals the generalized GK solution") {
        const Dataset d = testers::random_connected_dataset(rng, 5, 4);
        MethodSpec ggk;
        ggk.method = Method::GGK;
        ggk.beta = testers::random_positive_vector(rng, 4, 0.5, 2.0);
        MethodSpec mean1;
        mean1.method = Method::GK_MEAN;
        mean1.beta = ggk.beta;
        mean1.rho = 1.0;
        const std::vector<double> a = testers::geomean_one_ppp(solve_linear(d, ggk));
        const std::vector<double> b = testers::geomean_one_ppp(solve_linear(d, mean1));
        CHECK(testers::max_rel_dev(a, b) <= 1e-10);
    }

    SECTION("gk-mean at rho 0 solves the geometric system") {
        const Dataset d = testers::random_connected_dataset(rng, 4, 3);
        MethodSpec spec;
        spec.method = Method::GK_MEAN;
        spec.beta = {1.5, 1.0, 0.5};
        spec.rho = 0.0;
        const Solution s = solve_linear(d, spec);
        CHECK(s.residual_norm <= 1e-10);
        CHECK(std::abs(s.lambda_estimate - 1.0) <= 1e-9);
    }

    SECTION("every linear method solves random connected datasets tightly") {
        for (Method m : {Method::GK, Method::GGK, Method::EWGK, Method::GK_MEAN}) {
            MethodSpec spec;
            spec.method = m;
            for (int trial = 0; trial < 8; ++trial) {
                const Dataset d = testers::random_connected_dataset(rng, 3 + trial % 4, 3);
                if (m == Method::GGK || m == Method::GK_MEAN)
                    spec.beta = testers::random_positive_vector(rng, d.n_countries, 0.5, 2.0);
                if (m == Method::GK_MEAN) spec.rho = trial % 2 ? 0.6 : -1.4;
                const Solution s = solve_linear(d, spec);
                CHECK(s.residual_norm <= 1e-9);
                CHECK(std::abs(s.lambda_estimate - 1.0) <= 1e-9);
            }
        }
    }

    SECTION("GK additivity: deflated expenditure equals valued quantities") {
        for (int trial = 0; trial < 10; ++trial) {
            const Dataset d = testers::random_connected_dataset(rng, 5, 4, 0.6);
            const Solution s = solve_linear(d, gk_spec());
            for (std::size_t j = 0; j < d.n_countries; ++j) {
                double nominal = 0.0, valued = 0.0;
                for (std::size_t i = 0; i < d.n_commodities; ++i) {
                    nominal += d.prices(i, j) * d.quantities(i, j);
                    valued += s.p_int[i] * d.quantities(i, j);
                }
                CHECK(std::abs(nominal / s.ppp[j] - valued) <= 1e-10 * valued);
            }
        }
    }

    SECTION("currency-unit invariance: scaling one country's prices") {
        // EWGK is left out: its price-block weights w/p carry nominal price
        // levels, so rescaling one currency genuinely moves its solution.
        const Dataset d = testers::random_connected_dataset(rng, 4, 4);
        const double lambda = 1.7;
        Matrix scaled = d.prices;
        for (std::size_t i = 0; i < d.n_commodities; ++i) scaled(i, 1) *= lambda;
        const Dataset d2 = validate_dataset(scaled, d.quantities);
        for (Method m : {Method::GK, Method::GGK, Method::GK_MEAN}) {
            MethodSpec spec;
            spec.method = m;
            if (m == Method::GGK) spec.beta = {0.5, 2.0, 1.0, 1.5};
            if (m == Method::GK_MEAN) {
                spec.beta = {1, 1, 1, 1};
                spec.rho = 0.8;
            }
            const Solution base = solve_linear(d, spec);
            const Solution moved = solve_linear(d2, spec);
            CHECK(moved.ppp[1] == Approx(base.ppp[1] * lambda).epsilon(1e-10));
            CHECK(moved.ppp[2] == Approx(base.ppp[2]).epsilon(1e-10));
            CHECK(moved.ppp[3] == Approx(base.ppp[3]).epsilon(1e-10));
            for (std::size_t i = 0; i < d.n_commodities; ++i)
                CHECK(moved.p_int[i] == Approx(base.p_int[i]).epsilon(1e-10));
        }
    }
}

TEST_CASE("power iteration matches the null-space oracle on small instances") {
    std::mt19937_64 rng(308);
    for (int trial = 0; trial < 30; ++trial) {
        const Dataset d = testers::random_connected_dataset(rng, 2 + trial % 5, 2 + trial % 4);
        MethodSpec spec;
        spec.method = Method::GK;
        const OracleVerdict verdict = cross_validate(d, spec);
        CHECK(verdict.agrees);
        CHECK(verdict.max_rel_dev <= 1e-8);
    }
}
