#include <doctest.h>

#include <gfe/foliation.hpp>

using namespace gfe;

namespace {

Real50 eval_S(const ExprPtr& e, double S, double beta = 1.0) {
    return eval(e, std::map<std::string, Real50>{{"S", Real50(S)},
                                                 {"beta", Real50(beta)}});
}

}  // namespace

TEST_CASE("closed quadruple of the cubic family") {
    SUBCASE("c1 = 0 rejected") {
        CHECK_THROWS_AS(example1_quadruple(Rational(0), Rational(1), Rational(1)),
                        ParamError);
    }
    SUBCASE("V entry value at lambda = 0") {
        ClosedQuadruple q = example1_quadruple(Rational(1), Rational(0), Rational(0));
        // c3 = 576, V/y at h = 0 is sqrt(576)/4 = 6
        Real50 v = eval(q.V, std::map<std::string, Real50>{{"y", Real50(1)},
                                                           {"h", Real50(0)}});
        CHECK(abs(v - 6) < Real50("1e-40"));
    }
    SUBCASE("Z + beta y + V vanishes identically (symbolic parameters)") {
        ClosedQuadruple q = example1_quadruple(symbol("c1"), symbol("c2"),
                                               symbol("beta"));
        ExprPtr zrel = sum({q.Z, mul(symbol("beta"), symbol("y")), q.V});
        CHECK(proves_zero(zrel));
    }
    SUBCASE("resolving system closes") {
        for (auto [c1, c2, b] : {std::array<long, 3>{1, 0, 1},
                                 std::array<long, 3>{2, 3, 5},
                                 std::array<long, 3>{1, -1, 2}}) {
            ClosedQuadruple q =
                example1_quadruple(Rational(c1), Rational(c2), Rational(b));
            auto rs = resolving_residuals(q, constant(Rational(b)));
            BoxMap box{{"t", {0.5, 2.0}}, {"y", {0.5, 2.0}}, {"h", {0.5, 2.0}}};
            for (int i = 0; i < 5; ++i) {
                ZeroResult r = equals_zero(rs[i], box, ZeroOptions{64, 1e-10});
                INFO("params (", c1, ",", c2, ",", b, ") residual ", i, ": ",
                     r.detail);
                CHECK((r.verdict == Verdict::ProvedZero ||
                       r.verdict == Verdict::ProbablyZero));
            }
        }
    }
    SUBCASE("beta-term sensitivity: the zero quadruple is not a solution") {
        ClosedQuadruple zeroq{zero(), zero(), zero(), zero(), ""};
        auto rs = resolving_residuals(zeroq, symbol("beta"));
        for (int i = 0; i < 4; ++i) CHECK(is_zero_expr(rs[i]));
        ZeroResult r = equals_zero(rs[4]);  // beta * h survives
        CHECK(r.verdict == Verdict::NonZero);
        CHECK(!r.witness.empty());
    }
    SUBCASE("automorphic certificate on branch-consistent sub-domains") {
        SolutionRecord rec = polynomial_solution(Rational(1), Rational(0), Rational(1));
        ExprPtr Hxx = differentiate(differentiate(rec.expr, "x"), "x");
        ExprPtr branch_pred = mul(symbol("y"), Hxx);  // positive where V/y >= 0
        BoxMap box{{"t", {0.5, 2.0}}, {"x", {-2.0, 2.0}}, {"y", {-2.0, 2.0}}};
        for (RadicalBranch br : {RadicalBranch::Plus, RadicalBranch::Minus}) {
            ClosedQuadruple q =
                example1_quadruple(Rational(1), Rational(0), Rational(1), br);
            auto res = automorphic_residuals(rec.expr, q);
            ExprPtr pred = br == RadicalBranch::Plus ? branch_pred : neg(branch_pred);
            SampledCheck chk = sampled_max_residual(
                {res.begin(), res.end()}, box, Bindings{{"beta", one()}}, pred);
            INFO((br == RadicalBranch::Plus ? "plus" : "minus"),
                 " branch max residual: ", chk.max_scaled_residual);
            CHECK(chk.points_used > 10);
            CHECK(chk.max_scaled_residual <= 1e-10);
        }
    }
}

TEST_CASE("parametric quadruple of the harmonic family") {
    ParametricQuadruple q = example2_parametric(Rational(1));

    SUBCASE("r-dependence cancels symbolically") {
        for (const ExprPtr& e : {q.U, q.V, q.W, q.Z, q.lambda})
            CHECK(!contains_symbol(e, "r"));
    }
    SUBCASE("lambda at the interval edge") {
        // lambda(1/2) = -sqrt(3) beta / 16
        Real50 edge = eval_S(q.lambda, 0.5);
        CHECK(abs(edge + sqrt(Real50(3)) / 16) < Real50("1e-45"));
        CHECK(eval_S(q.lambda, 0.3) < 0);  // decreasing from lambda(0) = 0
    }
    SUBCASE("lambda is strictly monotone on the S-interval") {
        double prev = 1e300;
        for (int i = 1; i < 40; ++i) {
            double S = -0.49 + 0.98 * i / 40.0;
            double cur = eval_S(q.lambda, S).convert_to<double>();
            CHECK(cur < prev);
            prev = cur;
        }
    }
    SUBCASE("resolving system closes at the probe points") {
        auto rs = resolving_residuals(q, symbol("beta"));
        for (double S : {0.1, -0.1, 0.3, -0.3, 0.45, -0.45}) {
            for (int i = 0; i < 5; ++i) {
                Real50 v = abs(eval_S(rs[i], S));
                INFO("S = ", S, ", residual ", i, " = ",
                     v.convert_to<double>());
                CHECK(v <= Real50("1e-8"));
            }
        }
    }
    SUBCASE("automorphic certificate against the harmonic solution") {
        SolutionRecord rec = harmonic_solution(Rational(1), HarmonicVariant::Base);
        BoxMap box{{"t", {0.5, 2.0}}, {"x", {0.5, 2.0}}, {"y", {-0.2, 0.2}}};
        SampledCheck chk = automorphic_check(rec.expr, q, box, Real50(1));
        INFO("max residual: ", chk.max_scaled_residual, ", used ", chk.points_used);
        CHECK(chk.points_used >= 60);
        CHECK(chk.max_scaled_residual <= 1e-8);
    }
}

TEST_CASE("quartic reduction") {
    SUBCASE("coefficients") {
        QuarticProblem qp = quartic_coefficients(Real50(0), Real50(2));
        CHECK(qp.coeffs[4] == 0);  // constant term 81 lambda^2
        CHECK(qp.coeffs[0] == 64 * 4);
        CHECK_THROWS_AS(quartic_coefficients(Real50(1), Real50(0)), LambdaRangeError);
    }
    SUBCASE("S^2 satisfies the polynomial at lambda(S)") {
        std::mt19937_64 gen(31415926ULL);
        for (int i = 0; i < 20; ++i) {
            double S = -0.49 + 0.98 * detail::unit_uniform(gen);
            if (std::abs(S) < 0.02) S = 0.05;
            Real50 lam = lambda_curve(Real50(S), Real50(1));
            QuarticProblem qp = quartic_coefficients(lam, Real50(1));
            Real50 Rt(S * S), acc(0), scale(0);
            for (int k = 0; k < 5; ++k) {
                Real50 term = qp.coeffs[k] * pow(Rt, Real50(4 - k));
                acc += term;
                scale += abs(term);
            }
            CHECK(abs(acc) <= Real50("1e-10") * scale);
        }
    }
    SUBCASE("round-trip inversion of lambda(S)") {
        Real50 lam = lambda_curve(Real50("0.3"), Real50(1));
        Real50 S = solve_S_for_lambda(lam, Real50(1));
        CHECK(abs(S - Real50("0.3")) < Real50("1e-10"));
        CHECK_THROWS_AS(solve_S_for_lambda(Real50(5), Real50(1)), LambdaRangeError);
    }
    SUBCASE("published closed-form root: cross-checks at lambda = 0.2") {
        ClosedFormRoot r = closed_form_root(Real50("0.2"), Real50(1));
        CHECK(r.matches_numeric_root);
        CHECK(abs(r.value - Real50("0.998429490766102")) < Real50("1e-12"));
    }
    SUBCASE("published closed-form root: domain errors near lambda = 0") {
        for (const char* lam : {"0.05", "0.1"}) {
            try {
                closed_form_root(Real50(lam), Real50(1));
                FAIL("expected a domain error at lambda = ", lam);
            } catch (const QuarticDomainError& e) {
                CHECK(e.helper == "q2");
            }
        }
        CHECK_THROWS_AS(closed_form_root(Real50("0.2"), Real50(-1)),
                        QuarticDomainError);
    }
    SUBCASE("numeric roots solve the quartic") {
        QuarticProblem qp = quartic_coefficients(Real50("0.2"), Real50(1));
        std::vector<Real50> roots = quartic_real_roots(qp);
        CHECK(!roots.empty());
        for (const Real50& rt : roots) {
            Real50 acc(0);
            for (int k = 0; k < 5; ++k) acc += qp.coeffs[k] * pow(rt, Real50(4 - k));
            CHECK(abs(acc) < Real50("1e-35"));
        }
    }
}

TEST_CASE("reduced resolving system for y-independent solutions") {
    ExprPtr h = symbol("h"), beta = symbol("beta");

    SUBCASE("a naive guess fails the second equation") {
        ExprPtr U = mul(constant(Rational(1, 2)), mul(beta, power(h, Rational(2))));
        auto rs = example3_reduced_system(U, one(), beta);
        CHECK(is_zero_expr(simplify(rs[0])));
        ZeroResult r = equals_zero(rs[1]);
        CHECK(r.verdict == Verdict::NonZero);
    }
    SUBCASE("degenerate zero pair with beta = 0") {
        auto rs = example3_reduced_system(zero(), zero(), zero());
        CHECK(is_zero_expr(rs[0]));
        CHECK(is_zero_expr(rs[1]));
    }
    SUBCASE("pair from the travelling wave satisfies the reduced system") {
        SolutionRecord rec = rossby_wave(Rational(1), Rational(1), Rational(1));
        TabulatedPair tab = example3_pair_from_solution(rec.expr, 0.5, 2.5, 0.0, 0.2,
                                                        Real50(1));
        TabulatedPairCheck chk = check_reduced_system(tab, Real50(1));
        INFO("residuals: ", chk.max_residual_1, " ", chk.max_residual_2);
        CHECK(chk.max_residual_1 <= 1e-10);
        CHECK(chk.max_residual_2 <= 1e-10);
    }
    SUBCASE("x-independent profiles are rejected (no monotone window)") {
        CHECK_THROWS_AS(example3_pair_from_solution(parse("sin(y)"), 0.5, 2.5, 0.0,
                                                    0.2, Real50(1)),
                        FoliationError);
    }
    SUBCASE("equivalence: the transformed solution gives the same pair") {
        // H2 = Q(t, x + integral of q) + q(t) y with q = sin t shares the
        // same (U, V) as H1 = Q(t, x) at matching (t, h)
        ExprPtr H1 = parse("sin(x + t)");
        ExprPtr H2 = parse("sin(x - cos(t) + t) + y*sin(t)");
        TabulatedPair p1 =
            example3_pair_from_solution(H1, 0.5, 2.5, 0.0, 0.2, Real50(1));
        TabulatedPair p2 =
            example3_pair_from_solution(H2, 1.5, 3.5, 0.0, 0.2, Real50(1));
        double h_lo = std::max(p1.h_lo, p2.h_lo), h_hi = std::min(p1.h_hi, p2.h_hi);
        REQUIRE(h_lo < h_hi);
        double worst = 0;
        for (int i = 0; i <= 6; ++i) {
            Real50 t(0.02 + 0.16 * i / 6.0);
            for (int j = 0; j <= 10; ++j) {
                Real50 h(h_lo + (h_hi - h_lo) * j / 10.0);
                auto a = p1.eval_exact(t, h), b = p2.eval_exact(t, h);
                worst = std::max(worst, abs(a[0] - b[0]).convert_to<double>());
                worst = std::max(worst, abs(a[1] - b[1]).convert_to<double>());
            }
        }
        INFO("max pair difference: ", worst);
        CHECK(worst <= 1e-10);
    }
}

TEST_CASE("reconstruction of quadruples from exact solutions") {
    SUBCASE("cubic solution: well-defined, matches the closed quadruple") {
        SolutionRecord rec = polynomial_solution(Rational(1), Rational(0), Rational(1));
        ReconstructResult rr = reconstruct_quadruple(rec);
        CHECK(rr.well_defined);
        CHECK(rr.collision_pairs_checked > 0);
        // H_x = h has two roots in x with opposite-signed H_xx: the radical
        // branches show up as cross-branch coincidences, not as failures
        CHECK(rr.cross_branch_collisions > 0);

        ClosedQuadruple plus = example1_quadruple(Rational(1), Rational(0), Rational(1),
                                                  RadicalBranch::Plus);
        ClosedQuadruple minus = example1_quadruple(Rational(1), Rational(0),
                                                   Rational(1), RadicalBranch::Minus);
        int compared = 0;
        for (const auto& row : rr.table.rows) {
            std::map<std::string, Real50> env{
                {"t", Real50(row[0])}, {"y", Real50(row[1])}, {"h", Real50(row[2])}};
            const ClosedQuadruple& q = row[3 + 1] * row[1] >= 0 ? plus : minus;
            const ExprPtr ents[4] = {q.U, q.V, q.W, q.Z};
            for (int k = 0; k < 4; ++k) {
                Real50 v;
                try {
                    v = eval(ents[k], env);
                } catch (const DomainError&) {
                    goto next_row;  // radicand at the edge of its domain
                }
                CHECK(abs(v - Real50(row[3 + k])) <=
                      Real50("1e-8") * (1 + abs(v)));
            }
            ++compared;
        next_row:;
        }
        CHECK(compared > 100);
    }
    SUBCASE("harmonic solution: well-defined, matches the parametric quadruple") {
        SolutionRecord rec = harmonic_solution(Rational(1), HarmonicVariant::Base);
        ReconstructResult rr = reconstruct_quadruple(rec);
        CHECK(rr.well_defined);

        ParametricQuadruple q = example2_parametric(Rational(1));
        const ExprPtr tildes[4] = {q.U, q.V, q.W, q.Z};
        const int ypow[4] = {3, 1, 1, 1};
        int compared = 0;
        for (const auto& row : rr.table.rows) {
            Real50 y(row[1]);
            if (abs(y) < Real50("1e-3")) continue;
            Real50 S;
            try {
                S = parametric_S_for_lambda(q, Real50(row[2]) / (y * y), Real50(1));
            } catch (const LambdaRangeError&) {
                continue;
            }
            std::map<std::string, Real50> env{{"S", S}, {"beta", Real50(1)}};
            for (int k = 0; k < 4; ++k) {
                Real50 v = eval(tildes[k], env);
                for (int p = 0; p < ypow[k]; ++p) v *= y;
                CHECK(abs(v - Real50(row[3 + k])) <= Real50("1e-6") * (1 + abs(v)));
            }
            ++compared;
        }
        CHECK(compared > 50);
    }
    SUBCASE("zonal flow: invariants collapse but outputs stay well-defined") {
        SolutionRecord rec = zonal_flow(parse("sin(y)"));
        ReconstructResult rr = reconstruct_quadruple(rec);
        CHECK(rr.well_defined);
        CHECK(rr.collision_pairs_checked > 0);
        for (const auto& row : rr.table.rows) {
            CHECK(row[2] == doctest::Approx(0.0));                  // h
            CHECK(row[3] == doctest::Approx(0.0));                  // U
            CHECK(row[4] == doctest::Approx(0.0));                  // V
            CHECK(row[5] == doctest::Approx(0.0));                  // W
            CHECK(row[6] == doctest::Approx(-std::sin(row[1])));    // Z
        }
    }
    SUBCASE("serialization format") {
        TabulatedQuadruple t;
        t.rows.push_back({1, 2, 0.5, 0.25, -1, 0, 3.5});
        std::string s = serialize_table(t);
        CHECK(s.substr(0, 14) == "t y h U V W Z\n");
        CHECK(s.find("0.5 0.25 -1 0 3.5\n") != std::string::npos);
        CHECK(s.back() == '\n');
        CHECK(s.find('\r') == std::string::npos);
    }
}
