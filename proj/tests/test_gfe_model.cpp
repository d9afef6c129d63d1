#include <doctest.h>

#include <gfe/catalog.hpp>

using namespace gfe;

namespace {

double eval_at(const ExprPtr& e, double t, double x, double y, double beta = 1.0) {
    return eval(e, std::map<std::string, double>{
                       {"t", t}, {"x", x}, {"y", y}, {"beta", beta}});
}

}  // namespace

TEST_CASE("gfe_residual basics") {
    CHECK(is_zero_expr(gfe_residual(constant(5L))));
    // H = x: all vorticity terms vanish, residual is beta
    CHECK(equal(gfe_residual(symbol("x")), symbol("beta")));
    // the cubic polynomial solution is an exact zero of the residual
    SolutionRecord rec = polynomial_solution(Rational(1), Rational(2), Rational(3));
    CHECK(proves_zero(gfe_residual(rec.expr, GfeParams{rec.beta})));
    // and with beta left symbolic in both solution and equation
    ExprPtr b = symbol("beta");
    ExprPtr x = symbol("x"), y = symbol("y");
    ExprPtr H = mul(mul(constant(Rational(-1, 8)), b),
                    mul(add(power(x, Rational(2)), power(y, Rational(2))), y));
    CHECK(proves_zero(gfe_residual(H)));
}

TEST_CASE("vorticity") {
    CHECK(equal(vorticity(parse("x^2 + y^2")), constant(4L)));
    CHECK(equal(vorticity(parse("sin(y)")), parse("-sin(y)")));
    // pure-beta cubic: Laplacian is -beta*y
    ExprPtr H = parse("-1/8*beta*(x^2 + y^2)*y");
    CHECK(equal(simplify(vorticity(H)), parse("-beta*y")));
    // linearity
    ExprPtr H1 = parse("x^3*y"), H2 = parse("sin(x)*y^2");
    ExprPtr lhs = vorticity(add(mul(constant(2L), H1), mul(constant(-3L), H2)));
    ExprPtr rhs = add(mul(constant(2L), vorticity(H1)),
                      mul(constant(-3L), vorticity(H2)));
    CHECK(is_zero_expr(simplify(sub(lhs, rhs))));
}

TEST_CASE("invariants tuple") {
    SUBCASE("H = 0") {
        InvariantTuple iv = invariants(zero());
        CHECK(equal(iv.t, symbol("t")));
        CHECK(equal(iv.y, symbol("y")));
        CHECK(is_zero_expr(iv.h));
        CHECK(is_zero_expr(iv.U));
        CHECK(is_zero_expr(iv.V));
        CHECK(is_zero_expr(iv.W));
        CHECK(is_zero_expr(iv.Z));
    }
    SUBCASE("H_x of the cubic solution") {
        SolutionRecord rec = polynomial_solution(Rational(1), Rational(1), Rational(1));
        ExprPtr expect = parse("3*(x^2 - y^2) + 6*x*y - 1/4*x*y");
        ExprPtr hx = substitute(invariants(rec.expr).h, Bindings{{"beta", one()}});
        CHECK(is_zero_expr(simplify(sub(hx, expect))));
    }
}

TEST_CASE("invariant_lambda") {
    CHECK(is_one_expr(invariant_lambda(parse("y^2*x"))));
    SolutionRecord rec = polynomial_solution(Rational(1), Rational(1), Rational(1));
    ExprPtr expect = parse("(3*(x^2 - y^2) + 6*x*y - 1/4*x*y)*y^(-2)");
    ExprPtr lam = substitute(invariant_lambda(rec.expr), Bindings{{"beta", one()}});
    CHECK(proves_zero(sub(lam, expect)));
}

TEST_CASE("apply_transform") {
    ExprPtr t = symbol("t"), x = symbol("x"), y = symbol("y");

    SUBCASE("shifts translate arguments") {
        ExprPtr H = parse("t^2 + y");
        CHECK(is_zero_expr(simplify(sub(apply_transform(H, TimeShift{Rational(1)}),
                                        parse("(t - 1)^2 + y")))));
        CHECK(equal(apply_transform(H, YShift{Rational(2)}), parse("t^2 + y - 2")));
    }

    SUBCASE("x-translation family: identity at eps = 0") {
        ExprPtr H = parse("x^3 - 3*x*y^2");
        CHECK(equal(apply_transform(H, Xinf{parse("t^2"), zero(), Rational(0)}), H));
    }

    SUBCASE("x-translation family applied to H = 0") {
        ExprPtr Hbar = apply_transform(zero(), Xinf{parse("t^2"), zero(), Rational(1)});
        CHECK(equal(Hbar, parse("-2*t*y")));
        CHECK(proves_zero(gfe_residual(Hbar)));
    }

    SUBCASE("group property in eps") {
        ExprPtr H = parse("x^2*y + t*x");
        Xinf a{parse("t^2"), parse("t"), Rational(1, 3)};
        Xinf b{parse("t^2"), parse("t"), Rational(1, 2)};
        Xinf ab{parse("t^2"), parse("t"), Rational(5, 6)};
        ExprPtr twice = apply_transform(apply_transform(H, a), b);
        CHECK(is_zero_expr(simplify(sub(twice, apply_transform(H, ab)))));
    }

    SUBCASE("scaling preserves the cubic solution") {
        SolutionRecord rec = polynomial_solution(Rational(2), Rational(-1), Rational(3));
        ExprPtr Hbar = apply_transform(rec.expr, Scaling{Rational(3, 10)});
        CHECK(proves_zero(gfe_residual(Hbar, GfeParams{rec.beta})));
    }

    SUBCASE("x-translation preserves solutions") {
        SolutionRecord rec = polynomial_solution(Rational(1), Rational(0), Rational(1));
        ExprPtr Hbar = apply_transform(
            rec.expr, Xinf{parse("t^2"), parse("sin(t)"), Rational(7, 10)});
        ZeroResult r = equals_zero(gfe_residual(Hbar, GfeParams{rec.beta}),
                                   BoxMap{{"t", {0.5, 2.0}},
                                          {"x", {-2.0, 2.0}},
                                          {"y", {-2.0, 2.0}}});
        CHECK((r.verdict == Verdict::ProvedZero || r.verdict == Verdict::ProbablyZero));
    }

    SUBCASE("ill-formed free functions are rejected") {
        CHECK_THROWS_AS(
            apply_transform(zero(), Xinf{parse("x*t"), zero(), Rational(1)}),
            TransformError);
    }
}

TEST_CASE("invariance of the seven invariants under the x-translation family") {
    // evaluate each invariant from the transformed solution at the image
    // point (t, x + eps f(t), y) and compare with its value from the
    // original solution at (t, x, y)
    SolutionRecord rec = polynomial_solution(Rational(1), Rational(2), Rational(1));
    Rational eps(7, 10);
    ExprPtr f = parse("t^2"), g = parse("sin(t)");
    ExprPtr Hbar = apply_transform(rec.expr, Xinf{f, g, eps});

    InvariantTuple orig = invariants(rec.expr);
    InvariantTuple xfrm = invariants(Hbar);

    const ExprPtr origs[] = {orig.h, orig.U, orig.V, orig.W, orig.Z};
    const ExprPtr xfrms[] = {xfrm.h, xfrm.U, xfrm.V, xfrm.W, xfrm.Z};

    std::mt19937_64 gen(2718281828ULL);
    for (int pt = 0; pt < 8; ++pt) {
        double t0 = 0.5 + 1.5 * detail::unit_uniform(gen);
        double x0 = -2 + 4 * detail::unit_uniform(gen);
        double y0 = -2 + 4 * detail::unit_uniform(gen);
        std::map<std::string, Real50> at{{"t", Real50(t0)},
                                         {"x", Real50(x0)},
                                         {"y", Real50(y0)},
                                         {"beta", Real50(1)}};
        double fval = eval_at(f, t0, x0, y0);
        std::map<std::string, Real50> image = at;
        image["x"] = Real50(x0) + Real50(eps.convert_to<double>()) * Real50(fval);
        for (int i = 0; i < 5; ++i) {
            Real50 a = eval(origs[i], at);
            Real50 b = eval(xfrms[i], image);
            CHECK(abs(a - b) <= Real50(1e-10) * (1 + abs(a)));
        }
    }
}
