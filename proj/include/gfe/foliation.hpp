#pragma once

// Group foliation machinery: the automorphic system
//
//     H_y H_xx - H_tx = U(t,y,h),  H_xx = V,  H_xy = W,  H_yy = Z,   h = H_x,
//
// its resolving (compatibility) system of five equations, the worked
// quadruples (closed-form, parametric, and reduced/tabulated), and numeric
// reconstruction of quadruples from exact solutions.

#include <gfe/catalog.hpp>
#include <gfe/quartic.hpp>

#include <functional>
#include <optional>

namespace gfe {

struct FoliationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// ---------------------------------------------------------------------------
// quadruple representations

/// U, V, W, Z as closed-form expressions in (t, y, h).
struct ClosedQuadruple {
    ExprPtr U, V, W, Z;
    std::string subalgebra;
};

/// Scaled parametric form: U = y^3 Utilde, V = y Vtilde, W = y Wtilde,
/// Z = y Ztilde, all functions of S on (s_lo, s_hi) \ {0}, linked to the
/// invariant by lambda(S) = h / y^2. lambda must be strictly monotone on the
/// interval for chain-rule derivatives to exist.
struct ParametricQuadruple {
    ExprPtr lambda;  // lambda(S)
    ExprPtr U, V, W, Z;  // tilde factors, functions of S
    double s_lo, s_hi;
    std::string subalgebra;
};

/// Sampled quadruple: rows (t, y, h, U, V, W, Z). The interpolation rule is
/// exact re-evaluation through the generating solution when available.
struct TabulatedQuadruple {
    std::vector<std::array<double, 7>> rows;
    std::string subalgebra;
};

// ---------------------------------------------------------------------------
// automorphic residuals

/// The four residuals of the automorphic system for a closed quadruple,
/// as expressions in (t, x, y): each invariant computed from H minus the
/// corresponding quadruple entry evaluated at (t, y, h = H_x).
inline std::array<ExprPtr, 4> automorphic_residuals(const ExprPtr& H,
                                                    const ClosedQuadruple& q) {
    InvariantTuple iv = invariants(H);
    Bindings at{{"h", iv.h}};  // t, y are shared symbols
    return {sub(iv.U, substitute(q.U, at)), sub(iv.V, substitute(q.V, at)),
            sub(iv.W, substitute(q.W, at)), sub(iv.Z, substitute(q.Z, at))};
}

struct SampledCheck {
    double max_scaled_residual = 0;
    int points_used = 0;
    int points_skipped = 0;
    std::optional<std::map<std::string, double>> worst_point;
};

/// Seeded numeric certificate for a list of residual expressions in
/// (t,x,y,...): max of |residual| / (1 + magnitude) over sampled points.
/// Points where `predicate` (if given) evaluates negative are skipped — used
/// to restrict to a branch-consistent sub-domain.
inline SampledCheck sampled_max_residual(const std::vector<ExprPtr>& residuals,
                                         const BoxMap& box,
                                         const Bindings& consts = {},
                                         const ExprPtr& predicate = nullptr,
                                         int npoints = 64,
                                         std::uint64_t seed = 123456789) {
    std::vector<ExprPtr> rs;
    for (const auto& r : residuals) rs.push_back(substitute(r, consts));
    ExprPtr pred = predicate ? substitute(predicate, consts) : nullptr;
    std::set<std::string> syms;
    for (const auto& r : rs) for (const auto& s : free_symbols(r)) syms.insert(s);
    syms.erase("pi");

    SampledCheck out;
    for (int i = 0; i < npoints; ++i) {
        std::mt19937_64 gen(seed + (std::uint64_t)i * detail::kPointSeedStride);
        std::map<std::string, Real50> env;
        std::map<std::string, double> pt;
        for (const auto& s : syms) {
            auto it = box.find(s);
            Box b = it != box.end() ? it->second : Box{0.5, 2.0};
            double v = detail::sample_box(b, gen);
            env[s] = Real50(v);
            pt[s] = v;
        }
        try {
            if (pred && eval(pred, env) < 0) {
                ++out.points_skipped;
                continue;
            }
            for (const auto& r : rs) {
                Real50 val = abs(eval(r, env));
                Real50 mag = eval_magnitude(r, env);
                double scaled = (val / (1 + mag)).convert_to<double>();
                if (scaled > out.max_scaled_residual) {
                    out.max_scaled_residual = scaled;
                    out.worst_point = pt;
                }
            }
            ++out.points_used;
        } catch (const DomainError&) {
            ++out.points_skipped;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// resolving residuals

/// The five compatibility conditions, as expressions in (t, y, h):
///   V_y + W V_h - V W_h
///   W_y + W W_h - V Z_h
///   V_t + V U_h - U V_h - V W
///   W_t + U_y + W U_h - U W_h - V Z
///   Z_t - U Z_h - V U_h + (W Z_h + V W_h + Z_y + beta) h + V W
inline std::array<ExprPtr, 5> resolving_residuals(const ClosedQuadruple& q,
                                                  const ExprPtr& beta) {
    const ExprPtr &U = q.U, &V = q.V, &W = q.W, &Z = q.Z;
    ExprPtr h = symbol("h");
    auto dy = [](const ExprPtr& e) { return differentiate(e, "y"); };
    auto dh = [](const ExprPtr& e) { return differentiate(e, "h"); };
    auto dt = [](const ExprPtr& e) { return differentiate(e, "t"); };
    return {
        sum({dy(V), mul(W, dh(V)), neg(mul(V, dh(W)))}),
        sum({dy(W), mul(W, dh(W)), neg(mul(V, dh(Z)))}),
        sum({dt(V), mul(V, dh(U)), neg(mul(U, dh(V))), neg(mul(V, W))}),
        sum({dt(W), dy(U), mul(W, dh(U)), neg(mul(U, dh(W))), neg(mul(V, Z))}),
        sum({dt(Z), neg(mul(U, dh(Z))), neg(mul(V, dh(U))),
             mul(sum({mul(W, dh(Z)), mul(V, dh(W)), dy(Z), beta}), h),
             mul(V, W)}),
    };
}

/// The same five conditions for a parametric quadruple, reduced to functions
/// of S alone. With U = y^3 Ut(lambda), V = y Vt, W = y Wt, Z = y Zt and
/// lambda = h / y^2, the chain rule gives d/dlambda = (d/dS) / (dlambda/dS),
/// and every residual factors as y^0 or y^2 times a function of S:
///   r1 = Vt - 2 lam Vt' + Wt Vt' - Vt Wt'
///   r2 = Wt - 2 lam Wt' + Wt Wt' - Vt Zt'
///   r3 = Vt Ut' - Ut Vt' - Vt Wt
///   r4 = 3 Ut - 2 lam Ut' + Wt Ut' - Ut Wt' - Vt Zt
///   r5 = -Ut Zt' - Vt Ut' + lam (Wt Zt' + Vt Wt' + Zt - 2 lam Zt' + beta) + Vt Wt
/// (primes are lambda-derivatives).
inline std::array<ExprPtr, 5> resolving_residuals(const ParametricQuadruple& q,
                                                  const ExprPtr& beta) {
    ExprPtr dlam = differentiate(q.lambda, "S");
    auto dl = [&](const ExprPtr& e) {
        return div(differentiate(e, "S"), dlam);
    };
    const ExprPtr &Ut = q.U, &Vt = q.V, &Wt = q.W, &Zt = q.Z;
    ExprPtr lam = q.lambda;
    ExprPtr Utp = dl(Ut), Vtp = dl(Vt), Wtp = dl(Wt), Ztp = dl(Zt);
    ExprPtr two_lam = mul(constant(2L), lam);
    return {
        sum({Vt, neg(mul(two_lam, Vtp)), mul(Wt, Vtp), neg(mul(Vt, Wtp))}),
        sum({Wt, neg(mul(two_lam, Wtp)), mul(Wt, Wtp), neg(mul(Vt, Ztp))}),
        sum({mul(Vt, Utp), neg(mul(Ut, Vtp)), neg(mul(Vt, Wt))}),
        sum({mul(constant(3L), Ut), neg(mul(two_lam, Utp)), mul(Wt, Utp),
             neg(mul(Ut, Wtp)), neg(mul(Vt, Zt))}),
        sum({neg(mul(Ut, Ztp)), neg(mul(Vt, Utp)),
             mul(lam, sum({mul(Wt, Ztp), mul(Vt, Wtp), Zt,
                           neg(mul(two_lam, Ztp)), beta})),
             mul(Vt, Wt)}),
    };
}

// ---------------------------------------------------------------------------
// worked quadruple: cubic solution family

enum class RadicalBranch { Plus, Minus };

/// Closed quadruple for the cubic solution family, via lambda = h / y^2:
///   c3 = 576 (c1^2 + c2^2) - 48 c2 beta + beta^2
///   Vt = +-(1/4) sqrt(192 c1 lambda + c3)
///   Wt = ((24 c2 - beta)/(24 c1)) Vt - c3/(96 c1)
///   Zt = -beta - Vt
///   Ut = (Vt / (288 c1^2)) ((24 c2 - beta) Vt^2 - (c3/2) Vt + K)
///   K  = 864 c2 (c1^2 + c2^2) - (beta/16)(beta^2 - 72 beta c2 + 2880 c1^2
///        + 1728 c2^2)
/// then U = y^3 Ut, V = y Vt, W = y Wt, Z = y Zt. Requires c1 != 0 (c1
/// appears in denominators); real for lambda > -c3 / (192 c1).
inline ClosedQuadruple example1_quadruple(const ExprPtr& c1, const ExprPtr& c2,
                                          const ExprPtr& beta,
                                          RadicalBranch branch = RadicalBranch::Plus) {
    if (is_zero_expr(c1))
        throw ParamError(
            "the closed quadruple of the cubic family requires c1 != 0 "
            "(c1 appears in the denominators of its W and U entries)");
    ExprPtr y = symbol("y"), h = symbol("h");
    ExprPtr lam = mul(h, power(y, Rational(-2)));
    ExprPtr c1sq = power(c1, Rational(2)), c2sq = power(c2, Rational(2));
    ExprPtr c3 = sum({mul(constant(576L), add(c1sq, c2sq)),
                      mul(constant(-48L), mul(c2, beta)), power(beta, Rational(2))});
    ExprPtr radicand = add(mul(constant(192L), mul(c1, lam)), c3);
    ExprPtr Vt = mul(constant(Rational(1, 4)), power(radicand, Rational(1, 2)));
    if (branch == RadicalBranch::Minus) Vt = neg(Vt);
    ExprPtr a = div(sub(mul(constant(24L), c2), beta), mul(constant(24L), c1));
    ExprPtr Wt = sub(mul(a, Vt), div(c3, mul(constant(96L), c1)));
    ExprPtr Zt = neg(add(beta, Vt));
    ExprPtr K = sub(
        mul(constant(864L), mul(c2, add(c1sq, c2sq))),
        mul(div(beta, constant(16L)),
            sum({power(beta, Rational(2)), mul(constant(-72L), mul(beta, c2)),
                 mul(constant(2880L), c1sq), mul(constant(1728L), c2sq)})));
    ExprPtr Ut = mul(div(Vt, mul(constant(288L), c1sq)),
                     sum({mul(sub(mul(constant(24L), c2), beta), power(Vt, Rational(2))),
                          neg(mul(div(c3, constant(2L)), Vt)), K}));
    ClosedQuadruple q;
    q.U = mul(power(y, Rational(3)), Ut);
    q.V = mul(y, Vt);
    q.W = mul(y, Wt);
    q.Z = mul(y, Zt);
    q.subalgebra = "{Y1,Y3}";
    return q;
}

inline ClosedQuadruple example1_quadruple(const Rational& c1, const Rational& c2,
                                          const Rational& beta,
                                          RadicalBranch branch = RadicalBranch::Plus) {
    return example1_quadruple(constant(c1), constant(c2), constant(beta), branch);
}

// ---------------------------------------------------------------------------
// worked quadruple: harmonic solution family (parametric in S = sin(theta))

/// Parametric quadruple for the harmonic solution. The second derivatives of
/// the solution in the polar-type coordinates (r, theta) are r (or r^3)
/// times functions of S; dividing by y = r (3 - 4 S^2) S (resp. y^3) cancels
/// every occurrence of r symbolically, which this constructor performs and
/// verifies. S = 0 (where y = 0) is excluded from the domain.
inline ParametricQuadruple example2_parametric(const ExprPtr& beta) {
    ExprPtr S = symbol("S"), r = symbol("r");
    ExprPtr S2 = power(S, Rational(2));
    ExprPtr C = power(sub(one(), S2), Rational(1, 2));
    ExprPtr y = mul(r, mul(sub(constant(3L), mul(constant(4L), S2)), S));

    // second derivatives of the solution along the coordinate change,
    // as functions of (r, S)
    ExprPtr Hxx = mul(mul(constant(Rational(-4, 3)), mul(beta, r)),
                      mul(power(S, Rational(5)),
                          sub(mul(constant(8L), S2), constant(9L))));
    ExprPtr Hxy = mul(mul(constant(Rational(4, 3)), mul(beta, r)),
                      mul(mul(power(S, Rational(4)), C),
                          sub(mul(constant(8L), S2), constant(5L))));
    ExprPtr Hyy = mul(mul(constant(Rational(1, 3)), mul(beta, r)),
                      mul(S, sum({mul(constant(32L), power(S, Rational(6))),
                                  mul(constant(-36L), power(S, Rational(4))),
                                  mul(constant(12L), S2), one()})));
    ExprPtr Uexpr = mul(mul(constant(Rational(2, 3)),
                            mul(power(beta, Rational(2)), power(r, Rational(3)))),
                        mul(power(S, Rational(7)),
                            mul(sub(mul(constant(8L), S2), constant(9L)),
                                sum({mul(constant(8L), power(S, Rational(4))),
                                     mul(constant(-4L), S2), constant(-1L)}))));

    auto divide_out = [&](const ExprPtr& num, const ExprPtr& den) {
        ExprPtr q = simplify(div(num, den));
        if (contains_symbol(q, "r"))
            throw FoliationError(
                "r-dependence failed to cancel in the parametric quadruple");
        return q;
    };
    ParametricQuadruple q;
    q.V = divide_out(Hxx, y);
    q.W = divide_out(Hxy, y);
    q.Z = divide_out(Hyy, y);
    q.U = divide_out(Uexpr, power(y, Rational(3)));
    // lambda = h / y^2 expressed through S: strictly monotone on (-1/2, 1/2)
    ExprPtr den = power(sub(mul(constant(4L), S2), constant(3L)), Rational(2));
    q.lambda = div(mul(constant(-4L), mul(beta, mul(power(S, Rational(3)), C))), den);
    q.s_lo = -0.5;
    q.s_hi = 0.5;
    q.subalgebra = "{Y1,Y3}";
    return q;
}

inline ParametricQuadruple example2_parametric(const Rational& beta) {
    return example2_parametric(constant(beta));
}

/// Inverts the quadruple's lambda(S) on its S-interval by bisection
/// (monotonicity is a type invariant; verified at construction sites).
inline Real50 parametric_S_for_lambda(const ParametricQuadruple& q,
                                      const Real50& lambda_target,
                                      const Real50& beta) {
    auto lam_at = [&](const Real50& s) {
        return eval(q.lambda,
                    std::map<std::string, Real50>{{"S", s}, {"beta", beta}});
    };
    Real50 margin("1e-9");
    Real50 lo = Real50(q.s_lo) + margin, hi = Real50(q.s_hi) - margin;
    Real50 flo = lam_at(lo), fhi = lam_at(hi);
    bool increasing = fhi > flo;
    if (lambda_target < (increasing ? flo : fhi) ||
        lambda_target > (increasing ? fhi : flo))
        throw LambdaRangeError("lambda outside the image of the parametric S-interval");
    for (int i = 0; i < 220; ++i) {
        Real50 mid = (lo + hi) / 2;
        if ((lam_at(mid) < lambda_target) == increasing)
            lo = mid;
        else
            hi = mid;
    }
    return (lo + hi) / 2;
}

/// Numeric automorphic certificate for a parametric quadruple against an
/// exact solution: at seeded points, compute (t, y, h = H_x), invert
/// lambda = h/y^2 to S, and compare the scaled quadruple values against the
/// invariants computed from H.
inline SampledCheck automorphic_check(const ExprPtr& H, const ParametricQuadruple& q,
                                      const BoxMap& box, const Real50& beta,
                                      int npoints = 64,
                                      std::uint64_t seed = 123456789) {
    InvariantTuple iv = invariants(H);
    const ExprPtr lhs[4] = {iv.U, iv.V, iv.W, iv.Z};
    const ExprPtr tilde[4] = {q.U, q.V, q.W, q.Z};
    const int ypow[4] = {3, 1, 1, 1};

    SampledCheck out;
    for (int i = 0; i < npoints; ++i) {
        std::mt19937_64 gen(seed + (std::uint64_t)i * detail::kPointSeedStride);
        std::map<std::string, Real50> env;
        std::map<std::string, double> pt;
        for (const char* s : {"t", "x", "y"}) {
            auto it = box.find(s);
            Box b = it != box.end() ? it->second : Box{0.5, 2.0};
            double v = detail::sample_box(b, gen);
            env[s] = Real50(v);
            pt[s] = v;
        }
        env["beta"] = beta;
        try {
            Real50 yv = env.at("y");
            if (yv == 0) {
                ++out.points_skipped;
                continue;
            }
            Real50 h = eval(iv.h, env);
            Real50 S = parametric_S_for_lambda(q, h / (yv * yv), beta);
            std::map<std::string, Real50> senv{{"S", S}, {"beta", beta}};
            for (int k = 0; k < 4; ++k) {
                Real50 want = eval(lhs[k], env);
                Real50 got = eval(tilde[k], senv);
                for (int p = 0; p < ypow[k]; ++p) got *= yv;
                double scaled =
                    (abs(want - got) / (1 + abs(want))).convert_to<double>();
                if (scaled > out.max_scaled_residual) {
                    out.max_scaled_residual = scaled;
                    out.worst_point = pt;
                }
            }
            ++out.points_used;
        } catch (const DomainError&) {
            ++out.points_skipped;
        } catch (const LambdaRangeError&) {
            ++out.points_skipped;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// worked example: y-independent solutions (reduced resolving system)

/// For quadruples with W = Z = 0 and U, V functions of (t, h) only, the five
/// compatibility conditions collapse to two:
///   V U_h - beta h = 0,    V_t - U V_h + beta h = 0.
inline std::array<ExprPtr, 2> example3_reduced_system(const ExprPtr& U,
                                                      const ExprPtr& V,
                                                      const ExprPtr& beta) {
    ExprPtr h = symbol("h");
    return {sub(mul(V, differentiate(U, "h")), mul(beta, h)),
            sum({differentiate(V, "t"), neg(mul(U, differentiate(V, "h"))),
                 mul(beta, h)})};
}

/// (U, V) pair tabulated over a regular (t, h) grid, with an exact
/// re-evaluation rule through the generating solution.
struct TabulatedPair {
    std::vector<double> t_nodes, h_nodes;
    std::vector<std::vector<double>> U, V;  // indexed [t][h]
    double t_lo, t_hi, h_lo, h_hi;
    std::function<std::array<Real50, 2>(const Real50&, const Real50&)> eval_exact;
};

/// Builds the tabulated (U, V) pair from a solution whose h = H_x does not
/// depend on y (then W = Z = 0 drop out and U, V are functions of (t, h)).
/// Requires H_x strictly monotone in x on [x_lo, x_hi] for every t in
/// [t_lo, t_hi] so that h determines x.
inline TabulatedPair example3_pair_from_solution(const ExprPtr& H, double x_lo,
                                                 double x_hi, double t_lo,
                                                 double t_hi, const Real50& beta,
                                                 int nt = 9, int nh = 17) {
    ExprPtr Hx = differentiate(H, "x");
    if (contains_symbol(simplify(Hx), "y"))
        throw FoliationError("h = H_x must not depend on y for the reduced system");
    InvariantTuple iv = invariants(H);
    ExprPtr Uexpr = simplify(iv.U);
    if (contains_symbol(Uexpr, "y"))
        throw FoliationError(
            "the U invariant must reduce to a function of (t, h) for this family");
    ExprPtr Vexpr = iv.V;

    auto hx_at = [Hx, beta](const Real50& t, const Real50& x) {
        return eval(Hx, std::map<std::string, Real50>{
                            {"t", t}, {"x", x}, {"y", Real50(0)}, {"beta", beta}});
    };

    // verify strict monotonicity in x for each tabulated t; intersect the
    // attained h-ranges
    TabulatedPair tab;
    tab.t_lo = t_lo;
    tab.t_hi = t_hi;
    Real50 h_min("-1e300"), h_max("1e300");
    for (int i = 0; i < nt; ++i) {
        Real50 t = Real50(t_lo) + Real50(t_hi - t_lo) * i / (nt > 1 ? nt - 1 : 1);
        int sign = 0;
        Real50 prev = hx_at(t, Real50(x_lo));
        const int scan = 64;
        for (int j = 1; j <= scan; ++j) {
            Real50 x = Real50(x_lo) + Real50(x_hi - x_lo) * j / scan;
            Real50 cur = hx_at(t, x);
            int s = cur > prev ? 1 : cur < prev ? -1 : 0;
            if (s == 0 || (sign != 0 && s != sign))
                throw FoliationError(
                    "H_x is not strictly monotone in x on the declared window");
            sign = s;
            prev = cur;
        }
        Real50 a = hx_at(t, Real50(x_lo)), b = hx_at(t, Real50(x_hi));
        if (a > b) std::swap(a, b);
        if (a > h_min) h_min = a;
        if (b < h_max) h_max = b;
    }
    if (!(h_min < h_max))
        throw FoliationError("the attained h-ranges do not overlap across t");
    // 5% interior margin keeps bisection brackets valid for every t
    Real50 pad = (h_max - h_min) / 20;
    h_min += pad;
    h_max -= pad;
    tab.h_lo = h_min.convert_to<double>();
    tab.h_hi = h_max.convert_to<double>();

    auto invert_x = [hx_at, x_lo, x_hi](const Real50& t, const Real50& h) {
        Real50 lo(x_lo), hi(x_hi);
        bool increasing = hx_at(t, hi) > hx_at(t, lo);
        for (int i = 0; i < 180; ++i) {
            Real50 mid = (lo + hi) / 2;
            if ((hx_at(t, mid) < h) == increasing)
                lo = mid;
            else
                hi = mid;
        }
        return (lo + hi) / 2;
    };
    tab.eval_exact = [Uexpr, Vexpr, invert_x, beta](const Real50& t, const Real50& h) {
        Real50 x = invert_x(t, h);
        std::map<std::string, Real50> env{
            {"t", t}, {"x", x}, {"y", Real50(0)}, {"beta", beta}};
        return std::array<Real50, 2>{eval(Uexpr, env), eval(Vexpr, env)};
    };

    for (int i = 0; i < nt; ++i)
        tab.t_nodes.push_back(t_lo + (t_hi - t_lo) * i / double(nt > 1 ? nt - 1 : 1));
    for (int j = 0; j < nh; ++j)
        tab.h_nodes.push_back(tab.h_lo +
                              (tab.h_hi - tab.h_lo) * j / double(nh > 1 ? nh - 1 : 1));
    tab.U.assign(nt, std::vector<double>(nh));
    tab.V.assign(nt, std::vector<double>(nh));
    for (int i = 0; i < nt; ++i)
        for (int j = 0; j < nh; ++j) {
            auto uv = tab.eval_exact(Real50(tab.t_nodes[i]), Real50(tab.h_nodes[j]));
            tab.U[i][j] = uv[0].convert_to<double>();
            tab.V[i][j] = uv[1].convert_to<double>();
        }
    return tab;
}

/// Residuals of the reduced resolving system on a tabulated pair, with
/// derivatives by central differences of step (range * 1e-4), Richardson-
/// extrapolated once, applied through the pair's exact evaluation rule.
struct TabulatedPairCheck {
    double max_residual_1 = 0;  // V U_h - beta h
    double max_residual_2 = 0;  // V_t - U V_h + beta h
};

inline TabulatedPairCheck check_reduced_system(const TabulatedPair& tab,
                                               const Real50& beta) {
    auto richardson = [](auto f, const Real50& at, const Real50& step) {
        auto central = [&](const Real50& s) { return (f(at + s) - f(at - s)) / (2 * s); };
        Real50 d1 = central(step), d2 = central(step / 2);
        return (4 * d2 - d1) / 3;
    };
    Real50 dh = Real50(tab.h_hi - tab.h_lo) * Real50("1e-4");
    Real50 dt = Real50(tab.t_hi - tab.t_lo) * Real50("1e-4");
    TabulatedPairCheck out;
    for (size_t i = 0; i < tab.t_nodes.size(); ++i) {
        for (size_t j = 0; j < tab.h_nodes.size(); ++j) {
            Real50 t(tab.t_nodes[i]), h(tab.h_nodes[j]);
            // keep FD stencils inside the tabulated window
            if (h - dh < tab.h_lo || h + dh > tab.h_hi) continue;
            if (t - dt < tab.t_lo || t + dt > tab.t_hi) continue;
            auto uv = tab.eval_exact(t, h);
            Real50 U_h = richardson(
                [&](const Real50& hh) { return tab.eval_exact(t, hh)[0]; }, h, dh);
            Real50 V_h = richardson(
                [&](const Real50& hh) { return tab.eval_exact(t, hh)[1]; }, h, dh);
            Real50 V_t = richardson(
                [&](const Real50& tt) { return tab.eval_exact(tt, h)[1]; }, t, dt);
            double r1 = abs(uv[1] * U_h - beta * h).convert_to<double>();
            double r2 = abs(V_t - uv[0] * V_h + beta * h).convert_to<double>();
            if (r1 > out.max_residual_1) out.max_residual_1 = r1;
            if (r2 > out.max_residual_2) out.max_residual_2 = r2;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// reconstruction of a quadruple from an exact solution

struct ReconstructConfig {
    int samples = 200;
    std::uint64_t seed = 123456789;
    double delta_in = 1e-9;   // input-coordinate collision threshold
    double delta_out = 1e-6;  // output agreement required at collisions
    int collision_probes = 32;  // samples for which a second x with equal h is sought
};

struct CollisionWitness {
    std::array<double, 3> in_a, in_b;  // (t, y, h)
    double out_distance;
};

struct ReconstructResult {
    TabulatedQuadruple table;
    bool well_defined = true;
    std::optional<CollisionWitness> witness;
    int collision_pairs_checked = 0;
    // pairs sharing (t, y, h) but lying on opposite signs of V: the
    // invariants determine the outputs only per branch of the radical, so
    // such pairs witness branch multiplicity, not ill-definedness
    int cross_branch_collisions = 0;
};

/// Samples the record's solution, computes the invariant coordinates
/// (t, y, h) and the four left-hand sides of the automorphic system, and
/// tests well-definedness: any two samples whose (t, y, h) agree within
/// delta_in must produce outputs within delta_out. Pairs are sought
/// deliberately by solving H_x = h for a second x at fixed (t, y).
inline ReconstructResult reconstruct_quadruple(const SolutionRecord& rec,
                                               const ReconstructConfig& cfg = {}) {
    Bindings consts;
    for (const auto& [k, v] : rec.params)
        if (v->kind == Kind::Constant) consts[k] = v;
    ExprPtr H = substitute(rec.expr, consts);
    InvariantTuple iv = invariants(H);
    iv.h = substitute(iv.h, consts);
    const ExprPtr outs[4] = {substitute(iv.U, consts), substitute(iv.V, consts),
                             substitute(iv.W, consts), substitute(iv.Z, consts)};

    auto eval_row = [&](const Real50& t, const Real50& x, const Real50& y) {
        std::map<std::string, Real50> env{{"t", t}, {"x", x}, {"y", y}};
        std::array<double, 7> row;
        row[0] = t.convert_to<double>();
        row[1] = y.convert_to<double>();
        row[2] = eval(iv.h, env).convert_to<double>();
        for (int k = 0; k < 4; ++k) row[3 + k] = eval(outs[k], env).convert_to<double>();
        return row;
    };

    ReconstructResult res;
    res.table.subalgebra = rec.subalgebra;
    Box bt = rec.domain.count("t") ? rec.domain.at("t") : Box{0.5, 2.0};
    Box bx = rec.domain.count("x") ? rec.domain.at("x") : Box{0.5, 2.0};
    Box by = rec.domain.count("y") ? rec.domain.at("y") : Box{0.5, 2.0};

    std::vector<std::array<double, 3>> xs;  // the (t, x, y) behind each row
    for (int i = 0; i < cfg.samples; ++i) {
        std::mt19937_64 gen(cfg.seed + (std::uint64_t)i * detail::kPointSeedStride);
        double t = detail::sample_box(bt, gen);
        double x = detail::sample_box(bx, gen);
        double y = detail::sample_box(by, gen);
        try {
            res.table.rows.push_back(eval_row(Real50(t), Real50(x), Real50(y)));
            xs.push_back({t, x, y});
        } catch (const DomainError&) {
            continue;
        }
    }

    auto check_pair = [&](const std::array<double, 7>& a,
                          const std::array<double, 7>& b) {
        double din = std::max({std::abs(a[0] - b[0]), std::abs(a[1] - b[1]),
                               std::abs(a[2] - b[2])});
        if (din > cfg.delta_in) return;
        ++res.collision_pairs_checked;
        auto vsign = [&](double v) {
            return v > cfg.delta_out ? 1 : v < -cfg.delta_out ? -1 : 0;
        };
        if (vsign(a[4]) * vsign(b[4]) == -1) {
            ++res.cross_branch_collisions;
            return;
        }
        double dout = 0;
        for (int k = 3; k < 7; ++k) dout = std::max(dout, std::abs(a[k] - b[k]));
        if (dout > cfg.delta_out && res.well_defined) {
            res.well_defined = false;
            res.witness = CollisionWitness{{a[0], a[1], a[2]}, {b[0], b[1], b[2]},
                                           dout};
        }
    };

    // deliberate collisions: at fixed (t, y), find another x with the same h
    int probes = std::min<int>(cfg.collision_probes, (int)xs.size());
    for (int i = 0; i < probes; ++i) {
        double t = xs[i][0], x0 = xs[i][1], y = xs[i][2];
        double h0 = res.table.rows[i][2];
        auto hx = [&](double x) {
            return eval(iv.h, std::map<std::string, Real50>{{"t", Real50(t)},
                                                            {"x", Real50(x)},
                                                            {"y", Real50(y)}})
                .convert_to<double>();
        };
        const int scan = 64;
        double prev_x = bx.lo, prev_f = hx(prev_x) - h0;
        for (int j = 1; j <= scan; ++j) {
            double x = bx.lo + (bx.hi - bx.lo) * j / scan;
            double f = hx(x) - h0;
            if (prev_f == 0 || (prev_f < 0) != (f < 0)) {
                double lo = prev_x, hi = x;
                for (int it = 0; it < 100; ++it) {
                    double mid = (lo + hi) / 2;
                    if ((hx(mid) - h0 < 0) == (prev_f < 0))
                        lo = mid;
                    else
                        hi = mid;
                }
                double x1 = (lo + hi) / 2;
                if (std::abs(x1 - x0) > 1e-6) {
                    try {
                        auto row = eval_row(Real50(t), Real50(x1), Real50(y));
                        check_pair(res.table.rows[i], row);
                        res.table.rows.push_back(row);
                    } catch (const DomainError&) {
                    }
                }
            }
            prev_x = x;
            prev_f = f;
        }
    }

    // incidental collisions among all rows
    for (size_t i = 0; i < res.table.rows.size(); ++i)
        for (size_t j = i + 1; j < res.table.rows.size(); ++j)
            check_pair(res.table.rows[i], res.table.rows[j]);

    return res;
}

// ---------------------------------------------------------------------------
// serialization

/// Columnar text format: header `t y h U V W Z`, one row per line,
/// 17 significant digits, single spaces, LF line endings.
inline std::string serialize_table(const TabulatedQuadruple& table) {
    std::ostringstream os;
    os << "t y h U V W Z\n";
    os.precision(17);
    for (const auto& row : table.rows) {
        for (int k = 0; k < 7; ++k) {
            if (k) os << ' ';
            os << row[k];
        }
        os << '\n';
    }
    return os.str();
}

}  // namespace gfe
