#pragma once

// The barotropic model on the beta-plane: residual of the governing
// equation for the geopotential H(t,x,y),
//
//     (H_xx + H_yy)_t - H_y (H_xx + H_yy)_x + H_x (H_xx + H_yy)_y + beta H_x = 0,
//
// its second-order differential invariants, and the finite transformations
// of the admitted symmetries (time shift, y shift, scaling, and the
// infinite-dimensional family generated by two free functions of time).

#include <gfe/zero.hpp>

#include <variant>

namespace gfe {

struct GfeParams {
    ExprPtr beta = symbol("beta");  // kept symbolic unless bound by the caller
};

inline ExprPtr d(const ExprPtr& e, const std::string& v) { return differentiate(e, v); }

inline ExprPtr vorticity(const ExprPtr& H) {
    return add(d(d(H, "x"), "x"), d(d(H, "y"), "y"));
}

inline ExprPtr gfe_residual(const ExprPtr& H, const GfeParams& p = {}) {
    ExprPtr w = vorticity(H);
    return sum({d(w, "t"),
                neg(mul(d(H, "y"), d(w, "x"))),
                mul(d(H, "x"), d(w, "y")),
                mul(p.beta, d(H, "x"))});
}

/// The seven second-order differential invariants of the admitted algebra:
/// t, y, H_x, H_y H_xx - H_tx, H_xx, H_xy, H_yy.
struct InvariantTuple {
    ExprPtr t, y, h, U, V, W, Z;
};

inline InvariantTuple invariants(const ExprPtr& H) {
    ExprPtr Hx = d(H, "x");
    ExprPtr Hxx = d(Hx, "x");
    return InvariantTuple{
        symbol("t"),
        symbol("y"),
        Hx,
        sub(mul(d(H, "y"), Hxx), d(Hx, "t")),
        Hxx,
        d(Hx, "y"),
        d(d(H, "y"), "y"),
    };
}

/// lambda = H_x / y^2, the invariant of the {scaling, y-translation-free}
/// subalgebra used by the worked reductions.
inline ExprPtr invariant_lambda(const ExprPtr& H) {
    return mul(d(H, "x"), power(symbol("y"), Rational(-2)));
}

// ---------------------------------------------------------------------------
// finite group transformations

struct TimeShift {
    Rational t0;
};
struct YShift {
    Rational y0;
};
struct Scaling {
    Rational eps;  // H -> e^{3 eps} H(e^{eps} t, e^{-eps} x, e^{-eps} y)
};
struct Xinf {
    ExprPtr f;  // function of t, three times differentiable
    ExprPtr g;  // function of t, twice differentiable
    Rational eps;
};

using TransformParams = std::variant<TimeShift, YShift, Scaling, Xinf>;

struct TransformError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_time_function(const ExprPtr& e, int derivatives,
                                  const char* label) {
    for (const auto& s : free_symbols(e)) {
        if (s != "t" && s != "pi" && s != "beta")
            throw TransformError(std::string(label) +
                                 " must be a function of t only; found symbol '" + s +
                                 "'");
    }
    ExprPtr cur = e;
    try {
        for (int i = 0; i < derivatives; ++i) cur = differentiate(cur, "t");
    } catch (const UnsupportedCall& uc) {
        throw TransformError(std::string(label) +
                             " is not differentiable enough: " + uc.what());
    }
}

inline ExprPtr exp_of(const Rational& k) { return call("exp", constant(k)); }

}  // namespace detail

/// Pull-back of H under the finite transformation, returned as a closed-form
/// expression in the untransformed coordinates.
inline ExprPtr apply_transform(const ExprPtr& H, const TransformParams& tr) {
    ExprPtr t = symbol("t"), x = symbol("x"), y = symbol("y");
    if (const auto* ts = std::get_if<TimeShift>(&tr)) {
        return substitute(H, Bindings{{"t", sub(t, constant(ts->t0))}});
    }
    if (const auto* ys = std::get_if<YShift>(&tr)) {
        return substitute(H, Bindings{{"y", sub(y, constant(ys->y0))}});
    }
    if (const auto* sc = std::get_if<Scaling>(&tr)) {
        ExprPtr Hs = substitute(H, Bindings{{"t", mul(detail::exp_of(sc->eps), t)},
                                            {"x", mul(detail::exp_of(-sc->eps), x)},
                                            {"y", mul(detail::exp_of(-sc->eps), y)}});
        return mul(detail::exp_of(3 * sc->eps), Hs);
    }
    const Xinf& xf = std::get<Xinf>(tr);
    detail::require_time_function(xf.f, 3, "f");
    detail::require_time_function(xf.g, 2, "g");
    ExprPtr eps = constant(xf.eps);
    ExprPtr shifted = substitute(H, Bindings{{"x", sub(x, mul(eps, xf.f))}});
    return add(shifted,
               mul(eps, sub(xf.g, mul(y, differentiate(xf.f, "t")))));
}

}  // namespace gfe
