#pragma once

// Registry of exact solutions of the governing equation, with the metadata
// verification and simulation need: expression, parameter bindings, admitted
// subalgebra tag, validity domain (sampling box), and periodicity.

#include <gfe/gfe_model.hpp>

#include <optional>
#include <vector>

namespace gfe {

struct UnknownSolutionError : std::runtime_error {
    explicit UnknownSolutionError(const std::string& name)
        : std::runtime_error("unknown solution '" + name + "'") {}
};

struct ParamError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SolutionRecord {
    std::string name;
    ExprPtr expr;  // H(t,x,y); parameters substituted
    Bindings params;
    ExprPtr beta;
    std::string subalgebra;
    BoxMap domain;    // sampling box inside the validity domain
    BoxMap validity;  // hard bounds of the validity domain (empty: all space)
    std::optional<double> period_x;
    std::optional<double> period_y;
};

// ---------------------------------------------------------------------------
// families

/// Cubic polynomial solution
///   H = c1 (x^2 - 3 y^2) x + c2 (3 x^2 - y^2) y - (beta/8)(x^2 + y^2) y.
inline SolutionRecord polynomial_solution(const Rational& c1, const Rational& c2,
                                          const Rational& beta) {
    ExprPtr x = symbol("x"), y = symbol("y");
    ExprPtr x2 = power(x, Rational(2)), y2 = power(y, Rational(2));
    ExprPtr H = sum({mul(constant(c1), mul(sub(x2, mul(constant(3L), y2)), x)),
                     mul(constant(c2), mul(sub(mul(constant(3L), x2), y2), y)),
                     mul(constant(-beta / 8), mul(add(x2, y2), y))});
    SolutionRecord rec;
    rec.name = "polynomial";
    rec.expr = expand(H);
    rec.params = {{"c1", constant(c1)}, {"c2", constant(c2)}, {"beta", constant(beta)}};
    rec.beta = constant(beta);
    rec.subalgebra = "{Y1,Y3}";
    rec.domain = {{"t", {0.5, 2.0}}, {"x", {-2.0, 2.0}}, {"y", {-2.0, 2.0}}};
    return rec;
}

enum class HarmonicVariant { Base, Plus, Minus };

inline HarmonicVariant harmonic_variant_from_string(const std::string& s) {
    if (s == "base") return HarmonicVariant::Base;
    if (s == "plus") return HarmonicVariant::Plus;
    if (s == "minus") return HarmonicVariant::Minus;
    throw ParamError("variant must be one of base|plus|minus, got '" + s + "'");
}

/// Steady harmonic solution
///   H = s (beta/2) (x^2 + y^2)^{3/2} sin^3((1/3) arctan(y/x) + phi)
/// with (s, phi) = (+1, 0), (-1, +pi/3), (-1, -pi/3). Valid for x > 0
/// (principal arctan branch keeps |theta| < pi/6).
inline SolutionRecord harmonic_solution(const Rational& beta, HarmonicVariant variant) {
    ExprPtr x = symbol("x"), y = symbol("y");
    ExprPtr r2 = add(power(x, Rational(2)), power(y, Rational(2)));
    ExprPtr theta = mul(constant(Rational(1, 3)),
                        call("arctan", mul(y, power(x, Rational(-1)))));
    Rational sign(1);
    std::string vname = "base";
    if (variant != HarmonicVariant::Base) {
        sign = -1;
        ExprPtr shift = mul(constant(Rational(1, 3)), symbol("pi"));
        theta = variant == HarmonicVariant::Plus ? add(theta, shift) : sub(theta, shift);
        vname = variant == HarmonicVariant::Plus ? "plus" : "minus";
    }
    ExprPtr H = mul(constant(sign * beta / 2),
                    mul(power(r2, Rational(3, 2)),
                        power(call("sin", theta), Rational(3))));
    SolutionRecord rec;
    rec.name = "harmonic";
    rec.expr = H;
    rec.params = {{"beta", constant(beta)}, {"variant", symbol(vname)}};
    rec.beta = constant(beta);
    rec.subalgebra = "{Y1,Y3}";
    rec.domain = {{"t", {0.5, 2.0}}, {"x", {0.5, 2.0}}, {"y", {-0.4, 0.4}}};
    rec.validity = {{"x", {0.0, 1e300}}};  // singular half-plane x <= 0 excluded
    return rec;
}

/// Travelling y-independent wave H = A sin(k x + (beta/k) t); an instance of
/// the H = Q(t,x) class, whose constraint Q_txx + beta Q_x = 0 fixes the
/// phase speed -beta/k^2.
inline SolutionRecord rossby_wave(const Rational& A, const Rational& k,
                                  const Rational& beta) {
    if (k == 0) throw ParamError("rossby wave requires wavenumber k != 0");
    ExprPtr phase = add(mul(constant(k), symbol("x")),
                        mul(constant(beta / k), symbol("t")));
    SolutionRecord rec;
    rec.name = "rossby";
    rec.expr = mul(constant(A), call("sin", phase));
    rec.params = {{"A", constant(A)}, {"k", constant(k)}, {"beta", constant(beta)}};
    rec.beta = constant(beta);
    rec.subalgebra = "{Y2}";
    rec.domain = {{"t", {0.5, 2.0}}, {"x", {-3.0, 3.0}}, {"y", {-3.0, 3.0}}};
    double kd = k.convert_to<double>();
    rec.period_x = 2 * 3.14159265358979323846 / std::abs(kd);
    return rec;
}

/// Zonal flow H = F(y): x-independent, hence exactly stationary.
inline SolutionRecord zonal_flow(const ExprPtr& F, const Rational& beta = Rational(1)) {
    for (const auto& s : free_symbols(F))
        if (s != "y" && s != "pi" && s != "beta")
            throw ParamError("zonal profile must depend on y only; found '" + s + "'");
    differentiate(differentiate(F, "y"), "y");  // must be twice differentiable
    SolutionRecord rec;
    rec.name = "zonal";
    rec.expr = F;
    rec.params = {{"F", F}, {"beta", constant(beta)}};
    rec.beta = constant(beta);
    rec.subalgebra = "{Y1}";
    rec.domain = {{"t", {0.5, 2.0}}, {"x", {-3.0, 3.0}}, {"y", {-3.0, 3.0}}};
    return rec;
}

// ---------------------------------------------------------------------------
// registry

using ParamMap = std::map<std::string, std::string>;

namespace detail {

inline Rational param_rational(const ParamMap& p, const std::string& key,
                               std::optional<Rational> def = std::nullopt) {
    auto it = p.find(key);
    if (it == p.end()) {
        if (def) return *def;
        throw ParamError("missing required parameter '" + key + "'");
    }
    ExprPtr e = parse(it->second);
    if (e->kind == Kind::Constant) return e->value;
    auto [c, m] = as_coeff_mono(e);
    if (is_one_expr(m)) return c;
    throw ParamError("parameter '" + key + "' must be a rational number, got '" +
                     it->second + "'");
}

}  // namespace detail

inline SolutionRecord get_solution(const std::string& name, const ParamMap& params,
                                   const Rational& beta) {
    using detail::param_rational;
    if (name == "polynomial")
        return polynomial_solution(param_rational(params, "c1"),
                                   param_rational(params, "c2"), beta);
    if (name == "harmonic") {
        auto it = params.find("variant");
        HarmonicVariant v = it == params.end()
                                ? HarmonicVariant::Base
                                : harmonic_variant_from_string(it->second);
        return harmonic_solution(beta, v);
    }
    if (name == "rossby")
        return rossby_wave(param_rational(params, "A", Rational(1)),
                           param_rational(params, "k", Rational(1)), beta);
    if (name == "zonal") {
        auto it = params.find("F");
        ExprPtr F = it == params.end() ? call("sin", symbol("y")) : parse(it->second);
        SolutionRecord rec = zonal_flow(F, beta);
        if (it == params.end()) rec.period_y = 2 * 3.14159265358979323846;
        return rec;
    }
    throw UnknownSolutionError(name);
}

/// Representative instances of every registered family.
inline std::vector<SolutionRecord> list_solutions() {
    std::vector<SolutionRecord> out;
    out.push_back(polynomial_solution(Rational(1), Rational(0), Rational(1)));
    out.push_back(harmonic_solution(Rational(1), HarmonicVariant::Base));
    out.push_back(harmonic_solution(Rational(1), HarmonicVariant::Plus));
    out.push_back(harmonic_solution(Rational(1), HarmonicVariant::Minus));
    out.push_back(rossby_wave(Rational(1), Rational(1), Rational(1)));
    SolutionRecord z = zonal_flow(call("sin", symbol("y")));
    z.period_y = 2 * 3.14159265358979323846;
    out.push_back(z);
    return out;
}

/// Residual certificate for a record on its validity domain: symbolic proof
/// when the kernel succeeds, seeded numeric sampling otherwise.
inline ZeroResult verify_record(const SolutionRecord& rec,
                                const ZeroOptions& opts = {}) {
    GfeParams p{rec.beta};
    return equals_zero(gfe_residual(rec.expr, p), rec.domain, opts);
}

/// Numeric periodicity check: |H(x + Lx) - H(x)| and the y analogue at
/// seeded sample points.
inline bool verify_periodicity(const SolutionRecord& rec, double tol = 1e-12) {
    if (!rec.period_x && !rec.period_y) return true;
    std::mt19937_64 gen(rec.name.size() * 1000003ULL + 7);
    for (int i = 0; i < 16; ++i) {
        std::map<std::string, Real50> env;
        for (const auto& [s, b] : rec.domain)
            env[s] = Real50(detail::sample_box(b, gen));
        Real50 h0 = eval(rec.expr, env);
        if (rec.period_x) {
            auto shifted = env;
            shifted["x"] += Real50(*rec.period_x);
            if (abs(eval(rec.expr, shifted) - h0) > tol * (1 + abs(h0))) return false;
        }
        if (rec.period_y) {
            auto shifted = env;
            shifted["y"] += Real50(*rec.period_y);
            if (abs(eval(rec.expr, shifted) - h0) > tol * (1 + abs(h0))) return false;
        }
    }
    return true;
}

}  // namespace gfe
