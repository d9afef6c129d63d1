#pragma once

// Numeric evaluation of expressions in double or 50-digit binary floating
// point. The symbol "pi" is bound automatically unless the caller overrides
// it. Domain violations (division by zero, fractional power of a negative
// base) raise DomainError carrying the offending subexpression.

#include <gfe/parse.hpp>

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <cmath>
#include <map>
#include <string>

namespace gfe {

using Real50 = boost::multiprecision::cpp_bin_float_50;

enum class Precision { Double, Extended };

struct DomainError : std::runtime_error {
    std::string subexpr;
    explicit DomainError(const std::string& what_arg, std::string sub)
        : std::runtime_error(what_arg + " in '" + sub + "'"), subexpr(std::move(sub)) {}
};

struct UnboundSymbol : std::runtime_error {
    std::string name;
    explicit UnboundSymbol(std::string n)
        : std::runtime_error("unbound symbol '" + n + "'"), name(std::move(n)) {}
};

namespace detail {

template <class R>
R from_rational(const Rational& r) {
    return r.template convert_to<R>();
}

template <>
inline double from_rational<double>(const Rational& r) {
    return r.convert_to<double>();
}

template <class R>
R pi_value() {
    static const R v = atan(R(1)) * 4;
    return v;
}

template <>
inline double pi_value<double>() {
    using std::atan;
    return atan(1.0) * 4;
}

template <class R>
R pow_integer(R base, Integer n, const ExprPtr& site) {
    bool invert = n < 0;
    if (invert) {
        if (base == 0) throw DomainError("zero raised to a negative power", render(site));
        n = -n;
    }
    R acc(1);
    while (n > 0) {
        if ((n & 1) != 0) acc *= base;
        base *= base;
        n >>= 1;
    }
    return invert ? R(1) / acc : acc;
}

}  // namespace detail

template <class R>
R eval(const ExprPtr& e, const std::map<std::string, R>& env) {
    using std::abs;
    using std::atan;
    using std::cos;
    using std::exp;
    using std::pow;
    using std::sin;
    using std::tan;
    switch (e->kind) {
        case Kind::Constant:
            return detail::from_rational<R>(e->value);
        case Kind::Symbol: {
            auto it = env.find(e->name);
            if (it != env.end()) return it->second;
            if (e->name == "pi") return detail::pi_value<R>();
            throw UnboundSymbol(e->name);
        }
        case Kind::Sum: {
            R acc(0);
            for (const auto& k : e->kids) acc += eval(k, env);
            return acc;
        }
        case Kind::Product: {
            R acc(1);
            for (const auto& k : e->kids) acc *= eval(k, env);
            return acc;
        }
        case Kind::Power: {
            R b = eval(e->kids[0], env);
            const Rational& ex = e->exponent;
            if (is_integer(ex)) return detail::pow_integer(b, rat_num(ex), e);
            if (b < 0)
                throw DomainError("fractional power of a negative base", render(e));
            if (b == 0) {
                if (ex > 0) return R(0);
                throw DomainError("zero raised to a negative power", render(e));
            }
            return pow(b, detail::from_rational<R>(ex));
        }
        case Kind::Call: {
            R u = eval(e->kids[0], env);
            if (e->name == "sin") return sin(u);
            if (e->name == "cos") return cos(u);
            if (e->name == "tan") {
                R c = cos(u);
                if (c == 0) throw DomainError("tangent at an odd multiple of pi/2",
                                              render(e));
                return sin(u) / c;
            }
            if (e->name == "arctan") return atan(u);
            if (e->name == "exp") return exp(u);
            throw UnsupportedCall(e->name);
        }
    }
    throw std::logic_error("unreachable expression kind");
}

/// Scale proxy for tolerance checks: the sum of the absolute values of the
/// top-level terms (so a residual that cancels two large terms is judged
/// relative to their size, not the near-zero difference).
template <class R>
R eval_magnitude(const ExprPtr& e, const std::map<std::string, R>& env) {
    using std::abs;
    if (e->kind == Kind::Sum) {
        R acc(0);
        for (const auto& k : e->kids) acc += abs(eval(k, env));
        return acc;
    }
    return abs(eval(e, env));
}

}  // namespace gfe
