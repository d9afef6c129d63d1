#pragma once

// Minimal computer-algebra kernel: immutable expression trees over exact
// rational coefficients with symbols, sums, products, rational powers and a
// small set of function calls {sin, cos, tan, arctan, exp}. sqrt(u) is
// represented as u^(1/2).
//
// Canonical form maintained by the constructors:
//   * sums and products are flattened,
//   * rational constants are merged (one leading constant per product,
//     one coefficient per sum term),
//   * like factors merge exponents, exp factors merge arguments,
//   * zero summands and unit factors are dropped,
//   * children are sorted by a fixed total order.

#include <gfe/rational.hpp>

#include <algorithm>
#include <map>
#include <memory>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gfe {

enum class Kind { Constant, Symbol, Sum, Product, Power, Call };

class Expr;
using ExprPtr = std::shared_ptr<const Expr>;

struct UnsupportedCall : std::runtime_error {
    explicit UnsupportedCall(const std::string& fn)
        : std::runtime_error("unsupported function: " + fn) {}
};

class Expr {
  public:
    Kind kind;
    Rational value;              // Constant
    std::string name;            // Symbol, Call
    std::vector<ExprPtr> kids;   // Sum/Product children, Call arg, Power base
    Rational exponent;           // Power

    Expr(Kind k, Rational v, std::string n, std::vector<ExprPtr> c, Rational e)
        : kind(k), value(std::move(v)), name(std::move(n)), kids(std::move(c)),
          exponent(std::move(e)) {}
};

// ---------------------------------------------------------------------------
// ordering / equality

inline int cmp(const ExprPtr& a, const ExprPtr& b) {
    if (a.get() == b.get()) return 0;
    auto rank = [](Kind k) {
        switch (k) {
            case Kind::Constant: return 0;
            case Kind::Symbol: return 1;
            case Kind::Call: return 2;
            case Kind::Power: return 3;
            case Kind::Product: return 4;
            case Kind::Sum: return 5;
        }
        return 6;
    };
    if (rank(a->kind) != rank(b->kind)) return rank(a->kind) < rank(b->kind) ? -1 : 1;
    switch (a->kind) {
        case Kind::Constant:
            return a->value == b->value ? 0 : (a->value < b->value ? -1 : 1);
        case Kind::Symbol:
            return a->name.compare(b->name) < 0 ? -1 : (a->name == b->name ? 0 : 1);
        case Kind::Call: {
            if (a->name != b->name) return a->name < b->name ? -1 : 1;
            return cmp(a->kids[0], b->kids[0]);
        }
        case Kind::Power: {
            int c = cmp(a->kids[0], b->kids[0]);
            if (c != 0) return c;
            return a->exponent == b->exponent ? 0 : (a->exponent < b->exponent ? -1 : 1);
        }
        case Kind::Product:
        case Kind::Sum: {
            size_t n = std::min(a->kids.size(), b->kids.size());
            for (size_t i = 0; i < n; ++i) {
                int c = cmp(a->kids[i], b->kids[i]);
                if (c != 0) return c;
            }
            if (a->kids.size() != b->kids.size())
                return a->kids.size() < b->kids.size() ? -1 : 1;
            return 0;
        }
    }
    return 0;
}

inline bool equal(const ExprPtr& a, const ExprPtr& b) { return cmp(a, b) == 0; }

struct ExprLess {
    bool operator()(const ExprPtr& a, const ExprPtr& b) const { return cmp(a, b) < 0; }
};

// ---------------------------------------------------------------------------
// constructors

inline ExprPtr constant(Rational v) {
    return std::make_shared<Expr>(Kind::Constant, std::move(v), "",
                                  std::vector<ExprPtr>{}, Rational(0));
}
inline ExprPtr constant(long v) { return constant(Rational(v)); }

inline const ExprPtr& zero() {
    static const ExprPtr z = constant(0L);
    return z;
}
inline const ExprPtr& one() {
    static const ExprPtr o = constant(1L);
    return o;
}

inline ExprPtr symbol(const std::string& name) {
    return std::make_shared<Expr>(Kind::Symbol, Rational(0), name,
                                  std::vector<ExprPtr>{}, Rational(0));
}

inline bool is_constant(const ExprPtr& e) { return e->kind == Kind::Constant; }
inline bool is_zero_expr(const ExprPtr& e) { return is_constant(e) && e->value == 0; }
inline bool is_one_expr(const ExprPtr& e) { return is_constant(e) && e->value == 1; }

ExprPtr sum(std::vector<ExprPtr> terms);
ExprPtr product(std::vector<ExprPtr> factors);
ExprPtr power(const ExprPtr& base, const Rational& expo);
ExprPtr call(const std::string& fn, const ExprPtr& arg);

/// Splits a canonical term into (rational coefficient, monomial part).
inline std::pair<Rational, ExprPtr> as_coeff_mono(const ExprPtr& term) {
    if (term->kind == Kind::Constant) return {term->value, one()};
    if (term->kind == Kind::Product && !term->kids.empty() &&
        term->kids[0]->kind == Kind::Constant) {
        std::vector<ExprPtr> rest(term->kids.begin() + 1, term->kids.end());
        if (rest.size() == 1) return {term->kids[0]->value, rest[0]};
        // rest factors are already canonical and sorted
        return {term->kids[0]->value,
                std::make_shared<Expr>(Kind::Product, Rational(0), "", std::move(rest),
                                       Rational(0))};
    }
    return {Rational(1), term};
}

inline ExprPtr sum(std::vector<ExprPtr> terms) {
    std::map<ExprPtr, Rational, ExprLess> acc;
    std::vector<ExprPtr> stack(terms.rbegin(), terms.rend());
    while (!stack.empty()) {
        ExprPtr t = stack.back();
        stack.pop_back();
        if (t->kind == Kind::Sum) {
            for (auto it = t->kids.rbegin(); it != t->kids.rend(); ++it)
                stack.push_back(*it);
            continue;
        }
        auto [c, m] = as_coeff_mono(t);
        if (c == 0) continue;
        acc[m] += c;
    }
    std::vector<ExprPtr> out;
    for (const auto& [m, c] : acc) {
        if (c == 0) continue;
        if (is_one_expr(m)) {
            out.push_back(constant(c));
        } else if (c == 1) {
            out.push_back(m);
        } else {
            out.push_back(product({constant(c), m}));
        }
    }
    if (out.empty()) return zero();
    if (out.size() == 1) return out[0];
    std::sort(out.begin(), out.end(), ExprLess{});
    return std::make_shared<Expr>(Kind::Sum, Rational(0), "", std::move(out), Rational(0));
}

inline ExprPtr product(std::vector<ExprPtr> factors) {
    Rational coeff(1);
    std::map<ExprPtr, Rational, ExprLess> exps;
    std::vector<ExprPtr> exp_args;  // exp(u)^k contributes k*u

    std::vector<ExprPtr> stack(factors.rbegin(), factors.rend());
    auto take = [&](const ExprPtr& base, const Rational& e) {
        if (base->kind == Kind::Call && base->name == "exp") {
            exp_args.push_back(e == 1 ? base->kids[0]
                                      : product({constant(e), base->kids[0]}));
        } else {
            exps[base] += e;
        }
    };
    while (!stack.empty()) {
        ExprPtr f = stack.back();
        stack.pop_back();
        switch (f->kind) {
            case Kind::Product:
                for (auto it = f->kids.rbegin(); it != f->kids.rend(); ++it)
                    stack.push_back(*it);
                break;
            case Kind::Constant:
                if (f->value == 0) return zero();
                coeff *= f->value;
                break;
            case Kind::Power:
                take(f->kids[0], f->exponent);
                break;
            default:
                take(f, Rational(1));
                break;
        }
    }
    if (!exp_args.empty()) {
        ExprPtr arg = sum(std::move(exp_args));
        ExprPtr e = call("exp", arg);
        if (!is_one_expr(e)) exps[e] += 1;
    }
    std::vector<ExprPtr> out;
    for (const auto& [b, e] : exps) {
        if (e == 0) continue;
        ExprPtr p = power(b, e);
        if (p->kind == Kind::Constant) {
            if (p->value == 0) return zero();
            coeff *= p->value;
        } else if (p->kind == Kind::Product) {
            // power distributed over a product; its parts are canonical
            for (const auto& k : p->kids) {
                if (k->kind == Kind::Constant)
                    coeff *= k->value;
                else
                    out.push_back(k);
            }
        } else {
            out.push_back(p);
        }
    }
    if (coeff == 0) return zero();
    if (out.empty()) return constant(coeff);
    std::sort(out.begin(), out.end(), ExprLess{});
    if (coeff == 1 && out.size() == 1) return out[0];
    // distribute a plain constant over a single sum
    if (out.size() == 1 && out[0]->kind == Kind::Sum) {
        std::vector<ExprPtr> terms;
        terms.reserve(out[0]->kids.size());
        for (const auto& t : out[0]->kids) terms.push_back(product({constant(coeff), t}));
        return sum(std::move(terms));
    }
    std::vector<ExprPtr> kids;
    if (coeff != 1) kids.push_back(constant(coeff));
    kids.insert(kids.end(), out.begin(), out.end());
    if (kids.size() == 1) return kids[0];
    return std::make_shared<Expr>(Kind::Product, Rational(0), "", std::move(kids),
                                  Rational(0));
}

inline ExprPtr power(const ExprPtr& base, const Rational& expo) {
    if (expo == 0) return one();
    if (expo == 1) return base;
    if (base->kind == Kind::Constant) {
        const Rational& v = base->value;
        if (v == 0) {
            if (expo > 0) return zero();
            // 0 to a negative power: keep the node, eval reports the error
        } else if (v == 1) {
            return one();
        } else if (is_integer(expo)) {
            return constant(pow_rational(v, rat_num(expo)));
        } else if (v > 0) {
            // try exact q-th roots of numerator and denominator
            Integer q = rat_den(expo);
            if (q <= 64) {
                auto rn = exact_nth_root(rat_num(v), (unsigned)q);
                auto rd = exact_nth_root(rat_den(v), (unsigned)q);
                if (rn && rd)
                    return constant(pow_rational(Rational(*rn, *rd), rat_num(expo)));
            }
        }
    }
    if (base->kind == Kind::Power && is_integer(expo)) {
        return power(base->kids[0], base->exponent * expo);
    }
    if (base->kind == Kind::Product && is_integer(expo)) {
        std::vector<ExprPtr> fs;
        fs.reserve(base->kids.size());
        for (const auto& f : base->kids) fs.push_back(power(f, expo));
        return product(std::move(fs));
    }
    return std::make_shared<Expr>(Kind::Power, Rational(0), "",
                                  std::vector<ExprPtr>{base}, expo);
}

inline ExprPtr call(const std::string& fn, const ExprPtr& arg) {
    if (fn == "sqrt") return power(arg, Rational(1, 2));
    if (fn != "sin" && fn != "cos" && fn != "tan" && fn != "arctan" && fn != "exp")
        throw UnsupportedCall(fn);
    if (is_zero_expr(arg)) {
        if (fn == "cos" || fn == "exp") return one();
        return zero();  // sin, tan, arctan
    }
    return std::make_shared<Expr>(Kind::Call, Rational(0), fn,
                                  std::vector<ExprPtr>{arg}, Rational(0));
}

// convenience combinators
inline ExprPtr add(const ExprPtr& a, const ExprPtr& b) { return sum({a, b}); }
inline ExprPtr sub(const ExprPtr& a, const ExprPtr& b) {
    return sum({a, product({constant(-1L), b})});
}
inline ExprPtr mul(const ExprPtr& a, const ExprPtr& b) { return product({a, b}); }
inline ExprPtr div(const ExprPtr& a, const ExprPtr& b) {
    return product({a, power(b, Rational(-1))});
}
inline ExprPtr neg(const ExprPtr& a) { return product({constant(-1L), a}); }

// ---------------------------------------------------------------------------
// inspection

inline void collect_symbols(const ExprPtr& e, std::set<std::string>& out) {
    if (e->kind == Kind::Symbol) out.insert(e->name);
    for (const auto& k : e->kids) collect_symbols(k, out);
}
inline std::set<std::string> free_symbols(const ExprPtr& e) {
    std::set<std::string> s;
    collect_symbols(e, s);
    return s;
}
inline bool contains_symbol(const ExprPtr& e, const std::string& name) {
    if (e->kind == Kind::Symbol) return e->name == name;
    for (const auto& k : e->kids)
        if (contains_symbol(k, name)) return true;
    return false;
}
inline size_t node_count(const ExprPtr& e) {
    size_t n = 1;
    for (const auto& k : e->kids) n += node_count(k);
    return n;
}

// ---------------------------------------------------------------------------
// substitution

/// Simultaneous substitution: a replacement is inserted as-is and never
/// re-scanned for further bindings.
using Bindings = std::map<std::string, ExprPtr>;

inline ExprPtr substitute(const ExprPtr& e, const Bindings& b) {
    switch (e->kind) {
        case Kind::Constant:
            return e;
        case Kind::Symbol: {
            auto it = b.find(e->name);
            return it == b.end() ? e : it->second;
        }
        case Kind::Sum: {
            std::vector<ExprPtr> ts;
            ts.reserve(e->kids.size());
            for (const auto& k : e->kids) ts.push_back(substitute(k, b));
            return sum(std::move(ts));
        }
        case Kind::Product: {
            std::vector<ExprPtr> fs;
            fs.reserve(e->kids.size());
            for (const auto& k : e->kids) fs.push_back(substitute(k, b));
            return product(std::move(fs));
        }
        case Kind::Power:
            return power(substitute(e->kids[0], b), e->exponent);
        case Kind::Call:
            return call(e->name, substitute(e->kids[0], b));
    }
    return e;
}

// ---------------------------------------------------------------------------
// differentiation

inline ExprPtr differentiate(const ExprPtr& e, const std::string& var) {
    switch (e->kind) {
        case Kind::Constant:
            return zero();
        case Kind::Symbol:
            return e->name == var ? one() : zero();
        case Kind::Sum: {
            std::vector<ExprPtr> ts;
            ts.reserve(e->kids.size());
            for (const auto& k : e->kids) ts.push_back(differentiate(k, var));
            return sum(std::move(ts));
        }
        case Kind::Product: {
            std::vector<ExprPtr> ts;
            for (size_t i = 0; i < e->kids.size(); ++i) {
                if (e->kids[i]->kind == Kind::Constant) continue;
                std::vector<ExprPtr> fs = e->kids;
                fs[i] = differentiate(e->kids[i], var);
                ts.push_back(product(std::move(fs)));
            }
            return sum(std::move(ts));
        }
        case Kind::Power: {
            const ExprPtr& b = e->kids[0];
            ExprPtr db = differentiate(b, var);
            if (is_zero_expr(db)) return zero();
            return product({constant(e->exponent), power(b, e->exponent - 1), db});
        }
        case Kind::Call: {
            const ExprPtr& u = e->kids[0];
            ExprPtr du = differentiate(u, var);
            if (is_zero_expr(du)) return zero();
            ExprPtr d;
            if (e->name == "sin") {
                d = call("cos", u);
            } else if (e->name == "cos") {
                d = neg(call("sin", u));
            } else if (e->name == "tan") {
                d = add(one(), power(call("tan", u), Rational(2)));
            } else if (e->name == "arctan") {
                d = power(add(one(), power(u, Rational(2))), Rational(-1));
            } else if (e->name == "exp") {
                d = e;
            } else {
                throw UnsupportedCall(e->name);
            }
            return product({d, du});
        }
    }
    return zero();
}

}  // namespace gfe
