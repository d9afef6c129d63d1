#pragma once

// Expansion and the fixed rewrite set used by simplify:
//   * integer powers of sums are expanded, products distribute over sums,
//   * cos(u)^n (n >= 2) is rewritten through 1 - sin(u)^2,
//   * sin(3u) -> (3 - 4 sin(u)^2) sin(u),
//   * sqrt(a^2) -> a only under an explicit positivity assumption.
// No general trig normalization is attempted.

#include <gfe/expr.hpp>

namespace gfe {

/// Sign declarations for symbols; required for radical extraction.
class Assumptions {
  public:
    Assumptions& declare_positive(const std::string& name) {
        positive_.insert(name);
        return *this;
    }
    bool is_positive(const ExprPtr& e) const {
        switch (e->kind) {
            case Kind::Constant:
                return e->value > 0;
            case Kind::Symbol:
                return positive_.count(e->name) > 0;
            case Kind::Product: {
                for (const auto& k : e->kids)
                    if (!is_positive(k)) return false;
                return true;
            }
            case Kind::Power:
                return is_positive(e->kids[0]);
            case Kind::Call:
                return e->name == "exp";
            case Kind::Sum: {
                for (const auto& k : e->kids)
                    if (!is_positive(k)) return false;
                return true;
            }
        }
        return false;
    }

  private:
    std::set<std::string> positive_;
};

// ---------------------------------------------------------------------------
// expansion

inline ExprPtr expand(const ExprPtr& e);

namespace detail {

/// Distributes a product over its sum factors; all inputs already expanded.
inline ExprPtr distribute(std::vector<ExprPtr> factors) {
    std::vector<ExprPtr> plain;
    std::vector<ExprPtr> sums;
    for (auto& f : factors) {
        if (f->kind == Kind::Sum)
            sums.push_back(f);
        else
            plain.push_back(f);
    }
    if (sums.empty()) return product(std::move(plain));
    std::vector<ExprPtr> acc{product(std::move(plain))};
    for (const auto& s : sums) {
        std::vector<ExprPtr> next;
        next.reserve(acc.size() * s->kids.size());
        for (const auto& a : acc)
            for (const auto& t : s->kids) next.push_back(product({a, t}));
        acc = std::move(next);
    }
    return sum(std::move(acc));
}

inline ExprPtr expand_power(const ExprPtr& base, const Rational& expo) {
    if (base->kind == Kind::Sum && is_integer(expo) && expo > 1 && expo < 64) {
        long n = (long)rat_num(expo);
        ExprPtr acc = base;
        for (long i = 1; i < n; ++i) {
            std::vector<ExprPtr> terms;
            const auto& ts = acc->kind == Kind::Sum ? acc->kids : std::vector<ExprPtr>{acc};
            for (const auto& t : ts)
                for (const auto& u :
                     base->kind == Kind::Sum ? base->kids : std::vector<ExprPtr>{base})
                    terms.push_back(product({t, u}));
            acc = sum(std::move(terms));
        }
        return acc;
    }
    return power(base, expo);
}

}  // namespace detail

inline ExprPtr expand(const ExprPtr& e) {
    switch (e->kind) {
        case Kind::Constant:
        case Kind::Symbol:
            return e;
        case Kind::Call:
            return call(e->name, expand(e->kids[0]));
        case Kind::Power:
            return detail::expand_power(expand(e->kids[0]), e->exponent);
        case Kind::Product: {
            std::vector<ExprPtr> fs;
            fs.reserve(e->kids.size());
            for (const auto& k : e->kids) fs.push_back(expand(k));
            // re-canonicalize first (merges exponents), then distribute
            ExprPtr p = product(std::move(fs));
            if (p->kind != Kind::Product) return p;
            std::vector<ExprPtr> parts;
            bool has_sum = false;
            for (const auto& k : p->kids) {
                ExprPtr f = k;
                if (f->kind == Kind::Power)
                    f = detail::expand_power(f->kids[0], f->exponent);
                if (f->kind == Kind::Sum) has_sum = true;
                parts.push_back(f);
            }
            if (!has_sum) return p;
            return detail::distribute(std::move(parts));
        }
        case Kind::Sum: {
            std::vector<ExprPtr> ts;
            ts.reserve(e->kids.size());
            for (const auto& k : e->kids) ts.push_back(expand(k));
            return sum(std::move(ts));
        }
    }
    return e;
}

// ---------------------------------------------------------------------------
// rewrite pass

namespace detail {

inline ExprPtr rewrite(const ExprPtr& e, const Assumptions* asmp) {
    switch (e->kind) {
        case Kind::Constant:
        case Kind::Symbol:
            return e;
        case Kind::Call: {
            ExprPtr u = rewrite(e->kids[0], asmp);
            if (e->name == "sin") {
                // sin(3u) -> (3 - 4 sin(u)^2) sin(u)
                auto [c, m] = as_coeff_mono(u);
                if (c != 0 && rat_num(c) % 3 == 0 && !is_one_expr(m)) {
                    ExprPtr third = product({constant(c / 3), m});
                    ExprPtr s = call("sin", third);
                    return product(
                        {sum({constant(3L), product({constant(-4L), power(s, Rational(2))})}),
                         s});
                }
            }
            return call(e->name, u);
        }
        case Kind::Power: {
            ExprPtr b = rewrite(e->kids[0], asmp);
            const Rational& ex = e->exponent;
            if (b->kind == Kind::Call && b->name == "cos" && is_integer(ex) && ex >= 2) {
                Integer n = rat_num(ex);
                ExprPtr s2 = sum({one(), product({constant(-1L),
                                                  power(call("sin", b->kids[0]),
                                                        Rational(2))})});
                ExprPtr evenpart = power(s2, Rational(n / 2));
                if (n % 2 == 0) return evenpart;
                return product({b, evenpart});
            }
            if (asmp && !is_integer(ex)) {
                // sqrt(a^2) -> a (and friends) when a is declared positive
                if (b->kind == Kind::Power && is_integer(b->exponent * ex) &&
                    asmp->is_positive(b->kids[0])) {
                    return power(b->kids[0], b->exponent * ex);
                }
                if (b->kind == Kind::Product) {
                    std::vector<ExprPtr> outside, inside;
                    for (const auto& f : b->kids) {
                        ExprPtr fb = f;
                        Rational fe(1);
                        if (f->kind == Kind::Power) {
                            fb = f->kids[0];
                            fe = f->exponent;
                        }
                        if (is_integer(fe * ex) && asmp->is_positive(fb))
                            outside.push_back(power(fb, fe * ex));
                        else
                            inside.push_back(f);
                    }
                    if (!outside.empty()) {
                        outside.push_back(power(product(std::move(inside)), ex));
                        return product(std::move(outside));
                    }
                }
            }
            return power(b, ex);
        }
        case Kind::Product: {
            std::vector<ExprPtr> fs;
            fs.reserve(e->kids.size());
            for (const auto& k : e->kids) fs.push_back(rewrite(k, asmp));
            return product(std::move(fs));
        }
        case Kind::Sum: {
            std::vector<ExprPtr> ts;
            ts.reserve(e->kids.size());
            for (const auto& k : e->kids) ts.push_back(rewrite(k, asmp));
            return sum(std::move(ts));
        }
    }
    return e;
}

}  // namespace detail

/// Canonical normal form: expansion + the fixed rewrite set, to a fixpoint.
inline ExprPtr simplify_with(const ExprPtr& e, const Assumptions& asmp) {
    ExprPtr s = e;
    for (int i = 0; i < 12; ++i) {
        ExprPtr n = detail::rewrite(expand(s), &asmp);
        if (equal(n, s)) break;
        s = n;
    }
    return s;
}

inline ExprPtr simplify(const ExprPtr& e) {
    ExprPtr s = e;
    for (int i = 0; i < 12; ++i) {
        ExprPtr n = detail::rewrite(expand(s), nullptr);
        if (equal(n, s)) break;
        s = n;
    }
    return s;
}

// ---------------------------------------------------------------------------
// denominator / radical clearing (used by symbolic zero detection)

/// Multiplies e by positive powers of every base that occurs with a negative
/// or fractional exponent, so that cancellations hidden behind a common
/// denominator or a shared radical become visible to expand(). The result is
/// zero as a function (a.e.) iff e is.
inline ExprPtr clear_denominators(const ExprPtr& e) {
    std::map<ExprPtr, Rational, ExprLess> min_exp;
    auto scan_factor = [&](const ExprPtr& f) {
        ExprPtr b = f;
        Rational ex(1);
        if (f->kind == Kind::Power) {
            b = f->kids[0];
            ex = f->exponent;
        }
        if (ex < 0 || !is_integer(ex)) {
            auto it = min_exp.find(b);
            if (it == min_exp.end())
                min_exp.emplace(b, ex);
            else if (ex < it->second)
                it->second = ex;
        }
    };
    auto scan_term = [&](const ExprPtr& t) {
        if (t->kind == Kind::Product)
            for (const auto& f : t->kids) scan_factor(f);
        else
            scan_factor(t);
    };
    if (e->kind == Kind::Sum)
        for (const auto& t : e->kids) scan_term(t);
    else
        scan_term(e);
    if (min_exp.empty()) return e;
    // multiplying by b^(-min) sends the lowest exponent of b to 0 and keeps
    // every other occurrence at a nonnegative offset; doing it term by term
    // lets the product constructor merge exponents before anything expands
    std::vector<ExprPtr> lift;
    for (const auto& [b, ex] : min_exp) lift.push_back(power(b, -ex));
    auto lift_term = [&](const ExprPtr& t) {
        std::vector<ExprPtr> fs{t};
        fs.insert(fs.end(), lift.begin(), lift.end());
        return product(std::move(fs));
    };
    if (e->kind != Kind::Sum) return lift_term(e);
    std::vector<ExprPtr> ts;
    ts.reserve(e->kids.size());
    for (const auto& t : e->kids) ts.push_back(lift_term(t));
    return sum(std::move(ts));
}

}  // namespace gfe
