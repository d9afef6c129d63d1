#pragma once

// Pratt parser and renderer for the expression grammar (docs/grammar.ebnf).
// Infix with explicit '*', right-associative '^' whose exponent must reduce
// to a rational constant, function-call syntax, no implicit multiplication.
// render() emits the same grammar; parse(render(e)) is structurally equal to
// e for canonical expressions.

#include <gfe/expr.hpp>

#include <cctype>
#include <sstream>
#include <string>
#include <vector>

namespace gfe {

struct ParseError : std::runtime_error {
    size_t offset;
    std::vector<std::string> expected;
    ParseError(size_t off, const std::string& msg, std::vector<std::string> exp = {})
        : std::runtime_error("parse error at byte " + std::to_string(off) + ": " + msg),
          offset(off), expected(std::move(exp)) {}
};

struct UnknownFunctionError : ParseError {
    UnknownFunctionError(size_t off, const std::string& fn)
        : ParseError(off, "unknown function '" + fn + "'") {}
};

namespace detail {

struct Token {
    enum Type { Number, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, End };
    Type type;
    size_t offset;
    std::string text;
    Rational number;
};

class Lexer {
  public:
    explicit Lexer(const std::string& s) : s_(s) { advance(); }
    const Token& peek() const { return tok_; }
    Token next() {
        Token t = tok_;
        advance();
        return t;
    }

  private:
    void advance() {
        while (pos_ < s_.size() && std::isspace((unsigned char)s_[pos_])) ++pos_;
        tok_.offset = pos_;
        if (pos_ >= s_.size()) {
            tok_.type = Token::End;
            tok_.text = "<end>";
            return;
        }
        char c = s_[pos_];
        auto single = [&](Token::Type t) {
            tok_.type = t;
            tok_.text = std::string(1, c);
            ++pos_;
        };
        switch (c) {
            case '+': single(Token::Plus); return;
            case '-': single(Token::Minus); return;
            case '*': single(Token::Star); return;
            case '/': single(Token::Slash); return;
            case '^': single(Token::Caret); return;
            case '(': single(Token::LParen); return;
            case ')': single(Token::RParen); return;
            default: break;
        }
        if (std::isdigit((unsigned char)c)) {
            lex_number();
            return;
        }
        if (std::isalpha((unsigned char)c) || c == '_') {
            size_t start = pos_;
            while (pos_ < s_.size() &&
                   (std::isalnum((unsigned char)s_[pos_]) || s_[pos_] == '_'))
                ++pos_;
            tok_.type = Token::Ident;
            tok_.text = s_.substr(start, pos_ - start);
            return;
        }
        throw ParseError(pos_, std::string("unexpected character '") + c + "'");
    }

    void lex_number() {
        size_t start = pos_;
        Integer intpart = 0;
        while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) {
            intpart = intpart * 10 + (s_[pos_] - '0');
            ++pos_;
        }
        Rational v(intpart);
        if (pos_ < s_.size() && s_[pos_] == '.') {
            ++pos_;
            Integer frac = 0, scale = 1;
            if (pos_ >= s_.size() || !std::isdigit((unsigned char)s_[pos_]))
                throw ParseError(pos_, "digit expected after decimal point", {"digit"});
            while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) {
                frac = frac * 10 + (s_[pos_] - '0');
                scale *= 10;
                ++pos_;
            }
            v += Rational(frac, scale);
        }
        if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
            size_t save = pos_;
            ++pos_;
            bool negexp = false;
            if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) {
                negexp = s_[pos_] == '-';
                ++pos_;
            }
            if (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) {
                long ex = 0;
                while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) {
                    ex = ex * 10 + (s_[pos_] - '0');
                    ++pos_;
                }
                Rational p = pow_rational(Rational(10), Integer(ex));
                if (negexp)
                    v /= p;
                else
                    v *= p;
            } else {
                pos_ = save;  // 'e' belongs to a following identifier; not ours
            }
        }
        tok_.type = Token::Number;
        tok_.text = s_.substr(start, pos_ - start);
        tok_.number = v;
    }

    const std::string& s_;
    size_t pos_ = 0;
    Token tok_;
};

class Parser {
  public:
    explicit Parser(const std::string& s) : lex_(s) {}

    ExprPtr parse_toplevel() {
        ExprPtr e = parse_expr(0);
        const Token& t = lex_.peek();
        if (t.type != Token::End)
            throw ParseError(t.offset, "unexpected '" + t.text + "'",
                             {"operator", "end of input"});
        return e;
    }

  private:
    static int lbp(Token::Type t) {
        switch (t) {
            case Token::Plus:
            case Token::Minus: return 10;
            case Token::Star:
            case Token::Slash: return 20;
            case Token::Caret: return 30;
            default: return 0;
        }
    }

    ExprPtr parse_expr(int min_bp) {
        ExprPtr left = parse_prefix();
        while (true) {
            Token::Type t = lex_.peek().type;
            int bp = lbp(t);
            if (bp <= min_bp) break;
            Token op = lex_.next();
            if (t == Token::Caret) {
                ExprPtr rhs = parse_expr(bp - 1);  // right-associative
                if (rhs->kind != Kind::Constant)
                    throw ParseError(op.offset, "exponent must be a rational constant",
                                     {"rational constant"});
                left = power(left, rhs->value);
            } else {
                ExprPtr rhs = parse_expr(bp);
                switch (t) {
                    case Token::Plus: left = add(left, rhs); break;
                    case Token::Minus: left = sub(left, rhs); break;
                    case Token::Star: left = mul(left, rhs); break;
                    case Token::Slash: left = div(left, rhs); break;
                    default: break;
                }
            }
        }
        return left;
    }

    ExprPtr parse_prefix() {
        Token t = lex_.next();
        switch (t.type) {
            case Token::Number:
                return constant(t.number);
            case Token::Minus:
                return neg(parse_expr(25));
            case Token::LParen: {
                ExprPtr e = parse_expr(0);
                expect(Token::RParen, ")");
                return e;
            }
            case Token::Ident: {
                if (lex_.peek().type == Token::LParen) {
                    std::string fn = t.text == "atan" ? "arctan" : t.text;
                    if (fn != "sin" && fn != "cos" && fn != "tan" && fn != "arctan" &&
                        fn != "sqrt" && fn != "exp")
                        throw UnknownFunctionError(t.offset, t.text);
                    lex_.next();
                    ExprPtr arg = parse_expr(0);
                    expect(Token::RParen, ")");
                    return call(fn, arg);
                }
                return symbol(t.text);
            }
            default:
                throw ParseError(t.offset, "unexpected '" + t.text + "'",
                                 {"number", "identifier", "(", "-"});
        }
    }

    void expect(Token::Type ty, const std::string& what) {
        const Token& t = lex_.peek();
        if (t.type != ty)
            throw ParseError(t.offset, "expected '" + what + "', got '" + t.text + "'",
                             {what});
        lex_.next();
    }

    Lexer lex_;
};

}  // namespace detail

inline ExprPtr parse(const std::string& text) {
    return detail::Parser(text).parse_toplevel();
}

// ---------------------------------------------------------------------------
// rendering

namespace detail {

// precedence levels used for parenthesization
constexpr int PREC_SUM = 1, PREC_PROD = 2, PREC_POW = 4, PREC_ATOM = 5;

inline void render_rec(const ExprPtr& e, int parent, std::ostream& os);

inline void paren(bool need, const ExprPtr& e, int prec, std::ostream& os) {
    if (need) os << '(';
    render_rec(e, need ? 0 : prec, os);
    if (need) os << ')';
}

inline void render_rec(const ExprPtr& e, int parent, std::ostream& os) {
    switch (e->kind) {
        case Kind::Constant: {
            const Rational& v = e->value;
            int prec = v < 0 ? PREC_SUM : (is_integer(v) ? PREC_ATOM : PREC_PROD);
            bool need = parent > prec;
            if (need) os << '(';
            if (v < 0) os << '-';
            Rational a = v < 0 ? Rational(-v) : v;
            os << rat_num(a).str();
            if (!is_integer(a)) os << '/' << rat_den(a).str();
            if (need) os << ')';
            return;
        }
        case Kind::Symbol:
            os << e->name;
            return;
        case Kind::Call:
            os << e->name << '(';
            render_rec(e->kids[0], 0, os);
            os << ')';
            return;
        case Kind::Power: {
            if (e->exponent == Rational(1, 2)) {
                os << "sqrt(";
                render_rec(e->kids[0], 0, os);
                os << ')';
                return;
            }
            bool need = parent > PREC_POW;
            if (need) os << '(';
            const ExprPtr& b = e->kids[0];
            bool base_paren = !(b->kind == Kind::Symbol || b->kind == Kind::Call ||
                                (b->kind == Kind::Constant && is_integer(b->value) &&
                                 b->value >= 0));
            paren(base_paren, b, PREC_ATOM, os);
            os << '^';
            if (is_integer(e->exponent) && e->exponent >= 0) {
                os << rat_num(e->exponent).str();
            } else {
                os << '(';
                render_rec(constant(e->exponent), 0, os);
                os << ')';
            }
            if (need) os << ')';
            return;
        }
        case Kind::Product: {
            auto [c, m] = as_coeff_mono(e);
            bool negc = c < 0;
            bool need = parent > (negc ? PREC_SUM : PREC_PROD);
            if (need) os << '(';
            if (negc) os << '-';
            Rational a = negc ? Rational(-c) : c;
            bool first = true;
            if (a != 1) {
                render_rec(constant(a), PREC_PROD + 1, os);
                first = false;
            }
            std::vector<ExprPtr> fs =
                m->kind == Kind::Product ? m->kids : std::vector<ExprPtr>{m};
            for (const auto& f : fs) {
                if (!first) os << '*';
                first = false;
                render_rec(f, PREC_PROD + 1, os);
            }
            if (need) os << ')';
            return;
        }
        case Kind::Sum: {
            bool need = parent > PREC_SUM;
            if (need) os << '(';
            bool first = true;
            for (const auto& t : e->kids) {
                auto [c, m] = as_coeff_mono(t);
                if (!first) os << (c < 0 ? " - " : " + ");
                if (first && c < 0) os << '-';
                Rational a = c < 0 ? Rational(-c) : c;
                ExprPtr tt = a == 1 && !is_one_expr(m) ? m
                             : is_one_expr(m)          ? constant(a)
                                                       : product({constant(a), m});
                render_rec(tt, PREC_SUM + 1, os);
                first = false;
            }
            if (need) os << ')';
            return;
        }
    }
}

}  // namespace detail

inline std::string render(const ExprPtr& e) {
    std::ostringstream os;
    detail::render_rec(e, 0, os);
    return os.str();
}

}  // namespace gfe
