#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <optional>
#include <string>

namespace gfe {

using Integer = boost::multiprecision::cpp_int;
using Rational = boost::multiprecision::cpp_rational;

inline Integer rat_num(const Rational& r) { return numerator(r); }
inline Integer rat_den(const Rational& r) { return denominator(r); }

inline bool is_integer(const Rational& r) { return rat_den(r) == 1; }

/// b^e for integer e (e may be negative; b must be nonzero then).
inline Rational pow_rational(const Rational& b, const Integer& e) {
    if (e == 0) return Rational(1);
    Integer n = abs(e);
    Rational base = e > 0 ? b : Rational(1) / b;
    Rational acc(1);
    while (n > 0) {
        if ((n & 1) != 0) acc *= base;
        base *= base;
        n >>= 1;
    }
    return acc;
}

/// Exact n-th root of a nonnegative integer, if it exists.
inline std::optional<Integer> exact_nth_root(const Integer& v, unsigned n) {
    if (v < 0) return std::nullopt;
    if (v == 0 || v == 1 || n == 1) return v;
    // initial guess via doubles, then fix up
    Integer r = Integer(1) << (unsigned)((msb(v) / n) + 1);
    // Newton iteration on r^n = v
    while (true) {
        Integer rp = pow(r, n - 1);
        Integer next = ((n - 1) * r * rp + v) / (n * rp);
        if (next >= r) break;
        r = next;
    }
    if (pow(r, n) == v) return r;
    return std::nullopt;
}

inline std::string to_string(const Rational& r) {
    if (is_integer(r)) return rat_num(r).str();
    return rat_num(r).str() + "/" + rat_den(r).str();
}

}  // namespace gfe
