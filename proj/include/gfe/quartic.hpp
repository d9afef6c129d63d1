#pragma once

// The algebraic reduction behind the harmonic example: the invariant
// lambda as a function of S = sin(theta),
//
//     lambda(S) = beta S (8 S^2 - 3) sqrt(1 - S^2) / (4 S^2 - 3)^2,
//
// the degree-8 polynomial in R that S satisfies at a given lambda (a quartic
// in Rt = R^2), a deterministic polynomial root solver, bracketed inversion
// of lambda(S) on its monotone core, and the published closed-form root
// Rt*(lambda) with helpers q1, q2 — evaluated verbatim and cross-checked
// against the numeric roots rather than assumed correct.

#include <gfe/eval.hpp>

#include <array>
#include <optional>
#include <vector>

namespace gfe {

struct QuarticDomainError : std::runtime_error {
    std::string helper;  // which radical failed: "q1", "q2", or "inner"
    QuarticDomainError(std::string h, const std::string& msg)
        : std::runtime_error("closed-form root domain error in " + h + ": " + msg),
          helper(std::move(h)) {}
};

struct LambdaRangeError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// lambda(S) on |S| < 1/2 (where 4S^2 - 3 < 0 and the square root is real).
inline Real50 lambda_curve(const Real50& S, const Real50& beta) {
    Real50 S2 = S * S;
    Real50 den = 4 * S2 - 3;
    return beta * S * (8 * S2 - 3) * sqrt(1 - S2) / (den * den);
}

struct QuarticProblem {
    Real50 beta;
    Real50 lambda;
    // coefficients of c[0] Rt^4 + c[1] Rt^3 + c[2] Rt^2 + c[3] Rt + c[4],
    // equivalently of the degree-8 polynomial in R with Rt = R^2
    std::array<Real50, 5> coeffs;
    std::optional<Real50> q1, q2;  // closed-form helpers, when real
};

inline QuarticProblem quartic_coefficients(const Real50& lambda, const Real50& beta) {
    if (beta == 0)
        throw LambdaRangeError("the algebraic reduction requires beta != 0");
    Real50 b2 = beta * beta, l2 = lambda * lambda;
    QuarticProblem qp;
    qp.beta = beta;
    qp.lambda = lambda;
    qp.coeffs = {64 * (b2 + 4 * l2), -(112 * b2 + 768 * l2), 57 * b2 + 864 * l2,
                 -9 * (b2 + 48 * l2), 81 * l2};
    return qp;
}

// ---------------------------------------------------------------------------
// deterministic root finding (Durand-Kerner over 50-digit complexes)

namespace detail {

struct Cplx {
    Real50 re{0}, im{0};
    Cplx operator+(const Cplx& o) const { return {re + o.re, im + o.im}; }
    Cplx operator-(const Cplx& o) const { return {re - o.re, im - o.im}; }
    Cplx operator*(const Cplx& o) const {
        return {re * o.re - im * o.im, re * o.im + im * o.re};
    }
    Cplx operator/(const Cplx& o) const {
        Real50 d = o.re * o.re + o.im * o.im;
        return {(re * o.re + im * o.im) / d, (im * o.re - re * o.im) / d};
    }
};

inline Real50 cabs(const Cplx& z) { return sqrt(z.re * z.re + z.im * z.im); }

inline std::vector<Cplx> durand_kerner(const std::vector<Real50>& coeffs) {
    size_t n = coeffs.size() - 1;  // degree
    std::vector<Cplx> monic(n);
    for (size_t i = 0; i < n; ++i)
        monic[i] = Cplx{coeffs[i + 1] / coeffs[0], Real50(0)};
    auto p = [&](const Cplx& z) {
        Cplx acc{Real50(1), Real50(0)};
        for (size_t i = 0; i < n; ++i) acc = acc * z + monic[i];
        return acc;
    };
    std::vector<Cplx> r(n);
    Cplx seed{Real50("0.4"), Real50("0.9")}, cur{Real50(1), Real50(0)};
    for (size_t i = 0; i < n; ++i) {
        cur = cur * seed;
        r[i] = cur;
    }
    for (int iter = 0; iter < 500; ++iter) {
        Real50 worst(0);
        for (size_t i = 0; i < n; ++i) {
            Cplx denom{Real50(1), Real50(0)};
            for (size_t j = 0; j < n; ++j)
                if (j != i) denom = denom * (r[i] - r[j]);
            Cplx delta = p(r[i]) / denom;
            r[i] = r[i] - delta;
            Real50 d = cabs(delta);
            if (d > worst) worst = d;
        }
        if (worst < Real50("1e-45")) break;
    }
    return r;
}

}  // namespace detail

/// All real roots of the quartic in Rt (imaginary part below 1e-30).
inline std::vector<Real50> quartic_real_roots(const QuarticProblem& qp) {
    std::vector<Real50> cs(qp.coeffs.begin(), qp.coeffs.end());
    std::vector<Real50> out;
    for (const auto& z : detail::durand_kerner(cs))
        if (abs(z.im) < Real50("1e-30")) out.push_back(z.re);
    std::sort(out.begin(), out.end());
    return out;
}

// ---------------------------------------------------------------------------
// inverting lambda(S)

/// Critical point of lambda(S) on (0, 1/2): lambda is NOT monotone on the
/// full interval; it turns around at S* ~ 0.4413 (beta-independent). The
/// inversion below is restricted to the monotone core [-S*, S*].
inline Real50 lambda_curve_critical_point() {
    // sign change of the centered-difference derivative of lambda at beta=1
    Real50 lo("0.3"), hi("0.4999"), step("1e-30");
    auto dphi = [&](const Real50& s) {
        Real50 d("1e-25");
        return (lambda_curve(s + d, Real50(1)) - lambda_curve(s - d, Real50(1))) /
               (2 * d);
    };
    for (int i = 0; i < 200 && hi - lo > step; ++i) {
        Real50 mid = (lo + hi) / 2;
        if (dphi(mid) < 0)
            lo = mid;
        else
            hi = mid;
    }
    return (lo + hi) / 2;
}

/// Bracketed inversion of lambda(S) on the monotone core, |d lambda| <= 1e-12.
inline Real50 solve_S_for_lambda(const Real50& lambda, const Real50& beta) {
    if (beta == 0) throw LambdaRangeError("beta must be nonzero");
    static const Real50 Sstar = lambda_curve_critical_point();
    Real50 lo = -Sstar, hi = Sstar;
    Real50 flo = lambda_curve(lo, beta), fhi = lambda_curve(hi, beta);
    if (flo > fhi) {
        std::swap(lo, hi);
        std::swap(flo, fhi);
    }
    if (lambda < flo || lambda > fhi)
        throw LambdaRangeError(
            "lambda outside the image of the monotone core of lambda(S)");
    for (int i = 0; i < 300; ++i) {
        Real50 mid = (lo + hi) / 2;
        Real50 f = lambda_curve(mid, beta);
        if (abs(f - lambda) <= Real50("1e-13")) return mid;
        if (f < lambda)
            lo = mid;
        else
            hi = mid;
    }
    return (lo + hi) / 2;
}

// ---------------------------------------------------------------------------
// the published closed-form root

struct ClosedFormRoot {
    Real50 value;
    Real50 q1, q2;
    bool matches_numeric_root;  // within 1e-8 of some real quartic root
    Real50 nearest_root_distance;
};

/// Evaluates the published closed-form expression for one root Rt* of the
/// quartic, verbatim, in 50-digit precision; requires beta > 0 (sqrt(beta)
/// appears) and real radicals. The result is cross-checked against the
/// numeric roots and the agreement reported, not assumed.
inline ClosedFormRoot closed_form_root(const Real50& lambda, const Real50& beta) {
    if (beta <= 0)
        throw QuarticDomainError("sqrt(beta)", "beta > 0 required");
    const Real50 b = beta, l = lambda;
    Real50 b2 = b * b, l2 = l * l;

    Real50 rad2 = 9216 * l2 * l2 + 9204 * b2 * l2 - 125 * b2 * b2;
    if (rad2 < 0)
        throw QuarticDomainError(
            "q2", "radicand 9216 l^4 + 9204 b^2 l^2 - 125 b^4 is negative");
    Real50 q2 = 14688 * b * l2 - 125 * b2 * b + 144 * l * sqrt(rad2);
    if (q2 < 0)
        throw QuarticDomainError("q2", "q2 is negative; its fractional powers are complex");

    Real50 q2_13 = pow(q2, Real50(1) / 3), q2_23 = q2_13 * q2_13;
    Real50 q1 = b2 * q2_23 + 11 * b2 * b * q2_13 + 25 * b2 * b2 - 2304 * l2 * l2 +
                (4 * q2_23 - 56 * b * q2_13 - 476 * b2) * l2;
    if (q1 < 0)
        throw QuarticDomainError("q1", "q1 is negative; its fractional powers are complex");

    Real50 sb = sqrt(b);
    Real50 inner =
        ((22 * b2 - 112 * l2) * b * q2_13 - (b2 + 4 * l2) * q2_23 + 476 * b2 * l2 -
         25 * b2 * b2 + 2304 * l2 * l2) *
            sqrt(q1) +
        1152 * (sb * l2 * l2 + 59 * pow(b, Real50(5) / 2) * l2 / 48 +
                pow(b, Real50(9) / 2) / 36) *
            sqrt(q2);
    if (inner < 0)
        throw QuarticDomainError("inner", "the innermost radicand is negative");

    Real50 q1_14 = pow(q1, Real50(1) / 4);
    Real50 q2_16 = pow(q2, Real50(1) / 6);
    Real50 value = (sb * q1_14 * q1_14 * q1_14 + (7 * b2 + 48 * l2) * q1_14 * q2_16 +
                    sb * sqrt(inner)) /
                   (q2_16 * q1_14 * (16 * b2 + 64 * l2));

    ClosedFormRoot out;
    out.value = value;
    out.q1 = q1;
    out.q2 = q2;
    out.nearest_root_distance = Real50("1e300");
    for (const Real50& r : quartic_real_roots(quartic_coefficients(lambda, beta))) {
        Real50 d = abs(r - value);
        if (d < out.nearest_root_distance) out.nearest_root_distance = d;
    }
    out.matches_numeric_root = out.nearest_root_distance < Real50("1e-8");
    return out;
}

}  // namespace gfe
