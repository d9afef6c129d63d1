#pragma once

// Zero testing for expressions. Symbolic proof uses the canonical normal
// form, retrying after clearing denominators and shared radicals. The
// probabilistic fallback evaluates at seeded pseudo-random points in 50-digit
// precision and compares against a scale-aware tolerance.
//
// Determinism: every point i draws from its own mt19937_64 seeded with
// seed + i * 0x9E3779B97F4A7C15, so results do not depend on evaluation
// order; symbols are sampled in lexicographic order within a point.

#include <gfe/eval.hpp>
#include <gfe/simplify.hpp>

#include <cstdint>
#include <map>
#include <random>
#include <string>

namespace gfe {

enum class Verdict { ProvedZero, ProbablyZero, NonZero, SamplingError };

inline const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::ProvedZero: return "proved-zero";
        case Verdict::ProbablyZero: return "probably-zero";
        case Verdict::NonZero: return "nonzero";
        case Verdict::SamplingError: return "sampling-error";
    }
    return "?";
}

struct Box {
    double lo;
    double hi;
};
using BoxMap = std::map<std::string, Box>;

struct ZeroOptions {
    int points = 64;
    double tol = 1e-25;
    std::uint64_t seed = 123456789;  // default documented seed
};

struct ZeroResult {
    Verdict verdict;
    std::string detail;
    std::map<std::string, double> witness;  // populated for NonZero
    double witness_value = 0;                // |residual| at the witness
    double max_scaled_residual = 0;          // max |residual| / (1 + magnitude)
    int points_evaluated = 0;
    int domain_errors = 0;
};

// ---------------------------------------------------------------------------
// symbolic route

inline bool proves_zero(const ExprPtr& e, const Assumptions* asmp = nullptr) {
    ExprPtr s = asmp ? simplify_with(e, *asmp) : simplify(e);
    if (is_zero_expr(s)) return true;
    for (int round = 0; round < 4; ++round) {
        ExprPtr cleared = clear_denominators(s);
        ExprPtr n = asmp ? simplify_with(cleared, *asmp) : simplify(cleared);
        if (is_zero_expr(n)) return true;
        if (equal(n, s)) break;
        s = n;
    }
    return false;
}

// ---------------------------------------------------------------------------
// numeric route

namespace detail {

constexpr std::uint64_t kPointSeedStride = 0x9E3779B97F4A7C15ULL;

inline double unit_uniform(std::mt19937_64& g) {
    return (double)(g() >> 11) * 0x1.0p-53;
}

/// Log-uniform within a sign-definite box, uniform when the box straddles 0.
inline double sample_box(const Box& b, std::mt19937_64& g) {
    double u = unit_uniform(g);
    if (b.lo > 0) {
        double llo = std::log(b.lo), lhi = std::log(b.hi);
        return std::exp(llo + u * (lhi - llo));
    }
    if (b.hi < 0) {
        double llo = std::log(-b.hi), lhi = std::log(-b.lo);
        return -std::exp(llo + u * (lhi - llo));
    }
    return b.lo + u * (b.hi - b.lo);
}

}  // namespace detail

inline ZeroResult equals_zero_numeric(const ExprPtr& e, const BoxMap& boxes = {},
                                      const ZeroOptions& opts = {}) {
    ZeroResult res;
    res.verdict = Verdict::ProbablyZero;

    std::set<std::string> syms = free_symbols(e);
    syms.erase("pi");

    std::string first_error;
    for (int i = 0; i < opts.points; ++i) {
        std::mt19937_64 gen(opts.seed + (std::uint64_t)i * detail::kPointSeedStride);
        std::map<std::string, double> pt;
        std::map<std::string, Real50> env;
        for (const auto& s : syms) {  // std::set: lexicographic, order-stable
            auto it = boxes.find(s);
            Box b = it != boxes.end() ? it->second : Box{0.5, 2.0};
            double v = detail::sample_box(b, gen);
            pt[s] = v;
            env[s] = Real50(v);
        }
        Real50 value, magnitude;
        try {
            value = eval(e, env);
            magnitude = eval_magnitude(e, env);
        } catch (const DomainError& de) {
            ++res.domain_errors;
            if (first_error.empty()) first_error = de.what();
            continue;
        }
        ++res.points_evaluated;
        Real50 resid = abs(value);
        Real50 scale = 1 + magnitude;
        double scaled = (resid / scale).convert_to<double>();
        if (scaled > res.max_scaled_residual) res.max_scaled_residual = scaled;
        if (resid > Real50(opts.tol) * scale) {
            res.verdict = Verdict::NonZero;
            res.witness = pt;
            res.witness_value = resid.convert_to<double>();
            res.detail = "residual " + std::to_string(res.witness_value) +
                         " exceeds tolerance at a sampled point";
            return res;
        }
    }
    if (res.points_evaluated == 0) {
        res.verdict = Verdict::SamplingError;
        res.detail = "every sampled point hit a domain error: " + first_error;
        return res;
    }
    res.detail = "max scaled residual " + std::to_string(res.max_scaled_residual) +
                 " over " + std::to_string(res.points_evaluated) + " points";
    return res;
}

/// Symbolic proof first; numeric sampling as fallback.
inline ZeroResult equals_zero(const ExprPtr& e, const BoxMap& boxes = {},
                              const ZeroOptions& opts = {},
                              const Assumptions* asmp = nullptr) {
    if (proves_zero(e, asmp)) {
        ZeroResult r;
        r.verdict = Verdict::ProvedZero;
        r.detail = "normal form is identically zero";
        return r;
    }
    return equals_zero_numeric(e, boxes, opts);
}

}  // namespace gfe
