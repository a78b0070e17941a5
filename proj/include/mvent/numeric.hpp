#ifndef MVENT_NUMERIC_HPP
#define MVENT_NUMERIC_HPP

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <string>

#include "mvent/errors.hpp"

namespace mvent {

/** Exact scalar type. All exact-mode arithmetic runs on GMP rationals. */
using Rat = mpq_class;

/**
 * mpq_class does not canonicalize values built from (num, den) pairs or
 * strings, and comparisons misbehave on non-canonical operands.  Every
 * rational that enters the library goes through one of these helpers.
 */
inline Rat make_rat(long num, long den = 1) {
    if (den == 0) throw DomainError("rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

inline Rat make_rat(const mpz_class& num, const mpz_class& den) {
    if (den == 0) throw DomainError("rational with zero denominator");
    Rat r(num, den);
    r.canonicalize();
    return r;
}

/**
 * Parse "p/q", "p", or a finite decimal like "0.25" into an exact rational.
 * Decimals convert exactly (no binary rounding).
 */
inline Rat parse_rat(const std::string& text) {
    if (text.empty()) throw ConfigError("empty rational literal");
    std::string s = text;
    auto slash = s.find('/');
    try {
        if (slash != std::string::npos) {
            mpz_class num(s.substr(0, slash), 10);
            mpz_class den(s.substr(slash + 1), 10);
            return make_rat(num, den);
        }
        auto dot = s.find('.');
        if (dot == std::string::npos) {
            mpz_class whole(s, 10);
            return Rat(whole);
        }
        std::string digits = s.substr(0, dot) + s.substr(dot + 1);
        std::size_t frac_len = s.size() - dot - 1;
        if (frac_len == 0) throw ConfigError("trailing dot in rational literal '" + text + "'");
        mpz_class den(1);
        for (std::size_t i = 0; i < frac_len; ++i) den *= 10;
        if (digits == "-" || digits == "+") throw ConfigError("bad rational literal '" + text + "'");
        return make_rat(mpz_class(digits, 10), den);
    } catch (const std::invalid_argument&) {
        throw ConfigError("bad rational literal '" + text + "'");
    }
}

inline std::string rat_to_string(const Rat& r) { return r.get_str(); }

inline double to_double(const Rat& r) { return r.get_d(); }
inline double to_double(double x) { return x; }

/** Numeric mode selected at the tool boundary; core code is templated on the scalar. */
struct NumericMode {
    enum class Kind { exact_rational, float64 };
    Kind kind = Kind::exact_rational;
    double tolerance = 1e-9;  // used by float64 comparisons only
};

/**
 * Comparison policy per scalar.  Exact scalars ignore the tolerance argument;
 * floating point compares up to the tolerance carried by the enclosing space.
 */
template <class S>
struct NumTraits;

template <>
struct NumTraits<Rat> {
    static constexpr bool is_exact = true;
    static Rat zero() { return Rat(0); }
    static Rat one() { return Rat(1); }
    static bool eq(const Rat& a, const Rat& b, double) { return a == b; }
    static bool leq(const Rat& a, const Rat& b, double) { return a <= b; }
    static bool is_zero(const Rat& a, double) { return a == 0; }
    static std::string str(const Rat& a) { return a.get_str(); }
};

template <>
struct NumTraits<double> {
    static constexpr bool is_exact = false;
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static bool eq(double a, double b, double tol) { return std::fabs(a - b) <= tol; }
    static bool leq(double a, double b, double tol) { return a <= b + tol; }
    static bool is_zero(double a, double tol) { return std::fabs(a) <= tol; }
    static std::string str(double a) { return std::to_string(a); }
};

}  // namespace mvent

#endif
