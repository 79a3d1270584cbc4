#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cstdint>
#include <string>
#include <string_view>

#include "errors.hpp"

namespace ktower {

using Integer = boost::multiprecision::mpz_int;
/// Arbitrary precision rational, always held in lowest terms with a positive denominator.
using Rational = boost::multiprecision::mpq_rational;

inline Integer numerator_of(const Rational& r) { return boost::multiprecision::numerator(r); }
inline Integer denominator_of(const Rational& r) { return boost::multiprecision::denominator(r); }

inline Rational make_rational(const Integer& num, const Integer& den) {
    require(den != 0, "rational with zero denominator");
    return Rational(num, den);
}

/// "p/q" form; integers keep an explicit "/1" so every rational in a file has the same shape.
inline std::string to_string(const Rational& r) {
    return numerator_of(r).str() + "/" + denominator_of(r).str();
}

inline Rational parse_rational(std::string_view text) {
    auto parse_int = [&](std::string_view s) {
        require(!s.empty(), "malformed rational '" + std::string(text) + "'");
        std::size_t i = (s[0] == '-' || s[0] == '+') ? 1 : 0;
        require(i < s.size(), "malformed rational '" + std::string(text) + "'");
        for (std::size_t j = i; j < s.size(); ++j)
            require(s[j] >= '0' && s[j] <= '9', "malformed rational '" + std::string(text) + "'");
        return Integer(std::string(s));
    };
    const auto slash = text.find('/');
    if (slash == std::string_view::npos) return Rational(parse_int(text));
    return make_rational(parse_int(text.substr(0, slash)), parse_int(text.substr(slash + 1)));
}

inline Integer ipow(std::int64_t base, std::int64_t exp) {
    Integer r = 1;
    for (std::int64_t i = 0; i < exp; ++i) r *= base;
    return r;
}

/// Exponent e with den == p^e, or -1 when den has any other prime factor.
inline int power_exponent(Integer den, std::int64_t p) {
    int e = 0;
    while (den % p == 0) {
        den /= p;
        ++e;
    }
    return den == 1 ? e : -1;
}

} // namespace ktower
