#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <cstdint>
#include <string>

namespace lepage {

/// Exact coefficient field. All engine arithmetic is exact; nothing is ever
/// rounded, so "equal" always means identically equal.
using Rational = boost::multiprecision::cpp_rational;
using Integer = boost::multiprecision::cpp_int;

[[nodiscard]] inline Rational rational_pow(const Rational& base, long long e) {
    if (e == 0) return Rational(1);
    Rational b = e < 0 ? Rational(1) / base : base;
    unsigned long long k = e < 0 ? static_cast<unsigned long long>(-e)
                                 : static_cast<unsigned long long>(e);
    Rational acc(1);
    while (k) {
        if (k & 1ULL) acc *= b;
        b *= b;
        k >>= 1ULL;
    }
    return acc;
}

[[nodiscard]] inline std::string rational_to_string(const Rational& q) {
    if (denominator(q) == 1) return numerator(q).str();
    return numerator(q).str() + "/" + denominator(q).str();
}

}  // namespace lepage
