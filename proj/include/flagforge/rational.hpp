#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace flagforge {

// Arbitrary precision rational, always canonicalized (reduced, positive
// denominator) by the helpers below.
using Rational = mpq_class;
using Integer = mpz_class;

Rational make_rational(long num, long den = 1);

// Accepts "a", "a/b", "-a/b", decimals ("0.198") and scientific notation
// ("1e-6", "2.5E3"). Decimal input is converted exactly.
Rational parse_rational(std::string_view text);

std::string to_string(const Rational& q);
std::string to_string(const Integer& z);

double to_double(const Rational& q);

// Best rational approximation p/q of x with 1 <= q <= max_denominator,
// computed from the continued fraction expansion (convergents and
// semiconvergents).
Rational best_approximation(double x, std::uint64_t max_denominator);

Integer binomial(long n, long k);

// Exact decimal rendering with `digits` digits after the point (rounded
// toward zero). Used for human readable tables only.
std::string to_decimal(const Rational& q, int digits);

}  // namespace flagforge
