#pragma once

#include <gmpxx.h>

#include <optional>
#include <string>
#include <string_view>

namespace pctlwb {

using Rational = mpq_class;

// Accepts "p" or "p/q" with decimal naturals; result is canonicalized.
// Throws std::invalid_argument on malformed text or zero denominator.
Rational parse_rational(std::string_view text);

// "p/q", or "p" when the denominator is 1.
std::string to_string(const Rational& r);
// Always "p/q" (chain files are bit-exact fractions).
std::string to_fraction(const Rational& r);

// Exact square root if r is the square of a rational.
std::optional<Rational> rational_sqrt(const Rational& r);

Rational make_rational(long num, long den = 1);

}  // namespace pctlwb
