#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace respgames::poly {

// Arbitrary-precision rational. gmpxx keeps results of arithmetic in
// canonical form (positive denominator, coprime parts).
using Rational = mpq_class;

// Accepts "3", "-3/4", "0.25", "-1.5e-3". Decimal literals are converted by
// their literal denominator, never through a double.
Rational parse_rational(std::string_view text);

// "num/den", denominator omitted when it is 1.
std::string to_string(const Rational& q);

double to_double(const Rational& q);

// Exact rational value of a finite double.
Rational from_double(double x);

// Decimal rendering with at most `digits` significant digits.
std::string to_decimal(const Rational& q, int digits = 12);

}  // namespace respgames::poly
