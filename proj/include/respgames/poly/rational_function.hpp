#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>

#include "respgames/poly/polynomial.hpp"

namespace respgames::poly {

// Ratio of two polynomials. Every instance is kept normalized: denominator
// nonzero with leading coefficient 1, monomial content shared by numerator
// and denominator cancelled, and proportional pairs collapsed to a constant.
// Equality goes through cross-multiplication, so no multivariate gcd is
// needed for correctness.
class RationalFunction {
 public:
  RationalFunction() : den_(Rational(1)) {}
  RationalFunction(Polynomial num);  // NOLINT(google-explicit-constructor)
  RationalFunction(const Rational& c) : RationalFunction(Polynomial(c)) {}  // NOLINT
  RationalFunction(long c) : RationalFunction(Polynomial(c)) {}  // NOLINT
  // Throws std::domain_error when `den` is the zero polynomial.
  RationalFunction(Polynomial num, Polynomial den);

  const Polynomial& num() const { return num_; }
  const Polynomial& den() const { return den_; }

  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }
  std::optional<Rational> as_constant() const;

  RationalFunction operator-() const;
  friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b);
  friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b);
  // Throws std::domain_error on division by the zero function.
  friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b);

  RationalFunction& operator+=(const RationalFunction& b) { return *this = *this + b; }
  RationalFunction& operator*=(const RationalFunction& b) { return *this = *this * b; }

 private:
  struct Normalized {};
  RationalFunction(Polynomial num, Polynomial den, Normalized)
      : num_(std::move(num)), den_(std::move(den)) {}
  friend RationalFunction rf_simplify(const RationalFunction& r);

  Polynomial num_;
  Polynomial den_;
};

RationalFunction rf_simplify(const RationalFunction& r);

// Identity test via the canonical form of a.num*b.den - b.num*a.den.
bool rf_equal(const RationalFunction& a, const RationalFunction& b);

// Same decision as rf_equal; the seeded random rational points on [0,1]^n
// serve as a cheap early reject before the symbolic check. Deterministic in
// `seed`.
bool rf_equal_on_box(const RationalFunction& a, const RationalFunction& b, std::size_t samples,
                     std::uint64_t seed);

// Throws DegenerateQueryError if the denominator vanishes at v.
Rational rf_eval(const RationalFunction& r, const ParamValuation& v,
                 const ParamTable* names = nullptr);

RationalFunction rf_substitute(const RationalFunction& r,
                               const std::map<ParamId, Polynomial>& bindings);

// "p" when the denominator is 1, otherwise "(p)/(q)".
std::string to_string(const RationalFunction& r, const ParamTable* names = nullptr);

}  // namespace respgames::poly
