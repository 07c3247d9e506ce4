#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "respgames/poly/param.hpp"
#include "respgames/poly/rational.hpp"

namespace respgames::poly {

// Product of parameter powers. Factors are kept sorted by ParamId with
// strictly positive exponents, so the empty monomial is 1.
class Monomial {
 public:
  using Factor = std::pair<ParamId, std::uint32_t>;

  Monomial() = default;
  static Monomial variable(ParamId id, std::uint32_t exponent = 1);
  // Factors need not be sorted; zero exponents are dropped, repeats merged.
  static Monomial from_factors(std::vector<Factor> factors);

  std::span<const Factor> factors() const { return factors_; }
  std::uint32_t degree() const { return degree_; }
  std::uint32_t exponent(ParamId id) const;
  bool is_one() const { return factors_.empty(); }

  Monomial operator*(const Monomial& other) const;
  // Removes `id` entirely and returns its exponent.
  std::pair<Monomial, std::uint32_t> split(ParamId id) const;

  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<Factor> factors_;
  std::uint32_t degree_ = 0;
};

// Graded lexicographic order, largest monomial first: higher total degree
// wins, ties broken by the exponent of the smallest ParamId where the two
// differ (larger exponent first).
struct MonomialOrder {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

// Returns <0, 0, >0 as a sorts before, equal to, or after b.
int compare_grlex(const Monomial& a, const Monomial& b);

// Sparse multivariate polynomial with exact rational coefficients. The term
// map never stores a zero coefficient, which makes structural equality
// coincide with polynomial equality.
class Polynomial {
 public:
  using Terms = std::map<Monomial, Rational, MonomialOrder>;

  Polynomial() = default;
  Polynomial(const Rational& c);  // NOLINT(google-explicit-constructor)
  Polynomial(long c) : Polynomial(Rational(c)) {}  // NOLINT
  static Polynomial variable(ParamId id);
  static Polynomial monomial(Monomial m, Rational c);

  const Terms& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  std::optional<Rational> as_constant() const;
  Rational constant_term() const;

  // Requires a nonzero polynomial.
  const Monomial& leading_monomial() const;
  const Rational& leading_coefficient() const;

  std::uint32_t total_degree() const;
  std::set<ParamId> variables() const;

  Polynomial operator-() const;
  Polynomial& operator+=(const Polynomial& other);
  Polynomial& operator-=(const Polynomial& other);
  Polynomial& operator*=(const Polynomial& other);
  Polynomial& operator*=(const Rational& c);

  friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
  friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b);
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.terms_ == b.terms_; }

  // Adds c * m in place.
  void add_term(const Monomial& m, const Rational& c);

 private:
  Terms terms_;
};

Polynomial poly_add(const Polynomial& a, const Polynomial& b);
Polynomial poly_mul(const Polynomial& a, const Polynomial& b);
Polynomial poly_neg(const Polynomial& a);
Polynomial poly_pow(const Polynomial& a, std::uint32_t n);

// Throws MissingParameterError naming the first unassigned parameter; the
// optional table supplies its display name.
Rational poly_eval(const Polynomial& p, const ParamValuation& v,
                   const ParamTable* names = nullptr);

// Simultaneous substitution of parameters by polynomials.
Polynomial poly_substitute(const Polynomial& p, const std::map<ParamId, Polynomial>& bindings);

Polynomial poly_derivative(const Polynomial& p, ParamId id);

// Removes the monomial gcd of all terms, returning it alongside the quotient.
std::pair<Monomial, Polynomial> split_monomial_content(const Polynomial& p);
Monomial monomial_gcd(const Monomial& a, const Monomial& b);
// Exact division by a monomial that divides every term.
Polynomial divide_by_monomial(const Polynomial& p, const Monomial& m);

Rational rational_pow(const Rational& base, std::uint32_t exponent);

std::string to_string(const Monomial& m, const ParamTable* names = nullptr);
std::string to_string(const Polynomial& p, const ParamTable* names = nullptr);

// Guard against term explosion. Operations producing more terms than the
// limit throw ResourceError. Default 100000.
void set_term_limit(std::size_t limit);
std::size_t term_limit();

}  // namespace respgames::poly
