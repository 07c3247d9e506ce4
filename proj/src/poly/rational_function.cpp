#include "respgames/poly/rational_function.hpp"

#include <random>
#include <stdexcept>

#include "respgames/errors.hpp"

namespace respgames::poly {

RationalFunction::RationalFunction(Polynomial num) : num_(std::move(num)), den_(Rational(1)) {}

RationalFunction::RationalFunction(Polynomial num, Polynomial den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.is_zero()) throw std::domain_error("rational function with zero denominator");
  *this = rf_simplify(*this);
}

RationalFunction rf_simplify(const RationalFunction& r) {
  const Polynomial& num = r.num();
  const Polynomial& den = r.den();
  if (den.is_zero()) throw std::domain_error("rational function with zero denominator");
  if (num.is_zero()) return RationalFunction(Polynomial(), Polynomial(Rational(1)),
                                             RationalFunction::Normalized{});

  Monomial shared = monomial_gcd(split_monomial_content(num).first,
                                 split_monomial_content(den).first);
  Polynomial n = shared.is_one() ? num : divide_by_monomial(num, shared);
  Polynomial d = shared.is_one() ? den : divide_by_monomial(den, shared);

  Rational scale = 1 / d.leading_coefficient();
  n *= scale;
  d *= scale;

  if (!d.is_constant() && n.size() == d.size()) {
    Rational ratio = n.leading_coefficient();
    Polynomial scaled = d;
    scaled *= ratio;
    if (scaled == n) {
      return RationalFunction(Polynomial(ratio), Polynomial(Rational(1)),
                              RationalFunction::Normalized{});
    }
  }
  return RationalFunction(std::move(n), std::move(d), RationalFunction::Normalized{});
}

std::optional<Rational> RationalFunction::as_constant() const {
  if (!den_.is_constant() || !num_.is_constant()) return std::nullopt;
  return num_.constant_term() / den_.constant_term();
}

RationalFunction RationalFunction::operator-() const {
  return RationalFunction(-num_, den_, Normalized{});
}

RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den_ == b.den_) return RationalFunction(a.num_ + b.num_, a.den_);
  return RationalFunction(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }

RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
  if (a.is_zero() || b.is_zero()) return RationalFunction();
  return RationalFunction(a.num_ * b.num_, a.den_ * b.den_);
}

RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
  if (b.is_zero()) throw std::domain_error("division by the zero rational function");
  return RationalFunction(a.num_ * b.den_, a.den_ * b.num_);
}

bool rf_equal(const RationalFunction& a, const RationalFunction& b) {
  return (a.num() * b.den() - b.num() * a.den()).is_zero();
}

bool rf_equal_on_box(const RationalFunction& a, const RationalFunction& b, std::size_t samples,
                     std::uint64_t seed) {
  std::set<ParamId> vars = a.num().variables();
  for (const auto* p : {&a.den(), &b.num(), &b.den()}) {
    auto more = p->variables();
    vars.insert(more.begin(), more.end());
  }
  std::mt19937_64 rng(seed);
  const mpz_class scale = mpz_class(1) << 20;
  for (std::size_t i = 0; i < samples; ++i) {
    ParamValuation v;
    for (ParamId id : vars) {
      Rational q(mpz_class(static_cast<unsigned long>(rng() >> 44)), scale);
      q.canonicalize();
      v.emplace(id, q);
    }
    Rational da = poly_eval(a.den(), v);
    Rational db = poly_eval(b.den(), v);
    if (da == 0 || db == 0) continue;
    if (poly_eval(a.num(), v) * db != poly_eval(b.num(), v) * da) return false;
  }
  return rf_equal(a, b);
}

Rational rf_eval(const RationalFunction& r, const ParamValuation& v, const ParamTable* names) {
  Rational den = poly_eval(r.den(), v, names);
  if (den == 0) throw DegenerateQueryError("rational function evaluated at a pole");
  return poly_eval(r.num(), v, names) / den;
}

RationalFunction rf_substitute(const RationalFunction& r,
                               const std::map<ParamId, Polynomial>& bindings) {
  Polynomial den = poly_substitute(r.den(), bindings);
  if (den.is_zero()) {
    throw DegenerateQueryError("substitution makes a denominator identically zero");
  }
  return RationalFunction(poly_substitute(r.num(), bindings), std::move(den));
}

std::string to_string(const RationalFunction& r, const ParamTable* names) {
  if (r.is_polynomial()) {
    Polynomial n = r.num();
    n *= 1 / r.den().constant_term();
    return to_string(n, names);
  }
  return "(" + to_string(r.num(), names) + ")/(" + to_string(r.den(), names) + ")";
}

}  // namespace respgames::poly
