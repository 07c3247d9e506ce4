#include "respgames/poly/polynomial.hpp"

#include <algorithm>
#include <atomic>
#include <stdexcept>

#include "respgames/errors.hpp"

namespace respgames::poly {

namespace {

std::atomic<std::size_t> g_term_limit{100000};

void check_limit(std::size_t terms) {
  std::size_t limit = g_term_limit.load(std::memory_order_relaxed);
  if (terms > limit) {
    throw ResourceError("polynomial exceeds term limit (" + std::to_string(terms) + " > " +
                        std::to_string(limit) + " terms)");
  }
}

}  // namespace

void set_term_limit(std::size_t limit) { g_term_limit.store(limit, std::memory_order_relaxed); }
std::size_t term_limit() { return g_term_limit.load(std::memory_order_relaxed); }

// ---------------------------------------------------------------- Monomial

Monomial Monomial::variable(ParamId id, std::uint32_t exponent) {
  Monomial m;
  if (exponent > 0) {
    m.factors_.emplace_back(id, exponent);
    m.degree_ = exponent;
  }
  return m;
}

Monomial Monomial::from_factors(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end(),
            [](const Factor& a, const Factor& b) { return a.first < b.first; });
  Monomial m;
  for (const auto& [id, e] : factors) {
    if (e == 0) continue;
    if (!m.factors_.empty() && m.factors_.back().first == id) {
      m.factors_.back().second += e;
    } else {
      m.factors_.emplace_back(id, e);
    }
    m.degree_ += e;
  }
  return m;
}

std::uint32_t Monomial::exponent(ParamId id) const {
  auto it = std::lower_bound(factors_.begin(), factors_.end(), id,
                             [](const Factor& f, ParamId x) { return f.first < x; });
  return (it != factors_.end() && it->first == id) ? it->second : 0;
}

Monomial Monomial::operator*(const Monomial& other) const {
  Monomial out;
  out.factors_.reserve(factors_.size() + other.factors_.size());
  auto a = factors_.begin();
  auto b = other.factors_.begin();
  while (a != factors_.end() || b != other.factors_.end()) {
    if (b == other.factors_.end() || (a != factors_.end() && a->first < b->first)) {
      out.factors_.push_back(*a++);
    } else if (a == factors_.end() || b->first < a->first) {
      out.factors_.push_back(*b++);
    } else {
      out.factors_.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    }
  }
  out.degree_ = degree_ + other.degree_;
  return out;
}

std::pair<Monomial, std::uint32_t> Monomial::split(ParamId id) const {
  Monomial rest;
  std::uint32_t e = 0;
  for (const auto& f : factors_) {
    if (f.first == id) {
      e = f.second;
    } else {
      rest.factors_.push_back(f);
      rest.degree_ += f.second;
    }
  }
  return {rest, e};
}

int compare_grlex(const Monomial& a, const Monomial& b) {
  if (a.degree() != b.degree()) return a.degree() > b.degree() ? -1 : 1;
  auto fa = a.factors();
  auto fb = b.factors();
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < fa.size() || j < fb.size()) {
    ParamId id;
    std::uint32_t ea = 0;
    std::uint32_t eb = 0;
    if (j == fb.size() || (i < fa.size() && fa[i].first < fb[j].first)) {
      id = fa[i].first;
      ea = fa[i++].second;
    } else if (i == fa.size() || fb[j].first < fa[i].first) {
      id = fb[j].first;
      eb = fb[j++].second;
    } else {
      ea = fa[i++].second;
      eb = fb[j++].second;
    }
    (void)id;
    if (ea != eb) return ea > eb ? -1 : 1;
  }
  return 0;
}

bool MonomialOrder::operator()(const Monomial& a, const Monomial& b) const {
  return compare_grlex(a, b) < 0;
}

Monomial monomial_gcd(const Monomial& a, const Monomial& b) {
  std::vector<Monomial::Factor> out;
  for (const auto& [id, e] : a.factors()) {
    std::uint32_t other = b.exponent(id);
    if (other > 0) out.emplace_back(id, std::min(e, other));
  }
  return Monomial::from_factors(std::move(out));
}

// -------------------------------------------------------------- Polynomial

Polynomial::Polynomial(const Rational& c) {
  if (c != 0) terms_.emplace(Monomial{}, c);
}

Polynomial Polynomial::variable(ParamId id) {
  return monomial(Monomial::variable(id), Rational(1));
}

Polynomial Polynomial::monomial(Monomial m, Rational c) {
  Polynomial p;
  if (c != 0) p.terms_.emplace(std::move(m), std::move(c));
  return p;
}

bool Polynomial::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_.begin()->first.is_one());
}

std::optional<Rational> Polynomial::as_constant() const {
  if (!is_constant()) return std::nullopt;
  return constant_term();
}

Rational Polynomial::constant_term() const {
  if (auto it = terms_.find(Monomial{}); it != terms_.end()) return it->second;
  return Rational(0);
}

const Monomial& Polynomial::leading_monomial() const {
  if (terms_.empty()) throw std::logic_error("leading monomial of zero polynomial");
  return terms_.begin()->first;
}

const Rational& Polynomial::leading_coefficient() const {
  if (terms_.empty()) throw std::logic_error("leading coefficient of zero polynomial");
  return terms_.begin()->second;
}

std::uint32_t Polynomial::total_degree() const {
  return terms_.empty() ? 0 : terms_.begin()->first.degree();
}

std::set<ParamId> Polynomial::variables() const {
  std::set<ParamId> out;
  for (const auto& [m, c] : terms_) {
    for (const auto& [id, e] : m.factors()) out.insert(id);
  }
  return out;
}

void Polynomial::add_term(const Monomial& m, const Rational& c) {
  if (c == 0) return;
  auto [it, inserted] = terms_.try_emplace(m, c);
  if (!inserted) {
    it->second += c;
    if (it->second == 0) terms_.erase(it);
  }
}

Polynomial Polynomial::operator-() const {
  Polynomial out = *this;
  for (auto& [m, c] : out.terms_) c = -c;
  return out;
}

Polynomial& Polynomial::operator+=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, c);
  check_limit(terms_.size());
  return *this;
}

Polynomial& Polynomial::operator-=(const Polynomial& other) {
  for (const auto& [m, c] : other.terms_) add_term(m, -c);
  check_limit(terms_.size());
  return *this;
}

Polynomial& Polynomial::operator*=(const Rational& c) {
  if (c == 0) {
    terms_.clear();
  } else {
    for (auto& [m, coef] : terms_) coef *= c;
  }
  return *this;
}

Polynomial& Polynomial::operator*=(const Polynomial& other) {
  *this = *this * other;
  return *this;
}

Polynomial operator*(const Polynomial& a, const Polynomial& b) {
  Polynomial out;
  if (a.is_zero() || b.is_zero()) return out;
  Rational product;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      product = ca * cb;
      out.add_term(ma * mb, product);
    }
    check_limit(out.terms_.size());
  }
  return out;
}

Polynomial poly_add(const Polynomial& a, const Polynomial& b) { return a + b; }
Polynomial poly_mul(const Polynomial& a, const Polynomial& b) { return a * b; }
Polynomial poly_neg(const Polynomial& a) { return -a; }

Polynomial poly_pow(const Polynomial& a, std::uint32_t n) {
  Polynomial result(Rational(1));
  Polynomial base = a;
  while (n > 0) {
    if (n & 1U) result *= base;
    n >>= 1U;
    if (n > 0) base = base * base;
  }
  return result;
}

Rational rational_pow(const Rational& base, std::uint32_t exponent) {
  Rational out;
  mpz_pow_ui(out.get_num_mpz_t(), base.get_num_mpz_t(), exponent);
  mpz_pow_ui(out.get_den_mpz_t(), base.get_den_mpz_t(), exponent);
  out.canonicalize();
  return out;
}

Rational poly_eval(const Polynomial& p, const ParamValuation& v, const ParamTable* names) {
  Rational total(0);
  Rational term;
  for (const auto& [m, c] : p.terms()) {
    term = c;
    for (const auto& [id, e] : m.factors()) {
      auto it = v.find(id);
      if (it == v.end()) {
        throw MissingParameterError(names ? names->name(id) : default_param_name(id));
      }
      term *= e == 1 ? it->second : rational_pow(it->second, e);
    }
    total += term;
  }
  return total;
}

Polynomial poly_substitute(const Polynomial& p, const std::map<ParamId, Polynomial>& bindings) {
  if (bindings.empty()) return p;
  // Powers of substituted polynomials are reused across terms.
  std::map<std::pair<ParamId, std::uint32_t>, Polynomial> power_cache;
  auto power = [&](ParamId id, std::uint32_t e) -> const Polynomial& {
    auto key = std::make_pair(id, e);
    auto it = power_cache.find(key);
    if (it == power_cache.end()) {
      it = power_cache.emplace(key, poly_pow(bindings.at(id), e)).first;
    }
    return it->second;
  };
  Polynomial out;
  for (const auto& [m, c] : p.terms()) {
    std::vector<Monomial::Factor> kept;
    Polynomial factor(c);
    for (const auto& [id, e] : m.factors()) {
      if (bindings.count(id) != 0) {
        factor *= power(id, e);
        if (factor.is_zero()) break;
      } else {
        kept.emplace_back(id, e);
      }
    }
    if (factor.is_zero()) continue;
    if (!kept.empty()) {
      factor = factor * Polynomial::monomial(Monomial::from_factors(std::move(kept)), Rational(1));
    }
    out += factor;
  }
  return out;
}

Polynomial poly_derivative(const Polynomial& p, ParamId id) {
  Polynomial out;
  for (const auto& [m, c] : p.terms()) {
    auto [rest, e] = m.split(id);
    if (e == 0) continue;
    out.add_term(rest * Monomial::variable(id, e - 1), c * e);
  }
  return out;
}

std::pair<Monomial, Polynomial> split_monomial_content(const Polynomial& p) {
  if (p.is_zero()) return {Monomial{}, p};
  Monomial g = p.terms().begin()->first;
  for (const auto& [m, c] : p.terms()) {
    g = monomial_gcd(g, m);
    if (g.is_one()) return {g, p};
  }
  return {g, divide_by_monomial(p, g)};
}

Polynomial divide_by_monomial(const Polynomial& p, const Monomial& d) {
  if (d.is_one()) return p;
  Polynomial out;
  for (const auto& [m, c] : p.terms()) {
    std::vector<Monomial::Factor> factors;
    for (const auto& [id, e] : m.factors()) {
      std::uint32_t de = d.exponent(id);
      if (de > e) throw std::logic_error("monomial does not divide polynomial");
      factors.emplace_back(id, e - de);
    }
    for (const auto& [id, e] : d.factors()) {
      if (m.exponent(id) == 0) throw std::logic_error("monomial does not divide polynomial");
    }
    out.add_term(Monomial::from_factors(std::move(factors)), c);
  }
  return out;
}

std::string to_string(const Monomial& m, const ParamTable* names) {
  std::string out;
  for (const auto& [id, e] : m.factors()) {
    if (!out.empty()) out += '*';
    out += names ? names->name(id) : default_param_name(id);
    if (e != 1) out += '^' + std::to_string(e);
  }
  return out.empty() ? "1" : out;
}

std::string to_string(const Polynomial& p, const ParamTable* names) {
  if (p.is_zero()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : p.terms()) {
    bool negative = c < 0;
    Rational magnitude = negative ? Rational(-c) : c;
    if (first) {
      if (negative) out += '-';
    } else {
      out += negative ? " - " : " + ";
    }
    first = false;
    if (m.is_one()) {
      out += to_string(magnitude);
    } else if (magnitude == 1) {
      out += to_string(m, names);
    } else {
      out += to_string(magnitude) + "*" + to_string(m, names);
    }
  }
  return out;
}

}  // namespace respgames::poly
