#pragma once

// Hand-rolled random generators for the property tests.

#include <cstdint>
#include <random>
#include <vector>

#include "respgames/poly/polynomial.hpp"

namespace respgames::testing {

inline poly::Polynomial random_polynomial(std::mt19937_64& rng,
                                          const std::vector<poly::ParamId>& vars,
                                          std::uint32_t max_degree, int coef_bound,
                                          int max_terms = 6) {
  std::uniform_int_distribution<int> coef(-coef_bound, coef_bound);
  std::uniform_int_distribution<int> nterms(0, max_terms);
  std::uniform_int_distribution<std::uint32_t> exp(0, max_degree);
  poly::Polynomial p;
  int n = nterms(rng);
  for (int t = 0; t < n; ++t) {
    std::vector<poly::Monomial::Factor> factors;
    std::uint32_t budget = max_degree;
    for (auto id : vars) {
      std::uint32_t e = std::min(exp(rng), budget);
      budget -= e;
      factors.emplace_back(id, e);
    }
    p.add_term(poly::Monomial::from_factors(std::move(factors)), poly::Rational(coef(rng)));
  }
  return p;
}

inline poly::Rational random_rational(std::mt19937_64& rng, int num_bound = 20, int den_bound = 12) {
  std::uniform_int_distribution<int> num(-num_bound, num_bound);
  std::uniform_int_distribution<int> den(1, den_bound);
  poly::Rational q(num(rng), den(rng));
  q.canonicalize();
  return q;
}

inline poly::ParamValuation random_valuation(std::mt19937_64& rng,
                                             const std::vector<poly::ParamId>& vars) {
  poly::ParamValuation v;
  for (auto id : vars) v.emplace(id, random_rational(rng));
  return v;
}

}  // namespace respgames::testing
