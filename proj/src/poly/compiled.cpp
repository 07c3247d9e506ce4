#include "respgames/poly/compiled.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace respgames::poly {

CompiledPolynomial::CompiledPolynomial(const Polynomial& p, std::span<const ParamId> order) {
  terms_.reserve(p.size());
  for (const auto& [m, c] : p.terms()) {
    Term t{to_double(c), {}};
    for (const auto& [id, e] : m.factors()) {
      auto it = std::find(order.begin(), order.end(), id);
      if (it == order.end()) {
        throw std::invalid_argument("compiled polynomial: parameter " + default_param_name(id) +
                                    " not in variable order");
      }
      t.powers.emplace_back(static_cast<std::uint32_t>(it - order.begin()), e);
    }
    terms_.push_back(std::move(t));
  }
}

double CompiledPolynomial::operator()(std::span<const double> x) const {
  double total = 0.0;
  for (const auto& t : terms_) {
    double v = t.coefficient;
    for (const auto& [slot, e] : t.powers) {
      double base = x[slot];
      for (std::uint32_t i = 0; i < e; ++i) v *= base;
    }
    total += v;
  }
  return total;
}

double CompiledRationalFunction::operator()(std::span<const double> x) const {
  double d = den_(x);
  if (d == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return num_(x) / d;
}

}  // namespace respgames::poly
