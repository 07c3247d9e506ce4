#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "respgames/poly/rational_function.hpp"

namespace respgames::poly {

// Floating-point evaluator for the numeric search loops. Variables are
// addressed by position in the `order` passed at construction; parameters not
// listed there must not occur in the polynomial.
class CompiledPolynomial {
 public:
  CompiledPolynomial() = default;
  CompiledPolynomial(const Polynomial& p, std::span<const ParamId> order);

  double operator()(std::span<const double> x) const;

 private:
  struct Term {
    double coefficient;
    std::vector<std::pair<std::uint32_t, std::uint32_t>> powers;  // (slot, exponent)
  };
  std::vector<Term> terms_;
};

class CompiledRationalFunction {
 public:
  CompiledRationalFunction() = default;
  CompiledRationalFunction(const RationalFunction& r, std::span<const ParamId> order)
      : num_(r.num(), order), den_(r.den(), order) {}

  double num(std::span<const double> x) const { return num_(x); }
  double den(std::span<const double> x) const { return den_(x); }
  // NaN at a pole.
  double operator()(std::span<const double> x) const;

 private:
  CompiledPolynomial num_;
  CompiledPolynomial den_;
};

}  // namespace respgames::poly
