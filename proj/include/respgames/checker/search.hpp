#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "respgames/logic/formula.hpp"
#include "respgames/model/psmas.hpp"

namespace respgames::checker {

// Existential search over a coalition's strategy parameters, used by the
// evaluated mode. The other parameters are held at `fixed`.
struct SearchProblem {
  std::vector<poly::ParamId> vars;
  poly::ParamValuation fixed;
  logic::CompareOp cmp = logic::CompareOp::Ge;
  poly::Rational bound;
  // Floating objective over `vars` (in order); +inf stands for an infinite
  // value, NaN for an undefined one.
  std::function<double(std::span<const double>)> approx;
  // Exact value at a full valuation; nullopt for infinite. May throw
  // DegenerateQueryError at a pole, which rejects the point.
  std::function<std::optional<poly::Rational>(const poly::ParamValuation&)> exact;
};

struct SearchResult {
  bool holds = false;
  poly::ParamValuation witness;          // full valuation of the best point found
  std::optional<poly::Rational> value;  // nullopt when infinite
  std::size_t evaluations = 0;
};

inline constexpr std::size_t kMaxSearchDimension = 6;

// Grid at step 1/50 when it has at most 2e5 points, Halton points otherwise,
// then a pattern-search polish. Candidates are confirmed exactly. Parameters
// of one slot are kept on the simplex (their sum stays at most 1).
SearchResult search_witness(const model::Psmas& m, const SearchProblem& p);

// Radical-inverse point `index` of the Halton sequence in `dims` dimensions.
std::vector<double> halton_point(std::size_t index, std::size_t dims);

}  // namespace respgames::checker
