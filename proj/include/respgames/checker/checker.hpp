#pragma once

#include <optional>
#include <string>
#include <vector>

#include "respgames/logic/formula.hpp"
#include "respgames/model/psmas.hpp"
#include "respgames/poly/rational_function.hpp"

namespace respgames::checker {

// Without a valuation every quantitative operator is answered symbolically.
// With one, non-coalition parameters take their bound values and the
// coalition's parameters are searched for a witness.
struct QueryContext {
  std::optional<poly::ParamValuation> valuation;

  bool evaluated() const { return valuation.has_value(); }
};

// The set of parameter points where `value cmp bound` holds, kept as the
// defining inequality.
struct Region {
  poly::RationalFunction value;
  logic::CompareOp cmp = logic::CompareOp::Ge;
  poly::Rational bound;
  bool infinite = false;  // value is +inf everywhere

  // Set when the inequality does not depend on the parameters.
  std::optional<bool> decided() const;
  std::string to_string(const poly::ParamTable* names = nullptr) const;
};

struct ExtendedValue {
  bool infinite = false;
  poly::RationalFunction value;

  static ExtendedValue finite(poly::RationalFunction v) { return {false, std::move(v)}; }
  static ExtendedValue inf() { return {true, {}}; }
  std::string to_string(const poly::ParamTable* names = nullptr) const;
};

struct DegreeResult {
  logic::DegreeKind kind = logic::DegreeKind::Car;
  poly::RationalFunction value;  // kappa * numerator / denominator
  bool kappa = false;
  poly::Polynomial numerator;    // probability of the responsible prefixes
  poly::Polynomial denominator;  // probability of all prefixes of the outcome
  std::size_t numerator_paths = 0;
  std::size_t denominator_paths = 0;
};

// Value at a full valuation. A denominator that vanishes there gives 0.
poly::Rational evaluate_degree(const DegreeResult& d, const poly::ParamValuation& v,
                               const poly::ParamTable* names = nullptr);

struct CheckResult {
  // Empty when the answer depends on unbound parameters (symbolic mode).
  std::optional<bool> holds;
  std::optional<Region> region;
  std::optional<poly::ParamValuation> witness;
  std::optional<poly::Rational> value;  // at the witness or the bound valuation
  bool value_infinite = false;
  std::optional<ExtendedValue> reward;
  std::optional<DegreeResult> degree;
};

class Checker {
 public:
  // Throws InadmissibleError for a valuation that breaks a checkable
  // admissibility condition.
  explicit Checker(const model::Psmas& m, QueryContext ctx = {});

  const model::Psmas& model() const { return m_; }
  const QueryContext& context() const { return ctx_; }

  // Truth value of `f` at every state. Quantitative operators whose answer
  // depends on unbound parameters raise UnsupportedQueryError.
  std::vector<bool> sat(const logic::StateFormula& f);
  bool holds(int state, const logic::StateFormula& f) { return sat(f)[state]; }

  // Probability of the paths from `state` that satisfy `psi`, as a function
  // of the free parameters.
  poly::RationalFunction path_sat_prob(int state, const logic::PathFormula& psi);

  // Expected accumulated reward of `agent` until `target` within `steps`
  // steps; infinite when the target can be missed.
  ExtendedValue reward_value(int state, int agent, const logic::StateFormula& target, int steps);

  DegreeResult car_degree(int state, int agent, const model::Plan& plan,
                          const logic::PathFormula& psi);
  DegreeResult cpr_degree(int state, int agent, const model::Plan& plan,
                          const logic::PathFormula& psi, const std::vector<int>& coalition);

  CheckResult check_prob(int state, const logic::StateFormula& f);
  CheckResult check_reward(int state, const logic::StateFormula& f);
  CheckResult check_degree(int state, const logic::StateFormula& f);
  CheckResult check(int state, const logic::StateFormula& f);

 private:
  std::vector<int> agent_indices(const std::vector<std::string>& names) const;
  int agent_index(const std::string& name) const;
  std::vector<poly::ParamId> coalition_vars(const std::vector<int>& coalition,
                                            const std::set<poly::ParamId>& used) const;
  CheckResult decide(const Region& r);

  const model::Psmas& m_;
  QueryContext ctx_;
};

// Renders a valuation as "name=value" pairs separated by ", ".
std::string to_string(const poly::ParamValuation& v, const poly::ParamTable* names = nullptr);

}  // namespace respgames::checker
