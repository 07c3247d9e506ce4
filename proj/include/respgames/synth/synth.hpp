#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "respgames/checker/checker.hpp"
#include "respgames/logic/formula.hpp"
#include "respgames/model/psmas.hpp"

namespace respgames::synth {

// Utility = lambda1 * payoff - lambda2 * (CAR + theta * CPR).
struct UtilityConfig {
  poly::Rational lambda1{1};
  poly::Rational lambda2{0};
  poly::Rational theta{1};
};

// Plan and outcome the responsibility part of the utility refers to.
struct ResponsibilitySpec {
  int state = 0;
  model::Plan plan;
  logic::PathPtr psi;
};

// Expected payoff of a pure plan: summed over the plan's histories.
poly::Polynomial payoff_valuation(const model::Psmas& m, const model::Plan& plan, int agent);
// Mixed setting: summed over every history of `horizon` steps from `state`.
poly::Polynomial payoff_valuation(const model::Psmas& m, int state, int horizon, int agent);

// CAR + theta * CPR for the whole agent set as coalition.
poly::RationalFunction resp_valuation(const model::Psmas& m, int state, int agent, const model::Plan& plan,
                                      const logic::PathFormula& psi, const poly::Rational& theta);

// weight * numerator / denominator, read as 0 wherever the denominator
// vanishes.
struct UtilityTerm {
  poly::Rational weight;
  poly::Polynomial numerator;
  poly::Polynomial denominator;
};

struct AgentUtility {
  poly::Polynomial payoff;  // already scaled by lambda1
  std::vector<UtilityTerm> terms;

  poly::Rational evaluate(const poly::ParamValuation& v) const;
  // Symbolic form; terms whose denominator is identically zero drop out.
  poly::RationalFunction function() const;
  std::set<poly::ParamId> variables() const;
};

struct UtilityModel {
  const model::Psmas* m = nullptr;
  UtilityConfig cfg;
  int state = 0;
  int horizon = 0;
  std::optional<ResponsibilitySpec> resp;
  std::vector<AgentUtility> agents;

  // Slots whose parameters occur in some utility.
  std::vector<model::Slot> relevant_slots() const;
};

UtilityModel build_utility(const model::Psmas& m, int state, int horizon, const UtilityConfig& cfg,
                           const std::optional<ResponsibilitySpec>& resp = std::nullopt);

// Symbolic utility of one agent.
poly::RationalFunction utility(const UtilityModel& u, int agent);

// Actions assumed to be played with positive probability, per slot.
using Support = std::map<model::Slot, std::vector<int>>;

// Polynomial system over a box, optionally with simplex groups.
struct NeSystem {
  poly::ParamTable names;
  std::vector<poly::ParamId> variables;
  std::vector<poly::Polynomial> equations;  // each = 0
  // Denominators that must not vanish at a solution.
  std::vector<poly::Polynomial> side_conditions;
  // Indices into `variables` whose sum stays at most 1.
  std::vector<std::vector<std::size_t>> groups;
  // Values fixed by the support, and parameters written in terms of others.
  poly::ParamValuation pinned;
  std::map<poly::ParamId, poly::Polynomial> eliminated;
  Support support;

  // Completes a point over `variables` to a valuation of every parameter the
  // system knows about.
  poly::ParamValuation complete(const poly::ParamValuation& point) const;
};

// Standalone system from "lhs = rhs" or "expr" (meaning expr = 0) lines;
// names are declared in order of appearance.
NeSystem parse_ne_system(const std::vector<std::string>& equations);

// Indifference system for the support: for every agent and every slot with
// at least two supported actions, the utilities of consecutive supported
// pure choices agree. Unsupported actions are pinned to 0.
NeSystem build_ne_system(const UtilityModel& u, const Support& support);

// Every combination of nonempty action subsets over the relevant slots.
std::vector<Support> enumerate_supports(const UtilityModel& u);

struct NeSolution {
  poly::ParamValuation valuation;
  double residual = 0;
  std::optional<double> gap;
  Support support;
  std::size_t start = 0;
};

struct SolveOptions {
  std::size_t starts = 32;
  std::uint64_t seed = 0;
  double tolerance = 1e-9;
  bool parallel = true;
  // Best-response gap of a candidate; candidates above `gap_tolerance` are
  // dropped. Unset for standalone systems.
  std::function<double(const poly::ParamValuation&)> verify;
  double gap_tolerance = 1e-6;
};

// Multi-start Levenberg-Marquardt on the least-squares form, projected onto
// the box and simplex groups. Solutions are confirmed with an exact residual
// and deduplicated at max-norm distance 1e-6.
std::vector<NeSolution> solve_ne(const NeSystem& sys, const SolveOptions& opt = {});

struct Verification {
  bool ok = false;
  double gap = 0;
  int agent = -1;  // agent and slot of the best deviation
  model::Slot slot;
  int action = -1;
};

// Largest utility gain of a pure deviation, one slot at a time.
Verification verify_ne(const UtilityModel& u, const poly::ParamValuation& candidate, double epsilon = 1e-6);

// Whole pipeline: enumerate supports, solve each, verify every candidate.
std::vector<NeSolution> synthesize(const UtilityModel& u, const SolveOptions& opt = {});

}  // namespace respgames::synth
