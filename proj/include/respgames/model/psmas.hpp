#pragma once

#include <map>
#include <string>
#include <vector>

#include "respgames/model/game.hpp"
#include "respgames/poly/polynomial.hpp"

namespace respgames::model {

struct Transition {
  JointAction action;
  int target = 0;
  poly::Rational branch;          // delta(s, action)(target)
  poly::Polynomial probability;  // branch times the strategy product
};

// Strategy slot: an agent together with the representative state whose
// parameters it uses.
struct Slot {
  int agent = 0;
  int state = 0;
  friend auto operator<=>(const Slot&, const Slot&) = default;
};

// Parametric model: every agent-state-action probability is a parameter and
// every transition probability a polynomial in them. The last declared
// action of each slot is dependent and replaced by 1 minus the others.
class Psmas {
 public:
  const Game& game() const { return game_; }
  const Csg& csg() const { return game_.csg; }
  const poly::ParamTable& names() const { return names_; }

  // All parameters, dependent ones included, in ParamId order.
  const std::vector<poly::ParamId>& params() const { return params_; }
  const std::vector<poly::ParamId>& free_params() const { return free_; }
  std::vector<poly::ParamId> free_params(int agent) const;
  bool is_dependent(poly::ParamId id) const;

  const std::vector<Slot>& slots() const { return slots_; }
  int representative(int agent, int state) const { return game_.shared_state[agent][state]; }
  // Declared actions of a slot, dependent action last.
  const std::vector<int>& slot_actions(const Slot& s) const;
  poly::ParamId param(int agent, int state, int action) const;
  // Probability polynomial of `agent` playing `action` at `state`.
  const poly::Polynomial& strategy(int agent, int state, int action) const;

  const std::vector<Transition>& transitions(int state) const { return transitions_[state]; }
  // Zero polynomial when there is no such edge.
  poly::Polynomial transition(int state, const JointAction& a, int target) const;

  const RewardStructure& reward(int agent) const { return game_.rewards[agent]; }
  // Throws ModelError for an unknown plan.
  const Plan& plan(std::string_view name) const;

  std::string param_name(poly::ParamId id) const { return names_.name(id); }

 private:
  friend Psmas build_psmas(Game g);

  Game game_;
  poly::ParamTable names_;
  std::vector<poly::ParamId> params_;
  std::vector<poly::ParamId> free_;
  std::vector<Slot> slots_;
  std::map<poly::ParamId, poly::Polynomial> strategy_;
  std::vector<std::vector<Transition>> transitions_;
};

Psmas build_psmas(Game g);
Psmas build_psmas(const Csg& g);

struct Violation {
  int condition = 0;  // 1 transition range, 2 parameter range, 3 simplex sum
  std::string location;
  poly::Rational value;
};

struct AdmissibilityReport {
  bool ok = true;
  std::vector<Violation> violations;
};

// Values for dependent parameters may be given explicitly; they are then
// checked against condition 3 instead of being derived. With `partial`,
// slots with an unassigned free parameter are skipped rather than reported
// as missing.
AdmissibilityReport check_admissible(const Psmas& m, const poly::ParamValuation& v,
                                     bool partial = false);

// Keeps the free-parameter entries only.
poly::ParamValuation free_part(const Psmas& m, const poly::ParamValuation& v);

// Extends a free-parameter valuation with the derived dependent values.
poly::ParamValuation with_dependents(const Psmas& m, const poly::ParamValuation& v);

}  // namespace respgames::model
