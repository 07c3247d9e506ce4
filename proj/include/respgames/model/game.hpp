#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "respgames/poly/rational.hpp"

namespace respgames::model {

// One action index per agent, in declared agent order. Indices refer to
// Csg::actions.
using JointAction = std::vector<int>;
using Distribution = std::map<int, poly::Rational>;

// Concurrent stochastic game with finitely many states and actions.
struct Csg {
  std::vector<std::string> agents;
  std::vector<std::string> states;
  std::vector<std::string> actions;
  int initial = 0;
  // available[agent][state], in declared order.
  std::vector<std::vector<std::vector<int>>> available;
  std::map<std::pair<int, JointAction>, Distribution> delta;
  std::vector<std::set<std::string>> labels;

  // -1 when absent.
  int agent_index(std::string_view name) const;
  int state_index(std::string_view name) const;
  int action_index(std::string_view name) const;

  std::set<std::string> propositions() const;
  bool has_label(int state, const std::string& prop) const;

  // Cartesian product of the available actions at `state`, first agent
  // outermost, each agent in declared action order.
  std::vector<JointAction> joint_actions(int state) const;
  bool is_available(int state, const JointAction& a) const;
  const Distribution& distribution(int state, const JointAction& a) const;

  std::string render(const JointAction& a) const;

  // Throws ModelError on a broken invariant.
  void validate() const;
};

struct RewardStructure {
  int agent = 0;
  std::vector<poly::Rational> state_reward;
  // Rewards keyed by the owning agent's own action, lifted to joint actions
  // through that agent's component.
  std::map<int, poly::Rational> own_action_reward;
  // Explicit joint-action entries take precedence over the lifted ones.
  std::map<JointAction, poly::Rational> joint_action_reward;

  poly::Rational state_value(int state) const;
  poly::Rational action_value(const JointAction& a) const;
};

// Pure joint plan: one joint action per step from `start`.
struct Plan {
  std::string name;
  int start = 0;
  std::vector<JointAction> steps;

  friend bool operator==(const Plan&, const Plan&) = default;
};

struct ParamAlias {
  std::string name;
  int agent = 0;
  int state = 0;
  int action = 0;
};

// Everything a model file declares.
struct Game {
  Csg csg;
  // shared_state[agent][state] is the state whose strategy parameters the
  // agent uses at `state`. Identity unless a `tie` line says otherwise.
  std::vector<std::vector<int>> shared_state;
  std::vector<ParamAlias> aliases;
  std::vector<RewardStructure> rewards;  // one per agent
  std::vector<Plan> plans;
  std::vector<std::string> notes;

  const Plan* find_plan(std::string_view name) const;
};

// Fills shared_state and rewards with defaults for a bare game.
Game make_game(Csg csg);

}  // namespace respgames::model
