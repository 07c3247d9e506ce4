#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "respgames/model/psmas.hpp"

namespace respgames::trace {

struct History {
  std::vector<int> states;
  std::vector<model::JointAction> actions;
  poly::Polynomial probability;

  std::size_t length() const { return actions.size(); }
};

// Guard on |joint actions|^depth * |states|; ResourceError beyond it.
// Default 10^6.
void set_path_limit(std::size_t limit);
std::size_t path_limit();
void check_path_budget(const model::Psmas& m, int depth);

// All histories of exactly `depth` steps from `state`, in fixed order: joint
// actions as listed by the model, then successors in state order.
std::vector<History> enumerate_histories(const model::Psmas& m, int state, int depth);
// Same list, subtrees below the first step built concurrently.
std::vector<History> enumerate_histories_parallel(const model::Psmas& m, int state, int depth);

// Histories whose joint actions are the plan's steps; only the successor
// choice branches.
std::vector<History> plan_histories(const model::Psmas& m, const model::Plan& p);

struct CompatClass {
  model::Plan anchor;
  std::vector<int> coalition;
  std::vector<model::Plan> members;
};

// Two plans of equal length are compatible for a coalition when every
// coalition agent takes the same action at every step.
bool compatible(const model::Plan& a, const model::Plan& b, const std::vector<int>& coalition);

// Every well-formed plan of the anchor's length and start that agrees with
// it on the coalition's actions. Agents outside the coalition range over
// their available actions.
CompatClass compatible_plans(const model::Psmas& m, const model::Plan& p,
                             const std::vector<int>& coalition);

// Sum over steps of (action reward + state reward) times the step's
// transition polynomial.
poly::Polynomial payoff(const model::Psmas& m, const History& h, const model::RewardStructure& r);

// Stepwise judgement of a path formula along a growing prefix.
enum class Verdict { Open, Satisfied, Violated };
using StepTest = std::function<Verdict(int step, int state)>;

// Restricts some agents to the actions a plan prescribes.
struct Anchor {
  const model::Plan* plan = nullptr;
  std::vector<int> agents;
};

struct DecidedPrefix {
  History history;
  bool satisfied = false;
};

// Walks histories from `state` and stops each one at the first step where
// `test` decides it. The returned prefixes are disjoint cylinders. A prefix
// still open after `horizon` steps counts as violated. Anchored agents take
// the plan's action at each step while the plan lasts.
std::vector<DecidedPrefix> decided_prefixes(const model::Psmas& m, int state, int horizon,
                                            const StepTest& test, const Anchor& anchor = {});

}  // namespace respgames::trace
