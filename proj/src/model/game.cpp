#include "respgames/model/game.hpp"

#include <algorithm>

#include "respgames/errors.hpp"

namespace respgames::model {

namespace {

int index_of(const std::vector<std::string>& names, std::string_view name) {
  auto it = std::find(names.begin(), names.end(), name);
  return it == names.end() ? -1 : static_cast<int>(it - names.begin());
}

}  // namespace

int Csg::agent_index(std::string_view name) const { return index_of(agents, name); }
int Csg::state_index(std::string_view name) const { return index_of(states, name); }
int Csg::action_index(std::string_view name) const { return index_of(actions, name); }

std::set<std::string> Csg::propositions() const {
  std::set<std::string> out;
  for (const auto& l : labels) out.insert(l.begin(), l.end());
  return out;
}

bool Csg::has_label(int state, const std::string& prop) const {
  return labels[state].count(prop) > 0;
}

std::vector<JointAction> Csg::joint_actions(int state) const {
  std::vector<JointAction> out{JointAction{}};
  for (std::size_t i = 0; i < agents.size(); ++i) {
    std::vector<JointAction> next;
    next.reserve(out.size() * available[i][state].size());
    for (const auto& prefix : out) {
      for (int a : available[i][state]) {
        JointAction j = prefix;
        j.push_back(a);
        next.push_back(std::move(j));
      }
    }
    out = std::move(next);
  }
  return out;
}

bool Csg::is_available(int state, const JointAction& a) const {
  if (a.size() != agents.size()) return false;
  for (std::size_t i = 0; i < agents.size(); ++i) {
    const auto& av = available[i][state];
    if (std::find(av.begin(), av.end(), a[i]) == av.end()) return false;
  }
  return true;
}

const Distribution& Csg::distribution(int state, const JointAction& a) const {
  auto it = delta.find({state, a});
  if (it == delta.end()) {
    throw ModelError("no transition for " + render(a) + " at state " + states[state]);
  }
  return it->second;
}

std::string Csg::render(const JointAction& a) const {
  std::string out = "(";
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (i) out += ", ";
    out += actions[a[i]];
  }
  return out + ")";
}

void Csg::validate() const {
  if (agents.empty()) throw ModelError("model declares no agents");
  if (states.empty()) throw ModelError("model declares no states");
  if (initial < 0 || initial >= static_cast<int>(states.size())) {
    throw ModelError("initial state out of range");
  }
  if (labels.size() != states.size()) throw ModelError("label table size mismatch");
  for (std::size_t i = 0; i < agents.size(); ++i) {
    for (std::size_t s = 0; s < states.size(); ++s) {
      if (available[i][s].empty()) {
        throw ModelError("agent " + agents[i] + " has no action at state " + states[s]);
      }
    }
  }
  for (std::size_t s = 0; s < states.size(); ++s) {
    for (const auto& a : joint_actions(static_cast<int>(s))) {
      const Distribution& d = distribution(static_cast<int>(s), a);
      poly::Rational total = 0;
      for (const auto& [t, p] : d) {
        if (p < 0 || p > 1) {
          throw ModelError("probability " + poly::to_string(p) + " outside [0,1] at " + states[s] +
                           " " + render(a));
        }
        total += p;
      }
      if (total != 1) {
        throw ModelError("distribution at " + states[s] + " " + render(a) + " sums to " +
                         poly::to_string(total));
      }
    }
  }
  for (const auto& [key, d] : delta) {
    if (!is_available(key.first, key.second)) {
      throw ModelError("transition for unavailable joint action " + render(key.second) +
                       " at state " + states[key.first]);
    }
  }
}

poly::Rational RewardStructure::state_value(int state) const {
  if (state < static_cast<int>(state_reward.size())) return state_reward[state];
  return 0;
}

poly::Rational RewardStructure::action_value(const JointAction& a) const {
  if (auto it = joint_action_reward.find(a); it != joint_action_reward.end()) return it->second;
  if (agent < static_cast<int>(a.size())) {
    if (auto it = own_action_reward.find(a[agent]); it != own_action_reward.end()) {
      return it->second;
    }
  }
  return 0;
}

const Plan* Game::find_plan(std::string_view name) const {
  for (const auto& p : plans) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

Game make_game(Csg csg) {
  Game g;
  g.csg = std::move(csg);
  const auto& c = g.csg;
  g.shared_state.assign(c.agents.size(), {});
  for (std::size_t i = 0; i < c.agents.size(); ++i) {
    for (std::size_t s = 0; s < c.states.size(); ++s) {
      g.shared_state[i].push_back(static_cast<int>(s));
    }
    RewardStructure r;
    r.agent = static_cast<int>(i);
    r.state_reward.assign(c.states.size(), 0);
    g.rewards.push_back(std::move(r));
  }
  return g;
}

}  // namespace respgames::model
