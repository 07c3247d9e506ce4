#include "respgames/model/psmas.hpp"

#include <algorithm>

#include "respgames/errors.hpp"

namespace respgames::model {

using poly::ParamId;
using poly::ParamValuation;
using poly::Polynomial;
using poly::Rational;

std::vector<ParamId> Psmas::free_params(int agent) const {
  std::vector<ParamId> out;
  for (ParamId id : free_) {
    if (id.agent == agent) out.push_back(id);
  }
  return out;
}

bool Psmas::is_dependent(ParamId id) const {
  const Slot s{id.agent, id.state};
  return slot_actions(s).back() == id.action;
}

const std::vector<int>& Psmas::slot_actions(const Slot& s) const {
  return game_.csg.available[s.agent][s.state];
}

ParamId Psmas::param(int agent, int state, int action) const {
  return ParamId{agent, representative(agent, state), action};
}

const Polynomial& Psmas::strategy(int agent, int state, int action) const {
  auto it = strategy_.find(param(agent, state, action));
  if (it == strategy_.end()) {
    throw ModelError("action " + csg().actions[action] + " not available to " +
                     csg().agents[agent] + " at " + csg().states[state]);
  }
  return it->second;
}

Polynomial Psmas::transition(int state, const JointAction& a, int target) const {
  for (const auto& t : transitions_[state]) {
    if (t.target == target && t.action == a) return t.probability;
  }
  return Polynomial();
}

const Plan& Psmas::plan(std::string_view name) const {
  const Plan* p = game_.find_plan(name);
  if (!p) throw ModelError("unknown plan '" + std::string(name) + "'");
  return *p;
}

Psmas build_psmas(Game g) {
  g.csg.validate();
  const Csg& c = g.csg;
  const int n_agents = static_cast<int>(c.agents.size());
  const int n_states = static_cast<int>(c.states.size());
  if (g.shared_state.size() != c.agents.size()) throw ModelError("shared-state table size mismatch");

  Psmas m;
  for (int i = 0; i < n_agents; ++i) {
    for (int s = 0; s < n_states; ++s) {
      int rep = g.shared_state[i][s];
      if (c.available[i][s] != c.available[i][rep]) {
        throw ModelError("tied states " + c.states[s] + " and " + c.states[rep] + " offer agent " +
                         c.agents[i] + " different actions");
      }
      if (rep != s) continue;
      m.slots_.push_back(Slot{i, s});
      const auto& acts = c.available[i][s];
      Polynomial rest(1);
      for (std::size_t k = 0; k < acts.size(); ++k) {
        ParamId id{i, s, acts[k]};
        m.params_.push_back(id);
        m.names_.add(id, "x[" + c.agents[i] + "," + c.states[s] + "," + c.actions[acts[k]] + "]");
        if (k + 1 < acts.size()) {
          m.free_.push_back(id);
          Polynomial x = Polynomial::variable(id);
          rest -= x;
          m.strategy_.emplace(id, std::move(x));
        } else {
          m.strategy_.emplace(id, rest);
        }
      }
    }
  }
  std::sort(m.params_.begin(), m.params_.end());
  std::sort(m.free_.begin(), m.free_.end());

  for (const auto& alias : g.aliases) {
    ParamId id{alias.agent, g.shared_state[alias.agent][alias.state], alias.action};
    if (!std::binary_search(m.params_.begin(), m.params_.end(), id)) {
      throw ModelError("parameter alias " + alias.name + " names an unavailable action");
    }
    m.names_.add(id, alias.name);
  }

  m.game_ = std::move(g);
  const Csg& cc = m.game_.csg;
  m.transitions_.assign(n_states, {});
  for (int s = 0; s < n_states; ++s) {
    for (const auto& a : cc.joint_actions(s)) {
      Polynomial strat(1);
      for (int i = 0; i < n_agents; ++i) strat *= m.strategy(i, s, a[i]);
      for (const auto& [t, p] : cc.distribution(s, a)) {
        if (p == 0) continue;
        Polynomial prob = strat;
        prob *= p;
        if (prob.is_zero()) continue;
        m.transitions_[s].push_back(Transition{a, t, p, std::move(prob)});
      }
    }
  }
  return m;
}

Psmas build_psmas(const Csg& g) { return build_psmas(make_game(g)); }

namespace {

std::string slot_location(const Psmas& m, const Slot& s) {
  return m.csg().agents[s.agent] + "@" + m.csg().states[s.state];
}

}  // namespace

AdmissibilityReport check_admissible(const Psmas& m, const ParamValuation& v, bool partial) {
  AdmissibilityReport report;
  auto violate = [&](int cond, std::string where, const Rational& value) {
    report.ok = false;
    report.violations.push_back(Violation{cond, std::move(where), value});
  };

  // Action probability per parameter, explicit where given, derived otherwise.
  std::map<ParamId, Rational> prob;
  std::vector<Slot> complete;
  for (const Slot& slot : m.slots()) {
    const auto& acts = m.slot_actions(slot);
    bool missing = false;
    Rational sum = 0;
    for (std::size_t k = 0; k + 1 < acts.size(); ++k) {
      ParamId id{slot.agent, slot.state, acts[k]};
      auto it = v.find(id);
      if (it == v.end()) {
        if (!partial) throw MissingParameterError(m.param_name(id));
        missing = true;
        continue;
      }
      prob[id] = it->second;
      sum += it->second;
      if (it->second < 0 || it->second > 1) violate(2, m.param_name(id), it->second);
    }
    ParamId dep{slot.agent, slot.state, acts.back()};
    auto explicit_dep = v.find(dep);
    if (explicit_dep != v.end()) {
      prob[dep] = explicit_dep->second;
      if (explicit_dep->second < 0 || explicit_dep->second > 1) {
        violate(2, m.param_name(dep), explicit_dep->second);
      }
      if (!missing && sum + explicit_dep->second != 1) {
        violate(3, slot_location(m, slot), sum + explicit_dep->second);
      }
    } else if (!missing) {
      prob[dep] = 1 - sum;
      if (1 - sum < 0 || 1 - sum > 1) violate(2, m.param_name(dep) + " (derived)", 1 - sum);
    }
    if (!missing) complete.push_back(slot);
  }

  for (int s = 0; s < static_cast<int>(m.csg().states.size()); ++s) {
    for (const auto& t : m.transitions(s)) {
      Rational value = t.branch;
      bool known = true;
      for (std::size_t i = 0; i < t.action.size() && known; ++i) {
        auto it = prob.find(m.param(static_cast<int>(i), s, t.action[i]));
        if (it == prob.end()) {
          known = false;
        } else {
          value *= it->second;
        }
      }
      if (known && (value < 0 || value > 1)) {
        violate(1, m.csg().states[s] + " " + m.csg().render(t.action) + " -> " +
                       m.csg().states[t.target], value);
      }
    }
  }
  return report;
}

ParamValuation free_part(const Psmas& m, const ParamValuation& v) {
  ParamValuation out;
  for (const auto& [id, q] : v) {
    if (std::binary_search(m.free_params().begin(), m.free_params().end(), id)) out.emplace(id, q);
  }
  return out;
}

ParamValuation with_dependents(const Psmas& m, const ParamValuation& v) {
  ParamValuation out = v;
  for (const Slot& slot : m.slots()) {
    const auto& acts = m.slot_actions(slot);
    ParamId dep{slot.agent, slot.state, acts.back()};
    if (out.count(dep)) continue;
    out[dep] = poly::poly_eval(m.strategy(slot.agent, slot.state, acts.back()), v, &m.names());
  }
  return out;
}

}  // namespace respgames::model
