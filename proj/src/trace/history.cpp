#include "respgames/trace/history.hpp"

#include <algorithm>
#include <atomic>
#include <set>

#include "respgames/errors.hpp"

namespace respgames::trace {

using model::JointAction;
using model::Plan;
using model::Psmas;
using poly::Polynomial;

namespace {

std::atomic<std::size_t> g_path_limit{1'000'000};

void extend(const Psmas& m, History& h, int remaining, std::vector<History>& out) {
  if (remaining == 0) {
    out.push_back(h);
    return;
  }
  int s = h.states.back();
  for (const auto& t : m.transitions(s)) {
    Polynomial saved = h.probability;
    h.states.push_back(t.target);
    h.actions.push_back(t.action);
    h.probability *= t.probability;
    extend(m, h, remaining - 1, out);
    h.probability = std::move(saved);
    h.states.pop_back();
    h.actions.pop_back();
  }
}

}  // namespace

void set_path_limit(std::size_t limit) { g_path_limit = limit; }
std::size_t path_limit() { return g_path_limit; }

void check_path_budget(const Psmas& m, int depth) {
  std::size_t joint = 1;
  for (std::size_t s = 0; s < m.csg().states.size(); ++s) {
    joint = std::max(joint, m.csg().joint_actions(static_cast<int>(s)).size());
  }
  const std::size_t limit = path_limit();
  std::size_t volume = m.csg().states.size();
  for (int d = 0; d < depth; ++d) {
    if (volume > limit / joint) {
      throw ResourceError("path enumeration to depth " + std::to_string(depth) +
                          " exceeds the limit of " + std::to_string(limit));
    }
    volume *= joint;
  }
  if (volume > limit) {
    throw ResourceError("path enumeration to depth " + std::to_string(depth) +
                        " exceeds the limit of " + std::to_string(limit));
  }
}

std::vector<History> enumerate_histories(const Psmas& m, int state, int depth) {
  check_path_budget(m, depth);
  History h;
  h.states.push_back(state);
  h.probability = Polynomial(1);
  std::vector<History> out;
  extend(m, h, depth, out);
  return out;
}

std::vector<History> enumerate_histories_parallel(const Psmas& m, int state, int depth) {
  check_path_budget(m, depth);
  if (depth == 0) return enumerate_histories(m, state, 0);
  const auto& first = m.transitions(state);
  const int n = static_cast<int>(first.size());
  std::vector<std::vector<History>> parts(n);
#pragma omp parallel for schedule(dynamic)
  for (int k = 0; k < n; ++k) {
    History h;
    h.states = {state, first[k].target};
    h.actions = {first[k].action};
    h.probability = first[k].probability;
    extend(m, h, depth - 1, parts[k]);
  }
  std::vector<History> out;
  for (auto& p : parts) {
    out.insert(out.end(), std::make_move_iterator(p.begin()), std::make_move_iterator(p.end()));
  }
  return out;
}

std::vector<History> plan_histories(const Psmas& m, const Plan& p) {
  std::vector<History> frontier(1);
  frontier[0].states.push_back(p.start);
  frontier[0].probability = Polynomial(1);
  for (const JointAction& step : p.steps) {
    std::vector<History> next;
    for (const History& h : frontier) {
      for (const auto& t : m.transitions(h.states.back())) {
        if (t.action != step) continue;
        History g = h;
        g.states.push_back(t.target);
        g.actions.push_back(step);
        g.probability *= t.probability;
        next.push_back(std::move(g));
      }
    }
    frontier = std::move(next);
  }
  return frontier;
}

bool compatible(const Plan& a, const Plan& b, const std::vector<int>& coalition) {
  if (a.start != b.start || a.steps.size() != b.steps.size()) return false;
  for (std::size_t j = 0; j < a.steps.size(); ++j) {
    for (int i : coalition) {
      if (a.steps[j][i] != b.steps[j][i]) return false;
    }
  }
  return true;
}

namespace {

// States reachable at each step when following the plan's joint actions.
bool well_formed(const Psmas& m, const Plan& p) {
  std::set<int> current{p.start};
  for (const auto& step : p.steps) {
    std::set<int> next;
    for (int s : current) {
      if (!m.csg().is_available(s, step)) return false;
      for (const auto& [t, q] : m.csg().distribution(s, step)) {
        if (q != 0) next.insert(t);
      }
    }
    current = std::move(next);
  }
  return true;
}

}  // namespace

CompatClass compatible_plans(const Psmas& m, const Plan& p, const std::vector<int>& coalition) {
  const auto& c = m.csg();
  const int n_agents = static_cast<int>(c.agents.size());
  std::vector<bool> fixed(n_agents, false);
  for (int i : coalition) fixed[i] = true;

  // Every action an agent can take anywhere, in first-seen order.
  std::vector<std::vector<int>> choices(n_agents);
  for (int i = 0; i < n_agents; ++i) {
    for (std::size_t s = 0; s < c.states.size(); ++s) {
      for (int a : c.available[i][s]) {
        if (std::find(choices[i].begin(), choices[i].end(), a) == choices[i].end()) {
          choices[i].push_back(a);
        }
      }
    }
  }

  // Options per step, as a list of joint actions.
  std::vector<std::vector<JointAction>> per_step;
  std::size_t volume = 1;
  for (const auto& anchor_step : p.steps) {
    std::vector<JointAction> opts{JointAction{}};
    for (int i = 0; i < n_agents; ++i) {
      std::vector<JointAction> next;
      const std::vector<int> own = fixed[i] ? std::vector<int>{anchor_step[i]} : choices[i];
      for (const auto& prefix : opts) {
        for (int a : own) {
          JointAction j = prefix;
          j.push_back(a);
          next.push_back(std::move(j));
        }
      }
      opts = std::move(next);
    }
    if (volume > path_limit() / std::max<std::size_t>(opts.size(), 1)) {
      throw ResourceError("compatible plan class exceeds the limit of " + std::to_string(path_limit()));
    }
    volume *= opts.size();
    per_step.push_back(std::move(opts));
  }

  CompatClass out;
  out.anchor = p;
  out.coalition = coalition;
  std::vector<std::size_t> idx(per_step.size(), 0);
  while (true) {
    Plan q;
    q.start = p.start;
    for (std::size_t j = 0; j < per_step.size(); ++j) q.steps.push_back(per_step[j][idx[j]]);
    if (q.steps == p.steps) q.name = p.name;
    if (well_formed(m, q)) out.members.push_back(std::move(q));
    std::size_t j = per_step.size();
    while (j > 0) {
      --j;
      if (++idx[j] < per_step[j].size()) break;
      idx[j] = 0;
      if (j == 0) return out;
    }
    if (per_step.empty()) return out;
  }
}

Polynomial payoff(const Psmas& m, const History& h, const model::RewardStructure& r) {
  Polynomial total;
  for (std::size_t j = 0; j < h.actions.size(); ++j) {
    poly::Rational w = r.action_value(h.actions[j]) + r.state_value(h.states[j]);
    if (w == 0) continue;
    Polynomial step = m.transition(h.states[j], h.actions[j], h.states[j + 1]);
    step *= w;
    total += step;
  }
  return total;
}

namespace {

struct Walker {
  const Psmas& m;
  int horizon;
  const StepTest& test;
  const Anchor& anchor;
  std::vector<DecidedPrefix>& out;

  bool allowed(int step, const JointAction& a) const {
    if (!anchor.plan || step >= static_cast<int>(anchor.plan->steps.size())) return true;
    const JointAction& want = anchor.plan->steps[step];
    for (int i : anchor.agents) {
      if (a[i] != want[i]) return false;
    }
    return true;
  }

  void walk(History& h) {
    const int step = static_cast<int>(h.actions.size());
    const int s = h.states.back();
    Verdict v = test(step, s);
    if (v == Verdict::Open && step >= horizon) v = Verdict::Violated;
    if (v != Verdict::Open) {
      out.push_back(DecidedPrefix{h, v == Verdict::Satisfied});
      return;
    }
    for (const auto& t : m.transitions(s)) {
      if (!allowed(step, t.action)) continue;
      Polynomial saved = h.probability;
      h.states.push_back(t.target);
      h.actions.push_back(t.action);
      h.probability *= t.probability;
      walk(h);
      h.probability = std::move(saved);
      h.states.pop_back();
      h.actions.pop_back();
    }
  }
};

}  // namespace

std::vector<DecidedPrefix> decided_prefixes(const Psmas& m, int state, int horizon,
                                            const StepTest& test, const Anchor& anchor) {
  check_path_budget(m, horizon);
  std::vector<DecidedPrefix> out;
  History h;
  h.states.push_back(state);
  h.probability = Polynomial(1);
  Walker w{m, horizon, test, anchor, out};
  w.walk(h);
  return out;
}

}  // namespace respgames::trace
