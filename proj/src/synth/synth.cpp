#include "respgames/synth/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "respgames/checker/search.hpp"
#include "respgames/errors.hpp"
#include "respgames/poly/compiled.hpp"
#include "respgames/poly/parse.hpp"
#include "respgames/trace/history.hpp"

namespace respgames::synth {

using model::Psmas;
using model::Slot;
using poly::ParamId;
using poly::ParamValuation;
using poly::Polynomial;
using poly::Rational;
using poly::RationalFunction;

Polynomial payoff_valuation(const Psmas& m, const model::Plan& plan, int agent) {
  Polynomial total;
  for (const auto& h : trace::plan_histories(m, plan)) total += trace::payoff(m, h, m.reward(agent));
  return total;
}

Polynomial payoff_valuation(const Psmas& m, int state, int horizon, int agent) {
  Polynomial total;
  for (const auto& h : trace::enumerate_histories(m, state, horizon)) {
    total += trace::payoff(m, h, m.reward(agent));
  }
  return total;
}

namespace {

std::vector<int> all_agents(const Psmas& m) {
  std::vector<int> out(m.csg().agents.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = static_cast<int>(i);
  return out;
}

}  // namespace

RationalFunction resp_valuation(const Psmas& m, int state, int agent, const model::Plan& plan,
                                const logic::PathFormula& psi, const Rational& theta) {
  checker::Checker c(m);
  RationalFunction out = c.car_degree(state, agent, plan, psi).value;
  if (theta != 0) out += RationalFunction(theta) * c.cpr_degree(state, agent, plan, psi, all_agents(m)).value;
  return out;
}

Rational AgentUtility::evaluate(const ParamValuation& v) const {
  Rational total = poly::poly_eval(payoff, v);
  for (const auto& t : terms) {
    Rational den = poly::poly_eval(t.denominator, v);
    if (den == 0) continue;
    total += t.weight * poly::poly_eval(t.numerator, v) / den;
  }
  total.canonicalize();
  return total;
}

RationalFunction AgentUtility::function() const {
  RationalFunction total(payoff);
  for (const auto& t : terms) {
    if (t.denominator.is_zero()) continue;
    Polynomial num = t.numerator;
    num *= t.weight;
    total += RationalFunction(num, t.denominator);
  }
  return total;
}

std::set<ParamId> AgentUtility::variables() const {
  std::set<ParamId> out = payoff.variables();
  for (const auto& t : terms) {
    for (ParamId id : t.numerator.variables()) out.insert(id);
    for (ParamId id : t.denominator.variables()) out.insert(id);
  }
  return out;
}

std::vector<Slot> UtilityModel::relevant_slots() const {
  std::set<Slot> slots;
  for (const auto& a : agents) {
    for (ParamId id : a.variables()) slots.insert(Slot{id.agent, id.state});
  }
  return {slots.begin(), slots.end()};
}

UtilityModel build_utility(const Psmas& m, int state, int horizon, const UtilityConfig& cfg,
                           const std::optional<ResponsibilitySpec>& resp) {
  UtilityModel u;
  u.m = &m;
  u.cfg = cfg;
  u.state = state;
  u.horizon = horizon;
  u.resp = resp;
  checker::Checker c(m);
  const int n = static_cast<int>(m.csg().agents.size());
  for (int i = 0; i < n; ++i) {
    AgentUtility a;
    if (cfg.lambda1 != 0) {
      a.payoff = payoff_valuation(m, state, horizon, i);
      a.payoff *= cfg.lambda1;
    }
    if (resp && cfg.lambda2 != 0) {
      auto add = [&](const checker::DegreeResult& d, const Rational& w) {
        if (!d.kappa || w == 0) return;
        a.terms.push_back(UtilityTerm{w, d.numerator, d.denominator});
      };
      // A degree that is 0/0 everywhere contributes nothing.
      try {
        add(c.car_degree(resp->state, i, resp->plan, *resp->psi), -cfg.lambda2);
      } catch (const DegenerateQueryError&) {
      }
      if (cfg.theta != 0) {
        try {
          add(c.cpr_degree(resp->state, i, resp->plan, *resp->psi, all_agents(m)), -cfg.lambda2 * cfg.theta);
        } catch (const DegenerateQueryError&) {
        }
      }
    }
    u.agents.push_back(std::move(a));
  }
  return u;
}

RationalFunction utility(const UtilityModel& u, int agent) { return u.agents[agent].function(); }

ParamValuation NeSystem::complete(const ParamValuation& point) const {
  ParamValuation v = point;
  for (const auto& [id, q] : pinned) v[id] = q;
  for (const auto& [id, p] : eliminated) v[id] = poly::poly_eval(p, v);
  return v;
}

NeSystem parse_ne_system(const std::vector<std::string>& equations) {
  NeSystem sys;
  for (const auto& text : equations) {
    auto eq = text.find('=');
    RationalFunction lhs = poly::parse_rational_function(text.substr(0, eq), sys.names, true);
    RationalFunction rhs;
    if (eq != std::string::npos) rhs = poly::parse_rational_function(text.substr(eq + 1), sys.names, true);
    RationalFunction diff = lhs - rhs;
    if (!diff.den().is_constant()) sys.side_conditions.push_back(diff.den());
    if (!diff.num().is_zero()) sys.equations.push_back(diff.num());
  }
  // Variables in order of declaration.
  std::vector<std::pair<ParamId, std::string>> vars;
  for (const auto& [name, id] : sys.names.names()) vars.emplace_back(id, name);
  std::sort(vars.begin(), vars.end());
  for (const auto& [id, name] : vars) sys.variables.push_back(id);
  return sys;
}

namespace {

// Vertex of a slot: the free parameters that make `action` certain.
std::map<ParamId, Polynomial> vertex(const Psmas& m, const Slot& slot, int action) {
  std::map<ParamId, Polynomial> out;
  const auto& acts = m.slot_actions(slot);
  for (std::size_t k = 0; k + 1 < acts.size(); ++k) {
    out[m.param(slot.agent, slot.state, acts[k])] = Polynomial(acts[k] == action ? 1 : 0);
  }
  return out;
}

RationalFunction substituted_utility(const AgentUtility& a, const std::map<ParamId, Polynomial>& bindings,
                                     std::vector<Polynomial>& side) {
  RationalFunction total(poly::poly_substitute(a.payoff, bindings));
  for (const auto& t : a.terms) {
    Polynomial den = poly::poly_substitute(t.denominator, bindings);
    if (den.is_zero()) continue;
    Polynomial num = poly::poly_substitute(t.numerator, bindings);
    num *= t.weight;
    if (!den.is_constant()) side.push_back(den);
    total += RationalFunction(num, den);
  }
  return total;
}

}  // namespace

NeSystem build_ne_system(const UtilityModel& u, const Support& support) {
  const Psmas& m = *u.m;
  NeSystem sys;
  sys.names = m.names();
  sys.support = support;

  const auto slots = u.relevant_slots();
  // Substitution that applies the support to every slot.
  std::map<ParamId, Polynomial> base;
  std::map<Slot, std::vector<int>> supported;
  for (const Slot& slot : slots) {
    const auto& acts = m.slot_actions(slot);
    auto it = support.find(slot);
    std::vector<int> sup = it == support.end() ? acts : it->second;
    if (sup.empty()) throw ModelError("empty support for a slot of agent " + m.csg().agents[slot.agent]);
    supported[slot] = sup;
    auto on = [&](int a) { return std::find(sup.begin(), sup.end(), a) != sup.end(); };

    std::vector<ParamId> free;
    for (std::size_t k = 0; k + 1 < acts.size(); ++k) {
      ParamId id = m.param(slot.agent, slot.state, acts[k]);
      if (on(acts[k])) {
        free.push_back(id);
      } else {
        sys.pinned[id] = 0;
        base[id] = Polynomial(0);
      }
    }
    if (!on(acts.back()) && !free.empty()) {
      // The dependent action is off, so the supported ones sum to 1.
      ParamId last = free.back();
      free.pop_back();
      if (free.empty()) {
        sys.pinned[last] = 1;
        base[last] = Polynomial(1);
      } else {
        Polynomial rest(1);
        for (ParamId id : free) rest -= Polynomial::variable(id);
        sys.eliminated[last] = rest;
        base[last] = rest;
      }
    }
    std::vector<std::size_t> group;
    for (ParamId id : free) {
      group.push_back(sys.variables.size());
      sys.variables.push_back(id);
    }
    if (group.size() >= 2) sys.groups.push_back(group);
  }

  for (const Slot& slot : slots) {
    const auto& sup = supported[slot];
    if (sup.size() < 2) continue;
    const AgentUtility& a = u.agents[slot.agent];
    std::vector<RationalFunction> values;
    for (int action : sup) {
      auto bindings = vertex(m, slot, action);
      for (const auto& [id, p] : base) {
        if (id.agent == slot.agent && id.state == slot.state) continue;
        bindings[id] = p;
      }
      values.push_back(substituted_utility(a, bindings, sys.side_conditions));
    }
    for (std::size_t k = 0; k + 1 < values.size(); ++k) {
      RationalFunction diff = values[k] - values[k + 1];
      if (!diff.num().is_zero()) sys.equations.push_back(diff.num());
    }
  }
  return sys;
}

std::vector<Support> enumerate_supports(const UtilityModel& u) {
  const Psmas& m = *u.m;
  std::vector<Support> out{Support{}};
  for (const Slot& slot : u.relevant_slots()) {
    const auto& acts = m.slot_actions(slot);
    std::vector<Support> next;
    // Larger supports first, so full support is tried before the vertices.
    std::vector<std::vector<int>> subsets;
    for (std::size_t mask = (std::size_t{1} << acts.size()) - 1; mask >= 1; --mask) {
      std::vector<int> sub;
      for (std::size_t k = 0; k < acts.size(); ++k) {
        if ((mask >> k) & 1) sub.push_back(acts[k]);
      }
      subsets.push_back(sub);
    }
    std::stable_sort(subsets.begin(), subsets.end(),
                     [](const auto& a, const auto& b) { return a.size() > b.size(); });
    for (const auto& s : out) {
      for (const auto& sub : subsets) {
        Support t = s;
        t[slot] = sub;
        next.push_back(std::move(t));
      }
    }
    out = std::move(next);
  }
  return out;
}

namespace {

// Solves A x = b in place by Gaussian elimination with partial pivoting.
bool solve_linear(std::vector<std::vector<double>>& a, std::vector<double>& b) {
  const std::size_t n = b.size();
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t p = c;
    for (std::size_t r = c + 1; r < n; ++r) {
      if (std::abs(a[r][c]) > std::abs(a[p][c])) p = r;
    }
    if (std::abs(a[p][c]) < 1e-300) return false;
    std::swap(a[p], a[c]);
    std::swap(b[p], b[c]);
    for (std::size_t r = c + 1; r < n; ++r) {
      double f = a[r][c] / a[c][c];
      for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
      b[r] -= f * b[c];
    }
  }
  for (std::size_t c = n; c-- > 0;) {
    for (std::size_t k = c + 1; k < n; ++k) b[c] -= a[c][k] * b[k];
    b[c] /= a[c][c];
  }
  return true;
}

struct Compiled {
  std::vector<poly::CompiledPolynomial> eqs;
  std::vector<std::vector<poly::CompiledPolynomial>> jac;
  std::vector<poly::CompiledPolynomial> side;
};

void project(const NeSystem& sys, std::vector<double>& x) {
  for (double& v : x) v = std::clamp(v, 0.0, 1.0);
  for (const auto& g : sys.groups) {
    double s = 0;
    for (std::size_t i : g) s += x[i];
    if (s > 1.0) {
      for (std::size_t i : g) x[i] /= s;
    }
  }
}

double sum_squares(const Compiled& c, const std::vector<double>& x, std::vector<double>& e) {
  double f = 0;
  for (std::size_t k = 0; k < c.eqs.size(); ++k) {
    e[k] = c.eqs[k](x);
    f += e[k] * e[k];
  }
  return f;
}

std::vector<double> levenberg_marquardt(const NeSystem& sys, const Compiled& c, std::vector<double> x) {
  const std::size_t d = x.size();
  const std::size_t n = c.eqs.size();
  std::vector<double> e(n), ey(n);
  double fx = sum_squares(c, x, e);
  double mu = 1e-3;
  for (int it = 0; it < 500 && fx > 1e-32; ++it) {
    std::vector<std::vector<double>> jm(n, std::vector<double>(d));
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < d; ++i) jm[k][i] = c.jac[k][i](x);
    }
    std::vector<std::vector<double>> a(d, std::vector<double>(d, 0.0));
    std::vector<double> g(d, 0.0);
    for (std::size_t i = 0; i < d; ++i) {
      for (std::size_t j = 0; j < d; ++j) {
        for (std::size_t k = 0; k < n; ++k) a[i][j] += jm[k][i] * jm[k][j];
      }
      for (std::size_t k = 0; k < n; ++k) g[i] -= jm[k][i] * e[k];
    }
    bool stepped = false;
    while (mu < 1e12) {
      auto lhs = a;
      auto step = g;
      for (std::size_t i = 0; i < d; ++i) lhs[i][i] += mu * (a[i][i] + 1e-12);
      if (solve_linear(lhs, step)) {
        std::vector<double> y(d);
        for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + step[i];
        project(sys, y);
        double fy = sum_squares(c, y, ey);
        if (fy < fx) {
          double moved = 0;
          for (std::size_t i = 0; i < d; ++i) moved = std::max(moved, std::abs(y[i] - x[i]));
          x = y;
          e = ey;
          fx = fy;
          mu = std::max(mu / 3, 1e-15);
          stepped = moved > 1e-17;
          break;
        }
      }
      mu *= 4;
    }
    if (!stepped) break;
  }
  return x;
}

ParamValuation to_valuation(const NeSystem& sys, const std::vector<double>& x) {
  ParamValuation v;
  for (std::size_t i = 0; i < x.size(); ++i) {
    double r = std::round(x[i]);
    v[sys.variables[i]] = std::abs(x[i] - r) < 1e-12 ? Rational(static_cast<long>(r)) : poly::from_double(x[i]);
  }
  return v;
}

double max_norm(const ParamValuation& a, const ParamValuation& b) {
  double d = 0;
  for (const auto& [id, q] : a) {
    auto it = b.find(id);
    if (it == b.end()) return std::numeric_limits<double>::infinity();
    d = std::max(d, std::abs(poly::to_double(q) - poly::to_double(it->second)));
  }
  return d;
}

}  // namespace

std::vector<NeSolution> solve_ne(const NeSystem& sys, const SolveOptions& opt) {
  const std::size_t d = sys.variables.size();
  if (d > checker::kMaxSearchDimension) {
    throw UnsupportedQueryError("equilibrium system has " + std::to_string(d) +
                                " variables; the solver handles at most " +
                                std::to_string(checker::kMaxSearchDimension));
  }
  Compiled c;
  for (const auto& eq : sys.equations) {
    c.eqs.emplace_back(eq, sys.variables);
    std::vector<poly::CompiledPolynomial> row;
    for (ParamId id : sys.variables) row.emplace_back(poly::poly_derivative(eq, id), sys.variables);
    c.jac.push_back(std::move(row));
  }
  for (const auto& s : sys.side_conditions) c.side.emplace_back(s, sys.variables);

  const std::size_t starts = (d == 0 || sys.equations.empty()) ? 1 : std::max<std::size_t>(opt.starts, 1);
  std::vector<std::vector<double>> ends(starts);
  const std::size_t offset = static_cast<std::size_t>(opt.seed % 1000003) * 97;
#pragma omp parallel for schedule(dynamic) if (opt.parallel)
  for (std::size_t k = 0; k < starts; ++k) {
    std::vector<double> x = checker::halton_point(offset + k, d);
    project(sys, x);
    ends[k] = sys.equations.empty() ? x : levenberg_marquardt(sys, c, x);
  }

  std::vector<NeSolution> out;
  for (std::size_t k = 0; k < starts; ++k) {
    const auto& x = ends[k];
    bool degenerate = false;
    for (const auto& s : c.side) {
      if (std::abs(s(x)) < 1e-12) degenerate = true;
    }
    if (degenerate) continue;
    ParamValuation point = to_valuation(sys, x);
    double residual = 0;
    for (const auto& eq : sys.equations) {
      residual = std::max(residual, std::abs(poly::to_double(poly::poly_eval(eq, point))));
    }
    if (residual > opt.tolerance) continue;
    bool seen = std::any_of(out.begin(), out.end(),
                            [&](const NeSolution& s) { return max_norm(point, s.valuation) < 1e-6; });
    if (seen) continue;
    NeSolution sol;
    sol.residual = residual;
    sol.support = sys.support;
    sol.start = k;
    ParamValuation full = sys.complete(point);
    if (opt.verify) {
      sol.gap = opt.verify(full);
      if (*sol.gap > opt.gap_tolerance) continue;
    }
    sol.valuation = std::move(full);
    out.push_back(std::move(sol));
  }
  return out;
}

Verification verify_ne(const UtilityModel& u, const ParamValuation& candidate, double epsilon) {
  const Psmas& m = *u.m;
  Verification best;
  Rational top;
  bool any = false;
  for (const Slot& slot : u.relevant_slots()) {
    const AgentUtility& a = u.agents[slot.agent];
    Rational base = a.evaluate(candidate);
    for (int action : m.slot_actions(slot)) {
      ParamValuation v = candidate;
      for (const auto& [id, p] : vertex(m, slot, action)) v[id] = *p.as_constant();
      Rational gain = a.evaluate(v) - base;
      if (!any || gain > top) {
        any = true;
        top = gain;
        best.agent = slot.agent;
        best.slot = slot;
        best.action = action;
      }
    }
  }
  best.gap = any ? std::max(0.0, poly::to_double(top)) : 0.0;
  best.ok = best.gap <= epsilon;
  return best;
}

namespace {

// Slots outside the utilities get the uniform distribution.
ParamValuation fill_irrelevant(const UtilityModel& u, ParamValuation v) {
  const Psmas& m = *u.m;
  for (const Slot& slot : m.slots()) {
    const auto& acts = m.slot_actions(slot);
    Rational share(1, static_cast<long>(acts.size()));
    share.canonicalize();
    for (std::size_t k = 0; k + 1 < acts.size(); ++k) v.emplace(m.param(slot.agent, slot.state, acts[k]), share);
  }
  return v;
}

}  // namespace

std::vector<NeSolution> synthesize(const UtilityModel& u, const SolveOptions& opt) {
  SolveOptions o = opt;
  o.verify = [&](const ParamValuation& v) { return verify_ne(u, fill_irrelevant(u, v)).gap; };
  std::vector<NeSolution> out;
  for (const Support& s : enumerate_supports(u)) {
    NeSystem sys = build_ne_system(u, s);
    for (auto& sol : solve_ne(sys, o)) {
      sol.valuation = fill_irrelevant(u, sol.valuation);
      bool seen = std::any_of(out.begin(), out.end(),
                              [&](const NeSolution& t) { return max_norm(sol.valuation, t.valuation) < 1e-6; });
      if (!seen) out.push_back(std::move(sol));
    }
  }
  return out;
}

}  // namespace respgames::synth
