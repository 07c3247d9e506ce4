#include "respgames/checker/checker.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "respgames/checker/search.hpp"
#include "respgames/errors.hpp"
#include "respgames/poly/compiled.hpp"
#include "respgames/trace/history.hpp"

namespace respgames::checker {

using logic::CompareOp;
using logic::PathFormula;
using logic::StateFormula;
using poly::ParamId;
using poly::ParamValuation;
using poly::Polynomial;
using poly::Rational;
using poly::RationalFunction;
using trace::Verdict;

std::optional<bool> Region::decided() const {
  if (infinite) return cmp == CompareOp::Ge || cmp == CompareOp::Gt;
  if (auto c = value.as_constant()) return logic::compare(*c, cmp, bound);
  return std::nullopt;
}

std::string Region::to_string(const poly::ParamTable* names) const {
  std::string lhs = infinite ? "inf" : poly::to_string(value, names);
  return lhs + " " + logic::to_string(cmp) + " " + poly::to_string(bound);
}

std::string ExtendedValue::to_string(const poly::ParamTable* names) const {
  return infinite ? "inf" : poly::to_string(value, names);
}

std::string to_string(const ParamValuation& v, const poly::ParamTable* names) {
  std::string out;
  for (const auto& [id, q] : v) {
    if (!out.empty()) out += ", ";
    out += (names ? names->name(id) : poly::default_param_name(id)) + "=" + poly::to_string(q);
  }
  return out;
}

Rational evaluate_degree(const DegreeResult& d, const ParamValuation& v, const poly::ParamTable* names) {
  if (!d.kappa) return Rational(0);
  Rational den = poly::poly_eval(d.denominator, v, names);
  if (den == 0) return Rational(0);
  Rational q = poly::poly_eval(d.numerator, v, names) / den;
  q.canonicalize();
  return q;
}

namespace {

trace::StepTest step_test(const PathFormula& psi, std::vector<bool> left, std::vector<bool> right) {
  if (psi.kind == PathFormula::Kind::Next) {
    return [right = std::move(right)](int step, int s) {
      if (step == 0) return Verdict::Open;
      return right[s] ? Verdict::Satisfied : Verdict::Violated;
    };
  }
  const int k = psi.bound;
  return [k, left = std::move(left), right = std::move(right)](int step, int s) {
    if (right[s]) return Verdict::Satisfied;
    if (step >= k || !left[s]) return Verdict::Violated;
    return Verdict::Open;
  };
}

Polynomial sum_where(const std::vector<trace::DecidedPrefix>& ps, bool satisfied, std::size_t* count) {
  Polynomial total;
  std::size_t n = 0;
  for (const auto& d : ps) {
    if (d.satisfied != satisfied) continue;
    total += d.history.probability;
    ++n;
  }
  if (count) *count = n;
  return total;
}

RationalFunction ratio(const Polynomial& num, const Polynomial& den, bool kappa) {
  if (!kappa) return RationalFunction(0);
  if (den.is_zero()) {
    throw DegenerateQueryError("responsibility degree has an identically zero denominator");
  }
  return RationalFunction(num, den);
}

}  // namespace

Checker::Checker(const model::Psmas& m, QueryContext ctx) : m_(m), ctx_(std::move(ctx)) {
  if (ctx_.valuation) {
    auto report = model::check_admissible(m_, *ctx_.valuation, true);
    if (!report.ok) {
      const auto& v = report.violations.front();
      throw InadmissibleError("valuation breaks admissibility condition " + std::to_string(v.condition) +
                              " at " + v.location + " (value " + poly::to_string(v.value) + ")");
    }
  }
}

int Checker::agent_index(const std::string& name) const {
  int i = m_.csg().agent_index(name);
  if (i < 0) throw ModelError("unknown agent " + name);
  return i;
}

std::vector<int> Checker::agent_indices(const std::vector<std::string>& names) const {
  std::vector<int> out;
  for (const auto& n : names) out.push_back(agent_index(n));
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<ParamId> Checker::coalition_vars(const std::vector<int>& coalition,
                                             const std::set<ParamId>& used) const {
  std::vector<ParamId> out;
  for (ParamId id : used) {
    if (std::find(coalition.begin(), coalition.end(), id.agent) != coalition.end()) out.push_back(id);
  }
  return out;
}

std::vector<bool> Checker::sat(const StateFormula& f) {
  const std::size_t n = m_.csg().states.size();
  std::vector<bool> out(n, false);
  switch (f.kind) {
    case StateFormula::Kind::True:
      out.assign(n, true);
      break;
    case StateFormula::Kind::Atom:
      for (std::size_t s = 0; s < n; ++s) out[s] = m_.csg().has_label(static_cast<int>(s), f.atom);
      break;
    case StateFormula::Kind::Not: {
      auto inner = sat(*f.lhs);
      for (std::size_t s = 0; s < n; ++s) out[s] = !inner[s];
      break;
    }
    case StateFormula::Kind::And: {
      auto a = sat(*f.lhs);
      auto b = sat(*f.rhs);
      for (std::size_t s = 0; s < n; ++s) out[s] = a[s] && b[s];
      break;
    }
    default:
      for (std::size_t s = 0; s < n; ++s) {
        CheckResult r = check(static_cast<int>(s), f);
        if (!r.holds) {
          throw UnsupportedQueryError("nested operator " + logic::to_string(f) + " at state " +
                                      m_.csg().states[s] +
                                      " depends on the parameters; bind them to evaluate it");
        }
        out[s] = *r.holds;
      }
  }
  return out;
}

RationalFunction Checker::path_sat_prob(int state, const PathFormula& psi) {
  auto left = psi.left ? sat(*psi.left) : std::vector<bool>(m_.csg().states.size(), true);
  auto right = sat(*psi.right);
  auto prefixes = trace::decided_prefixes(m_, state, logic::horizon(psi),
                                          step_test(psi, std::move(left), std::move(right)));
  return RationalFunction(sum_where(prefixes, true, nullptr));
}

namespace {

struct RewardParts {
  Polynomial missed;  // probability of never reaching the target in time
  Polynomial total;   // reward accumulated on the reaching prefixes
};

RewardParts reward_parts(const model::Psmas& m, int state, const model::RewardStructure& r,
                         const std::vector<bool>& target, int steps) {
  trace::StepTest test = [&](int step, int s) {
    if (target[s]) return Verdict::Satisfied;
    return step >= steps ? Verdict::Violated : Verdict::Open;
  };
  RewardParts out;
  for (const auto& d : trace::decided_prefixes(m, state, steps, test)) {
    if (!d.satisfied) {
      out.missed += d.history.probability;
      continue;
    }
    Rational acc;
    for (std::size_t j = 0; j < d.history.actions.size(); ++j) {
      acc += r.action_value(d.history.actions[j]) + r.state_value(d.history.states[j]);
    }
    if (acc == 0) continue;
    Polynomial term = d.history.probability;
    term *= acc;
    out.total += term;
  }
  return out;
}

}  // namespace

ExtendedValue Checker::reward_value(int state, int agent, const StateFormula& target, int steps) {
  auto parts = reward_parts(m_, state, m_.reward(agent), sat(target), steps);
  if (!parts.missed.is_zero()) return ExtendedValue::inf();
  return ExtendedValue::finite(RationalFunction(parts.total));
}

DegreeResult Checker::car_degree(int state, int agent, const model::Plan& plan, const PathFormula& psi) {
  const int h = logic::horizon(psi);
  if (static_cast<int>(plan.steps.size()) < h) {
    throw ModelError("plan " + plan.name + " has " + std::to_string(plan.steps.size()) +
                     " steps; the path formula needs " + std::to_string(h));
  }
  auto left = psi.left ? sat(*psi.left) : std::vector<bool>(m_.csg().states.size(), true);
  auto test = step_test(psi, std::move(left), sat(*psi.right));

  auto all = trace::decided_prefixes(m_, state, h, test);
  auto own = trace::decided_prefixes(m_, state, h, test, trace::Anchor{&plan, {agent}});

  DegreeResult d;
  d.kind = logic::DegreeKind::Car;
  d.denominator = sum_where(all, true, &d.denominator_paths);
  d.numerator = sum_where(own, true, &d.numerator_paths);
  d.kappa = std::any_of(all.begin(), all.end(), [](const auto& p) { return !p.satisfied; });
  d.value = ratio(d.numerator, d.denominator, d.kappa);
  return d;
}

DegreeResult Checker::cpr_degree(int state, int agent, const model::Plan& plan, const PathFormula& psi,
                                 const std::vector<int>& coalition) {
  const int h = logic::horizon(psi);
  if (static_cast<int>(plan.steps.size()) < h) {
    throw ModelError("plan " + plan.name + " has " + std::to_string(plan.steps.size()) +
                     " steps; the path formula needs " + std::to_string(h));
  }
  if (std::find(coalition.begin(), coalition.end(), agent) == coalition.end()) {
    throw ModelError("agent " + m_.csg().agents[agent] + " is not in the coalition");
  }
  auto left = psi.left ? sat(*psi.left) : std::vector<bool>(m_.csg().states.size(), true);
  auto test = step_test(psi, std::move(left), sat(*psi.right));

  std::vector<int> others;
  for (int i : coalition) {
    if (i != agent) others.push_back(i);
  }
  auto all = trace::decided_prefixes(m_, state, h, test);
  auto fixed = trace::decided_prefixes(m_, state, h, test, trace::Anchor{&plan, coalition});
  auto rest = trace::decided_prefixes(m_, state, h, test, trace::Anchor{&plan, others});

  DegreeResult d;
  d.kind = logic::DegreeKind::Cpr;
  d.denominator = sum_where(all, false, &d.denominator_paths);
  d.numerator = sum_where(rest, false, &d.numerator_paths);
  d.kappa = std::any_of(fixed.begin(), fixed.end(), [](const auto& p) { return p.satisfied; });
  d.value = ratio(d.numerator, d.denominator, d.kappa);
  return d;
}

CheckResult Checker::decide(const Region& r) {
  CheckResult out;
  out.region = r;
  out.holds = r.decided();
  if (r.infinite) {
    out.value_infinite = true;
  } else if (auto c = r.value.as_constant()) {
    out.value = *c;
  }
  return out;
}

namespace {

ParamValuation bound_values(const model::Psmas& m, const ParamValuation& given,
                            const std::set<ParamId>& used, const std::vector<ParamId>& searched) {
  ParamValuation fixed;
  for (ParamId id : used) {
    if (std::find(searched.begin(), searched.end(), id) != searched.end()) continue;
    auto it = given.find(id);
    if (it == given.end()) throw MissingParameterError(m.param_name(id));
    fixed[id] = it->second;
  }
  return fixed;
}

std::set<ParamId> variables_of(const RationalFunction& r) {
  auto a = r.num().variables();
  auto b = r.den().variables();
  a.insert(b.begin(), b.end());
  return a;
}

// Variable order for compiled evaluation: searched first, then bound ones.
struct Layout {
  std::vector<ParamId> order;
  std::vector<double> base;

  Layout(const std::vector<ParamId>& searched, const ParamValuation& fixed) : order(searched) {
    base.assign(searched.size(), 0.0);
    for (const auto& [id, q] : fixed) {
      order.push_back(id);
      base.push_back(poly::to_double(q));
    }
  }
  std::vector<double> point(std::span<const double> x) const {
    std::vector<double> p = base;
    std::copy(x.begin(), x.end(), p.begin());
    return p;
  }
};

}  // namespace

CheckResult Checker::check_prob(int state, const StateFormula& f) {
  RationalFunction value = path_sat_prob(state, *f.path);
  Region region{value, f.cmp, f.bound, false};
  if (!ctx_.evaluated()) return decide(region);

  auto used = variables_of(value);
  auto vars = coalition_vars(agent_indices(f.coalition), used);
  SearchProblem p;
  p.vars = vars;
  p.fixed = bound_values(m_, *ctx_.valuation, used, vars);
  p.cmp = f.cmp;
  p.bound = f.bound;
  Layout layout(vars, p.fixed);
  poly::CompiledRationalFunction compiled(value, layout.order);
  p.approx = [&](std::span<const double> x) { return compiled(layout.point(x)); };
  p.exact = [&](const ParamValuation& v) -> std::optional<Rational> {
    return poly::rf_eval(value, v, &m_.names());
  };
  auto found = search_witness(m_, p);

  CheckResult out;
  out.region = region;
  out.holds = found.holds;
  out.value = found.value;
  ParamValuation witness;
  for (ParamId id : vars) witness[id] = found.witness[id];
  out.witness = witness;
  return out;
}

CheckResult Checker::check_reward(int state, const StateFormula& f) {
  const int agent = agent_index(f.agent);
  auto parts = reward_parts(m_, state, m_.reward(agent), sat(*f.target), f.steps);
  Region region;
  region.cmp = f.cmp;
  region.bound = f.bound;
  if (!ctx_.evaluated()) {
    region.infinite = !parts.missed.is_zero();
    if (!region.infinite) region.value = RationalFunction(parts.total);
    CheckResult out = decide(region);
    out.reward = region.infinite ? ExtendedValue::inf() : ExtendedValue::finite(region.value);
    return out;
  }

  std::set<ParamId> used = parts.missed.variables();
  for (ParamId id : parts.total.variables()) used.insert(id);
  auto vars = coalition_vars(agent_indices(f.coalition), used);
  SearchProblem p;
  p.vars = vars;
  p.fixed = bound_values(m_, *ctx_.valuation, used, vars);
  p.cmp = f.cmp;
  p.bound = f.bound;
  Layout layout(vars, p.fixed);
  poly::CompiledPolynomial missed(parts.missed, layout.order);
  poly::CompiledPolynomial total(parts.total, layout.order);
  p.approx = [&](std::span<const double> x) {
    auto pt = layout.point(x);
    if (missed(pt) > 1e-12) return std::numeric_limits<double>::infinity();
    return total(pt);
  };
  p.exact = [&](const ParamValuation& v) -> std::optional<Rational> {
    if (poly::poly_eval(parts.missed, v, &m_.names()) > 0) return std::nullopt;
    return poly::poly_eval(parts.total, v, &m_.names());
  };
  auto found = search_witness(m_, p);

  CheckResult out;
  out.holds = found.holds;
  out.value = found.value;
  out.value_infinite = !found.value.has_value();
  ParamValuation witness;
  for (ParamId id : vars) witness[id] = found.witness[id];
  out.witness = witness;
  return out;
}

CheckResult Checker::check_degree(int state, const StateFormula& f) {
  const int agent = agent_index(f.agent);
  const model::Plan& plan = m_.plan(f.plan);
  DegreeResult d = f.degree == logic::DegreeKind::Car
                       ? car_degree(state, agent, plan, *f.path)
                       : cpr_degree(state, agent, plan, *f.path, agent_indices(f.coalition));
  CheckResult out;
  if (!ctx_.evaluated()) {
    out = decide(Region{d.value, f.cmp, f.bound, false});
  } else {
    out.region = Region{d.value, f.cmp, f.bound, false};
    out.value = evaluate_degree(d, *ctx_.valuation, &m_.names());
    out.holds = logic::compare(*out.value, f.cmp, f.bound);
  }
  out.degree = std::move(d);
  return out;
}

CheckResult Checker::check(int state, const StateFormula& f) {
  switch (f.kind) {
    case StateFormula::Kind::Prob:
      return check_prob(state, f);
    case StateFormula::Kind::Reward:
      return check_reward(state, f);
    case StateFormula::Kind::Degree:
      return check_degree(state, f);
    default: {
      CheckResult out;
      out.holds = sat(f)[state];
      return out;
    }
  }
}

}  // namespace respgames::checker
