#include "respgames/oracle/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "respgames/checker/checker.hpp"
#include "respgames/errors.hpp"
#include "respgames/trace/history.hpp"

namespace respgames::oracle {

using model::Psmas;
using poly::ParamId;
using poly::ParamValuation;
using poly::Rational;

std::uint64_t chunk_seed(std::uint64_t master, std::uint64_t chunk) {
  std::uint64_t z = master + (chunk + 1) * 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace

Simulator::Simulator(const Psmas& m, const ParamValuation& valuation) : m_(m) {
  auto report = model::check_admissible(m, valuation);
  if (!report.ok) {
    const auto& v = report.violations.front();
    throw InadmissibleError("valuation breaks admissibility condition " + std::to_string(v.condition) + " at " +
                            v.location);
  }
  ParamValuation full = model::with_dependents(m, model::free_part(m, valuation));
  const auto& c = m.csg();
  actions_.resize(c.states.size());
  for (std::size_t s = 0; s < c.states.size(); ++s) {
    for (std::size_t i = 0; i < c.agents.size(); ++i) {
      Choice ch;
      double acc = 0;
      for (int a : c.available[i][s]) {
        acc += poly::to_double(poly::poly_eval(m.strategy(static_cast<int>(i), static_cast<int>(s), a), full));
        ch.cumulative.push_back(acc);
        ch.values.push_back(a);
      }
      actions_[s].push_back(std::move(ch));
    }
    for (const auto& j : c.joint_actions(static_cast<int>(s))) {
      Choice ch;
      double acc = 0;
      for (const auto& [t, q] : c.distribution(static_cast<int>(s), j)) {
        acc += poly::to_double(q);
        ch.cumulative.push_back(acc);
        ch.values.push_back(t);
      }
      successors_[{static_cast<int>(s), j}] = std::move(ch);
    }
  }
}

int Simulator::draw(const Choice& c, double u) const {
  // Scale by the total so rounding in the cumulative sums cannot fall off
  // the end.
  const double x = u * c.cumulative.back();
  for (std::size_t k = 0; k < c.cumulative.size(); ++k) {
    if (x < c.cumulative[k]) return c.values[k];
  }
  return c.values.back();
}

template <class Rng>
SampledHistory Simulator::sample(Rng& rng, int state, int horizon) const {
  SampledHistory h;
  h.states.push_back(state);
  for (int step = 0; step < horizon; ++step) {
    const int s = h.states.back();
    model::JointAction j;
    for (const auto& ch : actions_[s]) j.push_back(draw(ch, uniform(rng)));
    int next = draw(successors_.at({s, j}), uniform(rng));
    h.actions.push_back(std::move(j));
    h.states.push_back(next);
  }
  return h;
}

template SampledHistory Simulator::sample<std::mt19937_64>(std::mt19937_64&, int, int) const;

void Simulator::for_each(const SimConfig& cfg,
                         const std::function<void(std::size_t, const SampledHistory&)>& fn) const {
  const std::size_t chunks = (cfg.samples + kChunk - 1) / kChunk;
  for (std::size_t c = 0; c < chunks; ++c) {
    std::mt19937_64 rng(chunk_seed(cfg.seed, c));
    const std::size_t end = std::min(cfg.samples, (c + 1) * kChunk);
    for (std::size_t k = c * kChunk; k < end; ++k) fn(k, sample(rng, cfg.state, cfg.horizon));
  }
}

std::pair<std::size_t, std::size_t> Simulator::count(
    const SimConfig& cfg, const std::function<std::pair<bool, bool>(const SampledHistory&)>& classify) const {
  const long chunks = static_cast<long>((cfg.samples + kChunk - 1) / kChunk);
  std::size_t base = 0, hits = 0;
#pragma omp parallel for schedule(dynamic) reduction(+ : base, hits) if (cfg.parallel)
  for (long c = 0; c < chunks; ++c) {
    std::mt19937_64 rng(chunk_seed(cfg.seed, static_cast<std::uint64_t>(c)));
    const std::size_t end = std::min(cfg.samples, static_cast<std::size_t>(c + 1) * kChunk);
    for (std::size_t k = static_cast<std::size_t>(c) * kChunk; k < end; ++k) {
      auto [in, hit] = classify(sample(rng, cfg.state, cfg.horizon));
      base += in;
      hits += in && hit;
    }
  }
  return {base, hits};
}

std::vector<SampledHistory> simulate_paths(const Psmas& m, const SimConfig& cfg) {
  Simulator sim(m, cfg.valuation);
  std::vector<SampledHistory> out;
  out.reserve(cfg.samples);
  sim.for_each(cfg, [&](std::size_t, const SampledHistory& h) { out.push_back(h); });
  return out;
}

namespace {

bool propositional(const Psmas& m, const logic::StateFormula& f, int s) {
  using K = logic::StateFormula::Kind;
  switch (f.kind) {
    case K::True:
      return true;
    case K::Atom:
      return m.csg().has_label(s, f.atom);
    case K::Not:
      return !propositional(m, *f.lhs, s);
    case K::And:
      return propositional(m, *f.lhs, s) && propositional(m, *f.rhs, s);
    default:
      throw UnsupportedQueryError("the sampling oracle only handles propositional operands");
  }
}

Estimate ratio(std::size_t samples, std::size_t base, std::size_t hits) {
  Estimate e;
  e.samples = samples;
  e.base = base;
  e.hits = hits;
  if (base == 0) {
    e.defined = false;
    return e;
  }
  e.mean = static_cast<double>(hits) / static_cast<double>(base);
  e.std_error = std::sqrt(e.mean * (1 - e.mean) / static_cast<double>(base));
  return e;
}

bool follows(const SampledHistory& h, const model::Plan& p, const std::vector<int>& agents, std::size_t until) {
  for (std::size_t j = 0; j < until && j < p.steps.size(); ++j) {
    for (int i : agents) {
      if (h.actions[j][i] != p.steps[j][i]) return false;
    }
  }
  return true;
}

}  // namespace

std::pair<bool, std::size_t> judge(const Psmas& m, const logic::PathFormula& psi, const SampledHistory& h) {
  if (psi.kind == logic::PathFormula::Kind::Next) return {propositional(m, *psi.right, h.states[1]), 1};
  for (int j = 0; j <= psi.bound; ++j) {
    if (propositional(m, *psi.right, h.states[j])) return {true, j};
    if (psi.left && !propositional(m, *psi.left, h.states[j])) return {false, j};
  }
  return {false, static_cast<std::size_t>(psi.bound)};
}

Estimate estimate_probability(const Psmas& m, const SimConfig& cfg, const logic::PathFormula& psi) {
  Simulator sim(m, cfg.valuation);
  SimConfig c = cfg;
  c.horizon = logic::horizon(psi);
  auto [base, hits] = sim.count(c, [&](const SampledHistory& h) {
    return std::make_pair(true, judge(m, psi, h).first);
  });
  return ratio(c.samples, base, hits);
}

Estimate estimate_degree(const Psmas& m, const SimConfig& cfg, int agent, const model::Plan& plan,
                         const logic::PathFormula& psi, logic::DegreeKind kind,
                         const std::vector<int>& coalition) {
  checker::Checker exact(m);
  bool kappa = false;
  try {
    kappa = kind == logic::DegreeKind::Car ? exact.car_degree(cfg.state, agent, plan, psi).kappa
                                           : exact.cpr_degree(cfg.state, agent, plan, psi, coalition).kappa;
  } catch (const DegenerateQueryError&) {
    Estimate e;
    e.defined = false;
    return e;
  }
  if (!kappa) {
    Estimate e;
    e.samples = 0;
    return e;
  }

  Simulator sim(m, cfg.valuation);
  SimConfig c = cfg;
  c.horizon = logic::horizon(psi);
  std::vector<int> anchored;
  if (kind == logic::DegreeKind::Car) {
    anchored = {agent};
  } else {
    for (int i : coalition) {
      if (i != agent) anchored.push_back(i);
    }
  }
  const bool want = kind == logic::DegreeKind::Car;
  auto [base, hits] = sim.count(c, [&](const SampledHistory& h) {
    auto [verdict, at] = judge(m, psi, h);
    bool in = verdict == want;
    return std::make_pair(in, in && follows(h, plan, anchored, at));
  });
  return ratio(c.samples, base, hits);
}

BestResponse grid_best_response(const synth::UtilityModel& u, int agent, const ParamValuation& others,
                                int resolution, bool parallel) {
  const Psmas& m = *u.m;
  BestResponse out;
  std::vector<std::vector<std::size_t>> groups;
  for (const auto& slot : u.relevant_slots()) {
    if (slot.agent != agent) continue;
    const auto& acts = m.slot_actions(slot);
    std::vector<std::size_t> g;
    for (std::size_t k = 0; k + 1 < acts.size(); ++k) {
      g.push_back(out.params.size());
      out.params.push_back(m.param(slot.agent, slot.state, acts[k]));
    }
    groups.push_back(g);
  }
  const std::size_t d = out.params.size();
  const std::size_t side = static_cast<std::size_t>(resolution) + 1;
  std::size_t total = 1;
  for (std::size_t i = 0; i < d; ++i) {
    if (total > trace::path_limit() / side) {
      throw ResourceError("best-response grid exceeds the limit of " + std::to_string(trace::path_limit()));
    }
    total *= side;
  }

  auto coords = [&](std::size_t index) {
    std::vector<long> k(d);
    for (std::size_t i = d; i-- > 0;) {
      k[i] = static_cast<long>(index % side);
      index /= side;
    }
    return k;
  };
  auto feasible = [&](const std::vector<long>& k) {
    for (const auto& g : groups) {
      long s = 0;
      for (std::size_t i : g) s += k[i];
      if (s > resolution) return false;
    }
    return true;
  };

  const synth::AgentUtility& util = u.agents[agent];
  std::vector<std::optional<Rational>> values(total);
#pragma omp parallel for schedule(static) if (parallel)
  for (long idx = 0; idx < static_cast<long>(total); ++idx) {
    auto k = coords(static_cast<std::size_t>(idx));
    if (!feasible(k)) continue;
    ParamValuation v = others;
    for (std::size_t i = 0; i < d; ++i) {
      Rational q(k[i], resolution);
      q.canonicalize();
      v[out.params[i]] = q;
    }
    values[idx] = util.evaluate(v);
  }

  bool any = false;
  for (const auto& v : values) {
    if (!v) continue;
    ++out.points;
    if (!any || *v > out.value) out.value = *v;
    any = true;
  }
  const Rational tol = poly::from_double(1e-12);
  for (std::size_t idx = 0; idx < total; ++idx) {
    if (!values[idx] || out.value - *values[idx] > tol) continue;
    auto k = coords(idx);
    ParamValuation v;
    for (std::size_t i = 0; i < d; ++i) {
      Rational q(k[i], resolution);
      q.canonicalize();
      v[out.params[i]] = q;
    }
    out.maximizers.push_back(std::move(v));
  }
  return out;
}

}  // namespace respgames::oracle
