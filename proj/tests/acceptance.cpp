// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
// criterion fails.

#include <cmath>
#include <functional>
#include <iostream>
#include <random>
#include <sstream>

#include "fixtures.hpp"
#include "generators.hpp"
#include "respgames/checker/checker.hpp"
#include "respgames/errors.hpp"
#include "respgames/oracle/oracle.hpp"
#include "respgames/poly/parse.hpp"
#include "respgames/synth/synth.hpp"
#include "respgames/trace/history.hpp"

using namespace respgames;
using model::Psmas;
using poly::ParamId;
using poly::ParamValuation;
using poly::Polynomial;
using poly::Rational;
using poly::RationalFunction;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream note;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      if (note.tellp() > 0) note << "; ";
      note << what;
    }
  }
};

Rational Q(long a, long b) {
  Rational q(a, b);
  q.canonicalize();
  return q;
}

ParamId id(const Psmas& m, const char* name) { return *m.names().lookup(name); }

Polynomial P(const Psmas& m, const char* text) { return poly::parse_polynomial(text, m.names()); }

logic::PathPtr path(const Psmas& m, const char* text) {
  return logic::parse_path_formula(text, logic::vocabulary(m));
}

ParamValuation ball_point(const Psmas& m, Rational a, Rational b) { return {{id(m, "x1"), a}, {id(m, "x2"), b}}; }

bool within(double estimate, double exact, double se) { return std::abs(estimate - exact) <= std::max(4 * se, 1e-12); }

void skipping_player_fully_responsible(Outcome& o) {
  Psmas m = testing::load_fixture("ball.game");
  checker::Checker c(m);
  auto d = c.car_degree(0, 0, m.plan("pi_skip"), *path(m, "X (dropped | score2)"));
  o.require(d.kappa, "guard should be on");
  o.require(d.value.as_constant() == std::optional<Rational>(Rational(1)), "degree is " + poly::to_string(d.value, &m.names()));
}

void skip_probability_is_own_parameter(Outcome& o) {
  Psmas m = testing::load_fixture("ball.game");
  checker::Checker c(m);
  auto p = c.path_sat_prob(0, *path(m, "X (dropped | score2)"));
  o.require(p.num() == P(m, "x1") && p.den() == Polynomial(1), "probability is " + poly::to_string(p, &m.names()));
}

void preventive_degree(Outcome& o) {
  Psmas m = testing::load_fixture("ball.game");
  checker::Checker c(m);
  auto psi = path(m, "X collision");
  auto d = c.cpr_degree(0, 0, m.plan("pi_catch"), *psi, {0, 1});
  std::map<ParamId, Polynomial> common{{id(m, "x2"), Polynomial::variable(id(m, "x1"))}};
  o.require(poly::poly_substitute(d.numerator, common) == P(m, "x1*(1-x1)"), "numerator under x2=x1");
  o.require(poly::poly_substitute(d.denominator, common) == P(m, "2*x1 - x1^2"), "denominator under x2=x1");
  auto half = ball_point(m, Q(1, 2), Q(1, 2));
  o.require(checker::evaluate_degree(d, half) == Q(1, 3), "value at one half");

  oracle::SimConfig cfg;
  cfg.samples = 200000;
  cfg.valuation = half;
  auto e = oracle::estimate_degree(m, cfg, 0, m.plan("pi_catch"), *psi, logic::DegreeKind::Cpr, {0, 1});
  std::ostringstream s;
  s << "sampled " << e.mean << " +- " << e.std_error;
  o.require(e.defined && within(e.mean, 1.0 / 3, e.std_error), s.str());
}

void partition_of_unity(Outcome& o) {
  for (const char* name : {"ball.game", "chain.game"}) {
    Psmas m = testing::load_fixture(name);
    for (std::size_t s = 0; s < m.csg().states.size(); ++s) {
      for (int depth = 1; depth <= 3; ++depth) {
        Polynomial sum;
        for (const auto& h : trace::enumerate_histories(m, static_cast<int>(s), depth)) sum += h.probability;
        o.require(sum == Polynomial(1), std::string(name) + " state " + std::to_string(s) + " depth " +
                                            std::to_string(depth));
      }
    }
  }
}

void ring_laws(Outcome& o) {
  poly::ParamTable t;
  std::vector<ParamId> ids{t.declare("a"), t.declare("b"), t.declare("c")};
  std::mt19937_64 rng(77);
  std::map<std::string, int> passed;
  for (int i = 0; i < 1000; ++i) {
    Polynomial a = testing::random_polynomial(rng, ids, 4, 10);
    Polynomial b = testing::random_polynomial(rng, ids, 4, 10);
    Polynomial c = testing::random_polynomial(rng, ids, 4, 10);
    ParamValuation v = testing::random_valuation(rng, ids);
    passed["associativity of +"] += (a + b) + c == a + (b + c);
    passed["associativity of *"] += (a * b) * c == a * (b * c);
    passed["commutativity of +"] += a + b == b + a;
    passed["commutativity of *"] += a * b == b * a;
    passed["distributivity"] += a * (b + c) == a * b + a * c;
    passed["additive inverse"] += (a + poly::poly_neg(a)).is_zero();
    passed["evaluation of +"] += poly::poly_eval(a + b, v) == poly::poly_eval(a, v) + poly::poly_eval(b, v);
    passed["evaluation of *"] += poly::poly_eval(a * b, v) == poly::poly_eval(a, v) * poly::poly_eval(b, v);
  }
  for (const auto& [law, n] : passed) o.require(n == 1000, law + " held " + std::to_string(n) + "/1000");
}

void oracle_agreement(Outcome& o) {
  const std::vector<std::pair<const char*, std::vector<const char*>>> cases{
      {"ball.game", {"X (dropped | score2)", "F<=2 (collision | dropped)"}},
      {"chain.game", {"F<=2 goal", "!far U<=3 goal"}},
      {"pennies.game", {"X win1", "F<=2 win2"}},
  };
  for (const auto& [fixture, formulas] : cases) {
    Psmas m = testing::load_fixture(fixture);
    checker::Checker exact(m);
    for (int k = 0; k < 3; ++k) {
      ParamValuation v;
      std::map<std::pair<int, int>, int> seen;
      for (ParamId p : m.free_params()) {
        int n = seen[{p.agent, p.state}]++;
        v[p] = n == 0 ? Q(2 * k + 1 + p.agent, 8) : Rational(0);
      }
      for (const char* text : formulas) {
        auto psi = path(m, text);
        double p = poly::to_double(poly::rf_eval(exact.path_sat_prob(0, *psi), v));
        oracle::SimConfig cfg;
        cfg.samples = 200000;
        cfg.seed = 101 + k;
        cfg.valuation = v;
        auto e = oracle::estimate_probability(m, cfg, *psi);
        std::ostringstream s;
        s << fixture << " '" << text << "' point " << k << ": " << e.mean << " vs " << p;
        o.require(within(e.mean, p, e.std_error), s.str());
      }
    }
  }
}

// Largest gain any agent gets from its best grid response.
double grid_gap(const synth::UtilityModel& u, const ParamValuation& at, int resolution) {
  double worst = 0;
  for (std::size_t i = 0; i < u.agents.size(); ++i) {
    auto br = oracle::grid_best_response(u, static_cast<int>(i), at, resolution);
    worst = std::max(worst, poly::to_double(br.value - u.agents[i].evaluate(at)));
  }
  return worst;
}

void payoff_equilibrium(Outcome& o) {
  Psmas m = testing::load_fixture("ball.game");
  auto u = synth::build_utility(m, 0, 2, synth::UtilityConfig{});
  auto sols = synth::synthesize(u);
  o.require(!sols.empty(), "no solution");
  for (const auto& s : sols) {
    o.require(s.residual <= 1e-9, "residual " + std::to_string(s.residual));
    o.require(s.gap && *s.gap <= 1e-6, "deviation gap");
    double g = grid_gap(u, s.valuation, 1000);
    o.require(g <= 1e-6, "grid gap " + std::to_string(g));
  }
}

void responsibility_equilibrium(Outcome& o) {
  Psmas m = testing::load_fixture("ball.game");
  synth::ResponsibilitySpec spec{m.csg().state_index("s2"), m.plan("pi_resp"),
                                 path(m, "F<=2 (collision | dropped)")};
  auto u = synth::build_utility(m, 0, 2, synth::UtilityConfig{Rational(0), Rational(1), Rational(0)}, spec);
  auto sols = synth::synthesize(u);
  auto target = ball_point(m, Rational(0), Rational(1));
  bool found = false;
  for (const auto& s : sols) {
    found = found || (s.valuation.at(id(m, "x1")) == 0 && s.valuation.at(id(m, "x2")) == 1);
  }
  o.require(found, "pure profile (0, 1) not among " + std::to_string(sols.size()) + " solutions");
  double g = grid_gap(u, target, 1000);
  o.require(g <= 1e-6, "grid gap " + std::to_string(g));
}

void quadratic_root(Outcome& o) {
  auto sys = synth::parse_ne_system({"2*x^2 + x - 2 = 0"});
  auto sols = synth::solve_ne(sys);
  o.require(sols.size() == 1, std::to_string(sols.size()) + " roots");
  if (sols.size() != 1) return;
  double x = poly::to_double(sols[0].valuation.at(sys.variables[0]));
  o.require(std::abs(x - (std::sqrt(17.0) - 1) / 4) <= 1e-9, "root " + std::to_string(x));
}

void guards(Outcome& o) {
  Psmas m = testing::load_fixture("ball.game");
  checker::Checker c(m);
  auto car = c.car_degree(0, 0, m.plan("pi_skip"), *path(m, "X true"));
  o.require(!car.kappa && car.value.is_zero(), "unviolable outcome should give 0");
  auto cpr = c.cpr_degree(0, 0, m.plan("pi_skip"), *path(m, "X collision"), {0, 1});
  o.require(!cpr.kappa && cpr.value.is_zero(), "unreachable outcome should give 0");
  bool degenerate = false;
  try {
    c.cpr_degree(0, 0, m.plan("pi_catch"), *path(m, "X true"), {0, 1});
  } catch (const DegenerateQueryError&) {
    degenerate = true;
  }
  o.require(degenerate, "vanishing denominator with the guard on should be reported");
}

void admissibility(Outcome& o) {
  Psmas m = testing::load_fixture("ball.game");
  auto r = model::check_admissible(m, ball_point(m, Q(6, 5), Q(1, 2)));
  o.require(!r.ok && !r.violations.empty() && r.violations.front().condition == 2, "6/5 should break condition 2");
  auto v = ball_point(m, Q(1, 2), Q(1, 2));
  v[id(m, "x[A1,s0,catch]")] = Q(1, 3);
  auto s = model::check_admissible(m, v);
  bool cond3 = false;
  for (const auto& x : s.violations) cond3 = cond3 || x.condition == 3;
  o.require(!s.ok && cond3, "non-simplex assignment should break condition 3");
  for (int a = 0; a <= 1; ++a) {
    for (int b = 0; b <= 1; ++b) o.require(model::check_admissible(m, ball_point(m, a, b)).ok, "vertex rejected");
  }
}

void reward_until_goal(Outcome& o) {
  Psmas m = testing::load_fixture("chain.game");
  checker::Checker c(m);
  auto goal = logic::parse_formula("goal", m);
  o.require(c.reward_value(0, 0, *goal, 2).infinite, "horizon 2 should be infinite");
  auto v = c.reward_value(0, 0, *goal, 3);
  o.require(!v.infinite, "horizon 3 should be finite");
  if (v.infinite) return;
  Polynomial expected;
  for (const auto& h : trace::enumerate_histories(m, 0, 3)) {
    std::size_t j = 0;
    while (!m.csg().has_label(h.states[j], "goal")) ++j;
    Rational acc;
    for (std::size_t t = 0; t < j; ++t) {
      acc += m.reward(0).action_value(h.actions[t]) + m.reward(0).state_value(h.states[t]);
    }
    Polynomial term = h.probability;
    term *= acc;
    expected += term;
  }
  o.require(poly::rf_equal(v.value, expected), "finite value differs from enumeration");
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<void(Outcome&)>>> criteria{
      {"skipping player carries counterfactual degree exactly 1", skipping_player_fully_responsible},
      {"probability of skip-or-score is the skip parameter", skip_probability_is_own_parameter},
      {"preventive degree x(1-x)/(2x-x^2), 1/3 at one half, sampled agreement", preventive_degree},
      {"history probabilities sum to 1 at depths 1 to 3", partition_of_unity},
      {"ring laws on 1000 random cases each", ring_laws},
      {"sampling oracle agrees with exact probabilities", oracle_agreement},
      {"payoff equilibrium of the ball game at horizon 2", payoff_equilibrium},
      {"pure equilibrium (0, 1) under responsibility minimisation", responsibility_equilibrium},
      {"root of 2x^2 + x - 2 within 1e-9", quadratic_root},
      {"degree guards", guards},
      {"admissibility conditions", admissibility},
      {"reward until goal: infinite below the horizon, finite at it", reward_until_goal},
  };
  int failed = 0;
  int n = 0;
  for (const auto& [name, run] : criteria) {
    ++n;
    Outcome o;
    try {
      run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    std::cout << (o.pass ? "PASS" : "FAIL") << " [" << n << "] " << name;
    if (!o.pass) std::cout << " -- " << o.note.str();
    std::cout << '\n';
    failed += !o.pass;
  }
  std::cout << (n - failed) << "/" << n << " criteria passed\n";
  return failed == 0 ? 0 : 1;
}
