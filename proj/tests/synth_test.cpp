#include <cmath>
#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "respgames/checker/checker.hpp"
#include "respgames/errors.hpp"
#include "respgames/poly/parse.hpp"
#include "respgames/synth/synth.hpp"

using namespace respgames;
using namespace respgames::synth;
using model::Psmas;
using poly::ParamId;
using poly::ParamValuation;
using poly::Polynomial;
using poly::Rational;
using poly::RationalFunction;

namespace {

Polynomial P(const Psmas& m, const char* text) { return poly::parse_polynomial(text, m.names()); }

ParamId id(const Psmas& m, const char* name) { return *m.names().lookup(name); }

double at(const ParamValuation& v, ParamId p) { return poly::to_double(v.at(p)); }

ResponsibilitySpec responsibility_spec(const Psmas& m) {
  return ResponsibilitySpec{m.csg().state_index("s2"), m.plan("pi_resp"),
                            logic::parse_path_formula("F<=2 (collision | dropped)", logic::vocabulary(m))};
}

UtilityConfig cfg(long l1, long l2, long theta) { return UtilityConfig{Rational(l1), Rational(l2), Rational(theta)}; }

}  // namespace

TEST_CASE("payoff valuations") {
  Psmas m = testing::load_fixture("ball.game");
  CHECK(payoff_valuation(m, m.plan("pi1"), 0) == P(m, "2*(1-x1)*x2 + x1*(1-x2)"));
  CHECK(payoff_valuation(m, 0, 2, 0) == P(m, "8*(2-x1)"));
  CHECK(payoff_valuation(m, 0, 2, 1) == P(m, "8*(1+x2)"));
  Psmas g = testing::load_fixture("pennies.game");
  CHECK(payoff_valuation(g, 0, 1, 0) == P(g, "(2*h1-1)*(2*h2-1)"));
}

TEST_CASE("responsibility valuation") {
  Psmas m = testing::load_fixture("ball.game");
  auto psi = logic::parse_path_formula("X (dropped | score2)", logic::vocabulary(m));
  CHECK(rf_equal(resp_valuation(m, 0, 0, m.plan("pi_skip"), *psi, 0), RationalFunction(1)));
  auto spec = responsibility_spec(m);
  checker::Checker c(m);
  auto car = c.car_degree(spec.state, 0, spec.plan, *spec.psi);
  CHECK(rf_equal(resp_valuation(m, spec.state, 0, spec.plan, *spec.psi, 0), car.value));
  CHECK(car.numerator == P(m, "(1-x1)*(1-x2) + (1-x1)*x1*x2^2"));
}

TEST_CASE("utility forms") {
  Psmas m = testing::load_fixture("ball.game");
  auto spec = responsibility_spec(m);
  SUBCASE("payoff only") {
    auto u = build_utility(m, 0, 2, cfg(1, 0, 1), spec);
    CHECK(rf_equal(utility(u, 0), P(m, "8*(2-x1)")));
  }
  SUBCASE("negated counterfactual degree") {
    auto u = build_utility(m, 0, 2, cfg(0, 1, 0), spec);
    checker::Checker c(m);
    auto car = c.car_degree(spec.state, 1, spec.plan, *spec.psi);
    CHECK(rf_equal(utility(u, 1), RationalFunction(-1) * car.value));
  }
  SUBCASE("linear in the weights") {
    UtilityConfig a{Rational(1), Rational(2), Rational(1)};
    UtilityConfig b{Rational(3), Rational(-1), Rational(1)};
    UtilityConfig sum{Rational(4), Rational(1), Rational(1)};
    auto ua = build_utility(m, 0, 2, a, spec);
    auto ub = build_utility(m, 0, 2, b, spec);
    auto us = build_utility(m, 0, 2, sum, spec);
    for (int i = 0; i < 2; ++i) CHECK(rf_equal(utility(ua, i) + utility(ub, i), utility(us, i)));
  }
}

TEST_CASE("standalone systems") {
  SUBCASE("quadratic root") {
    auto sys = parse_ne_system({"2*x^2 + x - 2 = 0"});
    auto sols = solve_ne(sys);
    REQUIRE(sols.size() == 1);
    double x = at(sols[0].valuation, sys.variables[0]);
    CHECK(std::abs(x - (std::sqrt(17.0) - 1) / 4) < 1e-9);
    CHECK(sols[0].residual <= 1e-9);
    CHECK_FALSE(sols[0].gap.has_value());
  }
  SUBCASE("linear") {
    auto sys = parse_ne_system({"x - 1"});
    auto sols = solve_ne(sys);
    REQUIRE(sols.size() == 1);
    CHECK(sols[0].valuation.at(sys.variables[0]) == 1);
  }
  SUBCASE("indifference everywhere") {
    auto sys = parse_ne_system({"x = x"});
    CHECK(sys.equations.empty());
    auto sols = solve_ne(sys);
    REQUIRE(sols.size() == 1);
    double x = at(sols[0].valuation, sys.variables[0]);
    CHECK(x >= 0);
    CHECK(x <= 1);
  }
  SUBCASE("no root in the box") {
    CHECK(solve_ne(parse_ne_system({"x + 1 = 0"})).empty());
  }
  SUBCASE("two roots deduplicated") {
    auto sys = parse_ne_system({"(4*x - 1)*(4*x - 3) = 0"});
    auto sols = solve_ne(sys, SolveOptions{64});
    REQUIRE(sols.size() == 2);
    CHECK(std::abs(at(sols[0].valuation, sys.variables[0]) - at(sols[1].valuation, sys.variables[0])) >= 1e-6);
  }
  SUBCASE("too many variables") {
    CHECK_THROWS_AS(solve_ne(parse_ne_system({"a+b+c+d+e+f+g = 1"})), UnsupportedQueryError);
  }
  SUBCASE("serial and parallel agree") {
    auto sys = parse_ne_system({"x*y - 1/4", "x - y"});
    SolveOptions serial;
    serial.parallel = false;
    auto a = solve_ne(sys, serial);
    auto b = solve_ne(sys);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(a[k].valuation == b[k].valuation);
  }
}

TEST_CASE("equilibrium systems") {
  Psmas m = testing::load_fixture("ball.game");
  auto u = build_utility(m, 0, 2, cfg(1, 0, 1));
  CHECK(u.relevant_slots().size() == 2);
  CHECK(enumerate_supports(u).size() == 9);
  SUBCASE("full support gives one indifference equation per agent") {
    auto sys = build_ne_system(u, {});
    CHECK(sys.variables.size() == 2);
    CHECK(sys.equations.size() == 2);
    CHECK(solve_ne(sys).empty());
  }
  SUBCASE("pure support has nothing to solve") {
    const int skip = m.csg().action_index("skip");
    const int catch_ = m.csg().action_index("catch");
    Support s{{model::Slot{0, 0}, {catch_}}, {model::Slot{1, 0}, {skip}}};
    auto sys = build_ne_system(u, s);
    CHECK(sys.variables.empty());
    CHECK(sys.equations.empty());
    auto sols = solve_ne(sys);
    REQUIRE(sols.size() == 1);
    CHECK(sols[0].valuation.at(id(m, "x1")) == 0);
    CHECK(sols[0].valuation.at(id(m, "x2")) == 1);
  }
}

TEST_CASE("payoff equilibrium of the ball game") {
  Psmas m = testing::load_fixture("ball.game");
  auto u = build_utility(m, 0, 2, cfg(1, 0, 1));
  auto sols = synthesize(u);
  REQUIRE(sols.size() == 1);
  const auto& s = sols[0];
  CHECK(s.valuation.at(id(m, "x1")) == 0);
  CHECK(s.valuation.at(id(m, "x2")) == 1);
  REQUIRE(s.gap);
  CHECK(*s.gap <= 1e-6);
  CHECK(verify_ne(u, s.valuation).ok);

  SUBCASE("perturbed candidate fails") {
    ParamValuation moved = s.valuation;
    moved[id(m, "x1")] = Rational(1, 10);
    auto v = verify_ne(u, moved);
    CHECK_FALSE(v.ok);
    CHECK(v.gap > 1e-3);
    CHECK(v.agent == 0);
  }
}

TEST_CASE("pure equilibrium under responsibility minimisation") {
  Psmas m = testing::load_fixture("ball.game");
  auto u = build_utility(m, 0, 2, cfg(0, 1, 0), responsibility_spec(m));
  auto sols = synthesize(u);
  bool found = std::any_of(sols.begin(), sols.end(), [&](const NeSolution& s) {
    return s.valuation.at(id(m, "x1")) == 0 && s.valuation.at(id(m, "x2")) == 1;
  });
  CHECK(found);
  for (const auto& s : sols) {
    REQUIRE(s.gap);
    CHECK(*s.gap <= 1e-6);
  }
}

TEST_CASE("interior equilibrium of matching pennies") {
  Psmas m = testing::load_fixture("pennies.game");
  auto u = build_utility(m, 0, 1, cfg(1, 0, 1));
  auto sols = synthesize(u);
  REQUIRE(sols.size() == 1);
  const auto& s = sols[0];
  const ParamId h1 = id(m, "h1");
  const ParamId h2 = id(m, "h2");
  CHECK(std::abs(at(s.valuation, h1) - 0.5) < 1e-9);
  CHECK(std::abs(at(s.valuation, h2) - 0.5) < 1e-9);

  SUBCASE("supported actions earn the same utility") {
    for (int i = 0; i < 2; ++i) {
      ParamId own = i == 0 ? h1 : h2;
      ParamValuation heads = s.valuation, tails = s.valuation;
      heads[own] = 1;
      tails[own] = 0;
      double gap = poly::to_double(u.agents[i].evaluate(heads) - u.agents[i].evaluate(tails));
      CHECK(std::abs(gap) <= 1e-9);
    }
  }
  SUBCASE("any own mixture leaves the utility unchanged") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<long> pick(0, 100);
    for (int i = 0; i < 2; ++i) {
      ParamId own = i == 0 ? h1 : h2;
      Rational base = u.agents[i].evaluate(s.valuation);
      for (int k = 0; k < 20; ++k) {
        ParamValuation v = s.valuation;
        Rational q(pick(rng), 100);
        q.canonicalize();
        v[own] = q;
        CHECK(std::abs(poly::to_double(u.agents[i].evaluate(v) - base)) <= 2 * s.residual + 1e-12);
      }
    }
  }
}

TEST_CASE("single action games are trivially in equilibrium") {
  model::Csg c;
  c.agents = {"A"};
  c.states = {"s"};
  c.actions = {"go"};
  c.initial = 0;
  c.available = {{{0}}};
  c.delta[{0, {0}}] = {{0, Rational(1)}};
  c.labels = {{}};
  Psmas m = model::build_psmas(c);
  auto u = build_utility(m, 0, 2, cfg(1, 0, 1));
  CHECK(verify_ne(u, {}).gap == 0);
  auto sols = synthesize(u);
  REQUIRE(sols.size() == 1);
  CHECK(sols[0].valuation.empty());
}
