#include <random>

#include "doctest.h"
#include "fixtures.hpp"
#include "respgames/errors.hpp"
#include "respgames/poly/parse.hpp"

using namespace respgames;
using namespace respgames::model;
using poly::Polynomial;
using poly::Rational;

namespace {

Polynomial P(const Psmas& m, const char* text) { return poly::parse_polynomial(text, m.names()); }

JointAction J(const Psmas& m, std::initializer_list<const char*> names) {
  JointAction a;
  for (const char* n : names) a.push_back(m.csg().action_index(n));
  return a;
}

poly::ParamValuation ball_val(const Psmas& m, Rational x1, Rational x2) {
  return {{*m.names().lookup("x1"), x1}, {*m.names().lookup("x2"), x2}};
}

const char* kTiny = R"(
agents: A
states: s
init: s
labels: s { here }
actions A @ s: only
trans s (only) -> { s: 1 }
)";

}  // namespace

TEST_CASE("ball transitions") {
  Psmas m = testing::load_fixture("ball.game");
  int s0 = m.csg().state_index("s0");
  int s1 = m.csg().state_index("s1");
  CHECK(m.transition(s0, J(m, {"skip", "skip"}), s0) == P(m, "x1*x2"));
  CHECK(m.transition(s0, J(m, {"catch", "catch"}), s1) == P(m, "(1-x1)*(1-x2)"));
  CHECK(m.transition(s0, J(m, {"catch", "skip"}), m.csg().state_index("s2")) == P(m, "(1-x1)*x2"));
  CHECK(m.transition(s0, J(m, {"skip", "catch"}), m.csg().state_index("s3")) == P(m, "x1*(1-x2)"));
  CHECK(m.transition(s0, J(m, {"skip", "catch"}), s0).is_zero());
  // Tied states reuse the same two parameters.
  CHECK(m.free_params().size() == 2);
  CHECK(m.transition(m.csg().state_index("s3"), J(m, {"skip", "skip"}), s0) == P(m, "x1*x2"));
  CHECK(m.game().notes.size() == 1);
}

TEST_CASE("forced single action gives a constant transition") {
  Psmas m = build_psmas(parse_game(kTiny));
  CHECK(m.free_params().empty());
  CHECK(m.transition(0, {0}, 0) == Polynomial(1));
}

TEST_CASE("row-sum identity on every fixture") {
  for (const char* name : {"ball.game", "chain.game", "pennies.game"}) {
    Psmas m = testing::load_fixture(name);
    for (std::size_t s = 0; s < m.csg().states.size(); ++s) {
      Polynomial total;
      for (const auto& t : m.transitions(static_cast<int>(s))) total += t.probability;
      CHECK_MESSAGE(total == Polynomial(1), name << " state " << m.csg().states[s]);
    }
  }
}

TEST_CASE("evaluation consistency at random admissible points") {
  std::mt19937_64 rng(5);
  for (const char* name : {"ball.game", "chain.game", "pennies.game"}) {
    Psmas m = testing::load_fixture(name);
    for (int trial = 0; trial < 20; ++trial) {
      poly::ParamValuation v;
      for (auto id : m.free_params()) {
        Rational q(static_cast<long>(rng() % 9), 8);
        q.canonicalize();
        v[id] = q;
      }
      REQUIRE(check_admissible(m, v).ok);
      for (std::size_t s = 0; s < m.csg().states.size(); ++s) {
        Rational total = 0;
        for (const auto& t : m.transitions(static_cast<int>(s))) {
          Rational p = poly::poly_eval(t.probability, v);
          CHECK(p >= 0);
          CHECK(p <= 1);
          total += p;
        }
        CHECK(total == 1);
      }
    }
  }
}

TEST_CASE("building is deterministic") {
  Psmas a = testing::load_fixture("chain.game");
  Psmas b = testing::load_fixture("chain.game");
  REQUIRE(a.params() == b.params());
  for (auto id : a.params()) CHECK(a.param_name(id) == b.param_name(id));
  for (std::size_t s = 0; s < a.csg().states.size(); ++s) {
    const auto& ta = a.transitions(static_cast<int>(s));
    const auto& tb = b.transitions(static_cast<int>(s));
    REQUIRE(ta.size() == tb.size());
    for (std::size_t k = 0; k < ta.size(); ++k) CHECK(ta[k].probability == tb[k].probability);
  }
}

TEST_CASE("parameter naming") {
  Psmas m = testing::load_fixture("chain.game");
  auto y1 = m.names().lookup("y1");
  REQUIRE(y1);
  CHECK(m.names().lookup("x[A1,s0,a]") == y1);
  CHECK(m.param_name(*y1) == "y1");
  // Dependent parameters are named but never free.
  auto dep = m.names().lookup("x[A1,s0,b]");
  REQUIRE(dep);
  CHECK(m.is_dependent(*dep));
  CHECK(m.free_params(0).size() == 5);
}

TEST_CASE("admissibility") {
  Psmas m = testing::load_fixture("ball.game");
  SUBCASE("interior point") { CHECK(check_admissible(m, ball_val(m, Rational(1, 2), Rational(1, 2))).ok); }
  SUBCASE("out of unit interval") {
    auto r = check_admissible(m, ball_val(m, Rational(6, 5), Rational(1, 2)));
    CHECK_FALSE(r.ok);
    REQUIRE(!r.violations.empty());
    CHECK(r.violations.front().condition == 2);
    CHECK(r.violations.front().location == "x1");
  }
  SUBCASE("simplex vertices") {
    for (int a = 0; a <= 1; ++a) {
      for (int b = 0; b <= 1; ++b) CHECK(check_admissible(m, ball_val(m, a, b)).ok);
    }
  }
  SUBCASE("explicit non-simplex assignment") {
    auto v = ball_val(m, Rational(1, 2), Rational(1, 2));
    v[*m.names().lookup("x[A1,s0,catch]")] = Rational(1, 3);
    auto r = check_admissible(m, v);
    CHECK_FALSE(r.ok);
    bool cond3 = false;
    for (const auto& viol : r.violations) cond3 |= viol.condition == 3;
    CHECK(cond3);
  }
  SUBCASE("missing parameter") {
    poly::ParamValuation v{{*m.names().lookup("x1"), Rational(1, 2)}};
    CHECK_THROWS_AS(check_admissible(m, v), MissingParameterError);
    CHECK(check_admissible(m, v, true).ok);
  }
}

TEST_CASE("rewards") {
  Psmas m = testing::load_fixture("ball.game");
  CHECK(m.reward(0).action_value(J(m, {"catch", "skip"})) == 2);
  CHECK(m.reward(0).action_value(J(m, {"skip", "catch"})) == 1);
  CHECK(m.reward(1).action_value(J(m, {"skip", "catch"})) == 1);
  CHECK(m.reward(1).state_value(0) == 0);
  Psmas p = testing::load_fixture("pennies.game");
  CHECK(p.reward(0).action_value(J(p, {"heads", "tails"})) == -1);
}

TEST_CASE("model parse errors") {
  auto col_of = [](const char* text) {
    try {
      parse_game(text, "m");
    } catch (const ParseError& e) {
      return std::make_pair(e.line(), e.column());
    }
    return std::make_pair(std::size_t{0}, std::size_t{0});
  };
  CHECK(col_of("agents: A\nstates: s\ninit: t\n") == std::make_pair(std::size_t{3}, std::size_t{7}));
  CHECK(col_of("states: s\nagents: A\n").first == 1);
  CHECK(col_of("agents: A\nstates: s\ninit: s\nactions A @ s: only\ntrans s (only) -> { s: 1 }\n"
               "actions A @ s: only\n").first == 6);
  CHECK(col_of("agents: A\nstates: s\ninit: s\nactions A @ s: a\ntrans s (a, a) -> { s: 1 }\n") ==
        std::make_pair(std::size_t{5}, std::size_t{9}));
  CHECK_THROWS_AS(parse_game("agents: A\nstates: s\ninit: s\nactions A @ s: a\n"), ModelError);
  CHECK_THROWS_AS(parse_game("agents: A\nstates: s t\ninit: s\nactions A @ *: a\n"
                             "trans * (a) -> { s: 1/2, t: 1/3 }\n"),
                  ModelError);
}
