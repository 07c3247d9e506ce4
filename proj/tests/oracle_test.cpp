#include <cmath>

#include "doctest.h"
#include "fixtures.hpp"
#include "respgames/checker/checker.hpp"
#include "respgames/errors.hpp"
#include "respgames/oracle/oracle.hpp"
#include "respgames/synth/synth.hpp"

using namespace respgames;
using namespace respgames::oracle;
using model::Psmas;
using poly::ParamId;
using poly::ParamValuation;
using poly::Rational;

namespace {

ParamId id(const Psmas& m, const char* name) { return *m.names().lookup(name); }

Rational Q(long a, long b) {
  Rational q(a, b);
  q.canonicalize();
  return q;
}

logic::PathPtr path(const Psmas& m, const char* text) {
  return logic::parse_path_formula(text, logic::vocabulary(m));
}

bool agrees(const Estimate& e, double exact) {
  // A zero standard error only happens for a degenerate frequency, which
  // must then be exact.
  return std::abs(e.mean - exact) <= std::max(4 * e.std_error, 1e-12);
}

}  // namespace

TEST_CASE("chunk seeds") {
  CHECK(chunk_seed(1, 0) != chunk_seed(1, 1));
  CHECK(chunk_seed(1, 0) != chunk_seed(2, 0));
  CHECK(chunk_seed(5, 9) == chunk_seed(5, 9));
}

TEST_CASE("sampling") {
  Psmas m = testing::load_fixture("ball.game");
  SimConfig cfg;
  cfg.samples = 10000;
  cfg.horizon = 3;
  SUBCASE("degenerate strategies give the self loop") {
    cfg.valuation = {{id(m, "x1"), Rational(1)}, {id(m, "x2"), Rational(1)}};
    const int skip = m.csg().action_index("skip");
    for (const auto& h : simulate_paths(m, cfg)) {
      CHECK(h.states == std::vector<int>{0, 0, 0, 0});
      CHECK(h.actions[0] == model::JointAction{skip, skip});
    }
  }
  SUBCASE("deterministic in the seed") {
    cfg.valuation = {{id(m, "x1"), Q(1, 3)}, {id(m, "x2"), Q(3, 5)}};
    auto a = simulate_paths(m, cfg);
    auto b = simulate_paths(m, cfg);
    bool same = true;
    for (std::size_t k = 0; k < a.size(); ++k) same = same && a[k].states == b[k].states && a[k].actions == b[k].actions;
    CHECK(same);
    cfg.seed = 2;
    auto c = simulate_paths(m, cfg);
    bool differs = false;
    for (std::size_t k = 0; k < a.size(); ++k) differs = differs || a[k].states != c[k].states;
    CHECK(differs);
  }
  SUBCASE("fair coins") {
    cfg.samples = 200000;
    cfg.horizon = 1;
    cfg.valuation = {{id(m, "x1"), Q(1, 2)}, {id(m, "x2"), Q(1, 2)}};
    auto e = estimate_probability(m, cfg, *path(m, "X collision"));
    CHECK(agrees(e, 0.25));
  }
  SUBCASE("serial and parallel counts agree") {
    cfg.samples = 50000;
    cfg.valuation = {{id(m, "x1"), Q(1, 3)}, {id(m, "x2"), Q(3, 5)}};
    auto psi = path(m, "F<=2 (collision | dropped)");
    auto a = estimate_probability(m, cfg, *psi);
    cfg.parallel = false;
    auto b = estimate_probability(m, cfg, *psi);
    CHECK(a.hits == b.hits);
    CHECK(a.base == b.base);
  }
  SUBCASE("inadmissible valuation") {
    cfg.valuation = {{id(m, "x1"), Q(3, 2)}, {id(m, "x2"), Q(1, 2)}};
    CHECK_THROWS_AS(simulate_paths(m, cfg), InadmissibleError);
  }
}

TEST_CASE("frequencies match exact probabilities") {
  struct Case {
    const char* fixture;
    std::vector<const char*> formulas;
  };
  const std::vector<Case> cases{
      {"ball.game", {"X (dropped | score2)", "F<=2 (collision | dropped)"}},
      {"chain.game", {"F<=2 goal", "!far U<=3 goal"}},
      {"pennies.game", {"X win1", "F<=2 win2"}},
  };
  for (const auto& c : cases) {
    Psmas m = testing::load_fixture(c.fixture);
    for (int k = 0; k < 3; ++k) {
      // Three admissible points: each free parameter takes a share of its
      // slot's mass that varies with k.
      ParamValuation v;
      std::map<std::pair<int, int>, int> seen;
      for (ParamId p : m.free_params()) {
        int n = seen[{p.agent, p.state}]++;
        v[p] = n == 0 ? Q(2 * k + 1 + p.agent, 8) : Rational(0);
      }
      checker::Checker exact(m);
      for (const char* text : c.formulas) {
        auto psi = path(m, text);
        double p = poly::to_double(poly::rf_eval(exact.path_sat_prob(0, *psi), v));
        SimConfig cfg;
        cfg.samples = 200000;
        cfg.seed = 11 + k;
        cfg.valuation = v;
        auto e = estimate_probability(m, cfg, *psi);
        CHECK_MESSAGE(agrees(e, p), c.fixture << " " << text << " k=" << k << " exact=" << p << " est=" << e.mean
                                               << " se=" << e.std_error);
      }
    }
  }
}

TEST_CASE("degree estimates") {
  Psmas m = testing::load_fixture("ball.game");
  SimConfig cfg;
  cfg.samples = 200000;
  SUBCASE("full responsibility") {
    cfg.valuation = {{id(m, "x1"), Q(3, 10)}, {id(m, "x2"), Q(7, 10)}};
    auto e = estimate_degree(m, cfg, 0, m.plan("pi_skip"), *path(m, "X (dropped | score2)"),
                             logic::DegreeKind::Car, {0, 1});
    CHECK(e.defined);
    CHECK(e.mean == 1.0);
    CHECK(agrees(e, 1.0));
  }
  SUBCASE("guard off") {
    cfg.valuation = {{id(m, "x1"), Q(3, 10)}, {id(m, "x2"), Q(7, 10)}};
    auto e = estimate_degree(m, cfg, 0, m.plan("pi_skip"), *path(m, "X true"), logic::DegreeKind::Car, {0, 1});
    CHECK(e.mean == 0.0);
    CHECK(e.std_error == 0.0);
  }
  SUBCASE("preventive degree at one half") {
    cfg.valuation = {{id(m, "x1"), Q(1, 2)}, {id(m, "x2"), Q(1, 2)}};
    auto e = estimate_degree(m, cfg, 0, m.plan("pi_catch"), *path(m, "X collision"), logic::DegreeKind::Cpr,
                             {0, 1});
    CHECK(agrees(e, 1.0 / 3));
  }
  SUBCASE("two-step counterfactual degree") {
    cfg.state = m.csg().state_index("s2");
    cfg.valuation = {{id(m, "x1"), Q(2, 5)}, {id(m, "x2"), Q(3, 5)}};
    auto psi = path(m, "F<=2 (collision | dropped)");
    checker::Checker exact(m);
    auto d = exact.car_degree(cfg.state, 0, m.plan("pi_resp"), *psi);
    double p = poly::to_double(checker::evaluate_degree(d, cfg.valuation));
    auto e = estimate_degree(m, cfg, 0, m.plan("pi_resp"), *psi, logic::DegreeKind::Car, {0, 1});
    CHECK(agrees(e, p));
  }
}

TEST_CASE("grid best response") {
  Psmas m = testing::load_fixture("ball.game");
  const ParamId x1 = id(m, "x1");
  const ParamId x2 = id(m, "x2");
  SUBCASE("payoff setting") {
    auto u = synth::build_utility(m, 0, 2, synth::UtilityConfig{});
    auto br = grid_best_response(u, 0, {{x2, Q(1, 2)}});
    CHECK(br.points == 1001);
    REQUIRE(br.maximizers.size() == 1);
    CHECK(br.maximizers[0].at(x1) == 0);
    CHECK(br.value == 16);
  }
  SUBCASE("indifference keeps the whole grid") {
    Psmas g = testing::load_fixture("pennies.game");
    auto u = synth::build_utility(g, 0, 1, synth::UtilityConfig{});
    auto br = grid_best_response(u, 0, {{id(g, "h2"), Q(1, 2)}}, 100);
    CHECK(br.maximizers.size() == 101);
    CHECK(br.value == 0);
  }
  SUBCASE("responsibility minimisation prefers catching") {
    synth::ResponsibilitySpec spec{m.csg().state_index("s2"), m.plan("pi_resp"),
                                   path(m, "F<=2 (collision | dropped)")};
    auto u = synth::build_utility(m, 0, 2, synth::UtilityConfig{Rational(0), Rational(1), Rational(0)}, spec);
    auto br = grid_best_response(u, 0, {{x2, Rational(1)}});
    bool at_catch = std::any_of(br.maximizers.begin(), br.maximizers.end(),
                                [&](const ParamValuation& v) { return v.at(x1) == 0; });
    CHECK(at_catch);
    CHECK(br.value == 0);
  }
  SUBCASE("serial and parallel scans agree") {
    auto u = synth::build_utility(m, 0, 2, synth::UtilityConfig{});
    auto a = grid_best_response(u, 1, {{x1, Q(1, 3)}}, 500, true);
    auto b = grid_best_response(u, 1, {{x1, Q(1, 3)}}, 500, false);
    CHECK(a.maximizers == b.maximizers);
    CHECK(a.value == b.value);
  }
  SUBCASE("solver answers are grid maximizers") {
    Psmas g = testing::load_fixture("pennies.game");
    auto u = synth::build_utility(g, 0, 1, synth::UtilityConfig{});
    auto sols = synth::synthesize(u);
    REQUIRE_FALSE(sols.empty());
    for (const auto& s : sols) {
      for (int i = 0; i < 2; ++i) {
        ParamValuation others = s.valuation;
        ParamId own = id(g, i == 0 ? "h1" : "h2");
        others.erase(own);
        auto br = grid_best_response(u, i, others);
        // The solved value is optimal, so it matches the grid maximum.
        double solved = poly::to_double(u.agents[i].evaluate(s.valuation));
        CHECK(std::abs(solved - poly::to_double(br.value)) <= 1e-6);
      }
    }
  }
}
