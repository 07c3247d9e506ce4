#include <cstdlib>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "doctest.h"
#include "fixtures.hpp"
#include "respgames/cli/cli.hpp"

using nlohmann::json;
using respgames::cli::run;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
  json envelope() const { return json::parse(out); }
};

Outcome invoke(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run(args, out, err);
  return {code, out.str(), err.str()};
}

std::string ball() { return respgames::testing::fixture_path("ball.game"); }

}  // namespace

TEST_CASE("exit codes") {
  SUBCASE("true verdict") {
    auto o = invoke({"check", "--model", ball(), "--formula", "<A1,A2> P>=1 [X true]"});
    CHECK(o.code == 0);
    CHECK(o.envelope()["result"]["verdict"] == "true");
  }
  SUBCASE("false verdict") {
    auto o = invoke({"check", "--model", ball(), "--formula", "collision"});
    CHECK(o.code == 1);
  }
  SUBCASE("symbolic answer is a success") {
    auto o = invoke({"check", "--model", ball(), "--formula", "<A1> P>=1/2 [X collision]"});
    CHECK(o.code == 0);
    CHECK(o.envelope()["result"]["verdict"] == "undecided");
    CHECK(o.envelope()["result"]["region"] == "x1*x2 - x1 - x2 + 1 >= 1/2");
  }
  SUBCASE("usage errors") {
    CHECK(invoke({}).code == 2);
    CHECK(invoke({"frobnicate"}).code == 2);
    CHECK(invoke({"check", "--formula", "true"}).code == 2);
    CHECK(invoke({"check", "--model", "/nonexistent/model.game", "--formula", "true"}).code == 2);
    CHECK(invoke({"degree", "--model", ball(), "--formula", "X collision", "--agent", "A1"}).code == 2);
    CHECK(invoke({"check", "--model", ball(), "--formula", "true", "--output", "xml"}).code == 2);
  }
  SUBCASE("parse error carries the position") {
    auto o = invoke({"check", "--model", ball(), "--formula", "<A1> P>=3/4 [X score1"});
    CHECK(o.code == 2);
    CHECK(o.envelope()["error"]["kind"] == "parse");
    CHECK(o.err.find(":1:22:") != std::string::npos);
  }
  SUBCASE("degenerate degree") {
    auto o = invoke({"degree", "--model", ball(), "--kind", "CPR", "--agent", "A1", "--plan", "pi_catch",
                     "--formula", "X true"});
    CHECK(o.code == 3);
    CHECK(o.envelope()["error"]["kind"] == "degenerate");
  }
  SUBCASE("resource limit") {
    auto o = invoke({"check", "--model", ball(), "--formula", "<A1> P>=1/2 [F<=9 collision]", "--limit-paths", "1000"});
    CHECK(o.code == 3);
    CHECK(o.envelope()["error"]["kind"] == "resource");
  }
  SUBCASE("help") { CHECK(invoke({"--help"}).code == 0); }
}

TEST_CASE("degree command") {
  auto o = invoke({"degree", "--model", ball(), "--kind", "CAR", "--agent", "A1", "--plan", "pi_skip", "--formula",
                   "X (dropped | score2)"});
  REQUIRE(o.code == 0);
  auto r = o.envelope()["result"];
  CHECK(r["value"] == "1");
  CHECK(r["kappa"] == true);
  CHECK(r["numerator"] == "x1");

  auto cpr = invoke({"degree", "--model", ball(), "--kind", "CPR", "--agent", "A1", "--plan", "pi_catch",
                     "--formula", "X collision", "--bind", "x1=1/2", "--bind", "x2=0.5"});
  REQUIRE(cpr.code == 0);
  CHECK(cpr.envelope()["result"]["evaluated"] == "1/3");
}

TEST_CASE("eval command") {
  auto o = invoke({"eval", "--model", ball(), "--expr", "x1", "--bind", "x1=3/10", "--output", "human"});
  CHECK(o.code == 0);
  CHECK(o.out == "3/10 (0.3)\n");
  auto dec = invoke({"eval", "--model", ball(), "--expr", "x1", "--bind", "x1=0.3"});
  CHECK(dec.envelope()["result"]["value"] == "3/10");

  auto bad = invoke({"eval", "--model", ball(), "--expr", "x1", "--bind", "x1=2"});
  CHECK(bad.code == 3);
  CHECK(bad.err.find("condition 2") != std::string::npos);

  auto missing = invoke({"eval", "--model", ball(), "--expr", "x1*x2", "--bind", "x1=3/10"});
  CHECK(missing.code == 2);
  CHECK(missing.envelope()["error"]["kind"] == "missing-parameter");

  auto formula = invoke({"eval", "--model", ball(), "--formula", "X (dropped | score2)", "--bind", "x1=3/10",
                         "--output", "human"});
  CHECK(formula.out == "3/10 (0.3)\n");
}

TEST_CASE("ne command") {
  auto o = invoke({"ne", "--model", ball(), "--horizon", "2", "--lambda1", "1", "--lambda2", "0", "--grid", "1000"});
  REQUIRE(o.code == 0);
  auto sols = o.envelope()["result"]["solutions"];
  REQUIRE(sols.size() >= 1);
  for (const auto& s : sols) {
    CHECK(s["gap"].get<double>() <= 1e-6);
    CHECK(s["grid_gap"].get<double>() <= 1e-6);
  }
  CHECK(sols[0]["exact"]["x1"] == "0");
  CHECK(sols[0]["exact"]["x2"] == "1");

  SUBCASE("responsibility weight needs a plan") {
    CHECK(invoke({"ne", "--model", ball(), "--lambda2", "1"}).code == 2);
  }
  SUBCASE("responsibility setting") {
    auto r = invoke({"ne", "--model", ball(), "--horizon", "2", "--lambda1", "0", "--lambda2", "1", "--theta", "0",
                     "--plan", "pi_resp", "--formula", "F<=2 (collision | dropped)"});
    REQUIRE(r.code == 0);
    bool found = false;
    const json env = r.envelope();
    for (const auto& s : env["result"]["solutions"]) {
      found = found || (s["exact"]["x1"] == "0" && s["exact"]["x2"] == "1");
    }
    CHECK(found);
  }
}

TEST_CASE("simulate command") {
  std::vector<std::string> args{"simulate", "--model", ball(), "--formula", "X (dropped | score2)", "--bind",
                                "x1=0.3", "--bind", "x2=0.7", "--samples", "50000", "--seed", "9"};
  auto o = invoke(args);
  REQUIRE(o.code == 0);
  auto r = o.envelope()["result"];
  CHECK(std::abs(r["estimate"].get<double>() - 0.3) <= 4 * r["stderr"].get<double>());
  CHECK(r["samples"] == 50000);

  SUBCASE("seed from the environment") {
    std::vector<std::string> no_seed(args.begin(), args.end() - 2);
    setenv("RESPGAMES_SEED", "9", 1);
    auto e = invoke(no_seed);
    unsetenv("RESPGAMES_SEED");
    CHECK(e.envelope()["result"]["hits"] == r["hits"]);
    CHECK(e.envelope()["result"]["seed"] == 9);
  }
  SUBCASE("degree estimate") {
    auto d = invoke({"simulate", "--model", ball(), "--formula", "X collision", "--plan", "pi_catch", "--agent", "A1",
                     "--kind", "CPR", "--bind", "x1=1/2", "--bind", "x2=1/2", "--samples", "100000"});
    REQUIRE(d.code == 0);
    auto res = d.envelope()["result"];
    CHECK(std::abs(res["estimate"].get<double>() - 1.0 / 3) <= 4 * res["stderr"].get<double>());
  }
}

TEST_CASE("idempotent JSON") {
  const std::vector<std::vector<std::string>> invocations{
      {"check", "--model", ball(), "--formula", "<A1> P>=3/4 [X score1]", "--bind", "x2=1"},
      {"degree", "--model", ball(), "--kind", "CPR", "--agent", "A2", "--plan", "pi_catch", "--formula",
       "X collision"},
      {"ne", "--model", ball(), "--horizon", "2"},
      {"simulate", "--model", ball(), "--formula", "X collision", "--bind", "x1=1/4", "--bind", "x2=1/4",
       "--samples", "20000"},
      {"eval", "--model", ball(), "--expr", "x1*x2", "--bind", "x1=1/2", "--bind", "x2=1/3"},
  };
  for (const auto& args : invocations) {
    auto a = invoke(args).envelope();
    auto b = invoke(args).envelope();
    a.erase("timing");
    b.erase("timing");
    CHECK(a.dump() == b.dump());
    CHECK(a["digest"].get<std::string>().size() == 64);
    CHECK(a["warnings"].size() == 1);
  }
}

TEST_CASE("formula file and digest") {
  std::string path = "cli_test_formula.txt";
  {
    std::ofstream f(path);
    f << "# comment\n<A1,A2> P>=1 [X true]\n";
  }
  auto o = invoke({"check", "--model", ball(), "--formula-file", path});
  CHECK(o.code == 0);
  auto same = invoke({"check", "--model", ball(), "--formula-file", path});
  CHECK(o.envelope()["digest"] == same.envelope()["digest"]);
  auto other = invoke({"check", "--model", ball(), "--formula", "true"});
  CHECK(o.envelope()["digest"] != other.envelope()["digest"]);
  std::remove(path.c_str());
  CHECK(respgames::cli::digest("", "") == "6e340b9cffb37a989ca544e6bb780a2c78901d3fb33738768511a30617afa01d");
}
