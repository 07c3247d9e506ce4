#include "respgames/cli/cli.hpp"

#include <openssl/evp.h>
#include <omp.h>

#include <CLI11.hpp>
#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <json.hpp>
#include <optional>
#include <sstream>

#include "respgames/checker/checker.hpp"
#include "respgames/errors.hpp"
#include "respgames/logic/formula.hpp"
#include "respgames/model/parser.hpp"
#include "respgames/model/psmas.hpp"
#include "respgames/oracle/oracle.hpp"
#include "respgames/poly/parse.hpp"
#include "respgames/synth/synth.hpp"
#include "respgames/trace/history.hpp"

namespace respgames::cli {

using nlohmann::json;
using poly::ParamId;
using poly::ParamValuation;
using poly::Rational;

std::string digest(std::string_view model_text, std::string_view formula_text) {
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  unsigned char hash[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  const char sep = '\0';
  EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
  EVP_DigestUpdate(ctx, model_text.data(), model_text.size());
  EVP_DigestUpdate(ctx, &sep, 1);
  EVP_DigestUpdate(ctx, formula_text.data(), formula_text.size());
  EVP_DigestFinal_ex(ctx, hash, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream out;
  for (unsigned int i = 0; i < len; ++i) out << std::hex << std::setw(2) << std::setfill('0') << int(hash[i]);
  return out.str();
}

namespace {

struct Options {
  std::string subcommand;
  std::string model_path;
  std::string formula;
  std::string formula_file;
  std::string plan;
  std::string agent;
  std::string kind = "CAR";
  std::string coalition;
  std::string state;
  std::string expr;
  int horizon = 1;
  std::vector<std::string> binds;
  std::string theta = "1";
  std::string lambda1 = "1";
  std::string lambda2 = "0";
  std::optional<std::uint64_t> seed;
  std::size_t samples = 100000;
  int grid = 0;
  std::size_t starts = 32;
  std::optional<std::size_t> limit_terms;
  std::optional<std::size_t> limit_paths;
  int threads = 0;
  std::string output = "json";
};

class UsageError : public Error {
 public:
  using Error::Error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Rational parse_number(const std::string& text, const std::string& what) {
  try {
    return poly::parse_rational(text);
  } catch (const std::invalid_argument& e) {
    throw UsageError("bad value for " + what + ": " + e.what());
  }
}

struct Session {
  Options opt;
  std::string model_text;
  std::string formula_text;
  std::optional<model::Psmas> m;

  const model::Psmas& model() const { return *m; }

  void load() {
    if (opt.model_path.empty()) throw UsageError("--model is required");
    model_text = read_file(opt.model_path);
    m = model::build_psmas(model::parse_game(model_text, opt.model_path));
    if (!opt.formula_file.empty()) {
      if (!opt.formula.empty()) throw UsageError("give either --formula or --formula-file");
      formula_text = read_file(opt.formula_file);
    } else {
      formula_text = opt.formula;
    }
  }

  std::string formula_source() const { return opt.formula_file.empty() ? "<formula>" : opt.formula_file; }

  int state_or(int fallback) const {
    if (opt.state.empty()) return fallback;
    int s = model().csg().state_index(opt.state);
    if (s < 0) throw UsageError("unknown state " + opt.state);
    return s;
  }

  int agent() const {
    if (opt.agent.empty()) throw UsageError("--agent is required");
    int i = model().csg().agent_index(opt.agent);
    if (i < 0) throw UsageError("unknown agent " + opt.agent);
    return i;
  }

  std::vector<int> coalition() const {
    std::vector<int> out;
    if (opt.coalition.empty()) {
      for (std::size_t i = 0; i < model().csg().agents.size(); ++i) out.push_back(static_cast<int>(i));
      return out;
    }
    std::stringstream in(opt.coalition);
    std::string name;
    while (std::getline(in, name, ',')) {
      int i = model().csg().agent_index(name);
      if (i < 0) throw UsageError("unknown agent " + name + " in --coalition");
      if (std::find(out.begin(), out.end(), i) == out.end()) out.push_back(i);
    }
    std::sort(out.begin(), out.end());
    return out;
  }

  logic::DegreeKind kind() const {
    if (opt.kind == "CAR" || opt.kind == "car") return logic::DegreeKind::Car;
    if (opt.kind == "CPR" || opt.kind == "cpr") return logic::DegreeKind::Cpr;
    throw UsageError("--kind must be CAR or CPR");
  }

  ParamValuation bindings() const {
    ParamValuation v;
    for (const auto& b : opt.binds) {
      auto eq = b.find('=');
      if (eq == std::string::npos) throw UsageError("--bind expects name=value, got " + b);
      std::string name = b.substr(0, eq);
      auto id = model().names().lookup(name);
      if (!id) throw UsageError("unknown parameter " + name);
      v[*id] = parse_number(b.substr(eq + 1), name);
    }
    return v;
  }

  logic::PathPtr path() const {
    if (formula_text.empty()) throw UsageError("a path formula is required");
    return logic::parse_path_formula(formula_text, logic::vocabulary(model()), formula_source());
  }

  std::uint64_t seed() const {
    if (opt.seed) return *opt.seed;
    if (const char* env = std::getenv("RESPGAMES_SEED")) {
      try {
        return std::stoull(env);
      } catch (const std::exception&) {
        throw UsageError(std::string("RESPGAMES_SEED is not an integer: ") + env);
      }
    }
    return 1;
  }

  json valuation_json(const ParamValuation& v) const {
    json out = json::object();
    for (const auto& [id, q] : v) out[model().param_name(id)] = poly::to_string(q);
    return out;
  }

  json valuation_decimals(const ParamValuation& v) const {
    json out = json::object();
    for (const auto& [id, q] : v) out[model().param_name(id)] = poly::to_double(q);
    return out;
  }
};

std::string render_value(const Rational& q) { return poly::to_string(q) + " (" + poly::to_decimal(q) + ")"; }

// Each command fills the result object and the human lines, and returns the
// exit code.
struct Report {
  json result = json::object();
  std::vector<std::string> lines;
};

std::string verdict_word(const std::optional<bool>& v) { return v ? (*v ? "true" : "false") : "undecided"; }

int cmd_check(Session& s, Report& r) {
  if (s.formula_text.empty()) throw UsageError("--formula or --formula-file is required");
  auto f = logic::parse_formula(s.formula_text, s.model(), s.formula_source());
  const int state = s.state_or(s.model().csg().initial);
  checker::QueryContext ctx;
  if (!s.opt.binds.empty()) ctx.valuation = s.bindings();
  checker::Checker c(s.model(), ctx);
  auto res = c.check(state, *f);
  const auto* names = &s.model().names();

  r.result["formula"] = logic::to_string(*f);
  r.result["state"] = s.model().csg().states[state];
  r.result["mode"] = ctx.evaluated() ? "evaluated" : "symbolic";
  r.result["verdict"] = verdict_word(res.holds);
  r.lines.push_back("verdict: " + verdict_word(res.holds));
  if (res.region) {
    r.result["region"] = res.region->to_string(names);
    if (!res.holds) r.lines.push_back("holds where: " + res.region->to_string(names));
  }
  if (res.reward) {
    r.result["reward"] = res.reward->to_string(names);
    r.lines.push_back("reward: " + res.reward->to_string(names));
  }
  if (res.value_infinite) {
    r.result["value"] = "inf";
    r.lines.push_back("value: inf");
  } else if (res.value) {
    r.result["value"] = poly::to_string(*res.value);
    r.lines.push_back("value: " + render_value(*res.value));
  }
  if (res.witness) {
    r.result["witness"] = s.valuation_json(*res.witness);
    if (!res.witness->empty()) r.lines.push_back("witness: " + checker::to_string(*res.witness, names));
  }
  if (res.degree) {
    r.result["degree"] = {{"value", poly::to_string(res.degree->value, names)}, {"kappa", res.degree->kappa}};
  }
  return res.holds && !*res.holds ? kFalse : kOk;
}

int cmd_degree(Session& s, Report& r) {
  if (s.opt.plan.empty()) throw UsageError("--plan is required");
  const model::Plan& plan = s.model().plan(s.opt.plan);
  const int agent = s.agent();
  auto psi = s.path();
  const int state = s.state_or(plan.start);
  checker::QueryContext ctx;
  if (!s.opt.binds.empty()) ctx.valuation = s.bindings();
  checker::Checker c(s.model(), ctx);
  const auto kind = s.kind();
  auto d = kind == logic::DegreeKind::Car ? c.car_degree(state, agent, plan, *psi)
                                          : c.cpr_degree(state, agent, plan, *psi, s.coalition());
  const auto* names = &s.model().names();
  r.result["kind"] = logic::to_string(kind);
  r.result["agent"] = s.opt.agent;
  r.result["plan"] = plan.name;
  r.result["state"] = s.model().csg().states[state];
  r.result["formula"] = logic::to_string(*psi);
  r.result["value"] = poly::to_string(d.value, names);
  r.result["kappa"] = d.kappa;
  r.result["numerator"] = poly::to_string(d.numerator, names);
  r.result["denominator"] = poly::to_string(d.denominator, names);
  r.result["numerator_paths"] = d.numerator_paths;
  r.result["denominator_paths"] = d.denominator_paths;
  r.lines.push_back("value: " + poly::to_string(d.value, names));
  r.lines.push_back(std::string("kappa: ") + (d.kappa ? "1" : "0"));
  r.lines.push_back("numerator: " + poly::to_string(d.numerator, names));
  r.lines.push_back("denominator: " + poly::to_string(d.denominator, names));
  if (ctx.evaluated()) {
    Rational v = checker::evaluate_degree(d, *ctx.valuation, names);
    r.result["evaluated"] = poly::to_string(v);
    r.lines.push_back("at bindings: " + render_value(v));
  }
  return kOk;
}

int cmd_ne(Session& s, Report& r) {
  synth::UtilityConfig cfg{parse_number(s.opt.lambda1, "--lambda1"), parse_number(s.opt.lambda2, "--lambda2"),
                           parse_number(s.opt.theta, "--theta")};
  std::optional<synth::ResponsibilitySpec> spec;
  if (!s.opt.plan.empty()) {
    const model::Plan& plan = s.model().plan(s.opt.plan);
    spec = synth::ResponsibilitySpec{s.state_or(plan.start), plan, s.path()};
  } else if (cfg.lambda2 != 0) {
    throw UsageError("--lambda2 needs --plan and --formula for the responsibility part");
  }
  if (s.opt.horizon < 0) throw UsageError("--horizon must be nonnegative");
  auto u = synth::build_utility(s.model(), s.model().csg().initial, s.opt.horizon, cfg, spec);
  synth::SolveOptions so;
  so.starts = s.opt.starts;
  so.seed = s.seed();
  auto sols = synth::synthesize(u, so);

  const auto& c = s.model().csg();
  json list = json::array();
  for (std::size_t k = 0; k < sols.size(); ++k) {
    const auto& sol = sols[k];
    json item;
    item["params"] = s.valuation_decimals(sol.valuation);
    item["exact"] = s.valuation_json(sol.valuation);
    item["residual"] = sol.residual;
    item["gap"] = sol.gap.value_or(0.0);
    json support = json::object();
    for (const auto& [slot, acts] : sol.support) {
      json names = json::array();
      for (int a : acts) names.push_back(c.actions[a]);
      support[c.agents[slot.agent] + "@" + c.states[slot.state]] = names;
    }
    item["support"] = support;
    std::ostringstream line;
    line << "solution " << k + 1 << ": " << checker::to_string(sol.valuation, &s.model().names())
         << "  residual " << sol.residual << "  gap " << sol.gap.value_or(0.0);
    if (s.opt.grid > 0) {
      double worst = 0;
      for (std::size_t i = 0; i < c.agents.size(); ++i) {
        // The agent's own entries are overwritten by the grid points.
        auto br = oracle::grid_best_response(u, static_cast<int>(i), sol.valuation, s.opt.grid);
        double own = poly::to_double(u.agents[i].evaluate(sol.valuation));
        worst = std::max(worst, poly::to_double(br.value) - own);
      }
      item["grid_gap"] = worst;
      line << "  grid gap " << worst;
    }
    list.push_back(item);
    r.lines.push_back(line.str());
  }
  r.result["solutions"] = list;
  r.result["horizon"] = s.opt.horizon;
  r.result["lambda1"] = poly::to_string(cfg.lambda1);
  r.result["lambda2"] = poly::to_string(cfg.lambda2);
  r.result["theta"] = poly::to_string(cfg.theta);
  if (sols.empty()) r.lines.push_back("no verified equilibrium found");
  return sols.empty() ? kFalse : kOk;
}

int cmd_simulate(Session& s, Report& r) {
  auto psi = s.path();
  oracle::SimConfig cfg;
  cfg.samples = s.opt.samples;
  if (cfg.samples == 0) throw UsageError("--samples must be positive");
  cfg.seed = s.seed();
  cfg.valuation = s.bindings();
  oracle::Estimate e;
  if (!s.opt.plan.empty()) {
    const model::Plan& plan = s.model().plan(s.opt.plan);
    cfg.state = s.state_or(plan.start);
    e = oracle::estimate_degree(s.model(), cfg, s.agent(), plan, *psi, s.kind(), s.coalition());
    r.result["kind"] = logic::to_string(s.kind());
  } else {
    cfg.state = s.state_or(s.model().csg().initial);
    e = oracle::estimate_probability(s.model(), cfg, *psi);
  }
  r.result["formula"] = logic::to_string(*psi);
  r.result["seed"] = cfg.seed;
  r.result["defined"] = e.defined;
  r.result["estimate"] = e.mean;
  r.result["stderr"] = e.std_error;
  r.result["samples"] = e.samples;
  r.result["hits"] = e.hits;
  r.result["base"] = e.base;
  std::ostringstream line;
  if (!e.defined) {
    line << "estimate undefined: no sampled history in the denominator";
  } else {
    line << "estimate " << e.mean << " +- " << e.std_error << " (" << e.samples << " samples)";
  }
  r.lines.push_back(line.str());
  return kOk;
}

int cmd_eval(Session& s, Report& r) {
  ParamValuation v = s.bindings();
  auto report = model::check_admissible(s.model(), v, true);
  if (!report.ok) {
    const auto& bad = report.violations.front();
    throw InadmissibleError("binding breaks admissibility condition " + std::to_string(bad.condition) + " at " +
                            bad.location + " (value " + poly::to_string(bad.value) + ")");
  }
  const auto* names = &s.model().names();
  poly::RationalFunction f;
  if (!s.opt.expr.empty()) {
    f = poly::parse_rational_function(s.opt.expr, s.model().names(), "<expr>");
  } else {
    checker::Checker c(s.model());
    f = c.path_sat_prob(s.state_or(s.model().csg().initial), *s.path());
  }
  for (ParamId id : f.num().variables()) {
    if (!v.count(id)) throw MissingParameterError(s.model().param_name(id));
  }
  for (ParamId id : f.den().variables()) {
    if (!v.count(id)) throw MissingParameterError(s.model().param_name(id));
  }
  Rational q = poly::rf_eval(f, v, names);
  r.result["expression"] = poly::to_string(f, names);
  r.result["value"] = poly::to_string(q);
  r.result["decimal"] = poly::to_decimal(q);
  r.lines.push_back(render_value(q));
  return kOk;
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ResourceError*>(&e) || dynamic_cast<const DegenerateQueryError*>(&e) ||
      dynamic_cast<const UnsupportedQueryError*>(&e) || dynamic_cast<const InadmissibleError*>(&e)) {
    return kResource;
  }
  if (dynamic_cast<const Error*>(&e)) return kUsage;
  return kResource;
}

std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ParseError*>(&e)) return "parse";
  if (dynamic_cast<const MissingParameterError*>(&e)) return "missing-parameter";
  if (dynamic_cast<const ModelError*>(&e)) return "model";
  if (dynamic_cast<const UsageError*>(&e)) return "usage";
  if (dynamic_cast<const ResourceError*>(&e)) return "resource";
  if (dynamic_cast<const DegenerateQueryError*>(&e)) return "degenerate";
  if (dynamic_cast<const UnsupportedQueryError*>(&e)) return "unsupported";
  if (dynamic_cast<const InadmissibleError*>(&e)) return "inadmissible";
  return "internal";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options opt;
  CLI::App app{"Responsibility-aware parametric game checker"};
  app.name("respgames");
  app.require_subcommand(1);

  auto common = [&](CLI::App* sub) {
    sub->add_option("--model", opt.model_path, "model file")->required();
    sub->add_option("--formula", opt.formula, "formula text");
    sub->add_option("--formula-file", opt.formula_file, "file holding the formula");
    sub->add_option("--state", opt.state, "state to evaluate at");
    sub->add_option("--bind", opt.binds, "parameter binding name=value (repeatable)");
    sub->add_option("--limit-terms", opt.limit_terms, "polynomial term limit");
    sub->add_option("--limit-paths", opt.limit_paths, "path enumeration limit");
    sub->add_option("--threads", opt.threads, "worker threads (0 = default)");
    sub->add_option("--seed", opt.seed, "random seed (falls back to RESPGAMES_SEED)");
    sub->add_option("--output", opt.output, "json or human")->check(CLI::IsMember({"json", "human"}));
  };
  auto responsibility = [&](CLI::App* sub) {
    sub->add_option("--plan", opt.plan, "plan name");
    sub->add_option("--agent", opt.agent, "agent name");
    sub->add_option("--kind", opt.kind, "CAR or CPR");
    sub->add_option("--coalition", opt.coalition, "comma-separated agents (default: all)");
  };

  auto* check = app.add_subcommand("check", "decide a state formula");
  common(check);
  auto* degree = app.add_subcommand("degree", "responsibility degree of an agent");
  common(degree);
  responsibility(degree);
  auto* ne = app.add_subcommand("ne", "synthesize Nash equilibria");
  common(ne);
  ne->add_option("--plan", opt.plan, "plan for the responsibility part");
  ne->add_option("--horizon", opt.horizon, "payoff horizon");
  ne->add_option("--theta", opt.theta, "weight of CPR in responsibility");
  ne->add_option("--lambda1", opt.lambda1, "payoff weight");
  ne->add_option("--lambda2", opt.lambda2, "responsibility weight");
  ne->add_option("--starts", opt.starts, "solver starts per support");
  ne->add_option("--grid", opt.grid, "grid resolution for the best-response cross-check (0 = off)");
  auto* simulate = app.add_subcommand("simulate", "Monte-Carlo estimate");
  common(simulate);
  responsibility(simulate);
  simulate->add_option("--samples", opt.samples, "number of sampled histories");
  auto* eval = app.add_subcommand("eval", "evaluate an expression at bindings");
  common(eval);
  eval->add_option("--expr", opt.expr, "polynomial or rational function");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return kOk;
    }
    err << "respgames: " << e.what() << "\n";
    return kUsage;
  }

  Session s;
  s.opt = opt;
  s.opt.subcommand = app.get_subcommands().front()->get_name();
  const bool as_json = opt.output == "json";
  const auto started = std::chrono::steady_clock::now();

  json envelope;
  envelope["subcommand"] = s.opt.subcommand;
  envelope["warnings"] = json::array();
  int code = kOk;
  Report report;
  const std::size_t saved_terms = poly::term_limit();
  const std::size_t saved_paths = trace::path_limit();
  try {
    if (opt.limit_terms) poly::set_term_limit(*opt.limit_terms);
    if (opt.limit_paths) trace::set_path_limit(*opt.limit_paths);
    if (opt.threads > 0) omp_set_num_threads(opt.threads);
    s.load();
    envelope["digest"] = digest(s.model_text, s.opt.expr.empty() ? s.formula_text : s.opt.expr);
    for (const auto& note : s.model().game().notes) envelope["warnings"].push_back(note);
    const auto& sub = s.opt.subcommand;
    if (sub == "check") code = cmd_check(s, report);
    else if (sub == "degree") code = cmd_degree(s, report);
    else if (sub == "ne") code = cmd_ne(s, report);
    else if (sub == "simulate") code = cmd_simulate(s, report);
    else code = cmd_eval(s, report);
    envelope["result"] = report.result;
  } catch (const std::exception& e) {
    code = exit_code_for(e);
    envelope["result"] = nullptr;
    envelope["error"] = {{"kind", error_kind(e)}, {"message", e.what()}};
    err << "respgames: " << e.what() << "\n";
  }
  poly::set_term_limit(saved_terms);
  trace::set_path_limit(saved_paths);
  if (!envelope.contains("digest")) envelope["digest"] = nullptr;
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  envelope["timing"] = {{"seconds", seconds}};

  if (as_json) {
    out << envelope.dump(2) << "\n";
  } else if (code == kOk || code == kFalse) {
    for (const auto& line : report.lines) out << line << "\n";
  }
  return code;
}

}  // namespace respgames::cli
