#include "respgames/model/parser.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "respgames/errors.hpp"

namespace respgames::model {

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t column = 0;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '.' || c == '\'';
}

// Tokenizes a single line; comments already stripped.
std::vector<Token> tokenize(const std::string& line, const std::string& source, std::size_t lineno) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < line.size()) {
    char c = line[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    Token t;
    t.column = i + 1;
    if (ident_start(c)) {
      std::size_t j = i;
      while (j < line.size() && ident_char(line[j])) ++j;
      t.kind = Tok::Ident;
      t.text = line.substr(i, j - i);
      i = j;
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < line.size() && line[i + 1] != '>')) {
      std::size_t j = i + 1;
      while (j < line.size() && (std::isalnum(static_cast<unsigned char>(line[j])) ||
                                 line[j] == '.' || line[j] == '/' ||
                                 ((line[j] == '-' || line[j] == '+') &&
                                  (line[j - 1] == 'e' || line[j - 1] == 'E')))) {
        ++j;
      }
      t.kind = Tok::Number;
      t.text = line.substr(i, j - i);
      i = j;
    } else if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
      t.kind = Tok::Punct;
      t.text = "->";
      i += 2;
    } else if (std::string_view(":@{}(),*=").find(c) != std::string_view::npos) {
      t.kind = Tok::Punct;
      t.text = std::string(1, c);
      ++i;
    } else {
      throw ParseError(source, lineno, i + 1, std::string("unexpected character '") + c + "'");
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.column = line.size() + 1;
  out.push_back(end);
  return out;
}

class LineParser {
 public:
  LineParser(std::vector<Token> toks, const std::string& source, std::size_t line)
      : toks_(std::move(toks)), source_(source), line_(line) {}

  const Token& peek() const { return toks_[pos_]; }
  bool at_end() const { return peek().kind == Tok::End; }

  [[noreturn]] void fail(const std::string& msg) const { fail_at(peek(), msg); }
  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const {
    throw ParseError(source_, line_, t.column, msg);
  }

  bool accept(std::string_view punct) {
    if (peek().kind == Tok::Punct && peek().text == punct) {
      ++pos_;
      return true;
    }
    return false;
  }
  void expect(std::string_view punct) {
    if (!accept(punct)) fail("expected '" + std::string(punct) + "'");
  }
  Token ident(const char* what) {
    if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
    return toks_[pos_++];
  }
  Token number() {
    if (peek().kind != Tok::Number) fail("expected a number");
    return toks_[pos_++];
  }
  poly::Rational rational() {
    Token t = number();
    try {
      return poly::parse_rational(t.text);
    } catch (const std::invalid_argument& e) {
      fail_at(t, e.what());
    }
  }
  void finish() {
    if (!at_end()) fail("unexpected '" + peek().text + "'");
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const std::string& source_;
  std::size_t line_;
};

// Directive order; notes are exempt.
int section_rank(const std::string& keyword) {
  static const std::vector<std::string> order{"agents", "states", "init",  "labels", "actions",
                                              "tie",    "param",  "trans", "reward", "plan"};
  auto it = std::find(order.begin(), order.end(), keyword);
  return it == order.end() ? -1 : static_cast<int>(it - order.begin());
}

struct Builder {
  Csg csg;
  Game game;
  bool have_init = false;
  // Wildcard transitions are recorded separately so explicit lines win.
  std::map<std::pair<int, JointAction>, Distribution> explicit_delta;
  std::map<std::pair<int, JointAction>, std::size_t> explicit_line;
  struct Wildcard {
    int state;  // -1 for any
    std::vector<int> pattern;  // -1 for any
    Distribution dist;
  };
  std::vector<Wildcard> wildcards;
};

int lookup(const std::vector<std::string>& names, const Token& t, LineParser& p, const char* what) {
  auto it = std::find(names.begin(), names.end(), t.text);
  if (it == names.end()) p.fail_at(t, std::string("unknown ") + what + " '" + t.text + "'");
  return static_cast<int>(it - names.begin());
}

int action_id(Builder& b, const std::string& name) {
  int id = b.csg.action_index(name);
  if (id >= 0) return id;
  b.csg.actions.push_back(name);
  return static_cast<int>(b.csg.actions.size()) - 1;
}

// Parses "(a, b)"; wildcard entries become -1 when allowed.
std::vector<int> joint_tuple(Builder& b, LineParser& p, bool allow_wildcard) {
  const Token open = p.peek();
  p.expect("(");
  std::vector<int> out;
  do {
    if (allow_wildcard && p.accept("*")) {
      out.push_back(-1);
      continue;
    }
    Token t = p.ident("an action");
    out.push_back(lookup(b.csg.actions, t, p, "action"));
  } while (p.accept(","));
  p.expect(")");
  if (out.size() != b.csg.agents.size()) {
    p.fail_at(open, "joint action has " + std::to_string(out.size()) + " components, expected " +
                        std::to_string(b.csg.agents.size()));
  }
  return out;
}

void require_csg_shape(Builder& b, LineParser& p) {
  if (b.csg.agents.empty() || b.csg.states.empty() || !b.have_init) {
    p.fail("agents, states and init must precede this directive");
  }
}

void parse_line(Builder& b, LineParser& p, const std::string& keyword, const Token& kw) {
  Csg& c = b.csg;
  if (keyword == "agents" || keyword == "states") {
    p.expect(":");
    auto& list = keyword == "agents" ? c.agents : c.states;
    if (!list.empty()) p.fail_at(kw, "duplicate '" + keyword + "' directive");
    while (!p.at_end()) {
      Token t = p.ident(keyword == "agents" ? "an agent name" : "a state name");
      if (std::find(list.begin(), list.end(), t.text) != list.end()) {
        p.fail_at(t, "duplicate name '" + t.text + "'");
      }
      list.push_back(t.text);
    }
    if (list.empty()) p.fail("empty list");
    if (keyword == "states") c.labels.assign(c.states.size(), {});
    if (keyword == "states" && c.agents.empty()) p.fail_at(kw, "agents must be declared first");
    if (keyword == "states") {
      c.available.assign(c.agents.size(), std::vector<std::vector<int>>(c.states.size()));
    }
  } else if (keyword == "init") {
    p.expect(":");
    if (c.states.empty()) p.fail_at(kw, "states must be declared first");
    c.initial = lookup(c.states, p.ident("a state"), p, "state");
    b.have_init = true;
  } else if (keyword == "labels") {
    require_csg_shape(b, p);
    p.expect(":");
    while (!p.at_end()) {
      int s = lookup(c.states, p.ident("a state"), p, "state");
      p.expect("{");
      while (!p.accept("}")) {
        Token t = p.ident("a proposition");
        if (t.text == "true" || t.text == "false") p.fail_at(t, "reserved proposition name");
        c.labels[s].insert(t.text);
        p.accept(",");
      }
    }
  } else if (keyword == "actions") {
    require_csg_shape(b, p);
    int agent = lookup(c.agents, p.ident("an agent"), p, "agent");
    p.expect("@");
    std::vector<int> states;
    if (p.accept("*")) {
      for (std::size_t s = 0; s < c.states.size(); ++s) states.push_back(static_cast<int>(s));
    } else {
      states.push_back(lookup(c.states, p.ident("a state"), p, "state"));
    }
    p.expect(":");
    std::vector<int> acts;
    while (!p.at_end()) {
      Token t = p.ident("an action name");
      int id = action_id(b, t.text);
      if (std::find(acts.begin(), acts.end(), id) != acts.end()) {
        p.fail_at(t, "duplicate action '" + t.text + "'");
      }
      acts.push_back(id);
    }
    if (acts.empty()) p.fail("an agent needs at least one action");
    for (int s : states) {
      if (!c.available[agent][s].empty()) {
        p.fail_at(kw, "actions of " + c.agents[agent] + " at " + c.states[s] + " declared twice");
      }
      c.available[agent][s] = acts;
    }
  } else if (keyword == "tie") {
    require_csg_shape(b, p);
    int agent = lookup(c.agents, p.ident("an agent"), p, "agent");
    p.expect(":");
    std::vector<int> states;
    while (!p.at_end()) states.push_back(lookup(c.states, p.ident("a state"), p, "state"));
    if (states.size() < 2) p.fail("a tie needs at least two states");
    int rep = *std::min_element(states.begin(), states.end());
    for (int s : states) {
      if (b.game.shared_state[agent][s] != s) p.fail_at(kw, "state tied twice for this agent");
      b.game.shared_state[agent][s] = rep;
    }
  } else if (keyword == "param") {
    require_csg_shape(b, p);
    Token name = p.ident("a parameter name");
    p.expect("=");
    int agent = lookup(c.agents, p.ident("an agent"), p, "agent");
    p.expect("@");
    int state = lookup(c.states, p.ident("a state"), p, "state");
    Token act = p.ident("an action");
    int action = lookup(c.actions, act, p, "action");
    const auto& av = c.available[agent][state];
    if (std::find(av.begin(), av.end(), action) == av.end()) {
      p.fail_at(act, "action not available to " + c.agents[agent] + " at " + c.states[state]);
    }
    for (const auto& a : b.game.aliases) {
      if (a.name == name.text) p.fail_at(name, "duplicate parameter name");
    }
    b.game.aliases.push_back(ParamAlias{name.text, agent, state, action});
  } else if (keyword == "trans") {
    require_csg_shape(b, p);
    int state = -1;
    if (!p.accept("*")) state = lookup(c.states, p.ident("a state"), p, "state");
    std::vector<int> pattern = joint_tuple(b, p, true);
    p.expect("->");
    p.expect("{");
    Distribution dist;
    while (!p.accept("}")) {
      int t = lookup(c.states, p.ident("a successor state"), p, "state");
      p.expect(":");
      Token num = p.peek();
      poly::Rational q = p.rational();
      if (q < 0 || q > 1) p.fail_at(num, "probability outside [0,1]");
      dist[t] += q;
      p.accept(",");
    }
    bool wildcard = state < 0 || std::count(pattern.begin(), pattern.end(), -1) > 0;
    if (wildcard) {
      b.wildcards.push_back(Builder::Wildcard{state, pattern, dist});
    } else {
      auto key = std::make_pair(state, JointAction(pattern));
      if (b.explicit_delta.count(key)) p.fail_at(kw, "duplicate transition");
      b.explicit_delta[key] = dist;
    }
  } else if (keyword == "reward") {
    require_csg_shape(b, p);
    int agent = lookup(c.agents, p.ident("an agent"), p, "agent");
    Token kind = p.ident("'action' or 'state'");
    RewardStructure& r = b.game.rewards[agent];
    if (kind.text == "action") {
      if (p.peek().text == "(") {
        std::vector<int> ja = joint_tuple(b, p, false);
        p.expect(":");
        r.joint_action_reward[ja] = p.rational();
      } else {
        int a = lookup(c.actions, p.ident("an action"), p, "action");
        p.expect(":");
        r.own_action_reward[a] = p.rational();
      }
    } else if (kind.text == "state") {
      int s = lookup(c.states, p.ident("a state"), p, "state");
      p.expect(":");
      r.state_reward[s] = p.rational();
    } else {
      p.fail_at(kind, "expected 'action' or 'state'");
    }
  } else if (keyword == "plan") {
    require_csg_shape(b, p);
    Token name = p.ident("a plan name");
    if (b.game.find_plan(name.text)) p.fail_at(name, "duplicate plan '" + name.text + "'");
    p.expect("@");
    Plan plan;
    plan.name = name.text;
    plan.start = lookup(c.states, p.ident("a state"), p, "state");
    p.expect(":");
    while (!p.at_end()) plan.steps.push_back(joint_tuple(b, p, false));
    if (plan.steps.empty()) p.fail("a plan needs at least one step");
    b.game.plans.push_back(std::move(plan));
  } else {
    p.fail_at(kw, "unknown directive '" + keyword + "'");
  }
}

bool matches(const Builder::Wildcard& w, int state, const JointAction& a) {
  if (w.state >= 0 && w.state != state) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (w.pattern[i] >= 0 && w.pattern[i] != a[i]) return false;
  }
  return true;
}

}  // namespace

Game parse_game(std::string_view text, const std::string& source) {
  Builder b;
  std::istringstream in{std::string(text)};
  std::string raw;
  std::size_t lineno = 0;
  int rank = -1;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = raw;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // Notes keep their text verbatim, including '#'.
    {
      std::size_t first = line.find_first_not_of(" \t");
      if (first != std::string::npos && line.compare(first, 5, "note:") == 0) {
        std::string body = line.substr(first + 5);
        std::size_t lead = body.find_first_not_of(" \t");
        b.game.notes.push_back(lead == std::string::npos ? "" : body.substr(lead));
        continue;
      }
    }
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    auto toks = tokenize(line, source, lineno);
    LineParser p(std::move(toks), source, lineno);
    if (p.at_end()) continue;
    Token kw = p.ident("a directive");
    int r = section_rank(kw.text);
    if (r < 0) p.fail_at(kw, "unknown directive '" + kw.text + "'");
    if (r < rank) p.fail_at(kw, "directive '" + kw.text + "' out of order");
    rank = r;
    if (r >= section_rank("tie") && b.game.shared_state.empty()) {
      require_csg_shape(b, p);
      std::vector<std::string> notes = std::move(b.game.notes);
      b.game = make_game(b.csg);
      b.game.notes = std::move(notes);
    }
    parse_line(b, p, kw.text, kw);
    p.finish();
  }

  if (b.csg.agents.empty()) throw ParseError(source, lineno, 1, "missing 'agents' directive");
  if (b.csg.states.empty()) throw ParseError(source, lineno, 1, "missing 'states' directive");
  if (!b.have_init) throw ParseError(source, lineno, 1, "missing 'init' directive");
  if (b.game.shared_state.empty()) {
    std::vector<std::string> notes = std::move(b.game.notes);
    b.game = make_game(b.csg);
    b.game.notes = std::move(notes);
  }

  Csg& c = b.csg;
  for (std::size_t i = 0; i < c.agents.size(); ++i) {
    for (std::size_t s = 0; s < c.states.size(); ++s) {
      if (c.available[i][s].empty()) {
        throw ModelError("no actions declared for " + c.agents[i] + " at " + c.states[s]);
      }
    }
  }
  for (std::size_t s = 0; s < c.states.size(); ++s) {
    for (const auto& a : c.joint_actions(static_cast<int>(s))) {
      auto key = std::make_pair(static_cast<int>(s), a);
      if (auto it = b.explicit_delta.find(key); it != b.explicit_delta.end()) {
        c.delta[key] = it->second;
        continue;
      }
      // Last matching wildcard wins.
      for (auto it = b.wildcards.rbegin(); it != b.wildcards.rend(); ++it) {
        if (matches(*it, static_cast<int>(s), a)) {
          c.delta[key] = it->dist;
          break;
        }
      }
      if (!c.delta.count(key)) {
        throw ModelError("no transition for " + c.render(a) + " at state " + c.states[s]);
      }
    }
  }
  for (const auto& [key, d] : b.explicit_delta) {
    if (!c.is_available(key.first, key.second)) {
      throw ModelError("transition for unavailable joint action " + c.render(key.second) +
                       " at state " + c.states[key.first]);
    }
  }
  c.validate();

  // Plan steps must name available actions at their start state.
  for (const auto& plan : b.game.plans) {
    if (!c.is_available(plan.start, plan.steps.front())) {
      throw ModelError("plan " + plan.name + " starts with an unavailable joint action");
    }
  }

  b.game.csg = std::move(b.csg);
  return std::move(b.game);
}

Game load_game(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(path, 0, 0, "cannot open model file");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_game(buf.str(), path);
}

}  // namespace respgames::model
