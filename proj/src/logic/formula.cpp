#include "respgames/logic/formula.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "respgames/errors.hpp"
#include "respgames/model/psmas.hpp"

namespace respgames::logic {

bool compare(const poly::Rational& lhs, CompareOp op, const poly::Rational& rhs) {
  switch (op) {
    case CompareOp::Le: return lhs <= rhs;
    case CompareOp::Lt: return lhs < rhs;
    case CompareOp::Ge: return lhs >= rhs;
    case CompareOp::Gt: return lhs > rhs;
  }
  return false;
}

std::string to_string(CompareOp op) {
  switch (op) {
    case CompareOp::Le: return "<=";
    case CompareOp::Lt: return "<";
    case CompareOp::Ge: return ">=";
    case CompareOp::Gt: return ">";
  }
  return "?";
}

std::string to_string(DegreeKind kind) { return kind == DegreeKind::Car ? "CAR" : "CPR"; }

namespace {

bool same(const StatePtr& a, const StatePtr& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

bool same(const PathPtr& a, const PathPtr& b) {
  if (!a || !b) return !a && !b;
  return *a == *b;
}

}  // namespace

bool operator==(const PathFormula& a, const PathFormula& b) {
  if (a.kind != b.kind || !same(a.right, b.right)) return false;
  if (a.kind == PathFormula::Kind::Next) return true;
  return a.bound == b.bound && same(a.left, b.left);
}

bool operator==(const StateFormula& a, const StateFormula& b) {
  using K = StateFormula::Kind;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case K::True: return true;
    case K::Atom: return a.atom == b.atom;
    case K::Not: return same(a.lhs, b.lhs);
    case K::And: return same(a.lhs, b.lhs) && same(a.rhs, b.rhs);
    case K::Prob:
      return a.coalition == b.coalition && a.cmp == b.cmp && a.bound == b.bound &&
             same(a.path, b.path);
    case K::Reward:
      return a.coalition == b.coalition && a.cmp == b.cmp && a.bound == b.bound &&
             a.agent == b.agent && a.steps == b.steps && same(a.target, b.target);
    case K::Degree:
      return a.coalition == b.coalition && a.cmp == b.cmp && a.bound == b.bound &&
             a.degree == b.degree && a.agent == b.agent && a.plan == b.plan &&
             same(a.path, b.path);
  }
  return false;
}

StatePtr make_true() { return std::make_shared<StateFormula>(); }

StatePtr make_atom(std::string name) {
  auto f = std::make_shared<StateFormula>();
  f->kind = StateFormula::Kind::Atom;
  f->atom = std::move(name);
  return f;
}

StatePtr make_not(StatePtr g) {
  auto f = std::make_shared<StateFormula>();
  f->kind = StateFormula::Kind::Not;
  f->lhs = std::move(g);
  return f;
}

StatePtr make_and(StatePtr a, StatePtr b) {
  auto f = std::make_shared<StateFormula>();
  f->kind = StateFormula::Kind::And;
  f->lhs = std::move(a);
  f->rhs = std::move(b);
  return f;
}

StatePtr make_or(StatePtr a, StatePtr b) {
  return make_not(make_and(make_not(std::move(a)), make_not(std::move(b))));
}

PathPtr make_next(StatePtr g) {
  auto p = std::make_shared<PathFormula>();
  p->kind = PathFormula::Kind::Next;
  p->right = std::move(g);
  return p;
}

PathPtr make_until(StatePtr left, int bound, StatePtr right) {
  auto p = std::make_shared<PathFormula>();
  p->kind = PathFormula::Kind::Until;
  p->bound = bound;
  p->left = std::move(left);
  p->right = std::move(right);
  return p;
}

PathPtr make_eventually(int bound, StatePtr f) { return make_until(make_true(), bound, std::move(f)); }

int horizon(const PathFormula& psi) {
  return psi.kind == PathFormula::Kind::Next ? 1 : psi.bound;
}

namespace {

bool is_quantitative(const StateFormula& f) {
  using K = StateFormula::Kind;
  return f.kind == K::Prob || f.kind == K::Reward || f.kind == K::Degree;
}

std::string coalition_text(const std::vector<std::string>& c) {
  std::string out = "<";
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (i) out += ",";
    out += c[i];
  }
  return out + ">";
}

// Operand of & or !: parenthesized when it is itself a conjunction.
std::string operand(const StateFormula& f) {
  std::string s = to_string(f);
  return f.kind == StateFormula::Kind::And ? "(" + s + ")" : s;
}

// Operand inside a path formula.
std::string path_operand(const StateFormula& f) {
  std::string s = to_string(f);
  return f.kind == StateFormula::Kind::And || is_quantitative(f) ? "(" + s + ")" : s;
}

}  // namespace

std::string to_string(const StateFormula& f) {
  using K = StateFormula::Kind;
  switch (f.kind) {
    case K::True: return "true";
    case K::Atom: return f.atom;
    case K::Not:
      if (f.lhs->kind == K::True) return "false";
      return "!" + operand(*f.lhs);
    case K::And: return operand(*f.lhs) + " & " + operand(*f.rhs);
    case K::Prob:
      return coalition_text(f.coalition) + " P" + to_string(f.cmp) + poly::to_string(f.bound) +
             " [ " + to_string(*f.path) + " ]";
    case K::Reward:
      return coalition_text(f.coalition) + " R" + to_string(f.cmp) + poly::to_string(f.bound) +
             " [ F<=" + std::to_string(f.steps) + " " + path_operand(*f.target) + " @ " + f.agent +
             " ]";
    case K::Degree:
      return coalition_text(f.coalition) + " D" + to_string(f.cmp) + poly::to_string(f.bound) +
             " [ " + to_string(f.degree) + "(" + f.agent + ", " + f.plan + ", " +
             to_string(*f.path) + ") ]";
  }
  return "?";
}

std::string to_string(const PathFormula& psi) {
  if (psi.kind == PathFormula::Kind::Next) return "X " + path_operand(*psi.right);
  if (psi.left->kind == StateFormula::Kind::True) {
    return "F<=" + std::to_string(psi.bound) + " " + path_operand(*psi.right);
  }
  return path_operand(*psi.left) + " U<=" + std::to_string(psi.bound) + " " +
         path_operand(*psi.right);
}

namespace {

enum class Tok { Ident, Number, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

const std::set<std::string> kKeywords{"X", "F", "U", "P", "R", "D", "CAR", "CPR", "true", "false"};

std::vector<Token> tokenize(std::string_view text, const std::string& source) {
  std::vector<Token> out;
  std::size_t line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (text[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < text.size()) {
    char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#') {
      while (i < text.size() && text[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.line = line;
    t.column = col;
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '_' ||
                                 text[j] == '.' || text[j] == '\'')) {
        ++j;
      }
      t.kind = Tok::Ident;
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c)) ||
               (c == '-' && i + 1 < text.size() &&
                std::isdigit(static_cast<unsigned char>(text[i + 1])))) {
      std::size_t j = i + 1;
      while (j < text.size() && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '.' ||
                                 text[j] == '/' || text[j] == 'e' || text[j] == 'E' ||
                                 ((text[j] == '-' || text[j] == '+') &&
                                  (text[j - 1] == 'e' || text[j - 1] == 'E')))) {
        ++j;
      }
      t.kind = Tok::Number;
      advance(j - i);
    } else if ((c == '<' || c == '>') && i + 1 < text.size() && text[i + 1] == '=') {
      t.kind = Tok::Punct;
      advance(2);
    } else if (std::string_view("<>()[],!&|@").find(c) != std::string_view::npos) {
      t.kind = Tok::Punct;
      advance(1);
    } else {
      throw ParseError(source, line, col, std::string("unexpected character '") + c + "'");
    }
    t.text = std::string(text.substr(start, i - start));
    out.push_back(std::move(t));
  }
  Token end;
  end.line = line;
  end.column = col;
  out.push_back(end);
  return out;
}

class Parser {
 public:
  Parser(std::string_view text, const Vocabulary& vocab, const std::string& source)
      : toks_(tokenize(text, source)), vocab_(vocab), source_(source) {}

  StatePtr state_only() {
    StatePtr f = state();
    finish();
    return f;
  }

  PathPtr path_only() {
    PathPtr p = path();
    finish();
    return p;
  }

 private:
  const Token& peek(std::size_t ahead = 0) const {
    return toks_[std::min(pos_ + ahead, toks_.size() - 1)];
  }
  Token take() { return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_]; }

  [[noreturn]] void fail_at(const Token& t, const std::string& msg) const {
    throw ParseError(source_, t.line, t.column, msg);
  }
  [[noreturn]] void fail(const std::string& msg) const { fail_at(peek(), msg); }

  bool is_punct(std::string_view p, std::size_t ahead = 0) const {
    return peek(ahead).kind == Tok::Punct && peek(ahead).text == p;
  }
  bool is_word(std::string_view w) const { return peek().kind == Tok::Ident && peek().text == w; }
  bool accept(std::string_view p) {
    if (!is_punct(p)) return false;
    ++pos_;
    return true;
  }
  void expect(std::string_view p) {
    if (!accept(p)) fail("expected '" + std::string(p) + "'");
  }
  void expect_word(std::string_view w) {
    if (!is_word(w)) fail("expected '" + std::string(w) + "'");
    ++pos_;
  }
  void finish() {
    if (peek().kind != Tok::End) fail("unexpected '" + peek().text + "'");
  }

  Token name(const char* what) {
    if (peek().kind != Tok::Ident) fail(std::string("expected ") + what);
    if (kKeywords.count(peek().text)) fail("'" + peek().text + "' is a reserved word");
    return take();
  }

  std::string agent() {
    Token t = name("an agent name");
    if (std::find(vocab_.agents.begin(), vocab_.agents.end(), t.text) == vocab_.agents.end()) {
      fail_at(t, "unknown agent '" + t.text + "'");
    }
    return t.text;
  }

  poly::Rational number() {
    if (peek().kind != Tok::Number) fail("expected a number");
    Token t = take();
    try {
      return poly::parse_rational(t.text);
    } catch (const std::invalid_argument& e) {
      fail_at(t, e.what());
    }
  }

  int natural() {
    if (peek().kind != Tok::Number) fail("expected a step bound");
    Token t = take();
    if (!std::all_of(t.text.begin(), t.text.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }) ||
        t.text.size() > 6) {
      fail_at(t, "step bound must be a natural number");
    }
    return std::stoi(t.text);
  }

  CompareOp cmp() {
    static const std::vector<std::pair<std::string, CompareOp>> ops{
        {"<=", CompareOp::Le}, {"<", CompareOp::Lt}, {">=", CompareOp::Ge}, {">", CompareOp::Gt}};
    for (const auto& [text, op] : ops) {
      if (accept(text)) return op;
    }
    fail("expected a comparison (<=, <, >=, >)");
  }

  StatePtr state() {
    StatePtr f = conjunction();
    while (accept("|")) f = make_or(f, conjunction());
    return f;
  }

  StatePtr conjunction() {
    StatePtr f = unary();
    while (accept("&")) f = make_and(f, unary());
    return f;
  }

  StatePtr unary() {
    if (accept("!")) return make_not(unary());
    return atomic();
  }

  StatePtr atomic() {
    if (is_word("true")) {
      ++pos_;
      return make_true();
    }
    if (is_word("false")) {
      ++pos_;
      return make_not(make_true());
    }
    if (accept("(")) {
      StatePtr f = state();
      expect(")");
      return f;
    }
    if (is_punct("<")) return quantified();
    if (peek().kind == Tok::Ident) {
      Token t = name("a proposition");
      if (!vocab_.propositions.count(t.text)) fail_at(t, "unknown proposition '" + t.text + "'");
      return make_atom(t.text);
    }
    fail("expected a state formula");
  }

  StatePtr quantified() {
    expect("<");
    std::vector<std::string> coalition;
    if (!is_punct(">")) {
      do {
        Token at = peek();
        std::string a = agent();
        if (std::find(coalition.begin(), coalition.end(), a) != coalition.end()) {
          fail_at(at, "agent '" + a + "' listed twice");
        }
        coalition.push_back(a);
      } while (accept(","));
    }
    expect(">");
    auto rank = [&](const std::string& a) {
      return std::find(vocab_.agents.begin(), vocab_.agents.end(), a) - vocab_.agents.begin();
    };
    std::sort(coalition.begin(), coalition.end(),
              [&](const std::string& a, const std::string& b) { return rank(a) < rank(b); });

    auto f = std::make_shared<StateFormula>();
    f->coalition = coalition;
    Token op = peek();
    if (is_word("P")) {
      ++pos_;
      f->kind = StateFormula::Kind::Prob;
      f->cmp = cmp();
      Token bt = peek();
      f->bound = number();
      if (f->bound < 0 || f->bound > 1) fail_at(bt, "probability bound must lie in [0,1]");
      expect("[");
      f->path = path();
      expect("]");
    } else if (is_word("R")) {
      ++pos_;
      f->kind = StateFormula::Kind::Reward;
      f->cmp = cmp();
      f->bound = number();
      expect("[");
      expect_word("F");
      expect("<=");
      f->steps = natural();
      f->target = state();
      expect("@");
      f->agent = agent();
      expect("]");
    } else if (is_word("D")) {
      ++pos_;
      f->kind = StateFormula::Kind::Degree;
      f->cmp = cmp();
      f->bound = number();
      expect("[");
      if (is_word("CAR")) {
        f->degree = DegreeKind::Car;
      } else if (is_word("CPR")) {
        f->degree = DegreeKind::Cpr;
      } else {
        fail("expected CAR or CPR");
      }
      ++pos_;
      expect("(");
      Token at = peek();
      f->agent = agent();
      if (std::find(coalition.begin(), coalition.end(), f->agent) == coalition.end()) {
        fail_at(at, "agent '" + f->agent + "' is not in the coalition");
      }
      expect(",");
      Token pt = name("a plan name");
      if (!vocab_.plans.count(pt.text)) fail_at(pt, "unknown plan '" + pt.text + "'");
      f->plan = pt.text;
      expect(",");
      f->path = path();
      expect(")");
      expect("]");
    } else {
      fail_at(op, "expected P, R or D after the coalition");
    }
    return f;
  }

  PathPtr path() {
    if (is_word("X")) {
      ++pos_;
      return make_next(state());
    }
    if (is_word("F")) {
      ++pos_;
      expect("<=");
      int k = natural();
      return make_eventually(k, state());
    }
    StatePtr left = state();
    expect_word("U");
    expect("<=");
    int k = natural();
    return make_until(left, k, state());
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  const Vocabulary& vocab_;
  const std::string& source_;
};

}  // namespace

StatePtr parse_state_formula(std::string_view text, const Vocabulary& vocab, const std::string& source) {
  return Parser(text, vocab, source).state_only();
}

PathPtr parse_path_formula(std::string_view text, const Vocabulary& vocab, const std::string& source) {
  return Parser(text, vocab, source).path_only();
}

Vocabulary vocabulary(const model::Psmas& m) {
  Vocabulary v;
  v.agents = m.csg().agents;
  v.propositions = m.csg().propositions();
  for (const auto& p : m.game().plans) v.plans.insert(p.name);
  return v;
}

StatePtr parse_formula(std::string_view text, const model::Psmas& m, const std::string& source) {
  return parse_state_formula(text, vocabulary(m), source);
}

}  // namespace respgames::logic
