#pragma once

#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "respgames/poly/rational.hpp"

namespace respgames::model {
class Psmas;
}

namespace respgames::logic {

enum class CompareOp { Le, Lt, Ge, Gt };
enum class DegreeKind { Car, Cpr };

bool compare(const poly::Rational& lhs, CompareOp op, const poly::Rational& rhs);
std::string to_string(CompareOp op);
std::string to_string(DegreeKind kind);

struct StateFormula;
struct PathFormula;
using StatePtr = std::shared_ptr<const StateFormula>;
using PathPtr = std::shared_ptr<const PathFormula>;

struct PathFormula {
  enum class Kind { Next, Until };
  Kind kind = Kind::Next;
  int bound = 1;   // Until only
  StatePtr left;   // Until only
  StatePtr right;  // the X operand or the Until goal
};

struct StateFormula {
  enum class Kind { True, Atom, Not, And, Prob, Reward, Degree };
  Kind kind = Kind::True;
  std::string atom;
  StatePtr lhs;  // Not, And
  StatePtr rhs;  // And
  // Quantitative operators.
  std::vector<std::string> coalition;  // in model agent order
  CompareOp cmp = CompareOp::Ge;
  poly::Rational bound;
  PathPtr path;           // Prob, Degree
  std::string agent;      // Reward, Degree
  int steps = 0;          // Reward: the F bound
  StatePtr target;        // Reward
  DegreeKind degree = DegreeKind::Car;
  std::string plan;       // Degree
};

// Structural equality.
bool operator==(const StateFormula& a, const StateFormula& b);
bool operator==(const PathFormula& a, const PathFormula& b);

// Constructors.
StatePtr make_true();
StatePtr make_atom(std::string name);
StatePtr make_not(StatePtr f);
StatePtr make_and(StatePtr a, StatePtr b);
StatePtr make_or(StatePtr a, StatePtr b);  // !(!a & !b)
PathPtr make_next(StatePtr f);
PathPtr make_until(StatePtr left, int bound, StatePtr right);
PathPtr make_eventually(int bound, StatePtr f);  // true U<=k f

// Number of steps a path formula inspects: X -> 1, U<=k -> k.
int horizon(const PathFormula& psi);

std::string to_string(const StateFormula& f);
std::string to_string(const PathFormula& psi);

// Names a formula may refer to.
struct Vocabulary {
  std::vector<std::string> agents;
  std::set<std::string> propositions;
  std::set<std::string> plans;
};

// Concrete syntax:
//
//   state  := or
//   or     := and ('|' and)*
//   and    := unary ('&' unary)*
//   unary  := '!' unary | atomic
//   atomic := 'true' | 'false' | prop | '(' state ')'
//           | '<' agents? '>' op
//   op     := 'P' cmp num '[' path ']'
//           | 'R' cmp num '[' 'F' '<=' nat state '@' agent ']'
//           | 'D' cmp num '[' ('CAR' | 'CPR') '(' agent ',' plan ',' path ')' ']'
//   path   := 'X' state | 'F' '<=' nat state | state 'U' '<=' nat state
//   cmp    := '<=' | '<' | '>=' | '>'
//
// Errors are ParseError carrying source:line:col.
StatePtr parse_state_formula(std::string_view text, const Vocabulary& vocab,
                             const std::string& source = "<formula>");
PathPtr parse_path_formula(std::string_view text, const Vocabulary& vocab,
                           const std::string& source = "<formula>");

// Agents, propositions and plan names declared by a model.
Vocabulary vocabulary(const model::Psmas& m);
StatePtr parse_formula(std::string_view text, const model::Psmas& m,
                       const std::string& source = "<formula>");

}  // namespace respgames::logic
