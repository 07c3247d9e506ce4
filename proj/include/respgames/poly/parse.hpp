#pragma once

#include <string>
#include <string_view>

#include "respgames/poly/rational_function.hpp"

namespace respgames::poly {

// Expression grammar accepted for polynomial and rational-function text:
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := ('-' | '+') unary | power
//   power   := primary ('^' integer)?
//   primary := number | name | '(' expr ')'
//   name    := [A-Za-z_][A-Za-z0-9_.]* ('[' ... ']')?
//
// This is a superset of what to_string renders. Names are resolved through
// `names`; when `declare_unknown` is set, unknown names are declared as fresh
// synthetic parameters instead of being rejected.
RationalFunction parse_rational_function(std::string_view text, ParamTable& names,
                                         bool declare_unknown = false,
                                         const std::string& source = "<expr>");

RationalFunction parse_rational_function(std::string_view text, const ParamTable& names,
                                         const std::string& source = "<expr>");

// As above, but rejects results with a non-constant denominator.
Polynomial parse_polynomial(std::string_view text, ParamTable& names, bool declare_unknown = false,
                            const std::string& source = "<expr>");

Polynomial parse_polynomial(std::string_view text, const ParamTable& names,
                            const std::string& source = "<expr>");

}  // namespace respgames::poly
