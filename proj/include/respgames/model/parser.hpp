#pragma once

#include <string>
#include <string_view>

#include "respgames/model/game.hpp"

namespace respgames::model {

// Model file grammar, one directive per line, `#` starts a comment:
//
//   agents: A1 A2
//   states: s0 s1
//   init: s0
//   labels: s0 { p q } s1 { }
//   actions A1 @ s0: a b          (`*` for every state)
//   tie A1: s0 s1                 (share one parameter set across states)
//   param x1 = A1 @ s0 a          (name a parameter)
//   trans s0 (a, b) -> { s1: 1/2, s0: 1/2 }   (`*` state or action wildcards)
//   reward A1 action a: 2
//   reward A1 action (a, b): 3
//   reward A1 state s1: 1
//   plan p @ s0: (a, b) (b, b)
//   note: free text carried into result warnings
//
// Directives appear in the order listed; `note` may appear anywhere.
// Explicit trans lines override wildcard ones.
Game parse_game(std::string_view text, const std::string& source = "<model>");
Game load_game(const std::string& path);

}  // namespace respgames::model
