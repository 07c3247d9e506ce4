#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "respgames/poly/rational.hpp"

namespace respgames::poly {

// Names one agent-state-action probability. The fields are model indices,
// so the derived ordering (agent, state, action) is the fixed global variable
// order used by the monomial order.
struct ParamId {
  std::int32_t agent = 0;
  std::int32_t state = 0;
  std::int32_t action = 0;

  auto operator<=>(const ParamId&) const = default;
};

using ParamValuation = std::map<ParamId, Rational>;

// Bidirectional ParamId <-> display name mapping used for rendering and
// parsing polynomial text.
class ParamTable {
 public:
  // Registers `name` for `id`. A name may be registered once; an id may carry
  // several names (canonical form plus alias), the last one registered is
  // used for rendering.
  void add(ParamId id, std::string name);

  // Convenience for standalone systems: assigns the next synthetic id.
  ParamId declare(std::string name);

  std::optional<ParamId> lookup(std::string_view name) const;
  std::string name(ParamId id) const;

  bool empty() const { return by_name_.empty(); }
  const std::map<std::string, ParamId, std::less<>>& names() const { return by_name_; }

 private:
  std::map<std::string, ParamId, std::less<>> by_name_;
  std::map<ParamId, std::string> display_;
  std::int32_t next_synthetic_ = 0;
};

// Fallback rendering when no table entry exists: x[agent,state,action].
std::string default_param_name(ParamId id);

}  // namespace respgames::poly
