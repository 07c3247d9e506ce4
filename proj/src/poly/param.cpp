#include "respgames/poly/param.hpp"

#include <stdexcept>

namespace respgames::poly {

void ParamTable::add(ParamId id, std::string name) {
  if (auto it = by_name_.find(name); it != by_name_.end() && it->second != id) {
    throw std::invalid_argument("parameter name '" + name + "' registered twice");
  }
  by_name_[name] = id;
  display_[id] = std::move(name);
}

ParamId ParamTable::declare(std::string name) {
  if (auto existing = lookup(name)) return *existing;
  ParamId id{0, 0, next_synthetic_++};
  while (display_.count(id) != 0) id.action = next_synthetic_++;
  add(id, std::move(name));
  return id;
}

std::optional<ParamId> ParamTable::lookup(std::string_view name) const {
  if (auto it = by_name_.find(name); it != by_name_.end()) return it->second;
  return std::nullopt;
}

std::string ParamTable::name(ParamId id) const {
  if (auto it = display_.find(id); it != display_.end()) return it->second;
  return default_param_name(id);
}

std::string default_param_name(ParamId id) {
  return "x[" + std::to_string(id.agent) + "," + std::to_string(id.state) + "," +
         std::to_string(id.action) + "]";
}

}  // namespace respgames::poly
