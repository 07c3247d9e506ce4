#pragma once

#include <string>

#include "respgames/model/parser.hpp"
#include "respgames/model/psmas.hpp"

namespace respgames::testing {

inline std::string fixture_path(const std::string& name) {
  return std::string(RESPGAMES_FIXTURE_DIR) + "/" + name;
}

inline model::Psmas load_fixture(const std::string& name) {
  return model::build_psmas(model::load_game(fixture_path(name)));
}

}  // namespace respgames::testing
