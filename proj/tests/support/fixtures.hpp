#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "fastslow/parser.hpp"

namespace fastslow::testing {

inline std::string fixture_path(const std::string& name) { return std::string(FASTSLOW_FIXTURES) + "/" + name; }

inline std::string read_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name));
  if (!in) throw std::runtime_error("missing fixture " + name);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline SystemDef fixture_model(const std::string& name) { return parse_model(read_fixture(name)); }
inline EquivConfig fixture_config(const std::string& name) { return parse_config(read_fixture(name)); }

}  // namespace fastslow::testing
