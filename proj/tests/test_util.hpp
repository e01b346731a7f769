#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "globalner/types.hpp"

#ifndef GLOBALNER_FIXTURE_DIR
#define GLOBALNER_FIXTURE_DIR "tests/fixtures"
#endif

namespace gntest {

inline std::string fixture_path(const std::string& name) {
  return std::string(GLOBALNER_FIXTURE_DIR) + "/" + name;
}

inline nlohmann::json load_json_fixture(const std::string& name) {
  std::ifstream in(fixture_path(name));
  REQUIRE_MESSAGE(in.good(), "missing fixture: " << name);
  return nlohmann::json::parse(in);
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path);
  REQUIRE_MESSAGE(in.good(), "cannot read " << path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::vector<globalner::Token> toks(
    const std::vector<std::string>& texts) {
  std::vector<globalner::Token> tokens;
  std::size_t offset = 0;
  for (const auto& text : texts) {
    if (!tokens.empty()) ++offset;
    tokens.push_back({text, offset, offset + text.size()});
    offset += text.size();
  }
  return tokens;
}

}  // namespace gntest
