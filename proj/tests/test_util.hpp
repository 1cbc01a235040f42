// Copyright 2026 The mexec Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <fstream>
#include <memory>
#include <sstream>
#include <string>

#include "mexec/mexec.hpp"

namespace mexec::testing {

inline constexpr const char* kFoo = R"(
real square(real v) {
  return v * v;
}

void FOO(real x) {
  if (x <= 1.0)
    x++;
  real y = square(x);
  if (y == 4.0)
    x--;
}
)";

inline std::string read_program(const std::string& rel) {
  std::ifstream in(std::string(MEXEC_PROGRAMS_DIR) + "/" + rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline Program load(const std::string& rel) { return parse(read_program(rel), rel); }

inline Program prepared(std::string_view src) { return prepare(parse(src)); }

inline std::shared_ptr<const Cfg> cfg_of(const Program& p) {
  return std::make_shared<const Cfg>(build_cfg(p));
}

inline std::vector<char> branches(int nb, std::initializer_list<BranchId> ids) {
  std::vector<char> s(nb, 0);
  for (BranchId b : ids) s[b.index()] = 1;
  return s;
}

inline constexpr BranchId T0{0, true}, F0{0, false}, T1{1, true}, F1{1, false};

}  // namespace mexec::testing
