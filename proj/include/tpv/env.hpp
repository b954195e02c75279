#pragma once

#include <map>
#include <vector>

#include "tpv/rational.hpp"

namespace tpv {

// Machine state beyond the program itself: a sparse memory image (absent
// address = uninitialized cell) plus the initial values of the four built-in
// pointer/length variables.
struct Environment {
  std::map<Int, Int> memory;
  Int input_ptr{0};
  Int input_len{0};
  Int output_ptr{0};
  Int output_len{0};
};

inline Environment make_env(const std::vector<Int>& input, Int input_ptr = 0) {
  Environment env;
  env.input_ptr = input_ptr;
  env.input_len = Int(input.size());
  for (std::size_t i = 0; i < input.size(); ++i) env.memory[input_ptr + Int(i)] = input[i];
  return env;
}

// The input/environment compatibility relation: the memory cells named by
// input_ptr/input_len must hold exactly the declared input.
inline bool compatible(const Environment& env, const std::vector<Int>& input) {
  if (env.input_len != Int(input.size())) return false;
  for (std::size_t i = 0; i < input.size(); ++i) {
    auto it = env.memory.find(env.input_ptr + Int(i));
    if (it == env.memory.end() || it->second != input[i]) return false;
  }
  return true;
}

}  // namespace tpv
