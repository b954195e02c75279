#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tpv/instruction.hpp"

namespace tpv {

enum class Model : std::uint8_t { Ram, WordRam };

// Register indices 0..3 are the built-in pointer/length variables; they are
// always initialized (their initial values come from the environment).
inline constexpr int kRegInputPtr = 0;
inline constexpr int kRegInputLen = 1;
inline constexpr int kRegOutputPtr = 2;
inline constexpr int kRegOutputLen = 3;
inline constexpr int kNumBuiltins = 4;

inline const std::vector<std::string>& builtin_register_names() {
  static const std::vector<std::string> names = {"input_ptr", "input_len", "output_ptr",
                                                 "output_len"};
  return names;
}

struct Program {
  std::string name;
  Model model{Model::Ram};
  unsigned word_bits{0};  // WordRam only
  std::vector<std::string> registers{builtin_register_names()};
  std::vector<std::pair<std::string, Int>> constants;  // named parameters, header block
  std::vector<Instruction> code;
  // Composition convention marker: the program writes its unmodified input as
  // a prefix of its output and appends the rest.
  bool append_input{false};

  Int word_cap() const { return model == Model::WordRam ? pow_int(2, word_bits) : Int(0); }

  int reg_index(const std::string& n) const {
    auto it = std::find(registers.begin(), registers.end(), n);
    return it == registers.end() ? -1 : static_cast<int>(it - registers.begin());
  }

  int intern_register(const std::string& n) {
    int idx = reg_index(n);
    if (idx >= 0) return idx;
    registers.push_back(n);
    return static_cast<int>(registers.size() - 1);
  }

  std::optional<Int> constant(const std::string& n) const {
    for (const auto& [k, v] : constants)
      if (k == n) return v;
    return std::nullopt;
  }
};

struct Diagnostic {
  int line;  // 0-based instruction index, -1 for whole-program findings
  std::string message;
};

// Static checks: branch/jump targets in range, WordRam literal overflow, and
// halt reachability (a reachable halt must exist; unreachable halts flagged).
inline std::vector<Diagnostic> validate_program(const Program& p) {
  std::vector<Diagnostic> out;
  const int n = static_cast<int>(p.code.size());
  const Int cap = p.word_cap();

  auto check_operand = [&](int line, const Operand& o) {
    if (o.is_lit() && p.model == Model::WordRam && o.lit >= cap)
      out.push_back({line, "literal " + o.lit.str() + " exceeds word size"});
    if ((o.is_reg() || o.is_mem()) &&
        (o.reg < 0 || o.reg >= static_cast<int>(p.registers.size())))
      out.push_back({line, "operand references unknown register index"});
  };

  for (int i = 0; i < n; ++i) {
    const Instruction& ins = p.code[i];
    switch (ins.op) {
      case Opcode::Move:
        check_operand(i, ins.dst);
        check_operand(i, ins.src1);
        if (ins.dst.is_lit()) out.push_back({i, "move destination must be register or memory"});
        if (ins.dst.is_mem() && ins.src1.is_mem())
          out.push_back({i, "memory-to-memory move is not a single instruction"});
        break;
      case Opcode::Add:
      case Opcode::Sub: {
        check_operand(i, ins.dst);
        check_operand(i, ins.src1);
        check_operand(i, ins.src2);
        if (ins.dst.is_lit())
          out.push_back({i, "arithmetic destination must be register or memory"});
        int mem_ops = (ins.dst.is_mem() ? 1 : 0) + (ins.src1.is_mem() ? 1 : 0) +
                      (ins.src2.is_mem() ? 1 : 0);
        if (mem_ops > 1)
          out.push_back({i, "at most one memory operand per instruction"});
        break;
      }
      case Opcode::Rand:
        check_operand(i, ins.dst);
        check_operand(i, ins.src1);
        if (!ins.dst.is_reg()) out.push_back({i, "rand destination must be a register"});
        if (ins.src1.is_lit() && ins.src1.lit < 0)
          out.push_back({i, "rand bound must be nonnegative"});
        break;
      case Opcode::Nop:
        check_operand(i, ins.src1);
        if (ins.src1.is_lit() && ins.src1.lit < 0)
          out.push_back({i, "nop amount must be nonnegative"});
        break;
      case Opcode::Branch:
        check_operand(i, ins.src1);
        check_operand(i, ins.src2);
        [[fallthrough]];
      case Opcode::Jump:
        if (ins.target < 0 || ins.target >= n)
          out.push_back({i, "goto target " + std::to_string(ins.target) + " out of range"});
        break;
      case Opcode::Halt:
        break;
    }
  }

  if (p.model == Model::WordRam) {
    if (p.word_bits == 0 || p.word_bits > 62)
      out.push_back({-1, "word size must be in [1, 62] bits"});
    for (const auto& [k, v] : p.constants)
      if (v >= cap) out.push_back({-1, "constant " + k + " = " + v.str() + " exceeds word size"});
  }

  // Reachability over the CFG, taking both branch outcomes.
  std::vector<char> reach(n, 0);
  std::vector<int> stack;
  if (n > 0) {
    stack.push_back(0);
    reach[0] = 1;
  }
  auto push = [&](int t) {
    if (t >= 0 && t < n && !reach[t]) {
      reach[t] = 1;
      stack.push_back(t);
    }
  };
  while (!stack.empty()) {
    int i = stack.back();
    stack.pop_back();
    const Instruction& ins = p.code[i];
    if (ins.op == Opcode::Halt) continue;
    if (ins.op == Opcode::Jump) {
      push(ins.target);
    } else if (ins.op == Opcode::Branch) {
      push(ins.target);
      push(i + 1);
    } else {
      push(i + 1);
    }
  }
  bool any_reachable_halt = false;
  for (int i = 0; i < n; ++i) {
    if (p.code[i].op == Opcode::Halt) {
      if (reach[i])
        any_reachable_halt = true;
      else
        out.push_back({i, "unreachable halt"});
    }
  }
  if (!any_reachable_halt) out.push_back({-1, "no reachable halt instruction"});

  return out;
}

}  // namespace tpv
