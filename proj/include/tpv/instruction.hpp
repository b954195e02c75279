#pragma once

#include <cstdint>
#include <string>

#include "tpv/rational.hpp"

namespace tpv {

// The machine is a register/memory RAM: registers hold naturals, memory is an
// infinite array of naturals addressed by register values. An operand is a
// literal, a register, or a single level of memory indirection M[reg].
struct Operand {
  enum class Kind : std::uint8_t { Reg, Lit, Mem };
  Kind kind{Kind::Lit};
  int reg{-1};  // register-table index for Reg and Mem
  Int lit{0};

  static Operand literal(Int v) {
    Operand o;
    o.kind = Kind::Lit;
    o.lit = std::move(v);
    return o;
  }
  static Operand regref(int idx) {
    Operand o;
    o.kind = Kind::Reg;
    o.reg = idx;
    return o;
  }
  static Operand memref(int idx) {
    Operand o;
    o.kind = Kind::Mem;
    o.reg = idx;
    return o;
  }

  bool is_mem() const { return kind == Kind::Mem; }
  bool is_reg() const { return kind == Kind::Reg; }
  bool is_lit() const { return kind == Kind::Lit; }
};

enum class Opcode : std::uint8_t {
  Move,    // dst <- src1          (assembly: assign / load / store)
  Add,     // dst <- src1 + src2
  Sub,     // dst <- src1 - src2   (clamped at 0: cells hold naturals)
  Rand,    // dst <- uniform {0..value(src1)}
  Nop,     // no state change; costs value(src1) time units
  Branch,  // if cmp(src1, src2) goto target
  Jump,    // goto target
  Halt,
};

enum class Cmp : std::uint8_t { Eq, Ne, Lt, Le, Gt, Ge };

inline bool eval_cmp(Cmp c, const Int& a, const Int& b) {
  switch (c) {
    case Cmp::Eq: return a == b;
    case Cmp::Ne: return a != b;
    case Cmp::Lt: return a < b;
    case Cmp::Le: return a <= b;
    case Cmp::Gt: return a > b;
    case Cmp::Ge: return a >= b;
  }
  return false;
}

inline const char* cmp_str(Cmp c) {
  switch (c) {
    case Cmp::Eq: return "==";
    case Cmp::Ne: return "!=";
    case Cmp::Lt: return "<";
    case Cmp::Le: return "<=";
    case Cmp::Gt: return ">";
    case Cmp::Ge: return ">=";
  }
  return "?";
}

struct Instruction {
  Opcode op{Opcode::Halt};
  Operand dst{};
  Operand src1{};
  Operand src2{};
  Cmp cmp{Cmp::Eq};
  int target{-1};  // 0-based line for Branch/Jump
};

}  // namespace tpv
