#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpv/env.hpp"
#include "tpv/program.hpp"
#include "tpv/rng.hpp"

namespace tpv {

enum class VmErrorKind {
  IncompatibleEnvironment,
  UninitializedRead,
  WordOverflow,
  StepLimitExceeded,
  InvalidProgram,
};

class VmError : public std::runtime_error {
 public:
  VmError(VmErrorKind k, const std::string& msg) : std::runtime_error(msg), kind_(k) {}
  VmErrorKind kind() const { return kind_; }

 private:
  VmErrorKind kind_;
};

struct RunLimits {
  std::uint64_t max_steps = 10'000'000;
  // When set, a Word RAM arithmetic result outside [0, 2^w - 1] raises
  // WordOverflow instead of saturating.
  bool trap_word_overflow = false;
};

struct ExecResult {
  std::vector<Int> output;
  Int runtime{0};
  Environment out_env;
};

namespace detail {

struct MachineState {
  std::vector<std::optional<Int>> regs;
  std::map<Int, Int> memory;
  int pc{0};
  Int cost{0};
  std::uint64_t steps{0};
  unsigned rand_count{0};

  static MachineState init(const Program& p, const Environment& env) {
    MachineState st;
    st.regs.resize(p.registers.size());
    st.regs[kRegInputPtr] = env.input_ptr;
    st.regs[kRegInputLen] = env.input_len;
    st.regs[kRegOutputPtr] = env.output_ptr;
    st.regs[kRegOutputLen] = env.output_len;
    st.memory = env.memory;
    return st;
  }
};

enum class PauseKind { Halted, AtRand };

struct Pause {
  PauseKind kind;
  int rand_reg{-1};
  Int rand_max{0};
};

class Machine {
 public:
  Machine(const Program& p, const RunLimits& lim) : p_(p), lim_(lim), cap_(p.word_cap()) {}

  const Int& read_reg(const MachineState& st, int idx) const {
    const auto& slot = st.regs[idx];
    if (!slot)
      throw VmError(VmErrorKind::UninitializedRead,
                    "read of uninitialized register '" + p_.registers[idx] + "'");
    return *slot;
  }

  const Int& read_mem(const MachineState& st, const Int& addr) const {
    check_addr(addr);
    auto it = st.memory.find(addr);
    if (it == st.memory.end())
      throw VmError(VmErrorKind::UninitializedRead,
                    "read of uninitialized memory cell M[" + addr.str() + "]");
    return it->second;
  }

  const Int& value(const MachineState& st, const Operand& o) const {
    switch (o.kind) {
      case Operand::Kind::Lit: return o.lit;
      case Operand::Kind::Reg: return read_reg(st, o.reg);
      case Operand::Kind::Mem: return read_mem(st, read_reg(st, o.reg));
    }
    throw VmError(VmErrorKind::InvalidProgram, "bad operand");
  }

  void write(MachineState& st, const Operand& dst, Int v) const {
    if (dst.is_reg()) {
      st.regs[dst.reg] = std::move(v);
    } else if (dst.is_mem()) {
      const Int& addr = read_reg(st, dst.reg);
      check_addr(addr);
      st.memory[addr] = std::move(v);
    } else {
      throw VmError(VmErrorKind::InvalidProgram, "literal destination");
    }
  }

  Int clamp(Int v) const {
    if (v < 0) v = 0;  // cells hold naturals; subtraction clamps at zero
    if (p_.model == Model::WordRam && v >= cap_) {
      if (lim_.trap_word_overflow)
        throw VmError(VmErrorKind::WordOverflow, "word overflow: " + v.str());
      v = cap_ - 1;
    }
    return v;
  }

  // Runs until the next rand instruction or halt. On AtRand the rand's unit
  // cost is already charged and pc points past it; the caller stores the
  // sampled value into rand_reg.
  Pause run_segment(MachineState& st) const {
    const int n = static_cast<int>(p_.code.size());
    for (;;) {
      if (st.pc < 0 || st.pc >= n)
        throw VmError(VmErrorKind::InvalidProgram,
                      "program counter fell off the listing at line " + std::to_string(st.pc));
      if (++st.steps > lim_.max_steps)
        throw VmError(VmErrorKind::StepLimitExceeded, "step limit exceeded");
      const Instruction& ins = p_.code[st.pc];
      switch (ins.op) {
        case Opcode::Move:
          write(st, ins.dst, clamp(value(st, ins.src1)));
          st.cost += 1;
          ++st.pc;
          break;
        case Opcode::Add:
          write(st, ins.dst, clamp(value(st, ins.src1) + value(st, ins.src2)));
          st.cost += 1;
          ++st.pc;
          break;
        case Opcode::Sub:
          write(st, ins.dst, clamp(value(st, ins.src1) - value(st, ins.src2)));
          st.cost += 1;
          ++st.pc;
          break;
        case Opcode::Nop:
          st.cost += value(st, ins.src1);
          ++st.pc;
          break;
        case Opcode::Branch:
          st.cost += 1;
          st.pc = eval_cmp(ins.cmp, value(st, ins.src1), value(st, ins.src2)) ? ins.target
                                                                              : st.pc + 1;
          break;
        case Opcode::Jump:
          st.cost += 1;
          st.pc = ins.target;
          break;
        case Opcode::Rand: {
          Int bound = value(st, ins.src1);
          if (bound < 0)
            throw VmError(VmErrorKind::InvalidProgram, "rand bound is negative");
          st.cost += 1;
          ++st.pc;
          ++st.rand_count;
          return Pause{PauseKind::AtRand, ins.dst.reg, std::move(bound)};
        }
        case Opcode::Halt:
          st.cost += 1;
          return Pause{PauseKind::Halted};
      }
    }
  }

  std::vector<Int> read_output(const MachineState& st) const {
    const Int& ptr = read_reg(st, kRegOutputPtr);
    const Int& len = read_reg(st, kRegOutputLen);
    if (len < 0) throw VmError(VmErrorKind::InvalidProgram, "negative output length");
    if (len > Int(1'000'000))
      throw VmError(VmErrorKind::InvalidProgram, "output length implausibly large");
    std::vector<Int> out;
    out.reserve(len.convert_to<std::size_t>());
    for (Int i = 0; i < len; ++i) out.push_back(read_mem(st, ptr + i));
    return out;
  }

  Environment extract_env(const MachineState& st) const {
    Environment e;
    e.memory = st.memory;
    e.input_ptr = read_reg(st, kRegInputPtr);
    e.input_len = read_reg(st, kRegInputLen);
    e.output_ptr = read_reg(st, kRegOutputPtr);
    e.output_len = read_reg(st, kRegOutputLen);
    return e;
  }

 private:
  void check_addr(const Int& addr) const {
    if (addr < 0) throw VmError(VmErrorKind::InvalidProgram, "negative address");
    if (p_.model == Model::WordRam && addr >= cap_)
      throw VmError(VmErrorKind::WordOverflow, "address " + addr.str() + " exceeds word size");
  }

  const Program& p_;
  const RunLimits& lim_;
  Int cap_;
};

}  // namespace detail

// Executes one seeded run. Deterministic given (program, input, env, seed).
inline ExecResult run_sampled(const Program& p, const std::vector<Int>& input,
                              const Environment& env, std::uint64_t seed, RunLimits lim = {}) {
  if (!compatible(env, input))
    throw VmError(VmErrorKind::IncompatibleEnvironment,
                  "environment memory does not contain the declared input (empty support)");
  if (p.code.empty()) throw VmError(VmErrorKind::InvalidProgram, "empty program");

  detail::Machine m(p, lim);
  detail::MachineState st = detail::MachineState::init(p, env);
  Rng rng(seed);
  for (;;) {
    detail::Pause pause = m.run_segment(st);
    if (pause.kind == detail::PauseKind::Halted) break;
    st.regs[pause.rand_reg] = rng.uniform_upto(pause.rand_max);
  }
  ExecResult res;
  res.output = m.read_output(st);
  res.runtime = st.cost;
  res.out_env = m.extract_env(st);
  return res;
}

inline ExecResult run_sampled(const Program& p, const std::vector<Int>& input,
                              std::uint64_t seed, RunLimits lim = {}) {
  return run_sampled(p, input, make_env(input), seed, lim);
}

}  // namespace tpv
