#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "tpv/program.hpp"

namespace tpv {

class InvalidParameters : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class ModelMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};
class CompositionConventionViolated : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Golden runtime constants of the shipped listings. Each listing is
// calibrated so that, under the uniform cost model (every instruction costs
// 1, nop(k) costs k, halt costs 1), these hold exactly; the golden tests pin
// them.
inline constexpr int kRandomizedResponseFastRuntime = 6;  // coin = 0
inline constexpr int kRandomizedResponseSlowRuntime = 7;  // coin = 1
inline constexpr int kSumRuntimeBase = 8;                 // runtime = 8 + 3 n
inline constexpr int kSumRuntimePerRow = 3;
inline constexpr int kDiscreteLaplaceFixedRuntime = 15;   // runtime = 15 + 5 |noise|
inline constexpr int kDiscreteLaplacePerNoiseUnit = 5;
inline constexpr int kDatasetCountRuntime = 4;
inline constexpr int kChainOverhead = 2;    // runtime(P2 o P1) = T1 + T2 + 2
inline constexpr int kComposeOverhead = 2;  // same splice

inline Int delay_fixed_runtime(const Int& bound) { return 16 + 7 * bound; }

namespace detail_build {

class ProgramBuilder {
 public:
  ProgramBuilder(std::string name, Model model, unsigned bits) {
    p_.name = std::move(name);
    p_.model = model;
    p_.word_bits = bits;
  }

  Operand r(const std::string& name) { return Operand::regref(p_.intern_register(name)); }
  Operand mem(const std::string& name) { return Operand::memref(p_.intern_register(name)); }
  static Operand lit(Int v) { return Operand::literal(std::move(v)); }

  void constant(const std::string& name, Int v) { p_.constants.emplace_back(name, std::move(v)); }

  void label(const std::string& name) {
    if (!labels_.emplace(name, static_cast<int>(p_.code.size())).second)
      throw std::logic_error("duplicate label " + name);
  }

  void move(Operand dst, Operand src) {
    emit({Opcode::Move, std::move(dst), std::move(src)});
  }
  void add(Operand dst, Operand a, Operand b) {
    emit({Opcode::Add, std::move(dst), std::move(a), std::move(b)});
  }
  void sub(Operand dst, Operand a, Operand b) {
    emit({Opcode::Sub, std::move(dst), std::move(a), std::move(b)});
  }
  void rand(Operand dst, Operand bound) {
    emit({Opcode::Rand, std::move(dst), std::move(bound)});
  }
  void nop(Operand amount) { emit({Opcode::Nop, {}, std::move(amount)}); }
  void branch(Operand a, Cmp c, Operand b, const std::string& target) {
    Instruction ins{Opcode::Branch, {}, std::move(a), std::move(b), c};
    fixups_.emplace_back(static_cast<int>(p_.code.size()), target);
    p_.code.push_back(std::move(ins));
  }
  void jump(const std::string& target) {
    fixups_.emplace_back(static_cast<int>(p_.code.size()), target);
    p_.code.push_back({Opcode::Jump});
  }
  void halt() { emit({Opcode::Halt}); }

  Program finish(bool append_input = false) {
    for (const auto& [line, target] : fixups_) {
      auto it = labels_.find(target);
      if (it == labels_.end()) throw std::logic_error("unresolved label " + target);
      p_.code[line].target = it->second;
    }
    p_.append_input = append_input;
    return std::move(p_);
  }

 private:
  void emit(Instruction ins) { p_.code.push_back(std::move(ins)); }

  Program p_;
  std::map<std::string, int> labels_;
  std::vector<std::pair<int, std::string>> fixups_;
};

}  // namespace detail_build

// Boolean randomized response: reads one input bit, outputs it flipped with
// probability 1/2, in place. Runtime 6 when the coin is 0, 7 when it is 1.
inline Program build_randomized_response(Model model = Model::Ram, unsigned bits = 0) {
  detail_build::ProgramBuilder b("randomized_response", model, bits);
  b.move(b.r("x"), b.mem("input_ptr"));
  b.move(b.r("output_len"), b.lit(1));
  b.move(b.r("output_ptr"), b.r("input_ptr"));
  b.rand(b.r("coin"), b.lit(1));
  b.branch(b.r("coin"), Cmp::Eq, b.lit(0), "done");
  b.sub(b.mem("output_ptr"), b.lit(1), b.r("x"));
  b.label("done");
  b.halt();
  return b.finish();
}

// Dataset sum. Runtime 8 + 3 n; each row costs exactly 3 (accumulate,
// advance, loop test in a bottom-tested loop). In append mode the sum is
// written one past the input and the input itself becomes the output prefix.
inline Program build_sum(Model model = Model::Ram, unsigned bits = 0, bool append_input = false) {
  detail_build::ProgramBuilder b(append_input ? "sum_append" : "sum", model, bits);
  if (append_input) {
    b.move(b.r("output_ptr"), b.r("input_ptr"));
    b.add(b.r("output_len"), b.r("input_len"), b.lit(1));
  } else {
    b.move(b.r("output_len"), b.lit(1));
    b.move(b.r("idx"), b.r("input_ptr"));
  }
  if (append_input) b.move(b.r("idx"), b.r("input_ptr"));
  b.add(b.r("end"), b.r("input_ptr"), b.r("input_len"));
  b.move(b.r("sum"), b.lit(0));
  b.branch(b.r("idx"), Cmp::Ge, b.r("end"), "epilogue");
  b.label("loop");
  b.add(b.r("sum"), b.r("sum"), b.mem("idx"));
  b.add(b.r("idx"), b.r("idx"), b.lit(1));
  b.branch(b.r("idx"), Cmp::Lt, b.r("end"), "loop");
  b.label("epilogue");
  if (append_input) {
    b.move(b.mem("end"), b.r("sum"));
  } else {
    b.move(b.r("output_ptr"), b.lit(0));
    b.move(b.mem("output_ptr"), b.r("sum"));
  }
  b.halt();
  return b.finish(append_input);
}

// Discrete Laplace mechanism: adds two-sided geometric noise with
// P[noise = 0] = (b-a)/(b+a) and continuation ratio a/b, clamped by the
// machine's natural/word arithmetic. Conditioned on writing y + k or y - k
// the runtime is exactly 15 + 5 k. The geometric loop is unbounded; exact
// enumeration relies on the rand-branch cap and reports the tail as
// residual. With noise_last_cell the program instead treats its input as a
// block, noises only the final cell and passes the rest through unchanged
// (same runtime law).
inline Program build_discrete_laplace(Int a, Int b, Model model = Model::Ram, unsigned bits = 0,
                                      bool noise_last_cell = false) {
  if (!(b > a && a >= 1)) throw InvalidParameters("discrete laplace requires b > a >= 1");
  if (model == Model::WordRam && a + b >= pow_int(2, bits))
    throw InvalidParameters("a + b must be below the word cap");
  detail_build::ProgramBuilder pb(noise_last_cell ? "discrete_laplace_last" : "discrete_laplace",
                                  model, bits);
  pb.constant("a", a);
  pb.constant("b", b);
  pb.constant("zero_max", a + b - 1);
  pb.constant("geo_max", b - 1);
  if (noise_last_cell) {
    pb.move(pb.r("output_ptr"), pb.r("input_ptr"));
    pb.move(pb.r("output_len"), pb.r("input_len"));
    pb.add(pb.r("cell"), pb.r("input_ptr"), pb.r("input_len"));
    pb.sub(pb.r("cell"), pb.r("cell"), pb.lit(1));
    pb.move(pb.r("y"), pb.mem("cell"));
    pb.move(pb.r("noise"), pb.lit(0));
    pb.rand(pb.r("sign"), pb.lit(1));
    pb.sub(pb.r("zero_num"), pb.lit(b), pb.lit(a));
    pb.rand(pb.r("coin"), pb.lit(a + b - 1));
  } else {
    pb.move(pb.r("output_len"), pb.lit(1));
    pb.move(pb.r("output_ptr"), pb.lit(0));
    pb.move(pb.r("y"), pb.mem("input_ptr"));
    pb.move(pb.r("noise"), pb.lit(0));
    pb.rand(pb.r("sign"), pb.lit(1));
    pb.sub(pb.r("zero_num"), pb.lit(b), pb.lit(a));
    pb.add(pb.r("zero_den"), pb.lit(b), pb.lit(a));
    pb.sub(pb.r("zero_cap"), pb.r("zero_den"), pb.lit(1));
    pb.rand(pb.r("coin"), pb.r("zero_cap"));
  }
  pb.branch(pb.r("coin"), Cmp::Lt, pb.r("zero_num"), "zero_hit");
  pb.label("loop");
  pb.add(pb.r("noise"), pb.r("noise"), pb.lit(1));
  pb.rand(pb.r("coin"), pb.lit(b - 1));
  pb.nop(pb.lit(2));
  pb.branch(pb.r("coin"), Cmp::Ge, pb.r("zero_num"), "loop");
  pb.jump("sign_branch");
  pb.label("zero_hit");
  pb.nop(pb.lit(1));
  pb.label("sign_branch");
  const char* cell = noise_last_cell ? "cell" : "output_ptr";
  pb.branch(pb.r("sign"), Cmp::Eq, pb.lit(0), "minus");
  pb.add(pb.r("noisy"), pb.r("y"), pb.r("noise"));
  pb.move(pb.mem(cell), pb.r("noisy"));
  pb.halt();
  pb.label("minus");
  pb.sub(pb.r("noisy"), pb.r("y"), pb.r("noise"));
  pb.move(pb.mem(cell), pb.r("noisy"));
  pb.halt();
  return pb.finish();
}

// Timing-private delay: computes the identity through the pointer registers
// and sleeps for min{max{shift +/- sample, 0}, shift + bound} where sample
// follows the two-sided censored geometric construction. The loop body runs
// exactly `bound` times at 7 instructions per iteration regardless of the
// branch taken, so the total runtime is the censored Discrete Laplace law
// (mu = shift, B = shift + bound) offset by exactly 16 + 7 bound.
inline Program build_delay(Int a, Int b, Int shift, Int bound, Model model = Model::Ram,
                           unsigned bits = 0) {
  if (!(b > a && a >= 1)) throw InvalidParameters("delay requires b > a >= 1");
  if (!(bound >= shift && shift >= 1))
    throw InvalidParameters("delay requires bound >= shift >= 1");
  if (model == Model::WordRam) {
    Int cap = pow_int(2, bits);
    if (a + b >= cap) throw InvalidParameters("a + b must be below the word cap");
    if (shift + bound >= cap) throw InvalidParameters("shift + bound must be below the word cap");
  }
  detail_build::ProgramBuilder pb("timing_private_delay", model, bits);
  const Int sentinel = bound + 1;  // sample value meaning "no geometric hit yet"
  pb.constant("a", a);
  pb.constant("b", b);
  pb.constant("shift", shift);
  pb.constant("bound", bound);

  pb.move(pb.r("output_ptr"), pb.r("input_ptr"));
  pb.move(pb.r("output_len"), pb.r("input_len"));
  pb.move(pb.r("count"), pb.lit(0));
  pb.move(pb.r("sample"), pb.lit(sentinel));
  pb.rand(pb.r("sign"), pb.lit(1));
  pb.sub(pb.r("zero_num"), pb.lit(b), pb.lit(a));
  pb.add(pb.r("zero_den"), pb.lit(b), pb.lit(a));
  pb.sub(pb.r("zero_cap"), pb.r("zero_den"), pb.lit(1));
  pb.rand(pb.r("coin"), pb.r("zero_cap"));
  pb.branch(pb.r("coin"), Cmp::Ge, pb.r("zero_num"), "zero_miss");
  pb.move(pb.r("sample"), pb.lit(0));
  pb.jump("loop");
  pb.label("zero_miss");
  pb.nop(pb.lit(2));
  pb.label("loop");
  pb.add(pb.r("count"), pb.r("count"), pb.lit(1));
  pb.branch(pb.r("sample"), Cmp::Ne, pb.lit(sentinel), "busy");
  pb.rand(pb.r("coin"), pb.lit(b - 1));
  pb.branch(pb.r("coin"), Cmp::Lt, pb.r("zero_num"), "geo_hit");
  pb.nop(pb.lit(1));
  pb.jump("loop_test");
  pb.label("geo_hit");
  pb.move(pb.r("sample"), pb.r("count"));
  pb.jump("loop_test");
  pb.label("busy");
  pb.nop(pb.lit(4));
  pb.label("loop_test");
  pb.branch(pb.r("count"), Cmp::Lt, pb.lit(bound), "loop");
  pb.branch(pb.r("sample"), Cmp::Eq, pb.lit(sentinel), "censored");
  pb.branch(pb.r("sign"), Cmp::Eq, pb.lit(0), "minus");
  pb.add(pb.r("sleep"), pb.lit(shift), pb.r("sample"));
  pb.nop(pb.r("sleep"));
  pb.halt();
  pb.label("minus");
  pb.sub(pb.r("sleep"), pb.lit(shift), pb.r("sample"));
  pb.nop(pb.r("sleep"));
  pb.halt();
  pb.label("censored");
  pb.branch(pb.r("sign"), Cmp::Eq, pb.lit(0), "censored_minus");
  pb.move(pb.r("sleep"), pb.lit(shift + bound));
  pb.nop(pb.r("sleep"));
  pb.halt();
  pb.label("censored_minus");
  pb.move(pb.r("sleep"), pb.lit(shift >= bound ? shift - bound : Int(0)));
  pb.nop(pb.r("sleep"));
  pb.halt();
  return pb.finish();
}

// Dataset count: input is a dataset x in M[0..input_len-2] with a value y at
// M[input_len-1]; output is (y, |x|), written by placing the count right
// after y. Always exactly 4 instructions.
inline Program build_dataset_count(Model model = Model::Ram, unsigned bits = 0) {
  detail_build::ProgramBuilder b("dataset_count", model, bits);
  b.sub(b.r("output_ptr"), b.r("input_len"), b.lit(1));
  b.move(b.r("output_len"), b.lit(2));
  // count = input_len - 1 = output_ptr, stored one past y at M[input_len]
  b.move(b.mem("input_len"), b.r("output_ptr"));
  b.halt();
  return b.finish();
}

// Identity program whose runtime grows with the input value: runtime
// 4 + M[input_ptr]. Output equals input, so on its own the runtime reads off
// nothing the output does not already reveal; truncating the output
// afterwards turns the runtime into a genuine leak.
inline Program build_identity_leaky_runtime(Model model = Model::Ram, unsigned bits = 0) {
  detail_build::ProgramBuilder b("identity_leaky_runtime", model, bits);
  b.move(b.r("output_ptr"), b.r("input_ptr"));
  b.move(b.r("output_len"), b.r("input_len"));
  b.move(b.r("t"), b.mem("input_ptr"));
  b.nop(b.r("t"));
  b.halt();
  return b.finish();
}

// Constant-time post-processor that erases the output (output_len = 0).
inline Program build_truncate_output(Model model = Model::Ram, unsigned bits = 0) {
  detail_build::ProgramBuilder b("truncate_output", model, bits);
  b.move(b.r("output_ptr"), b.r("input_ptr"));
  b.move(b.r("output_len"), b.lit(0));
  b.halt();
  return b.finish();
}

// --- the ProgramSpec umbrella ----------------------------------------------

struct ProgramSpec {
  enum class Kind { RandomizedResponse, Sum, DiscreteLaplace, TimingPrivateDelay, DatasetCount };
  Kind kind{Kind::RandomizedResponse};
  Model model{Model::Ram};
  unsigned word_bits{0};
  Int a{1};
  Int b{2};
  Int shift{1};
  Int bound{1};
  bool append_input{false};  // composition mode (Sum) / noise-last-cell (DiscreteLaplace)
};

inline Program build(const ProgramSpec& s) {
  switch (s.kind) {
    case ProgramSpec::Kind::RandomizedResponse:
      return build_randomized_response(s.model, s.word_bits);
    case ProgramSpec::Kind::Sum:
      return build_sum(s.model, s.word_bits, s.append_input);
    case ProgramSpec::Kind::DiscreteLaplace:
      return build_discrete_laplace(s.a, s.b, s.model, s.word_bits, s.append_input);
    case ProgramSpec::Kind::TimingPrivateDelay:
      return build_delay(s.a, s.b, s.shift, s.bound, s.model, s.word_bits);
    case ProgramSpec::Kind::DatasetCount:
      return build_dataset_count(s.model, s.word_bits);
  }
  throw InvalidParameters("unknown program kind");
}

// --- chaining and composition -----------------------------------------------

namespace detail_build {

// Splices p2 after p1: every halt in p1 becomes a jump to a two-instruction
// glue block (input_ptr = output_ptr; input_len = output_len), after which
// p2's code runs with its branch targets shifted and its scratch registers
// renamed apart from p1's. A halt costs the same as the jump replacing it,
// so the chained runtime is T1 + T2 + 2 on every path.
inline Program splice(const Program& p1, const Program& p2, const std::string& name) {
  if (p1.model != p2.model || p1.word_bits != p2.word_bits)
    throw ModelMismatch("cannot chain programs built for different machine models");
  Program out;
  out.name = name;
  out.model = p1.model;
  out.word_bits = p1.word_bits;
  out.registers = p1.registers;
  out.constants = p1.constants;
  for (const auto& [k, v] : p2.constants) {
    bool clash = false;
    for (const auto& [k1, v1] : out.constants)
      if (k1 == k) clash = true;
    out.constants.emplace_back(clash ? k + "_2" : k, v);
  }

  const int glue_start = static_cast<int>(p1.code.size());
  const int p2_start = glue_start + 2;

  out.code = p1.code;
  for (auto& ins : out.code)
    if (ins.op == Opcode::Halt) {
      ins = Instruction{Opcode::Jump};
      ins.target = glue_start;
    }

  Instruction glue1{Opcode::Move, Operand::regref(kRegInputPtr),
                    Operand::regref(kRegOutputPtr)};
  Instruction glue2{Opcode::Move, Operand::regref(kRegInputLen),
                    Operand::regref(kRegOutputLen)};
  out.code.push_back(glue1);
  out.code.push_back(glue2);

  // Rename p2's scratch registers so nothing aliases p1 state by accident.
  std::vector<int> regmap(p2.registers.size(), -1);
  for (std::size_t i = 0; i < p2.registers.size(); ++i) {
    if (i < kNumBuiltins) {
      regmap[i] = static_cast<int>(i);
      continue;
    }
    std::string base = p2.registers[i];
    std::string candidate = base;
    while (out.reg_index(candidate) >= 0) candidate += "_2";
    regmap[i] = out.intern_register(candidate);
  }
  auto remap = [&](Operand o) {
    if (o.is_reg() || o.is_mem()) o.reg = regmap[o.reg];
    return o;
  };
  for (const Instruction& src : p2.code) {
    Instruction ins = src;
    ins.dst = remap(ins.dst);
    ins.src1 = remap(ins.src1);
    ins.src2 = remap(ins.src2);
    if (ins.op == Opcode::Branch || ins.op == Opcode::Jump) ins.target += p2_start;
    out.code.push_back(std::move(ins));
  }
  return out;
}

}  // namespace detail_build

// Sequential chaining: run p2 on p1's output.
inline Program chain(const Program& p1, const Program& p2) {
  return detail_build::splice(p1, p2, p1.name + "." + p2.name);
}

// Composition: p1 must follow the append-input convention (it emits its
// unmodified input as the prefix of its output), so that p2 sees (x, y).
inline Program compose(const Program& p1, const Program& p2) {
  if (!p1.append_input)
    throw CompositionConventionViolated(
        "composition needs the first program to emit its input as an output prefix");
  return detail_build::splice(p1, p2, p1.name + "+" + p2.name);
}

}  // namespace tpv
