#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "tpv/dist.hpp"
#include "tpv/vm.hpp"

namespace tpv {

struct EnumLimits {
  // Cap on the number of rand instructions executed along a single path;
  // subtrees past the cap contribute their exact mass to the residual.
  unsigned max_rand_branches = 64;
  std::uint64_t max_steps = 1'000'000;
  // Widest rand fan-out a single instruction may have during enumeration.
  std::uint64_t max_branch_width = 1'000'000;
};

// Exact joint law of (output, runtime) as rational point masses. Entries plus
// residual always sum to exactly 1; the residual carries the mass of paths we
// refused to finish (branch cap, step limit, or an uninitialized read).
struct ExactJointDist {
  using Key = std::pair<std::vector<Int>, Int>;  // (output, runtime)
  std::map<Key, Rat> entries;
  Rat residual{0};

  std::uint64_t paths = 0;
  std::uint64_t branch_capped_paths = 0;
  std::uint64_t step_limited_paths = 0;
  std::uint64_t uninitialized_read_paths = 0;

  Rat entry_mass() const {
    Rat s = 0;
    for (const auto& [k, v] : entries) s += v;
    return s;
  }

  TimeDist runtime_marginal() const {
    TimeDist d;
    for (const auto& [k, v] : entries) d[k.second] += v;
    return d;
  }

  OutputDist output_marginal() const {
    OutputDist d;
    for (const auto& [k, v] : entries) d[k.first] += v;
    return d;
  }

  // Scalar view of the output marginal; requires every output to be a single
  // word.
  ScalarDist scalar_output_marginal() const {
    ScalarDist d;
    for (const auto& [k, v] : entries) {
      if (k.first.size() != 1)
        throw std::logic_error("scalar_output_marginal: output is not a single word");
      d[k.first[0]] += v;
    }
    return d;
  }

  // Unnormalized runtime slices keyed by output value.
  std::map<std::vector<Int>, TimeDist> conditionals() const {
    std::map<std::vector<Int>, TimeDist> by;
    for (const auto& [k, v] : entries) by[k.first][k.second] += v;
    return by;
  }
};

// Branches on every rand with probability 1/(n+1) per outcome, multiplying
// exact rationals along each path. Depth-first; state is copied only at
// branch points.
inline ExactJointDist enumerate_exact(const Program& p, const std::vector<Int>& input,
                                      const Environment& env, EnumLimits lim = {}) {
  if (!compatible(env, input))
    throw VmError(VmErrorKind::IncompatibleEnvironment,
                  "environment memory does not contain the declared input (empty support)");
  if (p.code.empty()) throw VmError(VmErrorKind::InvalidProgram, "empty program");

  RunLimits rl;
  rl.max_steps = lim.max_steps;
  detail::Machine m(p, rl);
  ExactJointDist dist;

  struct Frame {
    detail::MachineState st;
    Rat mass;
  };

  // Explicit stack; recursion depth would otherwise track rand depth, which
  // callers may configure large.
  std::vector<Frame> stack;
  stack.push_back({detail::MachineState::init(p, env), Rat(1)});

  while (!stack.empty()) {
    Frame fr = std::move(stack.back());
    stack.pop_back();
    detail::Pause pause;
    try {
      pause = m.run_segment(fr.st);
    } catch (const VmError& e) {
      dist.residual += fr.mass;
      ++dist.paths;
      if (e.kind() == VmErrorKind::StepLimitExceeded)
        ++dist.step_limited_paths;
      else if (e.kind() == VmErrorKind::UninitializedRead)
        ++dist.uninitialized_read_paths;
      else
        throw;
      continue;
    }
    if (pause.kind == detail::PauseKind::Halted) {
      dist.entries[{m.read_output(fr.st), fr.st.cost}] += fr.mass;
      ++dist.paths;
      continue;
    }
    // rand instruction: fork
    if (fr.st.rand_count > lim.max_rand_branches) {
      dist.residual += fr.mass;
      ++dist.paths;
      ++dist.branch_capped_paths;
      continue;
    }
    Int outcomes = pause.rand_max + 1;
    if (outcomes > Int(lim.max_branch_width))
      throw VmError(VmErrorKind::InvalidProgram,
                    "rand fan-out " + outcomes.str() + " exceeds enumeration width");
    Rat share = fr.mass / Rat(outcomes);
    for (Int v = 0; v < outcomes; ++v) {
      Frame child{fr.st, share};
      child.st.regs[pause.rand_reg] = v;
      stack.push_back(std::move(child));
    }
  }
  return dist;
}

inline ExactJointDist enumerate_exact(const Program& p, const std::vector<Int>& input,
                                      EnumLimits lim = {}) {
  return enumerate_exact(p, input, make_env(input), lim);
}

}  // namespace tpv
