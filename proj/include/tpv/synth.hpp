#pragma once

#include <string>
#include <vector>

#include "tpv/programs.hpp"
#include "tpv/rng.hpp"

namespace tpv {

// Random straight-line programs for property tests: forward jumps only, so
// every run terminates, and at most max_rands rand instructions, so exact
// enumeration finishes with zero residual. All coins are sampled in the
// prologue and every register is written before it is read, so no path can
// touch uninitialized state. Inputs are a single scalar at M[input_ptr].
struct SynthOptions {
  unsigned max_rands = 3;
  // When set, coins only influence timing (nop amounts and which pads run);
  // the output is a deterministic function of the input.
  bool deterministic_output = false;
  unsigned body_blocks = 7;
};

inline Program synth_program(std::uint64_t seed, const SynthOptions& opt = {}) {
  Rng rng(seed ^ 0x5eedULL);
  auto pick = [&](unsigned n) { return rng.uniform_upto(Int(n - 1)).convert_to<unsigned>(); };

  detail_build::ProgramBuilder b("synth_" + std::to_string(seed), Model::Ram, 0);
  // Output cell well away from the input; written before any branching so no
  // path can leave it unset.
  b.move(b.r("out_at"), b.lit(64));
  b.move(b.r("output_ptr"), b.r("out_at"));
  b.move(b.r("output_len"), b.lit(1));
  b.move(b.r("x"), b.mem("input_ptr"));
  b.move(b.r("acc"), b.lit(0));
  b.move(b.mem("out_at"), b.r("x"));

  const unsigned n_coins = opt.max_rands == 0 ? 0 : 1 + pick(opt.max_rands);
  std::vector<std::string> coins;
  for (unsigned i = 0; i < n_coins; ++i) {
    std::string c = "c" + std::to_string(i);
    b.rand(b.r(c), b.lit(Int(1 + pick(2))));
    coins.push_back(c);
  }

  bool acc_deterministic = true;
  auto value_operand = [&]() -> Operand {
    unsigned c = pick(3 + static_cast<unsigned>(coins.size()));
    if (c == 0) return b.lit(Int(pick(3)));
    if (c == 1) return b.r("x");
    if (c == 2) return b.r("acc");
    return b.r(coins[c - 3]);
  };
  auto is_coin = [&](const Operand& o) {
    if (!o.is_reg()) return false;
    for (const auto& c : coins)
      if (b.r(c).reg == o.reg) return true;
    return false;
  };

  unsigned label_seq = 0;
  struct Skip {
    std::string label;
    unsigned blocks_left;
    bool coin_conditioned;
  };
  std::vector<Skip> open_skips;
  auto inside_coin_skip = [&]() {
    for (const auto& s : open_skips)
      if (s.coin_conditioned) return true;
    return false;
  };

  for (unsigned blk = 0; blk < opt.body_blocks; ++blk) {
    for (auto it = open_skips.begin(); it != open_skips.end();) {
      if (it->blocks_left == 0) {
        b.label(it->label);
        it = open_skips.erase(it);
      } else {
        --it->blocks_left;
        ++it;
      }
    }

    unsigned kind = pick(4);
    if (kind == 0) {
      Operand v = value_operand();
      // acc stays a function of the input only if no coin value flows in and
      // no coin-conditioned skip can jump over this update.
      if (is_coin(v) || inside_coin_skip()) acc_deterministic = false;
      if (pick(2) == 0)
        b.add(b.r("acc"), b.r("acc"), v);
      else
        b.sub(b.r("acc"), b.r("acc"), v);
    } else if (kind == 1) {
      b.nop(value_operand());
    } else if (kind == 2 && !coins.empty()) {
      // Forward skip over 1-2 upcoming blocks on a coin or input test. In
      // deterministic mode stores happen only in the epilogue, so a skipped
      // region can only change timing.
      std::string lab = "skip" + std::to_string(label_seq++);
      bool on_coin = pick(3) != 0;
      Operand tested = on_coin ? b.r(coins[pick((unsigned)coins.size())]) : b.r("x");
      b.branch(tested, Cmp::Eq, b.lit(Int(pick(2))), lab);
      open_skips.push_back({lab, 1 + pick(2), on_coin});
    } else {
      if (opt.deterministic_output) {
        b.nop(b.lit(Int(pick(4))));
      } else {
        b.move(b.mem("out_at"), value_operand());
      }
    }
  }
  for (auto& s : open_skips) b.label(s.label);

  // Epilogue store so runs that skipped everything still have fresh output.
  if (opt.deterministic_output) {
    if (acc_deterministic && pick(2) == 0)
      b.move(b.mem("out_at"), b.r("acc"));
    else
      b.move(b.mem("out_at"), b.r("x"));
  } else {
    b.move(b.mem("out_at"), value_operand());
  }
  b.halt();
  return b.finish();
}

}  // namespace tpv
