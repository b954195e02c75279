#include <catch2/catch_amalgamated.hpp>

#include <functional>
#include <set>

#include "tpv/programs.hpp"
#include "tpv/vm.hpp"

using namespace tpv;

namespace {

Program tiny(std::function<void(detail_build::ProgramBuilder&)> body, Model m = Model::Ram,
             unsigned bits = 0) {
  detail_build::ProgramBuilder b("tiny", m, bits);
  b.move(b.r("output_ptr"), b.lit(90));
  b.move(b.r("output_len"), b.lit(1));
  b.move(b.mem("output_ptr"), b.lit(0));
  body(b);
  b.halt();
  return b.finish();
}

}  // namespace

TEST_CASE("arithmetic clamps at zero on naturals") {
  Program p = tiny([](auto& b) {
    b.sub(b.r("t"), b.lit(3), b.lit(10));
    b.move(b.mem("output_ptr"), b.r("t"));
  });
  auto res = run_sampled(p, {}, 1);
  CHECK(res.output == std::vector<Int>{Int(0)});
}

TEST_CASE("word ram saturates at the cap by default and traps when asked") {
  Program p = tiny(
      [](auto& b) {
        b.add(b.r("t"), b.lit(200), b.lit(100));
        b.move(b.mem("output_ptr"), b.r("t"));
      },
      Model::WordRam, 8);
  auto res = run_sampled(p, {}, 1);
  CHECK(res.output == std::vector<Int>{Int(255)});

  RunLimits lim;
  lim.trap_word_overflow = true;
  try {
    run_sampled(p, {}, make_env({}), 1, lim);
    FAIL("expected WordOverflow");
  } catch (const VmError& e) {
    CHECK(e.kind() == VmErrorKind::WordOverflow);
  }
}

TEST_CASE("nop costs its operand, halt costs one") {
  Program p = tiny([](auto& b) { b.nop(b.lit(17)); });
  auto res = run_sampled(p, {}, 1);
  // 3 setup moves + nop(17) + halt
  CHECK(res.runtime == 3 + 17 + 1);
}

TEST_CASE("reading uninitialized state is an error") {
  Program reg = tiny([](auto& b) { b.move(b.mem("output_ptr"), b.r("ghost")); });
  CHECK_THROWS_AS(run_sampled(reg, {}, 1), VmError);
  Program mem = tiny([](auto& b) {
    b.move(b.r("addr"), b.lit(500));
    b.move(b.mem("output_ptr"), b.mem("addr"));
  });
  try {
    run_sampled(mem, {}, 1);
    FAIL("expected UninitializedRead");
  } catch (const VmError& e) {
    CHECK(e.kind() == VmErrorKind::UninitializedRead);
  }
}

TEST_CASE("environment must contain the declared input") {
  Program p = build_randomized_response();
  Environment env = make_env({Int(1)});
  env.memory[env.input_ptr] = 0;  // contradicts the declared input below
  try {
    run_sampled(p, {Int(1)}, env, 3);
    FAIL("expected IncompatibleEnvironment");
  } catch (const VmError& e) {
    CHECK(e.kind() == VmErrorKind::IncompatibleEnvironment);
  }
}

TEST_CASE("step limit aborts runaway loops") {
  detail_build::ProgramBuilder b("spin", Model::Ram, 0);
  b.label("top");
  b.jump("top");
  b.halt();
  Program p = b.finish();
  RunLimits lim;
  lim.max_steps = 1000;
  try {
    run_sampled(p, {}, make_env({}), 1, lim);
    FAIL("expected StepLimitExceeded");
  } catch (const VmError& e) {
    CHECK(e.kind() == VmErrorKind::StepLimitExceeded);
  }
}

TEST_CASE("seeded runs replay byte-identically") {
  Program p = build_delay(1, 2, 3, 5);
  for (std::uint64_t seed : {1ull, 42ull, 999ull}) {
    auto r1 = run_sampled(p, {Int(2)}, seed);
    auto r2 = run_sampled(p, {Int(2)}, seed);
    CHECK(r1.output == r2.output);
    CHECK(r1.runtime == r2.runtime);
  }
}

TEST_CASE("rand draws stay within the inclusive bound and hit every value") {
  Program p = tiny([](auto& b) {
    b.rand(b.r("t"), b.lit(3));
    b.move(b.mem("output_ptr"), b.r("t"));
  });
  std::set<Int> seen;
  for (std::uint64_t s = 0; s < 400; ++s) {
    auto res = run_sampled(p, {}, s);
    REQUIRE(res.output[0] >= 0);
    REQUIRE(res.output[0] <= 3);
    seen.insert(res.output[0]);
  }
  CHECK(seen.size() == 4);
}

TEST_CASE("validator flags bad targets, word overflow, unreachable halts") {
  CHECK(validate_program(build_sum()).empty());

  Program bad = build_sum();
  bad.code[5].target = 99;  // goto past the end
  CHECK(validate_program(bad).size() == 1);

  detail_build::ProgramBuilder b("o", Model::WordRam, 8);
  b.move(b.r("output_ptr"), b.lit(0));
  b.move(b.r("output_len"), b.lit(0));
  b.move(b.r("t"), b.lit(300));
  b.halt();
  Program over = b.finish();
  bool overflow_diag = false;
  for (const auto& d : validate_program(over))
    if (d.message.find("exceeds word size") != std::string::npos) overflow_diag = true;
  CHECK(overflow_diag);

  detail_build::ProgramBuilder c("u", Model::Ram, 0);
  c.jump("end");
  c.halt();  // skipped by the jump
  c.label("end");
  c.halt();
  Program unreach = c.finish();
  bool unreachable_diag = false;
  for (const auto& d : validate_program(unreach))
    if (d.message == "unreachable halt") unreachable_diag = true;
  CHECK(unreachable_diag);
}

TEST_CASE("output window reads through output_ptr/output_len") {
  Program p = tiny([](auto& b) {
    b.move(b.r("output_len"), b.lit(3));
    b.move(b.r("a1"), b.lit(91));
    b.move(b.r("a2"), b.lit(92));
    b.move(b.mem("a1"), b.lit(5));
    b.move(b.mem("a2"), b.lit(6));
  });
  auto res = run_sampled(p, {}, 1);
  CHECK(res.output == std::vector<Int>{Int(0), Int(5), Int(6)});
  CHECK(res.out_env.output_ptr == 90);
  CHECK(res.out_env.output_len == 3);
}
