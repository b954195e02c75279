#include <catch2/catch_amalgamated.hpp>

#include "tpv/enumerate.hpp"
#include "tpv/programs.hpp"
#include "tpv/synth.hpp"

using namespace tpv;

TEST_CASE("randomized response enumerates to the two-path law") {
  auto d = enumerate_exact(build_randomized_response(), {Int(0)});
  std::map<ExactJointDist::Key, Rat> want{
      {{{Int(0)}, Int(6)}, Rat(1, 2)},
      {{{Int(1)}, Int(7)}, Rat(1, 2)},
  };
  CHECK(d.entries == want);
  CHECK(d.residual == 0);
  CHECK(d.paths == 2);
}

TEST_CASE("deterministic programs enumerate to a single unit mass") {
  auto d = enumerate_exact(build_sum(), {});
  REQUIRE(d.entries.size() == 1);
  CHECK(d.entries.begin()->second == 1);
  CHECK(d.residual == 0);
}

TEST_CASE("mass at the center of the laplace mechanism is (b-a)/(b+a)") {
  // interior center: the clamp at zero cannot merge other noise values into it
  EnumLimits lim;
  lim.max_rand_branches = 40;
  auto d = enumerate_exact(build_discrete_laplace(1, 2), {Int(3)}, lim);
  Rat at_center = 0;
  for (const auto& [k, v] : d.entries)
    if (k.first == std::vector<Int>{Int(3)}) at_center += v;
  CHECK(at_center == Rat(1, 3));
  CHECK(d.residual > 0);
}

TEST_CASE("entries plus residual conserve all mass exactly") {
  EnumLimits lim;
  lim.max_rand_branches = 9;
  auto d = enumerate_exact(build_discrete_laplace(2, 5), {Int(4)}, lim);
  CHECK(d.entry_mass() + d.residual == 1);
  CHECK(d.branch_capped_paths > 0);
  // tightening the cap can only move mass into the residual
  EnumLimits tighter;
  tighter.max_rand_branches = 5;
  auto d2 = enumerate_exact(build_discrete_laplace(2, 5), {Int(4)}, tighter);
  CHECK(d2.residual > d.residual);
  CHECK(d2.entry_mass() + d2.residual == 1);
}

TEST_CASE("sampled runs land in the enumerated support with zero residual") {
  std::vector<std::pair<Program, std::vector<Int>>> cases;
  cases.emplace_back(build_randomized_response(), std::vector<Int>{Int(1)});
  cases.emplace_back(build_delay(1, 2, 2, 4), std::vector<Int>{Int(9)});
  for (unsigned s = 0; s < 6; ++s)
    cases.emplace_back(synth_program(1000 + s), std::vector<Int>{Int(s % 2)});

  EnumLimits lim;
  lim.max_rand_branches = 10;
  for (const auto& [p, input] : cases) {
    auto d = enumerate_exact(p, input, lim);
    REQUIRE(d.residual == 0);
    for (std::uint64_t seed = 0; seed < 200; ++seed) {
      auto res = run_sampled(p, input, seed);
      ExactJointDist::Key key{res.output, res.runtime};
      REQUIRE(d.entries.count(key) == 1);
    }
  }
}

TEST_CASE("empirical frequencies approach the exact law") {
  Program rr = build_randomized_response();
  auto exact = enumerate_exact(rr, {Int(0)});
  std::map<ExactJointDist::Key, Rat> emp;
  const std::size_t n = 4000;
  for (std::size_t i = 0; i < n; ++i) {
    auto res = run_sampled(rr, {Int(0)}, 90000 + i);
    emp[{res.output, res.runtime}] += Rat(1, n);
  }
  CHECK(tv_distance(emp, exact.entries) <= Rat(5, 100));
}

TEST_CASE("pure programs enumerate identically across environments") {
  std::vector<Program> progs = {build_randomized_response(), build_sum(),
                                build_delay(1, 2, 2, 4),
                                build_discrete_laplace(1, 2)};
  std::vector<Int> input{Int(1)};
  EnumLimits lim;
  lim.max_rand_branches = 12;
  for (const auto& p : progs) {
    Environment plain = make_env(input);
    Environment junk = make_env(input);
    junk.memory[Int(200)] = 77;  // uninitialized elsewhere, initialized here
    junk.memory[Int(201)] = 3;
    auto d1 = enumerate_exact(p, input, plain, lim);
    auto d2 = enumerate_exact(p, input, junk, lim);
    CHECK(d1.entries == d2.entries);
    CHECK(d1.residual == d2.residual);
  }
}

TEST_CASE("runaway paths are pruned into the residual and flagged") {
  // loops forever on coin = 0 (probability 1/2 per trial)
  detail_build::ProgramBuilder b("maybe_spin", Model::Ram, 0);
  b.move(b.r("output_ptr"), b.lit(5));
  b.move(b.r("output_len"), b.lit(0));
  b.label("top");
  b.rand(b.r("c"), b.lit(1));
  b.branch(b.r("c"), Cmp::Eq, b.lit(0), "top");
  b.halt();
  Program p = b.finish();
  EnumLimits lim;
  lim.max_rand_branches = 4;
  auto d = enumerate_exact(p, {}, lim);
  CHECK(d.residual == Rat(1, 16));
  CHECK(d.branch_capped_paths == 1);
  CHECK(d.entry_mass() == Rat(15, 16));
}

TEST_CASE("uninitialized reads contribute zero mass, tracked as residual") {
  detail_build::ProgramBuilder b("half_bad", Model::Ram, 0);
  b.move(b.r("output_ptr"), b.lit(5));
  b.move(b.r("output_len"), b.lit(0));
  b.rand(b.r("c"), b.lit(1));
  b.branch(b.r("c"), Cmp::Eq, b.lit(0), "ok");
  b.move(b.r("t"), b.mem("c"));  // M[1] uninitialized on empty input
  b.label("ok");
  b.halt();
  Program p = b.finish();
  auto d = enumerate_exact(p, {});
  CHECK(d.residual == Rat(1, 2));
  CHECK(d.uninitialized_read_paths == 1);
  CHECK(d.entry_mass() == Rat(1, 2));
}

TEST_CASE("incompatible environments refuse to enumerate") {
  Environment env = make_env({Int(0)});
  CHECK_THROWS_AS(enumerate_exact(build_randomized_response(), {Int(1)}, env, {}), VmError);
}
