#include <catch2/catch_amalgamated.hpp>

#include "tpv/disclap.hpp"
#include "tpv/enumerate.hpp"
#include "tpv/programs.hpp"

using namespace tpv;

TEST_CASE("every shipped listing validates cleanly") {
  std::vector<Program> progs = {
      build_randomized_response(),
      build_sum(),
      build_sum(Model::WordRam, 8, true),
      build_discrete_laplace(1, 2),
      build_discrete_laplace(1, 2, Model::WordRam, 6, true),
      build_delay(1, 2, 4, 8),
      build_delay(1, 2, 20, 20, Model::WordRam, 6),
      build_dataset_count(),
      build_identity_leaky_runtime(),
      build_truncate_output(),
  };
  for (const auto& p : progs) {
    INFO(p.name);
    CHECK(validate_program(p).empty());
  }
}

TEST_CASE("randomized response runtimes are 6 and 7, half and half") {
  for (Int x = 0; x <= 1; ++x) {
    auto d = enumerate_exact(build_randomized_response(), {x});
    REQUIRE(d.entries.size() == 2);
    for (const auto& [k, v] : d.entries) {
      CHECK(v == Rat(1, 2));
      if (k.first[0] == x)
        CHECK(k.second == kRandomizedResponseFastRuntime);
      else
        CHECK(k.second == kRandomizedResponseSlowRuntime);
    }
  }
}

TEST_CASE("sum runtime is 8 + 3 n and deleting a row saves exactly 3") {
  Program sum = build_sum();
  Int prev_t = -1;
  for (int n = 0; n <= 5; ++n) {
    std::vector<Int> x(n, Int(1));
    auto d = enumerate_exact(sum, x);
    REQUIRE(d.entries.size() == 1);
    const auto& [k, v] = *d.entries.begin();
    CHECK(k.second == kSumRuntimeBase + kSumRuntimePerRow * n);
    CHECK(k.first == std::vector<Int>{Int(n)});
    if (n > 0) CHECK(k.second - prev_t == kSumRuntimePerRow);
    prev_t = k.second;
  }
}

TEST_CASE("word-ram sum saturates at the cap") {
  Program sum = build_sum(Model::WordRam, 4);
  std::vector<Int> x(4, Int(7));  // 28 > 15
  auto d = enumerate_exact(sum, x);
  CHECK(d.entries.begin()->first.first == std::vector<Int>{Int(15)});
}

TEST_CASE("append-mode sum emits its input prefix and the trailing sum") {
  Program sum = build_sum(Model::Ram, 0, true);
  CHECK(sum.append_input);
  std::vector<Int> x{Int(3), Int(0), Int(4)};
  auto d = enumerate_exact(sum, x);
  REQUIRE(d.entries.size() == 1);
  const auto& [k, v] = *d.entries.begin();
  CHECK(k.first == std::vector<Int>{Int(3), Int(0), Int(4), Int(7)});
  CHECK(k.second == kSumRuntimeBase + kSumRuntimePerRow * 3);
}

TEST_CASE("delay runtime is censored discrete laplace plus 16 + 7 bound") {
  for (auto [a, b, shift, bound] :
       std::vector<std::array<int, 4>>{{1, 2, 1, 1}, {1, 2, 3, 5}, {1, 3, 2, 4}, {2, 3, 2, 2}}) {
    Program delay = build_delay(a, b, shift, bound);
    EnumLimits lim;
    lim.max_rand_branches = static_cast<unsigned>(bound) + 2;
    auto d = enumerate_exact(delay, {Int(6), Int(2)}, lim);
    INFO("a=" << a << " b=" << b << " shift=" << shift << " bound=" << bound);
    CHECK(d.residual == 0);
    DiscreteLaplaceParams p{Int(shift), Int(a), Int(b)};
    CensorSpec cs{Int(shift + bound), delay_fixed_runtime(bound)};
    CHECK(d.runtime_marginal() == censored_dl_dist(p, cs));
    for (const auto& [k, v] : d.entries)
      CHECK(k.first == std::vector<Int>{Int(6), Int(2)});  // identity on any input
  }
}

TEST_CASE("delay runtime is independent of the input (timing-pure identity)") {
  Program delay = build_delay(1, 2, 2, 3);
  EnumLimits lim;
  lim.max_rand_branches = 6;
  auto d1 = enumerate_exact(delay, {Int(0)}, lim);
  auto d2 = enumerate_exact(delay, {Int(5), Int(5), Int(5)}, lim);
  CHECK(d1.runtime_marginal() == d2.runtime_marginal());
}

TEST_CASE("laplace mechanism: conditional runtime, center mass, output censoring") {
  const unsigned bits = 5;
  Program dl = build_discrete_laplace(1, 2, Model::WordRam, bits);
  EnumLimits lim;
  lim.max_rand_branches = 20;
  auto d = enumerate_exact(dl, {Int(4)}, lim);
  auto conds = d.conditionals();
  for (const auto& [y, slice] : conds) {
    REQUIRE(y.size() == 1);
    CHECK(y[0] <= 31);
    if (y[0] == 0 || y[0] == 31) continue;
    REQUIRE(slice.size() == 1);
    CHECK(slice.begin()->first ==
          kDiscreteLaplaceFixedRuntime + kDiscreteLaplacePerNoiseUnit * abs_gap(y[0], Int(4)));
  }
  Rat center = 0;
  for (const auto& [t, m] : conds[{Int(4)}]) center += m;
  CHECK(center == Rat(1, 3));
}

TEST_CASE("last-cell laplace variant keeps the prefix and noises the tail cell") {
  Program dl = build_discrete_laplace(1, 2, Model::Ram, 0, true);
  EnumLimits lim;
  lim.max_rand_branches = 12;
  auto d = enumerate_exact(dl, {Int(9), Int(5)}, lim);
  for (const auto& [k, v] : d.entries) {
    REQUIRE(k.first.size() == 2);
    CHECK(k.first[0] == 9);
    if (k.first[1] == 0) continue;  // the clamp merges several noise values
    CHECK(k.second == kDiscreteLaplaceFixedRuntime +
                          kDiscreteLaplacePerNoiseUnit * abs_gap(k.first[1], Int(5)));
  }
}

TEST_CASE("dataset count outputs (y, |x|) in exactly four instructions") {
  Program cnt = build_dataset_count();
  for (int n = 0; n <= 4; ++n) {
    std::vector<Int> input(n, Int(2));
    input.push_back(Int(42));  // the y cell
    auto d = enumerate_exact(cnt, input);
    REQUIRE(d.entries.size() == 1);
    const auto& [k, v] = *d.entries.begin();
    CHECK(k.second == kDatasetCountRuntime);
    CHECK(k.first == std::vector<Int>{Int(42), Int(n)});
  }
}

TEST_CASE("chained runtime law is the component convolution shifted by 2") {
  // chain(sum, sum): second stage runs on the single-cell output
  Program chained = chain(build_sum(), build_sum());
  std::vector<Int> x{Int(2), Int(2), Int(1)};
  auto d = enumerate_exact(chained, x);
  REQUIRE(d.entries.size() == 1);
  const auto& [k, v] = *d.entries.begin();
  CHECK(k.first == std::vector<Int>{Int(5)});
  Int t1 = kSumRuntimeBase + kSumRuntimePerRow * 3;
  Int t2 = kSumRuntimeBase + kSumRuntimePerRow * 1;
  CHECK(k.second == t1 + t2 + kChainOverhead);

  // randomized second stage: the full law is the shifted convolution
  Program delay = build_delay(1, 2, 2, 3);
  Program sum_then_delay = chain(build_sum(), delay);
  EnumLimits lim;
  lim.max_rand_branches = 6;
  auto got = enumerate_exact(sum_then_delay, x, lim).runtime_marginal();
  auto delay_law = enumerate_exact(delay, {Int(5)}, lim).runtime_marginal();
  TimeDist expect = shifted(convolved(point_mass(t1), delay_law), Int(kChainOverhead));
  CHECK(got == expect);
}

TEST_CASE("chaining requires matching machine models") {
  CHECK_THROWS_AS(chain(build_sum(), build_sum(Model::WordRam, 8)), ModelMismatch);
  CHECK_THROWS_AS(chain(build_sum(Model::WordRam, 8), build_sum(Model::WordRam, 9)),
                  ModelMismatch);
}

TEST_CASE("chained scratch registers cannot alias across stages") {
  // both stages use `sum`, `idx`, `end`; the second stage must get fresh ones
  Program chained = chain(build_sum(), build_sum());
  int sums = 0;
  for (const auto& name : chained.registers)
    if (name.rfind("sum", 0) == 0) ++sums;
  CHECK(sums == 2);
}

TEST_CASE("parameter validation rejects bad program specs") {
  CHECK_THROWS_AS(build_discrete_laplace(2, 2), InvalidParameters);
  CHECK_THROWS_AS(build_discrete_laplace(0, 2), InvalidParameters);
  CHECK_THROWS_AS(build_delay(1, 2, 5, 4), InvalidParameters);      // bound < shift
  CHECK_THROWS_AS(build_delay(1, 2, 0, 4), InvalidParameters);      // shift < 1
  CHECK_THROWS_AS(build_delay(1, 2, 20, 20, Model::WordRam, 5), InvalidParameters);
  CHECK_THROWS_AS(build_discrete_laplace(120, 140, Model::WordRam, 8), InvalidParameters);
  CHECK_NOTHROW(build(ProgramSpec{}));
}

TEST_CASE("umbrella build dispatches on the spec kind") {
  ProgramSpec s;
  s.kind = ProgramSpec::Kind::TimingPrivateDelay;
  s.a = 1;
  s.b = 2;
  s.shift = 2;
  s.bound = 4;
  CHECK(build(s).name == "timing_private_delay");
  s.kind = ProgramSpec::Kind::Sum;
  s.append_input = true;
  CHECK(build(s).append_input);
}
