#include <catch2/catch_amalgamated.hpp>

#include "oracles.hpp"
#include "tpv/metrics.hpp"
#include "tpv/rng.hpp"

using namespace tpv;

TEST_CASE("hamming distance") {
  CHECK(distance(MetricKind::Hamming, {Int(1), Int(2), Int(3)}, {Int(1), Int(0), Int(3)}) ==
        Int(1));
  CHECK(!distance(MetricKind::Hamming, {Int(1)}, {Int(1), Int(2)}).has_value());  // infinity
  CHECK(distance(MetricKind::Hamming, {}, {}) == Int(0));
}

TEST_CASE("insert-delete distance matches the edit-search oracle") {
  DomainSpec dom{0, 2, 3};
  CHECK(distance(MetricKind::InsertDelete, {Int(1), Int(2), Int(3)}, {Int(1), Int(3)}) == Int(1));
  auto data = all_datasets(dom);
  Rng rng(21);
  for (int trial = 0; trial < 60; ++trial) {
    const auto& x = data[rng.uniform_upto(Int(data.size() - 1)).convert_to<std::size_t>()];
    const auto& y = data[rng.uniform_upto(Int(data.size() - 1)).convert_to<std::size_t>()];
    Int got = *distance(MetricKind::InsertDelete, x, y);
    CHECK(got == oracles::insert_delete_bfs(x, y, dom, 8));
  }
}

TEST_CASE("insert-delete is a metric on sampled instances") {
  DomainSpec dom{0, 1, 3};
  auto data = all_datasets(dom);
  Rng rng(5);
  auto d = [](const Dataset& a, const Dataset& b) {
    return *distance(MetricKind::InsertDelete, a, b);
  };
  for (int trial = 0; trial < 80; ++trial) {
    auto pickone = [&]() -> const Dataset& {
      return data[rng.uniform_upto(Int(data.size() - 1)).convert_to<std::size_t>()];
    };
    const auto &x = pickone(), &y = pickone(), &z = pickone();
    CHECK(d(x, x) == 0);
    CHECK(d(x, y) == d(y, x));
    CHECK(d(x, z) <= d(x, y) + d(y, z));
  }
}

TEST_CASE("abs-diff wants single cells") {
  CHECK(distance(MetricKind::AbsDiff, {Int(7)}, {Int(3)}) == Int(4));
  CHECK_THROWS_AS(distance(MetricKind::AbsDiff, {Int(1), Int(2)}, {Int(3)}), ShapeMismatch);
}

TEST_CASE("hamming adjacent pairs over bits, length one") {
  DomainSpec dom{0, 1, 1, 1};
  auto pairs = adjacent_pairs(MetricKind::Hamming, dom, 1);
  std::set<std::pair<Dataset, Dataset>> got(pairs.begin(), pairs.end());
  std::set<std::pair<Dataset, Dataset>> want{
      {{Int(0)}, {Int(0)}}, {{Int(0)}, {Int(1)}}, {{Int(1)}, {Int(0)}}, {{Int(1)}, {Int(1)}}};
  CHECK(got == want);
}

TEST_CASE("insert-delete adjacent pairs over a singleton row domain") {
  DomainSpec dom{0, 0, 1, 0};
  auto pairs = adjacent_pairs(MetricKind::InsertDelete, dom, 1);
  std::set<std::pair<Dataset, Dataset>> got(pairs.begin(), pairs.end());
  std::set<std::pair<Dataset, Dataset>> want{
      {{}, {}}, {{}, {Int(0)}}, {{Int(0)}, {}}, {{Int(0)}, {Int(0)}}};
  CHECK(got == want);
}

TEST_CASE("adjacent pair generation matches the double-loop filter oracle") {
  struct Case {
    MetricKind m;
    DomainSpec dom;
    Int d_in;
  };
  std::vector<Case> cases = {
      {MetricKind::Hamming, {0, 2, 3}, 1},
      {MetricKind::Hamming, {0, 1, 3}, 2},
      {MetricKind::InsertDelete, {0, 2, 2}, 1},
      {MetricKind::InsertDelete, {0, 1, 3}, 2},
  };
  for (const auto& c : cases) {
    auto pairs = adjacent_pairs(c.m, c.dom, c.d_in);
    std::set<std::pair<Dataset, Dataset>> got(pairs.begin(), pairs.end());
    CHECK(got.size() == pairs.size());  // no duplicates emitted
    std::set<std::pair<Dataset, Dataset>> want;
    auto data = all_datasets(c.dom);
    for (const auto& x : data)
      for (const auto& y : data) {
        auto d = distance(c.m, x, y);
        if (d && *d <= c.d_in) want.insert({x, y});
      }
    CHECK(got == want);
  }
}

TEST_CASE("abs-diff adjacency walks unit steps within the row range") {
  DomainSpec dom{0, 4, 1, 1};
  auto pairs = adjacent_pairs(MetricKind::AbsDiff, dom, 2);
  std::set<std::pair<Dataset, Dataset>> got(pairs.begin(), pairs.end());
  std::set<std::pair<Dataset, Dataset>> want;
  for (Int a = 0; a <= 4; ++a)
    for (Int b = 0; b <= 4; ++b)
      if ((a >= b ? a - b : b - a) <= 2) want.insert({{a}, {b}});
  CHECK(got == want);
}
