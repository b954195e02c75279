#include <catch2/catch_amalgamated.hpp>

#include "tpv/disclap.hpp"

using namespace tpv;

TEST_CASE("pmf at the shift is (b-a)/(b+a)") {
  for (auto [a, b] : std::vector<std::pair<int, int>>{{1, 2}, {1, 3}, {2, 5}, {3, 4}}) {
    DiscreteLaplaceParams p{Int(11), Int(a), Int(b)};
    CHECK(dl_pmf(11, p) == Rat(b - a, b + a));
  }
}

TEST_CASE("pmf one step out scales by a/b") {
  DiscreteLaplaceParams p{Int(0), Int(1), Int(2)};
  CHECK(dl_pmf(1, p) == Rat(1, 6));  // (1/3)(1/2)
  CHECK(dl_pmf(-1, p) == Rat(1, 6));
  CHECK(dl_pmf(5, p) == Rat(1, 3) * pow_rat(Rat(1, 2), 5));
}

TEST_CASE("pmf sums to one (geometric series closed form)") {
  for (auto [a, b] : std::vector<std::pair<int, int>>{{1, 2}, {1, 3}, {2, 3}, {3, 7}}) {
    DiscreteLaplaceParams p{Int(4), Int(a), Int(b)};
    Rat q(a, b);
    // center + two tails: each tail sums to q/(1-q) of the center mass
    Rat total = dl_pmf(4, p) * (Rat(1) + 2 * q / (Rat(1) - q));
    CHECK(total == 1);
    // and the cdf agrees with a partial sum plus the analytic tail
    Rat partial = 0;
    for (Int x = -30; x <= 4; ++x) partial += dl_pmf(x, p);
    Rat low_tail = dl_cdf(-31, p);
    CHECK(partial + low_tail == dl_cdf(4, p));
  }
}

TEST_CASE("cdf hits the documented anchor points and limits") {
  DiscreteLaplaceParams p{Int(0), Int(1), Int(2)};
  CHECK(dl_cdf(0, p) == Rat(2, 3));  // (b/a) / ((b/a) + 1)
  CHECK(dl_cdf(-50, p) < Rat(1, 1'000'000'000));
  CHECK(Rat(1) - dl_cdf(50, p) < Rat(1, 1'000'000'000));
  for (Int x = -6; x <= 6; ++x) {
    CHECK(dl_cdf(x, p) > dl_cdf(x - 1, p));
    CHECK(dl_cdf(x, p) - dl_cdf(x - 1, p) == dl_pmf(x, p));  // telescoping, both branches
  }
}

TEST_CASE("censoring piles the tails onto the edges and conserves mass") {
  DiscreteLaplaceParams p{Int(5), Int(1), Int(2)};
  CensorSpec cs{Int(12), Int(100)};
  CHECK(censored_dl_pmf(100, p, cs) == dl_cdf(0, p));
  CHECK(censored_dl_pmf(112, p, cs) == Rat(1) - dl_cdf(11, p));
  CHECK(censored_dl_pmf(105, p, cs) == dl_pmf(5, p));
  CHECK(censored_dl_pmf(99, p, cs) == 0);
  CHECK(censored_dl_pmf(113, p, cs) == 0);
  Rat total = 0;
  for (Int t = 100; t <= 112; ++t) total += censored_dl_pmf(t, p, cs);
  CHECK(total == 1);
  CHECK(total_mass(censored_dl_dist(p, cs)) == 1);
}

TEST_CASE("censoring conserves mass even when the shift rides an edge") {
  // shift at the lower censor bound: the center and the clamped tail merge
  DiscreteLaplaceParams p{Int(0), Int(1), Int(2)};
  CensorSpec cs{Int(6), Int(0)};
  CHECK(total_mass(censored_dl_dist(p, cs)) == 1);
  CHECK(censored_dl_pmf(0, p, cs) == dl_cdf(0, p));
  CHECK(dl_cdf(0, p) == Rat(2, 3));
}

TEST_CASE("censored geometric pmf") {
  Rat p(1, 2);
  Int t = 6;
  CHECK(cens_geo_pmf(6, p, t) == pow_rat(Rat(1, 2), 5));
  CHECK(cens_geo_pmf(7, p, t) == 0);
  CHECK(cens_geo_pmf(0, p, t) == 0);
  CHECK(cens_geo_pmf(2, p, t) == Rat(1, 4));
  Rat total = 0;
  for (Int x = 1; x <= t; ++x) total += cens_geo_pmf(x, p, t);
  CHECK(total == 1);
  for (auto [num, den] : std::vector<std::pair<int, int>>{{1, 3}, {2, 3}, {1, 5}}) {
    Rat pp(num, den);
    Rat tot = 0;
    for (Int x = 1; x <= 9; ++x) tot += cens_geo_pmf(x, pp, Int(9));
    CHECK(tot == 1);
  }
}

TEST_CASE("parameter validation") {
  CHECK_THROWS_AS(dl_pmf(0, DiscreteLaplaceParams{Int(0), Int(2), Int(2)}), std::invalid_argument);
  CHECK_THROWS_AS(dl_pmf(0, DiscreteLaplaceParams{Int(0), Int(0), Int(2)}), std::invalid_argument);
  CHECK_THROWS_AS(cens_geo_pmf(1, Rat(1), Int(3)), std::invalid_argument);
  CHECK_THROWS_AS(cens_geo_pmf(1, Rat(1, 2), Int(0)), std::invalid_argument);
}
