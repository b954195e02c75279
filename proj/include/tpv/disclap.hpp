#pragma once

#include <stdexcept>

#include "tpv/dist.hpp"
#include "tpv/rational.hpp"

namespace tpv {

// Discrete Laplace with integer shift mu and scale s = 1/ln(b/a), carried
// entirely through the rational ratio a/b = e^{-1/s}. Nothing in this module
// (or anywhere else in the library) evaluates a transcendental function.
struct DiscreteLaplaceParams {
  Int mu{0};
  Int a{1};
  Int b{2};

  Rat ratio() const { return Rat(a, b); }  // e^{-1/s}
  void check() const {
    if (!(b > a && a >= 1))
      throw std::invalid_argument("discrete laplace requires b > a >= 1");
  }
};

// Censor window [0, B] with offset c: the law of min{max{T, 0}, B} + c.
struct CensorSpec {
  Int upper{0};   // B
  Int offset{0};  // c

  void check() const {
    if (upper < 0 || offset < 0)
      throw std::invalid_argument("censor bounds must be nonnegative");
  }
};

namespace detail {
inline long to_long(const Int& v) { return v.convert_to<long>(); }
}  // namespace detail

// pmf(x) = ((b-a)/(b+a)) * (a/b)^{|x-mu|}
inline Rat dl_pmf(const Int& x, const DiscreteLaplaceParams& p) {
  p.check();
  Int d = x >= p.mu ? x - p.mu : p.mu - x;
  return Rat(p.b - p.a, p.b + p.a) * pow_rat(p.ratio(), detail::to_long(d));
}

// Two-branch CDF:
//   x <= mu:  (b/(a+b)) * (a/b)^{mu-x}
//   x >  mu:  1 - (a/(a+b)) * (a/b)^{x-mu}
inline Rat dl_cdf(const Int& x, const DiscreteLaplaceParams& p) {
  p.check();
  if (x <= p.mu) return Rat(p.b, p.a + p.b) * pow_rat(p.ratio(), detail::to_long(p.mu - x));
  return Rat(1) - Rat(p.a, p.a + p.b) * pow_rat(p.ratio(), detail::to_long(x - p.mu));
}

// Point law of min{max{T, 0}, B} + c for T ~ DL(mu, s).
inline Rat censored_dl_pmf(const Int& t, const DiscreteLaplaceParams& p, const CensorSpec& cs) {
  p.check();
  cs.check();
  if (t < cs.offset || t > cs.upper + cs.offset) return Rat(0);
  Int z = t - cs.offset;  // in [0, B]
  if (cs.upper == 0) return Rat(1);
  if (z == 0) return dl_cdf(Int(0), p);
  if (z == cs.upper) return Rat(1) - dl_cdf(cs.upper - 1, p);
  return dl_pmf(z, p);
}

inline TimeDist censored_dl_dist(const DiscreteLaplaceParams& p, const CensorSpec& cs) {
  TimeDist d;
  for (Int t = cs.offset; t <= cs.upper + cs.offset; ++t) {
    Rat m = censored_dl_pmf(t, p, cs);
    if (m > 0) d.emplace(t, m);
  }
  return d;
}

// Geometric(p) on {1, 2, ...} censored at trial t:
//   pmf(x) = p (1-p)^{x-1}   for 1 <= x < t
//   pmf(t) = (1-p)^{t-1}
inline Rat cens_geo_pmf(const Int& x, const Rat& p, const Int& t) {
  if (!(p > 0 && p < 1)) throw std::invalid_argument("cens_geo_pmf: p must be in (0,1)");
  if (t < 1) throw std::invalid_argument("cens_geo_pmf: censor trial must be >= 1");
  if (x < 1 || x > t) return Rat(0);
  Rat q = Rat(1) - p;
  if (x == t) return pow_rat(q, detail::to_long(t - 1));
  return p * pow_rat(q, detail::to_long(x - 1));
}

}  // namespace tpv
