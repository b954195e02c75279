#pragma once

#include <map>
#include <vector>

#include "tpv/rational.hpp"

namespace tpv {

// Finite distributions (or sub-distributions) with exact rational mass.
template <class K>
using Dist = std::map<K, Rat>;

using TimeDist = Dist<Int>;                 // runtime -> mass
using ScalarDist = Dist<Int>;               // scalar value -> mass
using OutputDist = Dist<std::vector<Int>>;  // output word sequence -> mass

template <class K>
Rat total_mass(const Dist<K>& d) {
  Rat s = 0;
  for (const auto& [k, v] : d) s += v;
  return s;
}

template <class K>
Dist<K> normalized(const Dist<K>& d) {
  Rat s = total_mass(d);
  if (s == 0) return {};
  Dist<K> out;
  for (const auto& [k, v] : d) out.emplace(k, v / s);
  return out;
}

inline TimeDist point_mass(Int t) { return TimeDist{{std::move(t), Rat(1)}}; }

inline TimeDist shifted(const TimeDist& d, const Int& t) {
  TimeDist out;
  for (const auto& [k, v] : d) out.emplace(k + t, v);
  return out;
}

// Distribution of X + Y for independent X, Y.
inline TimeDist convolved(const TimeDist& a, const TimeDist& b) {
  TimeDist out;
  for (const auto& [ka, va] : a)
    for (const auto& [kb, vb] : b) out[ka + kb] += va * vb;
  return out;
}

template <class K>
Rat tv_distance(const Dist<K>& a, const Dist<K>& b) {
  Rat s = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() || ib != b.end()) {
    if (ib == b.end() || (ia != a.end() && ia->first < ib->first)) {
      s += ia->second < 0 ? -ia->second : ia->second;
      ++ia;
    } else if (ia == a.end() || ib->first < ia->first) {
      s += ib->second < 0 ? -ib->second : ib->second;
      ++ib;
    } else {
      Rat d = ia->second - ib->second;
      s += d < 0 ? -d : d;
      ++ia;
      ++ib;
    }
  }
  return s / 2;
}

template <class K>
bool same_support(const Dist<K>& a, const Dist<K>& b) {
  if (a.size() != b.size()) return false;
  auto ib = b.begin();
  for (auto ia = a.begin(); ia != a.end(); ++ia, ++ib)
    if (ia->first != ib->first) return false;
  return true;
}

}  // namespace tpv
