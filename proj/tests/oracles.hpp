#pragma once

// Test-only brute-force oracles. Each one decides the same question as a
// library routine through a different algorithm, so the two sides check each
// other:
//   - transport feasibility by Hall's condition (vs quantile winf / max-flow)
//   - edit distance by breadth-first search over edit sequences (vs LCS)
//   - smoothed divergence by exhaustive subset maximization (vs the
//     pointwise positive-part sum)

#include <map>
#include <queue>
#include <set>
#include <vector>

#include "tpv/dist.hpp"
#include "tpv/metrics.hpp"

namespace oracles {

using tpv::Dataset;
using tpv::Dist;
using tpv::Int;
using tpv::Rat;
using tpv::TimeDist;

// Fractional transport with allowed edges exists iff every subset of the left
// support has enough allowed mass on the right (Hall's condition for
// fractional matchings).
template <class KA, class KB, class Edge>
bool transport_feasible_hall(const Dist<KA>& a, const Dist<KB>& b, Edge edge) {
  std::vector<const KA*> left;
  std::vector<Rat> lmass;
  for (const auto& [k, m] : a) {
    left.push_back(&k);
    lmass.push_back(m);
  }
  const std::size_t n = left.size();
  for (std::size_t mask = 1; mask < (1ull << n); ++mask) {
    Rat need = 0;
    for (std::size_t i = 0; i < n; ++i)
      if (mask & (1ull << i)) need += lmass[i];
    Rat have = 0;
    for (const auto& [k, m] : b) {
      bool reachable = false;
      for (std::size_t i = 0; i < n && !reachable; ++i)
        if ((mask & (1ull << i)) && edge(*left[i], k)) reachable = true;
      if (reachable) have += m;
    }
    if (need > have) return false;
  }
  return true;
}

// Smallest t for which a coupling with |r - r'| <= t a.s. exists.
inline Int min_coupling_gap(const TimeDist& a, const TimeDist& b) {
  std::set<Int> cands;
  cands.insert(0);
  for (const auto& [ka, va] : a)
    for (const auto& [kb, vb] : b) cands.insert(ka >= kb ? ka - kb : kb - ka);
  for (const Int& t : cands) {
    auto edge = [&](const Int& x, const Int& y) { return (x >= y ? x - y : y - x) <= t; };
    if (transport_feasible_hall(a, b, edge)) return t;
  }
  throw std::logic_error("no feasible gap found");
}

// Insert-delete distance by breadth-first search over edit sequences.
inline Int insert_delete_bfs(const Dataset& from, const Dataset& to, const tpv::DomainSpec& dom,
                             int max_depth) {
  if (from == to) return 0;
  std::set<Dataset> seen{from};
  std::queue<std::pair<Dataset, int>> q;
  q.push({from, 0});
  while (!q.empty()) {
    auto [cur, depth] = q.front();
    q.pop();
    if (depth >= max_depth) continue;
    std::vector<Dataset> next;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      Dataset e = cur;
      e.erase(e.begin() + static_cast<long>(i));
      next.push_back(std::move(e));
    }
    for (std::size_t i = 0; i <= cur.size(); ++i)
      for (Int v = dom.row_lo; v <= dom.row_hi; ++v) {
        Dataset e = cur;
        e.insert(e.begin() + static_cast<long>(i), v);
        next.push_back(std::move(e));
      }
    for (auto& nb : next) {
      if (nb == to) return depth + 1;
      if (nb.size() <= dom.n_max + 2 && seen.insert(nb).second) q.push({nb, depth + 1});
    }
  }
  throw std::logic_error("edit BFS exhausted without reaching the target");
}

// Minimal delta over all events: max over subsets S of P1(S) - e_eps P2(S).
template <class K>
Rat delta_subset_max(const Dist<K>& p1, const Dist<K>& p2, const Rat& e_eps) {
  std::vector<const K*> keys;
  std::set<K> all;
  for (const auto& [k, v] : p1) all.insert(k);
  for (const auto& [k, v] : p2) all.insert(k);
  for (const auto& k : all) keys.push_back(&k);
  const std::size_t n = keys.size();
  if (n > 20) throw std::logic_error("subset oracle limited to 20 points");
  Rat best = 0;
  for (std::size_t mask = 0; mask < (1ull << n); ++mask) {
    Rat s = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask & (1ull << i))) continue;
      auto i1 = p1.find(*keys[i]);
      auto i2 = p2.find(*keys[i]);
      if (i1 != p1.end()) s += i1->second;
      if (i2 != p2.end()) s -= e_eps * i2->second;
    }
    if (s > best) best = s;
  }
  return best;
}

}  // namespace oracles
