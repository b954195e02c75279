#pragma once

#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "tpv/dist.hpp"

namespace tpv {

class ResidualMassPresent : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline Int abs_gap(const Int& x, const Int& y) { return x >= y ? x - y : y - x; }

// Minimum t such that a coupling of the two laws keeps |r - r'| <= t almost
// surely. On the ordered line the monotone (quantile) coupling attains the
// optimum, so this is the largest gap between inverse CDFs across quantile
// segments; the transport-feasibility oracle in the tests guards this claim.
inline Int winf(const TimeDist& a, const TimeDist& b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("winf: empty distribution");
  if (total_mass(a) != total_mass(b))
    throw std::invalid_argument("winf: distributions carry different total mass");
  auto ia = a.begin();
  auto ib = b.begin();
  Rat rem_a = ia->second;
  Rat rem_b = ib->second;
  Int best = 0;
  while (true) {
    Int gap = abs_gap(ia->first, ib->first);
    if (gap > best) best = gap;
    Rat consumed = rem_a < rem_b ? rem_a : rem_b;
    rem_a -= consumed;
    rem_b -= consumed;
    bool advanced = false;
    if (rem_a == 0) {
      ++ia;
      if (ia == a.end()) break;
      rem_a = ia->second;
      advanced = true;
    }
    if (rem_b == 0) {
      ++ib;
      if (ib == b.end()) break;
      rem_b = ib->second;
      advanced = true;
    }
    if (!advanced) throw std::logic_error("winf: stalled sweep");
  }
  return best;
}

// Exact-rational max flow (Edmonds-Karp) used as the coupling feasibility
// core: a coupling constrained to an edge predicate exists iff the bipartite
// flow from the left marginal to the right marginal moves all the mass.
class RationalMaxFlow {
 public:
  explicit RationalMaxFlow(int n) : n_(n), head_(n, -1) {}

  void add_edge(int u, int v, Rat cap) {
    edges_.push_back({v, head_[u], std::move(cap)});
    head_[u] = static_cast<int>(edges_.size()) - 1;
    edges_.push_back({u, head_[v], Rat(0)});
    head_[v] = static_cast<int>(edges_.size()) - 1;
  }

  Rat max_flow(int s, int t) {
    Rat flow = 0;
    for (;;) {
      std::vector<int> pre(n_, -1);
      std::vector<int> pre_edge(n_, -1);
      std::queue<int> q;
      q.push(s);
      pre[s] = s;
      while (!q.empty() && pre[t] < 0) {
        int u = q.front();
        q.pop();
        for (int e = head_[u]; e >= 0; e = edges_[e].next) {
          if (edges_[e].cap > 0 && pre[edges_[e].to] < 0) {
            pre[edges_[e].to] = u;
            pre_edge[edges_[e].to] = e;
            q.push(edges_[e].to);
          }
        }
      }
      if (pre[t] < 0) return flow;
      Rat aug;
      bool first = true;
      for (int v = t; v != s; v = pre[v]) {
        const Rat& c = edges_[pre_edge[v]].cap;
        if (first || c < aug) {
          aug = c;
          first = false;
        }
      }
      for (int v = t; v != s; v = pre[v]) {
        edges_[pre_edge[v]].cap -= aug;
        edges_[pre_edge[v] ^ 1].cap += aug;
      }
      flow += aug;
    }
  }

 private:
  struct Edge {
    int to;
    int next;
    Rat cap;
  };
  int n_;
  std::vector<int> head_;
  std::vector<Edge> edges_;
};

// Does a coupling of a and b exist whose support only uses key pairs allowed
// by `edge`? Feasible iff max flow saturates the (equal) total mass.
template <class KA, class KB>
bool coupling_feasible(const Dist<KA>& a, const Dist<KB>& b,
                       const std::function<bool(const KA&, const KB&)>& edge) {
  if (total_mass(a) != total_mass(b))
    throw std::invalid_argument("coupling_feasible: unequal total mass");
  const int na = static_cast<int>(a.size());
  const int nb = static_cast<int>(b.size());
  RationalMaxFlow g(na + nb + 2);
  const int s = na + nb;
  const int t = s + 1;
  int i = 0;
  std::vector<const KA*> left(na);
  for (const auto& [k, m] : a) {
    g.add_edge(s, i, m);
    left[i] = &k;
    ++i;
  }
  int j = 0;
  for (const auto& [k, m] : b) {
    g.add_edge(na + j, t, m);
    for (int li = 0; li < na; ++li)
      if (edge(*left[li], k)) g.add_edge(li, na + j, total_mass(a));
    ++j;
  }
  return g.max_flow(s, t) == total_mass(a);
}

}  // namespace tpv
