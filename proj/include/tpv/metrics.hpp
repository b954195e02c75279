#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <stdexcept>
#include <vector>

#include "tpv/rational.hpp"

namespace tpv {

// Datasets are finite sequences of scalar rows (the one-dimensional case; the
// row domain is a contiguous integer range in all the checkers here).
using Dataset = std::vector<Int>;

enum class MetricKind {
  Hamming,       // same-length substitutions; infinity across lengths
  InsertDelete,  // minimum insertions + deletions
  AbsDiff,       // |x - y| on single-cell datasets
};

class ShapeMismatch : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// nullopt encodes an infinite distance (Hamming across unequal lengths).
inline std::optional<Int> distance(MetricKind m, const Dataset& x, const Dataset& y) {
  switch (m) {
    case MetricKind::Hamming: {
      if (x.size() != y.size()) return std::nullopt;
      Int d = 0;
      for (std::size_t i = 0; i < x.size(); ++i)
        if (x[i] != y[i]) ++d;
      return d;
    }
    case MetricKind::InsertDelete: {
      // |x| + |y| - 2 LCS(x, y): every common subsequence kept, the rest
      // deleted from x and inserted from y.
      const std::size_t n = x.size(), m2 = y.size();
      std::vector<std::vector<Int>> lcs(n + 1, std::vector<Int>(m2 + 1, Int(0)));
      for (std::size_t i = 1; i <= n; ++i)
        for (std::size_t j = 1; j <= m2; ++j)
          lcs[i][j] = x[i - 1] == y[j - 1] ? lcs[i - 1][j - 1] + 1
                                           : std::max(lcs[i - 1][j], lcs[i][j - 1]);
      return Int(n) + Int(m2) - 2 * lcs[n][m2];
    }
    case MetricKind::AbsDiff: {
      if (x.size() != 1 || y.size() != 1)
        throw ShapeMismatch("AbsDiff expects single-cell operands");
      return x[0] >= y[0] ? x[0] - y[0] : y[0] - x[0];
    }
  }
  throw std::logic_error("unknown metric");
}

inline Int distance_scalar(const Int& a, const Int& b) { return a >= b ? a - b : b - a; }

struct DomainSpec {
  Int row_lo{0};
  Int row_hi{1};
  std::size_t n_max{1};
  std::size_t n_min{0};

  std::size_t row_count() const { return (row_hi - row_lo + 1).convert_to<std::size_t>(); }
};

inline std::vector<Dataset> all_datasets(const DomainSpec& dom) {
  std::vector<Dataset> out;
  std::vector<Dataset> frontier{{}};
  for (std::size_t n = 0; n <= dom.n_max; ++n) {
    if (n >= dom.n_min)
      for (const auto& d : frontier) out.push_back(d);
    if (n == dom.n_max) break;
    std::vector<Dataset> next;
    next.reserve(frontier.size() * dom.row_count());
    for (const auto& d : frontier)
      for (Int v = dom.row_lo; v <= dom.row_hi; ++v) {
        Dataset e = d;
        e.push_back(v);
        next.push_back(std::move(e));
      }
    frontier = std::move(next);
  }
  return out;
}

// All ordered pairs (x, x') over the finite domain with distance <= d_in.
// Generated by edit expansion rather than a distance filter, so the
// brute-force double-loop filter stays an independent oracle in tests.
inline std::vector<std::pair<Dataset, Dataset>> adjacent_pairs(MetricKind m,
                                                               const DomainSpec& dom,
                                                               const Int& d_in) {
  std::vector<std::pair<Dataset, Dataset>> out;
  std::vector<Dataset> base = all_datasets(dom);

  auto within_domain = [&](const Dataset& d) {
    if (d.size() > dom.n_max || d.size() < dom.n_min) return false;
    for (const auto& v : d)
      if (v < dom.row_lo || v > dom.row_hi) return false;
    return true;
  };

  // Intermediate edit states may transiently exceed n_max (insert before
  // delete); only the endpoints must lie in the domain.
  auto intermediate_ok = [&](const Dataset& d) {
    if (Int(d.size()) > Int(dom.n_max) + d_in) return false;
    for (const auto& v : d)
      if (v < dom.row_lo || v > dom.row_hi) return false;
    return true;
  };

  for (const auto& x : base) {
    std::set<Dataset> seen{x};
    std::vector<Dataset> layer{x};
    for (Int step = 0; step < d_in; ++step) {
      std::vector<Dataset> next_layer;
      for (const auto& cur : layer) {
        std::vector<Dataset> neighbors;
        switch (m) {
          case MetricKind::Hamming:
            for (std::size_t i = 0; i < cur.size(); ++i)
              for (Int v = dom.row_lo; v <= dom.row_hi; ++v) {
                if (v == cur[i]) continue;
                Dataset e = cur;
                e[i] = v;
                neighbors.push_back(std::move(e));
              }
            break;
          case MetricKind::AbsDiff:
            // one unit of |x - y| per step on a single cell
            for (std::size_t i = 0; i < cur.size(); ++i)
              for (int dir : {-1, 1}) {
                Dataset e = cur;
                e[i] = cur[i] + dir;
                neighbors.push_back(std::move(e));
              }
            break;
          case MetricKind::InsertDelete: {
            for (std::size_t i = 0; i < cur.size(); ++i) {
              Dataset e = cur;
              e.erase(e.begin() + static_cast<long>(i));
              neighbors.push_back(std::move(e));
            }
            for (std::size_t i = 0; i <= cur.size(); ++i)
              for (Int v = dom.row_lo; v <= dom.row_hi; ++v) {
                Dataset e = cur;
                e.insert(e.begin() + static_cast<long>(i), v);
                neighbors.push_back(std::move(e));
              }
            break;
          }
        }
        for (auto& nb : neighbors) {
          if (!intermediate_ok(nb)) continue;
          if (seen.insert(nb).second) next_layer.push_back(std::move(nb));
        }
      }
      layer = std::move(next_layer);
    }
    for (const auto& x2 : seen)
      if (within_domain(x2)) out.emplace_back(x, x2);
  }
  return out;
}

}  // namespace tpv
