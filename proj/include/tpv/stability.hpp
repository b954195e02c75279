#pragma once

#include <functional>
#include <map>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "tpv/coupling.hpp"
#include "tpv/enumerate.hpp"
#include "tpv/metrics.hpp"

namespace tpv {

class BoundMismatch : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// (d_in -> t_out) or, when d_out is present, (d_in -> {d_out, t_out}).
struct StabilityBound {
  Rat d_in{1};
  Int t_out{0};
  std::optional<Rat> d_out{};
};

// Output distance for joint stability: absolute difference on one output
// coordinate (coordinate 0 for scalar outputs, 1 for the (value, count)
// convention of the counting programs).
struct OutputMetric {
  std::size_t coord = 0;

  Int operator()(const std::vector<Int>& a, const std::vector<Int>& b) const {
    if (coord >= a.size() || coord >= b.size())
      throw ShapeMismatch("output metric coordinate out of range");
    return abs_gap(a[coord], b[coord]);
  }
};

// Shared enumeration cache over a dataset domain; every checker below is a
// brute-force quantifier over adjacent pairs, so pairs reuse per-dataset
// enumerations. The shipped programs are output- and timing-pure, so the
// canonical minimal environment stands in for the full quantifier over
// compatible environments (purity itself is covered by separate tests).
class EnumOracle {
 public:
  EnumOracle(const Program& p, EnumLimits lim = {}) : p_(p), lim_(lim) {}

  const ExactJointDist& dist(const Dataset& x) {
    auto it = cache_.find(x);
    if (it != cache_.end()) return it->second;
    auto d = enumerate_exact(p_, x, make_env(x), lim_);
    return cache_.emplace(x, std::move(d)).first->second;
  }

  const ExactJointDist& dist_residual_free(const Dataset& x) {
    const ExactJointDist& d = dist(x);
    if (d.residual != 0)
      throw ResidualMassPresent("enumeration left residual mass " + rat_str(d.residual));
    return d;
  }

  const Program& program() const { return p_; }

 private:
  const Program& p_;
  EnumLimits lim_;
  std::map<Dataset, ExactJointDist> cache_;
};

struct TimingStabilityResult {
  Int t_out{0};
  std::pair<Dataset, Dataset> witness;
};

// t_out = max over adjacent pairs of the minimal almost-sure runtime gap.
inline TimingStabilityResult check_timing_stability(EnumOracle& oracle, MetricKind m,
                                                    const Rat& d_in, const DomainSpec& dom) {
  if (boost::multiprecision::denominator(d_in) != 1)
    throw std::invalid_argument("d_in must be an integer for exhaustive checking");
  TimingStabilityResult res;
  bool first = true;
  for (const auto& [x, x2] : adjacent_pairs(m, dom, boost::multiprecision::numerator(d_in))) {
    Int t = winf(oracle.dist_residual_free(x).runtime_marginal(),
                 oracle.dist_residual_free(x2).runtime_marginal());
    if (first || t > res.t_out) {
      res.t_out = t;
      res.witness = {x, x2};
      first = false;
    }
  }
  return res;
}

struct OcStabilityResult {
  Int t_out{0};
  std::pair<Dataset, Dataset> witness;
  std::vector<Int> witness_output;
};

// Max over adjacent pairs and over outputs in the support intersection of the
// minimal gap between the conditional runtime laws. Outputs seen on only one
// side impose nothing (the definition quantifies over the intersection).
inline OcStabilityResult check_oc_timing_stability(EnumOracle& oracle, MetricKind m,
                                                   const Rat& d_in, const DomainSpec& dom) {
  if (boost::multiprecision::denominator(d_in) != 1)
    throw std::invalid_argument("d_in must be an integer for exhaustive checking");
  OcStabilityResult res;
  bool first = true;
  for (const auto& [x, x2] : adjacent_pairs(m, dom, boost::multiprecision::numerator(d_in))) {
    auto c1 = oracle.dist_residual_free(x).conditionals();
    auto c2 = oracle.dist_residual_free(x2).conditionals();
    for (const auto& [y, slice1] : c1) {
      auto it = c2.find(y);
      if (it == c2.end()) continue;
      Int t = winf(normalized(slice1), normalized(it->second));
      if (first || t > res.t_out) {
        res.t_out = t;
        res.witness = {x, x2};
        res.witness_output = y;
        first = false;
      }
    }
  }
  return res;
}

struct JointFrontierPoint {
  Int d_out{0};
  Int t_out{0};
  std::pair<Dataset, Dataset> witness;  // pair that pins t_out at this d_out
};

struct JointStabilityResult {
  // Pareto-minimal (d_out, t_out) feasible for every adjacent pair; d_out
  // strictly increasing, t_out strictly decreasing.
  std::vector<JointFrontierPoint> frontier;

  bool feasible(const Int& d, const Int& t) const {
    for (const auto& pt : frontier)
      if (pt.d_out <= d && pt.t_out <= t) return true;
    return false;
  }
};

namespace detail {

// Minimal t such that a coupling bounding the output distance by d and the
// runtime gap by t exists; nullopt when no t works at this d.
inline std::optional<Int> min_t_at(const ExactJointDist& da, const ExactJointDist& db,
                                   const OutputMetric& om, const Int& d) {
  using Key = ExactJointDist::Key;
  std::set<Int> gaps;
  for (const auto& [ka, va] : da.entries)
    for (const auto& [kb, vb] : db.entries)
      if (om(ka.first, kb.first) <= d) gaps.insert(abs_gap(ka.second, kb.second));
  if (gaps.empty()) return std::nullopt;
  std::vector<Int> cand(gaps.begin(), gaps.end());
  auto ok = [&](const Int& t) {
    std::function<bool(const Key&, const Key&)> edge = [&](const Key& a, const Key& b) {
      return om(a.first, b.first) <= d && abs_gap(a.second, b.second) <= t;
    };
    return coupling_feasible<Key, Key>(da.entries, db.entries, edge);
  };
  // Feasibility is monotone in t; binary search the candidate gaps.
  std::size_t lo = 0, hi = cand.size() - 1;
  if (!ok(cand[hi])) return std::nullopt;
  while (lo < hi) {
    std::size_t mid = (lo + hi) / 2;
    if (ok(cand[mid]))
      hi = mid;
    else
      lo = mid + 1;
  }
  return cand[lo];
}

}  // namespace detail

// Builds the feasibility frontier over all adjacent pairs via a max-flow test
// per candidate constraint pair.
inline JointStabilityResult check_joint_stability(EnumOracle& oracle, MetricKind m,
                                                  const Rat& d_in, const OutputMetric& om,
                                                  const DomainSpec& dom) {
  if (boost::multiprecision::denominator(d_in) != 1)
    throw std::invalid_argument("d_in must be an integer for exhaustive checking");
  auto pairs = adjacent_pairs(m, dom, boost::multiprecision::numerator(d_in));

  // Candidate output bounds: all achievable cross distances.
  std::set<Int> dcand;
  for (const auto& [x, x2] : pairs) {
    const auto& da = oracle.dist_residual_free(x);
    const auto& db = oracle.dist_residual_free(x2);
    for (const auto& [ka, va] : da.entries)
      for (const auto& [kb, vb] : db.entries) dcand.insert(om(ka.first, kb.first));
  }

  JointStabilityResult res;
  std::optional<Int> prev_t;
  for (const Int& d : dcand) {
    Int worst_t = 0;
    std::pair<Dataset, Dataset> worst_pair;
    bool all_feasible = true;
    for (const auto& [x, x2] : pairs) {
      auto t = detail::min_t_at(oracle.dist_residual_free(x), oracle.dist_residual_free(x2), om, d);
      if (!t) {
        all_feasible = false;
        break;
      }
      if (*t >= worst_t) {
        worst_t = *t;
        worst_pair = {x, x2};
      }
    }
    if (!all_feasible) continue;
    if (!prev_t || worst_t < *prev_t) {
      res.frontier.push_back({d, worst_t, worst_pair});
      prev_t = worst_t;
      if (worst_t == 0) break;  // larger d cannot improve further
    }
  }
  return res;
}

// --- stability-map arithmetic -------------------------------------------

// joint (d1 -> {d2, t1}) chained into OC (d2 -> t2): OC (d1 -> t1 + t2).
inline StabilityBound stability_chain(const StabilityBound& joint1, const StabilityBound& oc2) {
  if (!joint1.d_out)
    throw BoundMismatch("first stage of a chain needs a joint output/timing bound");
  if (*joint1.d_out != oc2.d_in)
    throw BoundMismatch("chained bounds disagree: upstream d_out " + rat_str(*joint1.d_out) +
                        " vs downstream d_in " + rat_str(oc2.d_in));
  return StabilityBound{joint1.d_in, joint1.t_out + oc2.t_out, std::nullopt};
}

// joint (d1 -> {d2, t1}) chained into joint (d2 -> {d3, t2}).
inline StabilityBound stability_chain_joint(const StabilityBound& j1, const StabilityBound& j2) {
  if (!j1.d_out || !j2.d_out) throw BoundMismatch("joint chaining needs joint bounds");
  if (*j1.d_out != j2.d_in)
    throw BoundMismatch("chained bounds disagree: upstream d_out " + rat_str(*j1.d_out) +
                        " vs downstream d_in " + rat_str(j2.d_in));
  return StabilityBound{j1.d_in, j1.t_out + j2.t_out, j2.d_out};
}

// OC (d -> t1) composed with OC (d -> t2): OC (d -> t1 + t2).
inline StabilityBound stability_compose(const StabilityBound& oc1, const StabilityBound& oc2) {
  if (oc1.d_in != oc2.d_in)
    throw BoundMismatch("composed bounds must share d_in: " + rat_str(oc1.d_in) + " vs " +
                        rat_str(oc2.d_in));
  return StabilityBound{oc1.d_in, oc1.t_out + oc2.t_out, std::nullopt};
}

}  // namespace tpv
