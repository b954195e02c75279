#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tpv/disclap.hpp"
#include "tpv/stability.hpp"

namespace tpv {

// Budgets store e^epsilon exactly; epsilon itself would be transcendental for
// the parameter families used here, while e^epsilon is always rational
// (powers of b/a). delta = 0 encodes pure max-divergence.
struct PrivacyBudget {
  Rat e_eps{1};
  Rat delta{0};

  void check() const {
    if (e_eps < 1) throw std::invalid_argument("budget needs e^eps >= 1");
    if (delta < 0 || delta > 1) throw std::invalid_argument("delta must lie in [0,1]");
  }
};

struct ComposedBudget {
  PrivacyBudget budget;
  bool delta_clamped = false;  // delta sum exceeded 1 and was clamped
};

inline ComposedBudget compose_budgets(const PrivacyBudget& b1, const PrivacyBudget& b2) {
  ComposedBudget out;
  out.budget.e_eps = b1.e_eps * b2.e_eps;
  Rat d = b1.delta + b2.delta;
  if (d > 1) {
    d = 1;
    out.delta_clamped = true;
  }
  out.budget.delta = d;
  return out;
}

// sup over the support of `num` of num(k)/den(k), in e^eps form; infinity
// when num's support escapes den's. On discrete laws this sup equals the
// set-maximized divergence.
template <class K>
ExtRat max_div(const Dist<K>& num, const Dist<K>& den) {
  ExtRat best(Rat(0));
  bool any = false;
  for (const auto& [k, p] : num) {
    if (p == 0) continue;
    any = true;
    auto it = den.find(k);
    if (it == den.end() || it->second == 0) return ExtRat::infinity();
    best.max_with(ExtRat(p / it->second));
  }
  if (!any) return ExtRat(Rat(1));
  return best;
}

// Minimal delta with num <= e_eps * den + delta over every event:
// sum_k max(0, num(k) - e_eps * den(k)). Works on sub-distributions; callers
// handling enumeration residual add it on top.
template <class K>
Rat delta_for_eps(const Dist<K>& num, const Dist<K>& den, const Rat& e_eps) {
  Rat d = 0;
  for (const auto& [k, p] : num) {
    auto it = den.find(k);
    Rat q = it == den.end() ? Rat(0) : it->second;
    Rat gap = p - e_eps * q;
    if (gap > 0) d += gap;
  }
  return d;
}

template <class K>
Rat delta_two_sided(const Dist<K>& a, const Dist<K>& b, const Rat& e_eps) {
  Rat d1 = delta_for_eps(a, b, e_eps);
  Rat d2 = delta_for_eps(b, a, e_eps);
  return d1 > d2 ? d1 : d2;
}

template <class K>
ExtRat max_div_two_sided(const Dist<K>& a, const Dist<K>& b) {
  ExtRat r = max_div(a, b);
  r.max_with(max_div(b, a));
  return r;
}

// --- program-level deciders ----------------------------------------------
//
// Verdicts are budget comparisons: required_delta is the least delta that
// passes at the budget's e^eps, with any enumeration residual folded in on
// the larger side, so residual-bearing checks can only fail safe.

struct PrivacyCheckResult {
  bool pass = false;
  Rat required_delta{0};    // includes conservative residual fold
  ExtRat max_ratio;         // sup point ratio over both directions (exact when residual 0)
  Rat residual_folded{0};   // total residual mass charged to required_delta
  std::pair<Dataset, Dataset> witness;
  std::optional<std::vector<Int>> witness_output;  // for output-conditional checks
};

inline PrivacyCheckResult check_output_dp(EnumOracle& oracle, MetricKind m, const Rat& d_in,
                                          const DomainSpec& dom, const PrivacyBudget& budget) {
  budget.check();
  if (boost::multiprecision::denominator(d_in) != 1)
    throw std::invalid_argument("d_in must be an integer for exhaustive checking");
  PrivacyCheckResult res;
  res.max_ratio = ExtRat(Rat(1));
  for (const auto& [x, x2] : adjacent_pairs(m, dom, boost::multiprecision::numerator(d_in))) {
    const auto& da = oracle.dist(x);
    const auto& db = oracle.dist(x2);
    OutputDist oa = da.output_marginal();
    OutputDist ob = db.output_marginal();
    // Raw (sub-)distributions: unseen mass of the numerator side can add at
    // most its residual to any event, the denominator side only shrinks.
    Rat need = delta_for_eps(oa, ob, budget.e_eps) + da.residual;
    Rat need2 = delta_for_eps(ob, oa, budget.e_eps) + db.residual;
    if (need2 > need) need = need2;
    if (need > res.required_delta) {
      res.required_delta = need;
      res.witness = {x, x2};
    }
    Rat fold = da.residual + db.residual;
    if (fold > res.residual_folded) res.residual_folded = fold;
    if (da.residual == 0 && db.residual == 0) res.max_ratio.max_with(max_div_two_sided(oa, ob));
  }
  res.pass = res.required_delta <= budget.delta;
  return res;
}

namespace detail {

// Conservative one-direction conditional delta for output y.
//   p_true(t|y) <= p1(y,t)/m1    and unseen conditional mass <= r1/m1;
//   q_true(t|y) >= p2(y,t)/(m2+r2).
inline Rat cond_delta_upper(const TimeDist& s1, const Rat& m1, const Rat& r1, const TimeDist& s2,
                            const Rat& m2, const Rat& r2, const Rat& e_eps) {
  Rat d = 0;
  for (const auto& [t, p] : s1) {
    auto it = s2.find(t);
    Rat q = it == s2.end() ? Rat(0) : it->second;
    Rat gap = p / m1 - e_eps * (q / (m2 + r2));
    if (gap > 0) d += gap;
  }
  return d + r1 / m1;
}

}  // namespace detail

// Output-conditional timing privacy: for every adjacent pair and every output
// in the (enumerated) support intersection, both divergence directions of the
// conditional runtime laws stay within budget. With zero residual the
// verdict is exact; otherwise conservative (residual inflates the conditional
// deltas and is additionally charged once per pair for outputs the
// enumeration may have missed).
inline PrivacyCheckResult check_oc_timing_privacy(EnumOracle& oracle, MetricKind m,
                                                  const Rat& d_in, const DomainSpec& dom,
                                                  const PrivacyBudget& budget) {
  budget.check();
  if (boost::multiprecision::denominator(d_in) != 1)
    throw std::invalid_argument("d_in must be an integer for exhaustive checking");
  PrivacyCheckResult res;
  res.max_ratio = ExtRat(Rat(1));
  for (const auto& [x, x2] : adjacent_pairs(m, dom, boost::multiprecision::numerator(d_in))) {
    const auto& da = oracle.dist(x);
    const auto& db = oracle.dist(x2);
    auto c1 = da.conditionals();
    auto c2 = db.conditionals();
    Rat pair_need = da.residual + db.residual;  // outputs possibly hidden in residual
    std::optional<std::vector<Int>> worst_y;
    for (const auto& [y, s1] : c1) {
      auto it = c2.find(y);
      if (it == c2.end()) continue;
      Rat m1 = total_mass(s1);
      Rat m2 = total_mass(it->second);
      Rat need =
          detail::cond_delta_upper(s1, m1, da.residual, it->second, m2, db.residual, budget.e_eps);
      Rat need2 =
          detail::cond_delta_upper(it->second, m2, db.residual, s1, m1, da.residual, budget.e_eps);
      if (need2 > need) need = need2;
      if (need + da.residual + db.residual > pair_need) {
        pair_need = need + da.residual + db.residual;
        worst_y = y;
      }
      if (da.residual == 0 && db.residual == 0)
        res.max_ratio.max_with(max_div_two_sided(normalized(s1), normalized(it->second)));
    }
    if (pair_need > res.required_delta) {
      res.required_delta = pair_need;
      res.witness = {x, x2};
      res.witness_output = worst_y;
    }
    Rat fold = da.residual + db.residual;
    if (fold > res.residual_folded) res.residual_folded = fold;
  }
  res.pass = res.required_delta <= budget.delta;
  return res;
}

// Joint output/timing privacy: the plain divergence check on the joint
// (output, runtime) law.
inline PrivacyCheckResult check_joint_privacy(EnumOracle& oracle, MetricKind m, const Rat& d_in,
                                              const DomainSpec& dom,
                                              const PrivacyBudget& budget) {
  budget.check();
  if (boost::multiprecision::denominator(d_in) != 1)
    throw std::invalid_argument("d_in must be an integer for exhaustive checking");
  PrivacyCheckResult res;
  res.max_ratio = ExtRat(Rat(1));
  for (const auto& [x, x2] : adjacent_pairs(m, dom, boost::multiprecision::numerator(d_in))) {
    const auto& da = oracle.dist(x);
    const auto& db = oracle.dist(x2);
    Rat need = delta_for_eps(da.entries, db.entries, budget.e_eps) + da.residual;
    Rat need2 = delta_for_eps(db.entries, da.entries, budget.e_eps) + db.residual;
    if (need2 > need) need = need2;
    if (need > res.required_delta) {
      res.required_delta = need;
      res.witness = {x, x2};
    }
    Rat fold = da.residual + db.residual;
    if (fold > res.residual_folded) res.residual_folded = fold;
    if (da.residual == 0 && db.residual == 0)
      res.max_ratio.max_with(max_div_two_sided(da.entries, db.entries));
  }
  res.pass = res.required_delta <= budget.delta;
  return res;
}

// --- delay certification ---------------------------------------------------

class PreconditionViolated : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct DelayCertificate {
  Int t_in{0};
  PrivacyBudget budget;          // e^eps target and the exact computed delta
  Rat closed_form_delta{0};      // 2 (a/b)^(mu - t_in)
  DiscreteLaplaceParams params;
  CensorSpec censor;
};

// Certifies the censored Discrete Laplace law Phi = min{max{T,0},B} + c as a
// (t_in -> (eps, delta))-timing-private delay distribution: computes the
// exact delta = max over shifts 0 <= t <= t_in and both directions, and
// checks it against the closed form 2 (a/b)^(mu - t_in).
inline DelayCertificate certify_delay(const DiscreteLaplaceParams& p, const CensorSpec& cs,
                                      const Int& t_in, const Rat& e_eps_target) {
  p.check();
  cs.check();
  if (t_in < 0) throw PreconditionViolated("t_in must be nonnegative");
  if (p.mu < t_in) throw PreconditionViolated("delay shift mu must be at least t_in");
  if (cs.upper < 2 * p.mu) throw PreconditionViolated("censor bound B must be at least 2*mu");
  if (e_eps_target != pow_rat(Rat(p.b, p.a), detail::to_long(t_in)))
    throw PreconditionViolated("scale mismatch: e^eps target must equal (b/a)^t_in");

  TimeDist phi = censored_dl_dist(p, cs);
  Rat worst = 0;
  for (Int t = 0; t <= t_in; ++t) {
    Rat d = delta_two_sided(shifted(phi, t), phi, e_eps_target);
    if (d > worst) worst = d;
  }
  DelayCertificate cert;
  cert.t_in = t_in;
  cert.budget = {e_eps_target, worst};
  cert.closed_form_delta = 2 * pow_rat(Rat(p.a, p.b), detail::to_long(p.mu - t_in));
  cert.params = p;
  cert.censor = cs;
  return cert;
}

// --- simulator construction -------------------------------------------------

// Per-output simulator realizing the simulation-based timing privacy
// definition: on outputs this side can produce, play the own conditional
// law; on outputs only the other side produces, play the other side's; on
// everything else, the constant 0.
struct TimingSimulator {
  std::map<std::vector<Int>, TimeDist> table_x;
  std::map<std::vector<Int>, TimeDist> table_x2;

  static TimeDist zero_law() { return point_mass(Int(0)); }

  const TimeDist& at_x(const std::vector<Int>& y) const { return lookup(table_x, y); }
  const TimeDist& at_x2(const std::vector<Int>& y) const { return lookup(table_x2, y); }

  // All outputs either side can produce; elsewhere both simulators are the
  // zero law and contribute divergence 1.
  std::vector<std::vector<Int>> outputs() const {
    std::vector<std::vector<Int>> ys;
    for (const auto& [y, d] : table_x) ys.push_back(y);
    for (const auto& [y, d] : table_x2)
      if (!table_x.count(y)) ys.push_back(y);
    return ys;
  }

 private:
  static const TimeDist& lookup(const std::map<std::vector<Int>, TimeDist>& t,
                                const std::vector<Int>& y) {
    static const TimeDist zero = zero_law();
    auto it = t.find(y);
    return it == t.end() ? zero : it->second;
  }
};

inline TimingSimulator build_timing_simulator(const ExactJointDist& dist_x,
                                              const ExactJointDist& dist_x2) {
  if (dist_x.residual != 0 || dist_x2.residual != 0)
    throw ResidualMassPresent("simulator construction needs fully enumerated laws");
  TimingSimulator sim;
  auto c1 = dist_x.conditionals();
  auto c2 = dist_x2.conditionals();
  for (const auto& [y, s] : c1) sim.table_x[y] = normalized(s);
  for (const auto& [y, s] : c2) sim.table_x2[y] = normalized(s);
  for (const auto& [y, s] : c2)
    if (!sim.table_x.count(y)) sim.table_x[y] = normalized(s);
  for (const auto& [y, s] : c1)
    if (!sim.table_x2.count(y)) sim.table_x2[y] = normalized(s);
  return sim;
}

}  // namespace tpv
