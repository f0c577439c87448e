#pragma once

// Weight sequences M = (M_j) with M_0 = 1, stored as logM[j] = log M_j.
// Derived quantities: quotients mu_j = M_j/M_{j-1} and m_j = M_j/j!.
// Everything lives in the natural-log domain: M_j for the faster
// families overflows any fixed-width linear representation long before
// the default truncation.

#include <carleman/scaled.hpp>
#include <carleman/trend.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace carleman {

// Smallest j0 with loglog j >= 1 for every j > j0 (e^e = 15.154...).
inline constexpr std::size_t log_log_start = 15;

enum class FamilyKind { factorial, gevrey, qgevrey, log_log_row, custom };

struct FamilyDescriptor {
  FamilyKind kind = FamilyKind::custom;
  double param = 0.0;  // s (gevrey), q (qgevrey), or lambda (log_log_row)

  std::string label() const {
    std::ostringstream os;
    switch (kind) {
      case FamilyKind::factorial: return "factorial";
      case FamilyKind::gevrey: os << "gevrey(" << param << ")"; break;
      case FamilyKind::qgevrey: os << "qgevrey(" << param << ")"; break;
      case FamilyKind::log_log_row: os << "loglogrow(" << param << ")"; break;
      case FamilyKind::custom: return "custom";
    }
    return os.str();
  }
};

class WeightSequence {
 public:
  static WeightSequence factorial(std::size_t J) {
    return from_log_quotients(
        J, [](std::size_t j) { return std::log(double(j)); },
        {FamilyKind::factorial, 0.0});
  }

  // M_j = (j!)^s, s >= 1.
  static WeightSequence gevrey(double s, std::size_t J) {
    if (!(s >= 1.0))
      throw std::invalid_argument("gevrey: order s must satisfy s >= 1");
    return from_log_quotients(
        J, [s](std::size_t j) { return s * std::log(double(j)); },
        {FamilyKind::gevrey, s});
  }

  // M_j = j! * q^{j^2}, q > 1: log mu_j = log j + (2j-1) log q.
  static WeightSequence qgevrey(double q, std::size_t J) {
    if (!(q > 1.0))
      throw std::invalid_argument("qgevrey: base q must satisfy q > 1");
    const double lq = std::log(q);
    return from_log_quotients(
        J,
        [lq](std::size_t j) {
          return std::log(double(j)) + double(2 * j - 1) * lq;
        },
        {FamilyKind::qgevrey, q});
  }

  // mu_j = 1 for j <= 15, mu_j = j*(loglog j)^lambda beyond.
  static WeightSequence log_log_row(double lambda, std::size_t J) {
    if (!(lambda > 0.0))
      throw std::invalid_argument("loglogrow: lambda must be positive");
    return from_log_quotients(
        J,
        [lambda](std::size_t j) {
          if (j <= log_log_start) return 0.0;
          return std::log(double(j)) +
                 lambda * std::log(std::log(std::log(double(j))));
        },
        {FamilyKind::log_log_row, lambda});
  }

  static WeightSequence from_family(const FamilyDescriptor& f, std::size_t J) {
    switch (f.kind) {
      case FamilyKind::factorial: return factorial(J);
      case FamilyKind::gevrey: return gevrey(f.param, J);
      case FamilyKind::qgevrey: return qgevrey(f.param, J);
      case FamilyKind::log_log_row: return log_log_row(f.param, J);
      default:
        throw std::invalid_argument("from_family: custom has no generator");
    }
  }

  // log_values[j] = log M_j for j = 0..J.  logM[0] != 0 is tolerated
  // (validation reports it) so matrix rows built from raw conjugates
  // can be carried by the same type.
  static WeightSequence custom(std::vector<double> log_values) {
    if (log_values.size() < 3)
      throw std::invalid_argument("custom sequence: need J >= 2");
    for (double v : log_values)
      if (!std::isfinite(v))
        throw std::invalid_argument("custom sequence: entries must be finite");
    return WeightSequence(std::move(log_values), {FamilyKind::custom, 0.0});
  }

  std::size_t order() const { return logM_.size() - 1; }  // truncation J
  double log_M(std::size_t j) const { return logM_[j]; }
  const std::vector<double>& log_M() const { return logM_; }
  double log_mu(std::size_t j) const { return logM_[j] - logM_[j - 1]; }
  double log_m(std::size_t j) const {
    return logM_[j] - static_cast<double>(log_factorial(j));
  }
  bool normalized() const { return logM_[0] == 0.0; }
  const FamilyDescriptor& family() const { return family_; }

 private:
  WeightSequence(std::vector<double> logM, FamilyDescriptor f)
      : logM_(std::move(logM)), family_(f) {}

  template <typename LogMu>
  static WeightSequence from_log_quotients(std::size_t J, LogMu&& log_mu,
                                           FamilyDescriptor f) {
    if (J < 2) throw std::invalid_argument("build_sequence: need J >= 2");
    std::vector<double> steps(J);
    for (std::size_t j = 1; j <= J; ++j) steps[j - 1] = log_mu(j);
    return WeightSequence(prefix_sums(steps), f);
  }

  std::vector<double> logM_;
  FamilyDescriptor family_;
};

// ---------------------------------------------------------------------------
// Validation: (I) normalization, (II) log-convexity, (III) root growth.

struct SequenceValidation {
  bool start_normalized = false;          // (I): M_0 = 1 and M_1 >= M_0
  bool log_convex = false;                // (II): mu nondecreasing
  std::size_t first_violation = 0;        // first index breaking (II), 0 = none
  Verdict root_growth = Verdict::inconclusive;  // (III): liminf (m_j)^{1/j} > 0
  TrendReport root_growth_trend;

  bool all_hold() const {
    return start_normalized && log_convex && root_growth == Verdict::holds;
  }
};

inline SequenceValidation validate_weight_sequence(const WeightSequence& W) {
  constexpr double slack = 1e-12;
  SequenceValidation rep;
  rep.start_normalized = W.log_M(0) == 0.0 && W.log_M(1) >= -slack;

  rep.log_convex = true;
  for (std::size_t j = 2; j <= W.order(); ++j) {
    if (W.log_mu(j) < W.log_mu(j - 1) - slack) {
      rep.log_convex = false;
      rep.first_violation = j;
      break;
    }
  }

  // (M_j/j!)^{1/j} bounded away from zero <=> (log m_j)/j bounded below.
  std::vector<double> v(W.order());
  for (std::size_t j = 1; j <= W.order(); ++j)
    v[j - 1] = W.log_m(j) / double(j);
  rep.root_growth_trend = classify_decay_trend(v, 1);
  switch (rep.root_growth_trend.verdict) {
    case Verdict::holds: rep.root_growth = Verdict::fails; break;
    case Verdict::fails: rep.root_growth = Verdict::holds; break;
    default: rep.root_growth = Verdict::inconclusive;
  }
  return rep;
}

// Max over j+k <= J, j,k >= 1 of logM[j] + logM[k] - logM[j+k].
// Nonpositive for every normalized log-convex sequence.
inline double superadditivity_defect(const WeightSequence& W) {
  double worst = -std::numeric_limits<double>::infinity();
  const auto& lm = W.log_M();
  for (std::size_t j = 1; j + 1 <= W.order(); ++j)
    for (std::size_t k = j; j + k <= W.order(); ++k)
      worst = std::max(worst, lm[j] + lm[k] - lm[j + k]);
  return worst;
}

// ---------------------------------------------------------------------------
// Comparison: M precedes N (sup (M_j/N_j)^{1/j} finite), strict version
// ((M_j/N_j)^{1/j} -> 0), and two-sided equivalence.

struct ComparisonReport {
  Verdict m_precedes_n = Verdict::inconclusive;  // M ≼ N
  Verdict n_precedes_m = Verdict::inconclusive;  // N ≼ M
  Verdict m_strictly_n = Verdict::inconclusive;  // M ◁ N
  Verdict n_strictly_m = Verdict::inconclusive;  // N ◁ M
  Verdict equivalent = Verdict::inconclusive;    // M ≈ N
  TrendReport forward_sup, backward_sup, forward_decay, backward_decay;
  std::size_t truncation = 0;
};

inline ComparisonReport compare_sequences(const WeightSequence& M,
                                          const WeightSequence& N) {
  ComparisonReport rep;
  rep.truncation = std::min(M.order(), N.order());
  std::vector<double> r(rep.truncation), nr(rep.truncation);
  for (std::size_t j = 1; j <= rep.truncation; ++j) {
    r[j - 1] = (M.log_M(j) - N.log_M(j)) / double(j);
    nr[j - 1] = -r[j - 1];
  }
  rep.forward_sup = classify_sup_trend(r, 1);
  rep.backward_sup = classify_sup_trend(nr, 1);
  rep.forward_decay = classify_decay_trend(r, 1);
  rep.backward_decay = classify_decay_trend(nr, 1);
  rep.m_precedes_n = rep.forward_sup.verdict;
  rep.n_precedes_m = rep.backward_sup.verdict;
  rep.m_strictly_n = rep.forward_decay.verdict;
  rep.n_strictly_m = rep.backward_decay.verdict;
  if (rep.m_precedes_n == Verdict::holds && rep.n_precedes_m == Verdict::holds)
    rep.equivalent = Verdict::holds;
  else if (rep.m_precedes_n == Verdict::fails ||
           rep.n_precedes_m == Verdict::fails)
    rep.equivalent = Verdict::fails;
  return rep;
}

// ---------------------------------------------------------------------------
// Growth conditions with realized certificates.

struct Certificate {
  std::optional<double> C, h, D, C1;
  bool rechecked = false;  // constants re-substituted for every in-range j
};

struct ConditionVerdict {
  std::string condition;
  Verdict holds = Verdict::inconclusive;
  Certificate certificate;
  std::vector<double> evidence;    // per-index defect (or term) values
  std::size_t evidence_offset = 0; // absolute index of evidence[0]
  WindowStats window;
  std::vector<std::pair<std::string, double>> stats;
  std::string note;
};

enum class SequenceCondition { mg, nq, pointwise_square, mixed, root_square };

struct SequenceConditionOptions {
  std::size_t C = 2;  // index stretch for mixed / root_square
  double C1 = 1.0;    // multiplicative factor for root_square
};

namespace detail {

// M_{j+k} <= C^{j+k} M_j M_k: per-n worst defect over interior splits.
inline ConditionVerdict check_mg(const WeightSequence& W) {
  ConditionVerdict v;
  v.condition = "mg";
  const std::size_t J = W.order();
  const auto& lm = W.log_M();
  v.evidence.resize(J - 1);
  v.evidence_offset = 2;
  for (std::size_t n = 2; n <= J; ++n) {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 1; j < n; ++j)
      worst = std::max(worst, lm[n] - lm[j] - lm[n - j]);
    v.evidence[n - 2] = worst / double(n);
  }
  auto trend = classify_sup_trend(v.evidence, 2);
  v.holds = trend.verdict;
  v.window = trend.stats;
  const double max_defect =
      *std::max_element(v.evidence.begin(), v.evidence.end());
  v.stats.emplace_back("max_defect", max_defect);
  if (v.holds == Verdict::holds) {
    const double log_C = std::max(0.0, max_defect);
    v.certificate.C = std::exp(log_C);
    bool ok = true;
    for (std::size_t n = 2; n <= J && ok; ++n)
      for (std::size_t j = 1; j < n && ok; ++j)
        ok = lm[n] - lm[j] - lm[n - j] <= double(n) * log_C + 1e-12;
    v.certificate.rechecked = ok;
  }
  return v;
}

// Sum of M_{j-1}/M_j (and the Carleman companion sum of (M_j)^{-1/j}):
// holds = both converge = non-quasianalytic.
inline ConditionVerdict check_nq(const WeightSequence& W) {
  ConditionVerdict v;
  v.condition = "nq";
  const std::size_t J = W.order();
  std::vector<double> quotient_terms(J), root_terms(J);
  long double s1 = 0.0L, s2 = 0.0L;
  for (std::size_t j = 1; j <= J; ++j) {
    quotient_terms[j - 1] = std::exp(-W.log_mu(j));
    root_terms[j - 1] = std::exp(-W.log_M(j) / double(j));
    s1 += quotient_terms[j - 1];
    s2 += root_terms[j - 1];
  }
  auto b1 = classify_block_divergence(quotient_terms, 1);
  auto b2 = classify_block_divergence(root_terms, 1);
  v.evidence = std::move(quotient_terms);
  v.evidence_offset = 1;
  v.stats.emplace_back("partial_sum_quotients", double(s1));
  v.stats.emplace_back("partial_sum_roots", double(s2));
  v.stats.emplace_back("block_ratio_quotients", b1.ratio);
  v.stats.emplace_back("block_ratio_roots", b2.ratio);
  if (b1.diverges == Verdict::fails && b2.diverges == Verdict::fails)
    v.holds = Verdict::holds;  // both sums plateau: non-quasianalytic
  else if (b1.diverges == Verdict::holds && b2.diverges == Verdict::holds)
    v.holds = Verdict::fails;  // both sums keep growing: quasianalytic
  else
    v.note = "quotient and root tests disagree or are individually inconclusive";
  return v;
}

// (m_j)^{2C} <= D h^j m_{Cj}; C = 1 degenerates to the pointwise square
// condition (m_j)^2 <= C h^j m_j, i.e. sup (m_j)^{1/j} finite.
inline ConditionVerdict check_mixed(const WeightSequence& W, std::size_t C,
                                    std::string condition_id) {
  if (C < 1) throw std::invalid_argument(condition_id + ": need C >= 1");
  const std::size_t jmax = W.order() / C;
  if (jmax < 16)
    throw std::invalid_argument(condition_id +
                                ": evidence range too short at this truncation");
  ConditionVerdict v;
  v.condition = std::move(condition_id);
  v.evidence.resize(jmax);
  v.evidence_offset = 1;
  for (std::size_t j = 1; j <= jmax; ++j)
    v.evidence[j - 1] =
        (2.0 * double(C) * W.log_m(j) - W.log_m(C * j)) / double(j);
  auto trend = classify_sup_trend(v.evidence, 1);
  v.holds = trend.verdict;
  v.window = trend.stats;
  const double max_defect =
      *std::max_element(v.evidence.begin(), v.evidence.end());
  v.stats.emplace_back("max_defect", max_defect);
  if (v.holds == Verdict::holds) {
    const double log_h = std::max(0.0, max_defect);
    v.certificate.h = std::exp(log_h);
    v.certificate.D = 1.0;
    bool ok = true;
    for (std::size_t j = 1; j <= jmax && ok; ++j)
      ok = 2.0 * double(C) * W.log_m(j) - W.log_m(C * j) <=
           double(j) * log_h + 1e-12;
    v.certificate.rechecked = ok;
  }
  return v;
}

// ((M_j)^{1/j})^2 <= C1 * j * (M_{Cj})^{1/(Cj)} for the given constants,
// checked exactly on the evidence range, plus the domination apparatus:
// locate the least q with q*C*C1 < (M_q)^{1/q} and compare the geometric
// sum of (qCC1/(M_q)^{1/q})^{2^k} against the tail of sum (M_j)^{-1/j}.
inline ConditionVerdict check_root_square(const WeightSequence& W,
                                          std::size_t C, double C1) {
  if (C < 1) throw std::invalid_argument("root-square: need C >= 1");
  if (!(C1 >= 1.0)) throw std::invalid_argument("root-square: need C1 >= 1");
  const std::size_t J = W.order();
  const std::size_t jmax = J / C;
  if (jmax < 16)
    throw std::invalid_argument(
        "root-square: evidence range too short at this truncation");

  ConditionVerdict v;
  {
    std::ostringstream os;
    os << "root-square(C=" << C << ",C1=" << C1 << ")";
    v.condition = os.str();
  }
  v.evidence.resize(jmax);
  v.evidence_offset = 1;
  bool all_ok = true;
  for (std::size_t j = 1; j <= jmax; ++j) {
    const double d = 2.0 * W.log_M(j) / double(j) - std::log(C1) -
                     std::log(double(j)) - W.log_M(C * j) / double(C * j);
    v.evidence[j - 1] = d;
    all_ok = all_ok && d <= 1e-12;
  }
  v.holds = all_ok ? Verdict::holds : Verdict::fails;
  v.window = classify_sup_trend(v.evidence, 1).stats;
  if (all_ok) {
    v.certificate.C = double(C);
    v.certificate.C1 = C1;
    v.certificate.rechecked = true;
  }

  // Hypothesis behind the domination argument: sup (m_j)^{1/j} infinite,
  // i.e. the pointwise square condition fails.
  std::vector<double> pw(J);
  for (std::size_t j = 1; j <= J; ++j) pw[j - 1] = W.log_m(j) / double(j);
  const Verdict pointwise = classify_sup_trend(pw, 1).verdict;
  const bool hypothesis_present = pointwise == Verdict::fails;
  v.stats.emplace_back("root_growth_unbounded",
                       pointwise == Verdict::fails  ? 1.0
                       : pointwise == Verdict::holds ? 0.0
                                                     : 0.5);

  std::optional<std::size_t> q;
  for (std::size_t cand = 1; cand <= jmax; ++cand) {
    const double lhs = std::log(double(cand)) + std::log(double(C)) +
                       std::log(C1) - W.log_M(cand) / double(cand);
    if (lhs < 0.0) {
      q = cand;
      break;
    }
  }
  if (q) {
    const double r = std::exp(std::log(double(*q)) + std::log(double(C)) +
                              std::log(C1) - W.log_M(*q) / double(*q));
    long double geometric = 0.0L;
    for (double e = 1.0; ; e *= 2.0) {
      const long double term = std::pow((long double)r, (long double)e);
      geometric += term;
      if (term < 1e-300L) break;
    }
    long double tail = 0.0L;
    for (std::size_t j = *q; j <= J; ++j)
      tail += std::exp(-W.log_M(j) / double(j));
    v.stats.emplace_back("q", double(*q));
    v.stats.emplace_back("contraction_ratio", r);
    v.stats.emplace_back("geometric_bound", double(geometric));
    v.stats.emplace_back("tail_sum", double(tail));
    if (geometric >= tail) {
      v.note = "geometric bound dominates the computed root tail";
    } else {
      v.note = "geometric bound does NOT dominate the computed root tail";
      v.holds = all_ok ? Verdict::inconclusive : v.holds;
    }
  } else {
    v.note = hypothesis_present
                 ? "no admissible q at this truncation despite unbounded root growth"
                 : "no admissible q: the unbounded-root-growth hypothesis is "
                   "not in evidence, so the domination argument does not apply";
  }
  return v;
}

}  // namespace detail

inline ConditionVerdict check_sequence_condition(
    const WeightSequence& W, SequenceCondition cond,
    SequenceConditionOptions opt = {}) {
  switch (cond) {
    case SequenceCondition::mg:
      return detail::check_mg(W);
    case SequenceCondition::nq:
      return detail::check_nq(W);
    case SequenceCondition::pointwise_square: {
      auto v = detail::check_mixed(W, 1, "pointwise-square");
      // Display form (m_j)^2 <= C h^j m_j names the constant C.
      if (v.certificate.D) {
        v.certificate.C = v.certificate.D;
        v.certificate.D.reset();
      }
      return v;
    }
    case SequenceCondition::mixed: {
      std::ostringstream os;
      os << "mixed(" << opt.C << ")";
      return detail::check_mixed(W, opt.C, os.str());
    }
    case SequenceCondition::root_square:
      return detail::check_root_square(W, opt.C, opt.C1);
  }
  throw std::logic_error("unreachable");
}

}  // namespace carleman
