#pragma once

// Truncated weighted formal power series.  Coefficients live in scaled
// (phase, log magnitude) form so entries far beyond floating range stay
// exact; on top of that sit the Cauchy and Hadamard products, weighted
// sup-norms against a weight sequence, Carleman-class membership
// classification, the theta construction realizing a sequence as
// explicit derivative growth, and the positivity / solid-hull reports.

#include <carleman/matrix.hpp>
#include <carleman/parallel.hpp>
#include <carleman/scaled.hpp>
#include <carleman/sequence.hpp>
#include <carleman/trend.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace carleman {

// ---------------------------------------------------------------------------
// Power series at a fixed truncation J (indices 0..J).

class PowerSeries {
 public:
  explicit PowerSeries(std::vector<Coefficient> coeffs)
      : coeffs_(std::move(coeffs)) {
    if (coeffs_.empty())
      throw std::invalid_argument("power series: need at least the constant term");
    for (const Coefficient& c : coeffs_) {
      if (c.is_zero()) continue;
      if (!std::isfinite(c.log_mag) ||
          std::abs(std::abs(c.phase) - 1.0) > 1e-9)
        throw std::invalid_argument(
            "power series: nonzero coefficients need a unit phase and a finite "
            "log magnitude");
    }
  }

  static PowerSeries zero(std::size_t J) {
    return PowerSeries(std::vector<Coefficient>(J + 1));
  }

  // Identity for the Cauchy product: (1, 0, 0, ...).
  static PowerSeries one(std::size_t J) {
    std::vector<Coefficient> c(J + 1);
    c[0] = Coefficient::from_real(1.0);
    return PowerSeries(std::move(c));
  }

  // Identity for the Hadamard product: all coefficients 1.
  static PowerSeries all_ones(std::size_t J) {
    std::vector<Coefficient> c(J + 1, Coefficient::from_real(1.0));
    return PowerSeries(std::move(c));
  }

  static PowerSeries from_reals(std::span<const double> values) {
    std::vector<Coefficient> c(values.size());
    for (std::size_t j = 0; j < values.size(); ++j)
      c[j] = Coefficient::from_real(values[j]);
    return PowerSeries(std::move(c));
  }

  std::size_t order() const { return coeffs_.size() - 1; }  // truncation J
  const Coefficient& operator[](std::size_t j) const { return coeffs_[j]; }
  const std::vector<Coefficient>& coefficients() const { return coeffs_; }

  std::vector<std::size_t> support() const {
    std::vector<std::size_t> s;
    for (std::size_t j = 0; j < coeffs_.size(); ++j)
      if (!coeffs_[j].is_zero()) s.push_back(j);
    return s;
  }

 private:
  std::vector<Coefficient> coeffs_;
};

namespace detail {

inline void require_same_order(std::size_t a, std::size_t b, const char* what) {
  if (a != b) {
    std::ostringstream os;
    os << what << ": truncation mismatch (J=" << a << " vs J=" << b << ")";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Arithmetic.

inline PowerSeries operator+(const PowerSeries& f, const PowerSeries& g) {
  detail::require_same_order(f.order(), g.order(), "series sum");
  std::vector<Coefficient> h(f.order() + 1);
  for (std::size_t j = 0; j <= f.order(); ++j)
    h[j] = sum_coefficients({f[j], g[j]});
  return PowerSeries(std::move(h));
}

// H_j = sum_{r <= j} F_r G_{j-r}.  Cells are independent; within a cell
// the terms are accumulated left to right (r ascending) so the result
// is schedule-independent.
inline PowerSeries cauchy_product(const PowerSeries& f, const PowerSeries& g) {
  detail::require_same_order(f.order(), g.order(), "cauchy product");
  const std::size_t J = f.order();
  std::vector<Coefficient> h(J + 1);
  parallel_for(0, J + 1, [&](std::size_t j) {
    std::vector<Coefficient> cell(j + 1);
    for (std::size_t r = 0; r <= j; ++r) cell[r] = f[r] * g[j - r];
    h[j] = sum_coefficients(cell);
  });
  return PowerSeries(std::move(h));
}

inline PowerSeries hadamard_product(const PowerSeries& f, const PowerSeries& g) {
  detail::require_same_order(f.order(), g.order(), "hadamard product");
  std::vector<Coefficient> h(f.order() + 1);
  for (std::size_t j = 0; j <= f.order(); ++j) h[j] = f[j] * g[j];
  return PowerSeries(std::move(h));
}

// Unit series S with S_j the conjugate phase of F_j, so F (.) S = |F|.
inline PowerSeries phase_conjugates(const PowerSeries& f) {
  std::vector<Coefficient> s(f.order() + 1);
  for (std::size_t j = 0; j <= f.order(); ++j)
    s[j] = Coefficient{std::conj(f[j].phase), 0.0};
  return PowerSeries(std::move(s));
}

// ---------------------------------------------------------------------------
// Weighted sup-norm: log of sup_j |F_j| j! / (h^j M_j).  The zero series
// has log-norm -infinity.  The geometric factor is also accepted in log
// form so certificates with h beyond floating range stay usable.

inline double weighted_log_norm_scaled(const PowerSeries& f,
                                       const WeightSequence& M, double log_h) {
  detail::require_same_order(f.order(), M.order(), "weighted norm");
  if (!std::isfinite(log_h))
    throw std::invalid_argument("weighted norm: log h must be finite");
  double sup = neg_infinity;
  for (std::size_t j = 0; j <= f.order(); ++j) {
    if (f[j].is_zero()) continue;
    sup = std::max(sup, f[j].log_mag + log_factorial(j) -
                            double(j) * log_h - M.log_M(j));
  }
  return sup;
}

inline double weighted_log_norm(const PowerSeries& f, const WeightSequence& M,
                                double h) {
  if (!(h > 0.0) || !std::isfinite(h))
    throw std::invalid_argument("weighted norm: h must be a positive real");
  return weighted_log_norm_scaled(f, M, std::log(h));
}

// ---------------------------------------------------------------------------
// Membership in the Roumieu / Beurling classes attached to M.
//
// The per-index witness is h_j = (logmag_j + log j! - logM_j)/j over the
// support: bounded above (trend) means some geometric factor h works
// (Roumieu); drifting to -infinity means every h works (Beurling).

// Trend window for support-compressed evidence: sparse series keep only
// their support indices, so the window opens immediately and eight
// points per half suffice.
inline constexpr TrendOptions membership_trend{0, 0.05, 8, true};

struct MembershipReport {
  Verdict roumieu = Verdict::inconclusive;
  Verdict beurling = Verdict::inconclusive;
  std::optional<double> log_h;      // realized sup_j h_j when Roumieu holds
  std::optional<double> lambda;     // matrix variant: first row carrying Roumieu
  std::vector<double> evidence;     // h_j over the support, compressed
  std::vector<std::size_t> support; // indices the evidence came from (j >= 1)
  TrendReport roumieu_trend;        // sup protocol on the evidence
  TrendReport beurling_trend;       // decay protocol on the evidence
  std::string note;
};

inline MembershipReport classify_membership(const PowerSeries& f,
                                            const WeightSequence& M) {
  detail::require_same_order(f.order(), M.order(), "membership");
  if (f.order() < 32)
    throw std::invalid_argument("membership: need truncation J >= 32");

  MembershipReport rep;
  for (std::size_t j = 1; j <= f.order(); ++j) {
    if (f[j].is_zero()) continue;
    rep.support.push_back(j);
    rep.evidence.push_back(
        (f[j].log_mag + log_factorial(j) - M.log_M(j)) / double(j));
  }
  if (rep.evidence.empty()) {
    rep.roumieu = rep.beurling = Verdict::holds;
    rep.log_h = 0.0;
    rep.note = "series vanishes beyond the constant term; membership is trivial";
    return rep;
  }

  rep.roumieu_trend = classify_sup_trend(rep.evidence, 0, membership_trend);
  rep.beurling_trend = classify_decay_trend(rep.evidence, 0, membership_trend);
  rep.roumieu = rep.roumieu_trend.verdict;
  rep.beurling = rep.beurling_trend.verdict;
  if (rep.roumieu == Verdict::holds)
    rep.log_h = *std::max_element(rep.evidence.begin(), rep.evidence.end());
  if (!rep.roumieu_trend.stats.usable)
    rep.note = "support carries fewer points than the trend window";
  return rep;
}

// Matrix classes: Roumieu is the union over rows (some row admits F),
// Beurling the intersection (every row admits F for every h).
inline MembershipReport classify_membership(const PowerSeries& f,
                                            const WeightMatrix& mx) {
  MembershipReport rep;
  bool any_roumieu_open = false;  // some row inconclusive
  bool all_beurling = true;
  bool any_beurling_open = false;
  std::ostringstream notes;
  for (std::size_t i = 0; i < mx.row_count(); ++i) {
    const auto& row = mx.row(i);
    MembershipReport r = classify_membership(f, row.sequence);
    if (i == 0) {
      rep.evidence = r.evidence;
      rep.support = r.support;
      rep.roumieu_trend = r.roumieu_trend;
      rep.beurling_trend = r.beurling_trend;
    }
    if (i) notes << "; ";
    notes << WeightMatrix::row_name(row.lambda) << ": roumieu "
          << to_string(r.roumieu) << ", beurling " << to_string(r.beurling);
    if (r.roumieu == Verdict::holds && rep.roumieu != Verdict::holds) {
      rep.roumieu = Verdict::holds;
      rep.lambda = row.lambda;
      rep.log_h = r.log_h;
      rep.evidence = r.evidence;
      rep.support = r.support;
      rep.roumieu_trend = r.roumieu_trend;
    }
    if (r.roumieu == Verdict::inconclusive) any_roumieu_open = true;
    if (r.beurling != Verdict::holds) all_beurling = false;
    if (r.beurling == Verdict::inconclusive) any_beurling_open = true;
  }
  if (rep.roumieu != Verdict::holds)
    rep.roumieu = any_roumieu_open ? Verdict::inconclusive : Verdict::fails;
  rep.beurling = all_beurling ? Verdict::holds
                 : any_beurling_open ? Verdict::inconclusive
                                     : Verdict::fails;
  rep.note = notes.str();
  return rep;
}

// ---------------------------------------------------------------------------
// Realized Roumieu certificate: constants (C, h) with |F|^M_h <= C read
// off the support scan.  h covers the growth of every index >= 1, C the
// constant term; both clamped at 1 so the pair is a genuine bound.

struct SeriesBound {
  double log_C = 0.0;
  double log_h = 0.0;
};

inline SeriesBound realize_roumieu_certificate(const PowerSeries& f,
                                               const WeightSequence& M) {
  detail::require_same_order(f.order(), M.order(), "roumieu certificate");
  SeriesBound b;
  for (std::size_t j = 1; j <= f.order(); ++j) {
    if (f[j].is_zero()) continue;
    b.log_h = std::max(
        b.log_h, (f[j].log_mag + log_factorial(j) - M.log_M(j)) / double(j));
  }
  if (!f[0].is_zero())
    b.log_C = std::max(b.log_C, f[0].log_mag - M.log_M(0));
  return b;
}

// ---------------------------------------------------------------------------
// Theta construction: for log-convex M the series with coefficients
// i^j s_j / j!, where s_j = sum_{k <= K} M_k (2 mu_k)^{j-k}, has
// derivative growth exactly comparable to M (s_j >= M_j, the k = j term
// alone contributing M_j).  mu_0 enters only through its k = 0 term and
// is taken as 1.

struct ThetaExpansion {
  PowerSeries series;          // coefficients i^j s_j / j!
  std::vector<double> log_s;   // log s_j for j = 0..J
  std::size_t K;               // inner cutoff actually used
  double tail_log_margin;      // relative truncation tail <= e^{this}: (J-K) log 2
};

inline ThetaExpansion theta_series(const WeightSequence& M, std::size_t J,
                                   std::size_t K) {
  if (K < J + 64)
    throw std::invalid_argument(
        "theta series: need K >= J + 64 for the certified tail bound");
  if (K > M.order())
    throw std::invalid_argument(
        "theta series: K exceeds the sequence truncation");
  if (!validate_weight_sequence(M).log_convex)
    throw std::invalid_argument("theta series: sequence must be log-convex");

  const double log2 = std::log(2.0);
  std::vector<double> log_s(J + 1);
  parallel_for(0, J + 1, [&](std::size_t j) {
    std::vector<double> terms(K + 1);
    for (std::size_t k = 0; k <= K; ++k) {
      const double log_mu = k == 0 ? 0.0 : M.log_mu(k);
      terms[k] =
          M.log_M(k) + (double(j) - double(k)) * (log2 + log_mu);
    }
    log_s[j] = log_sum_exp(terms);
  });

  std::vector<Coefficient> coeffs(J + 1);
  for (std::size_t j = 0; j <= J; ++j) {
    if (log_s[j] < M.log_M(j))
      throw std::logic_error("theta series: dominance s_j >= M_j lost");
    static constexpr std::complex<double> unit_powers[4] = {
        {1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    coeffs[j] = Coefficient::from_log(log_s[j] - log_factorial(j),
                                      unit_powers[j % 4]);
  }
  return ThetaExpansion{PowerSeries(std::move(coeffs)), std::move(log_s), K,
                        (double(J) - double(K)) * log2};
}

// ---------------------------------------------------------------------------
// Positivity obstruction: a series with strictly positive real
// coefficients whose root growth (logmag_j)/j is unbounded above cannot
// be the germ of a real analytic function, and stays outside every
// quasianalytic class.

struct PositivityReport {
  bool flagged = false;
  bool positive_real = false;           // every F_j real and > 0 up to J
  Verdict growth = Verdict::inconclusive;  // sup trend of (logmag_j)/j
  std::vector<double> evidence;         // (logmag_j)/j for j = 1..J
  std::string note;
};

inline PositivityReport positivity_obstruction(const PowerSeries& f) {
  PositivityReport rep;
  rep.positive_real = true;
  for (std::size_t j = 0; j <= f.order(); ++j) {
    if (f[j].is_zero() || f[j].phase.real() <= 0.0 ||
        std::abs(f[j].phase.imag()) > 1e-12) {
      rep.positive_real = false;
      rep.note = "a coefficient is zero, negative, or non-real";
      return rep;
    }
  }
  rep.evidence.resize(f.order());
  for (std::size_t j = 1; j <= f.order(); ++j)
    rep.evidence[j - 1] = f[j].log_mag / double(j);
  const TrendReport trend = classify_sup_trend(rep.evidence, 1);
  rep.growth = trend.verdict;
  // Unbounded root growth is the sup protocol failing.
  rep.flagged = rep.growth == Verdict::fails;
  if (rep.growth == Verdict::inconclusive)
    rep.note = "root-growth trend inconclusive at this truncation";
  return rep;
}

// ---------------------------------------------------------------------------
// Product norm bounds.
//
// Cauchy: when M_j M_k <= C^{j+k} M_{j+k} (realized by a pair scan), the
// convolution of |F|^M_{h1} <= C1 and |G|^M_{h2} <= C2 obeys
// |F*G|^M_{C(h1+h2)} <= C1 C2.
//
// Hadamard: with rows lambda_1, lambda_2 of a matrix and a Roumieu
// square certificate (m^(lambda3))^2 <= C3 h3^j m^(kappa) at
// lambda3 = max(lambda1, lambda2), the componentwise product obeys
// |F.G|^{M^(kappa)}_{h1 h2 h3} <= C1 C2 C3.

struct ProductBoundReport {
  bool holds = false;
  double log_norm = neg_infinity;   // realized product norm (log)
  double log_budget = 0.0;          // log(C1 C2 [C3])
  double defect = 0.0;              // log_norm - log_budget
  double log_h = 0.0;               // geometric factor used for the product norm
  double log_C_structure = 0.0;     // cauchy: algebra constant C; hadamard: C3
  std::optional<double> kappa;      // hadamard: dominating row
  std::string note;
};

namespace detail {

inline void require_bound(const PowerSeries& f, const WeightSequence& M,
                          const std::optional<SeriesBound>& b,
                          const char* what, const char* which) {
  if (!b) {
    std::ostringstream os;
    os << what << ": missing certificate for the " << which << " factor";
    throw std::invalid_argument(os.str());
  }
  if (weighted_log_norm_scaled(f, M, b->log_h) > b->log_C + 1e-9) {
    std::ostringstream os;
    os << what << ": certificate does not bound the " << which << " factor";
    throw std::invalid_argument(os.str());
  }
}

}  // namespace detail

inline ProductBoundReport check_product_norm_bound(
    const PowerSeries& f, const PowerSeries& g, const WeightSequence& M,
    const std::optional<SeriesBound>& f_bound,
    const std::optional<SeriesBound>& g_bound) {
  detail::require_same_order(f.order(), g.order(), "cauchy bound");
  detail::require_bound(f, M, f_bound, "cauchy bound", "first");
  detail::require_bound(g, M, g_bound, "cauchy bound", "second");

  ProductBoundReport rep;
  // Realize the algebra constant: C = exp(max (logM_j + logM_k - logM_{j+k})
  // / (j+k)) over interior pairs, clamped at 1.
  const auto& lm = M.log_M();
  for (std::size_t j = 1; j + 1 <= M.order(); ++j)
    for (std::size_t k = j; j + k <= M.order(); ++k)
      rep.log_C_structure =
          std::max(rep.log_C_structure,
                   (lm[j] + lm[k] - lm[j + k]) / double(j + k));

  rep.log_h = rep.log_C_structure + log_add(f_bound->log_h, g_bound->log_h);
  rep.log_norm = weighted_log_norm_scaled(cauchy_product(f, g), M, rep.log_h);
  rep.log_budget = f_bound->log_C + g_bound->log_C;
  rep.defect = rep.log_norm - rep.log_budget;
  rep.holds = rep.defect <= 1e-9;
  return rep;
}

inline ProductBoundReport check_product_norm_bound(
    const PowerSeries& f, const PowerSeries& g, const WeightMatrix& mx,
    double lambda_f, double lambda_g,
    const std::optional<SeriesBound>& f_bound,
    const std::optional<SeriesBound>& g_bound) {
  detail::require_same_order(f.order(), g.order(), "hadamard bound");
  detail::require_same_order(f.order(), mx.order(), "hadamard bound");
  const auto if_ = mx.find(lambda_f);
  const auto ig = mx.find(lambda_g);
  if (!if_ || !ig)
    throw std::invalid_argument(
        "hadamard bound: certificate rows must be rows of the matrix");
  detail::require_bound(f, mx.row(*if_).sequence, f_bound, "hadamard bound",
                        "first");
  detail::require_bound(g, mx.row(*ig).sequence, g_bound, "hadamard bound",
                        "second");

  // Square certificate at lambda3 = max(lambda1, lambda2).
  const std::size_t i3 = std::max(*if_, *ig);
  MatrixConditionOptions opt;
  std::string notes;
  const detail::RowSquareOutcome sq =
      detail::examine_square_row(mx, i3, /*roumieu=*/true, /*big=*/false, opt,
                                 notes);
  if (sq.verdict != Verdict::holds || !sq.kappa)
    throw std::invalid_argument(
        "hadamard bound: no roumieu-square certificate at " +
        WeightMatrix::row_name(mx.row(i3).lambda));

  const WeightSequence target = [&] {
    if (auto idx = mx.find(*sq.kappa)) return mx.row(*idx).sequence;
    return mx.generate_row(*sq.kappa);
  }();

  ProductBoundReport rep;
  rep.kappa = sq.kappa;
  rep.log_C_structure = sq.log_C;
  rep.log_h = f_bound->log_h + g_bound->log_h + sq.log_h;
  rep.log_norm =
      weighted_log_norm_scaled(hadamard_product(f, g), target, rep.log_h);
  rep.log_budget = f_bound->log_C + g_bound->log_C + sq.log_C;
  rep.defect = rep.log_norm - rep.log_budget;
  rep.holds = rep.defect <= 1e-9;
  rep.note = notes;
  return rep;
}

// ---------------------------------------------------------------------------
// Solid hull witness: from |F|^M_h <= C build G = C * theta_{(h^j M_j)}
// whose coefficient magnitudes dominate |F_j| term by term, giving an
// explicit function whose derivative sequence majorizes F.

struct SolidHullWitness {
  PowerSeries series;          // the dominating series G
  std::vector<double> log_s;   // log s_j of the rescaled theta expansion
  std::size_t K;               // inner cutoff used by the expansion
  double min_log_margin;       // min over support of log|G_j| - log|F_j|
  bool dominates;              // margin >= -1e-9
};

inline SolidHullWitness solid_hull_witness(
    const PowerSeries& f, const WeightSequence& M,
    const std::optional<SeriesBound>& bound) {
  if (!bound)
    throw std::invalid_argument("solid hull witness: missing certificate");
  const std::size_t J = f.order();
  const std::size_t K = J + 64;
  if (M.order() < K)
    throw std::invalid_argument(
        "solid hull witness: sequence truncation must reach J + 64");

  // Recheck the premise against the aligned prefix of M.
  std::vector<double> head(M.log_M().begin(), M.log_M().begin() + J + 1);
  detail::require_bound(f, WeightSequence::custom(std::move(head)), bound,
                        "solid hull witness", "dominated");

  std::vector<double> rescaled(K + 1);
  for (std::size_t j = 0; j <= K; ++j)
    rescaled[j] = double(j) * bound->log_h + M.log_M(j);
  ThetaExpansion theta =
      theta_series(WeightSequence::custom(std::move(rescaled)), J, K);

  std::vector<Coefficient> g(J + 1);
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t j = 0; j <= J; ++j) {
    g[j] = theta.series[j].scaled(bound->log_C);
    if (!f[j].is_zero()) margin = std::min(margin, g[j].log_mag - f[j].log_mag);
  }
  SolidHullWitness w{PowerSeries(std::move(g)), std::move(theta.log_s), K,
                     margin, margin >= -1e-9};
  return w;
}

// ---------------------------------------------------------------------------
// Solid core report: a series flagged by the positivity obstruction that
// also sits outside the analytic Roumieu class (weights (j!)_j) cannot
// be the modulus pattern of any restriction-algebra element.

struct SolidCoreReport {
  PositivityReport positivity;
  MembershipReport analytic;   // membership against (j!)_j
  bool non_representable = false;
  std::string note;
};

inline SolidCoreReport classify_representability(const PowerSeries& f) {
  SolidCoreReport rep;
  rep.positivity = positivity_obstruction(f);
  rep.analytic = classify_membership(f, WeightSequence::factorial(f.order()));
  rep.non_representable = rep.positivity.flagged &&
                          rep.analytic.roumieu == Verdict::fails;
  rep.note = rep.non_representable
                 ? "positive coefficients with super-analytic growth: no "
                   "representing germ exists"
                 : "";
  return rep;
}

}  // namespace carleman
