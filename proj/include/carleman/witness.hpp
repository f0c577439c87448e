#pragma once

// Algebrability witnesses: gap sequences, finite exponent bases standing
// in for a Hamel basis, the lacunary generator series F^b, algebra
// elements expanded two independent ways (closed formulas vs repeated
// products), and the partial-sum divergence diagnostic that feeds the
// representation-formula criterion.

#include <carleman/matrix.hpp>
#include <carleman/scaled.hpp>
#include <carleman/sequence.hpp>
#include <carleman/series.hpp>
#include <carleman/trend.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace carleman {

// ---------------------------------------------------------------------------
// Summation weights.  The representation formula guarantees numbers
// omega_{j,k} -> 1 exist but gives no construction, so the evaluation
// rule is pluggable; the trivial oracle (identically 1) is the default
// and makes every correction term exactly zero.

class SummationWeightOracle {
 public:
  static SummationWeightOracle trivial() { return SummationWeightOracle{}; }

  static SummationWeightOracle from_function(
      std::function<double(std::size_t, std::size_t)> fn) {
    SummationWeightOracle o;
    o.fn_ = std::move(fn);
    return o;
  }

  bool is_trivial() const { return !fn_; }

  double operator()(std::size_t j, std::size_t k) const {
    return fn_ ? fn_(j, k) : 1.0;
  }

 private:
  std::function<double(std::size_t, std::size_t)> fn_;
};

// ---------------------------------------------------------------------------
// Gap sequences k_0 < k_1 < ... with the variant-specific recurrence:
// the convolution construction needs k_p > p k_{p-1}, the componentwise
// one only strict growth.

enum class GapVariant { cauchy, hadamard };

constexpr std::string_view to_string(GapVariant v) noexcept {
  return v == GapVariant::cauchy ? "cauchy" : "hadamard";
}

class GapSequence {
 public:
  static GapSequence from_indices(std::vector<std::size_t> k, GapVariant v) {
    if (k.empty() || k.front() != 1)
      throw std::invalid_argument("gap sequence: k_0 must be 1");
    for (std::size_t p = 1; p < k.size(); ++p) {
      if (k[p] <= recurrence_floor(v, p, k[p - 1])) {
        std::ostringstream os;
        os << "gap sequence: k_" << p << "=" << k[p]
           << " violates the " << to_string(v) << " recurrence";
        throw std::invalid_argument(os.str());
      }
    }
    GapSequence g;
    g.k_ = std::move(k);
    g.variant_ = v;
    return g;
  }

  GapVariant variant() const { return variant_; }
  std::size_t steps() const { return k_.size() - 1; }  // P
  std::size_t operator[](std::size_t p) const { return k_[p]; }
  const std::vector<std::size_t>& indices() const { return k_; }
  std::size_t back() const { return k_.back(); }

  // Exclusive lower bound for k_p given k_{p-1}.
  static std::size_t recurrence_floor(GapVariant v, std::size_t p,
                                      std::size_t prev) {
    return v == GapVariant::cauchy ? p * prev : prev;
  }

  // Upper limit of the oracle / correction sums at step p.
  std::size_t correction_limit(std::size_t p) const {
    return variant_ == GapVariant::cauchy ? p * k_[p - 1] : k_[p - 1];
  }

 private:
  GapSequence() = default;
  std::vector<std::size_t> k_;
  GapVariant variant_ = GapVariant::cauchy;
};

// Growth thresholds for the gap search.  Unset: the default schedule
// T_p = p.  An explicit empty list disables the growth condition and
// leaves the bare recurrence (the minimal admissible sequence).
struct GapSearchOptions {
  std::optional<std::vector<double>> thresholds;
  std::size_t cap = std::size_t(1) << 40;  // search ceiling (truncation also caps)
};

namespace detail {

// log n_k for the sequence variant (n_j = N_j / j!) or the matrix
// variant, which reads step p from the row lambda = 1/(p+1).
inline double witness_log_n(const WeightSequence& N, std::size_t,
                            std::size_t k) {
  return N.log_m(k);
}

inline const WeightSequence& witness_row(const WeightMatrix& mx, std::size_t p,
                                         std::vector<std::optional<WeightSequence>>& cache) {
  if (p >= cache.size()) cache.resize(p + 1);
  if (!cache[p]) {
    const double lambda = 1.0 / double(p + 1);
    if (auto idx = mx.find(lambda)) {
      cache[p] = mx.row(*idx).sequence;
    } else if (mx.has_generator()) {
      cache[p] = mx.generate_row(lambda);
    } else {
      std::ostringstream os;
      os << "witness: matrix needs row " << WeightMatrix::row_name(lambda)
         << " or a generator";
      throw std::invalid_argument(os.str());
    }
  }
  return *cache[p];
}

template <typename LogN>
GapSequence search_gap_sequence(LogN&& log_n, std::size_t truncation,
                                std::size_t P, GapVariant variant,
                                const SummationWeightOracle& oracle,
                                const GapSearchOptions& opt) {
  std::vector<double> thresholds;
  if (opt.thresholds) {
    thresholds = *opt.thresholds;
  } else {
    for (std::size_t p = 1; p <= P; ++p) thresholds.push_back(double(p));
  }
  if (!thresholds.empty() && thresholds.size() < P)
    throw std::invalid_argument("gap sequence: need a threshold for every step");
  for (std::size_t i = 1; i < thresholds.size(); ++i)
    if (thresholds[i] <= thresholds[i - 1])
      throw std::invalid_argument("gap sequence: thresholds must increase");

  const std::size_t cap = std::min(opt.cap, truncation);
  std::vector<std::size_t> k{1};
  for (std::size_t p = 1; p <= P; ++p) {
    const std::size_t floor = GapSequence::recurrence_floor(variant, p, k[p - 1]);
    const double log_T = thresholds.empty() ? neg_infinity
                                            : std::log(thresholds[p - 1]);
    std::optional<std::size_t> found;
    for (std::size_t cand = floor + 1; cand <= cap; ++cand) {
      if (!thresholds.empty() && log_n(p, cand) < double(cand) * log_T)
        continue;
      if (!oracle.is_trivial()) {
        // Condition: sum_{j <= limit} |omega_{j,cand} - 1| n_j <= 1.
        const std::size_t limit =
            variant == GapVariant::cauchy ? p * k[p - 1] : k[p - 1];
        std::vector<double> terms;
        terms.reserve(limit + 1);
        for (std::size_t j = 0; j <= limit; ++j) {
          const double dev = std::abs(oracle(j, cand) - 1.0);
          if (dev > 0.0) terms.push_back(std::log(dev) + log_n(p, j));
        }
        if (log_sum_exp(terms) > 1e-12) continue;
      }
      found = cand;
      break;
    }
    if (!found) {
      std::ostringstream os;
      os << "gap sequence: no admissible k for p=" << p;
      if (!thresholds.empty()) os << " (threshold T=" << thresholds[p - 1]
                                  << ", searched k <= " << cap << ")";
      else os << " (searched k <= " << cap << ")";
      throw std::invalid_argument(os.str());
    }
    k.push_back(*found);
  }
  return GapSequence::from_indices(std::move(k), variant);
}

}  // namespace detail

inline GapSequence build_gap_sequence(const WeightSequence& N, std::size_t P,
                                      GapVariant variant,
                                      const SummationWeightOracle& oracle = {},
                                      const GapSearchOptions& opt = {}) {
  return detail::search_gap_sequence(
      [&](std::size_t, std::size_t k) { return N.log_m(k); }, N.order(), P,
      variant, oracle, opt);
}

inline GapSequence build_gap_sequence(const WeightMatrix& mx, std::size_t P,
                                      GapVariant variant,
                                      const SummationWeightOracle& oracle = {},
                                      const GapSearchOptions& opt = {}) {
  std::vector<std::optional<WeightSequence>> cache;
  return detail::search_gap_sequence(
      [&](std::size_t p, std::size_t k) {
        return detail::witness_row(mx, p, cache).log_m(k);
      },
      mx.order(), P, variant, oracle, opt);
}

// ---------------------------------------------------------------------------
// Exponent bases: scaled square roots of distinct primes inside (A, B),
// the finite desk-scale stand-in for a Hamel basis.  Certified by
// enumerating every integer combination of degree <= D and measuring
// the smallest pairwise distance.

struct ExponentBasis {
  std::vector<double> values;           // b_i = sqrt(p_i) / 2^{t_i}
  std::vector<std::string> provenance;  // "sqrt(p)/2^t"
  double lower = 0.0, upper = 0.0;      // the interval (A, B)
  std::size_t degree = 0;               // certified combination degree D
  double min_gap = 0.0;                 // smallest distance among combos
};

inline ExponentBasis build_exponent_basis(std::size_t count, double A,
                                          double B, std::size_t degree) {
  static constexpr unsigned primes[8] = {2, 3, 5, 7, 11, 13, 17, 19};
  if (!(0.0 < A && A < B && B < 1.0))
    throw std::invalid_argument("exponent basis: need 0 < A < B < 1");
  if (count < 1 || count > 8)
    throw std::invalid_argument("exponent basis: need 1 <= count <= 8");
  if (degree < 1 || degree > 6)
    throw std::invalid_argument("exponent basis: need 1 <= degree <= 6");

  ExponentBasis basis;
  basis.lower = A;
  basis.upper = B;
  basis.degree = degree;
  const double mid = 0.5 * (A + B);
  for (std::size_t i = 0; i < count; ++i) {
    const double root = std::sqrt(double(primes[i]));
    int t = int(std::ceil(std::log2(root / mid)));
    double b = std::ldexp(root, -t);
    // Nudge one step either way if the midpoint rounding left (A, B).
    if (b >= B) b = std::ldexp(root, -(++t));
    if (b <= A) b = std::ldexp(root, -(--t));
    if (!(A < b && b < B)) {
      std::ostringstream os;
      os << "exponent basis: no power-of-two scaling places sqrt("
         << primes[i] << ") in (" << A << ", " << B << ")";
      throw std::invalid_argument(os.str());
    }
    basis.values.push_back(b);
    std::ostringstream name;
    name << "sqrt(" << primes[i] << ")/" << std::ldexp(1.0, t);
    basis.provenance.push_back(name.str());
  }

  // Enumerate all combinations sum_m i_m b_m with 0 <= i_m <= degree.
  std::vector<double> combos;
  std::vector<std::size_t> odo(count, 0);
  for (;;) {
    double v = 0.0;
    for (std::size_t m = 0; m < count; ++m) v += double(odo[m]) * basis.values[m];
    combos.push_back(v);
    std::size_t m = 0;
    while (m < count && ++odo[m] > degree) odo[m++] = 0;
    if (m == count) break;
  }
  std::sort(combos.begin(), combos.end());
  basis.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 1; i < combos.size(); ++i)
    basis.min_gap = std::min(basis.min_gap, combos[i] - combos[i - 1]);
  if (basis.min_gap < 1e-9)
    throw std::invalid_argument(
        "exponent basis: combination gap below tolerance; choose different "
        "scalings");
  return basis;
}

// ---------------------------------------------------------------------------
// Algebra elements: finite sums of monomials alpha * x1^{i_1}...xJ^{i_J}
// in the generators, with pairwise distinct exponent tuples.

struct Monomial {
  std::complex<double> coefficient;
  std::vector<unsigned> exponents;  // one entry per generator
};

class AlgebraElement {
 public:
  explicit AlgebraElement(std::vector<Monomial> monomials)
      : monomials_(std::move(monomials)) {
    if (monomials_.empty())
      throw std::invalid_argument("algebra element: need at least one monomial");
    const std::size_t width = monomials_.front().exponents.size();
    if (width == 0)
      throw std::invalid_argument("algebra element: need at least one generator");
    for (const Monomial& m : monomials_) {
      if (m.coefficient == std::complex<double>(0.0, 0.0))
        throw std::invalid_argument("algebra element: zero coefficient");
      if (m.exponents.size() != width)
        throw std::invalid_argument(
            "algebra element: monomials must share the generator count");
      if (std::all_of(m.exponents.begin(), m.exponents.end(),
                      [](unsigned e) { return e == 0; }))
        throw std::invalid_argument(
            "algebra element: a monomial needs a positive exponent");
    }
    for (std::size_t a = 0; a < monomials_.size(); ++a)
      for (std::size_t b = a + 1; b < monomials_.size(); ++b)
        if (monomials_[a].exponents == monomials_[b].exponents)
          throw std::invalid_argument(
              "algebra element: exponent tuples must be pairwise distinct");
  }

  const std::vector<Monomial>& monomials() const { return monomials_; }
  std::size_t generator_count() const {
    return monomials_.front().exponents.size();
  }

  // P_l and P = max_l P_l.
  static std::size_t total_degree(const Monomial& m) {
    std::size_t d = 0;
    for (unsigned e : m.exponents) d += e;
    return d;
  }
  std::size_t max_total_degree() const {
    std::size_t P = 0;
    for (const Monomial& m : monomials_) P = std::max(P, total_degree(m));
    return P;
  }

 private:
  std::vector<Monomial> monomials_;
};

// ---------------------------------------------------------------------------
// Witness generators: the lacunary series with F_{k_p} = (n_{k_p})^b.

namespace detail {

template <typename LogN>
PowerSeries build_witness_impl(double b, const GapSequence& gap, LogN&& log_n,
                               std::size_t truncation) {
  if (!(b > 0.0 && b < 1.0))
    throw std::invalid_argument("witness: exponent b must lie in (0, 1)");
  if (gap.back() > truncation) {
    std::ostringstream os;
    os << "witness: gap reaches k=" << gap.back()
       << " beyond truncation J=" << truncation;
    throw std::invalid_argument(os.str());
  }
  std::vector<Coefficient> c(truncation + 1);
  for (std::size_t p = 0; p < gap.indices().size(); ++p)
    c[gap[p]] = Coefficient::from_log(b * log_n(p, gap[p]));
  return PowerSeries(std::move(c));
}

}  // namespace detail

inline PowerSeries build_witness(double b, const GapSequence& gap,
                                 const WeightSequence& N) {
  return detail::build_witness_impl(
      b, gap, [&](std::size_t, std::size_t k) { return N.log_m(k); },
      N.order());
}

inline PowerSeries build_witness(double b, const GapSequence& gap,
                                 const WeightMatrix& mx) {
  std::vector<std::optional<WeightSequence>> cache;
  return detail::build_witness_impl(
      b, gap,
      [&](std::size_t p, std::size_t k) {
        return detail::witness_row(mx, p, cache).log_m(k);
      },
      mx.order());
}

// ---------------------------------------------------------------------------
// Element expansion.  by_products multiplies the generator series out;
// closed_form overwrites every index the displayed formulas determine
// (degree-d values at d k_p and the certified gap zeros, both from
// p >= P on) and keeps the computed values elsewhere.

enum class ExpansionMethod { closed_form, by_products };

struct ElementExpansion {
  PowerSeries series;
  std::vector<bool> determined;  // closed_form: index carried by a formula
  std::size_t settle_degree;     // P = max_l P_l
  std::string note;
};

namespace detail {

inline PowerSeries scale_series(const PowerSeries& f, const Coefficient& c) {
  std::vector<Coefficient> out(f.order() + 1);
  for (std::size_t j = 0; j <= f.order(); ++j) out[j] = f[j] * c;
  return PowerSeries(std::move(out));
}

template <typename LogN>
ElementExpansion expand_element(const AlgebraElement& elem,
                                const ExponentBasis& basis,
                                const GapSequence& gap, LogN&& log_n,
                                std::size_t truncation,
                                ExpansionMethod method) {
  const std::size_t J = truncation;
  const std::size_t P = elem.max_total_degree();
  if (basis.values.size() != elem.generator_count())
    throw std::invalid_argument(
        "element expansion: basis size must match the generator count");
  for (const Monomial& m : elem.monomials())
    for (unsigned e : m.exponents)
      if (e > basis.degree)
        throw std::invalid_argument(
            "element expansion: exponent exceeds the certified basis degree");
  const bool cauchy = gap.variant() == GapVariant::cauchy;
  const std::size_t needed = cauchy ? P * gap.back() : gap.back();
  if (needed > J) {
    std::ostringstream os;
    os << "element expansion: truncation J=" << J << " too small; need J >= "
       << needed;
    throw std::invalid_argument(os.str());
  }

  // Product route: repeated convolutions / componentwise products of
  // the generator series.
  std::vector<PowerSeries> generators;
  for (double b : basis.values)
    generators.push_back(
        build_witness_impl(b, gap, log_n, J));
  std::optional<PowerSeries> total;
  for (const Monomial& m : elem.monomials()) {
    std::optional<PowerSeries> term;
    for (std::size_t g = 0; g < generators.size(); ++g) {
      for (unsigned rep = 0; rep < m.exponents[g]; ++rep) {
        if (!term) {
          term = generators[g];
        } else {
          term = cauchy ? cauchy_product(*term, generators[g])
                        : hadamard_product(*term, generators[g]);
        }
      }
    }
    PowerSeries scaled =
        scale_series(*term, Coefficient::from_value(m.coefficient));
    total = total ? *total + scaled : scaled;
  }

  if (method == ExpansionMethod::by_products)
    return ElementExpansion{std::move(*total),
                            std::vector<bool>(J + 1, false), P, {}};

  auto combo_exponent = [&](const Monomial& m) {
    double c = 0.0;
    for (std::size_t g = 0; g < basis.values.size(); ++g)
      c += double(m.exponents[g]) * basis.values[g];
    return c;
  };

  std::vector<Coefficient> coeffs = total->coefficients();
  std::vector<bool> determined(J + 1, false);
  if (cauchy) {
    // Degrees present among the monomials.
    std::vector<std::size_t> degrees;
    for (const Monomial& m : elem.monomials()) {
      const std::size_t d = AlgebraElement::total_degree(m);
      if (std::find(degrees.begin(), degrees.end(), d) == degrees.end())
        degrees.push_back(d);
    }
    for (std::size_t p = P; p < gap.indices().size(); ++p) {
      for (std::size_t d : degrees) {
        const std::size_t idx = d * gap[p];
        if (idx > J) continue;
        std::vector<Coefficient> terms;
        for (const Monomial& m : elem.monomials()) {
          if (AlgebraElement::total_degree(m) != d) continue;
          terms.push_back(Coefficient::from_value(m.coefficient)
                              .scaled(combo_exponent(m) * log_n(p, gap[p])));
        }
        coeffs[idx] = sum_coefficients(terms);
        determined[idx] = true;
      }
      // Certified zero range (p k_{p-1}, k_p).
      for (std::size_t j = p * gap[p - 1] + 1; j < gap[p] && j <= J; ++j) {
        coeffs[j] = Coefficient::zero();
        determined[j] = true;
      }
    }
  } else {
    // Componentwise: every gap index carries the displayed sum, all
    // other indices are exact zeros.
    std::fill(coeffs.begin(), coeffs.end(), Coefficient::zero());
    determined.assign(J + 1, true);
    for (std::size_t p = 0; p < gap.indices().size(); ++p) {
      std::vector<Coefficient> terms;
      for (const Monomial& m : elem.monomials())
        terms.push_back(Coefficient::from_value(m.coefficient)
                            .scaled(combo_exponent(m) * log_n(p, gap[p])));
      coeffs[gap[p]] = sum_coefficients(terms);
    }
  }
  return ElementExpansion{PowerSeries(std::move(coeffs)), std::move(determined),
                          P, {}};
}

}  // namespace detail

inline ElementExpansion algebra_element_coefficients(
    const AlgebraElement& elem, const ExponentBasis& basis,
    const GapSequence& gap, const WeightSequence& N, ExpansionMethod method) {
  return detail::expand_element(
      elem, basis, gap, [&](std::size_t, std::size_t k) { return N.log_m(k); },
      N.order(), method);
}

inline ElementExpansion algebra_element_coefficients(
    const AlgebraElement& elem, const ExponentBasis& basis,
    const GapSequence& gap, const WeightMatrix& mx, ExpansionMethod method) {
  std::vector<std::optional<WeightSequence>> cache;
  return detail::expand_element(
      elem, basis, gap,
      [&](std::size_t p, std::size_t k) {
        return detail::witness_row(mx, p, cache).log_m(k);
      },
      mx.order(), method);
}

// ---------------------------------------------------------------------------
// Divergence diagnostic: the partial sums S_{k_p}(a) of the
// representation-formula criterion, evaluated in scaled arithmetic at
// each a, with the oracle correction term reported separately.

struct DivergencePoint {
  double a = 0.0;
  std::vector<double> log_sums;         // log |S_{k_p}(a)| per evaluable p
  std::vector<double> log_corrections;  // correction magnitude (log domain)
  Verdict verdict = Verdict::inconclusive;
  double gain = 0.0;                    // log gain across the last three sums
  std::string note;
};

struct DivergenceReport {
  std::vector<DivergencePoint> points;
  std::vector<std::size_t> evaluated;  // the k_p with k_p - 1 <= J
  std::string note;
};

// M names the class whose representation formula the oracle
// instantiates; the evaluation itself only consults the oracle.
inline DivergenceReport divergence_diagnostic(
    const PowerSeries& g, const WeightSequence& M,
    const SummationWeightOracle& oracle, std::span<const double> a_list,
    const GapSequence& gap) {
  (void)M;
  if (a_list.empty())
    throw std::invalid_argument("divergence diagnostic: need at least one a");
  for (std::size_t i = 0; i < a_list.size(); ++i) {
    if (!(a_list[i] > 0.0))
      throw std::invalid_argument("divergence diagnostic: a must be positive");
    if (i && a_list[i] >= a_list[i - 1])
      throw std::invalid_argument(
          "divergence diagnostic: a values must decrease");
  }

  DivergenceReport rep;
  for (std::size_t p = 1; p < gap.indices().size(); ++p)
    if (gap[p] - 1 <= g.order()) rep.evaluated.push_back(gap[p]);
  if (rep.evaluated.size() < 3)
    rep.note = "fewer than three evaluable partial sums";

  const std::vector<std::size_t> support = g.support();
  for (double a : a_list) {
    DivergencePoint pt;
    pt.a = a;
    const double log_a = std::log(a);
    for (std::size_t p = 1; p < gap.indices().size(); ++p) {
      const std::size_t k = gap[p];
      if (k - 1 > g.order()) break;
      std::vector<Coefficient> terms;
      for (std::size_t j : support) {
        if (j >= k) break;
        Coefficient t = g[j].scaled(double(j) * log_a);
        if (!oracle.is_trivial()) t *= Coefficient::from_real(oracle(j, k));
        terms.push_back(t);
      }
      pt.log_sums.push_back(sum_coefficients(terms).log_mag);

      if (oracle.is_trivial()) {
        pt.log_corrections.push_back(neg_infinity);
      } else {
        const std::size_t limit = gap.correction_limit(p);
        std::vector<double> corr;
        for (std::size_t j : support) {
          if (j > limit) break;
          const double dev = std::abs(oracle(j, k) - 1.0);
          if (dev > 0.0)
            corr.push_back(std::log(dev) + g[j].log_mag + double(j) * log_a);
        }
        pt.log_corrections.push_back(log_sum_exp(corr));
      }
    }

    const std::size_t n = pt.log_sums.size();
    if (n >= 3) {
      const double s0 = pt.log_sums[n - 3], s1 = pt.log_sums[n - 2],
                   s2 = pt.log_sums[n - 1];
      pt.gain = s2 - s0;
      if (s1 > s0 && s2 > s1 && pt.gain >= 2.0) {
        pt.verdict = Verdict::holds;
      } else if (pt.gain <= 0.1) {
        pt.verdict = Verdict::fails;
      }
    } else {
      pt.note = "fewer than three evaluable partial sums";
    }
    rep.points.push_back(std::move(pt));
  }
  return rep;
}

}  // namespace carleman
