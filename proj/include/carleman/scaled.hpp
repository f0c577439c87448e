#pragma once

// Scaled arithmetic: magnitudes live as natural logs, values as
// (unit phase, log magnitude) pairs.  log_mag == -infinity encodes an
// exact zero, which survives products and sums unconditionally.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace carleman {

inline constexpr double neg_infinity = -std::numeric_limits<double>::infinity();

// log(e^a + e^b) anchored at the larger argument.
inline double log_add(double a, double b) noexcept {
  if (a == neg_infinity) return b;
  if (b == neg_infinity) return a;
  const double hi = std::max(a, b);
  const double lo = std::min(a, b);
  return hi + std::log1p(std::exp(lo - hi));
}

// log(sum_i e^{x_i}).  Anchored at the maximum; the scaled terms are
// accumulated left to right in extended precision so the result is
// schedule-independent and accurate for a few thousand terms.
inline double log_sum_exp(std::span<const double> xs) noexcept {
  double anchor = neg_infinity;
  for (double x : xs) anchor = std::max(anchor, x);
  if (anchor == neg_infinity) return neg_infinity;
  if (std::isinf(anchor)) return anchor;
  long double acc = 0.0L;
  for (double x : xs) {
    if (x != neg_infinity) acc += std::exp(static_cast<long double>(x) - anchor);
  }
  return anchor + static_cast<double>(std::log(acc));
}

inline double log_factorial(std::uint64_t j) noexcept {
  return static_cast<double>(std::lgammal(static_cast<long double>(j) + 1.0L));
}

// Prefix sums out[k] = steps[0] + ... + steps[k], accumulated in
// extended precision.  Used for log M_j = sum of log quotients.
// out[0] = 0, out[k] = steps[0] + ... + steps[k-1], accumulated in
// extended precision so thousands of log-increments stay faithful.
inline std::vector<double> prefix_sums(std::span<const double> steps) {
  std::vector<double> out(steps.size() + 1);
  long double acc = 0.0L;
  out[0] = 0.0;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    acc += steps[i];
    out[i + 1] = static_cast<double>(acc);
  }
  return out;
}

// One series coefficient.  phase is a unit complex number whenever the
// coefficient is nonzero; zero is phase (1,0) with log_mag = -infinity.
struct Coefficient {
  std::complex<double> phase{1.0, 0.0};
  double log_mag = neg_infinity;

  static Coefficient zero() noexcept { return {}; }

  static Coefficient from_log(double log_mag,
                              std::complex<double> phase = {1.0, 0.0}) noexcept {
    if (log_mag == neg_infinity) return zero();
    return {phase, log_mag};
  }

  static Coefficient from_value(std::complex<double> v) noexcept {
    const double mag = std::abs(v);
    if (mag == 0.0) return zero();
    return {v / mag, std::log(mag)};
  }

  static Coefficient from_real(double v) noexcept {
    if (v == 0.0) return zero();
    return {{v < 0.0 ? -1.0 : 1.0, 0.0}, std::log(std::abs(v))};
  }

  bool is_zero() const noexcept { return log_mag == neg_infinity; }

  // Linear-domain value; intentionally allowed to over/underflow.
  std::complex<double> value() const noexcept {
    if (is_zero()) return {0.0, 0.0};
    return phase * std::exp(log_mag);
  }

  Coefficient conj() const noexcept { return {std::conj(phase), log_mag}; }

  friend Coefficient operator*(const Coefficient& a, const Coefficient& b) noexcept {
    if (a.is_zero() || b.is_zero()) return zero();
    return {a.phase * b.phase, a.log_mag + b.log_mag};
  }

  Coefficient& operator*=(const Coefficient& o) noexcept { return *this = *this * o; }

  // Multiply by e^{log_factor} (log-domain rescale).
  Coefficient scaled(double log_factor) const noexcept {
    if (is_zero()) return zero();
    return {phase, log_mag + log_factor};
  }
};

// Relative cancellation below this fraction of the anchor is treated as
// an exact zero: gap-range checks rely on recognizing true zeros.
inline constexpr double cancellation_snap = 1e-14;

// Phase-aware sum anchored at the maximal log magnitude.  Fixed
// left-to-right order; extended-precision accumulators.  A same-phase
// nonnegative-real input takes a cancellation-free fast path.
inline Coefficient sum_coefficients(std::span<const Coefficient> terms) noexcept {
  double anchor = neg_infinity;
  bool all_positive_real = true;
  for (const Coefficient& c : terms) {
    if (c.is_zero()) continue;
    anchor = std::max(anchor, c.log_mag);
    if (c.phase.real() != 1.0 || c.phase.imag() != 0.0) all_positive_real = false;
  }
  if (anchor == neg_infinity) return Coefficient::zero();

  if (all_positive_real) {
    long double acc = 0.0L;
    for (const Coefficient& c : terms) {
      if (!c.is_zero()) acc += std::exp(static_cast<long double>(c.log_mag) - anchor);
    }
    return Coefficient::from_log(anchor + static_cast<double>(std::log(acc)));
  }

  long double re = 0.0L, im = 0.0L;
  for (const Coefficient& c : terms) {
    if (c.is_zero()) continue;
    const long double w = std::exp(static_cast<long double>(c.log_mag) - anchor);
    re += w * c.phase.real();
    im += w * c.phase.imag();
  }
  const long double mag = std::sqrt(re * re + im * im);
  if (mag <= cancellation_snap) return Coefficient::zero();
  return {{static_cast<double>(re / mag), static_cast<double>(im / mag)},
          anchor + static_cast<double>(std::log(mag))};
}

inline Coefficient sum_coefficients(std::initializer_list<Coefficient> terms) noexcept {
  return sum_coefficients(std::span<const Coefficient>(terms.begin(), terms.size()));
}

}  // namespace carleman
