#pragma once

// Finite-truncation trend protocol.
//
// No finite computation decides an asymptotic statement; every verdict
// below is a documented convention, reported with the window statistics
// it was derived from.
//
// Sup protocol ("is the defect eventually bounded?"): the window
// [first, last] is split at its midpoint; the condition holds when the
// tail-half sup exceeds the front-half sup by at most epsilon, and fails
// when the tail-half sup exceeds it by more than 2*epsilon with the
// overall maximizer sitting in the last quarter of the window (growth
// that is still ongoing at truncation).  Everything else is
// inconclusive.  Nonpositive defects are clipped to zero first: a
// defect that certifies the inequality with slack is not growth.
//
// Decay protocol ("does the quantity drift to -infinity?") mirrors the
// sup protocol on window infima: holds needs a drop of at least
// 2*epsilon with the trough in the last quarter and a negative tail;
// fails means the infimum stabilised.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string_view>

namespace carleman {

enum class Verdict { holds, fails, inconclusive };

constexpr std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::holds: return "holds";
    case Verdict::fails: return "fails";
    default: return "inconclusive";
  }
}

struct TrendOptions {
  std::size_t first = 32;    // absolute index where the window opens
  double epsilon = 0.05;     // per-index slack between half-window extrema
  std::size_t min_window = 16;
  bool clip_at_zero = true;  // sup protocol only
};

struct WindowStats {
  std::size_t window_begin = 0;  // absolute, inclusive
  std::size_t window_end = 0;    // absolute, exclusive
  double front_sup = 0.0, tail_sup = 0.0;
  double front_inf = 0.0, tail_inf = 0.0;
  std::size_t arg_sup = 0, arg_inf = 0;  // absolute indices over the window
  bool usable = false;
};

struct TrendReport {
  Verdict verdict = Verdict::inconclusive;
  WindowStats stats;
};

namespace detail {

// values[i] carries absolute index offset + i.
inline WindowStats make_window(std::span<const double> values, std::size_t offset,
                               const TrendOptions& opt, bool clip) {
  WindowStats w;
  const std::size_t abs_end = offset + values.size();
  const std::size_t begin = std::max(offset, opt.first);
  if (abs_end <= begin || abs_end - begin < opt.min_window) return w;
  w.window_begin = begin;
  w.window_end = abs_end;
  const std::size_t len = abs_end - begin;
  const std::size_t mid = begin + len / 2;

  auto at = [&](std::size_t abs) {
    double v = values[abs - offset];
    return clip ? std::max(v, 0.0) : v;
  };

  w.front_sup = w.tail_sup = -std::numeric_limits<double>::infinity();
  w.front_inf = w.tail_inf = std::numeric_limits<double>::infinity();
  double sup = -std::numeric_limits<double>::infinity();
  double inf = std::numeric_limits<double>::infinity();
  for (std::size_t a = begin; a < abs_end; ++a) {
    const double v = at(a);
    const bool tail = a >= mid;
    if (tail) {
      w.tail_sup = std::max(w.tail_sup, v);
      w.tail_inf = std::min(w.tail_inf, v);
    } else {
      w.front_sup = std::max(w.front_sup, v);
      w.front_inf = std::min(w.front_inf, v);
    }
    if (v > sup) sup = v, w.arg_sup = a;
    if (v < inf) inf = v, w.arg_inf = a;
  }
  w.usable = true;
  return w;
}

inline bool in_last_quarter(const WindowStats& w, std::size_t abs) {
  const std::size_t len = w.window_end - w.window_begin;
  return abs >= w.window_end - std::max<std::size_t>(len / 4, 1);
}

}  // namespace detail

// Evidence that the defect sequence is eventually bounded above.
inline TrendReport classify_sup_trend(std::span<const double> defects,
                                      std::size_t offset = 0,
                                      TrendOptions opt = {}) {
  TrendReport r;
  r.stats = detail::make_window(defects, offset, opt, opt.clip_at_zero);
  if (!r.stats.usable) return r;
  const auto& w = r.stats;
  if (w.tail_sup <= w.front_sup + opt.epsilon) {
    r.verdict = Verdict::holds;
  } else if (w.tail_sup > w.front_sup + 2 * opt.epsilon &&
             detail::in_last_quarter(w, w.arg_sup)) {
    r.verdict = Verdict::fails;
  }
  return r;
}

// Evidence that the values drift to -infinity.
inline TrendReport classify_decay_trend(std::span<const double> values,
                                        std::size_t offset = 0,
                                        TrendOptions opt = {}) {
  opt.clip_at_zero = false;
  TrendReport r;
  r.stats = detail::make_window(values, offset, opt, false);
  if (!r.stats.usable) return r;
  const auto& w = r.stats;
  if (w.tail_inf >= w.front_inf - opt.epsilon) {
    r.verdict = Verdict::fails;
  } else if (w.tail_inf <= w.front_inf - 2 * opt.epsilon &&
             detail::in_last_quarter(w, w.arg_inf) && w.tail_inf < 0.0) {
    r.verdict = Verdict::holds;
  }
  return r;
}

// Evidence that a nonnegative ratio sequence vanishes (o(.) checks):
// the tail sup must at least halve against the front sup.
inline TrendReport classify_vanishing_trend(std::span<const double> ratios,
                                            std::size_t offset = 0,
                                            TrendOptions opt = {}) {
  constexpr double atol = 1e-9;
  TrendReport r;
  r.stats = detail::make_window(ratios, offset, opt, false);
  if (!r.stats.usable) return r;
  const auto& w = r.stats;
  if (w.tail_sup <= 0.5 * w.front_sup + atol) {
    r.verdict = Verdict::holds;
  } else if (w.front_inf > 10 * atol && w.tail_inf >= 0.9 * w.front_inf - atol) {
    r.verdict = Verdict::fails;
  }
  return r;
}

// Divergence evidence for a positive-term series via dyadic blocks:
// B1 sums terms with J/4 < j <= J/2, B2 those with J/2 < j <= J.  A
// convergent comparison series keeps B2/B1 well below 1 (geometric-type
// decay gives <= 1/2); divergence keeps the blocks comparable.
struct BlockRatioReport {
  double front_block = 0.0;
  double tail_block = 0.0;
  double ratio = 0.0;
  Verdict diverges = Verdict::inconclusive;
};

inline BlockRatioReport classify_block_divergence(std::span<const double> terms,
                                                  std::size_t offset = 0) {
  BlockRatioReport r;
  const std::size_t last = offset + terms.size() - 1;
  if (terms.empty() || last < 64) return r;
  const std::size_t q1 = last / 4, q2 = last / 2;
  long double b1 = 0.0L, b2 = 0.0L;
  for (std::size_t a = std::max(offset, q1 + 1); a <= last; ++a) {
    if (a <= q2)
      b1 += terms[a - offset];
    else
      b2 += terms[a - offset];
  }
  r.front_block = static_cast<double>(b1);
  r.tail_block = static_cast<double>(b2);
  if (b1 <= 0.0L) return r;
  r.ratio = static_cast<double>(b2 / b1);
  if (r.ratio >= 0.70)
    r.diverges = Verdict::holds;
  else if (r.ratio <= 0.55)
    r.diverges = Verdict::fails;
  return r;
}

}  // namespace carleman
