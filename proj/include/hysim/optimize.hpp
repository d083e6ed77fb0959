#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace hysim {

struct Maximum {
  double x = 0.0;
  double value = -std::numeric_limits<double>::infinity();
};

namespace detail {

inline constexpr double kInvPhi = 0.6180339887498949;  // (sqrt(5) - 1) / 2

template <class Fn>
Maximum golden_section(Fn&& fn, double a, double b, double tol) {
  double c = b - kInvPhi * (b - a);
  double d = a + kInvPhi * (b - a);
  double fc = fn(c);
  double fd = fn(d);
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - kInvPhi * (b - a);
      fc = fn(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + kInvPhi * (b - a);
      fd = fn(d);
    }
  }
  return fc >= fd ? Maximum{c, fc} : Maximum{d, fd};
}

// Bisection on the sign of a central-difference derivative. Recovers digits
// that golden-section loses once function values flatten out near the peak.
template <class Fn>
bool polish_stationary(Fn&& fn, double x0, double lo, double hi, double* out) {
  const double span = hi - lo;
  const double h = 1e-6 * span;
  const double r = 2e-5 * span;
  double a = x0 - r;
  double b = x0 + r;
  if (a - h < lo || b + h > hi) return false;
  auto slope = [&](double x) { return fn(x + h) - fn(x - h); };
  double sa = slope(a);
  double sb = slope(b);
  if (!(sa > 0.0 && sb < 0.0)) return false;
  for (int it = 0; it < 80 && (b - a) > 1e-15; ++it) {
    const double m = 0.5 * (a + b);
    const double sm = slope(m);
    if (sm > 0.0) {
      a = m;
    } else if (sm < 0.0) {
      b = m;
    } else {
      a = b = m;
    }
  }
  *out = 0.5 * (a + b);
  return true;
}

}  // namespace detail

/// Maximizes a continuous function on [lo, hi]: a uniform grid of `coarse_n`
/// points locates the best cell, golden-section refines the two neighbouring
/// cells to `tol`, and a derivative-sign bisection polishes interior peaks.
/// The result never has a lower value than the best grid point; on exact ties
/// the smallest x wins.
template <class Fn>
Maximum maximize_1d(Fn&& fn, double lo, double hi, double tol, int coarse_n = 256) {
  if (!(hi > lo)) return Maximum{lo, fn(lo)};
  const int n = std::max(coarse_n, 3);
  const double step = (hi - lo) / (n - 1);
  Maximum best{lo, fn(lo)};
  int best_i = 0;
  for (int i = 1; i < n; ++i) {
    const double x = (i == n - 1) ? hi : lo + step * i;
    const double v = fn(x);
    if (v > best.value) {
      best = {x, v};
      best_i = i;
    }
  }
  const double a = best_i == 0 ? lo : lo + step * (best_i - 1);
  const double b = best_i == n - 1 ? hi : lo + step * (best_i + 1);
  Maximum refined = detail::golden_section(fn, a, b, std::max(tol * 0.1, 1e-13));
  double polished = 0.0;
  if (detail::polish_stationary(fn, refined.x, lo, hi, &polished)) {
    const double v = fn(polished);
    const double slack = 4.0 * std::numeric_limits<double>::epsilon() * std::abs(refined.value);
    if (v >= refined.value - slack) refined = {polished, v};
  }
  if (refined.value > best.value ||
      (refined.value == best.value && refined.x < best.x)) {
    best = refined;
  }
  return best;
}

/// Root of a nondecreasing function on [lo, hi] by bisection. Returns the
/// endpoint when the sign never changes.
template <class Fn>
double bisect_increasing(Fn&& fn, double lo, double hi, int max_iter = 200) {
  if (fn(lo) >= 0.0) return lo;
  if (fn(hi) <= 0.0) return hi;
  for (int it = 0; it < max_iter; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    if (fn(mid) > 0.0) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace hysim
