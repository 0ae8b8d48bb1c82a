#pragma once

// Independent reference computations used to freeze expected values.
// Nothing here calls into the library's numerical paths.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <vector>

namespace oracle {

using Complex = std::complex<double>;

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                           double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

/// Adaptive Simpson quadrature, started on 16 panels so that symmetric
/// integrands cannot fool the first error estimate.
inline double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
  constexpr int kPanels = 16;
  const double h = (b - a) / kPanels;
  double total = 0.0;
  for (int i = 0; i < kPanels; ++i) {
    const double lo = a + i * h;
    const double hi = i + 1 == kPanels ? b : lo + h;
    const double fa = f(lo);
    const double fb = f(hi);
    const double fm = f(0.5 * (lo + hi));
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    total += simpson_step(f, lo, hi, fa, fm, fb, whole, tol / kPanels, 50);
  }
  return total;
}

/// integral of g(x) / (pi sqrt(4 - x^2)) over [-2, 2], via x = 2 sin t.
inline double arcsine_expectation(const std::function<double(double)>& g) {
  const double half_pi = std::numbers::pi / 2.0;
  return adaptive_simpson([&](double t) { return g(2.0 * std::sin(t)) / std::numbers::pi; }, -half_pi, half_pi);
}

/// Average of g over the unit circle with normalized arclength.
inline double circle_expectation(const std::function<double(Complex)>& g) {
  return adaptive_simpson([&](double t) { return g(std::polar(1.0, t)); }, 0.0, 2.0 * std::numbers::pi) /
         (2.0 * std::numbers::pi);
}

/// Local degree of f at z0 from the decay rate of |f(z0+h) - f(z0)| as h -> 0.
inline int finite_difference_local_degree(const std::function<Complex(Complex)>& f, Complex z0) {
  const Complex base = f(z0);
  const Complex dir = std::polar(1.0, 0.3);
  const double h1 = 1e-2;
  const double h2 = 1e-3;
  const double d1 = std::abs(f(z0 + h1 * dir) - base);
  const double d2 = std::abs(f(z0 + h2 * dir) - base);
  return static_cast<int>(std::lround(std::log(d1 / d2) / std::log(h1 / h2)));
}

/// Fiber of z^2 + c over w: the two square roots (no library root finder).
inline std::vector<Complex> quadratic_fiber(Complex c, Complex w) {
  const Complex s = std::sqrt(w - c);
  return {s, -s};
}

/// All points of the depth-m backward tree of z^2 + c from w, by brute
/// enumeration of square roots (with repetition for double roots).
inline std::vector<Complex> quadratic_leaves(Complex c, Complex w, int m) {
  std::vector<Complex> level{w};
  for (int k = 0; k < m; ++k) {
    std::vector<Complex> next;
    for (const auto& p : level)
      for (const auto& z : quadratic_fiber(c, p)) next.push_back(z);
    level = std::move(next);
  }
  return level;
}

}  // namespace oracle
