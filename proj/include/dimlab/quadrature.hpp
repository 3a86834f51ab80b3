#pragma once

#include <cmath>
#include <complex>
#include <string>

#include "dimlab/errors.hpp"

namespace dimlab {

namespace detail {
template <class F>
double simpson_rec(F& f, double a, double b, double fa, double fm, double fb,
                   double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  const double flm = f(lm), frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}
}  // namespace detail

// Adaptive Simpson with absolute tolerance. Kinks (log+|f| and friends) are
// handled by local refinement; the depth cap keeps subdivision finite.
template <class F>
double adaptive_simpson(F&& f, double a, double b, double abs_tol, int max_depth = 48) {
  const double m = 0.5 * (a + b);
  const double fa = f(a), fm = f(m), fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return detail::simpson_rec(f, a, b, fa, fm, fb, whole, abs_tol, max_depth);
}

// Trapezoid rule on [0, 2pi) for periodic integrands, doubling the node count
// until two refinements agree. Spectrally accurate for analytic integrands.
template <class F>
std::complex<double> periodic_trapezoid(F&& f, int min_nodes, double tol,
                                        int max_nodes = 1 << 22) {
  const double two_pi = 6.283185307179586476925286766559;
  int n = min_nodes;
  std::complex<double> sum = 0.0;
  for (int i = 0; i < n; ++i) sum += f(two_pi * i / n);
  std::complex<double> prev = sum * (two_pi / n);
  while (n < max_nodes) {
    std::complex<double> add = 0.0;  // midpoints of the current grid
    for (int i = 0; i < n; ++i) add += f(two_pi * (i + 0.5) / n);
    sum += add;
    n *= 2;
    const std::complex<double> cur = sum * (two_pi / n);
    if (std::abs(cur - prev) <= tol) return cur;
    prev = cur;
  }
  throw QuadratureDivergence("periodic trapezoid failed to converge at " +
                             std::to_string(max_nodes) + " nodes");
}

}  // namespace dimlab
