#include "dimlab/growth.hpp"

#include <algorithm>
#include <cmath>

#include "dimlab/kernels.hpp"

namespace dimlab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

// maximize g on [lo, hi] by golden section; g unimodal on the bracket
template <class G>
double golden_max(G&& g, double lo, double hi) {
  const double phi = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = g(x1), f2 = g(x2);
  for (int it = 0; it < 120 && (b - a) > 1e-12; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = g(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = g(x1);
    }
  }
  return std::max(f1, f2);
}

}  // namespace

double log_max_modulus(const FunctionModel& m, double r, int resolution, int workers) {
  if (r <= 0.0) throw Error("log_max_modulus requires r > 0");
  auto g = [&m, r](double theta) {
    return m.log_abs(r * cplx(std::cos(theta), std::sin(theta)));
  };
  const int n = std::max(resolution, 16);
  int best_i = 0;
  double best = -1e308;
  // coarse scan; the grid values are also used to pick the bracket
  const auto vals = kernels::fill_vector(n, workers, [&](std::int64_t i) {
    return g(kTwoPi * static_cast<double>(i) / n);
  });
  for (int i = 0; i < n; ++i)
    if (vals[static_cast<std::size_t>(i)] > best) {
      best = vals[static_cast<std::size_t>(i)];
      best_i = i;
    }
  const double step = kTwoPi / n;
  const double refined =
      golden_max(g, (best_i - 1) * step, (best_i + 1) * step);
  double out = std::max(best, refined);
  if (m.has_logM_oracle()) {
    const double oracle = m.logM_oracle(r);
    if (std::abs(out - oracle) > 1e-9 * std::max(1.0, std::abs(oracle)))
      throw ValidationFailed("circle scan disagrees with the closed-form log M");
    out = oracle;
  }
  return out;
}

double max_modulus(const FunctionModel& m, double r, int resolution, int workers) {
  return std::exp(log_max_modulus(m, r, resolution, workers));
}

GrowthProfile build_profile(const FunctionModel& m, double rmin, double rmax,
                            int per_octave, int resolution, int workers) {
  if (!(rmin > 0.0) || !(rmax > rmin)) throw Error("build_profile requires 0 < rmin < rmax");
  const double q = std::pow(2.0, 1.0 / per_octave);
  GrowthProfile p;
  double r = rmin;
  for (;;) {
    p.r_grid.push_back(r);
    if (r >= rmax * (1.0 - 1e-12)) break;
    r *= q;
    if (r > rmax) r = rmax;
  }
  p.logM.resize(p.r_grid.size());
  for (std::size_t i = 0; i < p.r_grid.size(); ++i)
    p.logM[i] = log_max_modulus(m, p.r_grid[i], resolution, workers);

  // Hadamard: log M strictly increasing and convex in log r
  for (std::size_t i = 1; i < p.logM.size(); ++i)
    if (!(p.logM[i] > p.logM[i - 1]))
      throw ValidationFailed("log M is not strictly increasing along the grid");
  for (std::size_t i = 1; i + 1 < p.logM.size(); ++i) {
    const double u0 = std::log(p.r_grid[i - 1]), u1 = std::log(p.r_grid[i]),
                 u2 = std::log(p.r_grid[i + 1]);
    const double s1 = (p.logM[i] - p.logM[i - 1]) / (u1 - u0);
    const double s2 = (p.logM[i + 1] - p.logM[i]) / (u2 - u1);
    if (s2 - s1 < -1e-9)
      throw ValidationFailed("log M is not convex in log r along the grid");
  }

  try {
    const auto [rho, lam] = order_estimate(p);
    p.rho_hat = rho;
    p.lambda_hat = lam;
  } catch (const InsufficientProfile&) {
    p.rho_hat = p.lambda_hat = std::numeric_limits<double>::quiet_NaN();
  }
  return p;
}

double GrowthProfile::logM_at(double r) const {
  if (r_grid.size() < 2) throw InsufficientProfile("profile needs at least two points");
  if (r < r_grid.front() * (1.0 - 1e-12) || r > r_grid.back() * (1.0 + 1e-12))
    throw InsufficientProfile("radius outside the profiled range");
  const double u = std::log(r);
  // locate the interval in log-r space
  auto it = std::lower_bound(r_grid.begin(), r_grid.end(), r);
  std::size_t i = static_cast<std::size_t>(it - r_grid.begin());
  if (i >= r_grid.size()) i = r_grid.size() - 1;
  if (i > 0 && (i == r_grid.size() || r < r_grid[i])) --i;
  if (i + 1 >= r_grid.size()) i = r_grid.size() - 2;

  const std::size_t n = r_grid.size();
  auto U = [&](std::size_t k) { return std::log(r_grid[k]); };
  const double h = U(i + 1) - U(i);
  // Fritsch-Carlson tangents keep the interpolant monotone
  auto tangent = [&](std::size_t k) {
    if (k == 0) return (logM[1] - logM[0]) / (U(1) - U(0));
    if (k == n - 1) return (logM[n - 1] - logM[n - 2]) / (U(n - 1) - U(n - 2));
    const double sl = (logM[k] - logM[k - 1]) / (U(k) - U(k - 1));
    const double sr = (logM[k + 1] - logM[k]) / (U(k + 1) - U(k));
    if (sl * sr <= 0.0) return 0.0;
    const double m = 0.5 * (sl + sr);
    return std::min({m, 3.0 * sl, 3.0 * sr});
  };
  const double m0 = tangent(i), m1 = tangent(i + 1);
  const double t = std::clamp((u - U(i)) / h, 0.0, 1.0);
  const double t2 = t * t, t3 = t2 * t;
  return (2 * t3 - 3 * t2 + 1) * logM[i] + (t3 - 2 * t2 + t) * h * m0 +
         (-2 * t3 + 3 * t2) * logM[i + 1] + (t3 - t2) * h * m1;
}

RegularityCertificate regularity_check(const GrowthProfile& p, double A, double B,
                                       double C, double r0) {
  if (!(A > 1.0) || !(B >= A) || !(C > 1.0) || !(r0 >= 1.0))
    throw Error("regularity_check requires A,B,C > 1 (A <= B) and r0 >= 1");
  if (p.r_grid.empty() || r0 * C > p.r_max() * (1.0 + 1e-12))
    throw InsufficientProfile("profile does not cover [r0, C*r_max]");

  RegularityCertificate cert;
  cert.A = A;
  cert.B = B;
  cert.C = C;
  cert.r0 = r0;
  cert.slack_rel = 1e-3;  // matches the interpolation error budget
  cert.r_lo = std::max(r0, p.r_min());
  cert.r_hi = p.r_max() / C;

  for (std::size_t i = 0; i < p.r_grid.size(); ++i) {
    const double r = p.r_grid[i];
    if (r < r0) continue;
    if (r * C > p.r_max() * (1.0 + 1e-12)) break;
    const double v = p.logM[i];
    const double vc = p.logM_at(r * C);
    const double slack = cert.slack_rel * std::max(1.0, std::abs(vc));
    if (A * v > vc + slack || vc > B * v + slack) cert.violations.push_back(r);
  }

  // empirical doubling constant for log M(2r) <= L log M(r)
  double L = 0.0;
  for (std::size_t i = 0; i < p.r_grid.size(); ++i) {
    const double r = p.r_grid[i];
    if (p.logM[i] <= 0.0) continue;
    if (2.0 * r > p.r_max() * (1.0 + 1e-12)) break;
    L = std::max(L, p.logM_at(2.0 * r) / p.logM[i]);
  }
  cert.doubling_L = L;

  cert.rho_hat = p.rho_hat;
  cert.lambda_hat = p.lambda_hat;
  cert.order_bounds_ok = !cert.violations.empty() ||
                         (p.rho_hat <= std::log(B) / std::log(C) + 0.05 &&
                          p.lambda_hat >= std::log(A) / std::log(C) - 0.05);
  return cert;
}

std::pair<double, double> order_estimate(const GrowthProfile& p) {
  std::vector<double> u, v;
  for (std::size_t i = 0; i < p.r_grid.size(); ++i)
    if (p.logM[i] > 1.0) {
      u.push_back(std::log(p.r_grid[i]));
      v.push_back(std::log(p.logM[i]));
    }
  if (u.size() < 10)
    throw InsufficientProfile("order estimate needs at least 10 grid points with log M > 1");
  const std::size_t start = u.size() / 2;  // trailing half
  double rho = -1e308, lam = 1e308;
  for (std::size_t i = start; i + 1 < u.size(); ++i) {
    const double slope = (v[i + 1] - v[i]) / (u[i + 1] - u[i]);
    rho = std::max(rho, slope);
    lam = std::min(lam, slope);
  }
  return {rho, lam};
}

double upper_log_density(std::vector<RInterval> bad_set, double R_max) {
  if (!(R_max > 1.0)) throw Error("upper_log_density requires R_max > 1");
  for (auto& iv : bad_set) {
    if (!(iv.lo >= 1.0) || !(iv.hi >= iv.lo) || iv.hi > R_max * (1.0 + 1e-12))
      throw Error("intervals must satisfy 1 <= lo <= hi <= R_max");
  }
  std::sort(bad_set.begin(), bad_set.end(),
            [](const RInterval& a, const RInterval& b) { return a.lo < b.lo; });
  for (std::size_t i = 1; i < bad_set.size(); ++i)
    if (bad_set[i].lo < bad_set[i - 1].hi - 1e-12)
      throw Error("intervals must be disjoint");
  if (bad_set.empty()) return 0.0;

  auto mass_up_to = [&](double r) {
    double s = 0.0;
    for (const auto& iv : bad_set) {
      const double hi = std::min(iv.hi, r);
      if (hi > iv.lo) s += std::log(hi) - std::log(iv.lo);
    }
    return s;
  };
  // the ratio is monotone between interval endpoints, so the maximum is
  // attained at a right endpoint (or at R_max)
  double best = 0.0;
  for (const auto& iv : bad_set) {
    const double r = std::min(iv.hi, R_max);
    if (r > 1.0) best = std::max(best, mass_up_to(r) / std::log(r));
  }
  best = std::max(best, mass_up_to(R_max) / std::log(R_max));
  return std::min(best, 1.0);
}

}  // namespace dimlab
