#include "dimlab/counting.hpp"

#include <algorithm>
#include <cmath>

#include "dimlab/quadrature.hpp"

namespace dimlab {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kLog2 = 0.6931471805599453094172321214581766;

void boundary_scan(const FunctionModel& m, cplx a, double r, int nodes) {
  double min_abs = 1e308;
  cplx argmin = r;
  for (int i = 0; i < nodes; ++i) {
    const cplx z = r * std::exp(cplx(0.0, kTwoPi * i / nodes));
    const double d = std::abs(m.eval(z) - a);
    if (d < min_abs) {
      min_abs = d;
      argmin = z;
    }
  }
  const double fp = std::abs(m.deriv(argmin));
  if (min_abs < 2.0 * fp * 1e-6 * r)
    throw BoundaryZero("an a-point sits within ~1e-6*r of the circle");
}

}  // namespace

long long count_points(const FunctionModel& m, cplx a, double r, int min_nodes) {
  if (!(r > 0.0)) throw Error("count_points requires r > 0");
  boundary_scan(m, a, r, std::max(4 * min_nodes, 2048));
  auto integrand = [&](double theta) {
    const cplx z = r * std::exp(cplx(0.0, theta));
    const cplx w = m.eval(z) - a;
    if (std::abs(w) < 1e-300) throw BoundaryZero("contour passes through an a-point");
    return z * m.deriv(z) / w;
  };
  const cplx integral = periodic_trapezoid(integrand, std::max(min_nodes, 16), 1e-6 * kTwoPi);
  const cplx raw = integral / kTwoPi;
  const double rounded = std::round(raw.real());
  if (std::abs(raw.imag()) > 1e-4 || std::abs(raw.real() - rounded) > 1e-4)
    throw QuadratureDivergence("winding estimate is not close to an integer");
  return static_cast<long long>(rounded);
}

double integrated_counting(const FunctionModel& m, cplx a, double r) {
  if (!(r >= 1.0)) throw Error("integrated_counting requires r >= 1");
  const auto pts = m.zeros_in_disk(a, r);
  double N = 0.0;
  long long at_origin = 0;
  for (const auto& p : pts) {
    const double rho = std::abs(p);
    if (rho < 1e-14 * r)
      ++at_origin;
    else
      N += std::log(r / rho);
  }
  N += static_cast<double>(at_origin) * std::log(r);
  return N;
}

double characteristic(const FunctionModel& m, double r, double abs_tol) {
  if (!(r > 0.0)) throw Error("characteristic requires r > 0");
  auto f = [&](double theta) {
    return std::max(0.0, m.log_abs(r * std::exp(cplx(0.0, theta))));
  };
  return adaptive_simpson(f, 0.0, kTwoPi, abs_tol * kTwoPi) / kTwoPi;
}

long long CountingData::n_at(double r) const {
  if (!moduli.empty()) {
    const auto it = std::upper_bound(moduli.begin(), moduli.end(), r);
    return static_cast<long long>(it - moduli.begin());
  }
  long long n = 0;
  for (const auto& s : samples) {
    if (s.r > r) break;
    n = s.n;
  }
  return n;
}

double CountingData::N_at(double r) const {
  if (!moduli.empty()) {
    double N = 0.0;
    for (const double rho : moduli) {
      if (rho > r) break;
      if (rho < 1e-300)
        N += std::log(r);
      else if (rho < r)
        N += std::log(r / rho);
    }
    return N;
  }
  double N = 0.0;
  for (const auto& s : samples) {
    if (s.r > r) break;
    N = s.N;
  }
  return N;
}

namespace {

CountingData assemble(std::vector<double> moduli, cplx a, double r_lo, double r_hi,
                      int per_octave, const std::function<double(double)>& logM,
                      double chain_lo, double chain_hi) {
  if (!(r_lo > 0.0) || !(r_hi > r_lo)) throw Error("counting grid requires 0 < r_lo < r_hi");
  std::sort(moduli.begin(), moduli.end());
  CountingData cd;
  cd.a = a;
  cd.r_lo = r_lo;
  cd.r_hi = r_hi;
  cd.per_octave = per_octave;
  cd.moduli = std::move(moduli);

  const double q = std::pow(2.0, 1.0 / per_octave);
  for (double r = r_lo; r <= r_hi * (1.0 + 1e-12); r *= q) {
    CountingSample s;
    s.r = r;
    s.n = cd.n_at(r);
    s.N = cd.N_at(r);
    cd.samples.push_back(s);
  }

  const std::size_t m = cd.samples.size();
  cd.K_hat = 0.0;
  cd.A_N_hat = 1e308;
  cd.B_N_hat = 0.0;
  for (std::size_t i = 0; i + static_cast<std::size_t>(per_octave) < m; ++i) {
    const auto& lo = cd.samples[i];
    const auto& hi = cd.samples[i + static_cast<std::size_t>(per_octave)];
    if (lo.n >= 1)
      cd.K_hat = std::max(cd.K_hat, static_cast<double>(hi.n) / static_cast<double>(lo.n));
    if (lo.N > 0.0) {
      cd.A_N_hat = std::min(cd.A_N_hat, hi.N / lo.N);
      cd.B_N_hat = std::max(cd.B_N_hat, hi.N / lo.N);
    }
  }
  if (cd.A_N_hat > 1e307) cd.A_N_hat = 0.0;

  cd.chain_ok = false;
  cd.chain_constant = 0.0;
  if (logM && chain_hi > chain_lo && cd.K_hat > 0.0 && cd.A_N_hat > 1.0) {
    cd.chain_constant = 4.0 * cd.K_hat * cd.K_hat * kLog2 / (cd.A_N_hat - 1.0);
    cd.chain_ok = true;
    for (const auto& s : cd.samples) {
      if (s.r < chain_lo || s.r > chain_hi) continue;
      if (logM(s.r) > cd.chain_constant * static_cast<double>(s.n)) {
        cd.chain_ok = false;
        break;
      }
    }
  }
  return cd;
}

}  // namespace

CountingData build_counting(const FunctionModel& m, cplx a, double r_lo, double r_hi,
                            int per_octave, const std::function<double(double)>& logM,
                            double chain_lo, double chain_hi) {
  // fetch slightly beyond the top radius; nudge if an a-point hugs the rim
  std::vector<cplx> pts;
  double rim = r_hi * 1.0000001;
  for (int attempt = 0;; ++attempt) {
    try {
      pts = m.zeros_in_disk(a, rim);
      break;
    } catch (const BoundaryZero&) {
      if (attempt >= 4) throw;
      rim *= 1.0000173;
    }
  }
  std::vector<double> moduli(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) moduli[i] = std::abs(pts[i]);
  return assemble(std::move(moduli), a, r_lo, r_hi, per_octave, logM, chain_lo, chain_hi);
}

CountingData counting_from_moduli(std::vector<double> moduli, double r_lo, double r_hi,
                                  int per_octave) {
  return assemble(std::move(moduli), 0.0, r_lo, r_hi, per_octave, {}, 0, 0);
}

bool window_membership(const CountingData& cd, double mu, double r,
                       bool* holds_2b, bool* holds_2c, int scan_per_octave) {
  const double q = std::pow(2.0, 1.0 / scan_per_octave);
  const double n_r = static_cast<double>(cd.n_at(r));
  const double tmax = cd.samples.empty() ? cd.r_hi : cd.samples.back().r;

  bool b2 = true;
  for (double t = r * q; t <= tmax * (1.0 + 1e-12); t *= q) {
    const double env = std::pow(t / r, mu) * n_r;
    if (static_cast<double>(cd.n_at(t)) > env * (1.0 + 1e-12) + 1e-9) {
      b2 = false;
      break;
    }
  }
  bool c2 = true;
  for (double t = r / q; t >= cd.r_lo * (1.0 - 1e-12); t /= q) {
    const double env = std::pow(t / r, mu) * n_r;
    if (static_cast<double>(cd.n_at(t)) < env * (1.0 - 1e-12) - 1e-9) {
      c2 = false;
      break;
    }
  }
  if (holds_2b) *holds_2b = b2;
  if (holds_2c) *holds_2c = c2;
  return b2 && c2;
}

RegularZeroWindow regular_window_measure(const CountingData& cd, double mu, double R,
                                         int grid, int scan_per_octave) {
  if (grid < 2) throw Error("regular_window_measure needs a grid of at least 2 points");
  const double tmax = cd.samples.empty() ? 0.0 : cd.samples.back().r;
  if (tmax < 4.0 * R * (1.0 - 1e-9))
    throw InsufficientData("counting data must reach 4R for the window scan");
  if (cd.r_lo > R * (1.0 + 1e-12))
    throw InsufficientData("counting data must start at or below R");

  RegularZeroWindow w;
  w.mu = mu;
  w.R = R;
  w.grid = grid;
  w.scan_per_octave = scan_per_octave;
  window_membership(cd, mu, R, &w.holds_2b, &w.holds_2c, scan_per_octave);

  long long pass_b = 0, pass_c = 0, pass_both = 0;
  for (int k = 0; k < grid; ++k) {
    const double r = R * (1.0 + static_cast<double>(k) / (grid - 1));
    bool b2 = false, c2 = false;
    window_membership(cd, mu, r, &b2, &c2, scan_per_octave);
    pass_b += b2;
    pass_c += c2;
    pass_both += (b2 && c2);
  }
  w.fraction_2b = static_cast<double>(pass_b) / grid;
  w.fraction_2c = static_cast<double>(pass_c) / grid;
  w.measured_fraction = static_cast<double>(pass_both) / grid;
  w.tail_certified = cd.K_hat > 0.0 && mu >= 2.0 * std::log(cd.K_hat) / kLog2;
  return w;
}

}  // namespace dimlab
