#include "dimlab/logderiv.hpp"
#include <limits>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>

#include "dimlab/counting.hpp"
#include "dimlab/kernels.hpp"
#include "dimlab/rng.hpp"

namespace dimlab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kGoldenAngle = 2.3999632297286533222;

// Exceptions may not cross an OpenMP region; capture the first one instead.
struct ErrorLatch {
  std::atomic<long long> first{-1};
  std::string message;
  std::mutex mu;

  void record(long long index, const char* what) {
    long long expected = -1;
    if (first.compare_exchange_strong(expected, index)) {
      std::lock_guard<std::mutex> lock(mu);
      message = what;
    }
  }
  void rethrow_if_set(const char* where) const {
    if (first.load() >= 0)
      throw Error(std::string(where) + ": predicate failed at sample " +
                  std::to_string(first.load()) + ": " + message);
  }
};

cplx annulus_sample(double R, std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed, index);
  const double u = rng.next_double();
  const double v = rng.next_double();
  const double r = R * std::sqrt(1.0 + 3.0 * u);  // area-uniform radius law
  const double th = kTwoPi * v;
  return r * cplx(std::cos(th), std::sin(th));
}

}  // namespace

cplx log_deriv(const FunctionModel& m, cplx z) { return z * m.log_derivative(z); }

bool tset_member(const FunctionModel& m, const TSetParams& p, cplx z,
                 const LogMFn& logM_at, int disk_samples) {
  if (p.alpha1 > p.alpha2)
    throw Error("tset params require alpha1 <= alpha2");
  const double az = std::abs(z);
  if (az <= 0.0) return false;
  const double logM = logM_at(az);

  const cplx ld = log_deriv(m, z);
  const double t = std::abs(ld);
  if (t < p.alpha1 * logM || t > p.alpha2 * logM) return false;

  // |f(z)| >= |z|^q, compared in the log domain
  const double rhs = p.q == 0.0 ? 0.0 : p.q * std::log(az);
  if (m.log_abs(z) < rhs) return false;

  if (p.lambda > 0.0 && logM > 0.0) {
    const double rad = p.lambda * az / logM;
    auto upper_ok = [&](cplx zeta) {
      const double bound = p.alpha2 * logM_at(std::abs(zeta));
      return std::abs(log_deriv(m, zeta)) <= bound;
    };
    for (int j = 0; j < 8; ++j) {
      const double th = kTwoPi * j / 8.0;
      if (!upper_ok(z + rad * cplx(std::cos(th), std::sin(th)))) return false;
    }
    for (int k = 0; k < disk_samples; ++k) {
      const double rho = rad * std::sqrt((k + 0.5) / disk_samples);
      const double th = kGoldenAngle * k;
      if (!upper_ok(z + rho * cplx(std::cos(th), std::sin(th)))) return false;
    }
  }
  return true;
}

DensityEstimate region_density(const std::function<bool(cplx)>& pred, double R,
                               const MonteCarlo& mc) {
  if (mc.n <= 0) throw Error("monte-carlo density needs n > 0");
  ErrorLatch latch;
  const auto hits = kernels::count_true(mc.n, mc.workers, [&](std::int64_t i) {
    try {
      return pred(annulus_sample(R, mc.seed, static_cast<std::uint64_t>(i)));
    } catch (const std::exception& e) {
      latch.record(i, e.what());
      return false;
    }
  });
  latch.rethrow_if_set("region_density");
  DensityEstimate d;
  d.value = static_cast<double>(hits) / static_cast<double>(mc.n);
  d.stderr_ = std::sqrt(std::max(0.0, d.value * (1.0 - d.value) / static_cast<double>(mc.n)));
  d.samples = mc.n;
  d.R = R;
  d.method = "monte-carlo";
  d.seed = mc.seed;
  return d;
}

DensityEstimate region_density(const std::function<bool(cplx)>& pred, double R,
                               const PolarGrid& grid) {
  if (grid.n_r <= 0 || grid.n_theta <= 0) throw Error("polar grid needs positive extents");
  const std::int64_t total = static_cast<std::int64_t>(grid.n_r) * grid.n_theta;
  ErrorLatch latch;
  const auto bits = kernels::fill_bits(total, grid.workers, [&](std::int64_t idx) {
    const int i = static_cast<int>(idx / grid.n_theta);
    const int j = static_cast<int>(idx % grid.n_theta);
    const double r = R * (1.0 + (i + 0.5) / grid.n_r);
    const double th = kTwoPi * (j + 0.5) / grid.n_theta;
    try {
      return pred(r * cplx(std::cos(th), std::sin(th)));
    } catch (const std::exception& e) {
      latch.record(idx, e.what());
      return false;
    }
  });
  latch.rethrow_if_set("region_density");
  // weight each ring by its radius (area element), reduce serially
  double num = 0.0, den = 0.0;
  for (std::int64_t idx = 0; idx < total; ++idx) {
    const int i = static_cast<int>(idx / grid.n_theta);
    const double w = 1.0 + (i + 0.5) / grid.n_r;
    den += w;
    if (kernels::get_bit(bits, idx)) num += w;
  }
  DensityEstimate d;
  d.value = num / den;
  d.stderr_ = 0.0;
  d.samples = total;
  d.R = R;
  d.method = "polar-grid";
  d.seed = 0;
  return d;
}

// ---------------------------------------------------------------------------
// exclusion cover

bool ExclusionCover::covers(cplx z) const {
  for (std::size_t k = 0; k < centers.size(); ++k)
    if (std::abs(z - centers[k]) < radii[k]) return true;
  return false;
}

double ExclusionCover::sum_radii_sq() const {
  double s = 0.0;
  for (const double r : radii) s += r * r;
  return s;
}

namespace {

// Largest p such that at least p of the alive points lie within H sqrt(p/m)
// of the candidate. A point at distance d participates at every level
// p >= m d^2 / H^2, so a level histogram answers all p in one pass.
struct LevelScratch {
  std::vector<int> buckets;
};

int best_level(const std::vector<cplx>& alive, cplx cand, double H, long long m,
               LevelScratch& scratch) {
  const int n = static_cast<int>(alive.size());
  auto& b = scratch.buckets;
  b.assign(static_cast<std::size_t>(n) + 2, 0);
  const double scale = static_cast<double>(m) / (H * H);
  for (const auto& z : alive) {
    const double q = std::norm(z - cand) * scale;
    int lvl = q <= 1.0 ? 1 : static_cast<int>(std::ceil(q - 1e-12));
    if (lvl > n) lvl = n + 1;
    ++b[static_cast<std::size_t>(lvl)];
  }
  int best = 0, cum = 0;
  for (int p = 1; p <= n; ++p) {
    cum += b[static_cast<std::size_t>(p)];
    if (cum >= p) best = p;
  }
  return best;
}

}  // namespace

ExclusionCover exclusion_cover(const std::vector<cplx>& points, double H, int probes,
                               std::uint64_t probe_seed) {
  if (points.empty()) throw Error("exclusion_cover needs at least one point");
  if (!(H > 0.0)) throw Error("exclusion_cover needs H > 0");
  const long long m = static_cast<long long>(points.size());
  const double shrink = 1.0 - 1e-12;  // keeps the squared-radius budget exact in fp

  ExclusionCover cover;
  cover.H = H;
  cover.m = m;

  std::vector<cplx> alive = points;
  while (!alive.empty()) {
    const std::size_t n = alive.size();
    // candidates: alive points plus midpoints with the nearest alive neighbour
    std::vector<cplx> cands = alive;
    if (n >= 2) {
      for (std::size_t i = 0; i < n; ++i) {
        double bd = 1e308;
        std::size_t bj = i;
        for (std::size_t jj = 0; jj < n; ++jj) {
          if (jj == i) continue;
          const double d = std::abs(alive[i] - alive[jj]);
          if (d < bd) {
            bd = d;
            bj = jj;
          }
        }
        cands.push_back(0.5 * (alive[i] + alive[bj]));
      }
    }

    int best_p = 0;
    cplx best_c;
    LevelScratch scratch;
    for (const auto& c : cands) {
      const int p = best_level(alive, c, H, m, scratch);
      if (p > best_p) {
        best_p = p;
        best_c = c;
      }
    }

    if (best_p <= 1) {
      // no pair is H sqrt(2/m)-close to any candidate: finish with singletons
      const double rad = 2.0 * H * std::sqrt(1.0 / static_cast<double>(m)) * shrink;
      for (const auto& z : alive) {
        cover.centers.push_back(z);
        cover.radii.push_back(rad);
      }
      break;
    }

    const double capture = H * std::sqrt(static_cast<double>(best_p) / static_cast<double>(m));
    std::vector<cplx> next;
    next.reserve(n);
    for (const auto& z : alive)
      if (std::abs(z - best_c) > capture) next.push_back(z);
    cover.centers.push_back(best_c);
    cover.radii.push_back(2.0 * capture * shrink);
    alive.swap(next);
  }

  if (cover.sum_radii_sq() > 4.0 * H * H)
    throw VerificationFailed("exclusion cover exceeded its squared-radius budget");

  // probe the sum bound outside the union
  if (probes > 0) {
    double xmin = 1e308, xmax = -1e308, ymin = 1e308, ymax = -1e308;
    for (const auto& z : points) {
      xmin = std::min(xmin, z.real());
      xmax = std::max(xmax, z.real());
      ymin = std::min(ymin, z.imag());
      ymax = std::max(ymax, z.imag());
    }
    const double pad = 4.0 * H + 1.0;
    const double bound = 2.0 * static_cast<double>(m) / H;
    long long done = 0;
    std::uint64_t counter = 0;
    while (done < probes) {
      if (++counter > 1000ull * static_cast<std::uint64_t>(probes) + 10000ull)
        break;  // the union may swallow nearly the whole padded box
      CounterRng rng(probe_seed, counter);
      const cplx z{rng.uniform(xmin - pad, xmax + pad), rng.uniform(ymin - pad, ymax + pad)};
      if (cover.covers(z)) continue;
      ++done;
      double s = 0.0;
      for (const auto& zk : points) s += 1.0 / std::abs(z - zk);
      if (s > bound * (1.0 + 1e-9))
        throw VerificationFailed("exclusion cover probe exceeded 2m/H");
    }
  }
  return cover;
}

// ---------------------------------------------------------------------------
// circle measure and Fourier coefficients

double circle_lower_measure(const FunctionModel& m, double r, double beta,
                            long long n_at_r, int theta_grid, int workers) {
  if (!(r > 0.0) || !(beta > 0.0) || !(beta < 1.0))
    throw Error("circle_lower_measure requires r > 0 and beta in (0,1)");
  // minimum-modulus scan: estimate the distance from the nearest zero via the
  // Newton step |f/f'|
  for (int i = 0; i < 4096; ++i) {
    const cplx z = r * std::exp(cplx(0.0, kTwoPi * i / 4096.0));
    try {
      const cplx ld = m.log_derivative(z);
      if (std::abs(ld) > 0.0 && 1.0 / std::abs(ld) < 1e-6 * r)
        throw BoundaryZero("zero of f too close to the circle");
    } catch (const AtZero&) {
      throw BoundaryZero("zero of f on the circle");
    }
  }

  const double threshold = beta * static_cast<double>(n_at_r) / r;
  ErrorLatch latch;
  const auto hits = kernels::count_true(theta_grid, workers, [&](std::int64_t i) {
    const cplx z = r * std::exp(cplx(0.0, kTwoPi * static_cast<double>(i) / theta_grid));
    try {
      return std::abs(m.log_derivative(z)) >= threshold;
    } catch (const std::exception& e) {
      latch.record(i, e.what());
      return false;
    }
  });
  latch.rethrow_if_set("circle_lower_measure");
  return kTwoPi * static_cast<double>(hits) / static_cast<double>(theta_grid);
}

namespace {

cplx int_pow(cplx base, int e) {
  cplx acc = 1.0;
  for (int i = 0; i < e; ++i) acc *= base;
  return acc;
}

}  // namespace

FourierReport fourier_coefficients(const std::vector<cplx>& zeros, double r,
                                   int m_lo, int m_hi, int q, double mu) {
  if (!(mu > 0.0)) throw Error("fourier_coefficients requires mu > 0");
  FourierReport rep;
  rep.r = r;
  rep.q = q;
  rep.mu = mu;
  rep.tail_cut = 0.0;
  long long n_r = 0;
  for (const auto& z : zeros) {
    const double az = std::abs(z);
    rep.tail_cut = std::max(rep.tail_cut, az);
    if (az <= r) ++n_r;
  }
  rep.n_r = n_r;
  const bool wants_upper = m_hi > q;
  if (wants_upper && rep.tail_cut < r * std::pow(2.0, 20.0 / mu))
    throw TailTooShort("zero list must reach r * 2^(20/mu) for the truncated sums");

  for (int k = m_lo; k <= m_hi; ++k) {
    FourierCoeff fc;
    fc.m = k;
    cplx sum = 0.0;
    if (k > q) {
      for (const auto& z : zeros) {
        if (std::abs(z) <= r) continue;
        sum += int_pow(r / z, k);  // (z/r)^{-m}
      }
      fc.b = -sum;
      fc.bound = static_cast<double>(n_r) * mu / (static_cast<double>(k) - mu);
      fc.within = std::abs(fc.b) <= fc.bound * (1.0 + 1e-9);
    } else if (k < 0) {
      for (const auto& z : zeros) {
        const double az = std::abs(z);
        if (az >= r) continue;
        if (az < 1e-300) continue;  // a zero at the origin contributes 0
        sum += int_pow(z / r, -k);
      }
      fc.b = sum;
      fc.bound = 2.0 * mu / (mu - static_cast<double>(k)) * static_cast<double>(n_r);
      fc.within = std::abs(fc.b) <= fc.bound * (1.0 + 1e-9);
    } else if (k == 0) {
      // inside primary factors contribute their unit term: b_0 = n(r)
      fc.b = static_cast<double>(n_r);
      fc.bound = std::numeric_limits<double>::infinity();
      fc.within = true;
    } else {
      // 1 <= m <= q: reversed inside sums; no envelope applies
      for (const auto& z : zeros) {
        const double az = std::abs(z);
        if (az >= r || az < 1e-300) continue;
        sum += int_pow(r / z, k);
      }
      fc.b = sum;
      fc.bound = std::numeric_limits<double>::infinity();
      fc.within = true;
    }
    rep.all_within = rep.all_within && fc.within;
    rep.coeffs.push_back(fc);
  }
  return rep;
}

// ---------------------------------------------------------------------------
// density pipeline

namespace {

long long count_with_bump(const FunctionModel& m, cplx a, double r) {
  for (int attempt = 0;; ++attempt) {
    try {
      return count_points(m, a, r);
    } catch (const BoundaryZero&) {
      if (attempt >= 4) throw;
      r *= 1.000173;
    }
  }
}

}  // namespace

TwoSidedDensityReport two_sided_density_pipeline(const FunctionModel& m, const std::vector<cplx>& targets,
                                 double R, const TSetParams& params, double d,
                                 const LogMFn& logM_at, const MonteCarlo& mc) {
  if (targets.empty()) throw Error("two_sided_density_pipeline needs at least one target");
  for (std::size_t i = 0; i < targets.size(); ++i)
    for (std::size_t j = i + 1; j < targets.size(); ++j)
      if (std::abs(targets[i] - targets[j]) < 2.0 * d)
        throw TargetsTooClose("targets must be pairwise at least 2d apart");

  TwoSidedDensityReport rep;
  rep.R = R;
  rep.d = d;
  rep.gamma = params.alpha1;
  rep.tau = params.alpha2;
  rep.sigma = params.alpha1 / (4.0 * static_cast<double>(targets.size()));
  for (const auto& a : targets)
    if (std::abs(a) > 2.0 * d * static_cast<double>(targets.size()) * (1.0 + 1e-12))
      rep.targets_in_disk = false;

  auto plain_small = [&](cplx z) {
    return std::abs(log_deriv(m, z)) <= rep.tau * logM_at(std::abs(z));
  };
  rep.U_tau_plain = region_density(plain_small, R, mc);

  for (const auto& a : targets) {
    TargetReport tr;
    tr.a = a;
    auto shifted = [&](cplx z) {
      const cplx v = m.eval(z);
      return std::abs(log_deriv(m, z) * v / (v - a));
    };
    auto in_V = [&](cplx z) { return shifted(z) >= rep.gamma * logM_at(std::abs(z)); };
    auto in_U = [&](cplx z) { return shifted(z) <= rep.tau * logM_at(std::abs(z)); };
    auto in_C = [&](cplx z) { return std::abs(m.eval(z) - a) <= d; };
    auto in_W = [&](cplx z) {
      return in_U(z) && plain_small(z) && in_V(z) && !in_C(z);
    };
    tr.V_gamma = region_density(in_V, R, mc);
    tr.U_tau_shift = region_density(in_U, R, mc);
    tr.C_small = region_density(in_C, R, mc);
    tr.W = region_density(in_W, R, mc);

    // every sampled W point must satisfy the two-sided conclusion
    auto violates = [&](cplx z) {
      if (!in_W(z)) return false;
      const double logM = logM_at(std::abs(z));
      const double t = std::abs(log_deriv(m, z));
      const bool ok = t >= rep.sigma * logM * (1.0 - 1e-9) &&
                      t <= rep.tau * logM * (1.0 + 1e-9) &&
                      m.log_abs(z) >= -1e-9;
      return !ok;
    };
    const auto bad = region_density(violates, R, mc);
    tr.w_violations = static_cast<long long>(std::llround(bad.value * static_cast<double>(bad.samples)));
    tr.two_sided_ok = tr.w_violations == 0;

    const long long n2 = count_with_bump(m, a, 2.0 * R);
    const long long n4 = count_with_bump(m, a, 4.0 * R);
    tr.n_growth_ratio = n2 > 0 ? static_cast<double>(n4) / static_cast<double>(n2)
                               : static_cast<double>(n4);
    rep.targets.push_back(tr);
  }
  return rep;
}

}  // namespace dimlab
