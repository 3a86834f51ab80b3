#include "dimlab/construction.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dimlab/growth.hpp"
#include "dimlab/rng.hpp"

namespace dimlab {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;
constexpr double kTwoPi = 2.0 * kPi;
constexpr double kLog2 = 0.6931471805599453094172321214581766;

cplx annulus_sample(double R, std::uint64_t seed, std::uint64_t index) {
  CounterRng rng(seed, index);
  const double r = R * std::sqrt(1.0 + 3.0 * rng.next_double());
  const double th = kTwoPi * rng.next_double();
  return r * cplx(std::cos(th), std::sin(th));
}

// rectangle targets in the h plane
struct HRect {
  double re_lo, re_hi, im_lo, im_hi;
  cplx corner(int k) const {
    switch (k & 3) {
      case 0: return {re_lo, im_lo};
      case 1: return {re_hi, im_lo};
      case 2: return {re_hi, im_hi};
      default: return {re_lo, im_hi};
    }
  }
};

HRect outer_rect(int nu) {
  return {-1.0, 1.0, 8.0 * kPi * nu - 3.0 * kPi, 8.0 * kPi * nu + 3.0 * kPi};
}
HRect inner_rect(int nu) {
  return {0.0, kLog2, 8.0 * kPi * nu - 2.0 * kPi, 8.0 * kPi * nu + 2.0 * kPi};
}

double rect_reach(int nu) {
  const HRect r = outer_rect(nu);
  double best = 0.0;
  for (int k = 0; k < 4; ++k) best = std::max(best, std::abs(r.corner(k)));
  return best;
}

// Continuation of h(delta) = log f(a+delta) - log f(a) along paths of targets.
struct HTracer {
  const FunctionModel& m;
  cplx a;
  double t;
  cplx delta{0.0, 0.0};
  cplx h{0.0, 0.0};
  double worst_residual = 0.0;

  HTracer(const FunctionModel& mm, cplx aa, double tt) : m(mm), a(aa), t(tt) {}

  void solve(cplx w, double tol = 1e-12) {
    for (int it = 0; it < 60; ++it) {
      const cplx err = h - w;
      if (std::abs(err) <= tol) {
        worst_residual = std::max(worst_residual, std::abs(err));
        return;
      }
      cplx hp;
      try {
        hp = m.log_derivative(a + delta);
      } catch (const AtZero&) {
        throw ContinuationLost("trace ran into a zero of f");
      }
      if (!(std::abs(hp) > 1e-300)) throw ContinuationLost("vanishing h'");
      cplx step = (w - h) / hp;
      const double cap = 0.25 * t;
      if (std::abs(step) > cap) step *= cap / std::abs(step);
      const cplx dh = m.log_ratio(a + delta, step);
      delta += step;
      h += dh;
      if (std::abs(delta) > 1.25 * t)
        throw ContinuationLost("trace left the island disk");
    }
    throw ContinuationLost("island newton stalled");
  }

  // straight path to w in short hops
  void walk_to(cplx w, double hop = 0.5) {
    const cplx start = h;
    const double len = std::abs(w - start);
    const int steps = std::max(1, static_cast<int>(std::ceil(len / hop)));
    for (int k = 1; k <= steps; ++k)
      solve(start + (w - start) * (static_cast<double>(k) / steps));
  }
};

// winding of f along |delta| = t around the anchor: zero count inside
bool disk_zero_free(const FunctionModel& m, cplx a, double t) {
  const int n = 512;
  cplx sum = 0.0;
  try {
    for (int i = 0; i < n; ++i) {
      const double th = kTwoPi * i / n;
      const cplx d = t * cplx(std::cos(th), std::sin(th));
      sum += m.log_derivative(a + d) * cplx(0.0, 1.0) * d;  // f'/f dz, dz = i delta dth
    }
  } catch (const AtZero&) {
    return false;
  }
  const cplx integral = sum * (kTwoPi / n);
  const double count = (integral / cplx(0.0, kTwoPi)).real();
  return std::abs(count) < 0.25;
}

}  // namespace

double island_radius(double R, double mu_ahlfors, double alpha1, double logM_at_R) {
  if (!(R > 0) || !(mu_ahlfors > 0) || !(alpha1 > 0) || !(logM_at_R > 0))
    throw Error("island_radius requires positive inputs");
  return 2.0 * mu_ahlfors * R / (alpha1 * logM_at_R);
}

IslandGeometry find_island(const FunctionModel& m, cplx a, double t, int nu,
                           const IslandOptions& opt) {
  if (nu < 1 || nu > 3) throw Error("island index nu must be 1, 2 or 3");
  if (!(t > 0)) throw Error("island disk radius must be positive");

  IslandGeometry isl;
  isl.a = a;
  isl.t = t;
  isl.nu = nu;
  isl.zero_free_disk = disk_zero_free(m, a, t);

  cplx ld_a;
  try {
    ld_a = m.log_derivative(a);
  } catch (const AtZero&) {
    throw NoIsland("anchor sits on a zero of f");
  }
  if (opt.mu_gate > 0.0 && std::abs(ld_a) < opt.mu_gate / t)
    throw NoIsland("derivative gate |f'/f| >= mu/t fails at the anchor");

  const HRect outer = outer_rect(nu);
  const HRect inner = inner_rect(nu);
  HTracer tr(m, a, t);

  // into the window, then the inner boundary loop
  const cplx inner_mid{0.5 * (inner.re_lo + inner.re_hi),
                       0.5 * (inner.im_lo + inner.im_hi)};
  tr.walk_to(inner_mid);

  auto trace_loop = [&](const HRect& rect, int samples, std::vector<cplx>& out) {
    // entry at the midpoint of the left edge
    const cplx entry{rect.re_lo, 0.5 * (rect.im_lo + rect.im_hi)};
    tr.walk_to(entry);
    const double w_re = rect.re_hi - rect.re_lo, w_im = rect.im_hi - rect.im_lo;
    const double perim = 2.0 * (w_re + w_im);
    out.clear();
    out.reserve(static_cast<std::size_t>(samples));
    for (int k = 0; k <= samples; ++k) {
      // walk the rectangle from the entry point, counterclockwise
      double s = perim * k / samples;
      cplx w;
      const double half_left = 0.5 * w_im;
      if (s < half_left) {
        w = {rect.re_lo, entry.imag() - s};
      } else if ((s -= half_left) < w_re) {
        w = {rect.re_lo + s, rect.im_lo};
      } else if ((s -= w_re) < w_im) {
        w = {rect.re_hi, rect.im_lo + s};
      } else if ((s -= w_im) < w_re) {
        w = {rect.re_hi - s, rect.im_hi};
      } else {
        s -= w_re;
        w = {rect.re_lo, rect.im_hi - s};
      }
      tr.solve(w);
      if (k < samples) out.push_back(tr.delta);
    }
    // return to the window midpoint so the next trace starts from a safe spot
    tr.walk_to(inner_mid);
  };

  trace_loop(inner, std::max(opt.boundary_samples, 40), isl.V_boundary);

  // interior mesh over the inner rectangle: area, derivative floor, distortion
  const int g = std::max(opt.grid, 8);
  const double dre = (inner.re_hi - inner.re_lo) / g;
  const double dim = (inner.im_hi - inner.im_lo) / g;
  double area = 0.0, min_hp = 1e308, max_psi = 0.0, min_psi = 1e308;
  int visited = 0;
  for (int row = 0; row < g; ++row) {
    for (int cc = 0; cc < g; ++cc) {
      const int col = (row % 2 == 0) ? cc : (g - 1 - cc);  // serpentine
      const cplx w{inner.re_lo + (col + 0.5) * dre, inner.im_lo + (row + 0.5) * dim};
      tr.solve(w);
      const double hp = std::abs(m.log_derivative(a + tr.delta));
      min_hp = std::min(min_hp, hp);
      const double psi = 1.0 / hp;
      max_psi = std::max(max_psi, psi);
      min_psi = std::min(min_psi, psi);
      area += psi * psi * dre * dim;
      ++visited;
    }
  }
  (void)visited;
  tr.walk_to(inner_mid);
  trace_loop(outer, std::max(opt.boundary_samples, 40), isl.U_boundary);

  isl.area_V = area;
  isl.beta_hat = area / (t * t);
  isl.gamma_hat = t * min_hp;
  isl.max_bijectivity_residual = tr.worst_residual;
  const double psi_a = 1.0 / std::abs(ld_a);
  isl.koebe_ratio = std::max(max_psi / psi_a, psi_a / min_psi);

  // validation
  for (const auto& d : isl.U_boundary)
    if (std::abs(d) > t * (1.0 + 1e-9))
      throw ValidationFailed("island boundary escapes the disk");
  std::vector<cplx> upoly = isl.U_boundary;
  for (const auto& d : isl.V_boundary) {
    bool inside = false;
    // V strictly inside U up to boundary tolerance
    if (!upoly.empty()) {
      PolygonRegion up{upoly};
      inside = region_contains_point(up, d);
    }
    if (!inside) throw ValidationFailed("inner island region escapes the outer one");
  }
  if (!(isl.area_V > 0.0)) throw ValidationFailed("island with vanishing area");
  if (isl.max_bijectivity_residual > 1e-9)
    throw ValidationFailed("island bijectivity residual above 1e-9");
  if (isl.koebe_ratio > 12.0 * (1.0 + 1e-9))
    throw ValidationFailed("island distortion above the Koebe envelope");
  return isl;
}

DiskPacking pack_disks(const FunctionModel& m, const TSetParams& params, double R,
                       double t, long long candidate_budget, std::uint64_t seed,
                       const LogMFn& logM_at) {
  if (!(t < R / 4.0)) throw Error("pack_disks requires t < R/4");
  if (candidate_budget <= 0) throw Error("pack_disks needs a positive budget");
  DiskPacking pk;
  pk.R = R;
  pk.t = t;
  long long hits = 0;
  for (long long i = 0; i < candidate_budget; ++i) {
    const cplx z = annulus_sample(R, seed, static_cast<std::uint64_t>(i));
    bool member;
    try {
      member = tset_member(m, params, z, logM_at);
    } catch (const AtZero&) {
      member = false;
    }
    if (!member) continue;
    ++hits;
    const double az = std::abs(z);
    if (az < R + t || az > 2.0 * R - t) continue;
    bool clear = true;
    for (const auto& c : pk.centers)
      if (std::abs(z - c) < 2.0 * t) {
        clear = false;
        break;
      }
    if (clear) pk.centers.push_back(z);
  }
  pk.candidates = candidate_budget;
  pk.eta_hat = static_cast<double>(hits) / static_cast<double>(candidate_budget);
  pk.packing_floor = 0.5 * pk.eta_hat * (R / t) * (R / t);
  if (pk.centers.empty()) throw EmptyPacking("no acceptable disk center found");
  return pk;
}

// ---------------------------------------------------------------------------
// leveled construction

namespace {

struct IslandPick {
  cplx a;
  IslandGeometry isl;
};

// Island-fit packing: accept anchors whose traced outer region stays in the
// annulus and misses the ones already accepted. Used when the t-disks of the
// maximal t-disk packing cannot fit the annulus width (exp at moderate R).
std::vector<IslandPick> pack_islands(const FunctionModel& m, const TSetParams& params,
                                     double R, const LogMFn& logM_at,
                                     const BuildBudgets& budgets, std::uint64_t seed,
                                     bool cap_anchor, double max_log_image) {
  std::vector<IslandPick> picks;
  std::vector<PolygonRegion> hulls;
  for (long long i = 0; i < budgets.packing_budget &&
                        static_cast<int>(picks.size()) < budgets.max_children;
       ++i) {
    const cplx z = annulus_sample(R, seed, static_cast<std::uint64_t>(i));
    if (cap_anchor && m.log_abs(z) > max_log_image) continue;
    bool member;
    try {
      member = tset_member(m, params, z, logM_at);
    } catch (const AtZero&) {
      member = false;
    } catch (const InsufficientProfile&) {
      member = false;
    }
    if (!member) continue;

    for (int nu = 1; nu <= 3; ++nu) {
      double hp;
      try {
        hp = std::abs(m.log_derivative(z));
      } catch (const AtZero&) {
        break;
      }
      const double t_req = 1.25 * rect_reach(nu) / hp;
      IslandGeometry isl;
      try {
        isl = find_island(m, z, t_req, nu);
      } catch (const Error&) {
        continue;  // try the next target rectangle
      }
      // the traced outer region must live inside the annulus
      bool fits = true;
      for (const auto& d : isl.U_boundary) {
        const double az = std::abs(z + d);
        if (az < R * (1.0 + 1e-7) || az > 2.0 * R * (1.0 - 1e-7)) {
          fits = false;
          break;
        }
      }
      if (!fits) continue;
      PolygonRegion hull;
      hull.vertices.reserve(isl.U_boundary.size());
      for (const auto& d : isl.U_boundary) hull.vertices.push_back(z + d);
      bool clear = true;
      for (const auto& other : hulls)
        if (!regions_disjoint(Region(hull), Region(other), 0.0)) {
          clear = false;
          break;
        }
      if (!clear) continue;
      hulls.push_back(std::move(hull));
      picks.push_back({z, std::move(isl)});
      break;
    }
  }
  if (picks.empty()) throw EmptyPacking("no island-bearing anchor found in the annulus");
  return picks;
}

double polygon_area(const std::vector<cplx>& vs) {
  double acc = 0.0;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    const cplx p = vs[i], q = vs[(i + 1) % vs.size()];
    acc += p.real() * q.imag() - q.real() * p.imag();
  }
  return 0.5 * std::abs(acc);
}

// series branches keep tiny frame offsets at full relative precision
cplx log1pc(cplx x) {
  if (std::abs(x) < 1e-4) return x * (1.0 - x * 0.5 + x * x / 3.0);
  return std::log(1.0 + x);
}
cplx expm1c(cplx x) {
  if (std::abs(x) < 1e-4) return x * (1.0 + x * 0.5 + x * x / 6.0);
  return std::exp(x) - 1.0;
}

}  // namespace

BuildResult build_levels(const FunctionModel& m, double R0, int depth,
                         const TSetParams& params, const BuildBudgets& budgets,
                         std::uint64_t seed) {
  if (depth < 1) throw Error("build_levels needs depth >= 1");
  if (depth > 2)
    throw Error("depth > 2 puts cells below double-precision resolution at the root scale");
  if (depth == 2 && !(m.supports_log_frame() && m.has_logM_oracle()))
    throw Error("depth 2 requires a model with a closed-form log frame");
  if (!(params.q > std::exp(2.0)) && depth >= 2)
    throw Error("the diameter law needs q > e^2");

  LogMFn logM;
  GrowthProfile profile;
  if (m.has_logM_oracle()) {
    logM = [&m](double r) { return m.logM_oracle(r); };
  } else {
    profile = build_profile(m, std::max(1.0, R0 / 8.0), 16.0 * R0);
    logM = [p = profile](double r) { return p.logM_at(r); };
  }

  BuildResult out;
  out.q = params.q;
  out.collection.ambient_dim = 2;

  // level 0: the annulus, stored under its circumscribing disk
  LevelInfo root;
  Cell root_cell;
  root_cell.id = 0;
  root_cell.parent = -1;
  root_cell.region = DiskRegion{cplx(0, 0), 2.0 * R0};
  root_cell.diameter = 4.0 * R0;
  root.cells.push_back(root_cell);
  root.d = 4.0 * R0;
  LevelReport rep0;
  rep0.level = 0;
  rep0.cells = 1;
  rep0.log_R = std::log(R0);

  // level 1 islands over A(R0)
  const auto picks = pack_islands(m, params, R0, logM, budgets, seed,
                                  /*cap_anchor=*/depth >= 2, budgets.max_anchor_real);
  LevelInfo level1;
  LevelReport rep1;
  rep1.level = 1;
  std::vector<PolygonRegion> vpolys;
  for (std::size_t j = 0; j < picks.size(); ++j) {
    const auto& pk = picks[j];
    PolygonRegion poly;
    poly.vertices.reserve(pk.isl.V_boundary.size());
    for (const auto& d : pk.isl.V_boundary) poly.vertices.push_back(pk.a + d);
    Cell cell;
    cell.id = static_cast<long long>(j);
    cell.parent = 0;
    cell.diameter = region_diameter(Region(poly)) * (1.0 + 1e-12);
    cell.region = poly;
    level1.cells.push_back(cell);
    vpolys.push_back(std::move(poly));

    rep1.koebe_ratio_max = std::max(rep1.koebe_ratio_max, pk.isl.koebe_ratio);
    rep1.forward_residual_max =
        std::max(rep1.forward_residual_max, pk.isl.max_bijectivity_residual);
    const double logR1 = m.log_abs(pk.a);
    rep1.log_R = std::max(rep1.log_R, logR1);
    if (logR1 < params.q * std::log(R0) * (1.0 - 1e-9)) rep1.radius_growth_ok = false;
  }
  rep1.cells = static_cast<long long>(level1.cells.size());
  double dmax1 = 0.0;
  for (const auto& c : level1.cells) dmax1 = std::max(dmax1, c.diameter);
  level1.d = dmax1 * (1.0 + 1e-12);
  rep1.max_diameter = dmax1;

  // measured density of the level-1 cells in the root disk
  {
    CounterRng rng(splitmix64(seed ^ 0x5b5b5b5bull), 1);
    long long hit = 0;
    const int n = budgets.density_samples;
    for (int i = 0; i < n; ++i) {
      const cplx z{rng.uniform(-2.0 * R0, 2.0 * R0), rng.uniform(-2.0 * R0, 2.0 * R0)};
      if (std::abs(z) > 2.0 * R0) continue;
      for (const auto& p : vpolys)
        if (region_contains_point(Region(p), z)) {
          ++hit;
          break;
        }
    }
    // fraction over the disk (rejection keeps the denominator honest)
    long long in_disk = 0;
    CounterRng rng2(splitmix64(seed ^ 0x5b5b5b5bull), 1);
    for (int i = 0; i < n; ++i) {
      const cplx z{rng2.uniform(-2.0 * R0, 2.0 * R0), rng2.uniform(-2.0 * R0, 2.0 * R0)};
      if (std::abs(z) <= 2.0 * R0) ++in_disk;
    }
    root.Delta = in_disk > 0 ? static_cast<double>(hit) / static_cast<double>(in_disk) : 0.0;
    rep0.Delta = root.Delta;
    rep0.max_diameter = 4.0 * R0;
  }

  out.collection.levels.push_back(std::move(root));

  if (depth == 1) {
    level1.Delta = 0.0;
    out.collection.levels.push_back(std::move(level1));
    out.levels = {rep0, rep1};
  } else {
    // level 2: islands at each image annulus, pulled back through the branch
    LevelInfo level2;
    LevelReport rep2;
    rep2.level = 2;
    double delta1_min = 1e308;
    long long next_id = 0;
    const cplx log_lambda = std::log(m.lambda());
    for (std::size_t j = 0; j < picks.size(); ++j) {
      const auto& pk = picks[j];
      const cplx wa = m.log_anchor(pk.a);  // log f(a_j)
      const double R1 = std::exp(m.log_abs(pk.a));
      const std::uint64_t seed_j = splitmix64(seed ^ (0x9e37ull + 77ull * j));
      const auto kids = pack_islands(m, params, R1, logM, budgets, seed_j,
                                     /*cap_anchor=*/false, 0.0);
      double kid_area = 0.0;
      for (const auto& kid : kids) {
        // branch window: Im(log a') + 2 pi k0 inside the inner rectangle of nu_j
        const cplx la = std::log(kid.a);
        const double target_center = wa.imag() + 8.0 * kPi * pk.isl.nu;
        const double k0 = std::round((target_center - la.imag()) / kTwoPi);
        const cplx omega = la + cplx(0.0, kTwoPi * k0);
        if (std::abs(omega.imag() - target_center) > 2.0 * kPi - 0.05)
          continue;  // window margin; practically never hit
        // w-frame vertices of the pulled-back cell
        std::vector<cplx> wverts;
        wverts.reserve(kid.isl.V_boundary.size());
        double diam_w = 0.0;
        for (const auto& dv : kid.isl.V_boundary)
          wverts.push_back(log1pc(dv / kid.a));
        for (std::size_t u = 0; u < wverts.size(); ++u)
          for (std::size_t v = u + 1; v < wverts.size(); ++v)
            diam_w = std::max(diam_w, std::abs(wverts[u] - wverts[v]));
        // frame forward residual: exp of the stored w-offset must land back on
        // the image cell's stored offsets
        double fres = 0.0;
        const double vdiam = region_diameter(Region(PolygonRegion{[&] {
          std::vector<cplx> abs_v;
          for (const auto& dv : kid.isl.V_boundary) abs_v.push_back(kid.a + dv);
          return abs_v;
        }()}));
        for (std::size_t u = 0; u < wverts.size(); ++u) {
          const cplx back = kid.a * expm1c(wverts[u]);
          fres = std::max(fres, std::abs(back - kid.isl.V_boundary[u]) / vdiam);
        }
        rep2.forward_residual_max = std::max(rep2.forward_residual_max, fres);

        // z-plane anchor of the cell: log f(z) = omega  =>  z = omega - log lambda
        const cplx zc = omega - log_lambda;
        Cell cell;
        cell.id = next_id++;
        cell.parent = static_cast<long long>(j);
        cell.diameter = diam_w * (1.0 + 1e-9);  // |psi'| = 1 in the exp frame
        cell.region = DiskRegion{zc, 0.5 * cell.diameter * (1.0 + 1e-9)};
        level2.cells.push_back(cell);

        kid_area += polygon_area(wverts);
        rep2.koebe_ratio_max = std::max(rep2.koebe_ratio_max, kid.isl.koebe_ratio);
        rep2.max_diameter = std::max(rep2.max_diameter, cell.diameter);
        const double logR2 = m.log_abs(kid.a);
        rep2.log_R = std::max(rep2.log_R, logR2);
        if (logR2 < params.q * std::log(R1) * (1.0 - 1e-9)) rep2.radius_growth_ok = false;
      }
      if (kids.empty()) continue;
      const double q_area = kLog2 * 4.0 * kPi;  // area of the inner rectangle
      delta1_min = std::min(delta1_min, kid_area / q_area);
    }
    if (level2.cells.empty()) throw EmptyPacking("no level-2 cells were built");
    rep2.cells = static_cast<long long>(level2.cells.size());
    level1.Delta = delta1_min < 1e307 ? delta1_min : 0.0;
    rep1.Delta = level1.Delta;
    level2.Delta = 0.0;
    level2.d = rep2.max_diameter * (1.0 + 1e-12);
    out.collection.levels.push_back(std::move(level1));
    out.collection.levels.push_back(std::move(level2));
    out.levels = {rep0, rep1, rep2};
  }

  // finite-depth nested-set estimate from the measured data, on the collection
  // rescaled so the root has unit diameter
  {
    std::vector<double> Delta, dcap;
    for (const auto& lv : out.collection.levels) {
      Delta.push_back(lv.Delta);
      dcap.push_back(lv.d / (4.0 * R0));
    }
    try {
      out.mcmullen_estimate = mcmullen_from_data(2, Delta, dcap, depth);
      out.mcmullen_vacuous = !(out.mcmullen_estimate > 0.0);
    } catch (const InvalidCollection&) {
      out.mcmullen_estimate = std::numeric_limits<double>::quiet_NaN();
      out.mcmullen_vacuous = true;
    }
  }
  return out;
}

}  // namespace dimlab
