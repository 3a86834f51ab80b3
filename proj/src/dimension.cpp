#include "dimlab/dimension.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dimlab/kernels.hpp"
#include "dimlab/rng.hpp"

namespace dimlab {

namespace {

struct BBox {
  double x0 = 0, y0 = 0, x1 = 0, y1 = 0;
};

BBox bbox_of(const Region& r) {
  if (const auto* iv = std::get_if<IntervalRegion>(&r)) return {iv->lo, 0, iv->hi, 0};
  if (const auto* d = std::get_if<DiskRegion>(&r))
    return {d->center.real() - d->radius, d->center.imag() - d->radius,
            d->center.real() + d->radius, d->center.imag() + d->radius};
  const auto& poly = std::get<PolygonRegion>(r);
  BBox b{1e308, 1e308, -1e308, -1e308};
  for (const auto& v : poly.vertices) {
    b.x0 = std::min(b.x0, v.real());
    b.y0 = std::min(b.y0, v.imag());
    b.x1 = std::max(b.x1, v.real());
    b.y1 = std::max(b.y1, v.imag());
  }
  return b;
}

bool point_in_polygon(const std::vector<cplx>& vs, cplx z) {
  bool in = false;
  const std::size_t n = vs.size();
  for (std::size_t i = 0, j = n - 1; i < n; j = i++) {
    const double xi = vs[i].real(), yi = vs[i].imag();
    const double xj = vs[j].real(), yj = vs[j].imag();
    const bool intersects = ((yi > z.imag()) != (yj > z.imag())) &&
                            (z.real() < (xj - xi) * (z.imag() - yi) / (yj - yi) + xi);
    if (intersects) in = !in;
  }
  return in;
}

double region_scale(const Region& r) {
  const BBox b = bbox_of(r);
  return std::max({std::abs(b.x0), std::abs(b.x1), std::abs(b.y0), std::abs(b.y1), 1.0});
}

}  // namespace

double region_diameter(const Region& r) {
  if (const auto* iv = std::get_if<IntervalRegion>(&r)) return iv->hi - iv->lo;
  if (const auto* d = std::get_if<DiskRegion>(&r)) return 2.0 * d->radius;
  const auto& poly = std::get<PolygonRegion>(r);
  double best = 0.0;
  for (std::size_t i = 0; i < poly.vertices.size(); ++i)
    for (std::size_t j = i + 1; j < poly.vertices.size(); ++j)
      best = std::max(best, std::abs(poly.vertices[i] - poly.vertices[j]));
  return best;
}

bool region_contains_point(const Region& r, cplx z) {
  if (const auto* iv = std::get_if<IntervalRegion>(&r))
    return z.imag() == 0.0 && z.real() >= iv->lo && z.real() <= iv->hi;
  if (const auto* d = std::get_if<DiskRegion>(&r)) return std::abs(z - d->center) <= d->radius;
  return point_in_polygon(std::get<PolygonRegion>(r).vertices, z);
}

bool region_contains(const Region& outer, const Region& inner, double eps) {
  if (const auto* oi = std::get_if<IntervalRegion>(&outer)) {
    const auto* ii = std::get_if<IntervalRegion>(&inner);
    if (!ii) return false;
    return ii->lo >= oi->lo - eps && ii->hi <= oi->hi + eps;
  }
  if (const auto* od = std::get_if<DiskRegion>(&outer)) {
    if (const auto* id = std::get_if<DiskRegion>(&inner))
      return std::abs(id->center - od->center) + id->radius <= od->radius + eps;
    if (const auto* ip = std::get_if<PolygonRegion>(&inner)) {
      for (const auto& v : ip->vertices)
        if (std::abs(v - od->center) > od->radius + eps) return false;
      return true;
    }
  }
  if (const auto* op = std::get_if<PolygonRegion>(&outer)) {
    // vertex containment; adequate for the convex-ish cells used here
    std::vector<cplx> pts;
    if (const auto* id = std::get_if<DiskRegion>(&inner)) {
      for (int k = 0; k < 16; ++k) {
        const double th = 6.283185307179586 * k / 16;
        pts.push_back(id->center + id->radius * cplx(std::cos(th), std::sin(th)));
      }
    } else if (const auto* ip = std::get_if<PolygonRegion>(&inner)) {
      pts = ip->vertices;
    } else {
      return false;
    }
    for (const auto& v : pts) {
      bool inside = point_in_polygon(op->vertices, v);
      if (!inside) {
        // tolerate boundary-grazing vertices
        bool near = point_in_polygon(op->vertices, v + cplx(eps, eps)) ||
                    point_in_polygon(op->vertices, v - cplx(eps, eps)) ||
                    point_in_polygon(op->vertices, v + cplx(eps, -eps)) ||
                    point_in_polygon(op->vertices, v - cplx(eps, -eps));
        if (!near) return false;
      }
    }
    return true;
  }
  return false;
}

namespace {

bool segments_intersect(cplx p1, cplx p2, cplx q1, cplx q2) {
  auto cross = [](cplx u, cplx v) { return u.real() * v.imag() - u.imag() * v.real(); };
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

bool polygons_overlap(const std::vector<cplx>& A, const std::vector<cplx>& B) {
  for (const auto& v : A)
    if (point_in_polygon(B, v)) return true;
  for (const auto& v : B)
    if (point_in_polygon(A, v)) return true;
  for (std::size_t i = 0; i < A.size(); ++i)
    for (std::size_t j = 0; j < B.size(); ++j)
      if (segments_intersect(A[i], A[(i + 1) % A.size()], B[j], B[(j + 1) % B.size()]))
        return true;
  return false;
}

double dist_to_segment(cplx z, cplx a, cplx b) {
  const cplx ab = b - a;
  const double len2 = std::norm(ab);
  if (len2 == 0.0) return std::abs(z - a);
  double t = ((z - a).real() * ab.real() + (z - a).imag() * ab.imag()) / len2;
  t = std::clamp(t, 0.0, 1.0);
  return std::abs(z - (a + t * ab));
}

bool disk_polygon_overlap(const DiskRegion& d, const std::vector<cplx>& P) {
  if (point_in_polygon(P, d.center)) return true;
  for (std::size_t i = 0; i < P.size(); ++i)
    if (dist_to_segment(d.center, P[i], P[(i + 1) % P.size()]) <= d.radius) return true;
  return false;
}

}  // namespace

bool regions_disjoint(const Region& a, const Region& b, double eps) {
  const BBox ba = bbox_of(a), bb = bbox_of(b);
  if (ba.x1 < bb.x0 - eps || bb.x1 < ba.x0 - eps || ba.y1 < bb.y0 - eps ||
      bb.y1 < ba.y0 - eps)
    return true;
  if (const auto* ia = std::get_if<IntervalRegion>(&a)) {
    const auto* ib = std::get_if<IntervalRegion>(&b);
    if (ib) return ia->hi < ib->lo + eps || ib->hi < ia->lo + eps;
  }
  if (const auto* da = std::get_if<DiskRegion>(&a)) {
    if (const auto* db = std::get_if<DiskRegion>(&b))
      return std::abs(da->center - db->center) >= da->radius + db->radius - eps;
    if (const auto* pb = std::get_if<PolygonRegion>(&b))
      return !disk_polygon_overlap(*da, pb->vertices);
  }
  if (const auto* pa = std::get_if<PolygonRegion>(&a)) {
    if (const auto* db = std::get_if<DiskRegion>(&b))
      return !disk_polygon_overlap(*db, pa->vertices);
    if (const auto* pb = std::get_if<PolygonRegion>(&b))
      return !polygons_overlap(pa->vertices, pb->vertices);
  }
  return false;
}

// ---------------------------------------------------------------------------

void NestedCollection::validate(std::uint64_t seed, int samples_per_cell) const {
  if (levels.empty()) throw InvalidCollection("collection has no levels");
  if (ambient_dim != 1 && ambient_dim != 2)
    throw InvalidCollection("ambient dimension must be 1 or 2");

  for (std::size_t l = 0; l < levels.size(); ++l) {
    const auto& lv = levels[l];
    if (lv.cells.empty()) throw InvalidCollection("level without cells");
    for (const auto& c : lv.cells) {
      const double eps = 1e-9 * std::max(region_scale(c.region), c.diameter);
      if (region_diameter(c.region) > c.diameter + eps)
        throw InvalidCollection("stored diameter below the measured one");
      if (lv.d > 0 && c.diameter > lv.d * (1.0 + 1e-9))
        throw InvalidCollection("cell exceeds the level diameter cap");
    }
    // pairwise disjoint within the level
    for (std::size_t i = 0; i < lv.cells.size(); ++i)
      for (std::size_t j = i + 1; j < lv.cells.size(); ++j) {
        const double eps =
            1e-12 * std::max(region_scale(lv.cells[i].region), 1.0);
        if (!regions_disjoint(lv.cells[i].region, lv.cells[j].region, eps))
          throw InvalidCollection("cells within one level overlap");
      }
    if (l == 0) continue;
    const auto& up = levels[l - 1];
    std::vector<long long> child_count(up.cells.size(), 0);
    for (const auto& c : lv.cells) {
      if (c.parent < 0 || c.parent >= static_cast<long long>(up.cells.size()))
        throw InvalidCollection("child with no parent");
      const auto& p = up.cells[static_cast<std::size_t>(c.parent)];
      const double eps = 1e-9 * std::max(region_scale(p.region), 1.0);
      if (!region_contains(p.region, c.region, eps))
        throw InvalidCollection("child escapes its parent");
      ++child_count[static_cast<std::size_t>(c.parent)];
    }
    for (const auto n : child_count)
      if (n == 0) throw InvalidCollection("parent without a child");
  }

  // declared density floors, by sampling each parent cell
  for (std::size_t l = 0; l + 1 < levels.size(); ++l) {
    const double Delta = levels[l].Delta;
    if (Delta <= 0.0) continue;
    if (Delta > 1.0) throw InvalidCollection("density floor above one");
    for (std::size_t pi = 0; pi < levels[l].cells.size(); ++pi) {
      const auto& parent = levels[l].cells[pi];
      std::vector<const Cell*> kids;
      for (const auto& c : levels[l + 1].cells)
        if (c.parent == static_cast<long long>(pi)) kids.push_back(&c);
      const BBox b = bbox_of(parent.region);
      CounterRng rng(seed, pi * 7919 + l);
      long long in_parent = 0, in_kids = 0;
      for (int s = 0; s < samples_per_cell; ++s) {
        cplx z;
        if (ambient_dim == 1)
          z = cplx(rng.uniform(b.x0, b.x1), 0.0);
        else
          z = cplx(rng.uniform(b.x0, b.x1), rng.uniform(b.y0, b.y1));
        if (!region_contains_point(parent.region, z)) continue;
        ++in_parent;
        for (const auto* k : kids)
          if (region_contains_point(k->region, z)) {
            ++in_kids;
            break;
          }
      }
      if (in_parent == 0) throw InvalidCollection("degenerate parent cell");
      const double dens = static_cast<double>(in_kids) / static_cast<double>(in_parent);
      const double sigma = std::sqrt(Delta * (1.0 - Delta) / in_parent + 1e-12);
      if (dens < Delta - 4.0 * sigma - 0.02)
        throw InvalidCollection("sampled density below the declared floor");
    }
  }
}

double mcmullen_from_data(int ambient_dim, const std::vector<double>& Delta,
                          const std::vector<double>& d, int depth) {
  double worst = -1.0;
  double acc = 0.0;
  const std::size_t lmax = std::min({static_cast<std::size_t>(depth), d.size() - 1,
                                     Delta.size() - 1});
  for (std::size_t l = 1; l <= lmax; ++l) {
    const double dl = Delta[l];
    if (!(dl > 0.0) || dl > 1.0) break;  // undeclared floor ends the usable range
    acc += std::abs(std::log(dl));
    if (!(d[l] > 0.0) || d[l] >= 1.0) continue;
    worst = std::max(worst, acc / std::abs(std::log(d[l])));
  }
  if (worst < 0.0)
    throw InvalidCollection("no usable level: need declared floors and d_l < 1");
  const double est = static_cast<double>(ambient_dim) - worst;
  if (std::isnan(est)) throw InvalidCollection("nested-set ratio is NaN");
  return est;
}

double mcmullen_lower_bound(const NestedCollection& c, int depth) {
  c.validate();
  std::vector<double> Delta(c.levels.size()), d(c.levels.size());
  for (std::size_t l = 0; l < c.levels.size(); ++l) {
    Delta[l] = c.levels[l].Delta;
    d[l] = c.levels[l].d;
  }
  return mcmullen_from_data(c.ambient_dim, Delta, d, depth);
}

// ---------------------------------------------------------------------------
// synthetic families

NestedCollection cantor_middle_thirds(int depth) {
  NestedCollection c;
  c.ambient_dim = 1;
  long long next_id = 0;
  std::vector<std::pair<double, double>> cur{{0.0, 1.0}};
  std::vector<long long> parents{-1};
  for (int l = 0; l <= depth; ++l) {
    LevelInfo lv;
    lv.Delta = l < depth ? 2.0 / 3.0 : 0.0;
    lv.d = std::pow(3.0, -l);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      Cell cell;
      cell.id = next_id++;
      cell.parent = parents[i];
      cell.region = IntervalRegion{cur[i].first, cur[i].second};
      cell.diameter = cur[i].second - cur[i].first;
      lv.cells.push_back(cell);
    }
    c.levels.push_back(std::move(lv));
    if (l == depth) break;
    std::vector<std::pair<double, double>> next;
    std::vector<long long> next_parents;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const double a = cur[i].first, b = cur[i].second, len = (b - a) / 3.0;
      next.push_back({a, a + len});
      next_parents.push_back(static_cast<long long>(i));
      next.push_back({b - len, b});
      next_parents.push_back(static_cast<long long>(i));
    }
    cur = std::move(next);
    parents = std::move(next_parents);
  }
  return c;
}

NestedCollection four_corner_disks(int depth) {
  NestedCollection c;
  c.ambient_dim = 2;
  long long next_id = 0;
  std::vector<DiskRegion> cur{{cplx(0, 0), 0.5}};
  std::vector<long long> parents{-1};
  const double inv_sqrt2 = 0.7071067811865475244;
  for (int l = 0; l <= depth; ++l) {
    LevelInfo lv;
    lv.Delta = l < depth ? 0.25 : 0.0;
    lv.d = std::pow(4.0, -l);
    for (std::size_t i = 0; i < cur.size(); ++i) {
      Cell cell;
      cell.id = next_id++;
      cell.parent = parents[i];
      cell.region = cur[i];
      cell.diameter = 2.0 * cur[i].radius;
      lv.cells.push_back(cell);
    }
    c.levels.push_back(std::move(lv));
    if (l == depth) break;
    std::vector<DiskRegion> next;
    std::vector<long long> next_parents;
    for (std::size_t i = 0; i < cur.size(); ++i) {
      const double r = cur[i].radius, rr = r / 4.0, off = (r - rr) * inv_sqrt2;
      for (const auto& dir :
           {cplx(1, 1), cplx(1, -1), cplx(-1, 1), cplx(-1, -1)}) {
        next.push_back({cur[i].center + off * dir, rr});
        next_parents.push_back(static_cast<long long>(i));
      }
    }
    cur = std::move(next);
    parents = std::move(next_parents);
  }
  return c;
}

// ---------------------------------------------------------------------------

EscapeResult escape_test(const FunctionModel& m, cplx z, double escape_radius,
                         int max_iter) {
  if (!(escape_radius > 1.0)) throw Error("escape radius must exceed 1");
  if (max_iter < 1) throw Error("escape_test needs at least one iteration");
  EscapeResult res;
  cplx orbit = z;
  for (int it = 1; it <= max_iter; ++it) {
    try {
      orbit = m.eval(orbit);
    } catch (const DomainExceeded&) {
      res.kind = EscapeResult::Kind::Overflow;
      res.iterations = it;
      res.final_modulus = std::numeric_limits<double>::infinity();
      return res;
    }
    const double mod = std::abs(orbit);
    if (!std::isfinite(orbit.real()) || !std::isfinite(orbit.imag())) {
      res.kind = EscapeResult::Kind::Overflow;
      res.iterations = it;
      res.final_modulus = std::numeric_limits<double>::infinity();
      return res;
    }
    if (mod > escape_radius) {
      res.kind = EscapeResult::Kind::Escaped;
      res.iterations = it;
      res.final_modulus = mod;
      return res;
    }
  }
  res.kind = EscapeResult::Kind::Bounded;
  res.iterations = max_iter;
  res.final_modulus = std::abs(orbit);
  return res;
}

BoxDimResult box_dimension(const std::function<bool(cplx)>& member, const Window& w,
                           const std::vector<double>& scales, int workers) {
  if (scales.size() < 4) throw Error("box_dimension needs at least 4 scales");
  double smin = 1e308, smax = 0;
  for (const double e : scales) {
    smin = std::min(smin, e);
    smax = std::max(smax, e);
  }
  if (smax / smin < 100.0 * (1.0 - 1e-12))
    throw Error("box_dimension scales must span at least two decades");

  // occupancy is sampled once, on the finest grid (cell centers plus the
  // shared corner lattice); coarser counts aggregate that bitmap so that all
  // scales see the same set
  const double cells_d = w.side / smin;
  const long long n = std::llround(cells_d);
  if (std::abs(cells_d - static_cast<double>(n)) > 1e-9 || n < 1)
    throw Error("window side must be an integer multiple of the finest scale");
  for (const double eps : scales) {
    const double f = eps / smin;
    if (std::abs(f - std::round(f)) > 1e-9)
      throw Error("every scale must be an integer multiple of the finest one");
  }

  const long long corners = (n + 1) * (n + 1);
  const auto corner_bits = kernels::fill_bits(corners, workers, [&](std::int64_t idx) {
    const long long i = idx % (n + 1), j = idx / (n + 1);
    return member(cplx(w.x0 + smin * static_cast<double>(i),
                       w.y0 + smin * static_cast<double>(j)));
  });
  const auto fine_bits = kernels::fill_bits(n * n, workers, [&](std::int64_t idx) {
    const long long i = idx % n, j = idx / n;
    if (kernels::get_bit(corner_bits, j * (n + 1) + i)) return true;
    if (kernels::get_bit(corner_bits, j * (n + 1) + i + 1)) return true;
    if (kernels::get_bit(corner_bits, (j + 1) * (n + 1) + i)) return true;
    if (kernels::get_bit(corner_bits, (j + 1) * (n + 1) + i + 1)) return true;
    return member(cplx(w.x0 + smin * (static_cast<double>(i) + 0.5),
                       w.y0 + smin * (static_cast<double>(j) + 0.5)));
  });

  BoxDimResult res;
  for (const double eps : scales) {
    const long long f = std::llround(eps / smin);
    const long long blocks = n / f;
    const long long count = static_cast<long long>(
        kernels::count_true(blocks * blocks, workers, [&](std::int64_t idx) {
          const long long bi = idx % blocks, bj = idx / blocks;
          for (long long j = bj * f; j < (bj + 1) * f; ++j)
            for (long long i = bi * f; i < (bi + 1) * f; ++i)
              if (kernels::get_bit(fine_bits, j * n + i)) return true;
          return false;
        }));
    res.scales.push_back(eps);
    res.counts.push_back(count);
  }

  bool varied = false;
  for (std::size_t i = 1; i < res.counts.size(); ++i)
    if (res.counts[i] != res.counts[0]) varied = true;
  for (const auto c : res.counts)
    if (c == 0) throw DegenerateRegression("a scale produced zero occupied cells");
  if (!varied) throw DegenerateRegression("occupied counts do not vary across scales");

  // least squares of log N against log(1/eps)
  const std::size_t k = res.scales.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = std::log(1.0 / res.scales[i]);
    const double y = std::log(static_cast<double>(res.counts[i]));
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = k * sxx - sx * sx;
  res.estimate = (k * sxy - sx * sy) / denom;
  const double intercept = (sy - res.estimate * sx) / k;
  double rss = 0;
  for (std::size_t i = 0; i < k; ++i) {
    const double x = std::log(1.0 / res.scales[i]);
    const double y = std::log(static_cast<double>(res.counts[i]));
    const double e = y - (intercept + res.estimate * x);
    rss += e * e;
  }
  res.residual = std::sqrt(rss / k);
  return res;
}

}  // namespace dimlab
