#pragma once

#include <functional>
#include <variant>
#include <vector>

#include "dimlab/models.hpp"

namespace dimlab {

struct IntervalRegion {
  double lo = 0, hi = 0;
};
struct DiskRegion {
  cplx center;
  double radius = 0;
};
struct PolygonRegion {
  std::vector<cplx> vertices;  // counterclockwise, closed implicitly
};
using Region = std::variant<IntervalRegion, DiskRegion, PolygonRegion>;

double region_diameter(const Region& r);
bool region_contains_point(const Region& r, cplx z);
// conservative containment / disjointness with a scale-aware epsilon
bool region_contains(const Region& outer, const Region& inner, double eps);
bool regions_disjoint(const Region& a, const Region& b, double eps);

struct Cell {
  long long id = 0;
  long long parent = -1;
  Region region;
  double diameter = 0;
};

struct LevelInfo {
  std::vector<Cell> cells;
  double Delta = 0;  // declared density floor for dens(E_{l+1}, F); 0 = none
  double d = 0;      // declared diameter cap
};

// Leveled families of disjoint compact cells with parent links; the geometry
// backing the nested-set dimension bound.
struct NestedCollection {
  int ambient_dim = 2;
  std::vector<LevelInfo> levels;

  // Checks nesting, disjointness, child existence, diameter caps and (by
  // seeded sampling) the declared density floors. Throws InvalidCollection.
  void validate(std::uint64_t seed = 12345, int samples_per_cell = 2000) const;
};

// Finite-depth form of the nested-set bound:
//   n - max_{1 <= l <= depth} (sum_{j=1..l} |log Delta_j|) / |log d_l|
// computed from the declared per-level data. Only levels with d_l < 1 and all
// of Delta_1..Delta_l declared participate.
double mcmullen_lower_bound(const NestedCollection& c, int depth);
double mcmullen_from_data(int ambient_dim, const std::vector<double>& Delta,
                          const std::vector<double>& d, int depth);

NestedCollection cantor_middle_thirds(int depth);
NestedCollection four_corner_disks(int depth);

struct EscapeResult {
  enum class Kind { Escaped, Bounded, Overflow } kind = Kind::Bounded;
  int iterations = 0;
  double final_modulus = 0;
  // overflow counts as escape for set estimation
  bool escaped_for_dimension() const { return kind != Kind::Bounded; }
};

EscapeResult escape_test(const FunctionModel& m, cplx z, double escape_radius,
                         int max_iter);

struct Window {
  double x0 = 0, y0 = 0, side = 0;
};

struct BoxDimResult {
  double estimate = 0;
  std::vector<double> scales;
  std::vector<long long> counts;
  double residual = 0;
};

// Box-counting estimate: occupied = membership at the cell center or any of
// its corners (corner values are shared through a corner grid); slope of
// log N against log(1/eps) by least squares.
BoxDimResult box_dimension(const std::function<bool(cplx)>& member, const Window& w,
                           const std::vector<double>& scales, int workers = 0);

}  // namespace dimlab
