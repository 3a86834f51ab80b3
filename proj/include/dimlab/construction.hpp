#pragma once

#include <cstdint>

#include "dimlab/dimension.hpp"
#include "dimlab/logderiv.hpp"
#include "dimlab/models.hpp"

namespace dimlab {

// t(R) = 2 mu R / (alpha1 log M(R,f))
double island_radius(double R, double mu_ahlfors, double alpha1, double logM_at_R);

// One island: a subdomain U of D(a,t) mapped bijectively by
// h(z) = log f(z) - log f(a) onto the rectangle
// D_nu = {|Re w| < 1, |Im w - 8 pi nu| < 3 pi}, with V the preimage of
// Q_nu = {0 <= Re w <= log 2, |Im w - 8 pi nu| <= 2 pi}. Geometry is stored as
// offsets from a, so it stays meaningful at anchors where f itself is huge.
struct IslandGeometry {
  cplx a;
  double t = 0;
  int nu = 1;
  std::vector<cplx> U_boundary;  // offsets delta with a + delta on the edge of U
  std::vector<cplx> V_boundary;
  double area_V = 0;
  double beta_hat = 0;                  // area_V / t^2
  double gamma_hat = 0;                 // t * min |f'/f| over V
  double max_bijectivity_residual = 0;  // max |h(delta) - w| over boundary targets
  double koebe_ratio = 0;               // max |psi'| / |psi'(a-side)| over samples
  bool zero_free_disk = true;           // min-modulus scan verdict on D(a,t)
};

struct IslandOptions {
  double mu_gate = 0.0;  // require |f'/f|(a) >= mu_gate / t when positive
  int grid = 24;
  int boundary_samples = 200;
  int interior_samples = 100;
};

IslandGeometry find_island(const FunctionModel& m, cplx a, double t, int nu,
                           const IslandOptions& opt = {});

struct DiskPacking {
  double R = 0, t = 0;
  std::vector<cplx> centers;
  long long candidates = 0;
  double eta_hat = 0;      // measured membership density among the candidates
  double packing_floor = 0;  // (eta_hat / 2) (R/t)^2
};

// Greedy maximal packing of t-disks centered on membership samples.
DiskPacking pack_disks(const FunctionModel& m, const TSetParams& params, double R,
                       double t, long long candidate_budget, std::uint64_t seed,
                       const LogMFn& logM_at);

struct BuildBudgets {
  long long packing_budget = 20000;
  int max_children = 48;
  double max_anchor_real = 34.5;  // keeps level-1 image annuli representable
  int density_samples = 20000;
};

struct LevelReport {
  int level = 0;
  long long cells = 0;
  double log_R = 0;  // log R_l, the annulus parameter of f^l on the level
  double Delta = 0;  // measured dens(E_{l+1}, parent), averaged over parents
  double max_diameter = 0;
  double koebe_ratio_max = 0;
  double forward_residual_max = 0;  // frame residuals; see README
  bool radius_growth_ok = true;     // log R_{l+1} >= q log R_l for all cells
};

struct BuildResult {
  NestedCollection collection;
  std::vector<LevelReport> levels;
  double q = 0;
  double mcmullen_estimate = 0;   // finite-depth value from the measured data
  bool mcmullen_vacuous = false;  // the finite-depth bound carries no content
};

// Desk-scale realization of the nested construction: level 0 is the annulus
// A(R0) (stored under its circumscribing disk), level 1 the island V-sets over
// a packing of A(R0), level 2 the pullbacks of islands at the image annuli.
// Depth 2 requires a model with a closed-form log frame.
BuildResult build_levels(const FunctionModel& m, double R0, int depth,
                         const TSetParams& params, const BuildBudgets& budgets,
                         std::uint64_t seed);

}  // namespace dimlab
