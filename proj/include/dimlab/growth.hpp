#pragma once

#include <utility>
#include <vector>

#include "dimlab/models.hpp"

namespace dimlab {

// Sampled (r, log M(r,f)) data on a geometric grid with fitted order and
// lower order. Immutable once built.
struct GrowthProfile {
  std::vector<double> r_grid;
  std::vector<double> logM;
  double rho_hat = 0.0;
  double lambda_hat = 0.0;

  double r_min() const { return r_grid.front(); }
  double r_max() const { return r_grid.back(); }
  // monotone cubic interpolation of logM against log r
  double logM_at(double r) const;
};

// max over the circle |z| = r of log|f|: coarse scan at `resolution` angles,
// then golden-section refinement of the best bracket. Checked against the
// closed form when the model has one.
double log_max_modulus(const FunctionModel& m, double r, int resolution = 1024,
                       int workers = 0);
double max_modulus(const FunctionModel& m, double r, int resolution = 1024,
                   int workers = 0);

GrowthProfile build_profile(const FunctionModel& m, double rmin, double rmax,
                            int per_octave = 8, int resolution = 1024, int workers = 0);

struct RegularityCertificate {
  double A = 0, B = 0, C = 0, r0 = 0;
  double doubling_L = 0;           // empirical constant of log M(2r) <= L log M(r)
  double r_lo = 0, r_hi = 0;       // verified range
  std::vector<double> violations;  // grid r where either inequality failed
  double slack_rel = 0;            // relative tolerance used by the comparisons
  double rho_hat = 0, lambda_hat = 0;
  bool order_bounds_ok = false;    // rho <= logB/logC + .05 and lambda >= logA/logC - .05
};

// Checks A log M(r) <= log M(Cr) <= B log M(r) over the profile grid from r0.
RegularityCertificate regularity_check(const GrowthProfile& p, double A, double B,
                                       double C, double r0);

// (rho_hat, lambda_hat): extreme slopes of log log M against log r over the
// trailing half of the grid.
std::pair<double, double> order_estimate(const GrowthProfile& p);

struct RInterval {
  double lo = 0, hi = 0;
};

// max over r <= R_max of (1/log r) * integral_{E cap [1,r]} dt/t, evaluated
// in closed form per interval.
double upper_log_density(std::vector<RInterval> bad_set, double R_max);

}  // namespace dimlab
