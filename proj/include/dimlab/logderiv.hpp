#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "dimlab/models.hpp"

namespace dimlab {

// Parameters of the two-sided logarithmic-derivative set: points where
// alpha1 logM <= |z f'/f| <= alpha2 logM, |f| >= |z|^q, and the upper bound
// persists on a disk of radius lambda |z| / logM.
struct TSetParams {
  double alpha1 = 0, alpha2 = 0, q = 0, lambda = 0;
};

// z f'(z)/f(z)
cplx log_deriv(const FunctionModel& m, cplx z);

using LogMFn = std::function<double(double)>;

// Membership test; the disk condition is sampled at the center, 8 boundary
// points and a golden-angle spiral of `disk_samples` interior points.
bool tset_member(const FunctionModel& m, const TSetParams& p, cplx z,
                 const LogMFn& logM_at, int disk_samples = 64);

struct DensityEstimate {
  double value = 0;
  double stderr_ = 0;
  long long samples = 0;
  double R = 0;
  std::string method;
  std::uint64_t seed = 0;
};

struct MonteCarlo {
  long long n = 0;
  std::uint64_t seed = 0;
  int workers = 0;
};
struct PolarGrid {
  int n_r = 0;
  int n_theta = 0;
  int workers = 0;
};

// Area-uniform density of a predicate over the annulus R <= |z| <= 2R.
// Deterministic for a fixed seed, independent of the worker count.
DensityEstimate region_density(const std::function<bool(cplx)>& pred, double R,
                               const MonteCarlo& mc);
DensityEstimate region_density(const std::function<bool(cplx)>& pred, double R,
                               const PolarGrid& grid);

struct ExclusionCover {
  std::vector<cplx> centers;
  std::vector<double> radii;
  double H = 0;
  long long m = 0;  // input point count

  bool covers(cplx z) const;
  double sum_radii_sq() const;
};

// Cartan-style greedy cover: outside the disks, sum 1/|z - z_k| <= 2m/H, and
// the squared radii sum to at most 4H^2. Verified by probing before return.
ExclusionCover exclusion_cover(const std::vector<cplx>& points, double H,
                               int probes = 256, std::uint64_t probe_seed = 1);

// theta-measure of {theta : |f'(r e^{i theta})/f| >= beta n(r)/r} on a
// trapezoid grid.
double circle_lower_measure(const FunctionModel& m, double r, double beta,
                            long long n_at_r, int theta_grid, int workers = 0);

struct FourierCoeff {
  int m = 0;
  cplx b;
  double bound = 0;  // envelope implied by the growth window exponent mu
  bool within = false;
};

struct FourierReport {
  double r = 0;
  int q = 0;
  double mu = 0;
  long long n_r = 0;
  double tail_cut = 0;
  std::vector<FourierCoeff> coeffs;
  bool all_within = true;
};

// Fourier coefficients b_m(r) of the circle restriction of z f'/f, by direct
// summation over the zero list. Indices in [m_lo, m_hi] outside [0, q].
FourierReport fourier_coefficients(const std::vector<cplx>& zeros, double r,
                                   int m_lo, int m_hi, int q, double mu);

struct TargetReport {
  cplx a;
  DensityEstimate V_gamma;     // |z f'/(f-a)| >= gamma logM
  DensityEstimate U_tau_shift; // |z f'/(f-a)| <= tau logM
  DensityEstimate C_small;     // |f - a| <= d
  DensityEstimate W;           // (U_tau(f-a) cap U_tau(f) cap V_gamma) \ C
  bool two_sided_ok = false;   // every W sample: sigma logM <= |zf'/f| <= tau logM, |f|>=1
  long long w_violations = 0;
  double n_growth_ratio = 0;   // n(4R,a)/n(2R,a), the non-deficiency proxy
};

struct TwoSidedDensityReport {
  double R = 0, d = 0, gamma = 0, tau = 0, sigma = 0;
  bool targets_in_disk = true;  // all |a_j| <= 2 d m
  DensityEstimate U_tau_plain;
  std::vector<TargetReport> targets;
};

// Density pipeline for the two-sided bound: gamma and tau are taken from
// params.alpha1 / params.alpha2, sigma = gamma/(4m).
TwoSidedDensityReport two_sided_density_pipeline(const FunctionModel& m, const std::vector<cplx>& targets,
                                 double R, const TSetParams& params, double d,
                                 const LogMFn& logM_at, const MonteCarlo& mc);

}  // namespace dimlab
