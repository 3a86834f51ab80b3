#pragma once

#include <functional>
#include <vector>

#include "dimlab/models.hpp"

namespace dimlab {

// n(r,a) by the argument principle: adaptive trapezoid of z f'/(f-a) over the
// circle, with a minimum-modulus boundary scan first. The raw winding must
// land within 1e-4 of an integer.
long long count_points(const FunctionModel& m, cplx a, double r, int min_nodes = 256);

// N(r,a) as an exact jump-sum over the a-points in the disk.
double integrated_counting(const FunctionModel& m, cplx a, double r);

// Nevanlinna characteristic of an entire function: the circle average of
// log+|f| (no pole term).
double characteristic(const FunctionModel& m, double r, double abs_tol = 1e-8);

struct CountingSample {
  double r = 0;
  long long n = 0;
  double N = 0;
};

struct CountingData {
  cplx a;
  double r_lo = 0, r_hi = 0;
  int per_octave = 8;
  std::vector<double> moduli;  // sorted a-point moduli, when known exactly
  std::vector<CountingSample> samples;
  double K_hat = 0;                  // max n(2r)/n(r) over the grid
  double A_N_hat = 0, B_N_hat = 0;   // extreme N(2r)/N(r) ratios
  bool chain_ok = false;             // log M(r) <= chain_constant * n(r) on the window
  double chain_constant = 0;         // 4 K^2 log2 / (A_N - 1)

  long long n_at(double r) const;  // exact from moduli when present, else step lookup
  double N_at(double r) const;
};

// Counting data on a geometric grid. The a-point list comes from the model
// (analytic oracle or the numeric search); pass logM to run the growth-chain
// comparison over [chain_lo, chain_hi].
CountingData build_counting(const FunctionModel& m, cplx a, double r_lo, double r_hi,
                            int per_octave = 8,
                            const std::function<double(double)>& logM = {},
                            double chain_lo = 0, double chain_hi = 0);

// Synthetic counting data straight from a modulus list (tests and
// counterexamples).
CountingData counting_from_moduli(std::vector<double> moduli, double r_lo, double r_hi,
                                  int per_octave = 8);

struct RegularZeroWindow {
  double mu = 0;
  double R = 0;
  int grid = 0;
  int scan_per_octave = 8;
  bool holds_2b = false;   // membership of r = R itself: n(t) <= (t/r)^mu n(r) upward
  bool holds_2c = false;   // n(t) >= (t/r)^mu n(r) downward to r_lo
  double fraction_2b = 0;
  double fraction_2c = 0;
  double measured_fraction = 0;  // both conditions
  bool tail_certified = false;   // mu >= 2 log K / log 2, the doubling reduction
};

// Fraction of a linear r-grid in [R, 2R] whose counting function stays inside
// the (t/r)^mu envelopes. The t-scan runs on the relative geometric grid
// t = r * 2^(j/scan_per_octave): upward across [r, T_max] for the upper
// envelope, downward across [r_lo, r] for the lower one.
RegularZeroWindow regular_window_measure(const CountingData& cd, double mu, double R,
                                         int grid, int scan_per_octave = 8);

// envelope membership for a single radius
bool window_membership(const CountingData& cd, double mu, double r,
                       bool* holds_2b = nullptr, bool* holds_2c = nullptr,
                       int scan_per_octave = 8);

}  // namespace dimlab
