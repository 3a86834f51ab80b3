// Timing comparison of the serial reference kernels against the OpenMP ones.
#include <chrono>
#include <cstdio>

#include "dimlab/dimension.hpp"
#include "dimlab/growth.hpp"
#include "dimlab/kernels.hpp"
#include "dimlab/logderiv.hpp"

using namespace dimlab;

namespace {

template <class F>
double time_ms(F&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
      .count();
}

void row(const char* name, double serial_ms, double parallel_ms, bool identical) {
  std::printf("%-34s %10.1f ms %10.1f ms   x%.2f   %s\n", name, serial_ms, parallel_ms,
              serial_ms / parallel_ms, identical ? "identical" : "MISMATCH");
}

}  // namespace

int main() {
  const int workers = kernels::default_workers();
  std::printf("workers: %d\n", workers);
  std::printf("%-34s %13s %13s\n", "kernel", "serial", "openmp");

  const auto e = FunctionModel::scaled_exp(1.0);
  const TSetParams params{0.9, 1.1, 8.0, 0.0};
  auto logM = [&](double r) { return e.logM_oracle(r); };
  auto pred = [&](cplx z) { return tset_member(e, params, z, logM); };

  {
    DensityEstimate a, b;
    const double ts = time_ms([&] { a = region_density(pred, 100.0, MonteCarlo{2000000, 7, 1}); });
    const double tp =
        time_ms([&] { b = region_density(pred, 100.0, MonteCarlo{2000000, 7, workers}); });
    row("annulus density, 2e6 samples", ts, tp, a.value == b.value);
  }
  {
    auto member = [&](cplx z) { return escape_test(e, z, 1e10, 50).escaped_for_dimension(); };
    std::vector<double> scales;
    for (int k = 3; k <= 10; ++k) scales.push_back(std::pow(2.0, -k));
    BoxDimResult a, b;
    const double ts = time_ms([&] { a = box_dimension(member, {-4, -4, 8}, scales, 1); });
    const double tp = time_ms([&] { b = box_dimension(member, {-4, -4, 8}, scales, workers); });
    row("escape grid, finest 2^-10", ts, tp, a.counts == b.counts);
  }
  {
    const auto s = FunctionModel::sine(1.0, 0.0);
    double a = 0, b = 0;
    const double ts = time_ms([&] { a = circle_lower_measure(s, 200.5, 0.5, 127, 1 << 21, 1); });
    const double tp =
        time_ms([&] { b = circle_lower_measure(s, 200.5, 0.5, 127, 1 << 21, workers); });
    row("circle measure, 2^21 nodes", ts, tp, a == b);
  }
  {
    double a = 0, b = 0;
    const double ts = time_ms([&] {
      for (int i = 0; i < 200; ++i) a += log_max_modulus(e, 100.0 + i, 1 << 14, 1);
    });
    const double tp = time_ms([&] {
      for (int i = 0; i < 200; ++i) b += log_max_modulus(e, 100.0 + i, 1 << 14, workers);
    });
    row("circle scans, 200 x 2^14 nodes", ts, tp, a == b);
  }
  return 0;
}
