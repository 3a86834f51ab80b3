#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dimlab/counting.hpp"

using namespace dimlab;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;
}

TEST_CASE("argument-principle counts") {
  const auto s = FunctionModel::sine(1.0, 0.0);
  CHECK(count_points(s, 0.0, 10.0) == 7);

  const auto p = FunctionModel::polynomial({{-2, 0}, {1, 0}, {1, 0}});
  CHECK(count_points(p, 0.0, 3.0) == 2);

  const auto e = FunctionModel::scaled_exp(1.0);
  CHECK(count_points(e, 1.0, 10.0) == 3);
  CHECK(count_points(e, 0.0, 10.0) == 0);
}

TEST_CASE("count is nondecreasing along a boundary-safe grid") {
  const auto s = FunctionModel::sine(1.0, 0.0);
  long long prev = -1;
  for (double r = 1.5; r < 21.0; r += 1.0) {
    const long long n = count_points(s, 0.0, r);
    CHECK(n >= prev);
    prev = n;
  }
}

TEST_CASE("integrated counting: jump-sum closed forms") {
  const auto s = FunctionModel::sine(1.0, 0.0);
  CHECK(integrated_counting(s, 0.0, 0.999 * kPi) ==
        doctest::Approx(std::log(0.999 * kPi)).epsilon(1e-12));

  const auto p = FunctionModel::polynomial({{-1, 0}, {1, 0}});  // z - 1
  CHECK(integrated_counting(p, 0.0, std::exp(1.0)) == doctest::Approx(1.0).epsilon(1e-12));

  const auto e = FunctionModel::scaled_exp(1.0);
  CHECK(integrated_counting(e, 1.0, 3.0 * kPi) ==
        doctest::Approx(std::log(3.0 * kPi) + 2.0 * std::log(1.5)).epsilon(1e-12));
}

TEST_CASE("N matches the interval-sum form of the defining integral") {
  // independent route: n is constant between jumps, so the integral is a sum
  // of n_i * log spacings
  const auto cd = counting_from_moduli({0.0, 1.0, 1.0, 2.5, 4.0}, 1.0, 64.0);
  const double r = 10.0;
  // n - n(0) is 0 on (0,1), 2 on (1,2.5), 3 on (2.5,4), 4 on (4,r)
  double integral = 2.0 * std::log(2.5) + 3.0 * std::log(4.0 / 2.5) + 4.0 * std::log(r / 4.0);
  integral += 1.0 * std::log(r);  // n(0) log r
  CHECK(cd.N_at(r) == doctest::Approx(integral).epsilon(1e-12));
}

TEST_CASE("characteristic closed forms") {
  const auto e = FunctionModel::scaled_exp(1.0);
  for (const double r : {10.0, 50.0}) {
    CHECK(characteristic(e, r) == doctest::Approx(r / kPi).epsilon(1e-7));
  }
  const auto cube = FunctionModel::polynomial({{0, 0}, {0, 0}, {0, 0}, {1, 0}});  // z^3
  CHECK(characteristic(cube, std::exp(1.0)) == doctest::Approx(3.0).epsilon(1e-8));
  const auto c5 = FunctionModel::polynomial({{5, 0}});
  CHECK(characteristic(c5, 7.0) == doctest::Approx(std::log(5.0)).epsilon(1e-10));
}

TEST_CASE("Jensen direction: N(r,0) <= T(r) + |log|f(0)||") {
  const auto s = FunctionModel::sine(1.0, 1.0);  // f(0) = sin(1) != 0
  const double corr = std::abs(std::log(std::abs(std::sin(1.0))));
  for (const double r : {5.0, 10.0, 20.0, 50.0}) {
    const double N = integrated_counting(s, 0.0, r);
    const double T = characteristic(s, r);
    CHECK(N <= T + corr + 1e-6);
  }
}

TEST_CASE("doubling constants and the growth chain for sine zeros") {
  const auto s = FunctionModel::sine(1.0, 0.0);
  auto logM = [&](double r) { return s.logM_oracle(r); };
  const auto cd = build_counting(s, 0.0, 20.0, 2100.0, 8, logM, 50.0, 500.0);
  CHECK(cd.K_hat > 1.9);
  CHECK(cd.K_hat < 2.3);
  CHECK(cd.A_N_hat > 1.5);
  CHECK(cd.chain_ok);
  // samples monotone
  for (std::size_t i = 1; i < cd.samples.size(); ++i) {
    CHECK(cd.samples[i].n >= cd.samples[i - 1].n);
    CHECK(cd.samples[i].N >= cd.samples[i - 1].N);
  }
}

TEST_CASE("regularity windows: sine zeros stay inside the mu=2 envelopes") {
  const auto s = FunctionModel::sine(1.0, 0.0);
  const auto cd = build_counting(s, 0.0, 1.0, 450.0);
  const auto w = regular_window_measure(cd, 2.0, 100.0, 128);
  CHECK(w.measured_fraction == 1.0);
  CHECK(w.holds_2b);
  CHECK(w.holds_2c);
}

TEST_CASE("regularity windows: a zero-free stretch satisfies the upper envelope") {
  const auto cd = counting_from_moduli({1.0, 2.0, 3.0}, 0.5, 950.0);
  const auto w = regular_window_measure(cd, 0.7, 100.0, 64);
  CHECK(w.fraction_2b == 1.0);
}

TEST_CASE("regularity windows: lacunary moduli violate the envelope near jumps") {
  const std::vector<double> lac{2.0, 4.0, 16.0, 256.0, 65536.0};
  const auto cd = counting_from_moduli(lac, 1.5, 1200.0);
  const auto w = regular_window_measure(cd, 1.0, 220.0, 64);
  CHECK(w.measured_fraction < 1.0);

  // independent scan over the same grid straight from the modulus list
  auto n_of = [&](double t) {
    long long n = 0;
    for (const double m : lac)
      if (m <= t) ++n;
    return static_cast<double>(n);
  };
  long long pass = 0;
  const int grid = 64;
  for (int k = 0; k < grid; ++k) {
    const double r = 220.0 * (1.0 + static_cast<double>(k) / (grid - 1));
    bool ok = true;
    const double q = std::pow(2.0, 1.0 / 8.0);
    for (double t = r * q; t <= cd.samples.back().r * (1 + 1e-12); t *= q)
      if (n_of(t) > std::pow(t / r, 1.0) * n_of(r) * (1 + 1e-12) + 1e-9) ok = false;
    for (double t = r / q; t >= 1.5 * (1 - 1e-12); t /= q)
      if (n_of(t) < std::pow(t / r, 1.0) * n_of(r) * (1 - 1e-12) - 1e-9) ok = false;
    pass += ok;
  }
  CHECK(w.measured_fraction == doctest::Approx(static_cast<double>(pass) / grid));
}

TEST_CASE("window scan refuses data that stops short of 4R") {
  const auto cd = counting_from_moduli({1.0, 2.0}, 1.0, 300.0);
  CHECK_THROWS_AS((void)regular_window_measure(cd, 1.0, 100.0, 16), InsufficientData);
}
