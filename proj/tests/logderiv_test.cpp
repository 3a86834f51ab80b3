#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dimlab/logderiv.hpp"
#include "dimlab/rng.hpp"

using namespace dimlab;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

LogMFn oracle_logM(const FunctionModel& m) {
  return [m](double r) { return m.logM_oracle(r); };
}
}  // namespace

TEST_CASE("logarithmic derivative values") {
  const auto e = FunctionModel::scaled_exp(1.0);
  CHECK(std::abs(log_deriv(e, {2.0, 1.0}) - cplx(2.0, 1.0)) < 1e-12);

  const auto cube = FunctionModel::polynomial({{0, 0}, {0, 0}, {0, 0}, {1, 0}});
  CHECK(std::abs(log_deriv(cube, 5.0) - cplx(3.0, 0.0)) < 1e-12);

  const auto s = FunctionModel::sine(1.0, 0.0);
  const cplx want = cplx(0, 1) * std::cos(cplx(0, 1)) / std::sin(cplx(0, 1));
  CHECK(std::abs(log_deriv(s, {0.0, 1.0}) - want) < 1e-12);
  CHECK(want.real() == doctest::Approx(1.3130352854993312).epsilon(1e-10));
}

TEST_CASE("membership in the two-sided set for the exponential") {
  const auto e = FunctionModel::scaled_exp(1.0);
  const TSetParams p{0.9, 1.1, 8.0, 0.0};
  const auto logM = oracle_logM(e);
  CHECK(tset_member(e, p, {60.0, 0.0}, logM));
  CHECK_FALSE(tset_member(e, p, {-60.0, 0.0}, logM));

  const TSetParams weak{0.0, 2.0, 0.0, 0.0};
  CHECK(tset_member(e, weak, {1.0, 0.0}, logM));
}

TEST_CASE("membership never shrinks when the parameter box grows") {
  const auto e = FunctionModel::scaled_exp(1.0);
  const auto logM = oracle_logM(e);
  const TSetParams tight{0.9, 1.1, 8.0, 0.5};
  const TSetParams loose{0.5, 1.5, 4.0, 0.0};
  CounterRng rng(99, 0);
  for (int i = 0; i < 400; ++i) {
    const double r = 100.0 * std::sqrt(1.0 + 3.0 * rng.next_double());
    const double th = 2.0 * kPi * rng.next_double();
    const cplx z = r * cplx(std::cos(th), std::sin(th));
    if (tset_member(e, tight, z, logM)) CHECK(tset_member(e, loose, z, logM));
  }
}

TEST_CASE("density of a constant-true predicate is one") {
  const auto d = region_density([](cplx) { return true; }, 10.0, MonteCarlo{20000, 7});
  CHECK(d.value == 1.0);
  CHECK(d.stderr_ == 0.0);
}

TEST_CASE("density of the |f| >= |z|^q region of the exponential") {
  const auto e = FunctionModel::scaled_exp(1.0);
  const double R = 100.0;
  auto pred = [&](cplx z) { return e.log_abs(z) >= 8.0 * std::log(std::abs(z)); };
  // 1-D oracle: angular fraction arccos(8 ln r / r)/pi, area-weighted
  auto fraction = [](double r) { return std::acos(std::min(1.0, 8.0 * std::log(r) / r)) / kPi; };
  const int n = 20000;
  double oracle = 0.0;
  for (int i = 0; i < n; ++i) {  // midpoint rule over [R, 2R]
    const double r = R + (i + 0.5) * R / n;
    oracle += fraction(r) * (2.0 * r / (3.0 * R * R)) * (R / n);
  }
  const auto mc = region_density(pred, R, MonteCarlo{1000000, 42});
  CHECK(std::abs(mc.value - oracle) <= 3.0 * mc.stderr_);
  const auto pg = region_density(pred, R, PolarGrid{1000, 1000});
  CHECK(std::abs(pg.value - oracle) <= 2e-3);
  CHECK(oracle == doctest::Approx(0.41).epsilon(0.02));
}

TEST_CASE("density is identical across worker counts at fixed seed") {
  const auto e = FunctionModel::scaled_exp(1.0);
  auto pred = [&](cplx z) { return e.log_abs(z) >= 8.0 * std::log(std::abs(z)); };
  const auto d1 = region_density(pred, 100.0, MonteCarlo{200000, 4242, 1});
  const auto d8 = region_density(pred, 100.0, MonteCarlo{200000, 4242, 8});
  CHECK(d1.value == d8.value);
}

TEST_CASE("exclusion cover basics") {
  const auto single = exclusion_cover({cplx(0.5, 0.5)}, 1.0, 64, 3);
  CHECK(single.centers.size() == 1);
  CHECK(single.radii[0] <= 2.0);
  CHECK(single.sum_radii_sq() <= 4.0);

  std::vector<cplx> cluster;
  CounterRng rng(1, 2);
  for (int i = 0; i < 100; ++i)
    cluster.emplace_back(1e-3 * rng.uniform(-1, 1), 1e-3 * rng.uniform(-1, 1));
  const auto c = exclusion_cover(cluster, 1.0, 128, 5);
  CHECK(c.sum_radii_sq() <= 4.0);
  CHECK(c.centers.size() <= cluster.size());

  const auto two = exclusion_cover({cplx(1, 0), cplx(-1, 0)}, 0.5, 64, 7);
  for (const double y : {2.0, 3.0, 10.0}) {
    const cplx z{0.0, y};
    CHECK_FALSE(two.covers(z));
    const double s = 1.0 / std::abs(z - cplx(1, 0)) + 1.0 / std::abs(z - cplx(-1, 0));
    CHECK(s <= 2.0 * 2 / 0.5);
  }
}

TEST_CASE("exclusion cover fuzz: budget exact, probes clean") {
  CounterRng rng(2024, 0);
  for (int set = 0; set < 100; ++set) {
    const int m = 1 + static_cast<int>(rng.next_double() * 60);
    const double spread = std::exp(rng.uniform(-2.0, 4.0));
    const double H = std::exp(rng.uniform(-2.0, 2.0));
    std::vector<cplx> pts;
    for (int i = 0; i < m; ++i) {
      if (rng.next_double() < 0.3 && !pts.empty()) {
        pts.push_back(pts[static_cast<std::size_t>(rng.next_double() * pts.size())] +
                      cplx(1e-4 * rng.uniform(-1, 1), 1e-4 * rng.uniform(-1, 1)));
      } else {
        pts.emplace_back(spread * rng.uniform(-1, 1), spread * rng.uniform(-1, 1));
      }
    }
    const auto cover = exclusion_cover(pts, H, 128, 1000 + set);
    CHECK(cover.sum_radii_sq() <= 4.0 * H * H);
  }
}

TEST_CASE("circle measure lower bounds") {
  const auto idm = FunctionModel::polynomial({{0, 0}, {1, 0}});  // z
  CHECK(circle_lower_measure(idm, 3.0, 0.5, 1, 4096) == doctest::Approx(2.0 * kPi));

  const auto e = FunctionModel::scaled_exp(1.0);
  CHECK(circle_lower_measure(e, 7.0, 0.5, 0, 4096) == doctest::Approx(2.0 * kPi));

  const auto s = FunctionModel::sine(1.0, 0.0);
  const double bound = 2.0 * kPi * 0.25 / std::pow(0.5 + 3.0 * kPi * 2.0, 2.0);
  const double meas = circle_lower_measure(s, 50.5, 0.5, 33, 1 << 20);
  CHECK(meas >= bound - 1e-3);
  CHECK(meas >= 6.0);  // nearly the full circle for this radius
}

TEST_CASE("fourier coefficients by direct summation") {
  const auto s = FunctionModel::sine(1.0, 0.0);
  const double mu = 2.0;
  const double cut = 10.0 * std::pow(2.0, 20.0 / mu) * 1.01;
  const auto zeros = s.zeros_in_disk(0.0, cut);
  const auto rep = fourier_coefficients(zeros, 10.0, -1, -1, 3, mu);
  REQUIRE(rep.coeffs.size() == 1);
  CHECK(std::abs(rep.coeffs[0].b) < 1e-12);  // symmetric cancellation

  // single zero at 1, r=2, m=-1 -> 0.5
  const auto one = fourier_coefficients({cplx(1.0, 0.0)}, 2.0, -1, -1, 3, mu);
  CHECK(std::abs(one.coeffs[0].b - cplx(0.5, 0.0)) < 1e-15);

  const auto r5 = fourier_coefficients(zeros, 10.0, 5, 5, 3, mu);
  CHECK(r5.coeffs[0].bound == doctest::Approx(7.0 * 2.0 / 3.0));
  CHECK(r5.coeffs[0].within);

  CHECK_THROWS_AS(
      (void)fourier_coefficients(s.zeros_in_disk(0.0, 100.0), 10.0, 4, 8, 3, mu),
      TailTooShort);
}

TEST_CASE("fourier partial sums reconstruct the circle restriction") {
  // shifted sine keeps f(0) != 0 so the factorization applies
  const auto s = FunctionModel::sine(1.0, 1.0);
  const double r = 10.0;
  const double mu = 2.0;
  const int q = 3;
  const auto zeros = s.zeros_in_disk(0.0, r * std::pow(2.0, 20.0 / mu) * 1.01);
  const auto rep = fourier_coefficients(zeros, r, -160, 160, q, mu);

  // polynomial part: a_m are the Taylor coefficients of log f at 0
  const double cot1 = std::cos(1.0) / std::sin(1.0);
  const double csc2 = 1.0 / (std::sin(1.0) * std::sin(1.0));
  const double a1 = cot1;
  const double a2 = -csc2 / 2.0;
  const double a3 = 2.0 * csc2 * cot1 / 6.0;

  double l2_err = 0.0, l2_ref = 0.0;
  const int grid = 512;
  for (int i = 0; i < grid; ++i) {
    const double th = 2.0 * kPi * i / grid;
    const cplx z = r * std::exp(cplx(0.0, th));
    const cplx L = log_deriv(s, z);
    cplx approx = a1 * r * std::exp(cplx(0.0, th)) +
                  2.0 * a2 * r * r * std::exp(cplx(0.0, 2.0 * th)) +
                  3.0 * a3 * r * r * r * std::exp(cplx(0.0, 3.0 * th));
    for (const auto& fc : rep.coeffs)
      approx += fc.b * std::exp(cplx(0.0, fc.m * th));
    l2_err += std::norm(L - approx);
    l2_ref += std::norm(L);
  }
  CHECK(std::sqrt(l2_err / l2_ref) < 0.02);
}

TEST_CASE("two-sided density pipeline on the exponential") {
  const auto e = FunctionModel::scaled_exp(1.0);
  const TSetParams params{0.9, 1.1, 8.0, 0.0};
  const double d = params.alpha2 / params.alpha1;
  const auto rep = two_sided_density_pipeline(e, {cplx(1.0, 0.0)}, 100.0, params, d,
                                     oracle_logM(e), MonteCarlo{200000, 11});
  REQUIRE(rep.targets.size() == 1);
  CHECK(rep.targets[0].W.value > 0.0);
  CHECK(rep.targets[0].two_sided_ok);
  CHECK(rep.targets[0].n_growth_ratio > 1.5);
  CHECK(rep.U_tau_plain.value > 0.9);

  CHECK_THROWS_AS((void)two_sided_density_pipeline(e, {cplx(0.0, 0.0), cplx(1.0, 0.0)}, 100.0,
                                          params, 2.0, oracle_logM(e), MonteCarlo{100, 1}),
                  TargetsTooClose);
}

TEST_CASE("pipeline on a cubic: the small-value set is thin") {
  const auto cube = FunctionModel::polynomial({{0, 0}, {0, 0}, {0, 0}, {1, 0}});
  const TSetParams params{0.3, 1.0, 0.0, 0.0};
  const auto rep = two_sided_density_pipeline(cube, {cplx(1.0, 0.0)}, 10.0, params, 1.0,
                                     oracle_logM(cube), MonteCarlo{50000, 3});
  CHECK(rep.targets[0].C_small.value < 0.05);
  CHECK(rep.targets[0].two_sided_ok);
}

TEST_CASE("a small-enough tau bound holds on most of the annulus") {
  const auto e = FunctionModel::scaled_exp(1.0);
  const auto s = FunctionModel::sine(1.0, 0.0);
  for (const double eps : {0.5, 0.25}) {
    for (const auto* m : {&e, &s}) {
      bool found = false;
      for (const double tau : {0.5, 1.0, 2.0, 4.0, 8.0}) {
        auto pred = [&](cplx z) {
          return std::abs(log_deriv(*m, z)) <= tau * m->logM_oracle(std::abs(z));
        };
        bool ok = true;
        for (const double R : {50.0, 100.0}) {
          const auto dens = region_density(pred, R, MonteCarlo{50000, 21});
          if (dens.value < 1.0 - eps) ok = false;
        }
        if (ok) {
          found = true;
          break;
        }
      }
      CHECK(found);
    }
  }
}
