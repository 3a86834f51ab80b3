#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dimlab/growth.hpp"

using namespace dimlab;

namespace {
constexpr double kE = 2.718281828459045235360287471352662;
}

TEST_CASE("max modulus on circles") {
  const auto e = FunctionModel::scaled_exp(1.0);
  CHECK(max_modulus(e, 3.0) == doctest::Approx(std::exp(3.0)).epsilon(1e-10));

  const auto p = FunctionModel::polynomial({{1, 0}, {0, 0}, {0, 0}, {1, 0}});  // z^3+1
  CHECK(max_modulus(p, 2.0) == doctest::Approx(9.0).epsilon(1e-10));

  // sine maximum sits on the imaginary axis; oracle = dense circle scan
  const auto s = FunctionModel::sine(1.0, 0.0);
  double dense = -1e308;
  const int n = 1000000;
  for (int i = 0; i < n; ++i) {
    const double th = 6.283185307179586 * i / n;
    dense = std::max(dense, std::abs(std::sin(cplx(2.0 * std::cos(th), 2.0 * std::sin(th)))));
  }
  const double got = max_modulus(s, 2.0);
  CHECK(got == doctest::Approx(dense).epsilon(1e-9));
  CHECK(got == doctest::Approx(std::sinh(2.0)).epsilon(1e-9));
}

TEST_CASE("profile is increasing and convex; interpolation hits the nodes") {
  const auto s = FunctionModel::sine(1.0, 0.0);
  const auto p = build_profile(s, 1.0, 300.0);
  for (std::size_t i = 0; i < p.r_grid.size(); i += 7)
    CHECK(p.logM_at(p.r_grid[i]) == doctest::Approx(p.logM[i]).epsilon(1e-14));
  // between nodes: close to the closed form
  CHECK(p.logM_at(37.7) == doctest::Approx(s.logM_oracle(37.7)).epsilon(1e-4));
}

TEST_CASE("exact regularity of the exponential") {
  const auto e = FunctionModel::scaled_exp(1.0);
  const auto p = build_profile(e, 1.0, 1300.0);
  for (const double c : {2.0, kE, 10.0}) {
    const auto cert = regularity_check(p, c, c, c, 1.0);
    CHECK(cert.violations.empty());
    CHECK(cert.order_bounds_ok);
  }
  CHECK(order_estimate(p).first == doctest::Approx(1.0).epsilon(0.02));
  CHECK(order_estimate(p).second == doctest::Approx(1.0).epsilon(0.02));
}

TEST_CASE("sine regularity window") {
  const auto s = FunctionModel::sine(1.0, 0.0);
  const auto p = build_profile(s, 10.0, 1300.0);
  const auto cert = regularity_check(p, 1.9, 2.1, 2.0, 20.0);
  CHECK(cert.violations.empty());
  CHECK(cert.doubling_L > 1.0);
  CHECK(cert.doubling_L < 2.5);
}

TEST_CASE("fatou model grows linearly, regular for r0 large") {
  const auto f = FunctionModel::fatou();
  const auto p = build_profile(f, 20.0, 1300.0, 8, 2048);
  const auto cert = regularity_check(p, 1.9, 2.1, 2.0, 50.0);
  CHECK(cert.violations.empty());
}

TEST_CASE("order of a polynomial is zero (far window)") {
  const auto p3 = FunctionModel::polynomial({{1, 0}, {0, 0}, {0, 0}, {1, 0}});
  const auto p = build_profile(p3, 1e22, 1e43);
  const auto [rho, lam] = order_estimate(p);
  CHECK(std::abs(rho) < 0.02);
  CHECK(std::abs(lam) < 0.02);
}

TEST_CASE("order of the poincare solution of f(2z)=f(z)^2") {
  const auto m = FunctionModel::poincare(2.0, Bivariate::parse("w^2"));
  const auto p = build_profile(m, 1.0, 64.0);
  const auto [rho, lam] = order_estimate(p);
  CHECK(std::abs(rho - 1.0) < 0.05);
  CHECK(std::abs(lam - 1.0) < 0.05);
}

TEST_CASE("upper logarithmic density closed forms") {
  CHECK(upper_log_density({{1.0, 100.0}}, 100.0) == doctest::Approx(1.0));
  CHECK(upper_log_density({}, 100.0) == doctest::Approx(0.0));
  const double e2 = kE * kE;
  CHECK(upper_log_density({{kE, e2}}, e2) == doctest::Approx(0.5).epsilon(1e-12));
}
