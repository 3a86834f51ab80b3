#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <complex>

#include "dimlab/models.hpp"
#include "dimlab/rng.hpp"

using namespace dimlab;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

double rel_err(cplx got, cplx want) {
  return std::abs(got - want) / std::max(1.0, std::abs(want));
}
}  // namespace

TEST_CASE("closed-form evaluation") {
  const auto e = FunctionModel::scaled_exp(1.0);
  CHECK(rel_err(e.eval({1.0, kPi}), -std::exp(1.0)) < 1e-12);

  const auto f = FunctionModel::fatou();
  CHECK(rel_err(f.eval(0.0), 2.0) < 1e-12);

  const auto s = FunctionModel::sine(1.0, 0.0);
  CHECK(rel_err(s.deriv(0.0), 1.0) < 1e-12);
  CHECK(rel_err(e.deriv(0.0), 1.0) < 1e-12);
  CHECK(std::abs(f.deriv(0.0)) < 1e-12);
}

TEST_CASE("poincare model solves f(2z) = f(z)^2 and matches exp") {
  const auto p = FunctionModel::poincare(2.0, Bivariate::parse("w^2"));
  CHECK(rel_err(p.eval(3.0), std::exp(3.0)) < 1e-8);

  // consistency with e^z across |z| <= 4
  CounterRng rng(11, 0);
  for (int i = 0; i < 50; ++i) {
    const cplx z{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
    if (std::abs(z) > 4.0) continue;
    CHECK(rel_err(p.eval(z), std::exp(z)) < 1e-8);
  }

  // functional equation residual on the certified domain
  for (int i = 0; i < 50; ++i) {
    const cplx z{rng.uniform(-20.0, 20.0), rng.uniform(-20.0, 20.0)};
    const cplx lhs = p.eval(2.0 * z);
    const cplx rhs = p.eval(z) * p.eval(z);
    CHECK(std::abs(lhs - rhs) / std::max(1.0, std::abs(rhs)) < 1e-8);
  }
}

TEST_CASE("derivatives agree with central finite differences") {
  const std::vector<FunctionModel> models = {
      FunctionModel::scaled_exp({1.0, 0.5}),
      FunctionModel::sine(1.0, 0.3),
      FunctionModel::fatou(),
      FunctionModel::polynomial({{-2, 0}, {1, 0}, {1, 0}}),
      FunctionModel::poincare(2.0, Bivariate::parse("w^2")),
  };
  const double h = 1e-6;
  for (const auto& m : models) {
    CounterRng rng(5, 17);
    for (int i = 0; i < 100; ++i) {
      const cplx z{rng.uniform(-4.0, 4.0), rng.uniform(-4.0, 4.0)};
      const cplx fd = (m.eval(z + h) - m.eval(z - h)) / (2.0 * h);
      const cplx d = m.deriv(z);
      CHECK(std::abs(fd - d) <= 1e-5 * std::max(1.0, std::abs(d)));
    }
  }
}

TEST_CASE("sine zeros in a disk: count, symmetry, ordering") {
  const auto s = FunctionModel::sine(1.0, 0.0);
  const auto zs = s.zeros_in_disk(0.0, 10.0);
  REQUIRE(zs.size() == 7);
  CHECK(std::abs(zs[0]) < 1e-12);
  // symmetric under negation
  for (const auto& z : zs) {
    bool has_neg = false;
    for (const auto& w : zs)
      if (std::abs(w + z) < 1e-9) has_neg = true;
    CHECK(has_neg);
  }
  // ordered by modulus
  for (std::size_t i = 1; i < zs.size(); ++i)
    CHECK(std::abs(zs[i - 1]) <= std::abs(zs[i]) + 1e-12);
}

TEST_CASE("polynomial and exp a-points") {
  const auto p = FunctionModel::polynomial({{-2, 0}, {1, 0}, {1, 0}});  // (z-1)(z+2)
  const auto roots = p.zeros_in_disk(0.0, 3.0);
  REQUIRE(roots.size() == 2);
  CHECK(std::abs(roots[0] - cplx(1.0, 0.0)) < 1e-9);
  CHECK(std::abs(roots[1] - cplx(-2.0, 0.0)) < 1e-9);

  const auto e = FunctionModel::scaled_exp(1.0);
  const auto ones = e.zeros_in_disk(1.0, 10.0);
  REQUIRE(ones.size() == 3);
  CHECK(std::abs(ones[0]) < 1e-12);
  CHECK(std::abs(std::abs(ones[1]) - 2.0 * kPi) < 1e-9);
  CHECK(e.zeros_in_disk(0.0, 50.0).empty());
}

TEST_CASE("boundary a-points are rejected") {
  const auto s = FunctionModel::sine(1.0, 0.0);
  CHECK_THROWS_AS((void)s.zeros_in_disk(0.0, kPi), BoundaryZero);
}

TEST_CASE("numeric a-point search on the fatou model") {
  const auto f = FunctionModel::fatou();
  // z = 0 solves z + 1 + e^{-z} = 2
  const auto pts = f.zeros_in_disk(2.0, 1.5);
  bool has_origin = false;
  for (const auto& p : pts)
    if (std::abs(p) < 1e-9) has_origin = true;
  CHECK(has_origin);
  for (const auto& p : pts) CHECK(std::abs(f.eval(p) - 2.0) < 1e-10 * 3.0);
}

TEST_CASE("stable log-domain surfaces match direct evaluation at moderate scale") {
  const std::vector<FunctionModel> models = {
      FunctionModel::scaled_exp(1.0),
      FunctionModel::sine(2.0, 0.7),
      FunctionModel::fatou(),
      FunctionModel::polynomial({{1, 0}, {0, 0}, {0, 0}, {2, 0}}),
  };
  CounterRng rng(3, 9);
  for (const auto& m : models) {
    for (int i = 0; i < 60; ++i) {
      const cplx z{rng.uniform(-8.0, 8.0), rng.uniform(-8.0, 8.0)};
      const cplx v = m.eval(z);
      if (std::abs(v) < 1e-6) continue;
      CHECK(std::abs(m.log_abs(z) - std::log(std::abs(v))) < 1e-9 * std::max(1.0, std::abs(std::log(std::abs(v)))));
      const cplx ld = m.log_derivative(z);
      CHECK(std::abs(ld - m.deriv(z) / v) < 1e-8 * std::max(1.0, std::abs(ld)));
    }
  }
  // far out where eval would overflow
  const auto s = FunctionModel::sine(1.0, 0.0);
  const cplx big{3.0, 2000.0};
  CHECK(s.log_abs(big) == doctest::Approx(2000.0 - std::log(2.0)).epsilon(1e-12));
  CHECK(std::abs(s.log_derivative(big) - cplx(0.0, -1.0)) < 1e-12);
}

TEST_CASE("log_ratio continues the logarithm along segments") {
  const auto s = FunctionModel::sine(1.0, 1.0);  // no zero at the origin
  const cplx a{10.0, 4.0};
  const cplx d{1.5, -0.5};
  const cplx lr = s.log_ratio(a, d);
  const cplx expect = std::log(s.eval(a + d) / s.eval(a));
  // may differ by a multiple of 2 pi i only if branches were crossed; the
  // segment stays zero-free here so the continuation must match exactly
  CHECK(std::abs(lr - expect) < 1e-9);

  const auto e = FunctionModel::scaled_exp(1.0);
  CHECK(std::abs(e.log_ratio({500.0, 300.0}, {3.0, 1.0}) - cplx(3.0, 1.0)) < 1e-14);
}

TEST_CASE("model mini-language round-trips") {
  for (const std::string spec :
       {"exp:lambda=1", "sin:alpha=1,beta=0", "fatou", "poly:-2,1,1", "poincare:s=2,P=w^2"}) {
    const auto m = FunctionModel::parse(spec);
    const auto again = FunctionModel::parse(m.spec_string());
    CHECK(again.kind() == m.kind());
    const cplx z{0.3, 0.2};
    CHECK(std::abs(again.eval(z) - m.eval(z)) < 1e-12);
  }
  CHECK_THROWS_AS((void)FunctionModel::parse("nope:1"), ParseError);
  CHECK(parse_complex("1+2i") == cplx(1.0, 2.0));
  CHECK(parse_complex("-0.5i") == cplx(0.0, -0.5));
  CHECK(parse_complex("3e-2") == cplx(0.03, 0.0));
}

TEST_CASE("logM oracle sanity") {
  const auto e = FunctionModel::scaled_exp(1.0);
  CHECK(e.logM_oracle(3.0) == doctest::Approx(3.0));
  const auto s = FunctionModel::sine(1.0, 0.0);
  CHECK(s.logM_oracle(2.0) == doctest::Approx(std::log(std::sinh(2.0))).epsilon(1e-12));
  const auto p = FunctionModel::polynomial({{1, 0}, {0, 0}, {0, 0}, {1, 0}});  // z^3+1
  CHECK(p.logM_oracle(2.0) == doctest::Approx(std::log(9.0)).epsilon(1e-12));
}

TEST_CASE("poincare evaluation refuses the uncertified domain") {
  const auto p = FunctionModel::poincare(2.0, Bivariate::parse("w^2"));
  CHECK(p.certified_radius() > 1e5);
  CHECK_THROWS_AS((void)p.eval(cplx(1e9, 0.0)), DomainExceeded);
}
