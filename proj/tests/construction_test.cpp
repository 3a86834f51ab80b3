#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "dimlab/construction.hpp"
#include "dimlab/report.hpp"

using namespace dimlab;

namespace {
constexpr double kPi = 3.141592653589793238462643383279502884;

LogMFn oracle_logM(const FunctionModel& m) {
  return [m](double r) { return m.logM_oracle(r); };
}
}  // namespace

TEST_CASE("island radius formula") {
  CHECK(island_radius(50, 1, 1, 50) == doctest::Approx(2.0));
  CHECK(island_radius(100, 2, 0.5, 100) == doctest::Approx(8.0));
  // doubling R with linear log M leaves t unchanged
  CHECK(island_radius(200, 1, 1, 200) == doctest::Approx(island_radius(100, 1, 1, 100)));
}

TEST_CASE("the explicit exponential island") {
  const auto e = FunctionModel::scaled_exp(1.0);
  const auto isl = find_island(e, {50.0, 0.0}, 90.0, 1);

  // log f is the identity in the h frame: U is the rectangle itself
  for (const auto& d : isl.U_boundary) {
    CHECK(std::abs(d.real()) <= 1.0 + 1e-9);
    CHECK(d.imag() >= 5.0 * kPi - 1e-9);
    CHECK(d.imag() <= 11.0 * kPi + 1e-9);
  }
  for (const auto& d : isl.V_boundary) {
    CHECK(d.real() >= -1e-9);
    CHECK(d.real() <= std::log(2.0) + 1e-9);
    CHECK(std::abs(d.imag() - 8.0 * kPi) <= 2.0 * kPi + 1e-9);
  }
  CHECK(isl.area_V == doctest::Approx(4.0 * kPi * std::log(2.0)).epsilon(1e-10));
  CHECK(isl.max_bijectivity_residual < 1e-9);
  CHECK(isl.koebe_ratio == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(isl.gamma_hat == doctest::Approx(90.0).epsilon(1e-12));
  CHECK(isl.zero_free_disk);
}

TEST_CASE("sine island at a complex anchor") {
  const auto s = FunctionModel::sine(1.0, 0.0);
  const cplx a{40.0, 10.0};
  const double t = 1.25 * std::sqrt(1.0 + 121.0 * kPi * kPi) / std::abs(log_deriv(s, a) / a);
  const auto isl = find_island(s, a, t, 1);
  CHECK(isl.max_bijectivity_residual < 1e-9);
  CHECK(isl.area_V > 0.0);
  CHECK(isl.koebe_ratio <= 12.0);
  // the disk is larger than the distance to the real axis, so it holds zeros
  CHECK_FALSE(isl.zero_free_disk);
}

TEST_CASE("derivative gate refuses flat anchors") {
  const auto f = FunctionModel::fatou();
  IslandOptions opt;
  opt.mu_gate = 1.0;
  // near z = 0 the fatou model has f' ~ 0
  CHECK_THROWS_AS((void)find_island(f, {0.01, 0.0}, 1.0, 1, opt), NoIsland);
}

TEST_CASE("disk packing against the hexagonal count") {
  // f(z) = z: ratio == 1, |f| >= 1 on the annulus, so membership is constant
  const auto e = FunctionModel::polynomial({{0, 0}, {1, 0}});
  const TSetParams always{0.0, 1e18, 0.0, 0.0};
  const auto pk = pack_disks(e, always, 100.0, 5.0, 200000, 7, oracle_logM(e));
  CHECK(pk.eta_hat == 1.0);
  // hexagonal count of the shrunken annulus [105, 195]
  const double hex = 0.9069 * (kPi * (195.0 * 195.0 - 105.0 * 105.0)) / (kPi * 25.0);
  const double got = static_cast<double>(pk.centers.size());
  CHECK(got > hex / 4.0);
  CHECK(got < hex);
  CHECK(got >= pk.packing_floor);
  // all pairwise separations at least 2t, all disks inside the annulus
  for (std::size_t i = 0; i < pk.centers.size(); ++i) {
    const double az = std::abs(pk.centers[i]);
    CHECK(az >= 105.0 - 1e-9);
    CHECK(az <= 195.0 + 1e-9);
    for (std::size_t j = i + 1; j < pk.centers.size(); ++j)
      CHECK(std::abs(pk.centers[i] - pk.centers[j]) >= 10.0 - 1e-9);
  }
}

TEST_CASE("packing fails cleanly when membership is empty") {
  const auto e = FunctionModel::scaled_exp(1.0);
  const TSetParams never{1e9, 2e9, 0.0, 0.0};
  CHECK_THROWS_AS((void)pack_disks(e, never, 100.0, 5.0, 2000, 3, oracle_logM(e)),
                  EmptyPacking);
}

TEST_CASE("two-sided membership shapes the packing of the exponential") {
  const auto e = FunctionModel::scaled_exp(1.0);
  const TSetParams params{0.9, 1.1, 8.0, 0.0};
  const double t = island_radius(100.0, 1.0, 0.9, 100.0);
  const auto pk = pack_disks(e, params, 100.0, t, 50000, 11, oracle_logM(e));
  CHECK(pk.centers.size() >= 1);
  for (const auto& a : pk.centers) CHECK(a.real() > 8.0 * std::log(std::abs(a)));
}

TEST_CASE("depth-1 build on the exponential") {
  const auto e = FunctionModel::scaled_exp(1.0);
  const TSetParams params{0.9, 1.1, 8.0, 0.0};
  BuildBudgets budgets;
  budgets.max_children = 24;
  budgets.packing_budget = 8000;
  const auto res = build_levels(e, 50.0, 1, params, budgets, 5);
  res.collection.validate();
  REQUIRE(res.collection.levels.size() == 2);
  CHECK(res.levels[0].Delta > 0.0);
  CHECK(res.levels[1].cells >= 1);
  CHECK(res.levels[1].forward_residual_max < 1e-9);
  // cells live inside the annulus
  for (const auto& c : res.collection.levels[1].cells) {
    const auto& poly = std::get<PolygonRegion>(c.region);
    for (const auto& v : poly.vertices) {
      CHECK(std::abs(v) >= 50.0 * (1.0 - 1e-6));
      CHECK(std::abs(v) <= 100.0 * (1.0 + 1e-6));
    }
  }
}

TEST_CASE("depth-2 build on the exponential") {
  const auto e = FunctionModel::scaled_exp(1.0);
  const TSetParams params{0.9, 1.1, 8.0, 0.0};
  BuildBudgets budgets;
  budgets.max_children = 16;
  budgets.packing_budget = 8000;
  const auto res = build_levels(e, 50.0, 2, params, budgets, 5);
  res.collection.validate();
  REQUIRE(res.collection.levels.size() == 3);
  REQUIRE(res.levels.size() == 3);
  CHECK(res.levels[1].koebe_ratio_max <= 12.0);
  CHECK(res.levels[2].koebe_ratio_max <= 12.0);
  CHECK(res.levels[1].forward_residual_max < 1e-6);
  CHECK(res.levels[2].forward_residual_max < 1e-6);
  CHECK(res.levels[1].radius_growth_ok);
  CHECK(res.levels[2].radius_growth_ok);
  CHECK(res.levels[2].cells >= 1);
  CHECK(res.levels[1].Delta > 0.0);
  // the image annuli sit at the eighth-power scale
  CHECK(res.levels[1].log_R >= 8.0 * std::log(50.0) * (1.0 - 1e-9));
  CHECK(res.levels[2].log_R >= 8.0 * res.levels[1].log_R * 0.9);
  // forward map consistency through the actual function: f(center) of each
  // level-2 cell lands in the image annulus of its parent chain
  const auto& lvl2 = res.collection.levels[2];
  for (const auto& c : lvl2.cells) {
    const auto& disk = std::get<DiskRegion>(c.region);
    const cplx v = e.eval(disk.center);
    const double lr = e.log_abs(v);  // log |f^2(center)|
    CHECK(lr >= 8.0 * std::log(std::abs(v)) * (1.0 - 1e-6));
  }
  // finite-depth estimate is computed and labeled
  CHECK(!std::isnan(res.mcmullen_estimate));
}

TEST_CASE("small annuli cannot seat the membership set") {
  const auto e = FunctionModel::scaled_exp(1.0);
  const TSetParams params{0.9, 1.1, 8.0, 0.0};
  BuildBudgets budgets;
  budgets.packing_budget = 2000;
  CHECK_THROWS_AS((void)build_levels(e, 5.0, 1, params, budgets, 1), EmptyPacking);
}

TEST_CASE("nested collections round-trip through their JSON form") {
  const auto e = FunctionModel::scaled_exp(1.0);
  const TSetParams params{0.9, 1.1, 8.0, 0.0};
  BuildBudgets budgets;
  budgets.max_children = 6;
  budgets.packing_budget = 4000;
  const auto res = build_levels(e, 50.0, 1, params, budgets, 3);
  const Json j = to_json(res.collection);
  const auto back = collection_from_json(j);
  back.validate();
  CHECK(back.levels.size() == res.collection.levels.size());
  CHECK(to_json(back) == j);
}
