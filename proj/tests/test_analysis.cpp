#include <cmath>

#include "doctest.h"
#include "geotrace/analysis.hpp"
#include "geotrace/census.hpp"
#include "support.hpp"

using namespace geotrace;

namespace {

std::vector<std::pair<double, double>> synthetic(double (*err)(double)) {
  std::vector<std::pair<double, double>> out;
  for (double x : geometric_checkpoints(100.0, 1e5, 10)) out.emplace_back(x, err(x));
  return out;
}

}  // namespace

TEST_CASE("density report on constructed input") {
  // p = 5: psi_0^+- / x = 0.26 against the prediction 1/4.
  CensusSeries s{5, Normalization::geodesic, {1000.0}, {{260.0, 0, 0, 0, 0}}};
  const DensityReport r = density_report(s);
  CHECK(r.residues[0].predicted == Rational(1, 4));
  CHECK(r.residues[0].empirical == doctest::Approx(0.26));
  CHECK(r.residues[0].rel_dev == doctest::Approx(0.04));
  CHECK_FALSE(r.pre_asymptotic);
  Rational sum;
  for (const auto& row : r.residues) sum += row.predicted;
  CHECK(sum == Rational(1));
}

TEST_CASE("density report flags pre-asymptotic checkpoints") {
  CensusSeries s{3, Normalization::geodesic, {2.0}, {{0.0, 0.0, 0.0}}};
  const DensityReport r = density_report(s);
  CHECK(r.pre_asymptotic);
  for (const auto& row : r.residues) {
    CHECK(row.rel_dev == 1.0);
    CHECK(row.empirical >= 0.0);
  }
  // Predictions for a = 1, 2, 0.
  CHECK(r.residues[1].predicted == Rational(3, 8));
  CHECK(r.residues[2].predicted == Rational(3, 8));
  CHECK(r.residues[0].predicted == Rational(1, 4));
}

TEST_CASE("density report needs a checkpoint") {
  CensusSeries s{3, Normalization::geodesic, {}, {}};
  CHECK(test::error_code([&] { density_report(s); }) == Errc::invalid_argument);
}

TEST_CASE("density report trend rows") {
  CensusOptions options;
  const auto s = run_census(1e4, 5, geometric_checkpoints(10.0, 1e4, 7), options);
  const DensityReport r = density_report(s);
  REQUIRE(r.trend.size() == 7);
  CHECK(r.trend.front().pre_asymptotic);
  CHECK_FALSE(r.trend.back().pre_asymptotic);
  CHECK(r.trend.back().max_rel_dev == doctest::Approx(r.max_rel_dev()));
  CHECK(r.x == 1e4);
  // Pure function of the series.
  const DensityReport again = density_report(s);
  CHECK(again.max_rel_dev() == r.max_rel_dev());
}

TEST_CASE("exponent fit recovers planted power laws") {
  const auto f1 = error_exponent_fit(synthetic([](double x) { return 3.0 * std::pow(x, 0.75); }));
  CHECK(f1.beta == doctest::Approx(0.75).epsilon(1e-9));
  CHECK(f1.c == doctest::Approx(3.0).epsilon(1e-9));
  CHECK(f1.points_used == 10);
  CHECK(f1.residual < 1e-9);

  const auto f2 = error_exponent_fit(synthetic([](double) { return 5.0; }));
  CHECK(std::fabs(f2.beta) < 0.01);

  const auto f3 = error_exponent_fit(
      synthetic([](double x) { return std::sqrt(x) * (1 + 0.1 * std::sin(std::log(x))); }));
  CHECK(f3.beta >= 0.45);
  CHECK(f3.beta <= 0.55);
  CHECK(f3.residual > 0.0);
}

TEST_CASE("exponent fit exclusions") {
  std::vector<std::pair<double, double>> pts{
      {10.0, 1.0}, {50.0, 2.0}, {200.0, 0.0}, {400.0, 4.0},
      {800.0, 5.0}, {1600.0, 6.0}, {3200.0, 7.0}};
  const auto f = error_exponent_fit(pts);
  CHECK(f.points_used == 4);
  CHECK(f.zero_excluded == 1);
  CHECK(f.small_x_excluded == 2);
  CHECK(test::error_code([&] { error_exponent_fit(pts, {1000.0}); }) ==
        Errc::insufficient_data);
  const auto relaxed = error_exponent_fit(pts, {1.0});
  CHECK(relaxed.points_used == 6);
}

TEST_CASE("class constant report") {
  CensusOptions options;
  const auto s = run_census_by_class(1e4, 3, {}, options);
  const auto r = class_constant_report(s, 0);
  CHECK(r.rows.size() == s.classes.size());
  CHECK(r.c == 1);
  CHECK(r.two_sided_c == 2);
  CHECK(r.two_sided_mean_ratio == doctest::Approx(2 * r.mean_ratio));
  double share = 0.0;
  for (const auto& row : r.rows) share += row.share;
  CHECK(share == doctest::Approx(1.0));
}
