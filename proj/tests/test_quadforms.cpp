#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "doctest.h"
#include "geotrace/census.hpp"
#include "geotrace/oracles.hpp"
#include "geotrace/quadforms.hpp"
#include "support.hpp"

using namespace geotrace;

namespace {

// Reduced predicate by squaring, written out independently of QuadForm.
bool reduced_by_squaring(i64 a, i64 b, i64 d) {
  const i64 abs_a = a < 0 ? -a : a;
  if (b <= 0 || b * b >= d) return false;
  if ((2 * abs_a + b) * (2 * abs_a + b) <= d) return false;  // sqrt(D) - b < 2|a|
  const i64 gap = 2 * abs_a - b;                              // 2|a| < sqrt(D) + b
  return gap <= 0 || gap * gap < d;
}

// Every primitive reduced form with |a|, |c| <= box and 0 < b <= box.
std::vector<QuadForm> exhaustive_reduced(i64 d, i64 box) {
  std::vector<QuadForm> out;
  for (i64 a = -box; a <= box; ++a) {
    for (i64 c = -box; c <= box; ++c) {
      for (i64 b = 1; b <= box; ++b) {
        if (a == 0 || b * b - 4 * a * c != d) continue;
        if (std::gcd(std::gcd(a, b), c) != 1) continue;
        if (reduced_by_squaring(a, b, d)) out.push_back({a, b, c});
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<i64> valid_discriminants(i64 hi) {
  std::vector<i64> out;
  for (i64 d = 5; d <= hi; ++d) {
    if (Discriminant::is_valid(d)) out.push_back(d);
  }
  return out;
}

}  // namespace

TEST_CASE("discriminant validation") {
  CHECK(Discriminant::is_valid(5));
  CHECK(Discriminant::is_valid(8));
  CHECK(Discriminant::is_valid(12));
  CHECK_FALSE(Discriminant::is_valid(4));
  CHECK_FALSE(Discriminant::is_valid(9));
  CHECK_FALSE(Discriminant::is_valid(7));
  CHECK_FALSE(Discriminant::is_valid(1));
  CHECK(test::error_code([] { Discriminant{4}; }) == Errc::invalid_discriminant);
  CHECK(test::error_code([] { Discriminant{-3}; }) == Errc::invalid_discriminant);
}

TEST_CASE("reduced forms of 5 and 8") {
  const std::vector<QuadForm> five{{-1, 1, 1}, {1, 1, -1}};
  CHECK(reduced_forms(Discriminant{5}) == five);
  CHECK(exhaustive_reduced(5, 3) == five);
  const auto eight = reduced_forms(Discriminant{8});
  CHECK(eight == exhaustive_reduced(8, 4));
  for (const QuadForm& f : eight) CHECK(reduced_by_squaring(f.a, f.b, 8));
}

TEST_CASE("reduced form enumerations agree with exhaustive search") {
  for (i64 d : valid_discriminants(1500)) {
    const Discriminant disc(d);
    const auto fast = reduced_forms(disc);
    REQUIRE(fast == reduced_forms_by_divisors(disc));
    if (d <= 400) REQUIRE(fast == exhaustive_reduced(d, disc.isqrt() + 1));
    for (const QuadForm& f : fast) {
      REQUIRE(f.discriminant() == d);
      REQUIRE(f.is_reduced());
      REQUIRE(f.is_primitive());
    }
  }
}

TEST_CASE("reduction step permutes the reduced forms") {
  for (i64 d : valid_discriminants(3000)) {
    const Discriminant disc(d);
    const auto forms = reduced_forms(disc);
    std::vector<QuadForm> image;
    for (const QuadForm& f : forms) {
      const QuadForm g = reduction_step(f, disc);
      REQUIRE(g.discriminant() == d);
      REQUIRE(g.is_reduced());
      image.push_back(g);
    }
    std::sort(image.begin(), image.end());
    REQUIRE(image == forms);
  }
}

TEST_CASE("narrow class number examples") {
  CHECK(class_number_narrow(Discriminant{5}).h_plus == 1);
  CHECK(class_number_narrow(Discriminant{8}).h_plus == 1);
  CHECK(class_number_narrow(Discriminant{12}).h_plus == 2);
  CHECK(oracle::equivalence_class_count(Discriminant{5}) == 1);
  CHECK(oracle::equivalence_class_count(Discriminant{8}) == 1);
  CHECK(oracle::equivalence_class_count(Discriminant{12}) == 2);
  // (1,0,-3) and (-1,0,3) have b = 0, so they are not reduced; their classes
  // contain the two reduced representatives.
  const auto twelve = class_number_narrow(Discriminant{12});
  CHECK(twelve.representatives.size() == 2);
}

TEST_CASE("narrow class number matches the equivalence oracle") {
  for (i64 d : valid_discriminants(700)) {
    const Discriminant disc(d);
    const NarrowClassNumber h = class_number_narrow(disc);
    REQUIRE(h.h_plus == oracle::equivalence_class_count(disc));
    REQUIRE(h.representatives.size() == h.h_plus);
  }
}

TEST_CASE("pell_from_known examples") {
  CHECK(pell_from_known(Discriminant{5}, 3, 1) == PellSolution{3, 1});
  CHECK(pell_from_known(Discriminant{5}, 7, 3) == PellSolution{3, 1});
  CHECK(pell_from_known(Discriminant{8}, 6, 2) == PellSolution{6, 2});
  CHECK(test::error_code([] { pell_from_known(Discriminant{5}, 4, 1); }) ==
        Errc::invalid_argument);
}

TEST_CASE("pell_from_known recovers the scanned fundamental solution from powers") {
  for (i64 d : valid_discriminants(3000)) {
    const Discriminant disc(d);
    const auto fundamental = oracle::pell_by_scan(disc, 20'000);
    if (!fundamental || fundamental->tau > 2'000'000) continue;
    const u64 tau = fundamental->tau, s = fundamental->s;
    // eps^2 has trace tau^2 - 2 and coefficient tau * s.
    REQUIRE(pell_from_known(disc, tau * tau - 2, tau * s) == *fundamental);
    REQUIRE(pell_from_known(disc, tau, s) == *fundamental);
  }
}

TEST_CASE("log unit and order data") {
  const Discriminant five{5};
  const double expect = std::log((3.0 + std::sqrt(5.0)) / 2.0);
  CHECK(log_unit(five, {3, 1}) == doctest::Approx(expect).epsilon(1e-15));
  const OrderData od = order_data(five, {3, 1}, Backend::exact);
  CHECK(od.h_plus == 1u);
  CHECK(od.weight == doctest::Approx(0.96242).epsilon(1e-5));
  CHECK(od.weight == od.log_eps * static_cast<double>(*od.h_plus));

  const OrderData an = order_data(five, {3, 1}, Backend::analytic);
  CHECK_FALSE(an.h_plus.has_value());
  CHECK(an.representatives.empty());
  CHECK(an.weight == doctest::Approx(od.weight).epsilon(2e-4));
}

TEST_CASE("truncated L values") {
  const double l5 = l_value_truncated(Discriminant{5}, 1e-6);
  CHECK(l5 == doctest::Approx(0.43041).epsilon(1e-4));
  CHECK(std::sqrt(5.0) * l5 == doctest::Approx(std::log((3 + std::sqrt(5.0)) / 2)).epsilon(1e-5));
  const double l8 = l_value_truncated(Discriminant{8}, 1e-6);
  CHECK(l8 == doctest::Approx(0.62323).epsilon(1e-4));
  CHECK(std::sqrt(8.0) * l8 == doctest::Approx(1.76275).epsilon(1e-5));
  const double p12 = 2.0 * std::log(2.0 + std::sqrt(3.0));
  CHECK(l_value_truncated(Discriminant{12}, 1e-6) ==
        doctest::Approx(p12 / std::sqrt(12.0)).epsilon(1e-5));
}

TEST_CASE("truncated L value errors") {
  const Discriminant five{5};
  CHECK(test::error_code([&] { l_value_truncated(five, 0.0); }) == Errc::invalid_argument);
  CHECK(test::error_code([&] { l_value_truncated(five, 1.0); }) == Errc::invalid_argument);
  CHECK(test::error_code([&] { l_value_truncated(five, 1e-9, 1000); }) ==
        Errc::tolerance_unreachable);
  const LSeriesResult r = l_series_truncated(five, 1e-3);
  CHECK(r.tail_bound <= 1e-3 * r.value);
}

TEST_CASE("periodic partial sums match direct summation") {
  for (i64 d : {5, 8, 12, 13, 21, 60, 229, 1001}) {
    const Discriminant disc(d);
    for (u64 n : {u64{1}, u64{7}, u64(d), u64(2 * d + 3), u64(50'000), u64(123'457)}) {
      const double direct = l_partial_sum_direct(disc, n);
      REQUIRE(l_partial_sum(disc, n) == doctest::Approx(direct).epsilon(1e-12));
    }
  }
}

TEST_CASE("exact and analytic weights agree on census discriminants") {
  const SpfTable table(402);
  for (u64 t = 3; t <= 400; ++t) {
    for (const auto& part : trace_decomposition(t, table).parts) {
      const KnownSolution known{t, part.m};
      const double exact = order_data(part.disc, known, Backend::exact).weight;
      const double analytic = order_data(part.disc, known, Backend::analytic, 1e-4).weight;
      REQUIRE(analytic == doctest::Approx(exact).epsilon(1e-3));
    }
  }
}
