#pragma once

// Indefinite binary quadratic forms, narrow class numbers of real quadratic
// orders, norm-one Pell solutions and the per-discriminant line weight
//   P(D) = h+(D) * log eps+(D)  (= sqrt(D) * L(1, (D/.)) ).

#include <compare>
#include <cstdint>
#include <optional>
#include <vector>

#include "geotrace/numtheory.hpp"

namespace geotrace {

// a*X^2 + b*XY + c*Y^2
struct QuadForm {
  i64 a = 0;
  i64 b = 0;
  i64 c = 0;

  i64 discriminant() const noexcept { return b * b - 4 * a * c; }
  bool is_primitive() const noexcept;

  // 0 < b < sqrt(D) and sqrt(D) - b < 2|a| < sqrt(D) + b, decided exactly.
  bool is_reduced() const noexcept;

  QuadForm scaled(i64 m) const noexcept { return {a * m, b * m, c * m}; }

  auto operator<=>(const QuadForm&) const = default;
};

// Positive non-square discriminant D == 0, 1 (mod 4), D >= 5.
class Discriminant {
 public:
  // Throws Errc::invalid_discriminant.
  explicit Discriminant(i64 value);

  static bool is_valid(i64 value) noexcept;

  i64 value() const noexcept { return value_; }
  // floor(sqrt(D)); sqrt(D) itself is irrational.
  i64 isqrt() const noexcept { return isqrt_; }

  auto operator<=>(const Discriminant&) const = default;

 private:
  i64 value_;
  i64 isqrt_;
};

// tau^2 - D s^2 = 4; the unit is (tau + s sqrt(D)) / 2.
struct PellSolution {
  u64 tau = 0;
  u64 s = 0;

  auto operator<=>(const PellSolution&) const = default;
};

struct NarrowClassNumber {
  u64 h_plus = 0;
  // One reduced form per cycle, each cycle represented by its least form.
  std::vector<QuadForm> representatives;
};

enum class Backend { exact, analytic };

struct OrderData {
  Discriminant disc;
  std::optional<u64> h_plus;  // unset for the analytic backend
  PellSolution pell;
  double log_eps = 0.0;
  double weight = 0.0;
  std::vector<QuadForm> representatives;
};

// Reduced primitive forms of discriminant D (both signs of a), sorted.
// Enumerates a and solves b^2 == D (mod 4|a|) with square roots modulo prime
// powers, keeping the roots that fall in the reduced window.
std::vector<QuadForm> reduced_forms(const Discriminant& disc);

// Same set, found by scanning b and enumerating divisors of (D - b^2)/4.
// Slower; kept as an independent check of reduced_forms.
std::vector<QuadForm> reduced_forms_by_divisors(const Discriminant& disc);

// Cycle step on reduced forms: (a, b, c) -> (c, b', (b'^2 - D) / 4c) with
// b' == -b (mod 2|c|) and sqrt(D) - 2|c| < b' < sqrt(D).
QuadForm reduction_step(const QuadForm& f, const Discriminant& disc);

// Number of cycles of reduction_step on reduced_forms(D).
NarrowClassNumber class_number_narrow(const Discriminant& disc);

// Minimal norm-one solution given any solution t^2 - m^2 D = 4: the smallest
// divisor s of m for which 4 + s^2 D is a perfect square. Cost is linear in
// the minimal s. Throws Errc::invalid_argument when (t, m) is not a solution.
PellSolution pell_from_known(const Discriminant& disc, u64 t, u64 m);

// log((tau + s sqrt(D)) / 2)
double log_unit(const Discriminant& disc, const PellSolution& pell);

struct LSeriesResult {
  double value = 0.0;       // partial sum through `terms`
  u64 terms = 0;            // N
  double tail_bound = 0.0;  // heuristic bound on |L - value|
};

// Partial sum sum_{n <= N} (D/n) / n. Uses periodicity of (D/.) modulo D to
// evaluate long sums in O(D) work; exact up to rounding.
double l_partial_sum(const Discriminant& disc, u64 terms);

// Same partial sum by direct term-by-term summation; O(N).
double l_partial_sum_direct(const Discriminant& disc, u64 terms);

inline constexpr u64 kDefaultLSeriesTermCap = 1'000'000'000'000'000ull;

// Truncated L(1, (D/.)) with N chosen so that the Abel-summation tail bound
// 2 sqrt(D) ln(D) / N is at most rel_tol times the partial sum. The bound
// treats sqrt(D) ln(D) as a ceiling on partial character sums, which is
// heuristic for imprimitive characters. Throws Errc::tolerance_unreachable
// when N would exceed max_terms and Errc::invalid_argument for rel_tol
// outside (0, 1).
LSeriesResult l_series_truncated(const Discriminant& disc, double rel_tol,
                                 u64 max_terms = kDefaultLSeriesTermCap);

double l_value_truncated(const Discriminant& disc, double rel_tol,
                         u64 max_terms = kDefaultLSeriesTermCap);

// A known (possibly non-minimal) solution t^2 - m^2 D = 4.
struct KnownSolution {
  u64 t = 0;
  u64 m = 0;
};

// Exact: h+ from cycles, weight = h+ * log eps+. Analytic: weight =
// sqrt(D) * l_value_truncated(D, l_tol), h+ left unset.
OrderData order_data(const Discriminant& disc, KnownSolution known,
                     Backend backend, double l_tol = 1e-4);

}  // namespace geotrace
