// Truncated Dirichlet series for L(1, (D/.)).

#include <cmath>
#include <string>
#include <vector>

#include "geotrace/error.hpp"
#include "geotrace/quadforms.hpp"
#include "geotrace/summation.hpp"

namespace geotrace {

namespace {

// Digamma for x > 0: shift above 10, then the asymptotic series.
double digamma(double x) {
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double inv = 1.0 / x;
  const double inv2 = inv * inv;
  const double series =
      inv2 * (1.0 / 12 -
              inv2 * (1.0 / 120 -
                      inv2 * (1.0 / 252 -
                              inv2 * (1.0 / 240 - inv2 * (1.0 / 132)))));
  return acc + std::log(x) - 0.5 * inv - series;
}

// (D/r) for r = 0..period-1, filled multiplicatively from the prime values.
std::vector<signed char> character_table(i64 d, u64 period) {
  std::vector<signed char> chi(period + 1, 0);
  std::vector<u32> spf(period + 1, 0);
  std::vector<u32> primes;
  if (period >= 1) chi[1] = 1;
  for (u64 n = 2; n <= period; ++n) {
    if (spf[n] == 0) {
      spf[n] = static_cast<u32>(n);
      primes.push_back(static_cast<u32>(n));
      chi[n] = static_cast<signed char>(kronecker(d, static_cast<i64>(n)));
    } else {
      chi[n] = static_cast<signed char>(chi[spf[n]] * chi[n / spf[n]]);
    }
    for (u32 q : primes) {
      if (q > spf[n] || n * q > period) break;
      spf[n * q] = q;
    }
  }
  return chi;
}

}  // namespace

double l_partial_sum_direct(const Discriminant& disc, u64 terms) {
  NeumaierSum sum;
  for (u64 n = 1; n <= terms; ++n) {
    const int k = kronecker(disc.value(), static_cast<i64>(n));
    if (k != 0) sum.add(k / static_cast<double>(n));
  }
  return sum.value();
}

double l_partial_sum(const Discriminant& disc, u64 terms) {
  const u64 period = static_cast<u64>(disc.value());
  if (terms <= 2 * period) return l_partial_sum_direct(disc, terms);

  // n = kD + r: sum_{k < K_r} 1/(kD + r) = 1/r + (psi(K_r + y) - psi(1 + y))/D
  // with y = r/D.
  const std::vector<signed char> chi = character_table(disc.value(), period);
  const u64 full = terms / period;
  const u64 extra = terms % period;
  const double inv_d = 1.0 / static_cast<double>(period);
  NeumaierSum sum;
  for (u64 r = 1; r < period; ++r) {
    if (chi[r] == 0) continue;
    const double y = static_cast<double>(r) * inv_d;
    const double count = static_cast<double>(full + (r <= extra ? 1 : 0));
    const double inner = 1.0 / static_cast<double>(r) +
                         (digamma(count + y) - digamma(1.0 + y)) * inv_d;
    sum.add(chi[r] * inner);
  }
  return sum.value();
}

LSeriesResult l_series_truncated(const Discriminant& disc, double rel_tol,
                                 u64 max_terms) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) {
    throw Error(Errc::invalid_argument, "rel_tol must lie in (0, 1)");
  }
  const double d = static_cast<double>(disc.value());
  const double numerator = 2.0 * std::sqrt(d) * std::log(d);
  auto unreachable = [&] {
    return Error(Errc::tolerance_unreachable,
                 "L-series for D=" + std::to_string(disc.value()) +
                     " needs more than " + std::to_string(max_terms) +
                     " terms");
  };

  double want = std::ceil(numerator / rel_tol);
  for (int iter = 0; iter < 64; ++iter) {
    if (want > static_cast<double>(max_terms)) throw unreachable();
    const u64 n = static_cast<u64>(want);
    const double value = l_partial_sum(disc, n);
    const double bound = numerator / static_cast<double>(n);
    if (bound <= rel_tol * std::fabs(value)) return {value, n, bound};
    double next = std::ceil(1.01 * numerator / (rel_tol * std::fabs(value)));
    if (!(next > want)) next = 2.0 * want;
    want = next;
  }
  throw unreachable();
}

double l_value_truncated(const Discriminant& disc, double rel_tol,
                         u64 max_terms) {
  return l_series_truncated(disc, rel_tol, max_terms).value;
}

}  // namespace geotrace
