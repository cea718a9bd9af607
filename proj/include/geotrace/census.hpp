#pragma once

// Census of hyperbolic conjugacy classes of SL2(Z) by trace.
//
// A norm-one unit u > 1 with trace t = u + 1/u >= 3 lives in every real
// quadratic order of discriminant D with m^2 D = t^2 - 4. Each such order
// contributes h+(D) conjugacy classes of trace t, each weighted by the
// primitive length log eps+(D). Summing over t in ascending order gives the
// counting functions psi, psi_a and psi_a^+- at any set of checkpoints.

#include <cstddef>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <span>
#include <unordered_map>
#include <vector>

#include "geotrace/numtheory.hpp"
#include "geotrace/quadforms.hpp"
#include "geotrace/sl2fp.hpp"

namespace geotrace {

// What x bounds, and how a class is weighted.
//   geodesic:   N(gamma) = u^2 <= x, weight l(gamma_0) = 2 log eps+.
//               psi(x) ~ x in this normalization.
//   unit_bound: u <= x, weight log eps+.
//               psi_unit(x) = psi_geodesic(x^2) / 2.
enum class Normalization { geodesic, unit_bound };

// Largest t with u <= bound(x), i.e. t <= u + 1/u; 0 when there is none.
u64 trace_bound(double x, Normalization norm);

// 2 for geodesic, 1 for unit_bound.
double weight_scale(Normalization norm) noexcept;

struct TracePart {
  u64 m = 0;
  Discriminant disc;
};

struct TraceDecomposition {
  u64 t = 0;
  std::vector<TracePart> parts;  // ascending m
};

// Every m with m^2 | t^2 - 4 and (t^2 - 4)/m^2 == 0, 1 (mod 4). Factors t-2
// and t+2 separately; requires t >= 3 and t + 2 <= table.limit(), otherwise
// Errc::unsupported_input (sieve too small) or Errc::invalid_argument.
TraceDecomposition trace_decomposition(u64 t, const SpfTable& table);

struct CensusOptions {
  Backend backend = Backend::exact;
  double l_tol = 1e-4;
  // With Backend::analytic, discriminants below this still use the exact
  // backend.
  i64 delta_switch = 1'000'000;
  unsigned threads = 1;
  std::size_t chunk = 64;
  Normalization normalization = Normalization::geodesic;
};

// Memo of OrderData by discriminant. Entries never change once inserted, so
// hits are indistinguishable from recomputation.
class OrderCache {
 public:
  explicit OrderCache(const CensusOptions& options) : options_(options) {}

  std::shared_ptr<const OrderData> get(const Discriminant& disc,
                                       KnownSolution known);

  std::size_t size() const;

 private:
  CensusOptions options_;
  mutable std::shared_mutex mutex_;
  std::unordered_map<i64, std::shared_ptr<const OrderData>> entries_;
};

struct PartWeight {
  u64 m = 0;
  std::shared_ptr<const OrderData> order;
};

struct CensusLine {
  u64 t = 0;
  std::vector<PartWeight> parts;

  // Sum of part weights in part order (log eps+ units, unscaled).
  double total() const noexcept;
};

CensusLine census_line(u64 t, const SpfTable& table, OrderCache& cache);

struct CensusSeries {
  u32 p = 0;
  Normalization normalization = Normalization::geodesic;
  std::vector<double> checkpoints;
  // psi_a[i][a]: accumulated weight of traces t <= T(checkpoints[i]) with
  // t == a (mod p).
  std::vector<std::vector<double>> psi_a;

  double psi(std::size_t i) const;
  // (psi_a + psi_{-a}) / 2
  double psi_pm(std::size_t i, u32 a) const;
};

struct ClassResolvedSeries {
  u32 p = 0;
  Normalization normalization = Normalization::geodesic;
  std::vector<double> checkpoints;
  std::vector<ConjClassDescriptor> classes;  // class_table(p)
  // accumulators[i][k]: weight of positive-trace classes reducing into
  // classes[k], up to checkpoints[i].
  std::vector<std::vector<double>> accumulators;

  // Sum over classes with trace a.
  double marginal(std::size_t i, u32 a) const;
};

// x_i = lo * (hi/lo)^(i/(count-1)), last point exactly hi. Returns {hi} when
// count < 2 or hi <= lo.
std::vector<double> geometric_checkpoints(double lo, double hi,
                                          std::size_t count);

// Unscaled line totals, index t in [0, t_max]; entries below 3 are zero.
// Parallel over fixed chunks of traces; the result does not depend on
// options.threads.
std::vector<double> line_totals(u64 t_max, const CensusOptions& options);

// Residue accumulation of precomputed line totals in ascending t with
// compensated summation per residue.
CensusSeries accumulate_series(std::span<const double> totals, u32 p,
                               std::vector<double> checkpoints,
                               Normalization norm);

// Empty checkpoints means {x_max}. Checkpoints must be positive, ascending
// and <= x_max.
CensusSeries run_census(double x_max, u32 p, std::vector<double> checkpoints,
                        const CensusOptions& options);

// Exact backend only: every conjugacy class of trace t is realized by the
// matrix [[(t-B)/2, -C], [A, (t+B)/2]] of a form m*(a0, b0, c0) with
// (a0, b0, c0) a cycle representative; it is reduced mod p and classified.
ClassResolvedSeries run_census_by_class(double x_max, u32 p,
                                        std::vector<double> checkpoints,
                                        const CensusOptions& options);

// Independent enumeration by (order, power): for each valid D <= delta_bound
// the minimal Pell solution by exhaustive s-scan, then the traces of its
// powers via t_k = tau t_{k-1} - t_{k-2}. Requires delta_bound >= T(x)^2 - 4.
CensusSeries unit_power_oracle(double x_max, u32 p, i64 delta_bound,
                               std::vector<double> checkpoints,
                               Normalization norm);

}  // namespace geotrace
