#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "geotrace/census.hpp"
#include "geotrace/rational.hpp"

namespace geotrace {

struct ResidueDensity {
  u32 a = 0;
  double empirical = 0.0;  // psi_a^+-(x) / x
  Rational predicted;
  double abs_dev = 0.0;
  double rel_dev = 0.0;  // abs_dev / predicted
};

struct DensityTrendRow {
  double x = 0.0;
  std::vector<double> rel_dev;  // per residue
  double max_rel_dev = 0.0;
  bool pre_asymptotic = false;
};

struct DensityReport {
  u32 p = 0;
  double x = 0.0;  // final checkpoint
  bool pre_asymptotic = false;
  std::vector<ResidueDensity> residues;
  std::vector<DensityTrendRow> trend;

  double max_rel_dev() const;
};

// Checkpoints below this, or with psi == 0, are flagged pre-asymptotic.
inline constexpr double kAsymptoticFloor = 100.0;

// Throws Errc::invalid_argument on a series without checkpoints.
DensityReport density_report(const CensusSeries& series);

struct ExponentFit {
  double beta = 0.0;
  double c = 0.0;
  double residual = 0.0;  // RMS residual in log space
  std::size_t points_used = 0;
  std::size_t zero_excluded = 0;
  std::size_t small_x_excluded = 0;
};

struct FitOptions {
  double min_x = 100.0;
};

// Least squares log|err| = beta log x + log c over points with err > 0 and
// x >= min_x. Throws Errc::insufficient_data with fewer than 4 such points.
ExponentFit error_exponent_fit(const std::vector<std::pair<double, double>>& points,
                               const FitOptions& options = {});

// (x_i, |psi_a^+-(x_i) - predicted * x_i|) for every checkpoint.
std::vector<std::pair<double, double>> density_errors(const CensusSeries& series,
                                                      u32 a);

struct ClassConstantRow {
  std::size_t index = 0;
  double share = 0.0;  // |D| / |SL2(F_p)|
  double ratio = 0.0;  // accumulator / (x * share)
};

// Compares class accumulators against c * |D| / |G| * x at one checkpoint.
// `c` is the member of {1, 2} closest to the weighted mean ratio; the
// two-sided constant treats psi_{G,D} = acc(D) + acc(-D), which covers both
// signs of the trace.
struct ClassConstantReport {
  u32 p = 0;
  double x = 0.0;
  std::vector<ClassConstantRow> rows;
  double mean_ratio = 0.0;
  int c = 0;
  double max_rel_dev = 0.0;  // max |ratio - c| / c
  double two_sided_mean_ratio = 0.0;
  int two_sided_c = 0;
  double two_sided_max_rel_dev = 0.0;
};

ClassConstantReport class_constant_report(const ClassResolvedSeries& series,
                                          std::size_t checkpoint);

}  // namespace geotrace
