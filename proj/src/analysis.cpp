#include "geotrace/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "geotrace/error.hpp"
#include "geotrace/sl2fp.hpp"

namespace geotrace {

double DensityReport::max_rel_dev() const {
  double worst = 0.0;
  for (const auto& r : residues) worst = std::max(worst, r.rel_dev);
  return worst;
}

DensityReport density_report(const CensusSeries& series) {
  if (series.checkpoints.empty() || series.psi_a.empty()) {
    throw Error(Errc::invalid_argument, "series has no checkpoints");
  }
  const u32 p = series.p;
  std::vector<Rational> predicted;
  for (u32 a = 0; a < p; ++a) predicted.push_back(predicted_density(p, a));

  DensityReport report;
  report.p = p;
  for (std::size_t i = 0; i < series.checkpoints.size(); ++i) {
    const double x = series.checkpoints[i];
    DensityTrendRow row{x, {}, 0.0,
                        x < kAsymptoticFloor || series.psi(i) == 0.0};
    std::vector<ResidueDensity> residues;
    for (u32 a = 0; a < p; ++a) {
      const double empirical = series.psi_pm(i, a) / x;
      const double pred = predicted[a].to_double();
      const double abs_dev = std::fabs(empirical - pred);
      residues.push_back({a, empirical, predicted[a], abs_dev, abs_dev / pred});
      row.rel_dev.push_back(abs_dev / pred);
      row.max_rel_dev = std::max(row.max_rel_dev, abs_dev / pred);
    }
    report.x = x;
    report.pre_asymptotic = row.pre_asymptotic;
    report.residues = std::move(residues);
    report.trend.push_back(std::move(row));
  }
  return report;
}

ExponentFit error_exponent_fit(
    const std::vector<std::pair<double, double>>& points,
    const FitOptions& options) {
  ExponentFit fit;
  std::vector<std::pair<double, double>> logs;
  for (const auto& [x, err] : points) {
    if (x < options.min_x) {
      ++fit.small_x_excluded;
    } else if (!(err > 0.0)) {
      ++fit.zero_excluded;
    } else {
      logs.emplace_back(std::log(x), std::log(err));
    }
  }
  if (logs.size() < 4) {
    throw Error(Errc::insufficient_data,
                "exponent fit needs at least 4 usable points, got " +
                    std::to_string(logs.size()));
  }
  const double n = static_cast<double>(logs.size());
  double mx = 0.0, my = 0.0;
  for (const auto& [lx, ly] : logs) {
    mx += lx;
    my += ly;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (const auto& [lx, ly] : logs) {
    sxx += (lx - mx) * (lx - mx);
    sxy += (lx - mx) * (ly - my);
  }
  if (sxx == 0.0) {
    throw Error(Errc::insufficient_data, "exponent fit needs distinct x values");
  }
  fit.beta = sxy / sxx;
  const double log_c = my - fit.beta * mx;
  fit.c = std::exp(log_c);
  double ss = 0.0;
  for (const auto& [lx, ly] : logs) {
    const double r = ly - (fit.beta * lx + log_c);
    ss += r * r;
  }
  fit.residual = std::sqrt(ss / n);
  fit.points_used = logs.size();
  return fit;
}

std::vector<std::pair<double, double>> density_errors(const CensusSeries& series,
                                                      u32 a) {
  const double pred = predicted_density(series.p, a).to_double();
  std::vector<std::pair<double, double>> out;
  for (std::size_t i = 0; i < series.checkpoints.size(); ++i) {
    const double x = series.checkpoints[i];
    out.emplace_back(x, std::fabs(series.psi_pm(i, a) - pred * x));
  }
  return out;
}

ClassConstantReport class_constant_report(const ClassResolvedSeries& series,
                                          std::size_t checkpoint) {
  const double x = series.checkpoints.at(checkpoint);
  const auto& acc = series.accumulators.at(checkpoint);
  const double group = static_cast<double>(sl2_order(series.p));

  ClassConstantReport report;
  report.p = series.p;
  report.x = x;
  double total = 0.0;
  std::vector<double> two_sided;
  for (std::size_t k = 0; k < series.classes.size(); ++k) {
    const double share = static_cast<double>(series.classes[k].size) / group;
    report.rows.push_back({k, share, acc[k] / (x * share)});
    total += acc[k];
    const std::size_t neg =
        class_index(series.classes, negate(series.classes[k].kind, series.p));
    two_sided.push_back((acc[k] + acc[neg]) / (x * share));
  }

  auto nearest = [](double r) { return std::fabs(r - 1.0) <= std::fabs(r - 2.0) ? 1 : 2; };
  report.mean_ratio = total / x;
  report.c = nearest(report.mean_ratio);
  report.two_sided_mean_ratio = 2.0 * total / x;
  report.two_sided_c = nearest(report.two_sided_mean_ratio);
  for (std::size_t k = 0; k < report.rows.size(); ++k) {
    report.max_rel_dev = std::max(
        report.max_rel_dev, std::fabs(report.rows[k].ratio - report.c) / report.c);
    report.two_sided_max_rel_dev =
        std::max(report.two_sided_max_rel_dev,
                 std::fabs(two_sided[k] - report.two_sided_c) / report.two_sided_c);
  }
  return report;
}

}  // namespace geotrace
