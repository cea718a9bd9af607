#include "geotrace/report.hpp"

#include <cstdio>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include "geotrace/error.hpp"
#include "geotrace/sl2fp.hpp"

namespace geotrace {

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) out.push_back(cell);
  return out;
}

double parse_number(const std::string& s) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw Error(Errc::invalid_argument, "malformed number '" + s + "'");
  }
  return v;
}

// Builds series from (p, x, a, psi_a) records in file order.
class SeriesBuilder {
 public:
  void add(u32 p, double x, u32 a, double psi_a) {
    if (p < 2 || a >= p) throw Error(Errc::invalid_argument, "bad residue row");
    auto [it, inserted] = by_prime_.try_emplace(p);
    if (inserted) order_.push_back(p);
    CensusSeries& s = it->second;
    s.p = p;
    if (s.checkpoints.empty() || s.checkpoints.back() != x) {
      s.checkpoints.push_back(x);
      s.psi_a.emplace_back(p, 0.0);
    }
    s.psi_a.back()[a] = psi_a;
  }

  std::vector<CensusSeries> finish() {
    std::vector<CensusSeries> out;
    for (u32 p : order_) out.push_back(std::move(by_prime_[p]));
    return out;
  }

 private:
  std::map<u32, CensusSeries> by_prime_;
  std::vector<u32> order_;
};

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

const char* to_string(Normalization norm) noexcept {
  return norm == Normalization::geodesic ? "geodesic" : "unit";
}

const char* to_string(Backend backend) noexcept {
  return backend == Backend::exact ? "exact" : "analytic";
}

std::vector<double> config_checkpoints(const RunConfig& config) {
  if (config.x_max > 100.0 && config.checkpoints >= 2) {
    return geometric_checkpoints(100.0, config.x_max, config.checkpoints);
  }
  return {config.x_max};
}

void write_census_csv(std::ostream& os, std::span<const CensusSeries> series) {
  os << kCensusCsvHeader << '\n';
  for (const CensusSeries& s : series) {
    for (std::size_t i = 0; i < s.checkpoints.size(); ++i) {
      const double x = s.checkpoints[i];
      for (u32 a = 0; a < s.p; ++a) {
        const double pred = predicted_density(s.p, a).to_double();
        const double pm = s.psi_pm(i, a);
        const double abs_err = std::abs(pm / x - pred);
        os << format_double(x) << ',' << s.p << ',' << a << ','
           << format_double(s.psi_a[i][a]) << ',' << format_double(pm) << ','
           << format_double(pred) << ',' << format_double(abs_err) << ','
           << format_double(abs_err / pred) << '\n';
      }
    }
  }
}

nlohmann::ordered_json census_json(std::span<const CensusSeries> series,
                                   const RunConfig& config) {
  nlohmann::ordered_json doc;
  doc["command"] = "census";
  doc["normalization"] = to_string(config.normalization);
  doc["backend"] = to_string(config.backend);
  doc["x_max"] = config.x_max;
  doc["l_tol"] = config.l_tol;
  doc["delta_switch"] = config.delta_switch;
  doc["series"] = nlohmann::ordered_json::array();
  for (const CensusSeries& s : series) {
    const DensityReport report = density_report(s);
    nlohmann::ordered_json js;
    js["p"] = s.p;
    js["checkpoints"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < s.checkpoints.size(); ++i) {
      const double x = s.checkpoints[i];
      nlohmann::ordered_json cp;
      cp["x"] = x;
      cp["psi"] = s.psi(i);
      cp["pre_asymptotic"] = report.trend[i].pre_asymptotic;
      cp["residues"] = nlohmann::ordered_json::array();
      for (u32 a = 0; a < s.p; ++a) {
        const Rational pred = predicted_density(s.p, a);
        const double pm = s.psi_pm(i, a);
        const double abs_err = std::abs(pm / x - pred.to_double());
        cp["residues"].push_back({{"a", a},
                                  {"psi_a", s.psi_a[i][a]},
                                  {"psi_pm", pm},
                                  {"predicted", pred.to_double()},
                                  {"predicted_exact", pred.to_string()},
                                  {"abs_err", abs_err},
                                  {"rel_err", abs_err / pred.to_double()}});
      }
      js["checkpoints"].push_back(std::move(cp));
    }
    doc["series"].push_back(std::move(js));
  }
  return doc;
}

std::vector<CensusSeries> read_census(std::istream& is) {
  is >> std::ws;
  SeriesBuilder builder;
  if (is.peek() == '{') {
    nlohmann::json doc;
    try {
      is >> doc;
      for (const auto& js : doc.at("series")) {
        const u32 p = js.at("p").get<u32>();
        for (const auto& cp : js.at("checkpoints")) {
          const double x = cp.at("x").get<double>();
          for (const auto& r : cp.at("residues")) {
            builder.add(p, x, r.at("a").get<u32>(), r.at("psi_a").get<double>());
          }
        }
      }
    } catch (const nlohmann::json::exception& e) {
      throw Error(Errc::invalid_argument, std::string("malformed JSON: ") + e.what());
    }
    return builder.finish();
  }

  std::string line;
  if (!std::getline(is, line) || line != kCensusCsvHeader) {
    throw Error(Errc::invalid_argument, "missing census CSV header");
  }
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto cells = split_csv(line);
    if (cells.size() != 8) {
      throw Error(Errc::invalid_argument, "census CSV row needs 8 fields");
    }
    builder.add(static_cast<u32>(parse_number(cells[1])), parse_number(cells[0]),
                static_cast<u32>(parse_number(cells[2])), parse_number(cells[3]));
  }
  return builder.finish();
}

void write_class_table_csv(std::ostream& os, u32 p) {
  const auto table = class_table(p);
  std::map<std::string, int> d_count;
  for (const auto& cls : table) ++d_count[row_name(cls.kind)];
  os << "kind,class,trace,d,size,centralizer_order,legendre\n";
  for (const auto& cls : table) {
    const std::string row = row_name(cls.kind);
    os << row << ',' << describe(cls.kind) << ',' << cls.trace << ','
       << d_count[row] << ',' << cls.size << ',' << cls.centralizer_order << ','
       << cls.legendre_case << '\n';
  }
}

nlohmann::ordered_json class_table_json(u32 p) {
  nlohmann::ordered_json doc;
  doc["p"] = p;
  doc["order"] = sl2_order(p);
  doc["classes"] = nlohmann::ordered_json::array();
  for (const auto& cls : class_table(p)) {
    doc["classes"].push_back({{"kind", row_name(cls.kind)},
                              {"class", describe(cls.kind)},
                              {"trace", cls.trace},
                              {"size", cls.size},
                              {"centralizer_order", cls.centralizer_order},
                              {"legendre", cls.legendre_case}});
  }
  return doc;
}

void write_by_class_csv(std::ostream& os, const ClassResolvedSeries& series) {
  const double group = static_cast<double>(sl2_order(series.p));
  os << "x,p,class,trace,size,centralizer_order,accumulator,ratio\n";
  for (std::size_t i = 0; i < series.checkpoints.size(); ++i) {
    const double x = series.checkpoints[i];
    for (std::size_t k = 0; k < series.classes.size(); ++k) {
      const auto& cls = series.classes[k];
      const double acc = series.accumulators[i][k];
      os << format_double(x) << ',' << series.p << ',' << describe(cls.kind)
         << ',' << cls.trace << ',' << cls.size << ',' << cls.centralizer_order
         << ',' << format_double(acc) << ','
         << format_double(acc / (x * static_cast<double>(cls.size) / group))
         << '\n';
    }
  }
}

nlohmann::ordered_json by_class_json(const ClassResolvedSeries& series) {
  const std::size_t last = series.checkpoints.size() - 1;
  const ClassConstantReport rep = class_constant_report(series, last);
  nlohmann::ordered_json doc;
  doc["command"] = "by-class";
  doc["p"] = series.p;
  doc["normalization"] = to_string(series.normalization);
  doc["x"] = rep.x;
  doc["c"] = rep.c;
  doc["mean_ratio"] = rep.mean_ratio;
  doc["max_rel_dev"] = rep.max_rel_dev;
  doc["two_sided_c"] = rep.two_sided_c;
  doc["two_sided_mean_ratio"] = rep.two_sided_mean_ratio;
  doc["two_sided_max_rel_dev"] = rep.two_sided_max_rel_dev;
  doc["classes"] = nlohmann::ordered_json::array();
  for (const auto& row : rep.rows) {
    const auto& cls = series.classes[row.index];
    doc["classes"].push_back({{"class", describe(cls.kind)},
                              {"trace", cls.trace},
                              {"size", cls.size},
                              {"share", row.share},
                              {"accumulator", series.accumulators[last][row.index]},
                              {"ratio", row.ratio}});
  }
  return doc;
}

}  // namespace geotrace
