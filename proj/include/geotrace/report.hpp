#pragma once

// Serialization of census results: CSV (17 significant digits, LF endings,
// one header row) and JSON (see schema/census.schema.json).

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "json.hpp"

#include "geotrace/analysis.hpp"
#include "geotrace/census.hpp"

namespace geotrace {

struct RunConfig {
  double x_max = 0.0;
  std::vector<u32> primes;
  std::size_t checkpoints = 20;  // geometric grid from 100 to x_max
  Backend backend = Backend::exact;
  unsigned threads = 1;
  i64 delta_switch = 1'000'000;
  double l_tol = 1e-4;
  Normalization normalization = Normalization::geodesic;
  std::string out;  // empty: standard output
  std::string format = "csv";
};

inline constexpr const char* kCensusCsvHeader =
    "x,p,a,psi_a,psi_pm,predicted,abs_err,rel_err";

std::string format_double(double v);

const char* to_string(Normalization norm) noexcept;
const char* to_string(Backend backend) noexcept;

// The checkpoint grid a RunConfig asks for.
std::vector<double> config_checkpoints(const RunConfig& config);

// One row per (checkpoint, residue). abs_err = |psi_pm/x - predicted|,
// rel_err = abs_err / predicted.
void write_census_csv(std::ostream& os, std::span<const CensusSeries> series);

nlohmann::ordered_json census_json(std::span<const CensusSeries> series,
                                   const RunConfig& config);

// Reads either format back (JSON when the first non-blank byte is '{').
// Throws Errc::invalid_argument on malformed input.
std::vector<CensusSeries> read_census(std::istream& is);

void write_class_table_csv(std::ostream& os, u32 p);
nlohmann::ordered_json class_table_json(u32 p);

void write_by_class_csv(std::ostream& os, const ClassResolvedSeries& series);
nlohmann::ordered_json by_class_json(const ClassResolvedSeries& series);

}  // namespace geotrace
