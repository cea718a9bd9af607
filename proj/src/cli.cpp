#include "geotrace/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "geotrace/analysis.hpp"
#include "geotrace/census.hpp"
#include "geotrace/error.hpp"
#include "geotrace/oracles.hpp"
#include "geotrace/quadforms.hpp"
#include "geotrace/report.hpp"
#include "geotrace/sl2fp.hpp"

namespace geotrace {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitConfig {
  std::string in;
  std::vector<u32> residues;
  double min_x = 100.0;
};

unsigned default_threads() {
  const char* env = std::getenv("GEOTRACE_THREADS");
  if (env == nullptr || *env == '\0') return 1;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096) {
    throw UsageError(std::string("GEOTRACE_THREADS must be a positive integer, got '") +
                     env + "'");
  }
  return static_cast<unsigned>(v);
}

CensusOptions census_options(const RunConfig& config) {
  CensusOptions options;
  options.backend = config.backend;
  options.l_tol = config.l_tol;
  options.delta_switch = config.delta_switch;
  options.threads = config.threads;
  options.normalization = config.normalization;
  return options;
}

void check_primes(const std::vector<u32>& primes) {
  if (primes.empty()) throw UsageError("--p is required");
  for (u32 p : primes) {
    if (!is_prime(p)) throw UsageError("--p " + std::to_string(p) + " is not prime");
  }
}

void check_census_config(const RunConfig& config) {
  if (!(config.x_max >= 3.0) || !std::isfinite(config.x_max)) {
    throw UsageError("--x must be a finite number >= 3");
  }
  if (config.threads < 1) throw UsageError("--threads must be >= 1");
  if (!(config.l_tol > 0.0 && config.l_tol < 1.0)) {
    throw UsageError("--l-tol must lie in (0, 1)");
  }
  if (config.format != "csv" && config.format != "json") {
    throw UsageError("--format must be csv or json");
  }
}

// Writes to --out when given, otherwise to `out`.
template <class Fn>
void emit(const RunConfig& config, std::ostream& out, Fn&& write) {
  if (config.out.empty()) {
    write(out);
    return;
  }
  std::ofstream file(config.out, std::ios::binary | std::ios::trunc);
  if (!file) throw UsageError("cannot open '" + config.out + "' for writing");
  write(file);
  if (!file.flush()) throw Error(Errc::invalid_argument, "write to '" + config.out + "' failed");
}

void emit_json(const RunConfig& config, std::ostream& out,
               const nlohmann::ordered_json& doc) {
  emit(config, out, [&](std::ostream& os) { os << doc.dump(2) << '\n'; });
}

int cmd_census(const RunConfig& config, std::ostream& out) {
  check_census_config(config);
  check_primes(config.primes);
  const CensusOptions options = census_options(config);
  const std::vector<double> checkpoints = config_checkpoints(config);
  const std::vector<double> totals =
      line_totals(trace_bound(config.x_max, config.normalization), options);
  std::vector<CensusSeries> series;
  for (u32 p : config.primes) {
    series.push_back(
        accumulate_series(totals, p, checkpoints, config.normalization));
  }
  if (config.format == "json") {
    emit_json(config, out, census_json(series, config));
  } else {
    emit(config, out, [&](std::ostream& os) { write_census_csv(os, series); });
  }
  return kExitOk;
}

int cmd_psi(const RunConfig& config, std::ostream& out) {
  check_census_config(config);
  const std::vector<double> checkpoints = config_checkpoints(config);
  const std::vector<double> totals = line_totals(
      trace_bound(config.x_max, config.normalization), census_options(config));
  const CensusSeries series =
      accumulate_series(totals, 2, checkpoints, config.normalization);
  if (config.format == "json") {
    nlohmann::ordered_json doc;
    doc["command"] = "psi";
    doc["normalization"] = to_string(config.normalization);
    doc["backend"] = to_string(config.backend);
    doc["points"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < checkpoints.size(); ++i) {
      doc["points"].push_back({{"x", checkpoints[i]},
                               {"psi", series.psi(i)},
                               {"ratio", series.psi(i) / checkpoints[i]}});
    }
    emit_json(config, out, doc);
  } else {
    emit(config, out, [&](std::ostream& os) {
      os << "x,psi,ratio\n";
      for (std::size_t i = 0; i < checkpoints.size(); ++i) {
        os << format_double(checkpoints[i]) << ',' << format_double(series.psi(i))
           << ',' << format_double(series.psi(i) / checkpoints[i]) << '\n';
      }
    });
  }
  return kExitOk;
}

int cmd_classes(const RunConfig& config, std::ostream& out) {
  check_primes(config.primes);
  if (config.format == "json") {
    nlohmann::ordered_json doc;
    doc["command"] = "classes";
    doc["tables"] = nlohmann::ordered_json::array();
    for (u32 p : config.primes) doc["tables"].push_back(class_table_json(p));
    emit_json(config, out, doc);
  } else {
    emit(config, out, [&](std::ostream& os) {
      for (u32 p : config.primes) write_class_table_csv(os, p);
    });
  }
  return kExitOk;
}

int cmd_by_class(const RunConfig& config, std::ostream& out) {
  check_census_config(config);
  check_primes(config.primes);
  if (config.backend != Backend::exact) {
    throw UsageError("by-class needs --backend exact");
  }
  if (config.primes.size() != 1) throw UsageError("by-class takes a single --p");
  const ClassResolvedSeries series =
      run_census_by_class(config.x_max, config.primes.front(),
                          config_checkpoints(config), census_options(config));
  if (config.format == "json") {
    emit_json(config, out, by_class_json(series));
  } else {
    emit(config, out, [&](std::ostream& os) { write_by_class_csv(os, series); });
  }
  return kExitOk;
}

int cmd_fit(const RunConfig& config, const FitConfig& fit, std::ostream& out) {
  if (config.format != "csv" && config.format != "json") {
    throw UsageError("--format must be csv or json");
  }
  std::ifstream in(fit.in, std::ios::binary);
  if (!in) throw UsageError("cannot open '" + fit.in + "'");
  const std::vector<CensusSeries> all = read_census(in);

  struct Row {
    u32 p;
    u32 a;
    ExponentFit fit;
  };
  std::vector<Row> rows;
  for (const CensusSeries& s : all) {
    std::vector<u32> residues = fit.residues;
    if (residues.empty()) {
      for (u32 a = 0; a < s.p; ++a) residues.push_back(a);
    }
    for (u32 a : residues) {
      if (a >= s.p) continue;
      rows.push_back({s.p, a, error_exponent_fit(density_errors(s, a), {fit.min_x})});
    }
  }
  if (rows.empty()) throw UsageError("no series matched the requested residues");

  if (config.format == "json") {
    nlohmann::ordered_json doc;
    doc["command"] = "fit";
    doc["min_x"] = fit.min_x;
    doc["fits"] = nlohmann::ordered_json::array();
    for (const Row& r : rows) {
      doc["fits"].push_back({{"p", r.p},
                             {"a", r.a},
                             {"beta", r.fit.beta},
                             {"c", r.fit.c},
                             {"residual", r.fit.residual},
                             {"points_used", r.fit.points_used},
                             {"zero_excluded", r.fit.zero_excluded},
                             {"small_x_excluded", r.fit.small_x_excluded}});
    }
    emit_json(config, out, doc);
  } else {
    emit(config, out, [&](std::ostream& os) {
      os << "p,a,beta,c,residual,points_used,zero_excluded,small_x_excluded\n";
      for (const Row& r : rows) {
        os << r.p << ',' << r.a << ',' << format_double(r.fit.beta) << ','
           << format_double(r.fit.c) << ',' << format_double(r.fit.residual) << ','
           << r.fit.points_used << ',' << r.fit.zero_excluded << ','
           << r.fit.small_x_excluded << '\n';
      }
    });
  }
  return kExitOk;
}

// verify suites. Each returns an empty string on success, else a reason.

std::string verify_sl2fp(const std::vector<u32>& primes) {
  for (u32 p : primes) {
    if (sl2_order(p) > kBruteForceCap) continue;
    using Key = std::tuple<u32, u64, u64>;
    std::vector<Key> closed, brute;
    for (const auto& c : class_table(p)) {
      closed.emplace_back(c.trace, c.size, c.centralizer_order);
    }
    for (const auto& o : brute_force_classes(p)) {
      brute.emplace_back(o.trace, o.size, o.centralizer_order);
    }
    std::sort(closed.begin(), closed.end());
    std::sort(brute.begin(), brute.end());
    if (closed != brute) return "class table differs from orbits at p=" + std::to_string(p);
  }
  return {};
}

std::string verify_quadforms(i64 delta_max) {
  for (i64 d = 5; d <= delta_max; ++d) {
    if (!Discriminant::is_valid(d)) continue;
    const Discriminant disc(d);
    if (reduced_forms(disc) != reduced_forms_by_divisors(disc)) {
      return "reduced forms differ at D=" + std::to_string(d);
    }
    const NarrowClassNumber h = class_number_narrow(disc);
    if (h.h_plus != oracle::equivalence_class_count(disc)) {
      return "class number differs from equivalence oracle at D=" + std::to_string(d);
    }
    const auto fundamental = oracle::pell_by_scan(disc, 100'000);
    if (!fundamental) continue;
    // Square of the fundamental unit: t = tau^2 - 2, m = tau * s.
    const u64 t2 = fundamental->tau * fundamental->tau - 2;
    const PellSolution got =
        pell_from_known(disc, t2, fundamental->tau * fundamental->s);
    if (got.tau != fundamental->tau || got.s != fundamental->s) {
      return "Pell minimisation differs from scan at D=" + std::to_string(d);
    }
  }
  return {};
}

std::string verify_census(const RunConfig& config) {
  const CensusOptions options = census_options(config);
  const u64 t_max = trace_bound(config.x_max, config.normalization);
  const i64 delta_bound = static_cast<i64>(std::max<u64>(t_max, 3) * std::max<u64>(t_max, 3));
  for (u32 p : config.primes) {
    const CensusSeries a = run_census(config.x_max, p, {}, options);
    const CensusSeries b = unit_power_oracle(config.x_max, p, delta_bound, {},
                                             config.normalization);
    for (u32 r = 0; r < p; ++r) {
      const double x = a.psi_a[0][r];
      const double y = b.psi_a[0][r];
      if (std::fabs(x - y) > 1e-9 * std::max(std::fabs(x), std::fabs(y))) {
        std::ostringstream msg;
        msg << "p=" << p << " a=" << r << ": census " << format_double(x)
            << " vs unit powers " << format_double(y);
        return msg.str();
      }
    }
  }
  return {};
}

int cmd_verify(RunConfig config, std::ostream& out) {
  if (config.primes.empty()) config.primes = {2, 3, 5, 7};
  check_primes(config.primes);
  check_census_config(config);
  if (trace_bound(config.x_max, config.normalization) > 2000) {
    throw UsageError("verify --x is limited to traces <= 2000");
  }
  const std::vector<std::pair<const char*, std::string>> results{
      {"sl2fp-oracle", verify_sl2fp(config.primes)},
      {"quadforms-oracle", verify_quadforms(500)},
      {"census-dual-enumeration", verify_census(config)},
  };
  bool ok = true;
  for (const auto& [name, failure] : results) {
    if (failure.empty()) {
      out << "PASS " << name << '\n';
    } else {
      out << "FAIL " << name << ": " << failure << '\n';
      ok = false;
    }
  }
  return ok ? kExitOk : kExitVerifyFailed;
}

void add_output_flags(CLI::App* cmd, RunConfig& config) {
  cmd->add_option("--out", config.out, "output file (default: standard output)");
  cmd->add_option("--format", config.format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
}

void add_census_flags(CLI::App* cmd, RunConfig& config, bool required_x) {
  auto* x = cmd->add_option("--x", config.x_max, "census bound x_max");
  if (required_x) x->required();
  cmd->add_option("--checkpoints", config.checkpoints,
                  "number of geometric checkpoints from 100 to x_max");
  cmd->add_option("--backend", config.backend, "exact or analytic")
      ->transform(CLI::CheckedTransformer(
          std::map<std::string, Backend>{{"exact", Backend::exact},
                                         {"analytic", Backend::analytic}}));
  cmd->add_option("--threads", config.threads, "worker threads")
      ->check(CLI::PositiveNumber);
  cmd->add_option("--delta-switch", config.delta_switch,
                  "with --backend analytic, discriminants below this stay exact");
  cmd->add_option("--l-tol", config.l_tol, "relative tolerance of L(1) sums");
  cmd->add_option("--normalization", config.normalization, "geodesic or unit")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Normalization>{
          {"geodesic", Normalization::geodesic},
          {"unit", Normalization::unit_bound}}));
  add_output_flags(cmd, config);
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out,
            std::ostream& err) {
  RunConfig config;
  FitConfig fit;

  CLI::App app{"Census of SL2(Z) conjugacy classes by trace residue"};
  app.name("geotrace");
  app.require_subcommand(1);

  try {
    config.threads = default_threads();
  } catch (const UsageError& e) {
    err << "geotrace: " << e.what() << '\n';
    return kExitUsage;
  }

  auto* census = app.add_subcommand("census", "psi_a and psi_a^+- per residue");
  add_census_flags(census, config, true);
  census->add_option("--p", config.primes, "primes (repeatable)")->required();

  auto* psi = app.add_subcommand("psi", "psi(x) at each checkpoint");
  add_census_flags(psi, config, true);

  auto* classes = app.add_subcommand("classes", "conjugacy classes of SL2(F_p)");
  classes->add_option("--p", config.primes, "primes (repeatable)")->required();
  add_output_flags(classes, config);

  auto* by_class = app.add_subcommand("by-class", "class-resolved census");
  add_census_flags(by_class, config, true);
  by_class->add_option("--p", config.primes, "prime")->required();

  auto* verify = app.add_subcommand("verify", "run the oracle suites");
  config.x_max = 500.0;
  add_census_flags(verify, config, false);
  verify->add_option("--p", config.primes, "primes (default 2 3 5 7)");

  auto* fit_cmd = app.add_subcommand("fit", "error exponent fit of a stored census");
  fit_cmd->add_option("--in", fit.in, "census CSV or JSON")->required();
  fit_cmd->add_option("--a", fit.residues, "residues (default: all)");
  fit_cmd->add_option("--min-x", fit.min_x, "exclude checkpoints below this");
  add_output_flags(fit_cmd, config);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (census->parsed()) return cmd_census(config, out);
    if (psi->parsed()) return cmd_psi(config, out);
    if (classes->parsed()) return cmd_classes(config, out);
    if (by_class->parsed()) return cmd_by_class(config, out);
    if (verify->parsed()) return cmd_verify(config, out);
    if (fit_cmd->parsed()) return cmd_fit(config, fit, out);
  } catch (const UsageError& e) {
    err << "geotrace: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "geotrace: " << to_string(e.code()) << ": " << e.what() << '\n';
    return e.code() == Errc::invalid_argument ? kExitUsage : kExitVerifyFailed;
  } catch (const std::exception& e) {
    err << "geotrace: " << e.what() << '\n';
    return kExitVerifyFailed;
  }
  return kExitUsage;
}

}  // namespace geotrace
