#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "geotrace/cli.hpp"
#include "geotrace/report.hpp"

using namespace geotrace;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "geotrace");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("geotrace_test_" + name);
}

}  // namespace

TEST_CASE("census CSV format") {
  const auto path = temp_path("run.csv");
  const Run r = cli({"census", "--x", "10000", "--p", "5", "--format", "csv", "--out",
                     path.string()});
  REQUIRE(r.code == 0);
  const std::string text = slurp(path);
  CHECK(text.find('\r') == std::string::npos);
  const auto rows = lines(text);
  REQUIRE(!rows.empty());
  CHECK(rows.front() == "x,p,a,psi_a,psi_pm,predicted,abs_err,rel_err");
  CHECK(rows.size() == 1 + 20 * 5);
  std::size_t headers = 0;
  for (const auto& row : rows) headers += row.rfind("x,", 0) == 0;
  CHECK(headers == 1);

  // Values round-trip through the 17-digit text.
  std::ifstream in(path, std::ios::binary);
  const auto series = read_census(in);
  REQUIRE(series.size() == 1);
  CensusOptions options;
  RunConfig config;
  config.x_max = 10000;
  const auto direct = run_census(1e4, 5, config_checkpoints(config), options);
  CHECK(series[0].checkpoints == direct.checkpoints);
  CHECK(series[0].psi_a == direct.psi_a);
  std::filesystem::remove(path);
}

TEST_CASE("format_double round-trips") {
  for (double v : {0.1, 1.0 / 3.0, 6.02214076e23, 9929.9641750199316, 5e-324}) {
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("JSON census reads back") {
  const Run r = cli({"census", "--x", "5000", "--p", "3", "--p", "7", "--checkpoints", "5",
                     "--format", "json"});
  REQUIRE(r.code == 0);
  std::istringstream in(r.out);
  const auto series = read_census(in);
  REQUIRE(series.size() == 2);
  CHECK(series[0].p == 3);
  CHECK(series[1].p == 7);
  CHECK(series[1].checkpoints.size() == 5);
}

TEST_CASE("output is identical across thread counts") {
  const Run base = cli({"census", "--x", "1e6", "--p", "3", "--p", "5", "--threads", "1"});
  REQUIRE(base.code == 0);
  for (const char* t : {"4", "8"}) {
    CHECK(cli({"census", "--x", "1e6", "--p", "3", "--p", "5", "--threads", t}).out == base.out);
  }
  const Run json1 = cli({"census", "--x", "1e5", "--p", "7", "--format", "json"});
  const Run json8 =
      cli({"census", "--x", "1e5", "--p", "7", "--format", "json", "--threads", "8"});
  CHECK(json1.out == json8.out);
}

TEST_CASE("classes subcommand") {
  const Run r = cli({"classes", "--p", "7"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 12);
  CHECK(rows[0] == "kind,class,trace,d,size,centralizer_order,legendre");
  CHECK(rows[1].rfind("split,", 0) == 0);
  CHECK(cli({"classes", "--p", "2"}).out.find("unipotent") != std::string::npos);
}

TEST_CASE("verify subcommand") {
  const Run r = cli({"verify", "--p", "5", "--x", "500"});
  CHECK(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows) CHECK(row.rfind("PASS ", 0) == 0);
}

TEST_CASE("psi and by-class subcommands") {
  const Run psi = cli({"psi", "--x", "10000", "--checkpoints", "1"});
  REQUIRE(psi.code == 0);
  const auto rows = lines(psi.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == "x,psi,ratio");

  const Run bc = cli({"by-class", "--x", "1000", "--p", "3", "--checkpoints", "1"});
  REQUIRE(bc.code == 0);
  CHECK(lines(bc.out).size() == 1 + 7);
  CHECK(cli({"by-class", "--x", "1000", "--p", "3", "--backend", "analytic"}).code == 2);
}

TEST_CASE("fit subcommand") {
  const auto path = temp_path("fit.csv");
  REQUIRE(cli({"census", "--x", "1e5", "--p", "3", "--checkpoints", "12", "--out",
               path.string()}).code == 0);
  const Run r = cli({"fit", "--in", path.string(), "--a", "1"});
  REQUIRE(r.code == 0);
  const auto rows = lines(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[1].rfind("3,1,", 0) == 0);
  // Too few checkpoints above --min-x.
  CHECK(cli({"fit", "--in", path.string(), "--min-x", "50000"}).code == 1);
  std::filesystem::remove(path);
}

TEST_CASE("usage errors exit with 2") {
  CHECK(cli({}).code == 2);
  CHECK(cli({"census", "--x", "1000", "--p", "5", "--bogus"}).code == 2);
  CHECK(cli({"census", "--x", "1000", "--p", "9"}).code == 2);
  CHECK(cli({"census", "--x", "1e3x", "--p", "5"}).code == 2);
  CHECK(cli({"census", "--x", "2", "--p", "5"}).code == 2);
  CHECK(cli({"census", "--x", "1000", "--p", "5", "--threads", "0"}).code == 2);
  CHECK(cli({"census", "--x", "1000", "--p", "5", "--format", "xml"}).code == 2);
  CHECK(cli({"classes", "--p", "1"}).code == 2);
  CHECK(cli({"fit", "--in", "/nonexistent/file.csv"}).code == 2);
  const Run r = cli({"census", "--x", "1000", "--p", "4"});
  CHECK(r.err.find("not prime") != std::string::npos);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("GEOTRACE_THREADS sets the default thread count") {
  ::setenv("GEOTRACE_THREADS", "4", 1);
  const Run four = cli({"census", "--x", "1e5", "--p", "5"});
  ::setenv("GEOTRACE_THREADS", "zero", 1);
  const Run bad = cli({"census", "--x", "1e5", "--p", "5"});
  ::unsetenv("GEOTRACE_THREADS");
  const Run one = cli({"census", "--x", "1e5", "--p", "5"});
  CHECK(four.code == 0);
  CHECK(four.out == one.out);
  CHECK(bad.code == 2);
}
