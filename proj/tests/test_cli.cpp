#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <sstream>

#include <json.hpp>

#include "randhorizon/bounds.hpp"
#include "randhorizon/cli.hpp"
#include "randhorizon/csv.hpp"

using namespace randhorizon;

namespace {

struct RunResult {
  int code;
  std::string out, err;
};

RunResult run_cli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  int code = cli::run(args, out, err);
  return RunResult{code, out.str(), err.str()};
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream is(s);
  std::string line;
  while (std::getline(is, line))
    if (!line.empty()) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("exact-digital prints the published value") {
  RunResult r = run_cli({"exact-digital", "--K", "100", "--x", "95", "--sigma2", "0.2", "--T",
                         "0.5"});
  CHECK(r.code == 0);
  auto rows = lines_of(r.out);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0] == csv_header());
  CsvRow row = parse_csv_row(rows[1]);
  CHECK(row.command == "exact-digital");
  REQUIRE(row.value.has_value());
  CHECK(std::abs(*row.value - 0.6982) < 1e-4);
}

TEST_CASE("validation failures exit with code 2") {
  CHECK(run_cli({"exact-digital", "--T", "-1"}).code == 2);
  CHECK(run_cli({"digital", "--n", "0"}).code == 2);
  CHECK(run_cli({"exact-digital", "--bogus-flag", "1"}).code == 2);
  CHECK(run_cli({}).code == 2);
}

TEST_CASE("numerical failures exit with code 3") {
  // sigma1 = 0 passes option validation but the recursion cannot build its
  // exponents; the message names the failing component
  std::string payoff_path = "/tmp/randhorizon_test_payoff.txt";
  {
    std::ofstream f(payoff_path);
    Payoff p = make_test_payoff(257);
    for (double x = 0.26; x < 4.2; x *= 1.04)
      f << x << ' ' << test_payoff_value(x) << '\n';
  }
  RunResult r = run_cli({"uvm", "--payoff", payoff_path, "--sigma1", "0", "--sigma2", "0.3",
                         "--T", "1", "--n", "2", "--x", "1"});
  CHECK(r.code == 3);
  CHECK(r.err.find("sigma1") != std::string::npos);
  std::remove(payoff_path.c_str());
}

TEST_CASE("uvm subcommand runs a payoff file end to end") {
  std::string payoff_path = "/tmp/randhorizon_payoff_ok.txt";
  {
    // full-precision samples: quadratic-touch residuals near 1 must not trip
    // the admissibility check
    std::ofstream f(payoff_path);
    f << std::setprecision(17);
    for (double x = 0.25; x < 4.3; x *= 1.02) f << x << ' ' << test_payoff_value(x) << '\n';
  }
  RunResult r = run_cli({"uvm", "--payoff", payoff_path, "--sigma1", "0.1", "--sigma2", "0.3",
                         "--T", "1", "--n", "3", "--x", "1", "--grid-points", "1501"});
  CHECK(r.code == 0);
  CHECK(r.err.find("admissible") != std::string::npos);
  auto rows = lines_of(r.out);
  REQUIRE(rows.size() == 2);
  CsvRow row = parse_csv_row(rows[1]);
  REQUIRE(row.value.has_value());
  CHECK(*row.value > 0.0);
  CHECK(*row.value < 1.0);
  std::remove(payoff_path.c_str());

  SUBCASE("decreasing payoff file is rejected before the run") {
    std::string bad_path = "/tmp/randhorizon_payoff_bad.txt";
    {
      std::ofstream f(bad_path);
      for (double x = 0.25; x < 4.3; x *= 1.02) f << x << ' ' << 1.0 - test_payoff_value(x) << '\n';
    }
    RunResult bad = run_cli({"uvm", "--payoff", bad_path, "--sigma1", "0.1", "--sigma2", "0.3",
                             "--T", "1", "--n", "2", "--x", "1"});
    CHECK(bad.code == 2);
    std::remove(bad_path.c_str());
  }
}

TEST_CASE("deterministic output for identical configuration and seed") {
  std::vector<std::string> cmd{"sandwich", "--K", "100", "--x", "100",   "--r",    "0.05",
                               "--sigma",  "0.2", "--T", "0.5", "--n",   "2",
                               "--mc-paths", "2000", "--seed", "31415", "--oracle-steps", "1000"};
  RunResult a = run_cli(cmd);
  RunResult b = run_cli(cmd);
  CHECK(a.code == 0);
  CHECK(a.out == b.out);
  CHECK(a.err == b.err);
}

TEST_CASE("rows round-trip through the parser") {
  RunResult r = run_cli({"digital", "--K", "100", "--x", "95", "--sigma2", "0.4", "--T", "1",
                         "--n", "5"});
  REQUIRE(r.code == 0);
  auto rows = lines_of(r.out);
  REQUIRE(rows.size() == 2);
  CsvRow row = parse_csv_row(rows[1]);
  CHECK(format_csv_row(row, 6) == rows[1]);
  CHECK(row.K == doctest::Approx(100.0));
  CHECK(row.x == doctest::Approx(95.0));
  CHECK(row.sigma2 == doctest::Approx(0.4));
  CHECK(row.T == doctest::Approx(1.0));
  REQUIRE(row.n.has_value());
  CHECK(*row.n == 5);
}

TEST_CASE("jsonl format emits one object per row") {
  RunResult r = run_cli({"--format", "jsonl", "digital", "--K", "100", "--x", "95", "--sigma2",
                         "0.2", "--T", "0.5", "--n", "5"});
  REQUIRE(r.code == 0);
  auto rows = lines_of(r.out);
  REQUIRE(rows.size() == 1);
  auto obj = nlohmann::json::parse(rows[0]);
  CHECK(obj.at("command") == "digital");
  CHECK(obj.at("n") == 5);
  CHECK(obj.at("value").get<double>() > 0.0);
  CHECK(obj.contains("oracle"));
}

TEST_CASE("config file supplies defaults, flags override, unknown keys rejected") {
  std::string cfg_path = "/tmp/randhorizon_cfg.ini";
  {
    std::ofstream f(cfg_path);
    f << "digits = 8\n";
  }
  RunResult a = run_cli({"--config", cfg_path, "exact-digital", "--K", "100", "--x", "95",
                         "--sigma2", "0.2", "--T", "0.5"});
  CHECK(a.code == 0);
  auto rows = lines_of(a.out);
  REQUIRE(rows.size() == 2);
  CsvRow row = parse_csv_row(rows[1]);
  CHECK(std::abs(*row.value - 0.69824885) < 1e-6);  // eight significant digits survive

  SUBCASE("command-line flags override config values") {
    std::ofstream(cfg_path) << "digits = 8\n";
    RunResult o = run_cli({"--config", cfg_path, "--digits", "3", "exact-digital", "--K", "100",
                           "--x", "95", "--sigma2", "0.2", "--T", "0.5"});
    CHECK(o.code == 0);
    CHECK(o.out.find("0.698,") != std::string::npos);
  }

  {
    std::ofstream f(cfg_path);
    f << "not_a_real_key = 1\n";
  }
  RunResult b = run_cli({"--config", cfg_path, "exact-digital", "--K", "100", "--x", "95",
                         "--sigma2", "0.2", "--T", "0.5"});
  CHECK(b.code == 2);
  std::remove(cfg_path.c_str());
}

TEST_CASE("repro emits the published table layout") {
  // table 2: 5 gated cells plus the two readings of the inconsistent row
  RunResult r2 = run_cli({"repro", "--table", "2"});
  REQUIRE(r2.code == 0);
  auto rows2 = lines_of(r2.out);
  CHECK(rows2.size() == 1 + 7);
  int info = 0;
  for (std::size_t i = 1; i < rows2.size(); ++i) {
    CsvRow row = parse_csv_row(rows2[i]);
    if (row.command == "repro2-x80") ++info;
    REQUIRE(row.value.has_value());
    REQUIRE(row.oracle.has_value());
  }
  CHECK(info == 2);

  // table 1 has 30 cells; a coarse grid keeps this check quick (tolerances
  // at the default grid are the acceptance suite's job)
  RunResult r1 = run_cli({"--grid-points", "1001", "repro", "--table", "1"});
  REQUIRE(r1.code == 0);
  CHECK(lines_of(r1.out).size() == 1 + 30);
}

TEST_CASE("repro prints at the published precision by default") {
  RunResult r = run_cli({"--grid-points", "1001", "repro", "--table", "2"});
  REQUIRE(r.code == 0);
  auto rows = lines_of(r.out);
  CsvRow first = parse_csv_row(rows[1]);
  REQUIRE(first.oracle.has_value());
  CHECK(format_double(*first.oracle, 5) == "0.058058");  // five significant digits
}

TEST_CASE("rate subcommand reports a fitted order") {
  RunResult r = run_cli({"rate", "--K", "100", "--x", "95", "--sigma2", "0.2", "--T", "0.5",
                         "--grid-points", "2001"});
  REQUIRE(r.code == 0);
  auto rows = lines_of(r.out);
  REQUIRE(rows.size() >= 6);  // header + 4 cells + fit
  CsvRow fit = parse_csv_row(rows.back());
  CHECK(fit.command == "rate-fit");
  REQUIRE(fit.value.has_value());
  CHECK(*fit.value >= 0.8);
}
