#include "randhorizon/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <sstream>

#include "randhorizon/american_put.hpp"
#include "randhorizon/bounds.hpp"
#include "randhorizon/csv.hpp"
#include "randhorizon/digital.hpp"
#include "randhorizon/errors.hpp"
#include "randhorizon/richardson.hpp"
#include "randhorizon/uvm.hpp"

namespace randhorizon::cli {

namespace {

class RowWriter {
public:
  RowWriter(std::ostream& out, const std::string& format, int digits)
      : out_(out), jsonl_(format == "jsonl"), digits_(digits) {
    if (!jsonl_) out_ << csv_header() << '\n';
  }
  void write(const CsvRow& row) {
    out_ << (jsonl_ ? format_jsonl_row(row, digits_) : format_csv_row(row, digits_)) << '\n';
  }

private:
  std::ostream& out_;
  bool jsonl_;
  int digits_;
};

int run_exact_digital(const RunConfig& cfg, RowWriter& w) {
  double value = exact_digital_value(cfg.K, cfg.x, cfg.sigma2, cfg.T);
  double oracle = exact_digital_value_quadrature(cfg.K, cfg.x, cfg.sigma2, cfg.T);
  CsvRow row;
  row.command = "exact-digital";
  row.K = cfg.K;
  row.x = cfg.x;
  row.sigma2 = cfg.sigma2;
  row.T = cfg.T;
  row.value = value;
  row.oracle = oracle;
  row.abs_err = std::abs(value - oracle);
  w.write(row);
  return 0;
}

int run_digital(const RunConfig& cfg, RowWriter& w) {
  DigitalModel model{cfg.K, cfg.x, cfg.sigma2, cfg.T, cfg.n};
  double value = digital_value(model, cfg.grid_points);
  double oracle = exact_digital_value(cfg.K, cfg.x, cfg.sigma2, cfg.T);
  CsvRow row;
  row.command = "digital";
  row.K = cfg.K;
  row.x = cfg.x;
  row.sigma2 = cfg.sigma2;
  row.T = cfg.T;
  row.n = cfg.n;
  row.value = value;
  row.oracle = oracle;
  row.abs_err = std::abs(value - oracle);
  w.write(row);
  return 0;
}

int run_put(const RunConfig& cfg, RowWriter& w) {
  PutModel model{cfg.K, cfg.r, cfg.sigma, cfg.T, cfg.n};
  double value;
  std::optional<int> n_out;
  if (cfg.plain) {
    value = carr_price(model, cfg.x, cfg.grid_points).price;
    n_out = cfg.n;
  } else {
    std::vector<int> ns;
    for (int i = 1; i <= cfg.richardson_nodes; ++i) ns.push_back(i);
    value = carr_richardson(model, cfg.x, ns, cfg.grid_points);
  }
  CsvRow row;
  row.command = "put";
  row.K = cfg.K;
  row.x = cfg.x;
  row.r = cfg.r;
  row.sigma = cfg.sigma;
  row.T = cfg.T;
  row.n = n_out;
  row.value = value;
  if (cfg.with_oracle) {
    double oracle =
        binomial_oracle_smoothed(cfg.K, cfg.r, cfg.sigma, cfg.T, cfg.x, cfg.oracle_steps);
    row.oracle = oracle;
    row.abs_err = std::abs(value - oracle);
  }
  w.write(row);
  return 0;
}

Payoff payoff_from_file(const std::string& path, std::ostream& err) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open payoff file: " + path);
  std::vector<double> xs, hs;
  std::string line;
  while (std::getline(in, line)) {
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream ls(line);
    double a, b;
    if (ls >> a >> b) {
      if (!xs.empty() && a <= xs.back())
        throw config_error("payoff file: abscissae must be strictly increasing");
      xs.push_back(a);
      hs.push_back(b);
    }
  }
  if (xs.size() < 4) throw config_error("payoff file: need at least 4 points");

  // flat-zero head defines x0; the convexity switch is taken at the steepest
  // chord; the flat-one tail start marks the last kink
  std::size_t i0 = 0;
  while (i0 + 1 < xs.size() && hs[i0 + 1] == 0.0) ++i0;
  double x0 = xs[i0];
  std::size_t ib = i0;
  double best = -1.0;
  for (std::size_t i = 0; i + 1 < xs.size(); ++i) {
    double slope = (hs[i + 1] - hs[i]) / (xs[i + 1] - xs[i]);
    if (slope > best) {
      best = slope;
      ib = i;
    }
  }
  double b0 = 0.5 * (xs[ib] + xs[ib + 1]);
  std::size_t i1 = xs.size() - 1;
  while (i1 > 0 && hs[i1 - 1] == hs.back()) --i1;

  auto sampler = [xs, hs](double x) {
    if (x <= xs.front()) return hs.front();
    if (x >= xs.back()) return hs.back();
    auto it = std::upper_bound(xs.begin(), xs.end(), x);
    std::size_t i = static_cast<std::size_t>(it - xs.begin()) - 1;
    double s = (x - xs[i]) / (xs[i + 1] - xs[i]);
    return (1.0 - s) * hs[i] + s * hs[i + 1];
  };

  double lo = std::min(x0, xs.front()) * std::exp(-4.0);
  double hi = std::max(1.0 / x0, xs.back()) * std::exp(4.0);
  LogGrid grid = LogGrid::aligned(x0, lo, hi, std::abs(std::log(x0)) / 128);
  GridFunction h = GridFunction::sample(grid, sampler, TailDescriptor::flat(hs.front()),
                                        TailDescriptor::flat(hs.back()));
  err << "payoff file: " << xs.size() << " points, x0 = " << x0 << ", b0 = " << b0 << '\n';
  return Payoff{std::move(h), x0, b0, sampler, {x0, xs[i1]}};
}

int run_uvm(const RunConfig& cfg, RowWriter& w, std::ostream& err) {
  Payoff payoff = payoff_from_file(cfg.payoff_file, err);
  AdmissibilityReport rep = check_payoff_admissible(payoff);
  err << rep.summary() << '\n';
  if (!rep.pass) {
    err << "uvm: payoff rejected\n";
    return 2;
  }
  UvmModel model{cfg.sigma1, cfg.sigma2, cfg.T, cfg.n};
  auto stages = iterate_scheme(payoff, model, cfg.grid_points, cfg.tol);
  CsvRow row;
  row.command = "uvm";
  row.x = cfg.x;
  row.sigma1 = cfg.sigma1;
  row.sigma2 = cfg.sigma2;
  row.T = cfg.T;
  row.n = cfg.n;
  row.value = stages.back().U(cfg.x);
  w.write(row);
  return 0;
}

int run_sandwich(const RunConfig& cfg, RowWriter& w, std::ostream& err) {
  PutModel model{cfg.K, cfg.r, cfg.sigma, cfg.T, cfg.n};
  CarrResult carr = carr_price(model, cfg.x, cfg.grid_points);
  std::vector<double> boundaries;
  boundaries.reserve(carr.stages.size());
  for (const PutStage& s : carr.stages) boundaries.push_back(s.boundary);
  McEstimate mc = mc_put_lower_bound(cfg.K, cfg.r, cfg.sigma, cfg.T, cfg.n, cfg.x, boundaries,
                                     cfg.mc_paths, cfg.seed);
  ErlangHorizon horizon{cfg.n, cfg.n / cfg.T};
  int steps = std::max(500, cfg.oracle_steps / 5);
  double upper = erlang_mixture_gauss(
      [&](double z) {
        return z <= 0.0 ? std::max(cfg.K - cfg.x, 0.0)
                        : binomial_oracle_smoothed(cfg.K, cfg.r, cfg.sigma, z, cfg.x, steps);
      },
      horizon);

  auto emit = [&](const std::string& name, double v) {
    CsvRow row;
    row.command = name;
    row.K = cfg.K;
    row.x = cfg.x;
    row.r = cfg.r;
    row.sigma = cfg.sigma;
    row.T = cfg.T;
    row.n = cfg.n;
    row.value = v;
    row.oracle = carr.price;
    row.abs_err = std::abs(v - carr.price);
    w.write(row);
  };
  emit("sandwich-lower", mc.estimate);
  emit("sandwich-value", carr.price);
  emit("sandwich-upper", upper);
  bool ok = mc.estimate - 3.0 * mc.std_error <= carr.price && carr.price <= upper + 1e-3;
  err << "sandwich: lower " << mc.estimate << " (se " << mc.std_error << ") <= value "
      << carr.price << " <= upper " << upper << " : " << (ok ? "contained" : "VIOLATED") << '\n';
  return 0;
}

int run_repro(const RunConfig& cfg, RowWriter& w, std::ostream& err) {
  auto cells = reproduce_tables(cfg.table, cfg.grid_points);
  double tol = cfg.table == 1 ? 2e-4 : 1e-5;
  int bad = 0;
  for (const TableCell& c : cells) {
    CsvRow row;
    row.command = c.informational ? "repro" + std::to_string(cfg.table) + "-x80"
                                  : "repro" + std::to_string(cfg.table);
    row.K = 100.0;
    row.x = c.x;
    row.sigma2 = c.sigma2;
    row.T = c.T;
    if (!c.exact_column) row.n = c.n;
    row.value = c.value;
    row.oracle = c.printed;
    row.abs_err = std::abs(c.value - c.printed);
    w.write(row);
    if (!c.informational && *row.abs_err > tol) {
      ++bad;
      err << "repro: cell out of tolerance: sigma2 " << c.sigma2 << " T " << c.T << " n " << c.n
          << " |err| " << *row.abs_err << '\n';
    }
  }
  err << "repro table " << cfg.table << ": " << cells.size() << " rows, " << bad
      << " out of tolerance\n";
  return 0;
}

int run_rate(const RunConfig& cfg, RowWriter& w, std::ostream& err) {
  const std::vector<int> ns{10, 50, 200, 1000};
  double exact = exact_digital_value(cfg.K, cfg.x, cfg.sigma2, cfg.T);
  std::vector<std::pair<int, double>> values;
  for (int n : ns) {
    DigitalModel m{cfg.K, cfg.x, cfg.sigma2, cfg.T, n};
    double v = digital_value(m, cfg.grid_points);
    values.emplace_back(n, v);
    CsvRow row;
    row.command = "rate";
    row.K = cfg.K;
    row.x = cfg.x;
    row.sigma2 = cfg.sigma2;
    row.T = cfg.T;
    row.n = n;
    row.value = v;
    row.oracle = exact;
    row.abs_err = std::abs(v - exact);
    w.write(row);
  }
  RateFit fit = convergence_diagnostic(values, exact);
  if (fit.used_n.size() < 2)
    err << "rate: degenerate case, exact value already attained (spot at or above the strike?)\n";
  CsvRow row;
  row.command = "rate-fit";
  row.K = cfg.K;
  row.x = cfg.x;
  row.sigma2 = cfg.sigma2;
  row.T = cfg.T;
  row.value = fit.order;
  w.write(row);
  err << "rate: fitted order " << fit.order << (fit.monotone ? "" : " (errors not monotone)")
      << '\n';
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  CLI::App app{"maturity-randomized pricing: digital bounds, UVM recursion, American puts"};
  app.set_config("--config", "", "flat key = value configuration file");
  app.allow_config_extras(false);
  app.fallthrough();
  app.require_subcommand(1);

  app.add_option("--out", cfg.out_path, "write rows to this file instead of stdout");
  app.add_option("--format", cfg.format, "output format")
      ->check(CLI::IsMember({"csv", "jsonl"}))
      ->capture_default_str();
  app.add_option("--digits", cfg.digits, "significant digits in output")
      ->check(CLI::Range(2, 17))
      ->capture_default_str();
  app.add_option("--grid-points", cfg.grid_points, "spatial grid nodes")
      ->check(CLI::Range(101, 200001))
      ->capture_default_str();
  app.add_option("--tol", cfg.tol, "root-finding relative tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  app.add_option("--mc-paths", cfg.mc_paths, "Monte-Carlo paths")
      ->check(CLI::Range(1000, 100000000))
      ->capture_default_str();
  app.add_option("--seed", cfg.seed, "Monte-Carlo seed")->capture_default_str();
  app.add_option("--richardson-nodes", cfg.richardson_nodes, "extrapolation stage counts 1..m")
      ->check(CLI::Range(2, 16))
      ->capture_default_str();
  app.add_option("--oracle-steps", cfg.oracle_steps, "binomial oracle steps")
      ->check(CLI::Range(10, 1000000))
      ->capture_default_str();

  auto add_K = [&](CLI::App* s) {
    s->add_option("--K", cfg.K, "strike")->check(CLI::PositiveNumber)->capture_default_str();
  };
  auto add_x = [&](CLI::App* s) {
    s->add_option("--x", cfg.x, "spot")->check(CLI::PositiveNumber)->capture_default_str();
  };
  auto add_T = [&](CLI::App* s) {
    s->add_option("--T", cfg.T, "horizon in years")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
  };
  auto add_n = [&](CLI::App* s) {
    s->add_option("--n", cfg.n, "stage count")->check(CLI::Range(1, 100000))->capture_default_str();
  };

  CLI::App* sc_exact = app.add_subcommand("exact-digital", "closed-form digital value");
  add_K(sc_exact);
  add_x(sc_exact);
  add_T(sc_exact);
  sc_exact->add_option("--sigma2", cfg.sigma2, "upper volatility")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CLI::App* sc_digital = app.add_subcommand("digital", "randomized digital recursion");
  add_K(sc_digital);
  add_x(sc_digital);
  add_T(sc_digital);
  add_n(sc_digital);
  sc_digital->add_option("--sigma2", cfg.sigma2, "upper volatility")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CLI::App* sc_uvm = app.add_subcommand("uvm", "uncertain-volatility recursion, payoff from file");
  add_x(sc_uvm);
  add_T(sc_uvm);
  add_n(sc_uvm);
  sc_uvm->add_option("--payoff", cfg.payoff_file, "two-column payoff file (x h)")->required();
  sc_uvm->add_option("--sigma1", cfg.sigma1, "lower volatility")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sc_uvm->add_option("--sigma2", cfg.sigma2, "upper volatility")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CLI::App* sc_put = app.add_subcommand("put", "randomized American put");
  add_K(sc_put);
  add_x(sc_put);
  add_T(sc_put);
  add_n(sc_put);
  sc_put->add_option("--r", cfg.r, "riskless rate")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sc_put->add_option("--sigma", cfg.sigma, "volatility")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  sc_put->add_flag("--plain", cfg.plain, "report v_n^n at --n instead of Richardson");
  sc_put->add_flag("!--no-oracle", cfg.with_oracle, "skip the binomial oracle column");

  CLI::App* sc_sandwich = app.add_subcommand("sandwich", "lower/value/upper bounds for the put");
  add_K(sc_sandwich);
  add_x(sc_sandwich);
  add_T(sc_sandwich);
  add_n(sc_sandwich);
  sc_sandwich->add_option("--r", cfg.r, "riskless rate")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  sc_sandwich->add_option("--sigma", cfg.sigma, "volatility")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  CLI::App* sc_repro = app.add_subcommand("repro", "reproduce the published tables");
  sc_repro->add_option("--table", cfg.table, "table number")->check(CLI::Range(1, 2))->required();

  CLI::App* sc_rate = app.add_subcommand("rate", "empirical convergence order, digital case");
  add_K(sc_rate);
  add_x(sc_rate);
  add_T(sc_rate);
  sc_rate->add_option("--sigma2", cfg.sigma2, "upper volatility")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << e.what() << '\n';
    return 2;
  }

  std::ofstream file;
  if (!cfg.out_path.empty()) {
    file.open(cfg.out_path);
    if (!file) {
      err << "cannot open output file: " << cfg.out_path << '\n';
      return 2;
    }
  }
  std::ostream& sink = cfg.out_path.empty() ? out : file;

  try {
    // published tables print 4 (table 1) or 5 (table 2) significant digits;
    // match them for side-by-side diffing unless --digits was given
    int digits = cfg.digits;
    if (sc_repro->parsed() && app.get_option("--digits")->count() == 0)
      digits = cfg.table == 1 ? 4 : 5;
    RowWriter writer(sink, cfg.format, digits);
    if (sc_exact->parsed()) return run_exact_digital(cfg, writer);
    if (sc_digital->parsed()) return run_digital(cfg, writer);
    if (sc_uvm->parsed()) return run_uvm(cfg, writer, err);
    if (sc_put->parsed()) return run_put(cfg, writer);
    if (sc_sandwich->parsed()) return run_sandwich(cfg, writer, err);
    if (sc_repro->parsed()) return run_repro(cfg, writer, err);
    if (sc_rate->parsed()) return run_rate(cfg, writer, err);
    err << "no subcommand given\n";
    return 2;
  } catch (const stage_error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const cfl_error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const bracket_error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const boundary_error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const degenerate_error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const std::domain_error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return 3;
  } catch (const config_error& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return 2;
  }
}

}  // namespace randhorizon::cli
