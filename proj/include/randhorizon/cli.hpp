#ifndef RANDHORIZON_CLI_HPP
#define RANDHORIZON_CLI_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace randhorizon::cli {

// Everything a run needs: model parameters, numeric controls, output options.
struct RunConfig {
  // model
  double K = 100.0;
  double x = 100.0;
  double r = 0.05;
  double sigma = 0.2;
  double sigma1 = 0.1;
  double sigma2 = 0.2;
  double T = 1.0;
  int n = 10;
  // numeric controls
  int grid_points = 4001;
  double tol = 1e-10;
  int mc_paths = 100000;
  std::uint64_t seed = 12345;
  int richardson_nodes = 3;
  int oracle_steps = 20000;
  bool plain = false;       // put: plain v_n^n instead of Richardson over {1..nodes}
  bool with_oracle = true;  // put: attach the binomial oracle column
  int table = 1;
  std::string payoff_file;
  // output
  std::string out_path;
  std::string format = "csv";
  int digits = 6;
};

// Exit codes: 0 success, 2 invalid configuration, 3 numerical failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace randhorizon::cli

#endif
