#ifndef RANDHORIZON_BOUNDS_HPP
#define RANDHORIZON_BOUNDS_HPP

#include <cstdint>
#include <functional>
#include <vector>

#include "randhorizon/digital.hpp"
#include "randhorizon/rng.hpp"
#include "randhorizon/uvm.hpp"

namespace randhorizon {

// Randomized maturity T_n^n as a Gamma(n, lambda) law, lambda = n/T.
struct ErlangHorizon {
  int n = 1;
  double lambda = 1.0;

  double T() const { return n / lambda; }
  double variance() const { return n / (lambda * lambda); }
  void validate() const;
};

double erlang_pdf(const ErlangHorizon& h, double z);

// One draw as the sum of n inverse-CDF exponentials (the zeta-sum construction).
double erlang_sample(const ErlangHorizon& h, CounterRng& rng);

// One-dimensional mixture integral of a deterministic-horizon value against
// the Erlang density over [0, T + 12 T/sqrt(n)] — the upper bound of the
// sandwich when value_of_horizon is the deterministic-horizon optimum.
double erlang_mixture(const std::function<double(double)>& value_of_horizon,
                      const ErlangHorizon& h, double rel_tol = 1e-6);

// Fixed-node Gauss-Legendre variant for integrands with evaluation noise
// (e.g. lattice oracles), which an adaptive rule would chase indefinitely.
double erlang_mixture_gauss(const std::function<double(double)>& value_of_horizon,
                            const ErlangHorizon& h, int panels_per_piece = 2);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
  int paths = 0;
};

// Digital hitting policy: run the upper volatility until the strike is hit,
// then freeze. Exact simulation (terminal draw + conditional running-max
// draw per path), horizon drawn per path from the zeta sums.
McEstimate mc_digital_lower_bound(const DigitalModel& model, int paths, std::uint64_t seed);

// Put exercise policy: with k stage clocks remaining, exercise when the spot
// falls to boundaries[k-1]. Time-stepped simulation with Brownian-bridge
// crossing tests; payoff is discounted at r to the stopping time.
McEstimate mc_put_lower_bound(double K, double r, double sigma, double T, int n, double spot,
                              const std::vector<double>& boundaries, int paths,
                              std::uint64_t seed, int substeps_per_stage = 200);

// Single-stage consistency check: expected discounted obstacle payoff plus the
// running reward lambda * u_prev under the threshold rule at b, simulated to
// first passage (discount rate r + lambda).
McEstimate mc_put_stage_value(const GridFunction& u_prev, double K, double r, double sigma,
                              double lambda, double b, double spot, int paths,
                              std::uint64_t seed, double dt = 1e-3);

// Explicit finite-difference solver for the nonlinear PDE
// -v_t - (x^2 sigma2^2/2) [v_xx]^+ + (x^2 sigma1^2/2) [v_xx]^- = 0 on a log
// grid, volatility selected nodewise from the discrete convexity sign.
// Throws config_error when the CFL factor is not in (0, 1).
double bsb_fd_oracle(const std::function<double(double)>& payoff, const UvmModel& model,
                     double spot, int space_nodes = 2501, double cfl = 0.4);

struct RateFit {
  double order = 0.0;
  bool monotone = false;
  std::vector<int> used_n;
  std::vector<int> excluded_n;  // zero-error points left out of the fit
};

// Least-squares slope of log|error| against log n.
RateFit convergence_diagnostic(const std::vector<std::pair<int, double>>& values, double exact);

// The symmetric piecewise-quadratic payoff: 0 on (0,1/2], 2(x-1/2)^2 on
// [1/2,1], 1 - 2(1/x-1/2)^2 on [1,2], 1 on [2,inf); x0 = 1/2, b0 = 1.
Payoff make_test_payoff(int grid_points = 2049);
double test_payoff_value(double x);

// Single-volatility (Black-Scholes) expectation of the test payoff via
// lognormal partial moments; closed-form oracle for the band-collapse check.
double test_payoff_bs_value(double sigma, double T, double spot);

// E[X^m 1_{X >= a}] for lognormal X with X(0) = spot, volatility sigma,
// zero drift, horizon T.
double lognormal_partial_moment(double spot, double sigma, double T, double m, double a);

}  // namespace randhorizon

#endif
