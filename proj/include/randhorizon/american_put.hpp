#ifndef RANDHORIZON_AMERICAN_PUT_HPP
#define RANDHORIZON_AMERICAN_PUT_HPP

#include <vector>

#include "randhorizon/grid_function.hpp"

namespace randhorizon {

// Lognormal market and the stage count of the randomized horizon.
struct PutModel {
  double K = 0.0;      // strike
  double r = 0.0;      // riskless rate, >= 0
  double sigma = 0.0;  // volatility
  double T = 0.0;      // horizon
  int n = 1;           // stages

  double lambda() const { return n / T; }
  double rn() const { return r + lambda(); }  // per-stage discount rate
  void validate() const;
};

// Roots of (sigma^2/2) th (th - 1) + r th - rho = 0 for discount rho;
// theta_minus < 0 <= 1 <= theta_plus.
struct PutExponents {
  double theta_minus = 0.0;
  double theta_plus = 0.0;
};
PutExponents put_exponents(double r, double sigma, double rho);

// One solved stage of the randomized recursion.
struct PutStage {
  GridFunction value;
  double boundary = 0.0;
  double strike = 0.0;
  double theta_minus = 0.0;
  double theta_plus = 0.0;
  int k = 0;
  double smooth_fit_residual = 0.0;  // |v'(b+) + 1| from the analytic branch

  // Exact below the grid (v = K - x there), interpolated inside.
  double value_at(double x) const;
};

// Stage grid centered on the strike: [K e^-L, K e^L], L = max(8 sigma sqrt(T), 4).
LogGrid make_put_grid(double K, double sigma, double T, int grid_points = 4001);

// Obstacle payoff g = (K - x)^+ on the stage grid (stage zero of the recursion).
GridFunction put_payoff_on_grid(const LogGrid& grid, double K);

// Solve one stage: the variational inequality with killing rate rho = r + lambda
// and running source lambda * u_prev. The continuation branch combines the
// decaying homogeneous mode with the particular solution built from the two
// power-weighted integrals of u_prev; value matching and smooth fit pin the
// free boundary by a one-dimensional root find. lambda = 0 gives the
// perpetual put with discount r. Throws boundary_error if the smooth-fit
// residual has no root in (0, K).
PutStage solve_stage(const GridFunction& u_prev, double K, double r, double sigma,
                     double lambda);

struct CarrResult {
  double price = 0.0;
  std::vector<PutStage> stages;
};

// n-stage recursion from the obstacle payoff; price is v_n^n at the spot.
CarrResult carr_price(const PutModel& model, double spot, int grid_points = 4001);

// Richardson-extrapolated price over stage counts ns (price at 1/n -> 0).
double carr_richardson(const PutModel& model, double spot, const std::vector<int>& ns = {1, 2, 3},
                       int grid_points = 4001);

// Cox-Ross-Rubinstein binomial American put with early exercise.
double binomial_oracle(double K, double r, double sigma, double T, double spot, int steps);
// Oscillation-smoothed variant: average of `steps` and `steps + 1`.
double binomial_oracle_smoothed(double K, double r, double sigma, double T, double spot,
                                int steps);

double european_put_bs(double K, double r, double sigma, double T, double spot);
double perpetual_put_boundary(double K, double r, double sigma);
double perpetual_put_value(double K, double r, double sigma, double spot);

}  // namespace randhorizon

#endif
