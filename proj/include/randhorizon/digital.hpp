#ifndef RANDHORIZON_DIGITAL_HPP
#define RANDHORIZON_DIGITAL_HPP

#include <vector>

#include "randhorizon/grid_function.hpp"

namespace randhorizon {

// Digital claim under the zero-lower-volatility band: hit-or-miss payoff at
// the strike, only the upper volatility drives the value.
struct DigitalModel {
  double K = 0.0;       // strike
  double x = 0.0;       // spot
  double sigma2 = 0.0;  // upper volatility
  double T = 0.0;       // horizon
  int n = 1;            // stages

  double lambda() const { return n / T; }
  double gamma2() const;
  void validate() const;
};

// Probability that the sigma2 diffusion's running maximum reaches K by T
// (reflection principle, closed form). Equals 1 for x >= K.
double exact_digital_value(double K, double x, double sigma2, double T);

// Same value by direct quadrature of the density representation; used as an
// independent oracle for the closed form.
double exact_digital_value_quadrature(double K, double x, double sigma2, double T);

// Grid on (0, K]: log-uniform, top node exactly at K.
LogGrid make_digital_grid(const DigitalModel& model, int grid_points = 4001);

// The one-sided inductive scheme on (0, K]: value pinned to 1 at K, only the
// gamma2 branch enters. Returns all n stages.
std::vector<GridFunction> digital_iterate(const DigitalModel& model, int grid_points = 4001);

// v_n^n at the model spot without retaining intermediate stages.
double digital_value(const DigitalModel& model, int grid_points = 4001);

// One reproduced table cell; `printed` is the value as published.
struct TableCell {
  double sigma2 = 0.0;
  double T = 0.0;
  int n = 0;  // 0 marks the exact column
  double x = 0.0;
  double value = 0.0;
  double printed = 0.0;
  bool exact_column = false;
  bool informational = false;  // excluded from tolerances (inconsistent printed row)
};

// table = 1: all 30 cells at x = 95. table = 2: the x = 50 row plus two
// informational x = 80 entries, one per horizon reading of the printed row.
std::vector<TableCell> reproduce_tables(int table, int grid_points = 4001);

}  // namespace randhorizon

#endif
