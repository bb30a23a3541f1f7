#ifndef RANDHORIZON_GRID_FUNCTION_HPP
#define RANDHORIZON_GRID_FUNCTION_HPP

#include <cmath>
#include <functional>
#include <memory>
#include <vector>

#include "randhorizon/log_grid.hpp"

namespace randhorizon {

// Asymptote descriptor: offset + a * x^exponent * (ln x)^log_power.
// Left tails (x -> 0) have offset 0; right tails (x -> inf) use offset 0 or 1.
// The coefficient a is kept as (sign, ln|a|) so that steep exponents anchored
// far from x = 1 do not overflow. sign == 0 means the tail is identically
// `offset`.
struct TailDescriptor {
  double offset = 0.0;
  double sign = 0.0;
  double log_coef = 0.0;  // ln|a|
  double exponent = 0.0;
  int log_power = 0;

  double value(double x) const;
  double coef() const { return sign == 0.0 ? 0.0 : sign * std::exp(log_coef); }

  static TailDescriptor power(double a, double exponent, int log_power = 0) {
    if (a == 0.0) return TailDescriptor{};
    return TailDescriptor{0.0, a > 0 ? 1.0 : -1.0, std::log(std::abs(a)), exponent, log_power};
  }
  static TailDescriptor constant(double c) { return power(c, 0.0, 0); }
  static TailDescriptor flat(double c) { return TailDescriptor{c, 0.0, 0.0, 0.0, 0}; }
  TailDescriptor with_offset(double c) const {
    TailDescriptor t = *this;
    t.offset = c;
    return t;
  }
};

// Smoothness breakpoint at a grid node. Interpolation/quadrature stencils do
// not cross breakpoints. At a `jump` the stored node value is the right limit;
// segments below the node see the left side only.
struct Break {
  int node = 0;
  bool jump = false;
};

// A bounded function of the spatial variable on a log-uniform grid, with
// parametric power-log tails outside the grid. Interior evaluation uses
// monotone-preserving piecewise-cubic (Fritsch-Carlson) interpolation in the
// log coordinate.
class GridFunction {
public:
  GridFunction(LogGrid grid, std::vector<double> values, TailDescriptor left,
               TailDescriptor right, std::vector<Break> breaks = {});

  // Validating constructor from raw abscissae (must be log-uniform to 1e-12).
  GridFunction(const std::vector<double>& abscissae, std::vector<double> values,
               TailDescriptor left, TailDescriptor right);

  static GridFunction sample(LogGrid grid, const std::function<double(double)>& f,
                             TailDescriptor left, TailDescriptor right,
                             std::vector<Break> breaks = {});

  double operator()(double x) const;   // interior: interpolation; exterior: tails
  double derivative(double x) const;   // d/dx of the interpolant / tails

  const LogGrid& grid() const { return *grid_; }
  const std::vector<double>& values() const { return values_; }
  double value(int j) const { return values_[static_cast<std::size_t>(j)]; }
  const TailDescriptor& left_tail() const { return left_; }
  const TailDescriptor& right_tail() const { return right_; }
  const std::vector<Break>& breaks() const { return breaks_; }

  double max_abs() const;
  bool nondecreasing(double slack) const;

private:
  std::shared_ptr<const LogGrid> grid_;
  std::vector<double> values_;
  TailDescriptor left_, right_;
  std::vector<Break> breaks_;
  std::vector<double> slopes_;  // dv/dt at nodes, Fritsch-Carlson

  void build_slopes();
};

// Least-squares power-log tail fits over the outer 5% of nodes, anchored so
// the descriptor matches the junction node exactly. `offset` is the known
// limit (0 for left tails; 0 or 1 for right tails here). Falls back to a flat
// or constant fit when the data underflows.
TailDescriptor fit_left_tail(const LogGrid& g, const std::vector<double>& v, double offset = 0.0);
TailDescriptor fit_right_tail(const LogGrid& g, const std::vector<double>& v, double offset);

// Exact two-node left-tail fit (pure power through the two smallest nodes).
TailDescriptor two_node_left_tail(const LogGrid& g, const std::vector<double>& v);

}  // namespace randhorizon

#endif
