#ifndef RANDHORIZON_POWER_CUMULANT_HPP
#define RANDHORIZON_POWER_CUMULANT_HPP

#include <span>
#include <vector>

#include "randhorizon/grid_function.hpp"

namespace randhorizon {

// Exponential moments E_m(q, w) = int_0^w s^m e^{-q s} ds for m = 0..count-1.
// Series for small |q w|, closed recurrence otherwise.
void exp_moments(double q, double w, double* out, int count);

// Scaled integral of f(u) u^p over a sub-segment of segment j:
//
//   x_j^{-(p+1)} * int_{x_j e^{s0 h}}^{x_j e^{s1 h}} f(u) u^p du,  0 <= s0 < s1 <= 1.
//
// The power weight is integrated exactly; f is replaced by the local
// polynomial through up to six neighbouring nodes, with the window clipped at
// breakpoints so stencils never straddle a kink or jump. Keeping the x_j
// prefactor outside makes every quantity O(f) even when |p| is several
// hundred.
double scaled_piece(const LogGrid& g, std::span<const double> f, std::span<const Break> breaks,
                    int j, double s0, double s1, double p);

// Integral of the tail of f beyond the grid, scaled by the junction node:
//   left:  x_0^{-(p+1)} * int_0^{x_0} tail(u) u^p du
//   right: x_{n-1}^{-(p+1)} * int_{x_{n-1}}^inf tail(u) u^p du
// Throws std::domain_error when the exponent test fails (tail not integrable).
double left_tail_scaled_seed(const TailDescriptor& tail, const LogGrid& g, double p);
double right_tail_scaled_seed(const TailDescriptor& tail, const LogGrid& g, double p);

// Running scaled integral S(x) = x^{-(p+1)} * I(x) along the grid, where
//   anchor below:  I(x) = int_0^x f(u) u^p du      (left tail included)
//   anchor above:  I(x) = int_x^inf f(u) u^p du    (right tail included)
// Marching factors are contractive in the anchored direction for the
// exponents used in this artifact, so errors never amplify along the grid.
class ScaledCumulant {
public:
  enum class Anchor { below, above };

  ScaledCumulant(const LogGrid& g, std::span<const double> f, std::span<const Break> breaks,
                 double p, Anchor anchor, double seed);

  static ScaledCumulant of(const GridFunction& f, double p, Anchor anchor);

  double p() const { return p_; }
  Anchor anchor() const { return anchor_; }
  double at_node(int j) const { return s_[static_cast<std::size_t>(j)]; }
  std::span<const double> nodes() const { return s_; }
  double at(double x) const;  // x must lie inside the grid

private:
  const LogGrid* g_;
  std::span<const double> f_;
  std::span<const Break> breaks_;
  double p_;
  Anchor anchor_;
  std::vector<double> s_;
};

}  // namespace randhorizon

#endif
