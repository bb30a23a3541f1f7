#ifndef RANDHORIZON_INTEGRATE_HPP
#define RANDHORIZON_INTEGRATE_HPP

#include <functional>
#include <vector>

#include "randhorizon/grid_function.hpp"

namespace randhorizon {

// Integral of a grid function over [lo, hi]. Both endpoints may lie in the
// tail regions, where the closed-form antiderivative of the tail descriptor
// is used; the exponent test failing there raises std::domain_error.
double cumulative_integral(const GridFunction& f, double lo, double hi);

// Running cumulative over the grid: entry j holds the integral of f from
// x_min to x_j.
std::vector<double> running_cumulative(const GridFunction& f);

// Adaptive Simpson quadrature for callables (oracles, mixtures).
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-10, double abs_tol = 1e-14);

}  // namespace randhorizon

#endif
