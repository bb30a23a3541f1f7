#ifndef RANDHORIZON_ROOT_FIND_HPP
#define RANDHORIZON_ROOT_FIND_HPP

#include <functional>

#include "randhorizon/errors.hpp"

namespace randhorizon {

// Search interval with opposite residual signs at the two ends.
struct Bracket {
  double lo = 0.0;
  double hi = 0.0;
};

// Root of g on the bracket: secant steps while they stay inside the shrinking
// bracket, bisection otherwise, so convergence is guaranteed for continuous g.
// Throws bracket_error when g(lo) and g(hi) do not have opposite signs.
double find_root_bracketed(const std::function<double(double)>& g, Bracket bracket,
                           double rel_tol = 1e-10);

// Plain bisection to the same tolerance contract.
double bisect_root(const std::function<double(double)>& g, Bracket bracket,
                   double rel_tol = 1e-12);

}  // namespace randhorizon

#endif
