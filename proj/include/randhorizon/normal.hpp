#ifndef RANDHORIZON_NORMAL_HPP
#define RANDHORIZON_NORMAL_HPP

#include <cmath>

namespace randhorizon {

inline double std_normal_pdf(double x) {
  return 0.398942280401432677939946059934 * std::exp(-0.5 * x * x);
}

// Standard normal CDF via erfc; accurate to a few ulp over the real line.
inline double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x * 0.70710678118654752440084436210485);
}

}  // namespace randhorizon

#endif
