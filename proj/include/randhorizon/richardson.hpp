#ifndef RANDHORIZON_RICHARDSON_HPP
#define RANDHORIZON_RICHARDSON_HPP

#include <utility>
#include <vector>

namespace randhorizon {

// Richardson extrapolation in 1/n: the degree-(m-1) polynomial in 1/n through
// the m samples, evaluated at 1/n = 0. Exact for values polynomial in 1/n of
// degree < m. Throws std::invalid_argument on duplicate n or fewer than two
// samples.
double richardson_extrapolate(const std::vector<std::pair<int, double>>& samples);

}  // namespace randhorizon

#endif
