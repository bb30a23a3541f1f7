#include "randhorizon/richardson.hpp"

#include <stdexcept>
#include <vector>

namespace randhorizon {

double richardson_extrapolate(const std::vector<std::pair<int, double>>& samples) {
  const std::size_t m = samples.size();
  if (m < 2) throw std::invalid_argument("richardson_extrapolate: need at least two samples");
  std::vector<double> t(m), p(m);
  for (std::size_t i = 0; i < m; ++i) {
    if (samples[i].first < 1)
      throw std::invalid_argument("richardson_extrapolate: n must be positive");
    t[i] = 1.0 / samples[i].first;
    p[i] = samples[i].second;
    for (std::size_t k = 0; k < i; ++k)
      if (samples[k].first == samples[i].first)
        throw std::invalid_argument("richardson_extrapolate: duplicate n");
  }
  // Neville's scheme evaluated at 1/n = 0
  for (std::size_t level = 1; level < m; ++level)
    for (std::size_t i = 0; i + level < m; ++i)
      p[i] = (t[i + level] * p[i] - t[i] * p[i + 1]) / (t[i + level] - t[i]);
  return p[0];
}

}  // namespace randhorizon
