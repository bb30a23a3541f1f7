#ifndef RANDHORIZON_LOG_GRID_HPP
#define RANDHORIZON_LOG_GRID_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "randhorizon/errors.hpp"

namespace randhorizon {

// Log-uniform spatial grid: node j sits at x_j = exp(t0 + j h), all > 0.
class LogGrid {
public:
  LogGrid(double x_lo, double x_hi, int points) {
    if (!(x_lo > 0.0) || !(x_hi > x_lo) || points < 4)
      throw config_error("LogGrid: need 0 < x_lo < x_hi and at least 4 points");
    t0_ = std::log(x_lo);
    h_ = (std::log(x_hi) - t0_) / (points - 1);
    init(points);
  }

  // Grid with a node pinned exactly at `anchor` and exact log-step `h`,
  // extended to cover [x_lo, x_hi].
  static LogGrid aligned(double anchor, double x_lo, double x_hi, double h) {
    if (!(anchor > 0.0) || !(x_lo > 0.0) || !(x_hi > x_lo) || !(h > 0.0))
      throw config_error("LogGrid::aligned: invalid parameters");
    double ta = std::log(anchor);
    int below = static_cast<int>(std::ceil((ta - std::log(x_lo)) / h - 1e-9));
    int above = static_cast<int>(std::ceil((std::log(x_hi) - ta) / h - 1e-9));
    below = std::max(below, 0);
    above = std::max(above, 0);
    return LogGrid(raw_tag{}, ta - below * h, h, below + above + 1);
  }

  int size() const { return n_; }
  double h() const { return h_; }
  double t(int j) const { return t0_ + j * h_; }
  double x(int j) const { return xs_[static_cast<std::size_t>(j)]; }
  double x_min() const { return xs_.front(); }
  double x_max() const { return xs_.back(); }
  const std::vector<double>& abscissae() const { return xs_; }

  bool inside(double x) const { return x >= x_min() && x <= x_max(); }

  // Index j with x in [x_j, x_{j+1}), clamped to [0, size()-2].
  int segment_of(double x) const {
    int j = static_cast<int>(std::floor((std::log(x) - t0_) / h_));
    return std::clamp(j, 0, n_ - 2);
  }

  // local coordinate s = (ln x - t_j)/h
  double local(int j, double x) const { return (std::log(x) - t(j)) / h_; }

  bool same_as(const LogGrid& o) const {
    return n_ == o.n_ && std::abs(t0_ - o.t0_) < 1e-14 && std::abs(h_ - o.h_) < 1e-16;
  }

private:
  struct raw_tag {};
  LogGrid(raw_tag, double t0, double h, int points) : t0_(t0), h_(h) { init(points); }

  void init(int points) {
    n_ = points;
    xs_.resize(static_cast<std::size_t>(points));
    for (int j = 0; j < points; ++j) xs_[static_cast<std::size_t>(j)] = std::exp(t(j));
  }

  double t0_ = 0.0, h_ = 0.0;
  int n_ = 0;
  std::vector<double> xs_;
};

}  // namespace randhorizon

#endif
