#include "randhorizon/grid_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace randhorizon {

double TailDescriptor::value(double x) const {
  if (sign == 0.0) return offset;
  double lx = std::log(x);
  double e = log_coef + exponent * lx;
  if (e < -745.0) return offset;  // asymptote underflows against the offset
  double lg = 1.0;
  if (log_power != 0) lg = std::pow(lx, log_power);
  return offset + sign * std::exp(e) * lg;
}

GridFunction::GridFunction(LogGrid grid, std::vector<double> values, TailDescriptor left,
                           TailDescriptor right, std::vector<Break> breaks)
    : grid_(std::make_shared<LogGrid>(std::move(grid))),
      values_(std::move(values)),
      left_(left),
      right_(right),
      breaks_(std::move(breaks)) {
  if (static_cast<int>(values_.size()) != grid_->size())
    throw config_error("GridFunction: values/grid size mismatch");
  for (double v : values_)
    if (!std::isfinite(v)) throw config_error("GridFunction: non-finite value");
  std::sort(breaks_.begin(), breaks_.end(),
            [](const Break& a, const Break& b) { return a.node < b.node; });
  build_slopes();
}

GridFunction::GridFunction(const std::vector<double>& abscissae, std::vector<double> values,
                           TailDescriptor left, TailDescriptor right)
    : GridFunction(
          [&] {
            if (abscissae.size() < 4) throw config_error("GridFunction: too few abscissae");
            double h = std::log(abscissae[1] / abscissae[0]);
            for (std::size_t j = 0; j + 1 < abscissae.size(); ++j) {
              if (!(abscissae[j] > 0.0) || !(abscissae[j + 1] > abscissae[j]))
                throw config_error("GridFunction: abscissae not strictly increasing positive");
              double hj = std::log(abscissae[j + 1] / abscissae[j]);
              if (std::abs(hj - h) > 1e-12 * std::max(1.0, std::abs(h)))
                throw config_error("GridFunction: abscissae not log-uniform");
            }
            return LogGrid(abscissae.front(), abscissae.back(),
                           static_cast<int>(abscissae.size()));
          }(),
          std::move(values), left, right) {}

GridFunction GridFunction::sample(LogGrid grid, const std::function<double(double)>& f,
                                  TailDescriptor left, TailDescriptor right,
                                  std::vector<Break> breaks) {
  std::vector<double> v(static_cast<std::size_t>(grid.size()));
  for (int j = 0; j < grid.size(); ++j) v[static_cast<std::size_t>(j)] = f(grid.x(j));
  return GridFunction(std::move(grid), std::move(v), left, right, std::move(breaks));
}

void GridFunction::build_slopes() {
  const int n = grid_->size();
  slopes_.assign(static_cast<std::size_t>(n), 0.0);
  const double h = grid_->h();
  auto sec = [&](int j) { return (values_[j + 1] - values_[j]) / h; };
  for (int j = 1; j + 1 < n; ++j) {
    double dl = sec(j - 1), dr = sec(j);
    if (dl * dr > 0.0)
      slopes_[j] = 2.0 * dl * dr / (dl + dr);  // harmonic mean keeps monotonicity
    else
      slopes_[j] = 0.0;
  }
  auto end_slope = [&](double d0, double d1) {
    double d = 1.5 * d0 - 0.5 * d1;
    if (d * d0 <= 0.0) return 0.0;
    if (std::abs(d) > 3.0 * std::abs(d0)) return 3.0 * d0;
    return d;
  };
  if (n >= 3) {
    slopes_[0] = end_slope(sec(0), sec(1));
    slopes_[n - 1] = end_slope(sec(n - 2), sec(n - 3));
  }
}

double GridFunction::operator()(double x) const {
  if (!(x > 0.0)) return left_.value(std::numeric_limits<double>::min());
  if (x < grid_->x_min()) return left_.value(x);
  if (x > grid_->x_max()) return right_.value(x);
  int j = grid_->segment_of(x);
  double s = grid_->local(j, x);
  double h = grid_->h();
  double v0 = values_[j], v1 = values_[j + 1];
  double m0 = slopes_[j] * h, m1 = slopes_[j + 1] * h;
  double s2 = s * s, s3 = s2 * s;
  return (2 * s3 - 3 * s2 + 1) * v0 + (s3 - 2 * s2 + s) * m0 + (-2 * s3 + 3 * s2) * v1 +
         (s3 - s2) * m1;
}

double GridFunction::derivative(double x) const {
  if (x < grid_->x_min() || x > grid_->x_max()) {
    const TailDescriptor& tl = (x < grid_->x_min()) ? left_ : right_;
    if (tl.sign == 0.0) return 0.0;
    double lx = std::log(x);
    double e = tl.log_coef + tl.exponent * lx;
    if (e < -745.0) return 0.0;
    double core = tl.sign * std::exp(e);
    double lg = tl.log_power ? std::pow(lx, tl.log_power) : 1.0;
    double dlg = tl.log_power ? tl.log_power * std::pow(lx, tl.log_power - 1) : 0.0;
    return core * (tl.exponent * lg + dlg) / x;
  }
  int j = grid_->segment_of(x);
  double s = grid_->local(j, x);
  double h = grid_->h();
  double v0 = values_[j], v1 = values_[j + 1];
  double m0 = slopes_[j] * h, m1 = slopes_[j + 1] * h;
  double s2 = s * s;
  double dv_ds = (6 * s2 - 6 * s) * v0 + (3 * s2 - 4 * s + 1) * m0 + (-6 * s2 + 6 * s) * v1 +
                 (3 * s2 - 2 * s) * m1;
  return dv_ds / (h * x);
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

bool GridFunction::nondecreasing(double slack) const {
  for (std::size_t j = 0; j + 1 < values_.size(); ++j)
    if (values_[j + 1] < values_[j] - slack) return false;
  return true;
}

namespace {

// Regress ln|v - offset| = ln|a| + g t + d ln|t| over the outer nodes for
// d in {0,1,2}; keep the best SSR, then anchor a at the junction node.
TailDescriptor fit_tail(const LogGrid& g, const std::vector<double>& v, double offset,
                        bool left) {
  const int n = g.size();
  int width = std::max(6, n / 20);
  int first = left ? 0 : n - width;
  int last = left ? width - 1 : n - 1;
  first = std::max(first, 0);
  last = std::min(last, n - 1);
  int junction = left ? 0 : n - 1;

  // below this floor residuals against a nonzero offset are cancellation
  // noise, not asymptote data
  double floor = offset == 0.0 ? 1e-250 : 1e-12 * std::abs(offset);
  std::vector<int> usable;
  double sgn = 0.0;
  for (int j = first; j <= last; ++j) {
    double r = v[static_cast<std::size_t>(j)] - offset;
    if (std::abs(r) > floor) {
      if (sgn == 0.0) sgn = r > 0 ? 1.0 : -1.0;
      if (r * sgn > 0) usable.push_back(j);
    }
  }
  double vj = v[static_cast<std::size_t>(junction)] - offset;
  if (std::abs(vj) <= floor) return TailDescriptor::flat(offset);
  if (usable.size() < 3) return TailDescriptor::constant(vj).with_offset(offset);

  double tj_abs_min = std::numeric_limits<double>::infinity();
  for (int j : usable) tj_abs_min = std::min(tj_abs_min, std::abs(g.t(j)));
  int dmax = tj_abs_min > 1.0 ? 2 : 0;  // ln|t| basis is ill-conditioned near t = 0

  double best_ssr = std::numeric_limits<double>::infinity();
  double best_gamma = 0.0;
  int best_d = 0;
  for (int d = 0; d <= dmax; ++d) {
    double sw = 0, st = 0, stt = 0, sy = 0, sty = 0;
    bool ok = true;
    for (int j : usable) {
      double t = g.t(j);
      double lt = d ? std::log(std::abs(t)) : 0.0;
      double y = std::log(std::abs(v[static_cast<std::size_t>(j)] - offset)) - d * lt;
      if (!std::isfinite(y)) { ok = false; break; }
      sw += 1; st += t; stt += t * t; sy += y; sty += t * y;
    }
    if (!ok) continue;
    double det = sw * stt - st * st;
    if (std::abs(det) < 1e-12) continue;
    double gamma = (sw * sty - st * sy) / det;
    double alpha = (sy - gamma * st) / sw;
    double ssr = 0;
    for (int j : usable) {
      double t = g.t(j);
      double lt = d ? std::log(std::abs(t)) : 0.0;
      double y = std::log(std::abs(v[static_cast<std::size_t>(j)] - offset)) - d * lt;
      double e = y - alpha - gamma * t;
      ssr += e * e;
    }
    if (ssr < best_ssr) { best_ssr = ssr; best_gamma = gamma; best_d = d; }
  }

  // a fitted slope of the wrong sign means the residuals are flat or noise
  if ((left && best_gamma < 1e-9) || (!left && best_gamma > -1e-9))
    return TailDescriptor::constant(vj).with_offset(offset);

  double tj = g.t(junction);
  double lg_abs = 0.0;          // ln of |(ln x_j)^d|
  double lg_sign = 1.0;
  if (best_d) {
    lg_abs = best_d * std::log(std::abs(tj));
    if (best_d % 2 == 1 && tj < 0) lg_sign = -1.0;
  }
  TailDescriptor out;
  out.offset = offset;
  out.sign = (vj > 0 ? 1.0 : -1.0) * lg_sign;
  out.log_coef = std::log(std::abs(vj)) - best_gamma * tj - lg_abs;
  out.exponent = best_gamma;
  out.log_power = best_d;
  return out;
}

}  // namespace

TailDescriptor fit_left_tail(const LogGrid& g, const std::vector<double>& v, double offset) {
  return fit_tail(g, v, offset, true);
}

TailDescriptor fit_right_tail(const LogGrid& g, const std::vector<double>& v, double offset) {
  return fit_tail(g, v, offset, false);
}

TailDescriptor two_node_left_tail(const LogGrid& g, const std::vector<double>& v) {
  if (v.size() < 2 || !(v[0] > 1e-280) || !(v[1] > 1e-280)) return TailDescriptor{};
  double gamma = (std::log(v[1]) - std::log(v[0])) / g.h();
  TailDescriptor out;
  out.sign = 1.0;
  out.log_coef = std::log(v[0]) - gamma * g.t(0);
  out.exponent = gamma;
  return out;
}

}  // namespace randhorizon
