#include "randhorizon/integrate.hpp"

#include <cmath>
#include <stdexcept>

#include "randhorizon/power_cumulant.hpp"

namespace randhorizon {

namespace {

// antiderivative of tail(u) on the tail side: offset*u + a * A(u),
// A(u) = int u^{g}(ln u)^d du with w = g+1
double tail_antiderivative(const TailDescriptor& tail, double x) {
  double acc = tail.offset * x;
  if (tail.sign != 0.0) {
    double w = tail.exponent + 1.0;
    if (w == 0.0 && tail.log_power == 0) {
      // a/u integrates to a ln u
      acc += tail.coef() * std::log(x);
    } else {
      if (w == 0.0) throw std::domain_error("tail antiderivative: exponent -1 with log factor");
      double t = std::log(x);
      double core = tail.log_coef + tail.exponent * t;
      if (core > -745.0) {
        double fall = 1.0, sg = 1.0, winv = 1.0 / w, wpow = winv, sum = 0.0;
        for (int i = 0; i <= tail.log_power; ++i) {
          sum += sg * fall * std::pow(t, tail.log_power - i) * wpow;
          fall *= (tail.log_power - i);
          sg = -sg;
          wpow *= winv;
        }
        acc += tail.sign * std::exp(core) * x * sum;
      }
    }
  }
  return acc;
}

double left_tail_piece(const GridFunction& f, double lo, double hi) {
  const TailDescriptor& tl = f.left_tail();
  if (tl.sign != 0.0 && lo <= 0.0 && !(tl.exponent + 1.0 > 0.0))
    throw std::domain_error("left tail not integrable down to 0");
  double a = tail_antiderivative(tl, hi);
  double b = lo > 0.0 ? tail_antiderivative(tl, lo) : 0.0;
  return a - b;
}

double right_tail_piece(const GridFunction& f, double lo, double hi) {
  const TailDescriptor& tr = f.right_tail();
  if (!std::isfinite(hi)) throw std::domain_error("cumulative_integral: infinite upper limit");
  return tail_antiderivative(tr, hi) - tail_antiderivative(tr, lo);
}

}  // namespace

double cumulative_integral(const GridFunction& f, double lo, double hi) {
  if (!(lo <= hi)) throw config_error("cumulative_integral: need lo <= hi");
  if (lo == hi) return 0.0;
  const LogGrid& g = f.grid();
  double acc = 0.0;
  double a = lo, b = hi;
  if (a < g.x_min()) {
    double top = std::min(b, g.x_min());
    acc += left_tail_piece(f, a, top);
    a = top;
  }
  if (b > g.x_max()) {
    double bot = std::max(a, g.x_max());
    acc += right_tail_piece(f, bot, b);
    b = bot;
  }
  if (a >= b) return acc;
  // grid part: p = 0 cumulant scaled by 1/x, unscale node by node
  ScaledCumulant cum(g, f.values(), f.breaks(), 0.0, ScaledCumulant::Anchor::below, 0.0);
  auto integral_from_min = [&](double x) { return cum.at(x) * x; };
  acc += integral_from_min(b) - integral_from_min(a);
  return acc;
}

std::vector<double> running_cumulative(const GridFunction& f) {
  const LogGrid& g = f.grid();
  ScaledCumulant cum(g, f.values(), f.breaks(), 0.0, ScaledCumulant::Anchor::below, 0.0);
  std::vector<double> out(static_cast<std::size_t>(g.size()));
  for (int j = 0; j < g.size(); ++j) out[static_cast<std::size_t>(j)] = cum.at_node(j) * g.x(j);
  return out;
}

namespace {

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa,
                   double fm, double fb, double whole, double tol, int depth) {
  double m = 0.5 * (a + b);
  double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
  double flm = f(lm), frm = f(rm);
  double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  double both = left + right;
  if (depth > 50 || std::abs(both - whole) < 15.0 * tol) return both + (both - whole) / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1);
}

}  // namespace

double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          double rel_tol, double abs_tol) {
  if (a == b) return 0.0;
  double fa = f(a), fb = f(b), fm = f(0.5 * (a + b));
  double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  double tol = std::max(abs_tol, rel_tol * std::abs(whole));
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, 0);
}

}  // namespace randhorizon
