#include "randhorizon/root_find.hpp"

#include <cmath>
#include <string>

namespace randhorizon {

namespace {

void check_bracket(double lo, double hi, double flo, double fhi) {
  if (!(lo < hi)) throw bracket_error("bracket: need lo < hi");
  if (!std::isfinite(flo) || !std::isfinite(fhi))
    throw bracket_error("bracket: non-finite residual at an endpoint");
  if (flo == 0.0 || fhi == 0.0) return;
  if ((flo > 0.0) == (fhi > 0.0))
    throw bracket_error("bracket: no sign change on [" + std::to_string(lo) + ", " +
                        std::to_string(hi) + "]");
}

double width_tol(double a, double b, double rel_tol) {
  return rel_tol * std::max(1e-300, 0.5 * (std::abs(a) + std::abs(b))) + 1e-300;
}

}  // namespace

double find_root_bracketed(const std::function<double(double)>& g, Bracket bracket,
                           double rel_tol) {
  double a = bracket.lo, b = bracket.hi;
  double fa = g(a), fb = g(b);
  check_bracket(a, b, fa, fb);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;

  const int max_secant = 60;
  for (int it = 0; it < 200; ++it) {
    if (b - a <= width_tol(a, b, rel_tol)) break;
    double mid = 0.5 * (a + b);
    double x = mid;
    if (it < max_secant && fb != fa) {
      double sec = (a * fb - b * fa) / (fb - fa);
      // accept the secant point only if it lands strictly inside and makes
      // decent progress against the bracket width
      double margin = 0.01 * (b - a);
      if (sec > a + margin && sec < b - margin) x = sec;
    }
    double fx = g(x);
    if (fx == 0.0) return x;
    if ((fx > 0.0) == (fa > 0.0)) {
      a = x;
      fa = fx;
    } else {
      b = x;
      fb = fx;
    }
  }
  // linear interpolation inside the final bracket
  return (fb != fa) ? (a * fb - b * fa) / (fb - fa) : 0.5 * (a + b);
}

double bisect_root(const std::function<double(double)>& g, Bracket bracket, double rel_tol) {
  double a = bracket.lo, b = bracket.hi;
  double fa = g(a), fb = g(b);
  check_bracket(a, b, fa, fb);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  for (int it = 0; it < 200 && b - a > width_tol(a, b, rel_tol); ++it) {
    double m = 0.5 * (a + b);
    double fm = g(m);
    if (fm == 0.0) return m;
    if ((fm > 0.0) == (fa > 0.0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
      fb = fm;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace randhorizon
