#include "randhorizon/uvm.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "randhorizon/errors.hpp"
#include "randhorizon/root_find.hpp"

namespace randhorizon {

void UvmModel::validate() const {
  if (!(sigma2 > 0.0) || sigma1 < 0.0 || sigma1 > sigma2)
    throw config_error("UvmModel: need 0 <= sigma1 <= sigma2, sigma2 > 0");
  if (!(T > 0.0)) throw config_error("UvmModel: need T > 0");
  if (n < 1) throw config_error("UvmModel: need n >= 1");
}

double gamma2_exponent(double sigma2, double T, int n) {
  return 0.5 * (1.0 + std::sqrt(1.0 + 8.0 * n / (T * sigma2 * sigma2)));
}

Exponents exponents(const UvmModel& model) {
  model.validate();
  if (model.sigma1 == 0.0)
    throw std::domain_error("exponents: sigma1 = 0 has no bounded gamma1 (digital path)");
  Exponents e;
  e.gamma1 = 0.5 * (1.0 - std::sqrt(1.0 + 8.0 * model.n / (model.T * model.sigma1 * model.sigma1)));
  e.gamma2 = gamma2_exponent(model.sigma2, model.T, model.n);
  return e;
}

double mixing_density(const Exponents& e, double r) {
  if (!(r > 0.0)) return 0.0;
  double span = e.gamma2 - e.gamma1;
  if (r <= 1.0) {
    double lp = (e.gamma2 - 2.0) * std::log(r);
    return lp < -745.0 ? 0.0 : e.gamma2 * (e.gamma2 - 1.0) * std::exp(lp) / span;
  }
  double lp = (e.gamma1 - 2.0) * std::log(r);
  return lp < -745.0 ? 0.0 : e.gamma1 * (e.gamma1 - 1.0) * std::exp(lp) / span;
}

namespace {

double pow_clamped(double log_base_ratio, double gamma) {
  double e = gamma * log_base_ratio;
  if (e < -745.0) return 0.0;
  return std::exp(e);
}

void require_bounded(const GridFunction& phi) {
  if (phi.left_tail().sign != 0.0 && phi.left_tail().exponent < 0.0)
    throw std::domain_error("phi unbounded as x -> 0");
  if (phi.right_tail().sign != 0.0 && phi.right_tail().exponent > 0.0)
    throw std::domain_error("phi unbounded as x -> infinity");
}

}  // namespace

StageOperator::StageOperator(const GridFunction& phi, const Exponents& e)
    : phi_(&phi),
      e_(e),
      j2_((require_bounded(phi), ScaledCumulant::of(phi, e.gamma2 - 2.0, ScaledCumulant::Anchor::below))),
      j1_(ScaledCumulant::of(phi, e.gamma1 - 2.0, ScaledCumulant::Anchor::above)) {
  for (const Break& b : phi.breaks()) outer_breaks_.push_back(Break{b.node, false});
  double span = e_.gamma2 - e_.gamma1;
  c2_ = e_.gamma2 * (e_.gamma2 - 1.0) / span;
  c1_ = e_.gamma1 * (e_.gamma1 - 1.0) / span;
}

double StageOperator::beta(double b) const { return c2_ * j2_.at(b) + c1_ * j1_.at(b); }

double StageOperator::crossing_residual(double b) const { return beta(b) - (*phi_)(b); }

// Signed outer integral S(x) = x^gamma int_x^b u^{-gamma-1} Jhat(u) du,
// marched segment by segment in scaled form.
double StageOperator::outer_scaled(const ScaledCumulant& j, double gamma, double b,
                                   double x) const {
  const LogGrid& g = phi_->grid();
  const double h = g.h();
  const double p = -gamma - 1.0;
  std::span<const double> f = j.nodes();
  std::span<const Break> obreaks(outer_breaks_);
  if (x == b) return 0.0;
  int jb = g.segment_of(b), jx = g.segment_of(x);
  double sb = g.local(jb, b), sx = g.local(jx, x);
  if (x < b) {
    if (jx == jb) return std::exp(gamma * sx * h) * scaled_piece(g, f, obreaks, jx, sx, sb, p);
    double cur = scaled_piece(g, f, obreaks, jb, 0.0, sb, p);  // x_jb^gamma int_{x_jb}^b
    double fac = std::exp(-gamma * h);
    for (int k = jb - 1; k > jx; --k)
      cur = fac * cur + scaled_piece(g, f, obreaks, k, 0.0, 1.0, p);
    double head = scaled_piece(g, f, obreaks, jx, sx, 1.0, p);
    return std::exp(gamma * sx * h) * head + std::exp(gamma * (sx - 1.0) * h) * cur;
  }
  // x > b: S = -x^gamma int_b^x
  if (jx == jb) return -std::exp(gamma * sx * h) * scaled_piece(g, f, obreaks, jb, sb, sx, p);
  double cur = std::exp(gamma * h) * scaled_piece(g, f, obreaks, jb, sb, 1.0, p);  // node jb+1
  double fac = std::exp(gamma * h);
  for (int k = jb + 1; k < jx; ++k)
    cur = fac * (cur + scaled_piece(g, f, obreaks, k, 0.0, 1.0, p));
  double head = scaled_piece(g, f, obreaks, jx, 0.0, sx, p);
  return -std::exp(gamma * sx * h) * (cur + head);
}

double StageOperator::h_kernel(int i, double y) const {
  if (i != 1 && i != 2) throw config_error("h_kernel: i must be 1 or 2");
  double b = b_;
  double x = b * y;
  if (!phi_->grid().inside(x)) throw config_error("h_kernel: b*y outside grid");
  if (i == 2) {
    double s = outer_scaled(j2_, e_.gamma2, b, x);
    return e_.gamma2 * (e_.gamma2 - 1.0) * std::pow(y, -e_.gamma2) * s;
  }
  double s = outer_scaled(j1_, e_.gamma1, b, x);
  return -e_.gamma1 * (e_.gamma1 - 1.0) * std::pow(y, -e_.gamma1) * s;
}

double StageOperator::apply_at(double b, double x) const {
  const double tb = std::log(b), tx = std::log(x);
  if (x <= b) {
    double base = pow_clamped(tx - tb, e_.gamma2);
    return base * beta(b) + e_.gamma2 * (e_.gamma2 - 1.0) * outer_scaled(j2_, e_.gamma2, b, x);
  }
  double base = pow_clamped(tx - tb, e_.gamma1);
  return base * beta(b) - e_.gamma1 * (e_.gamma1 - 1.0) * outer_scaled(j1_, e_.gamma1, b, x);
}

GridFunction StageOperator::apply(double b) const {
  const LogGrid& g = phi_->grid();
  const int n = g.size();
  const double h = g.h();
  if (!(b > g.x_min() && b < g.x_max()))
    throw boundary_error("apply_T: boundary outside grid interior");

  std::span<const double> j2v = j2_.nodes();
  std::span<const double> j1v = j1_.nodes();
  std::span<const Break> obreaks(outer_breaks_);
  const double beta_b = beta(b);
  const double tb = std::log(b);
  const int jb = g.segment_of(b);
  const double sb = g.local(jb, b);

  std::vector<double> out(static_cast<std::size_t>(n));
  // gamma2 branch: x <= b, marching down from b
  {
    const double gamma = e_.gamma2, p = -gamma - 1.0;
    const double fac = std::exp(-gamma * h);
    double cur = scaled_piece(g, j2v, obreaks, jb, 0.0, sb, p);  // x_jb^g2 int_{x_jb}^b
    for (int k = jb; k >= 0; --k) {
      if (k < jb) cur = fac * cur + scaled_piece(g, j2v, obreaks, k, 0.0, 1.0, p);
      out[static_cast<std::size_t>(k)] =
          pow_clamped(g.t(k) - tb, gamma) * beta_b + gamma * (gamma - 1.0) * cur;
    }
  }
  // gamma1 branch: x > b, marching up from b
  {
    const double gamma = e_.gamma1, p = -gamma - 1.0;
    const double fac = std::exp(gamma * h);
    double cur = fac * scaled_piece(g, j1v, obreaks, jb, sb, 1.0, p);  // x_{jb+1}^g1 int_b^{x_{jb+1}}
    for (int k = jb + 1; k < n; ++k) {
      if (k > jb + 1) cur = fac * (cur + scaled_piece(g, j1v, obreaks, k - 1, 0.0, 1.0, p));
      out[static_cast<std::size_t>(k)] =
          pow_clamped(g.t(k) - tb, gamma) * beta_b + gamma * (gamma - 1.0) * cur;
    }
  }

  // limits at 0 and infinity are preserved by the transform
  double llim = phi_->left_tail().value(g.x_min() * std::exp(-60.0));
  double rlim = phi_->right_tail().value(g.x_max() * std::exp(60.0));
  TailDescriptor left =
      llim == 0.0 ? fit_left_tail(g, out, 0.0) : TailDescriptor::constant(llim);
  TailDescriptor right = fit_right_tail(g, out, rlim);
  return GridFunction(g, std::move(out), left, right);
}

double beta_functional(const GridFunction& phi, double b, const Exponents& e) {
  return StageOperator(phi, e).beta(b);
}

double h_kernel(const GridFunction& phi, double b, int i, double y, const Exponents& e) {
  StageOperator op(phi, e);
  op.bind_b(b);
  return op.h_kernel(i, y);
}

GridFunction apply_T(const GridFunction& phi, double b, const Exponents& e) {
  return StageOperator(phi, e).apply(b);
}

double apply_T_at(const GridFunction& phi, double b, const Exponents& e, double x) {
  return StageOperator(phi, e).apply_at(b, x);
}

double solve_boundary(const GridFunction& phi, const Exponents& e, double b_hint,
                      double rel_tol) {
  double lo_range = 0.0, hi_range = 0.0;
  {
    double vmin = phi.values().front(), vmax = vmin;
    for (double v : phi.values()) {
      vmin = std::min(vmin, v);
      vmax = std::max(vmax, v);
    }
    if (vmax - vmin < 1e-13 * std::max(1.0, std::abs(vmax)))
      throw degenerate_error("solve_boundary: phi is constant, every b solves");
    lo_range = phi.grid().x_min() * (1.0 + 1e-9);
    hi_range = phi.grid().x_max() * (1.0 - 1e-9);
  }
  StageOperator op(phi, e);
  auto residual = [&](double b) { return op.crossing_residual(b); };

  double b0 = std::clamp(b_hint, lo_range, hi_range);
  double r0 = residual(b0);
  if (r0 == 0.0) return b0;
  double lo = b0, hi = b0;
  // residual > 0 near 0 and < 0 near infinity; expand geometrically
  if (r0 > 0.0) {
    for (int step = 0; step < 60; ++step) {
      double next = std::min(hi * 2.0, hi_range);
      double rn = residual(next);
      if (rn <= 0.0) {
        lo = hi;
        hi = next;
        return find_root_bracketed(residual, Bracket{lo, hi}, rel_tol);
      }
      lo = next;
      hi = next;
      if (next >= hi_range) break;
    }
    throw boundary_error("solve_boundary: no sign change found scanning upward");
  }
  for (int step = 0; step < 60; ++step) {
    double next = std::max(lo * 0.5, lo_range);
    double rn = residual(next);
    if (rn >= 0.0) {
      hi = lo;
      lo = next;
      return find_root_bracketed(residual, Bracket{lo, hi}, rel_tol);
    }
    lo = next;
    hi = next;
    if (next <= lo_range) break;
  }
  throw boundary_error("solve_boundary: no sign change found scanning downward");
}

std::string AdmissibilityReport::summary() const {
  if (pass) return "payoff admissible";
  std::string s = "payoff inadmissible:";
  for (const auto& v : violations) s += " [" + v + "]";
  return s;
}

AdmissibilityReport check_payoff_admissible(const Payoff& payoff) {
  AdmissibilityReport rep;
  const GridFunction& f = payoff.h;
  const LogGrid& g = f.grid();
  const std::vector<double>& v = f.values();
  const int n = g.size();
  const double h = g.h();
  double range = 0.0;
  for (double y : v) range = std::max(range, std::abs(y));
  if (range == 0.0) range = 1.0;

  if (!(payoff.x0 > 0.0 && payoff.x0 < 1.0))
    rep.violations.push_back("x0 not in (0,1)");
  if (!(payoff.b0 > payoff.x0 && payoff.b0 < 1.0 / payoff.x0))
    rep.violations.push_back("b0 not in (x0, 1/x0)");

  double jump_tol = std::max(1e-6, 20.0 * h) * range;
  for (int j = 0; j + 1 < n; ++j)
    if (std::abs(v[j + 1] - v[j]) > jump_tol) {
      rep.violations.push_back("continuity: jump at x = " + std::to_string(g.x(j + 1)));
      break;
    }

  // shape tolerances sized for sampled/file-grade inputs
  double flat_tol = 1e-6 * range;
  bool flat0 = true, flat1 = true;
  for (int j = 0; j < n; ++j) {
    if (g.x(j) <= payoff.x0 * (1.0 + 1e-12) && std::abs(v[j]) > flat_tol) flat0 = false;
    if (g.x(j) >= (1.0 / payoff.x0) * (1.0 - 1e-12) && std::abs(v[j] - 1.0) > flat_tol)
      flat1 = false;
  }
  if (!flat0) rep.violations.push_back("not identically 0 on (0, x0]");
  if (!flat1) rep.violations.push_back("not identically 1 on [1/x0, inf)");

  if (!f.nondecreasing(flat_tol)) rep.violations.push_back("not nondecreasing");

  // x-convexity proxy on the log grid: second difference minus half the
  // centered first difference is h^2 x^2 v'' to leading order
  double slack = 1e-6 * range;
  bool convex_ok = true, concave_ok = true;
  for (int j = 1; j + 1 < n; ++j) {
    double c = (v[j + 1] - 2.0 * v[j] + v[j - 1]) - 0.5 * h * (v[j + 1] - v[j - 1]);
    double x = g.x(j);
    if (x < payoff.b0 * std::exp(-2.0 * h) && c < -slack) convex_ok = false;
    if (x > payoff.b0 * std::exp(2.0 * h) && c > slack) concave_ok = false;
  }
  if (!convex_ok) rep.violations.push_back("not convex on (0, b0)");
  if (!concave_ok) rep.violations.push_back("not concave on (b0, inf)");

  rep.pass = rep.violations.empty();
  return rep;
}

LogGrid make_uvm_grid(const Payoff& payoff, const UvmModel& model, int target_points) {
  double L = std::max(8.0 * model.sigma2 * std::sqrt(model.T), 4.0);
  double lx0 = std::abs(std::log(payoff.x0));
  double span = 2.0 * (L + lx0);
  double h_target = span / (target_points - 1);
  int m = std::max(1, static_cast<int>(std::lround(lx0 / h_target)));
  double h = lx0 / m;
  return LogGrid::aligned(payoff.x0, payoff.x0 * std::exp(-L), std::exp(L) / payoff.x0, h);
}

std::vector<StageFunction> iterate_scheme(const Payoff& payoff, const UvmModel& model,
                                          int grid_points, double boundary_tol) {
  model.validate();
  Exponents e = exponents(model);  // throws for sigma1 = 0
  AdmissibilityReport rep = check_payoff_admissible(payoff);
  if (!rep.pass) throw std::invalid_argument("iterate_scheme: " + rep.summary());

  LogGrid grid = make_uvm_grid(payoff, model, grid_points);
  std::vector<Break> breaks;
  for (double kx : payoff.kinks) {
    int j = grid.segment_of(kx);
    for (int cand : {j, j + 1})
      if (std::abs(std::log(grid.x(cand) / kx)) < 1e-9) breaks.push_back(Break{cand, false});
  }
  std::function<double(double)> sample =
      payoff.sampler ? payoff.sampler : [&](double x) { return payoff.h(x); };
  GridFunction u = GridFunction::sample(grid, sample, TailDescriptor::flat(0.0),
                                        TailDescriptor::flat(1.0), breaks);

  std::vector<StageFunction> stages;
  stages.reserve(static_cast<std::size_t>(model.n));
  double b_prev = payoff.b0;
  for (int k = 1; k <= model.n; ++k) {
    try {
      double b = solve_boundary(u, e, b_prev, boundary_tol);
      StageOperator op(u, e);
      GridFunction next = op.apply(b);
      stages.push_back(StageFunction{next, b, k});
      u = std::move(next);
      b_prev = b;
    } catch (const degenerate_error& ex) {
      throw stage_error(k, ex.what());
    } catch (const boundary_error& ex) {
      throw stage_error(k, ex.what());
    } catch (const bracket_error& ex) {
      throw stage_error(k, ex.what());
    }
  }
  return stages;
}

}  // namespace randhorizon
