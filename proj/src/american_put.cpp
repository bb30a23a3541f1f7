#include "randhorizon/american_put.hpp"

#include <algorithm>
#include <cmath>

#include "randhorizon/errors.hpp"
#include "randhorizon/normal.hpp"
#include "randhorizon/power_cumulant.hpp"
#include "randhorizon/richardson.hpp"
#include "randhorizon/root_find.hpp"

namespace randhorizon {

void PutModel::validate() const {
  if (!(K > 0.0) || r < 0.0 || !(sigma > 0.0) || !(T > 0.0) || n < 1)
    throw config_error("PutModel: need K, sigma, T > 0, r >= 0, n >= 1");
}

PutExponents put_exponents(double r, double sigma, double rho) {
  double a = 2.0 * r / (sigma * sigma) - 1.0;
  double q = 2.0 * rho / (sigma * sigma);
  double disc = std::sqrt(a * a + 4.0 * q);
  return PutExponents{0.5 * (-a - disc), 0.5 * (-a + disc)};
}

LogGrid make_put_grid(double K, double sigma, double T, int grid_points) {
  double L = std::max(8.0 * sigma * std::sqrt(T), 4.0);
  double h = 2.0 * L / (grid_points - 1);
  return LogGrid::aligned(K, K * std::exp(-L), K * std::exp(L), h);
}

GridFunction put_payoff_on_grid(const LogGrid& grid, double K) {
  std::vector<double> v(static_cast<std::size_t>(grid.size()));
  for (int j = 0; j < grid.size(); ++j)
    v[static_cast<std::size_t>(j)] = std::max(K - grid.x(j), 0.0);
  std::vector<Break> breaks;
  int jk = grid.segment_of(K);
  for (int cand : {jk, jk + 1})
    if (std::abs(std::log(grid.x(cand) / K)) < 1e-9) breaks.push_back(Break{cand, false});
  // below the grid the obstacle is K - x; solve_stage handles that in closed
  // form, the descriptor here only covers direct evaluation
  return GridFunction(grid, std::move(v), TailDescriptor::constant(K - grid.x_min()),
                      TailDescriptor::flat(0.0), breaks);
}

double PutStage::value_at(double x) const {
  if (x < value.grid().x_min()) return strike - x;
  return value(x);
}

namespace {

struct StageContext {
  const GridFunction* u;
  const LogGrid* g;
  double K, C;
  PutExponents th;
  ScaledCumulant upper;  // x^{th+} int_x^inf s^{-th+ - 1} u(s) ds

  // b^{th+} int_b^{xmin} s^{-th+ - 1} (K - s) ds, written in ratio powers so
  // nothing overflows even for boundary probes far below the grid
  double intrinsic_piece(double b) const {
    double thp = th.theta_plus;
    double rho = b / g->x_min();  // < 1
    double rp = std::pow(rho, thp);
    return K * (1.0 - rp) / thp + (b - g->x_min() * rp) / (1.0 - thp);
  }

  // particular solution at the boundary: v_p(b) = C b^{th+} int_b^inf s^{-th+ -1} u
  double P(double b) const {
    if (C == 0.0) return 0.0;
    if (b >= g->x_min()) return C * upper.at(b);
    double rest = std::pow(b / g->x_min(), th.theta_plus) * upper.at_node(0);
    return C * (intrinsic_piece(b) + rest);
  }

  // value matching + smooth fit: v'(b) = -1 for v = B (x/b)^{th-} + v_p
  double residual(double b) const {
    double p = P(b);
    return th.theta_minus * (K - b - p) + th.theta_plus * p + b;
  }
};

}  // namespace

PutStage solve_stage(const GridFunction& u_prev, double K, double r, double sigma,
                     double lambda) {
  const LogGrid& g = u_prev.grid();
  const double rho = r + lambda;
  const PutExponents th = put_exponents(r, sigma, rho);
  const double C =
      lambda > 0.0 ? 2.0 * lambda / (sigma * sigma * (th.theta_plus - th.theta_minus)) : 0.0;
  const double p_plus = -th.theta_plus - 1.0;

  StageContext ctx{&u_prev, &g, K, C, th,
                   ScaledCumulant(g, u_prev.values(), u_prev.breaks(), p_plus,
                                  ScaledCumulant::Anchor::above,
                                  right_tail_scaled_seed(u_prev.right_tail(), g, p_plus))};

  const double eps = 1e-6;
  Bracket bracket{eps * K, (1.0 - eps) * K};
  double rlo = ctx.residual(bracket.lo), rhi = ctx.residual(bracket.hi);
  if (rlo != 0.0 && rhi != 0.0 && (rlo > 0.0) == (rhi > 0.0))
    throw boundary_error("solve_stage: smooth-fit residual has no root in (0, K)");
  double b = bisect_root([&](double x) { return ctx.residual(x); }, bracket, 1e-12);
  double Pb = ctx.P(b);
  double Bcoef = K - b - Pb;  // homogeneous amplitude in (x/b)^{th-} units

  const int n = g.size();
  const double h = g.h();
  std::vector<double> out(static_cast<std::size_t>(n));
  int jb = g.segment_of(b);
  double sb = g.local(jb, b);
  for (int j = 0; j <= jb; ++j) out[static_cast<std::size_t>(j)] = K - g.x(j);

  std::span<const Break> ubreaks(u_prev.breaks());
  const double p_minus = -th.theta_minus - 1.0;
  const double fac = std::exp(th.theta_minus * h);
  double acc = fac * scaled_piece(g, u_prev.values(), ubreaks, jb, sb, 1.0, p_minus);
  for (int j = jb + 1; j < n; ++j) {
    if (j > jb + 1)
      acc = fac * (acc + scaled_piece(g, u_prev.values(), ubreaks, j - 1, 0.0, 1.0, p_minus));
    double homog = Bcoef * std::exp(th.theta_minus * (g.t(j) - std::log(b)));
    double vp = C == 0.0 ? 0.0 : C * (acc + ctx.upper.at_node(j));
    out[static_cast<std::size_t>(j)] = homog + vp;
  }

  TailDescriptor left = TailDescriptor::constant(K - g.x_min());
  TailDescriptor right;  // u(x_max) (x/x_max)^{th-} beyond the grid
  double vN = out[static_cast<std::size_t>(n - 1)];
  if (vN > 0.0) {
    right.sign = 1.0;
    right.log_coef = std::log(vN) - th.theta_minus * g.t(n - 1);
    right.exponent = th.theta_minus;
  }
  double fit_residual = std::abs(ctx.residual(b)) / b;
  return PutStage{GridFunction(g, std::move(out), left, right),
                  b,
                  K,
                  th.theta_minus,
                  th.theta_plus,
                  0,
                  fit_residual};
}

CarrResult carr_price(const PutModel& model, double spot, int grid_points) {
  model.validate();
  LogGrid grid = make_put_grid(model.K, model.sigma, model.T, grid_points);
  GridFunction u = put_payoff_on_grid(grid, model.K);
  CarrResult res;
  res.stages.reserve(static_cast<std::size_t>(model.n));
  for (int k = 1; k <= model.n; ++k) {
    try {
      PutStage stage = solve_stage(u, model.K, model.r, model.sigma, model.lambda());
      stage.k = k;
      u = stage.value;
      res.stages.push_back(std::move(stage));
    } catch (const boundary_error& ex) {
      throw stage_error(k, ex.what());
    } catch (const bracket_error& ex) {
      throw stage_error(k, ex.what());
    }
  }
  res.price = res.stages.back().value_at(spot);
  return res;
}

double carr_richardson(const PutModel& model, double spot, const std::vector<int>& ns,
                       int grid_points) {
  std::vector<std::pair<int, double>> samples;
  samples.reserve(ns.size());
  for (int n : ns) {
    PutModel m = model;
    m.n = n;
    samples.emplace_back(n, carr_price(m, spot, grid_points).price);
  }
  return richardson_extrapolate(samples);
}

double binomial_oracle(double K, double r, double sigma, double T, double spot, int steps) {
  if (steps < 1) throw config_error("binomial_oracle: steps >= 1");
  if (T <= 0.0) return std::max(K - spot, 0.0);
  double dt = T / steps;
  double u = std::exp(sigma * std::sqrt(dt));
  double d = 1.0 / u;
  double grow = std::exp(r * dt);
  double p = (grow - d) / (u - d);
  if (!(p > 0.0 && p < 1.0)) throw config_error("binomial_oracle: degenerate branch probability");
  double disc = 1.0 / grow;
  double pu = disc * p, pd = disc * (1.0 - p);

  // price lattice levels spot * u^k, k in [-steps, steps]
  std::vector<double> level(static_cast<std::size_t>(2 * steps + 1));
  for (int k = -steps; k <= steps; ++k)
    level[static_cast<std::size_t>(k + steps)] = spot * std::exp(sigma * std::sqrt(dt) * k);

  std::vector<double> v(static_cast<std::size_t>(steps + 1));
  for (int i = 0; i <= steps; ++i)
    v[static_cast<std::size_t>(i)] =
        std::max(K - level[static_cast<std::size_t>(2 * i)], 0.0);
  for (int m = steps - 1; m >= 0; --m) {
    for (int i = 0; i <= m; ++i) {
      double cont = pu * v[static_cast<std::size_t>(i + 1)] + pd * v[static_cast<std::size_t>(i)];
      double s = level[static_cast<std::size_t>(2 * i - m + steps)];
      v[static_cast<std::size_t>(i)] = std::max(cont, K - s);
    }
  }
  return v[0];
}

double binomial_oracle_smoothed(double K, double r, double sigma, double T, double spot,
                                int steps) {
  return 0.5 * (binomial_oracle(K, r, sigma, T, spot, steps) +
                binomial_oracle(K, r, sigma, T, spot, steps + 1));
}

double european_put_bs(double K, double r, double sigma, double T, double spot) {
  if (T <= 0.0) return std::max(K - spot, 0.0);
  double s = sigma * std::sqrt(T);
  double d1 = (std::log(spot / K) + (r + 0.5 * sigma * sigma) * T) / s;
  double d2 = d1 - s;
  return K * std::exp(-r * T) * std_normal_cdf(-d2) - spot * std_normal_cdf(-d1);
}

double perpetual_put_boundary(double K, double r, double sigma) {
  double th = -2.0 * r / (sigma * sigma);
  return K * th / (th - 1.0);
}

double perpetual_put_value(double K, double r, double sigma, double spot) {
  double th = -2.0 * r / (sigma * sigma);
  double b = perpetual_put_boundary(K, r, sigma);
  if (spot <= b) return K - spot;
  return (K - b) * std::pow(spot / b, th);
}

}  // namespace randhorizon
