#include "randhorizon/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "randhorizon/errors.hpp"
#include "randhorizon/integrate.hpp"
#include "randhorizon/normal.hpp"
#include "randhorizon/parallel.hpp"

namespace randhorizon {

void ErlangHorizon::validate() const {
  if (n < 1 || !(lambda > 0.0)) throw config_error("ErlangHorizon: need n >= 1, lambda > 0");
}

double erlang_pdf(const ErlangHorizon& h, double z) {
  if (z < 0.0) return 0.0;
  if (z == 0.0) return h.n == 1 ? h.lambda : 0.0;
  double ld = h.n * std::log(h.lambda) + (h.n - 1) * std::log(z) - h.lambda * z -
              std::lgamma(static_cast<double>(h.n));
  return std::exp(ld);
}

double erlang_sample(const ErlangHorizon& h, CounterRng& rng) {
  double z = 0.0;
  for (int j = 0; j < h.n; ++j) z += rng.exponential(h.lambda);
  return z;
}

double erlang_mixture(const std::function<double(double)>& value_of_horizon,
                      const ErlangHorizon& h, double rel_tol) {
  h.validate();
  double T = h.T();
  double sd = T / std::sqrt(static_cast<double>(h.n));
  double zmax = T + 12.0 * sd;
  auto f = [&](double z) { return value_of_horizon(z) * erlang_pdf(h, z); };
  // split around the mode so the adaptive rule sees the concentration
  std::vector<double> cuts{1e-12, std::max(1e-12, T - 8.0 * sd), T,
                           std::min(zmax, T + 8.0 * sd), zmax};
  std::sort(cuts.begin(), cuts.end());
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
    if (cuts[i + 1] > cuts[i])
      acc += integrate_adaptive(f, cuts[i], cuts[i + 1], rel_tol, 1e-14);
  return acc;
}

double erlang_mixture_gauss(const std::function<double(double)>& value_of_horizon,
                            const ErlangHorizon& h, int panels_per_piece) {
  h.validate();
  if (panels_per_piece < 1) throw config_error("erlang_mixture_gauss: panels >= 1");
  static const double gx[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                               0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                               0.9445750230732326, 0.9894009349916499};
  static const double gw[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                               0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                               0.0622535239386479, 0.0271524594117541};
  double T = h.T();
  double sd = T / std::sqrt(static_cast<double>(h.n));
  double zmax = T + 12.0 * sd;
  std::vector<double> edges{0.0, std::max(0.0, T - 8.0 * sd), std::max(0.0, T - 2.0 * sd), T,
                            std::min(zmax, T + 2.0 * sd), std::min(zmax, T + 8.0 * sd), zmax};
  std::sort(edges.begin(), edges.end());
  auto f = [&](double z) { return value_of_horizon(z) * erlang_pdf(h, z); };
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    if (!(edges[i + 1] > edges[i])) continue;
    double w = (edges[i + 1] - edges[i]) / panels_per_piece;
    for (int p = 0; p < panels_per_piece; ++p) {
      double a = edges[i] + p * w;
      double c = a + 0.5 * w, hw = 0.5 * w;
      for (int q = 0; q < 8; ++q)
        acc += hw * gw[q] * (f(c - hw * gx[q]) + f(c + hw * gx[q]));
    }
  }
  return acc;
}

namespace {

McEstimate summarize(const std::vector<double>& vals) {
  double s = 0.0, s2 = 0.0;
  for (double v : vals) s += v;
  double mean = s / vals.size();
  for (double v : vals) s2 += (v - mean) * (v - mean);
  double se = vals.size() > 1 ? std::sqrt(s2 / (static_cast<double>(vals.size()) *
                                                (static_cast<double>(vals.size()) - 1.0)))
                              : 0.0;
  return McEstimate{mean, se, static_cast<int>(vals.size())};
}

}  // namespace

McEstimate mc_digital_lower_bound(const DigitalModel& model, int paths, std::uint64_t seed) {
  model.validate();
  if (paths < 1) throw config_error("mc_digital_lower_bound: paths >= 1");
  if (model.x >= model.K) return McEstimate{1.0, 0.0, paths};
  double m = std::log(model.K / model.x);
  double sig = model.sigma2;
  double mu = -0.5 * sig * sig;
  ErlangHorizon hor{model.n, model.lambda()};
  std::vector<double> vals(static_cast<std::size_t>(paths));
  parallel_for(paths, [&](int i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    double z = erlang_sample(hor, rng);
    double end = mu * z + sig * std::sqrt(z) * rng.normal();
    double u = rng.uniform();
    double mx = 0.5 * (end + std::sqrt(end * end - 2.0 * sig * sig * z * std::log(u)));
    vals[static_cast<std::size_t>(i)] = mx >= m ? 1.0 : 0.0;
  });
  return summarize(vals);
}

McEstimate mc_put_lower_bound(double K, double r, double sigma, double T, int n, double spot,
                              const std::vector<double>& boundaries, int paths,
                              std::uint64_t seed, int substeps_per_stage) {
  if (paths < 1 || n < 1 || static_cast<int>(boundaries.size()) < n)
    throw config_error("mc_put_lower_bound: need paths >= 1 and one boundary per stage");
  const double mu = r - 0.5 * sigma * sigma;
  const double dt = T / (n * static_cast<double>(substeps_per_stage));
  std::vector<double> vals(static_cast<std::size_t>(paths));
  parallel_for(paths, [&](int i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    // stage clocks first, so the path's driving noise is independent of them
    std::vector<double> clocks(static_cast<std::size_t>(n));
    double lambda = n / T;
    double acc = 0.0;
    for (int k = 0; k < n; ++k) {
      acc += rng.exponential(lambda);
      clocks[static_cast<std::size_t>(k)] = acc;
    }
    double y = std::log(spot);
    double t = 0.0;
    int consumed = 0;  // clocks elapsed; n - consumed stages remain
    double payoff = -1.0;
    while (payoff < 0.0) {
      int rem = n - consumed;
      double barrier = std::log(boundaries[static_cast<std::size_t>(rem - 1)]);
      if (y <= barrier) {  // exercise immediately at the stage switch
        payoff = std::exp(-r * t) * std::max(K - std::exp(y), 0.0);
        break;
      }
      double t_stage_end = clocks[consumed];
      bool stage_done = false;
      while (!stage_done) {
        double step = std::min(dt, t_stage_end - t);
        if (step <= 0.0) { stage_done = true; break; }
        double y2 = y + mu * step + sigma * std::sqrt(step) * rng.normal();
        bool crossed = y2 <= barrier;
        if (!crossed && y > barrier) {
          double p = std::exp(-2.0 * (y - barrier) * (y2 - barrier) / (sigma * sigma * step));
          crossed = rng.uniform() < p;
        }
        if (crossed) {
          // stop at the barrier level, mid-step time
          payoff = std::exp(-r * (t + 0.5 * step)) * std::max(K - std::exp(barrier), 0.0);
          break;
        }
        t += step;
        y = y2;
        if (t >= t_stage_end - 1e-15) stage_done = true;
      }
      if (payoff >= 0.0) break;
      ++consumed;
      if (consumed == n) {  // horizon reached: collect the terminal payoff
        payoff = std::exp(-r * t) * std::max(K - std::exp(y), 0.0);
      }
    }
    vals[static_cast<std::size_t>(i)] = payoff;
  });
  return summarize(vals);
}

McEstimate mc_put_stage_value(const GridFunction& u_prev, double K, double r, double sigma,
                              double lambda, double b, double spot, int paths,
                              std::uint64_t seed, double dt) {
  if (paths < 1) throw config_error("mc_put_stage_value: paths >= 1");
  const double rho = r + lambda;
  const double mu = r - 0.5 * sigma * sigma;
  const double t_max = 40.0 / rho;
  const double barrier = std::log(b);
  const double xmin = u_prev.grid().x_min();
  auto u_at = [&](double x) { return x < xmin ? K - x : u_prev(x); };
  std::vector<double> vals(static_cast<std::size_t>(paths));
  parallel_for(paths, [&](int i) {
    CounterRng rng(seed, static_cast<std::uint64_t>(i));
    double y = std::log(spot);
    double t = 0.0;
    double acc = 0.0;
    double reward = lambda * u_at(std::exp(y));
    double out = 0.0;
    while (t < t_max) {
      double step = std::min(dt, t_max - t);
      double y2 = y + mu * step + sigma * std::sqrt(step) * rng.normal();
      bool crossed = y2 <= barrier;
      if (!crossed && y > barrier) {
        double p = std::exp(-2.0 * (y - barrier) * (y2 - barrier) / (sigma * sigma * step));
        crossed = rng.uniform() < p;
      }
      if (crossed) {
        double tau = t + 0.5 * step;
        acc += std::exp(-rho * t) * reward * 0.5 * step;  // half-step of running reward
        out = acc + std::exp(-rho * tau) * (K - b);
        break;
      }
      double reward2 = lambda * u_at(std::exp(y2));
      acc += 0.5 * (std::exp(-rho * t) * reward + std::exp(-rho * (t + step)) * reward2) * step;
      t += step;
      y = y2;
      reward = reward2;
      out = acc;  // horizon value if the loop ends without crossing
    }
    vals[static_cast<std::size_t>(i)] = out;
  });
  return summarize(vals);
}

double bsb_fd_oracle(const std::function<double(double)>& payoff, const UvmModel& model,
                     double spot, int space_nodes, double cfl) {
  model.validate();
  if (!(cfl > 0.0 && cfl < 1.0))
    throw cfl_error("bsb_fd_oracle: CFL factor must lie in (0, 1)");
  if (space_nodes < 11) throw config_error("bsb_fd_oracle: too few space nodes");
  if (space_nodes % 2 == 0) ++space_nodes;  // keep the spot on a node

  const double W = std::max(8.0 * model.sigma2 * std::sqrt(model.T), 4.0) + 1.0;
  const double y0 = std::log(spot);
  const double h = 2.0 * W / (space_nodes - 1);
  const double s1 = model.sigma1 * model.sigma1, s2 = model.sigma2 * model.sigma2;
  double dt = cfl * h * h / s2;
  int steps = static_cast<int>(std::ceil(model.T / dt));
  dt = model.T / steps;
  if (dt * s2 / (h * h) >= 1.0) throw cfl_error("bsb_fd_oracle: CFL violation");

  // cell-averaged terminal condition (5-point Gauss-Legendre per cell)
  static const double gl_x[5] = {-0.906179845938664, -0.538469310105683, 0.0,
                                 0.538469310105683, 0.906179845938664};
  static const double gl_w[5] = {0.236926885056189, 0.478628670499366, 0.568888888888889,
                                 0.478628670499366, 0.236926885056189};
  std::vector<double> v(static_cast<std::size_t>(space_nodes));
  for (int j = 0; j < space_nodes; ++j) {
    double yj = y0 + (j - (space_nodes - 1) / 2) * h;
    double acc = 0.0;
    for (int q = 0; q < 5; ++q) acc += gl_w[q] * payoff(std::exp(yj + 0.5 * h * gl_x[q]));
    v[static_cast<std::size_t>(j)] = 0.5 * acc;
  }

  std::vector<double> next(v.size());
  for (int m = 0; m < steps; ++m) {
    next.front() = v.front();
    next.back() = v.back();
    for (int j = 1; j + 1 < space_nodes; ++j) {
      double vyy = (v[j + 1] - 2.0 * v[j] + v[j - 1]) / (h * h);
      double vy = (v[j + 1] - v[j - 1]) / (2.0 * h);
      double curv = vyy - vy;  // x^2 v_xx in log coordinates
      double s = curv >= 0.0 ? s2 : s1;
      next[static_cast<std::size_t>(j)] = v[j] + 0.5 * dt * s * curv;
    }
    v.swap(next);
  }
  return v[static_cast<std::size_t>((space_nodes - 1) / 2)];
}

RateFit convergence_diagnostic(const std::vector<std::pair<int, double>>& values, double exact) {
  if (values.size() < 3)
    throw std::invalid_argument("convergence_diagnostic: need at least 3 values");
  if (!std::isfinite(exact))
    throw std::invalid_argument("convergence_diagnostic: exact value must be finite");
  std::vector<std::pair<int, double>> pts = values;
  std::sort(pts.begin(), pts.end());
  RateFit fit;
  std::vector<double> lx, ly;
  double prev_err = std::numeric_limits<double>::infinity();
  fit.monotone = true;
  for (auto& [n, v] : pts) {
    double e = std::abs(v - exact);
    if (e > prev_err * (1.0 + 1e-12)) fit.monotone = false;
    prev_err = e;
    if (e < 1e-300) {
      fit.excluded_n.push_back(n);
      continue;
    }
    fit.used_n.push_back(n);
    lx.push_back(std::log(static_cast<double>(n)));
    ly.push_back(std::log(e));
  }
  if (lx.size() >= 2) {
    double sw = lx.size(), sx = 0, sxx = 0, sy = 0, sxy = 0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
      sx += lx[i];
      sxx += lx[i] * lx[i];
      sy += ly[i];
      sxy += lx[i] * ly[i];
    }
    fit.order = -(sw * sxy - sx * sy) / (sw * sxx - sx * sx);
  }
  return fit;
}

double test_payoff_value(double x) {
  if (x <= 0.5) return 0.0;
  if (x <= 1.0) return 2.0 * (x - 0.5) * (x - 0.5);
  if (x <= 2.0) return 1.0 - 2.0 * (1.0 / x - 0.5) * (1.0 / x - 0.5);
  return 1.0;
}

Payoff make_test_payoff(int grid_points) {
  double span = 10.0 + 2.0 * std::log(2.0);
  double h_target = span / (grid_points - 1);
  int m = std::max(1, static_cast<int>(std::lround(std::log(2.0) / h_target)));
  double h = std::log(2.0) / m;
  LogGrid grid = LogGrid::aligned(0.5, std::exp(-5.0) * 0.5, std::exp(5.0) * 2.0, h);
  std::vector<Break> breaks;
  for (double kx : {0.5, 1.0, 2.0}) {
    int j = grid.segment_of(kx);
    for (int cand : {j, j + 1})
      if (std::abs(std::log(grid.x(cand) / kx)) < 1e-9) breaks.push_back(Break{cand, false});
  }
  GridFunction h_fun = GridFunction::sample(grid, test_payoff_value, TailDescriptor::flat(0.0),
                                            TailDescriptor::flat(1.0), breaks);
  return Payoff{std::move(h_fun), 0.5, 1.0, test_payoff_value, {0.5, 1.0, 2.0}};
}

double lognormal_partial_moment(double spot, double sigma, double T, double m, double a) {
  double s2 = sigma * sigma * T;
  double s = std::sqrt(s2);
  double mu = std::log(spot) - 0.5 * s2;
  return std::exp(m * mu + 0.5 * m * m * s2) * std_normal_cdf((mu + m * s2 - std::log(a)) / s);
}

double test_payoff_bs_value(double sigma, double T, double spot) {
  auto band = [&](double m, double a, double b) {
    return lognormal_partial_moment(spot, sigma, T, m, a) -
           lognormal_partial_moment(spot, sigma, T, m, b);
  };
  double quad_lo = band(2.0, 0.5, 1.0) - band(1.0, 0.5, 1.0) + 0.25 * band(0.0, 0.5, 1.0);
  double quad_hi = band(-2.0, 1.0, 2.0) - band(-1.0, 1.0, 2.0) + 0.25 * band(0.0, 1.0, 2.0);
  double mid = band(0.0, 1.0, 2.0);
  double tail = lognormal_partial_moment(spot, sigma, T, 0.0, 2.0);
  return 2.0 * quad_lo + mid - 2.0 * quad_hi + tail;
}

}  // namespace randhorizon
