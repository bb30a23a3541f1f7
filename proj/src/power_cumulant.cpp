#include "randhorizon/power_cumulant.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace randhorizon {

void exp_moments(double q, double w, double* out, int count) {
  if (std::abs(q * w) < 0.9) {
    for (int m = 0; m < count; ++m) {
      double term = std::pow(w, m + 1) / (m + 1);
      double sum = term;
      for (int i = 1; i < 48; ++i) {
        term *= (-q * w) * (m + i) / (static_cast<double>(i) * (m + i + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
      }
      out[m] = sum;
    }
    return;
  }
  double ew = std::exp(-q * w);
  out[0] = (1.0 - ew) / q;
  double wm = 1.0;
  for (int m = 1; m < count; ++m) {
    wm *= w;
    out[m] = (m * out[m - 1] - wm * ew) / q;
  }
}

namespace {

constexpr int kMaxStencil = 6;

// Monomial coefficients (in sigma = (t - t_j)/h) of the interpolant through
// nodes [lo..hi] (indices relative to j). Newton form expanded in place.
int window_coeffs(std::span<const double> f, int j, int lo, int hi, double* c) {
  int m = hi - lo + 1;
  double dd[kMaxStencil], pos[kMaxStencil];
  for (int i = 0; i < m; ++i) {
    pos[i] = lo + i;
    dd[i] = f[static_cast<std::size_t>(j + lo + i)];
  }
  for (int k = 1; k < m; ++k)
    for (int i = m - 1; i >= k; --i) dd[i] = (dd[i] - dd[i - 1]) / (pos[i] - pos[i - k]);
  for (int i = 0; i < kMaxStencil; ++i) c[i] = 0.0;
  c[0] = dd[m - 1];
  int deg = 0;
  for (int k = m - 2; k >= 0; --k) {
    for (int i = deg + 1; i >= 1; --i) c[i] = c[i - 1] - pos[k] * c[i];
    c[0] = dd[k] - pos[k] * c[0];
    ++deg;
  }
  return m - 1;
}

// Stencil window for segment [j, j+1], clipped at breakpoints. A jump node's
// stored value is the right limit, so windows of segments left of it stop one
// node short.
void select_window(int j, int n, std::span<const Break> breaks, int& lo, int& hi) {
  int lb = 0, ub = n - 1;
  for (const Break& b : breaks) {
    if (b.node <= j) lb = std::max(lb, b.node);
    if (b.node >= j + 1) ub = std::min(ub, b.jump ? b.node - 1 : b.node);
  }
  lo = std::max(j - 2, lb);
  hi = std::min(j + 3, ub);
  while (hi - lo + 1 < kMaxStencil && (lo > lb || hi < ub)) {
    if (lo > lb && (j - lo <= hi - j - 1 || hi >= ub))
      --lo;
    else
      ++hi;
  }
}

}  // namespace

double scaled_piece(const LogGrid& g, std::span<const double> f, std::span<const Break> breaks,
                    int j, double s0, double s1, double p) {
  if (s1 <= s0) return 0.0;
  int lo, hi;
  select_window(j, g.size(), breaks, lo, hi);
  double c[kMaxStencil];
  int deg = window_coeffs(f, j, lo - j, hi - j, c);

  const double h = g.h();
  const double q = -(p + 1.0) * h;
  double d[kMaxStencil];
  if (s0 > 0.0) {
    // shift the polynomial: psi(s0 + s) = sum_k d_k s^k
    for (int k = 0; k <= deg; ++k) {
      double acc = 0.0, binom = 1.0, pw = 1.0;
      for (int m = k; m <= deg; ++m) {
        acc += c[m] * binom * pw;
        binom = binom * (m + 1) / (m + 1 - k);
        pw *= s0;
      }
      d[k] = acc;
    }
  } else {
    for (int k = 0; k <= deg; ++k) d[k] = c[k];
  }

  double E[kMaxStencil];
  exp_moments(q, s1 - s0, E, deg + 1);
  double sum = 0.0;
  for (int m = 0; m <= deg; ++m) sum += d[m] * E[m];
  return h * std::exp((p + 1.0) * h * s0) * sum;
}

namespace {

// sum_i (-1)^i (delta)_i t^{delta-i} / w^{i+1} — the polynomial-in-ln-x part
// of the antiderivative of x^{w-1} (ln x)^delta.
double log_poly_factor(double t, double w, int delta) {
  double sum = 0.0;
  double fall = 1.0;
  double sign = 1.0;
  double winv = 1.0 / w;
  double wpow = winv;
  for (int i = 0; i <= delta; ++i) {
    sum += sign * fall * std::pow(t, delta - i) * wpow;
    fall *= (delta - i);
    sign = -sign;
    wpow *= winv;
  }
  return sum;
}

double tail_power_at(const TailDescriptor& tail, double t) {
  // a x^g without the log factor, evaluated safely
  double e = tail.log_coef + tail.exponent * t;
  if (e < -745.0) return 0.0;
  return tail.sign * std::exp(e);
}

}  // namespace

double left_tail_scaled_seed(const TailDescriptor& tail, const LogGrid& g, double p) {
  double seed = 0.0;
  double t0 = g.t(0);
  if (tail.offset != 0.0) {
    if (!(p + 1.0 > 0.0))
      throw std::domain_error("left tail offset not integrable against u^p near 0");
    seed += tail.offset / (p + 1.0);
  }
  if (tail.sign != 0.0) {
    double w = tail.exponent + p + 1.0;
    if (!(w > 0.0)) throw std::domain_error("left tail power not integrable near 0");
    seed += tail_power_at(tail, t0) * log_poly_factor(t0, w, tail.log_power);
  }
  return seed;
}

double right_tail_scaled_seed(const TailDescriptor& tail, const LogGrid& g, double p) {
  double seed = 0.0;
  double tn = g.t(g.size() - 1);
  if (tail.offset != 0.0) {
    if (!(p + 1.0 < 0.0))
      throw std::domain_error("right tail offset not integrable against u^p at infinity");
    seed += tail.offset / (-(p + 1.0));
  }
  if (tail.sign != 0.0) {
    double w = tail.exponent + p + 1.0;
    if (!(w < 0.0)) throw std::domain_error("right tail power not integrable at infinity");
    seed -= tail_power_at(tail, tn) * log_poly_factor(tn, w, tail.log_power);
  }
  return seed;
}

ScaledCumulant::ScaledCumulant(const LogGrid& g, std::span<const double> f,
                               std::span<const Break> breaks, double p, Anchor anchor,
                               double seed)
    : g_(&g), f_(f), breaks_(breaks), p_(p), anchor_(anchor) {
  const int n = g.size();
  s_.resize(static_cast<std::size_t>(n));
  const double h = g.h();
  if (anchor == Anchor::below) {
    double fac = std::exp(-(p + 1.0) * h);
    s_[0] = seed;
    for (int j = 0; j + 1 < n; ++j)
      s_[j + 1] = fac * (s_[j] + scaled_piece(g, f, breaks, j, 0.0, 1.0, p));
  } else {
    double fac = std::exp((p + 1.0) * h);
    s_[n - 1] = seed;
    for (int j = n - 2; j >= 0; --j)
      s_[j] = fac * s_[j + 1] + scaled_piece(g, f, breaks, j, 0.0, 1.0, p);
  }
}

ScaledCumulant ScaledCumulant::of(const GridFunction& f, double p, Anchor anchor) {
  double seed = anchor == Anchor::below ? left_tail_scaled_seed(f.left_tail(), f.grid(), p)
                                        : right_tail_scaled_seed(f.right_tail(), f.grid(), p);
  return ScaledCumulant(f.grid(), f.values(), f.breaks(), p, anchor, seed);
}

double ScaledCumulant::at(double x) const {
  if (!g_->inside(x)) throw config_error("ScaledCumulant::at: point outside grid");
  int j = g_->segment_of(x);
  double s = g_->local(j, x);
  const double h = g_->h();
  if (anchor_ == Anchor::below) {
    double piece = scaled_piece(*g_, f_, breaks_, j, 0.0, s, p_);
    return std::exp(-(p_ + 1.0) * h * s) * (at_node(j) + piece);
  }
  double piece = scaled_piece(*g_, f_, breaks_, j, s, 1.0, p_);
  return std::exp((p_ + 1.0) * h * (1.0 - s)) * at_node(j + 1) +
         std::exp(-(p_ + 1.0) * h * s) * piece;
}

}  // namespace randhorizon
