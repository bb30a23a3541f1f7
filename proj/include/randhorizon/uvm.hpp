#ifndef RANDHORIZON_UVM_HPP
#define RANDHORIZON_UVM_HPP

#include <functional>
#include <string>
#include <vector>

#include "randhorizon/grid_function.hpp"
#include "randhorizon/power_cumulant.hpp"

namespace randhorizon {

// Volatility band with the stage count of the horizon randomization.
struct UvmModel {
  double sigma1 = 0.0;  // lower volatility bound, >= 0 (0 only on the digital path)
  double sigma2 = 0.0;  // upper volatility bound, > 0
  double T = 0.0;       // horizon in years
  int n = 1;            // number of stages

  double lambda() const { return n / T; }
  void validate() const;
};

// Stage exponents: bounded homogeneous solutions x^gamma of
// (sigma^2/2) x^2 U'' = lambda U on the two convexity branches.
struct Exponents {
  double gamma1 = 0.0;  // < 0, from sigma1
  double gamma2 = 0.0;  // > 1, from sigma2
};

// gamma1 = (1 - sqrt(1 + 8n/(T sigma1^2)))/2, gamma2 = (1 + sqrt(1 + 8n/(T sigma2^2)))/2.
// Throws std::domain_error when sigma1 == 0 (gamma1 undefined; digital path).
Exponents exponents(const UvmModel& model);
double gamma2_exponent(double sigma2, double T, int n);

// Mixing density f(r) of the boundary-value functional: positive, integrates
// to one, discontinuous at r = 1 (r = 1 belongs to the gamma2 branch).
double mixing_density(const Exponents& e, double r);

// One recursion stage: value function plus its convexity-switch boundary.
struct StageFunction {
  GridFunction U;
  double b = 0.0;
  int k = 0;
};

// Payoff satisfying the flat-zero / flat-one / convex-concave shape: 0 on
// (0, x0], 1 on [1/x0, inf), convexity switching at b0.
struct Payoff {
  GridFunction h;
  double x0 = 0.0;
  double b0 = 0.0;
  std::function<double(double)> sampler;  // optional analytic form
  std::vector<double> kinks;              // abscissae where h' or h'' jumps
};

struct AdmissibilityReport {
  bool pass = true;
  std::vector<std::string> violations;
  std::string summary() const;
};

AdmissibilityReport check_payoff_admissible(const Payoff& payoff);

// The stage transform bound to one input function: shared quadrature state
// for the boundary functional, the kernels and the full transform.
class StageOperator {
public:
  StageOperator(const GridFunction& phi, const Exponents& e);

  double beta(double b) const;                      // beta[phi](b)
  double crossing_residual(double b) const;         // beta[phi](b) - phi(b)
  double h_kernel(int i, double y) const;           // H_b^i[phi](y), y = x/b, needs bind_b
  GridFunction apply(double b) const;               // T_b[phi] on phi's grid
  double apply_at(double b, double x) const;        // T_b[phi](x)

  void bind_b(double b) { b_ = b; }
  const GridFunction& phi() const { return *phi_; }
  const Exponents& exps() const { return e_; }

private:
  const GridFunction* phi_;
  Exponents e_;
  ScaledCumulant j2_, j1_;          // scaled inner integrals against u^{gamma-2}
  std::vector<Break> outer_breaks_;  // phi's breakpoints survive as kinks of Jhat
  double c1_, c2_;                   // density branch weights
  double b_ = 1.0;

  // signed scaled outer integral x^gamma int_x^b u^{-gamma-1} Jhat(u) du
  double outer_scaled(const ScaledCumulant& j, double gamma, double b, double x) const;
  friend double h_kernel(const GridFunction&, double, int, double, const Exponents&);
};

// Free-function forms of the operator algebra.
double beta_functional(const GridFunction& phi, double b, const Exponents& e);
double h_kernel(const GridFunction& phi, double b, int i, double y, const Exponents& e);
GridFunction apply_T(const GridFunction& phi, double b, const Exponents& e);
double apply_T_at(const GridFunction& phi, double b, const Exponents& e, double x);

// Unique positive solution of beta[phi](b) = phi(b). The bracket is built by
// a geometric outward scan from b_hint (residual positive near 0, negative
// near infinity). Throws degenerate_error for constant phi, boundary_error
// when the scan finds no sign change.
double solve_boundary(const GridFunction& phi, const Exponents& e, double b_hint,
                      double rel_tol = 1e-10);

// Canonical stage grid: kink-aligned log grid spanning
// [x0 e^-L, e^L / x0], L = max(8 sigma2 sqrt(T), 4).
LogGrid make_uvm_grid(const Payoff& payoff, const UvmModel& model, int target_points = 4001);

// Full recursion: U^0 = h sampled on the stage grid, then n boundary solves
// and transforms. Stage failures abort with the 1-based stage index.
std::vector<StageFunction> iterate_scheme(const Payoff& payoff, const UvmModel& model,
                                          int grid_points = 4001, double boundary_tol = 1e-10);

}  // namespace randhorizon

#endif
