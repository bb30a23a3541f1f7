#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "randhorizon/bounds.hpp"
#include "randhorizon/integrate.hpp"
#include "randhorizon/root_find.hpp"
#include "randhorizon/uvm.hpp"

using namespace randhorizon;

namespace {

GridFunction constant_fn(double c, double lo = std::exp(-5.0), double hi = std::exp(5.0),
                         int pts = 2001) {
  LogGrid g(lo, hi, pts);
  std::vector<double> v(static_cast<std::size_t>(pts), c);
  return GridFunction(g, std::move(v), TailDescriptor::constant(c), TailDescriptor::constant(c));
}

// indicator 1_{x >= 1} with the jump on a node
GridFunction step_fn(int pts_per_unit = 400) {
  LogGrid g = LogGrid::aligned(1.0, std::exp(-5.0), std::exp(5.0), 1.0 / pts_per_unit);
  std::vector<double> v(static_cast<std::size_t>(g.size()));
  int j1 = -1;
  for (int j = 0; j < g.size(); ++j) {
    v[static_cast<std::size_t>(j)] = g.x(j) >= 1.0 - 1e-12 ? 1.0 : 0.0;
    if (j1 < 0 && g.x(j) >= 1.0 - 1e-12) j1 = j;
  }
  return GridFunction(g, std::move(v), TailDescriptor::flat(0.0), TailDescriptor::flat(1.0),
                      {Break{j1, true}});
}

const UvmModel kModel{0.3, 0.6, 1.0, 3};

GridFunction sample_on_stage_grid(const Payoff& p, const UvmModel& m, int pts) {
  LogGrid grid = make_uvm_grid(p, m, pts);
  std::vector<Break> breaks;
  for (double kx : p.kinks) {
    int j = grid.segment_of(kx);
    for (int cand : {j, j + 1})
      if (std::abs(std::log(grid.x(cand) / kx)) < 1e-9) breaks.push_back(Break{cand, false});
  }
  return GridFunction::sample(grid, p.sampler, TailDescriptor::flat(0.0),
                              TailDescriptor::flat(1.0), breaks);
}

}  // namespace

TEST_CASE("exponents closed form") {
  Exponents e = exponents(UvmModel{0.1, 0.2, 0.5, 10});
  CHECK(e.gamma2 == doctest::Approx(0.5 * (1.0 + std::sqrt(4001.0))).epsilon(1e-14));
  CHECK(e.gamma2 == doctest::Approx(32.1267).epsilon(1e-4));

  SUBCASE("both roots satisfy the defining quadratic") {
    UvmModel m{0.25, 0.45, 2.0, 7};
    Exponents ee = exponents(m);
    double lam = m.lambda();
    CHECK(0.5 * m.sigma1 * m.sigma1 * ee.gamma1 * (ee.gamma1 - 1.0) ==
          doctest::Approx(lam).epsilon(1e-12));
    CHECK(0.5 * m.sigma2 * m.sigma2 * ee.gamma2 * (ee.gamma2 - 1.0) ==
          doctest::Approx(lam).epsilon(1e-12));
    CHECK(ee.gamma1 < 0.0);
    CHECK(ee.gamma2 > 1.0);
    CHECK(ee.gamma2 < 1.0 - ee.gamma1);
  }

  SUBCASE("only n/T enters") {
    Exponents a = exponents(UvmModel{0.2, 0.4, 0.5, 6});
    Exponents b = exponents(UvmModel{0.2, 0.4, 1.0, 12});
    CHECK(a.gamma1 == doctest::Approx(b.gamma1).epsilon(1e-15));
    CHECK(a.gamma2 == doctest::Approx(b.gamma2).epsilon(1e-15));
  }

  CHECK_THROWS_AS(exponents(UvmModel{0.0, 0.4, 1.0, 5}), std::domain_error);
}

TEST_CASE("mixing density") {
  Exponents e = exponents(kModel);

  SUBCASE("integrates to one") {
    auto f = [&](double r) { return mixing_density(e, r); };
    double total = integrate_adaptive(f, 1e-14, 1.0, 1e-12, 1e-15) +
                   integrate_adaptive(f, 1.0, 60.0, 1e-12, 1e-15);
    CHECK(std::abs(total - 1.0) <= 1e-10);
  }

  SUBCASE("positive, with the stated left limit at 1") {
    for (double r : {0.1, 1.0, 10.0}) CHECK(mixing_density(e, r) > 0.0);
    CHECK(mixing_density(e, 1.0) ==
          doctest::Approx(e.gamma2 * (e.gamma2 - 1.0) / (e.gamma2 - e.gamma1)).epsilon(1e-14));
  }
}

TEST_CASE("beta functional") {
  Exponents e = exponents(kModel);

  SUBCASE("constants are fixed points of the average") {
    GridFunction c = constant_fn(0.37);
    for (double b : {0.3, 1.0, 5.0})
      CHECK(beta_functional(c, b, e) == doctest::Approx(0.37).epsilon(1e-12));
  }

  SUBCASE("step payoff closed form below the jump") {
    GridFunction step = step_fn();
    double w = e.gamma1 / (e.gamma1 - e.gamma2);
    for (double b : {0.4, 1.0}) {
      double expect = w * std::pow(b, 1.0 - e.gamma1);
      CHECK(beta_functional(step, b, e) == doctest::Approx(expect).epsilon(1e-8));
    }
  }
}

TEST_CASE("h kernel") {
  Exponents e = exponents(kModel);
  GridFunction c = constant_fn(0.82);

  SUBCASE("vanishes at the anchor") {
    for (int i : {1, 2}) CHECK(h_kernel(c, 1.3, i, 1.0, e) == doctest::Approx(0.0));
  }

  SUBCASE("closed form for constants") {
    for (double y : {1.2, 2.0})
      CHECK(h_kernel(c, 0.8, 1, y, e) ==
            doctest::Approx(0.82 * (std::pow(y, -e.gamma1) - 1.0)).epsilon(1e-10));
    for (double y : {0.5, 0.9})
      CHECK(h_kernel(c, 0.8, 2, y, e) ==
            doctest::Approx(0.82 * (std::pow(y, -e.gamma2) - 1.0)).epsilon(1e-10));
  }

  SUBCASE("stable under grid refinement") {
    Payoff p1 = make_test_payoff(2001);
    Payoff p2 = make_test_payoff(4001);
    double a = h_kernel(p1.h, 1.1, 2, 0.8, e);
    double b = h_kernel(p2.h, 1.1, 2, 0.8, e);
    CHECK(std::abs(a - b) < 1e-6);
  }
}

TEST_CASE("stage transform") {
  Exponents e = exponents(kModel);

  SUBCASE("constants pass through unchanged") {
    for (double c : {0.0, 0.37, 1.0}) {
      GridFunction phi = constant_fn(c, std::exp(-5.0), std::exp(5.0), 1501);
      for (double b : {0.1, 1.0, 10.0}) {
        GridFunction out = apply_T(phi, b, e);
        double worst = 0.0;
        for (double v : out.values()) worst = std::max(worst, std::abs(v - c));
        CHECK(worst <= 1e-8);
      }
    }
  }

  SUBCASE("value and first derivative match across the boundary") {
    Payoff p = make_test_payoff(3001);
    double b = 1.37;  // deliberately off-node
    double delta = 1e-5 * b;
    auto u = [&](double x) { return apply_T_at(p.h, b, e, x); };
    double mid = u(b);
    CHECK(std::abs(u(b + delta) - u(b - delta)) < 1e-4);  // continuity
    // second-order one-sided secants (U'' jumps at b away from the root)
    double d_right = (-3.0 * mid + 4.0 * u(b + delta) - u(b + 2.0 * delta)) / (2.0 * delta);
    double d_left = (3.0 * mid - 4.0 * u(b - delta) + u(b - 2.0 * delta)) / (2.0 * delta);
    CHECK(std::abs(d_right - d_left) <= 1e-6 * std::max(1.0, std::abs(d_left)));
  }

  SUBCASE("digital first stage matches the closed form") {
    GridFunction step = step_fn();
    double beta1 = e.gamma1 / (e.gamma1 - e.gamma2);
    auto closed = [&](double x) {
      return x >= 1.0 ? 1.0 - (1.0 - beta1) * std::pow(x, e.gamma1)
                      : beta1 * std::pow(x, e.gamma2);
    };
    // semi-analytic point evaluation, free of grid interpolation
    for (double x : {0.31, 0.77, 0.999, 1.0, 1.13, 2.9})
      CHECK(apply_T_at(step, 1.0, e, x) == doctest::Approx(closed(x)).epsilon(1e-9));
    // assembled grid values agree at the nodes
    GridFunction u1 = apply_T(step, 1.0, e);
    const LogGrid& g = u1.grid();
    for (int j = 0; j < g.size(); j += 53)
      CHECK(u1.value(j) == doctest::Approx(closed(g.x(j))).epsilon(1e-9));
  }
}

TEST_CASE("solve_boundary") {
  Exponents e = exponents(kModel);

  SUBCASE("constant input is degenerate") {
    GridFunction c = constant_fn(0.4);
    CHECK_THROWS_AS(solve_boundary(c, e, 1.0), degenerate_error);
  }

  SUBCASE("matches an exhaustive sign scan for the test payoff") {
    Payoff p = make_test_payoff(3001);
    double root = solve_boundary(p.h, e, p.b0);
    StageOperator op(p.h, e);

    // 10^4-point scan: locate every sign change of the crossing residual
    int changes = 0;
    double lo = 0.0, hi = 0.0;
    double prev = op.crossing_residual(0.2);
    for (int i = 1; i <= 10000; ++i) {
      double b = 0.2 * std::pow(25.0, i / 10000.0);
      double cur = op.crossing_residual(b);
      if ((cur > 0.0) != (prev > 0.0)) {
        ++changes;
        lo = 0.2 * std::pow(25.0, (i - 1) / 10000.0);
        hi = b;
      }
      prev = cur;
    }
    CHECK(changes == 1);
    double refined = bisect_root([&](double b) { return op.crossing_residual(b); },
                                 Bracket{lo, hi}, 1e-13);
    CHECK(std::abs(root - refined) <= 1e-8 * root);
  }

  SUBCASE("unique root for the digital first stage") {
    GridFunction step = step_fn();
    GridFunction u1 = apply_T(step, 1.0, e);
    double root = solve_boundary(u1, e, 1.0);
    StageOperator op(u1, e);
    int changes = 0;
    double prev = op.crossing_residual(0.2);
    for (int i = 1; i <= 10000; ++i) {
      double b = 0.2 * std::pow(25.0, i / 10000.0);
      double cur = op.crossing_residual(b);
      if ((cur > 0.0) != (prev > 0.0)) ++changes;
      prev = cur;
    }
    CHECK(changes == 1);
    CHECK(op.crossing_residual(root) == doctest::Approx(0.0).epsilon(1e-8));
  }
}

TEST_CASE("payoff admissibility") {
  SUBCASE("test payoff passes") {
    Payoff p = make_test_payoff();
    AdmissibilityReport rep = check_payoff_admissible(p);
    CHECK(rep.pass);
  }

  SUBCASE("digital indicator fails continuity") {
    Payoff p{step_fn(), 0.5, 1.0, nullptr, {}};
    AdmissibilityReport rep = check_payoff_admissible(p);
    CHECK_FALSE(rep.pass);
    bool has_continuity = false;
    for (const auto& v : rep.violations)
      if (v.find("continuity") != std::string::npos) has_continuity = true;
    CHECK(has_continuity);
  }

  SUBCASE("decreasing payoff fails monotonicity") {
    LogGrid g(std::exp(-4.0), std::exp(4.0), 801);
    std::vector<double> v(static_cast<std::size_t>(g.size()));
    for (int j = 0; j < g.size(); ++j)
      v[static_cast<std::size_t>(j)] = 1.0 - test_payoff_value(g.x(j));
    Payoff p{GridFunction(g, std::move(v), TailDescriptor::flat(1.0), TailDescriptor::flat(0.0)),
             0.5, 1.0, nullptr, {}};
    AdmissibilityReport rep = check_payoff_admissible(p);
    CHECK_FALSE(rep.pass);
    bool has_monotone = false;
    for (const auto& v2 : rep.violations)
      if (v2.find("nondecreasing") != std::string::npos) has_monotone = true;
    CHECK(has_monotone);
  }
}

TEST_CASE("iterate_scheme") {
  UvmModel model{0.2, 0.4, 1.0, 4};
  Payoff payoff = make_test_payoff();
  auto stages = iterate_scheme(payoff, model, 3001);
  REQUIRE(static_cast<int>(stages.size()) == model.n);
  Exponents e = exponents(model);

  SUBCASE("single stage equals boundary solve plus transform") {
    UvmModel one{0.2, 0.4, 1.0, 1};
    auto s1 = iterate_scheme(payoff, one, 3001);
    GridFunction h = sample_on_stage_grid(payoff, one, 3001);
    Exponents e1 = exponents(one);
    double b = solve_boundary(h, e1, payoff.b0);
    CHECK(s1[0].b == doctest::Approx(b).epsilon(1e-12));
    GridFunction u = apply_T(h, b, e1);
    for (int j = 0; j < h.grid().size(); j += 97)
      CHECK(s1[0].U.value(j) == doctest::Approx(u.value(j)).epsilon(1e-12));
  }

  SUBCASE("stage invariants: range, monotonicity, crossing") {
    GridFunction h0 = sample_on_stage_grid(payoff, model, 3001);
    const GridFunction* prev = &h0;
    for (const StageFunction& s : stages) {
      CHECK(s.U.nondecreasing(1e-9));
      for (double v : s.U.values()) {
        CHECK(v >= -1e-12);
        CHECK(v <= 1.0 + 1e-9);
      }
      // single crossing at b_k
      const LogGrid& g = s.U.grid();
      for (int j = 0; j < g.size(); ++j) {
        double lhs = (s.b - g.x(j)) * (s.U.value(j) - (*prev)(g.x(j)));
        CHECK(lhs > -1e-8);
      }
      // crossing value at the solved boundary, via the stage operator
      StageOperator op(*prev, e);
      CHECK(std::abs(op.crossing_residual(s.b)) < 1e-8);
      prev = &s.U;
    }
  }

  SUBCASE("convexity switches at the stage boundary") {
    const double slack = 1e-6;
    for (const StageFunction& s : stages) {
      const LogGrid& g = s.U.grid();
      const auto& v = s.U.values();
      double h = g.h();
      for (int j = 1; j + 1 < g.size(); ++j) {
        double c = (v[j + 1] - 2.0 * v[j] + v[j - 1]) - 0.5 * h * (v[j + 1] - v[j - 1]);
        if (g.x(j) < s.b * std::exp(-2.0 * h)) CHECK(c > -slack);
        if (g.x(j) > s.b * std::exp(2.0 * h)) CHECK(c < slack);
      }
    }
  }

  SUBCASE("stage ODE residual vanishes") {
    UvmModel m2{0.2, 0.4, 1.0, 4};
    double lam = m2.lambda();
    GridFunction h0 = sample_on_stage_grid(payoff, model, 3001);
    const GridFunction* prev = &h0;
    auto sample_prev = [&](double x) { return (*prev)(x); };
    for (const StageFunction& s : stages) {
      const LogGrid& g = s.U.grid();
      const auto& v = s.U.values();
      double h = g.h();
      double worst = 0.0;
      for (int j = 2; j + 2 < g.size(); ++j) {
        if (std::abs(std::log(g.x(j) / s.b)) < 3.0 * h) continue;
        double x2uxx = ((v[j + 1] - 2.0 * v[j] + v[j - 1]) / (h * h)) -
                       (v[j + 1] - v[j - 1]) / (2.0 * h);
        double pos = std::max(x2uxx, 0.0), neg = std::max(-x2uxx, 0.0);
        double res = -0.5 * m2.sigma2 * m2.sigma2 * pos + 0.5 * m2.sigma1 * m2.sigma1 * neg +
                     lam * (v[j] - sample_prev(g.x(j)));
        worst = std::max(worst, std::abs(res));
      }
      CHECK(worst <= 1e-4 * lam);
      prev = &s.U;
    }
  }

  SUBCASE("boundary gradient identities at the solved root") {
    GridFunction h = sample_on_stage_grid(payoff, model, 3001);
    double b = stages[0].b;
    StageOperator op(h, e);
    double eps = 1e-6;
    double fd = (op.beta(b * (1.0 + eps)) - op.beta(b * (1.0 - eps))) / (2.0 * b * eps);

    auto dpayoff = [](double x) {
      if (x <= 0.5 || x >= 2.0) return 0.0;
      if (x <= 1.0) return 4.0 * (x - 0.5);
      return 4.0 * (1.0 / x - 0.5) / (x * x);
    };
    double lower = e.gamma2 * std::pow(b, -e.gamma2) *
                   integrate_adaptive(
                       [&](double r) { return dpayoff(r) * std::pow(r, e.gamma2 - 1.0); }, 0.5,
                       std::min(b, 2.0), 1e-10, 1e-14);
    double upper = -e.gamma1 * std::pow(b, -e.gamma1) *
                   integrate_adaptive(
                       [&](double r) { return dpayoff(r) * std::pow(r, e.gamma1 - 1.0); },
                       std::max(b, 0.5), 2.0, 1e-10, 1e-14);
    CHECK(fd == doctest::Approx(lower).epsilon(1e-5));
    CHECK(fd == doctest::Approx(upper).epsilon(1e-5));
  }

  SUBCASE("rejects sigma1 = 0 and inadmissible payoffs") {
    CHECK_THROWS_AS(iterate_scheme(payoff, UvmModel{0.0, 0.4, 1.0, 2}), std::domain_error);
    Payoff bad{step_fn(), 0.5, 1.0, nullptr, {}};
    CHECK_THROWS_AS(iterate_scheme(bad, model), std::invalid_argument);
  }
}

TEST_CASE("iterate_scheme agrees with the nonlinear PDE oracle at modest n") {
  UvmModel model{0.2, 0.4, 1.0, 25};
  Payoff payoff = make_test_payoff();
  auto stages = iterate_scheme(payoff, model, 2001);
  double mine = stages.back().U(1.0);
  double pde = bsb_fd_oracle(test_payoff_value, model, 1.0, 1501);
  CHECK(std::abs(mine - pde) < 1e-2);
}
