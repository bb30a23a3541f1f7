#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "randhorizon/bounds.hpp"
#include "randhorizon/digital.hpp"
#include "randhorizon/normal.hpp"

using namespace randhorizon;

TEST_CASE("exact digital value") {
  CHECK(std::abs(exact_digital_value(100, 95, 0.2, 0.5) - 0.6982) < 1e-4);
  CHECK(exact_digital_value(100, 100, 0.2, 0.5) == 1.0);
  CHECK(exact_digital_value(100, 130, 0.2, 0.5) == 1.0);
  CHECK(std::abs(exact_digital_value(100, 50, 0.4, 1.0) - 0.057954) < 1e-5);

  SUBCASE("closed form matches the density-integral representation") {
    for (double x : {30.0, 50.0, 80.0, 95.0, 99.9}) {
      double a = exact_digital_value(100, x, 0.4, 1.0);
      double b = exact_digital_value_quadrature(100, x, 0.4, 1.0);
      CHECK(a == doctest::Approx(b).epsilon(1e-8));
    }
    double a = exact_digital_value(100, 95, 0.2, 0.5);
    double b = exact_digital_value_quadrature(100, 95, 0.2, 0.5);
    CHECK(a == doctest::Approx(b).epsilon(1e-8));
  }
}

TEST_CASE("digital recursion") {
  DigitalModel model{100, 95, 0.2, 0.5, 10};
  auto stages = digital_iterate(model);
  REQUIRE(static_cast<int>(stages.size()) == model.n);

  SUBCASE("unit value at and above the strike, at every stage") {
    for (const GridFunction& v : stages) {
      CHECK(v(100.0) == doctest::Approx(1.0).epsilon(1e-12));
      CHECK(v(155.0) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }

  SUBCASE("published value at n = 10") {
    CHECK(std::abs(stages.back()(95.0) - 0.6884) <= 2e-4);
    CHECK(digital_value(model) == doctest::Approx(stages.back()(95.0)).epsilon(1e-12));
  }

  SUBCASE("monotone in spot and in stage, bounded in [0,1]") {
    const GridFunction* prev = nullptr;
    for (const GridFunction& v : stages) {
      CHECK(v.nondecreasing(1e-12));
      for (double y : v.values()) {
        CHECK(y >= 0.0);
        CHECK(y <= 1.0 + 1e-12);
      }
      if (prev)
        for (int j = 0; j < v.grid().size(); ++j)
          CHECK(v.value(j) >= prev->value(j) - 1e-9);
      prev = &v;
    }
  }
}

TEST_CASE("erlang mixture identity at small n") {
  // the digital optimal control ignores the horizon, so both sandwich bounds
  // coincide with the randomized value
  for (int n : {5, 10}) {
    for (double x : {80.0, 95.0}) {
      DigitalModel m{100, x, 0.4, 1.0, n};
      double iterated = digital_value(m);
      ErlangHorizon h{n, m.lambda()};
      double mixed = erlang_mixture(
          [&](double z) { return exact_digital_value(m.K, m.x, m.sigma2, z); }, h);
      CHECK(std::abs(iterated - mixed) <= 1e-4);
    }
  }
}

TEST_CASE("convergence toward the exact value") {
  double exact = exact_digital_value(100, 95, 0.2, 0.5);
  std::vector<std::pair<int, double>> values;
  for (int n : {10, 50, 200}) {
    DigitalModel m{100, 95, 0.2, 0.5, n};
    values.emplace_back(n, digital_value(m));
  }
  double e_prev = 1.0;
  for (auto& [n, v] : values) {
    double e = std::abs(v - exact);
    CHECK(e < e_prev);
    e_prev = e;
  }
  RateFit fit = convergence_diagnostic(values, exact);
  CHECK(fit.monotone);
  CHECK(fit.order >= 0.8);
}

TEST_CASE("table 2 row and the inconsistent x = 80 entry") {
  auto cells = reproduce_tables(2);
  int accepted = 0;
  for (const TableCell& c : cells) {
    if (c.informational) {
      // printed row matches the T = 0.1 reading, not the header's T = 1
      if (c.T == 0.1) CHECK(std::abs(c.value - c.printed) < 2e-4);
      if (c.T == 1.0) CHECK(c.value > 0.5);
      continue;
    }
    ++accepted;
    CHECK(std::abs(c.value - c.printed) <= 1e-5);
  }
  CHECK(accepted == 5);
}
