#include <cmath>
#include <random>

#include "doctest.h"
#include "isa/oracle.hpp"
#include "isa/problem_io.hpp"

using namespace isa;

TEST_CASE("sampled range hits corner extrema") {
  const Expr f = parse("x1 + x2");
  const Box X{Interval(0, 1), Interval(0, 1)};
  for (int k : {2, 5, 50}) {
    const SampledRange r = sampled_range(f, X, k);
    CHECK(r.interval == Interval(0, 2));
  }
}

TEST_CASE("sampled range under-approximates interior extrema") {
  const Expr f = parse("x1*x1");
  const SampledRange r = sampled_range(f, Box{Interval(-1, 1)}, 3);
  CHECK(r.interval == Interval(0, 1));  // grid {-1, 0, 1}
}

TEST_CASE("parallel and serial sampling agree bitwise") {
  const Expr f = parse("exp(sin(x1)+sin(x2)*cos(x2))");
  const Box X{Interval(0, 1), Interval(0, 20)};
  const SampledRange a = sampled_range(f, X, 173);
  const SampledRange b = sampled_range_serial(f, X, 173);
  CHECK(a.interval == b.interval);
}

TEST_CASE("sampling propagates domain violations") {
  const Expr f = parse("log(x1)");
  CHECK_THROWS_AS((void)sampled_range(f, Box{Interval(-1, 1)}, 11), DomainViolation);
  CHECK_THROWS_AS((void)sampled_range(f, Box{Interval(1, 2)}, 1), std::invalid_argument);
}

TEST_CASE("cell enumeration classifies every cell") {
  const Expr f = parse("x1^3 + x2^3");
  const Grid g(Box{Interval(-3, 3), Interval(-3, 3)}, 20);
  const IsmVector models = ism_of_expr(f, g);
  const std::vector<Measurement> ms{{0, Interval(-2, 2)}};
  const CellClassification cc = enumerate_cells(models, ms);
  CHECK(cc.cells.size() == 400);

  std::size_t interior = 0, excluded = 0, indeterminate = 0;
  for (const BoxClass c : cc.cells) {
    interior += c == BoxClass::Interior;
    excluded += c == BoxClass::Excluded;
    indeterminate += c == BoxClass::Indeterminate;
  }
  CHECK(interior > 0);
  CHECK(excluded > 0);
  CHECK(indeterminate > 0);
  CHECK(interior + excluded + indeterminate == 400);

  // parallel kernel matches the serial reference
  CHECK(cc.cells == enumerate_cells_serial(models, ms).cells);

  // spot-check against direct cell sums
  std::vector<int> cell{10, 10};
  const Interval sum = ism_cell(models[0], cell);
  if (cc.at(cell) == BoxClass::Interior) CHECK(is_subset(sum, ms[0].band));
}

TEST_CASE("cell enumeration marks everything excluded for unreachable bands") {
  const Expr f = parse("x1 + x2");
  const Grid g(Box{Interval(0, 1), Interval(0, 1)}, 5);
  const CellClassification cc =
      enumerate_cells(ism_of_expr(f, g), {{0, Interval(10, 11)}});
  for (const BoxClass c : cc.cells) CHECK(c == BoxClass::Excluded);
}

TEST_CASE("cell enumeration refuses oversized grids") {
  const Expr f = parse("x1 + x2 + x3");
  const Grid g(Box{Interval(0, 1), Interval(0, 1), Interval(0, 1)}, 200);
  CHECK_THROWS_AS((void)enumerate_cells(ism_of_expr(f, g), {{0, Interval(0, 3)}}, 1000000),
                  CapExceeded);
}

TEST_CASE("kinetics with zero rates stays at zero output") {
  for (double t : {0.5, 1.0, 5.0, 15.0})
    CHECK(integrate_kinetics({0, 0, 0}, t, 200) == 0.0);
}

TEST_CASE("RK4 and the closed form validate each other") {
  const std::array<double, 3> x{0.6, 0.15, 0.35};
  CHECK(std::fabs(integrate_kinetics(x, 2.0, 10000) - closed_form_output(x, 2.0)) <=
        1e-6);

  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> rate(0.01, 1.0), time(0.0, 15.0);
  for (int rep = 0; rep < 100; ++rep) {
    const std::array<double, 3> xr{rate(rng), rate(rng), rate(rng)};
    const double t = time(rng);
    CHECK(std::fabs(integrate_kinetics(xr, t, 10000) - closed_form_output(xr, t)) <=
          1e-6);
  }
}

TEST_CASE("total mass decays when the outflow rate is positive") {
  const std::array<double, 3> x{0.6, 0.15, 0.35};
  double last = 2.0;
  for (int k = 1; k <= 15; ++k) {
    const auto z = integrate_kinetics_states(x, (double)k, 2000);
    const double mass = z[0] + z[1];
    CHECK(mass < last);
    CHECK(mass <= 1.0 + 1e-12);
    last = mass;
  }
}

TEST_CASE("closed form edge cases") {
  CHECK(closed_form_output({0.0, 0.3, 0.4}, 5.0) == 0.0);
  CHECK(closed_form_output({0.6, 0.15, 0.35}, 0.0) == 0.0);
  // continuity across the sigma -> 0 branch
  const double near = closed_form_output({1e-12, 0.3, 0.3}, 2.0);
  const double at = closed_form_output({0.0, 0.3, 0.3}, 2.0);
  CHECK(std::fabs(near - at) <= 1e-11);
}

TEST_CASE("discriminant identity: sigma^2 = rho^2 - 4 x2 x3") {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> rate(0.01, 1.0);
  for (int rep = 0; rep < 1000; ++rep) {
    const double x1 = rate(rng), x2 = rate(rng), x3 = rate(rng);
    const double rho = x1 + x2 + x3;
    const double lhs = rho * rho - 4 * x2 * x3;
    const double rhs =
        x1 * x1 + x2 * x2 + x3 * x3 + 2 * x1 * x2 + 2 * x1 * x3 - 2 * x2 * x3;
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-12));
  }
}

TEST_CASE("significant-digit rounding") {
  CHECK(round_to_significant(0.482241105755, 3) == 0.482);
  CHECK(round_to_significant(0.482241105755, 2) == 0.48);
  CHECK(round_to_significant(0.3607750052, 3) == 0.361);
  CHECK(round_to_significant(12345.0, 2) == 12000.0);
  CHECK(round_to_significant(0.00099173, 2) == 0.00099);
  CHECK(round_to_significant(-0.482241, 3) == -0.482);
  CHECK(round_to_significant(0.0, 3) == 0.0);
  // half-even at an exactly representable tie
  CHECK(round_to_significant(0.125, 2) == 0.12);
}

TEST_CASE("sampled range nests inside model enclosures") {
  const Expr f = parse("exp(sin(x1)+sin(x2)*cos(x2))");
  const Box X{Interval(0, 1), Interval(0, 10)};
  const SampledRange sr = sampled_range(f, X, 100);
  const Interval natural = f.eval_interval(X)[0];
  CHECK(is_subset(sr.interval, natural));
  for (int N : {1, 5, 25}) {
    const Interval r = ism_range(ism_of_expr(f, Grid(X, N))[0]);
    CHECK(is_subset(sr.interval, r));
    CHECK(hausdorff_1d(sr.interval, r) >= 0.0);
  }
}
