#include <cmath>
#include <random>

#include "doctest.h"
#include "gen.hpp"
#include "isa/ism.hpp"
#include "isa/oracle.hpp"

using namespace isa;

namespace {

bool close(const Interval& got, double lo, double hi, double tol = 1e-12) {
  return got.lo() <= lo && hi <= got.hi() && lo - got.lo() <= tol &&
         got.hi() - hi <= tol;
}

Grid unit_square_grid(int N) {
  return Grid(Box{Interval(0, 1), Interval(0, 1)}, N);
}

}  // namespace

TEST_CASE("grid cells reconstruct the partition") {
  const Grid g(Box{Interval(0, 2), Interval(-3, 3)}, 4);
  CHECK(g.step(0) == 0.5);
  CHECK(g.step(1) == 1.5);
  CHECK(g.cell(0, 0) == Interval(0, 0.5));
  CHECK(g.cell(0, 3) == Interval(1.5, 2.0));
  CHECK(g.cell(1, 0) == Interval(-3, -1.5));
  // neighbours share faces bit-for-bit
  for (int j = 0; j + 1 < 4; ++j) CHECK(g.cell(0, j).hi() == g.cell(0, j + 1).lo());
  // half-open assignment: shared boundary belongs to the right cell
  CHECK(g.cell_index(0, 0.5) == 1);
  CHECK(g.cell_index(0, 2.0) == 3);  // last cell closed
  CHECK(g.cell_index(0, 0.0) == 0);
  CHECK_THROWS_AS(Grid(Box{Interval(0, 0), Interval(0, 1)}, 2), std::invalid_argument);
  CHECK_THROWS_AS(Grid(Box{Interval(0, 1)}, 0), std::invalid_argument);
}

TEST_CASE("variable models") {
  const Grid g(Box{Interval(0, 2), Interval(0, 2)}, 2);
  const Ism v = ism_var(g, 0);
  CHECK(close(v.at(0, 0), 0, 1));
  CHECK(close(v.at(0, 1), 1, 2));
  CHECK(v.at(1, 0) == Interval(0, 0));
  CHECK(v.at(1, 1) == Interval(0, 0));

  // evaluation returns the cell containing the coordinate
  CHECK(close(ism_eval(v, {0.5, 1.7}), 0, 1));
  CHECK(close(ism_eval(v, {1.0, 0.3}), 1, 2));  // boundary goes right
  CHECK(close(ism_range(ism_var(Grid(Box{Interval(-1, 5)}, 1), 0)), -1, 5));
  CHECK_THROWS_AS((void)ism_var(g, 2), std::out_of_range);
  CHECK_THROWS_AS((void)ism_eval(v, {2.5, 0.0}), PointOutsideDomain);
}

TEST_CASE("constant models") {
  const Grid g = unit_square_grid(3);
  const Ism c = ism_const(g, Interval(2, 2));
  CHECK(ism_eval(c, {0.1, 0.9}) == Interval(2, 2));
  CHECK(ism_range(c) == Interval(2, 2));
  CHECK_THROWS_AS((void)ism_const(g, Interval::empty()), std::invalid_argument);
}

TEST_CASE("addition rule") {
  const Grid g = unit_square_grid(2);
  const Ism x1 = ism_var(g, 0), x2 = ism_var(g, 1);
  const Ism sum = ism_add(x1, x2);
  // exact separable model of x1 + x2: every cell enclosure has width h1 + h2
  for (int j0 = 0; j0 < 2; ++j0)
    for (int j1 = 0; j1 < 2; ++j1) {
      const Interval cell = ism_cell(sum, {j0, j1});
      CHECK(close(cell, 0.5 * (j0 + j1), 0.5 * (j0 + j1) + 1.0));
    }
  // adding an exact zero constant changes nothing
  const Ism same = ism_add(sum, ism_const(g, Interval(0, 0)));
  CHECK(same.coefficients() == sum.coefficients());
  // range decomposes over the operands
  const Interval ra = ism_range(x1), rb = ism_range(x2), rs = ism_range(sum);
  CHECK(rs.lo() == doctest::Approx(ra.lo() + rb.lo()).epsilon(1e-14));
  CHECK(rs.hi() == doctest::Approx(ra.hi() + rb.hi()).epsilon(1e-14));

  CHECK_THROWS_AS((void)ism_add(x1, ism_var(unit_square_grid(3), 0)), GridMismatch);
}

TEST_CASE("univariate composition on one variable is exact") {
  const Grid g(Box{Interval(0, 1)}, 4);
  const Ism v = ism_var(g, 0);
  const Ism e = ism_compose(AtomTag::Exp, v);
  for (int j = 0; j < 4; ++j) {
    const Interval cell = g.cell(0, j);
    CHECK(close(e.at(0, j), std::exp(cell.lo()), std::exp(cell.hi()), 1e-13));
  }
  CHECK(close(ism_range(e), 1.0, M_E, 1e-13));
}

TEST_CASE("exp composition of x1 + x2 matches the addition-theorem bound") {
  // reference values from the closed-form remainder construction
  const double a = std::log(0.5 * (std::exp(1.0) + 1.0));
  const double s = (M_E - 1.0) / (M_E + 1.0);
  CHECK(s == doctest::Approx(0.4621171572600097).epsilon(1e-12));
  const double e_omega = std::exp(2.0 * a);
  const double rem = e_omega * s * s;  // (1+s)^2 - 2s - 1
  const double lambda = e_omega * (2.0 * std::exp(0.0 - a) - 1.0) - rem;
  const double mu = e_omega * (2.0 * std::exp(1.0 - a) - 1.0) + rem;
  CHECK(mu == doctest::Approx(M_E * M_E).epsilon(1e-12));  // remainder restores the top

  for (int N : {1, 10}) {
    const Grid g = unit_square_grid(N);
    const Ism sum = ism_add(ism_var(g, 0), ism_var(g, 1));
    const Interval r = ism_range(ism_compose(AtomTag::Exp, sum));
    CHECK(r.lo() == doctest::Approx(lambda).epsilon(1e-9));
    CHECK(r.hi() == doctest::Approx(mu).epsilon(1e-9));
  }
}

TEST_CASE("composition soundness over a dense sample (several atoms)") {
  const Box X{Interval(0.5, 1.5), Interval(0.25, 1.0)};
  const Grid g(X, 5);
  const Ism sum = ism_add(ism_var(g, 0), ism_var(g, 1));  // range [0.75, 2.5]
  for (const AtomTag tag : {AtomTag::Exp, AtomTag::Sin, AtomTag::Cos, AtomTag::Log,
                            AtomTag::Sqrt, AtomTag::Recip}) {
    const Ism c = ism_compose(tag, sum);
    for (double u = 0.5; u <= 1.5; u += 0.01)
      for (double v = 0.25; v <= 1.0; v += 0.01) {
        const double val = [&] {
          const double s = u + v;
          switch (tag) {
            case AtomTag::Exp: return std::exp(s);
            case AtomTag::Sin: return std::sin(s);
            case AtomTag::Cos: return std::cos(s);
            case AtomTag::Log: return std::log(s);
            case AtomTag::Sqrt: return std::sqrt(s);
            default: return 1.0 / s;
          }
        }();
        CHECK(contains(ism_eval(c, {u, v}), val));
      }
  }
}

TEST_CASE("composition rejects domain violations") {
  const Grid g(Box{Interval(-1, 1), Interval(-1, 1)}, 2);
  const Ism sum = ism_add(ism_var(g, 0), ism_var(g, 1));
  CHECK_THROWS_AS((void)ism_compose(AtomTag::Recip, sum), DomainViolation);
  CHECK_THROWS_AS((void)ism_compose(AtomTag::Log, sum), DomainViolation);
  CHECK_THROWS_AS((void)ism_compose(AtomTag::Sqrt, sum), DomainViolation);
}

TEST_CASE("product rule") {
  SUBCASE("single variable products are exact") {
    const Grid g(Box{Interval(1, 2)}, 4);
    const Ism v = ism_var(g, 0);
    const Ism sq = ism_mul(v, v);
    for (int j = 0; j < 4; ++j) {
      const Interval cell = g.cell(0, j);
      CHECK(close(sq.at(0, j), cell.lo() * cell.lo(), cell.hi() * cell.hi(), 1e-12));
    }
  }

  SUBCASE("multiplying by a constant one preserves cell enclosures") {
    const Grid g = unit_square_grid(3);
    const Ism model = ism_add(ism_var(g, 0), ism_var(g, 1));
    const Ism prod = ism_mul(model, ism_const(g, Interval(1, 1)));
    for (int j0 = 0; j0 < 3; ++j0)
      for (int j1 = 0; j1 < 3; ++j1) {
        const Interval a = ism_cell(model, {j0, j1});
        const Interval b = ism_cell(prod, {j0, j1});
        CHECK(is_subset(a, b));
        CHECK(diam(b) - diam(a) <= 1e-12);
      }
  }

  SUBCASE("x1 * x2 on a single-cell grid encloses the true surface") {
    const Grid g = unit_square_grid(1);
    const Ism prod = ism_mul(ism_var(g, 0), ism_var(g, 1));
    const Interval cell = ism_cell(prod, {0, 0});
    for (double u = 0; u <= 1; u += 0.05)
      for (double v = 0; v <= 1; v += 0.05) CHECK(contains(cell, u * v));
    // midpoint centers and the cross-variation remainder give [-0.5, 1]
    CHECK(close(cell, -0.5, 1.0, 1e-12));
  }

  SUBCASE("grids must match") {
    CHECK_THROWS_AS(
        (void)ism_mul(ism_var(unit_square_grid(2), 0), ism_var(unit_square_grid(3), 1)),
        GridMismatch);
  }
}

TEST_CASE("product soundness for random separable factors") {
  testgen::Rng rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    const Box X = testgen::random_box(rng, 2, 2.0, 1.5);
    const Grid g(X, 3);
    // f(x1) * h(x2) built from per-variable models
    const Ism f = ism_compose(AtomTag::Sin, ism_var(g, 0));
    const Ism h = ism_compose(AtomTag::Cos, ism_var(g, 1));
    const Ism prod = ism_mul(f, h);
    for (int s = 0; s < 200; ++s) {
      const auto x = testgen::random_point(rng, X);
      CHECK(contains(ism_eval(prod, x), std::sin(x[0]) * std::cos(x[1])));
    }
  }
}

TEST_CASE("range extraction") {
  const Grid g = unit_square_grid(2);
  // rows as given: row 0 cells [-1,2],[2,3]; row 1 cells [0,3],[-2,1]
  const Ism m(g, {Interval(-1, 2), Interval(2, 3), Interval(0, 3), Interval(-2, 1)});
  CHECK(ism_range(m) == Interval(-3, 6));
  CHECK(m.row_min(0) == -1.0);
  CHECK(m.row_max(1) == 3.0);

  // cell extremes reproduce the range exactly
  double min_lo = 1e300, max_hi = -1e300;
  for (int j0 = 0; j0 < 2; ++j0)
    for (int j1 = 0; j1 < 2; ++j1) {
      const Interval c = ism_cell(m, {j0, j1});
      min_lo = std::min(min_lo, c.lo());
      max_hi = std::max(max_hi, c.hi());
    }
  CHECK(min_lo == ism_range(m).lo());
  CHECK(max_hi == ism_range(m).hi());
}

TEST_CASE("evaluation stays inside the range") {
  testgen::Rng rng(77);
  for (int rep = 0; rep < 200; ++rep) {
    const Box X = testgen::random_box(rng, 2);
    const Grid g(X, 4);
    const Ism m = ism_add(ism_compose(AtomTag::Sin, ism_var(g, 0)), ism_var(g, 1));
    const Interval r = ism_range(m);
    for (int s = 0; s < 20; ++s)
      CHECK(is_subset(ism_eval(m, testgen::random_point(rng, X)), r));
  }
}

TEST_CASE("pow chains") {
  const Grid g(Box{Interval(0.5, 1.5)}, 3);
  const Ism v = ism_var(g, 0);
  const Ism p0 = ism_pow(v, 0);
  CHECK(ism_range(p0) == Interval(1, 1));
  for (long k : {1L, 2L, 3L, 5L}) {
    const Ism p = ism_pow(v, k);
    for (double x = 0.5; x <= 1.5; x += 0.01)
      CHECK(contains(ism_eval(p, {x}), std::pow(x, (double)k)));
  }
}

TEST_CASE("expression propagation: cubes surface") {
  const Expr f = parse("x1^3 + x2^3");
  const Grid g(Box{Interval(-3, 3), Interval(-3, 3)}, 20);
  const IsmVector models = ism_of_expr(f, g);
  REQUIRE(models.size() == 1);
  // storage is rows x pieces, not one entry per cell
  CHECK(models[0].coefficients().size() == 2 * 20);

  for (int j0 = 0; j0 < 20; ++j0)
    for (int j1 = 0; j1 < 20; ++j1) {
      const Interval cell = ism_cell(models[0], {j0, j1});
      const Interval c0 = g.cell(0, j0), c1 = g.cell(1, j1);
      // true range of the separable cubic on this cell
      const double lo = c0.lo() * c0.lo() * c0.lo() + c1.lo() * c1.lo() * c1.lo();
      const double hi = c0.hi() * c0.hi() * c0.hi() + c1.hi() * c1.hi() * c1.hi();
      CHECK(cell.lo() <= lo + 1e-12);
      CHECK(cell.hi() >= hi - 1e-12);
      // positive cells take the exact endpoint route through the product chain
      if (c0.lo() >= 0.0 && c1.lo() >= 0.0) {
        CHECK(cell.lo() == doctest::Approx(lo).epsilon(1e-12));
        CHECK(cell.hi() == doctest::Approx(hi).epsilon(1e-12));
      }
    }
}

TEST_CASE("expression propagation: enclosure tightens with resolution") {
  const Expr f = parse("exp(sin(x1)+sin(x2)*cos(x2))");
  const Box X{Interval(0, 1), Interval(0, 20)};
  const SampledRange sr = sampled_range(f, X, 150);
  double last = 1e300;
  for (int N : {1, 10, 100}) {
    const Interval r = ism_range(ism_of_expr(f, Grid(X, N))[0]);
    const double d = hausdorff_1d(sr.interval, r);
    CHECK(d >= 0.0);
    CHECK(d <= last + 1e-9);
    last = d;
  }
}

TEST_CASE("single-piece grids reproduce the separable interval bound") {
  const Expr f = parse("exp(x1) + sin(x2)");
  const Box X{Interval(0, 4), Interval(0, 4)};
  const Interval r = ism_range(ism_of_expr(f, Grid(X, 1))[0]);
  const Interval want = add(exp(Interval(0, 4)), sin(Interval(0, 4)));
  CHECK(r.lo() == doctest::Approx(want.lo()).epsilon(1e-12));
  CHECK(r.hi() == doctest::Approx(want.hi()).epsilon(1e-12));
}

TEST_CASE("master enclosure fuzz: real values land in the superposition model") {
  testgen::Rng rng(2718);
  int checks = 0;
  while (checks < 10000) {
    const std::size_t n_vars = 1 + (std::size_t)(rng() % 3);
    const Expr e = testgen::random_expr(rng, n_vars, 5, true);
    const Box X = testgen::random_box(rng, n_vars);
    const int N = 1 + (int)(rng() % 4);
    IsmVector models;
    try {
      models = ism_of_expr(e, Grid(X, N));
    } catch (const DomainViolation&) {
      continue;
    }
    for (int s = 0; s < 10; ++s) {
      const auto x = testgen::random_point(rng, X);
      double v;
      try {
        v = e.eval_real(x)[0];
      } catch (const DomainViolation&) {
        continue;
      }
      CHECK(contains(ism_eval(models[0], x), v));
      ++checks;
    }
  }
}

TEST_CASE("domain violations report the expression node") {
  const Expr e = parse("log(x1 + x2)");
  try {
    (void)ism_of_expr(e, Grid(Box{Interval(-1, 1), Interval(-1, 1)}, 2));
    FAIL("expected DomainViolation");
  } catch (const DomainViolation& err) {
    CHECK(err.node_index >= 0);
  }
}
