#include <cmath>
#include <random>

#include "doctest.h"
#include "isa/interval.hpp"

using namespace isa;

namespace {

bool encloses(const Interval& outer, double lo, double hi, double slack = 1e-12) {
  return outer.lo() <= lo && hi <= outer.hi() && lo - outer.lo() <= slack &&
         outer.hi() - hi <= slack;
}

}  // namespace

TEST_CASE("addition") {
  CHECK(encloses(add(Interval(1, 2), Interval(3, 4)), 4, 6));
  CHECK(add(Interval(0, 0), Interval(-5, 7)) == Interval(-5, 7));
  CHECK(encloses(add(Interval(-1, 1), Interval(-1, 1)), -2, 2));
  CHECK(add(Interval::empty(), Interval(1, 2)).is_empty());
}

TEST_CASE("multiplication") {
  CHECK(encloses(mul(Interval(1, 2), Interval(3, 4)), 3, 8));
  // four products of [-1,2] * [-3,4]: {3, -4, -6, 8}
  CHECK(encloses(mul(Interval(-1, 2), Interval(-3, 4)), -6, 8));
  CHECK(mul(Interval(0, 0), Interval(-9, 9)) == Interval(0, 0));
  CHECK(mul(Interval::empty(), Interval(0, 1)).is_empty());
}

TEST_CASE("negation, subtraction, scalar multiples") {
  CHECK(neg(Interval(-2, 5)) == Interval(-5, 2));
  CHECK(encloses(sub(Interval(0, 1), Interval(0, 1)), -1, 1));
  CHECK(encloses(scalar_mul(-2, Interval(1, 3)), -6, -2));
  CHECK(scalar_mul(0, Interval(-7, 7)) == Interval(0, 0));
  CHECK(scalar_mul(3, Interval::empty()).is_empty());
}

TEST_CASE("univariate atoms") {
  CHECK(encloses(exp(Interval(0, 1)), 1.0, M_E));
  CHECK(encloses(isa::sin(Interval(0, M_PI)), 0.0, 1.0));
  CHECK(isa::sin(Interval(0, M_PI)).hi() == 1.0);
  CHECK(encloses(isa::pow(Interval(-2, 1), 2), 0, 4));
  CHECK(isa::pow(Interval(-2, 1), 2).lo() == 0.0);
  CHECK(encloses(isa::pow(Interval(-3, -2), 3), -27, -8));
  CHECK(encloses(isa::cos(Interval(0, M_PI)), -1.0, 1.0));
  CHECK(encloses(isa::cos(Interval(0.1, 1.0)), std::cos(1.0), std::cos(0.1)));
  CHECK(encloses(isa::sqrt(Interval(0, 4)), 0, 2));
  CHECK(encloses(recip(Interval(1, 2)), 0.5, 1.0));
  CHECK(encloses(isa::log(Interval(1, M_E)), 0.0, 1.0));
  // whole periods collapse to [-1, 1]
  CHECK(isa::sin(Interval(0, 100)) == Interval(-1, 1));
  CHECK(univariate(AtomTag::Exp, Interval(0, 1)) == exp(Interval(0, 1)));
}

TEST_CASE("domain violations") {
  CHECK_THROWS_AS((void)isa::log(Interval(0, 1)), DomainViolation);
  CHECK_THROWS_AS((void)isa::log(Interval(-1, 1)), DomainViolation);
  CHECK_THROWS_AS((void)isa::sqrt(Interval(-1e-9, 1)), DomainViolation);
  CHECK_THROWS_AS((void)recip(Interval(-1, 1)), DomainViolation);
  CHECK_THROWS_AS((void)recip(Interval(0, 1)), DomainViolation);
  CHECK_THROWS_AS((void)exp(Interval(0, 1e9)), DomainViolation);
}

TEST_CASE("diameter, midpoint, magnitude") {
  CHECK(diam(Interval(-3, 3)) == 6.0);
  CHECK(mid(Interval(1, 3)) == 2.0);
  CHECK(mag(Interval(-5, 2)) == 5.0);
  CHECK_THROWS_AS((void)diam(Interval::empty()), std::invalid_argument);
}

TEST_CASE("intersection and containment") {
  CHECK(intersect(Interval(0, 2), Interval(1, 5)) == Interval(1, 2));
  CHECK(intersect(Interval(0, 1), Interval(2, 3)).is_empty());
  CHECK(is_subset(Interval(1, 2), Interval(0, 3)));
  CHECK(!is_subset(Interval(0, 3), Interval(1, 2)));
  CHECK(is_subset(Interval::empty(), Interval(0, 1)));
  CHECK(contains(Interval(0, 1), 0.5));
  CHECK(!contains(Interval::empty(), 0.0));
  CHECK(hull(Interval(0, 1), Interval(3, 4)) == Interval(0, 4));

  // commutative, associative, idempotent
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(-10, 10);
  for (int rep = 0; rep < 1000; ++rep) {
    auto mk = [&] {
      const double a = u(rng), b = u(rng);
      return Interval(std::min(a, b), std::max(a, b));
    };
    const Interval a = mk(), b = mk(), c = mk();
    CHECK(intersect(a, b) == intersect(b, a));
    CHECK(intersect(intersect(a, b), c) == intersect(a, intersect(b, c)));
    CHECK(intersect(a, a) == a);
  }
}

TEST_CASE("one-sided Hausdorff distance for nested intervals") {
  CHECK(hausdorff_1d(Interval(0, 1), Interval(0, 1)) == 0.0);
  CHECK(hausdorff_1d(Interval(0, 1), Interval(-1, 3)) == 2.0);
  CHECK(hausdorff_1d(Interval(0, 1), Interval(-0.5, 1)) == 0.5);
  CHECK_THROWS_AS((void)hausdorff_1d(Interval(0, 2), Interval(0, 1)), NotNested);
}

TEST_CASE("empty is an explicit value") {
  CHECK(Interval::empty() == Interval::empty());
  CHECK(Interval::empty() != Interval(0, 0));
  CHECK(Interval::empty().is_empty());
  CHECK_THROWS_AS(Interval(2, 1), std::invalid_argument);
}

TEST_CASE("diam of sums is additive up to outward rounding") {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-100, 100);
  for (int rep = 0; rep < 2000; ++rep) {
    const double a = u(rng), b = u(rng), c = u(rng), d = u(rng);
    const Interval x(std::min(a, b), std::max(a, b));
    const Interval y(std::min(c, d), std::max(c, d));
    const double got = diam(add(x, y));
    const double want = diam(x) + diam(y);
    CHECK(std::fabs(got - want) <= 8 * std::numeric_limits<double>::epsilon() *
                                       (1.0 + std::fabs(want) + mag(x) + mag(y)));
  }
}

namespace {

Interval random_interval(std::mt19937_64& rng, double lo, double hi) {
  std::uniform_real_distribution<double> u(lo, hi);
  const double a = u(rng), b = u(rng);
  return Interval(std::min(a, b), std::max(a, b));
}

Interval random_sub(std::mt19937_64& rng, const Interval& outer) {
  std::uniform_real_distribution<double> u(outer.lo(), outer.hi());
  const double a = u(rng), b = u(rng);
  return Interval(std::min(a, b), std::max(a, b));
}

double random_in(std::mt19937_64& rng, const Interval& iv) {
  std::uniform_real_distribution<double> u(iv.lo(), iv.hi());
  return u(rng);
}

}  // namespace

TEST_CASE("soundness fuzz: op(point) lands in op(interval)") {
  std::mt19937_64 rng(42);
  int checks = 0;
  while (checks < 100000) {
    const Interval a = random_interval(rng, -50, 50);
    const Interval b = random_interval(rng, -50, 50);
    const double x = random_in(rng, a);
    const double y = random_in(rng, b);

    CHECK(contains(add(a, b), x + y));
    CHECK(contains(sub(a, b), x - y));
    CHECK(contains(mul(a, b), x * y));
    CHECK(contains(neg(a), -x));
    CHECK(contains(scalar_mul(y, a), y * x));
    CHECK(contains(isa::sin(a), std::sin(x)));
    CHECK(contains(isa::cos(a), std::cos(x)));
    const long k = (long)(checks % 5);
    CHECK(contains(isa::pow(a, k), std::pow(x, (double)k)));

    const Interval small = random_interval(rng, -4, 4);
    const double xs = random_in(rng, small);
    CHECK(contains(exp(small), std::exp(xs)));

    const Interval pos = random_interval(rng, 1e-6, 50);
    const double xp = random_in(rng, pos);
    CHECK(contains(isa::log(pos), std::log(xp)));
    CHECK(contains(isa::sqrt(pos), std::sqrt(xp)));
    CHECK(contains(recip(pos), 1.0 / xp));
    checks += 12;
  }
}

TEST_CASE("soundness at trigonometric extrema") {
  // intervals straddling multiples of pi/2, where the scan must catch
  // the +-1 peaks
  for (long k = -20; k <= 20; ++k) {
    const double c = k * M_PI_2;
    const Interval a(c - 0.25, c + 0.25);
    for (double t = -0.25; t <= 0.25; t += 0.01) {
      CHECK(contains(isa::sin(a), std::sin(c + t)));
      CHECK(contains(isa::cos(a), std::cos(c + t)));
    }
  }
}

TEST_CASE("inclusion monotonicity fuzz") {
  std::mt19937_64 rng(1234);
  for (int rep = 0; rep < 20000; ++rep) {
    const Interval a_outer = random_interval(rng, -20, 20);
    const Interval b_outer = random_interval(rng, -20, 20);
    const Interval a = random_sub(rng, a_outer);
    const Interval b = random_sub(rng, b_outer);

    CHECK(is_subset(add(a, b), add(a_outer, b_outer)));
    CHECK(is_subset(sub(a, b), sub(a_outer, b_outer)));
    CHECK(is_subset(mul(a, b), mul(a_outer, b_outer)));
    CHECK(is_subset(isa::sin(a), isa::sin(a_outer)));
    CHECK(is_subset(isa::cos(a), isa::cos(a_outer)));
    CHECK(is_subset(isa::pow(a, 3), isa::pow(a_outer, 3)));
  }
}

TEST_CASE("box basics") {
  const Box b{Interval(0, 2), Interval(0, 1)};
  CHECK(b.size() == 2);
  CHECK(diam(b) == 2.0);
  CHECK(b.contains({1.0, 0.5}));
  CHECK(!b.contains({3.0, 0.5}));
  CHECK(mid(b) == std::vector<double>{1.0, 0.5});
  CHECK_THROWS_AS(Box(std::vector<Interval>{}), std::invalid_argument);
}
