#include "isa/interval.hpp"

namespace isa {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Two outward steps around libm results; covers faithfully-rounded
// transcendentals (error < 1 ulp) with margin.
double round_down2(double x) { return round_down(round_down(x)); }
double round_up2(double x) { return round_up(round_up(x)); }

// Overflowed results need care: [finite, +inf] is still a sound (one-sided)
// enclosure, but a NaN endpoint or a lower bound of +inf would claim more
// than the arithmetic knows.
Interval checked(double lo, double hi, const char* op) {
  if (std::isnan(lo) || std::isnan(hi) || lo == kInf || hi == -kInf)
    throw DomainViolation(std::string(op) + ": numeric overflow");
  return Interval(lo, hi);
}

// Per-pair product bounds via the FMA residual.
double prod_down(double x, double y) {
  if (x == 0.0 || y == 0.0) return 0.0;
  const double p = x * y;
  if (!std::isfinite(p) || !std::isfinite(x) || !std::isfinite(y)) return p;
  return std::fma(x, y, -p) < 0.0 ? round_down(p) : p;
}
double prod_up(double x, double y) {
  if (x == 0.0 || y == 0.0) return 0.0;
  const double p = x * y;
  if (!std::isfinite(p) || !std::isfinite(x) || !std::isfinite(y)) return p;
  return std::fma(x, y, -p) > 0.0 ? round_up(p) : p;
}

// Enclosure of pi: the nearest double is below the true value.
const Interval kPi(M_PI, round_up(M_PI));

}  // namespace

double add_down(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) return s;
  const double bp = s - a;
  const double err = (a - (s - bp)) + (b - bp);  // TwoSum residual
  return err < 0.0 ? round_down(s) : s;
}

double add_up(double a, double b) {
  const double s = a + b;
  if (!std::isfinite(s)) return s;
  const double bp = s - a;
  const double err = (a - (s - bp)) + (b - bp);
  return err > 0.0 ? round_up(s) : s;
}

const char* atom_name(AtomTag tag) {
  switch (tag) {
    case AtomTag::Exp: return "exp";
    case AtomTag::Log: return "log";
    case AtomTag::Sin: return "sin";
    case AtomTag::Cos: return "cos";
    case AtomTag::Sqrt: return "sqrt";
    case AtomTag::Recip: return "recip";
  }
  return "?";
}

Interval add(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  if (a.lo() == 0.0 && a.hi() == 0.0) return b;  // adding true zero is exact
  if (b.lo() == 0.0 && b.hi() == 0.0) return a;
  return checked(add_down(a.lo(), b.lo()), add_up(a.hi(), b.hi()), "add");
}

Interval neg(const Interval& a) {
  if (a.is_empty()) return Interval::empty();
  return Interval(-a.hi(), -a.lo());  // exact in IEEE
}

Interval sub(const Interval& a, const Interval& b) { return add(a, neg(b)); }

Interval mul(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  if ((a.lo() == 0.0 && a.hi() == 0.0) || (b.lo() == 0.0 && b.hi() == 0.0))
    return Interval(0.0, 0.0);  // annihilator, exact
  const double lo = std::min({prod_down(a.lo(), b.lo()), prod_down(a.lo(), b.hi()),
                              prod_down(a.hi(), b.lo()), prod_down(a.hi(), b.hi())});
  const double hi = std::max({prod_up(a.lo(), b.lo()), prod_up(a.lo(), b.hi()),
                              prod_up(a.hi(), b.lo()), prod_up(a.hi(), b.hi())});
  return checked(lo, hi, "mul");
}

Interval scalar_mul(double c, const Interval& a) {
  if (a.is_empty()) return Interval::empty();
  if (c == 0.0) return Interval(0.0, 0.0);
  return checked(std::min(prod_down(c, a.lo()), prod_down(c, a.hi())),
                 std::max(prod_up(c, a.lo()), prod_up(c, a.hi())), "scalar_mul");
}

Interval exp(const Interval& a) {
  if (a.is_empty()) return Interval::empty();
  const double lo = std::max(0.0, round_down2(std::exp(a.lo())));
  const double hi = round_up2(std::exp(a.hi()));
  if (!std::isfinite(hi))
    throw DomainViolation("exp: overflow to non-finite endpoint");
  return Interval(lo, hi);
}

Interval log(const Interval& a) {
  if (a.is_empty()) return Interval::empty();
  if (!(a.lo() > 0.0)) throw DomainViolation("log: argument not strictly positive");
  return Interval(round_down2(std::log(a.lo())), round_up2(std::log(a.hi())));
}

Interval sqrt(const Interval& a) {
  if (a.is_empty()) return Interval::empty();
  if (a.lo() < 0.0) throw DomainViolation("sqrt: argument has negative part");
  return Interval(std::max(0.0, round_down2(std::sqrt(a.lo()))),
                  round_up2(std::sqrt(a.hi())));
}

Interval recip(const Interval& a) {
  if (a.is_empty()) return Interval::empty();
  if (a.lo() <= 0.0 && a.hi() >= 0.0)
    throw DomainViolation("recip: argument contains zero");
  return checked(round_down(1.0 / a.hi()), round_up(1.0 / a.lo()), "recip");
}

namespace {

// Hull of the periodic extrema of sin/cos inside [a, b] plus the endpoint
// values. Extrema sit at (phase + 2k) * pi/2; candidate k's are tested with
// an interval enclosure of the critical point, so borderline hits are
// included conservatively (loose is sound here).
Interval trig_scan(const Interval& a, double fendl, double fendh,
                   int max_phase, int min_phase) {
  double lo = std::min(fendl, fendh);
  double hi = std::max(fendl, fendh);
  const Interval two_pi = scalar_mul(2.0, kPi);
  const Interval half_pi = scalar_mul(0.5, kPi);
  auto scan = [&](int phase, double extreme) {
    const double period = 2.0 * M_PI;
    const long long m0 = (long long)std::floor((a.lo() - phase * M_PI_2) / period) - 1;
    const long long m1 = (long long)std::floor((a.hi() - phase * M_PI_2) / period) + 1;
    for (long long m = m0; m <= m1; ++m) {
      Interval crit = add(scalar_mul((double)phase, half_pi),
                          scalar_mul((double)m, two_pi));
      if (crit.lo() <= a.hi() && crit.hi() >= a.lo()) {
        lo = std::min(lo, extreme);
        hi = std::max(hi, extreme);
      }
    }
  };
  scan(max_phase, 1.0);
  scan(min_phase, -1.0);
  return Interval(std::max(-1.0, round_down2(lo)), std::min(1.0, round_up2(hi)));
}

}  // namespace

namespace {

// Past this magnitude the enclosure of k*pi/2 is wider than a quarter
// period, so phase information is gone anyway (and the period index would
// overflow the scan).
bool trig_arg_usable(const Interval& a) {
  return std::isfinite(a.lo()) && std::isfinite(a.hi()) &&
         a.hi() - a.lo() < 2.0 * M_PI && mag(a) < 1e15;
}

}  // namespace

Interval sin(const Interval& a) {
  if (a.is_empty()) return Interval::empty();
  if (!trig_arg_usable(a)) return Interval(-1.0, 1.0);
  return trig_scan(a, std::sin(a.lo()), std::sin(a.hi()), 1, -1);
}

Interval cos(const Interval& a) {
  if (a.is_empty()) return Interval::empty();
  if (!trig_arg_usable(a)) return Interval(-1.0, 1.0);
  return trig_scan(a, std::cos(a.lo()), std::cos(a.hi()), 0, 2);
}

Interval pow(const Interval& a, long k) {
  if (a.is_empty()) return Interval::empty();
  if (k < 0) return recip(pow(a, -k));
  if (k == 0) return Interval(1.0, 1.0);
  if (k == 1) return a;
  const double pl = std::pow(a.lo(), (double)k);
  const double ph = std::pow(a.hi(), (double)k);
  double lo, hi;
  if (k % 2 != 0 || a.lo() >= 0.0) {
    lo = pl;
    hi = ph;
  } else if (a.hi() <= 0.0) {
    lo = ph;
    hi = pl;
  } else {
    lo = 0.0;  // even power straddling zero
    hi = std::max(pl, ph);
  }
  const double rlo = lo == 0.0 ? 0.0 : round_down2(lo);
  const double rhi = hi == 0.0 ? 0.0 : round_up2(hi);
  if (!std::isfinite(rlo) || !std::isfinite(rhi))
    throw DomainViolation("pow: overflow to non-finite endpoint");
  return Interval(rlo, rhi);
}

Interval univariate(AtomTag tag, const Interval& a) {
  switch (tag) {
    case AtomTag::Exp: return exp(a);
    case AtomTag::Log: return log(a);
    case AtomTag::Sin: return sin(a);
    case AtomTag::Cos: return cos(a);
    case AtomTag::Sqrt: return sqrt(a);
    case AtomTag::Recip: return recip(a);
  }
  throw std::logic_error("univariate: unknown atom");
}

double diam(const Interval& a) {
  if (a.is_empty()) throw std::invalid_argument("diam of empty interval");
  return a.hi() - a.lo();
}

double mid(const Interval& a) {
  if (a.is_empty()) throw std::invalid_argument("mid of empty interval");
  return 0.5 * (a.lo() + a.hi());
}

double mag(const Interval& a) {
  if (a.is_empty()) return 0.0;
  return std::max(std::fabs(a.lo()), std::fabs(a.hi()));
}

Interval intersect(const Interval& a, const Interval& b) {
  if (a.is_empty() || b.is_empty()) return Interval::empty();
  const double lo = std::max(a.lo(), b.lo());
  const double hi = std::min(a.hi(), b.hi());
  if (lo > hi) return Interval::empty();
  return Interval(lo, hi);
}

Interval hull(const Interval& a, const Interval& b) {
  if (a.is_empty()) return b;
  if (b.is_empty()) return a;
  return Interval(std::min(a.lo(), b.lo()), std::max(a.hi(), b.hi()));
}

bool is_subset(const Interval& a, const Interval& b) {
  if (a.is_empty()) return true;
  if (b.is_empty()) return false;
  return b.lo() <= a.lo() && a.hi() <= b.hi();
}

bool contains(const Interval& a, double x) {
  return !a.is_empty() && a.lo() <= x && x <= a.hi();
}

bool disjoint(const Interval& a, const Interval& b) {
  return intersect(a, b).is_empty();
}

double hausdorff_1d(const Interval& range, const Interval& enclosure) {
  if (!is_subset(range, enclosure))
    throw NotNested("hausdorff_1d: range not contained in enclosure");
  return std::max(range.lo() - enclosure.lo(), enclosure.hi() - range.hi());
}

bool Box::contains(const std::vector<double>& x) const {
  if (x.size() != comps_.size()) return false;
  for (std::size_t i = 0; i < comps_.size(); ++i)
    if (!isa::contains(comps_[i], x[i])) return false;
  return true;
}

double diam(const Box& b) {
  double d = 0.0;
  for (const auto& c : b.components()) d = std::max(d, diam(c));
  return d;
}

std::vector<double> mid(const Box& b) {
  std::vector<double> m(b.size());
  for (std::size_t i = 0; i < b.size(); ++i) m[i] = mid(b[i]);
  return m;
}

}  // namespace isa
