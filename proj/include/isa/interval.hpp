#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace isa {

// Thrown when an operand leaves the natural domain of an operation
// (log of a non-positive range, reciprocal of a range containing zero, ...).
// Callers doing set inversion catch this and treat the box as indeterminate.
class DomainViolation : public std::runtime_error {
 public:
  explicit DomainViolation(const std::string& what, long node = -1)
      : std::runtime_error(what), node_index(node) {}
  long node_index;  // offending expression node, -1 if not applicable
};

class NotNested : public std::runtime_error {
 public:
  explicit NotNested(const std::string& what) : std::runtime_error(what) {}
};

enum class AtomTag { Exp, Log, Sin, Cos, Sqrt, Recip };

const char* atom_name(AtomTag tag);

// Closed real interval [lo, hi] with an explicit empty state.
// Non-empty values keep lo <= hi with finite endpoints; the entire line
// [-inf, inf] is permitted as a sentinel. All arithmetic rounds outward,
// so results enclose the exact real image.
class Interval {
 public:
  Interval() : lo_(0.0), hi_(0.0), empty_(false) {}
  Interval(double lo, double hi) : lo_(lo), hi_(hi), empty_(false) {
    if (!(lo <= hi))  // also rejects NaN endpoints
      throw std::invalid_argument("Interval: lo > hi or NaN endpoint");
  }

  static Interval empty() {
    Interval r;
    r.lo_ = std::numeric_limits<double>::infinity();
    r.hi_ = -std::numeric_limits<double>::infinity();
    r.empty_ = true;
    return r;
  }
  static Interval entire() {
    return Interval(-std::numeric_limits<double>::infinity(),
                    std::numeric_limits<double>::infinity());
  }
  static Interval point(double v) { return Interval(v, v); }

  double lo() const { return lo_; }
  double hi() const { return hi_; }
  bool is_empty() const { return empty_; }

  friend bool operator==(const Interval& a, const Interval& b) {
    if (a.empty_ || b.empty_) return a.empty_ == b.empty_;
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }
  friend bool operator!=(const Interval& a, const Interval& b) { return !(a == b); }

 private:
  double lo_, hi_;
  bool empty_;
};

// One outward rounding step per endpoint.
inline double round_down(double x) {
  return std::nextafter(x, -std::numeric_limits<double>::infinity());
}
inline double round_up(double x) {
  return std::nextafter(x, std::numeric_limits<double>::infinity());
}

// Directed sums that round outward only when the IEEE result is inexact,
// so dyadic arithmetic stays bit-exact. These are the accumulation steps
// behind interval addition; staircase sums reuse them so per-cell sums and
// corner sums agree bitwise.
double add_down(double a, double b);
double add_up(double a, double b);

Interval add(const Interval& a, const Interval& b);
Interval neg(const Interval& a);
Interval sub(const Interval& a, const Interval& b);
Interval mul(const Interval& a, const Interval& b);
Interval scalar_mul(double c, const Interval& a);

Interval exp(const Interval& a);
Interval log(const Interval& a);
Interval sin(const Interval& a);
Interval cos(const Interval& a);
Interval sqrt(const Interval& a);
Interval recip(const Interval& a);
Interval pow(const Interval& a, long k);
Interval univariate(AtomTag tag, const Interval& a);

double diam(const Interval& a);
double mid(const Interval& a);
double mag(const Interval& a);  // max |endpoint|, 0 for empty
Interval intersect(const Interval& a, const Interval& b);
Interval hull(const Interval& a, const Interval& b);
bool is_subset(const Interval& a, const Interval& b);  // a subseteq b
bool contains(const Interval& a, double x);
bool disjoint(const Interval& a, const Interval& b);

// One-sided Hausdorff distance for nested 1-D intervals: how far the
// enclosure endpoints stick out beyond the (inner) range estimate.
double hausdorff_1d(const Interval& range, const Interval& enclosure);

inline Interval operator+(const Interval& a, const Interval& b) { return add(a, b); }
inline Interval operator-(const Interval& a, const Interval& b) { return sub(a, b); }
inline Interval operator-(const Interval& a) { return neg(a); }
inline Interval operator*(const Interval& a, const Interval& b) { return mul(a, b); }
inline Interval operator*(double c, const Interval& a) { return scalar_mul(c, a); }

// Axis-aligned box: one interval per coordinate.
class Box {
 public:
  Box() = default;
  explicit Box(std::vector<Interval> comps) : comps_(std::move(comps)) {
    if (comps_.empty()) throw std::invalid_argument("Box: zero dimensions");
  }
  Box(std::initializer_list<Interval> comps) : Box(std::vector<Interval>(comps)) {}

  std::size_t size() const { return comps_.size(); }
  const Interval& operator[](std::size_t i) const { return comps_[i]; }
  Interval& operator[](std::size_t i) { return comps_[i]; }
  const std::vector<Interval>& components() const { return comps_; }

  bool is_empty() const {
    for (const auto& c : comps_)
      if (c.is_empty()) return true;
    return false;
  }
  bool contains(const std::vector<double>& x) const;

  friend bool operator==(const Box& a, const Box& b) { return a.comps_ == b.comps_; }
  friend bool operator!=(const Box& a, const Box& b) { return !(a == b); }

 private:
  std::vector<Interval> comps_;
};

// Max-norm diameter; drives both bisection and the termination test.
double diam(const Box& b);
std::vector<double> mid(const Box& b);

}  // namespace isa
