#pragma once

#include <vector>

#include "isa/expr.hpp"
#include "isa/interval.hpp"

namespace isa {

class GridMismatch : public std::logic_error {
 public:
  explicit GridMismatch(const std::string& what) : std::logic_error(what) {}
};

class PointOutsideDomain : public std::out_of_range {
 public:
  explicit PointOutsideDomain(const std::string& what) : std::out_of_range(what) {}
};

// Uniform partition of a box into N pieces per coordinate.
// Cell j (0-based) of coordinate i is [lo_i + j*h_i, lo_i + (j+1)*h_i];
// the first/last cells snap exactly to the domain endpoints, so adjacent
// cells share faces bit-for-bit and the union covers the domain.
class Grid {
 public:
  Grid(Box domain, int pieces);

  const Box& domain() const { return domain_; }
  int pieces() const { return n_; }
  std::size_t dims() const { return domain_.size(); }
  double step(std::size_t i) const { return h_[i]; }

  Interval cell(std::size_t i, int j) const;
  Box cell_box(const std::vector<int>& j) const;

  // Cell index containing x_i under the half-open convention: interior
  // shared boundaries belong to the right cell, the last cell is closed.
  int cell_index(std::size_t i, double x) const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.n_ == b.n_ && a.domain_ == b.domain_;
  }
  friend bool operator!=(const Grid& a, const Grid& b) { return !(a == b); }

 private:
  Box domain_;
  int n_;
  std::vector<double> h_;
};

// Interval superposition model: a piecewise-constant interval enclosure
// over a grid, parameterized by one interval row per coordinate with one
// entry per grid piece. The enclosure at x is the sum over coordinates of
// the entry selected by x's cell, so storage is dims * pieces intervals
// while the model distinguishes pieces^dims cells.
class Ism {
 public:
  Ism(Grid grid, std::vector<Interval> coeffs);

  const Grid& grid() const { return grid_; }
  std::size_t rows() const { return grid_.dims(); }
  int cols() const { return grid_.pieces(); }

  const Interval& at(std::size_t row, int col) const {
    return coeffs_[row * static_cast<std::size_t>(grid_.pieces()) + col];
  }

  const std::vector<Interval>& coefficients() const { return coeffs_; }

  double row_min(std::size_t row) const;  // min of lower bounds across the row
  double row_max(std::size_t row) const;  // max of upper bounds across the row

 private:
  Grid grid_;
  std::vector<Interval> coeffs_;
};

using IsmVector = std::vector<Ism>;  // components share one grid

// Trivial model of the input variable x_i: row i holds the grid cells
// (padded outward so boundary points stay covered after cell assignment
// in floating point), every other row is [0,0].
Ism ism_var(const Grid& grid, std::size_t var_index);

// Constant model: row 0 holds c in every column, other rows [0,0].
Ism ism_const(const Grid& grid, const Interval& c);

Ism ism_add(const Ism& a, const Ism& b);
Ism ism_neg(const Ism& a);
Ism ism_sub(const Ism& a, const Ism& b);
Ism ism_scalar_mul(double c, const Ism& a);

// Univariate composition rule: encloses atom(g) given a model of g.
// Uses the addition-theorem remainder for exp and a generic interval
// defect bound for the other atoms; both vanish when at most one row
// varies, which keeps separable compositions exact.
Ism ism_compose(AtomTag tag, const Ism& a);

// Product rule: encloses g*h from models of g and h, with the
// cross-variation remainder placed on the row of largest total width.
Ism ism_mul(const Ism& a, const Ism& b);

Ism ism_pow(const Ism& a, long k);  // square-and-multiply chain of ism_mul

// Global range [lambda, mu]: sum over rows of the row minima / maxima.
Interval ism_range(const Ism& a);

// Value of the enclosure at a point of the domain.
Interval ism_eval(const Ism& a, const std::vector<double>& x);

// Enclosure on one grid cell: sum of the selected row entries.
Interval ism_cell(const Ism& a, const std::vector<int>& j);

// Propagates models through the expression graph, one model per output.
IsmVector ism_of_expr(const Expr& e, const Grid& grid);

}  // namespace isa
