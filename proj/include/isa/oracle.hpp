#pragma once

#include <array>
#include <cstddef>

#include "isa/expr.hpp"
#include "isa/ism.hpp"
#include "isa/setinv.hpp"

namespace isa {

class CapExceeded : public std::runtime_error {
 public:
  explicit CapExceeded(const std::string& what) : std::runtime_error(what) {}
};

// Min/max of real evaluations over a tensor sample grid (endpoints
// included): an inner estimate of the true range, used to measure how far
// enclosures overshoot. The OpenMP kernel and the serial reference produce
// bitwise identical results (min/max reductions are order-independent).
struct SampledRange {
  Interval interval;
  int samples_per_dim;
};

SampledRange sampled_range(const Expr& e, const Box& X, int samples_per_dim,
                           std::size_t output = 0);
SampledRange sampled_range_serial(const Expr& e, const Box& X, int samples_per_dim,
                                  std::size_t output = 0);

// Exhaustive classification of every grid cell against all measurement
// bands via direct cell sums. Exponential in the number of variables
// (hence the cap); kept as the ground truth the staircase pruning is
// checked against.
struct CellClassification {
  Grid grid;
  std::vector<BoxClass> cells;  // flattened, first coordinate slowest

  std::size_t flat_index(const std::vector<int>& cell) const;
  BoxClass at(const std::vector<int>& cell) const { return cells[flat_index(cell)]; }
};

CellClassification enumerate_cells(const IsmVector& models,
                                   const std::vector<Measurement>& measurements,
                                   std::size_t cap = 1000000);
CellClassification enumerate_cells_serial(const IsmVector& models,
                                          const std::vector<Measurement>& measurements,
                                          std::size_t cap = 1000000);

// Two-species reaction kinetics z' = M(x) z from z(0) = (1, 0):
//   z1' = -(x1 + x3) z1 + x2 z2
//   z2' =   x1 z1        - x2 z2
// integrate_kinetics returns z2(t_end) by fixed-step RK4;
// closed_form_output evaluates the analytic solution
//   y(t) = exp(-t rho / 2) x1 (exp(t sigma / 2) - exp(-t sigma / 2)) / sigma
// with rho = x1 + x2 + x3 and sigma = sqrt(rho^2 - 4 x2 x3); the two
// validate each other in the tests.
double integrate_kinetics(const std::array<double, 3>& x, double t_end, int steps);
std::array<double, 2> integrate_kinetics_states(const std::array<double, 3>& x,
                                                double t_end, int steps);
double closed_form_output(const std::array<double, 3>& x, double t);

// Round-half-even to the given number of significant digits.
double round_to_significant(double v, int digits);

}  // namespace isa
