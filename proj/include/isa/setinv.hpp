#pragma once

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "isa/expr.hpp"
#include "isa/interval.hpp"
#include "isa/ism.hpp"
#include "isa/staircase.hpp"

namespace isa {

enum class EngineKind { Sivia, IsmStaircase };

struct Measurement {
  std::size_t output;  // model output the band constrains
  Interval band;
};

struct GpeProblem {
  Expr model;
  Box domain;
  std::vector<Measurement> measurements;
  double epsilon = 1e-2;
  EngineKind engine = EngineKind::Sivia;
  int grid_pieces = 2;         // ISM resolution per coordinate
  std::size_t max_corners = 64;
  std::size_t budget = 1000000;  // dequeued boxes before giving up
  bool parallel = false;

  void validate() const;
};

enum class BoxClass { Interior, Excluded, Indeterminate };

struct SolveStats {
  std::size_t iterations = 0;    // boxes dequeued and processed
  std::size_t boxes_tested = 0;  // membership tests (boxes or grid cells)
  double wall_ms = 0.0;
  bool budget_exceeded = false;
};

// Inner/boundary partition of the feasible set: every interior box is
// provably feasible for all measurements, everything outside
// interior+boundary is provably infeasible. On normal termination every
// boundary box has diameter <= epsilon; on budget exhaustion unfinished
// boxes are flushed to the boundary so the sandwich still holds.
struct Subpaving {
  std::vector<Box> interior;
  std::vector<Box> boundary;
  SolveStats stats;
};

using BoundingFn = std::function<std::vector<Interval>(const Expr&, const Box&)>;

// Natural interval extension, the baseline bounding strategy.
std::vector<Interval> natural_extension(const Expr& e, const Box& X);

// Membership test against every measurement band: Interior when each
// output enclosure is inside its band, Excluded when some enclosure is
// disjoint from its band, Indeterminate otherwise (including any domain
// violation while bounding).
BoxClass classify_box(const GpeProblem& p, const Box& X,
                      const BoundingFn& bound = natural_extension);

// Split at the midpoint of the widest coordinate (lowest index on ties).
std::pair<Box, Box> bisect(const Box& X);

Subpaving sivia(const GpeProblem& p);
Subpaving ism_setinv(const GpeProblem& p);
Subpaving solve(const GpeProblem& p);

// Canonical ordering used to make parallel-mode output reproducible.
void sort_boxes(std::vector<Box>& boxes);

}  // namespace isa
