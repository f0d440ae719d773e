#pragma once

#include <cstddef>
#include <limits>
#include <vector>

#include "isa/interval.hpp"
#include "isa/ism.hpp"

namespace isa {

// Per-row sorting of model coefficients:
//   pi_lower[i]: columns ordered by DECREASING lower bound,
//   pi_upper[i]: columns ordered by INCREASING upper bound,
// with rank_* holding the inverse maps (column -> sorted position).
// Sorts are stable, so equal bounds keep their original column order.
//
// Note on orientation: pairing the decreasing lower-bound order with the
// "sum of lower bounds exceeds the band" test (and the increasing
// upper-bound order with "sum of upper bounds below the band") is what
// makes every covered cell provably infeasible; this is the orientation
// the exclusion proof needs, and it is validated against exhaustive
// per-cell checks in the tests.
struct RowPermutations {
  std::vector<std::vector<int>> pi_lower;
  std::vector<std::vector<int>> pi_upper;
  std::vector<std::vector<int>> rank_lower;
  std::vector<std::vector<int>> rank_upper;
};

RowPermutations sort_rows(const Ism& a);

// Staircase covers of the provably infeasible region. Corners are index
// vectors in SORTED position space; a corner p covers every cell whose
// sorted positions are componentwise <= p. above_corners cover cells whose
// enclosure lies strictly above the band, below_corners strictly below.
// Any subset of valid corners stays sound, so truncation only loses
// pruning power, never correctness.
struct StaircaseCovers {
  Grid grid;
  RowPermutations perms;
  std::vector<std::vector<int>> above_corners;
  std::vector<std::vector<int>> below_corners;
};

constexpr std::size_t kUnboundedCorners = std::numeric_limits<std::size_t>::max();

// Enumerates the Pareto frontier of maximal valid corners (exact for an
// unbounded corner budget; capped enumeration otherwise).
StaircaseCovers build_staircases(const Ism& a, const RowPermutations& perms,
                                 const Interval& band,
                                 std::size_t max_corners = 64);

// True iff the cell (original column indices) lies under some corner,
// i.e. it is provably disjoint from the band.
bool cells_excluded(const StaircaseCovers& covers, const std::vector<int>& cell);

// Lexicographic cursor over the cells NOT excluded by the covers; the
// excluded region is never materialized.
class SurvivingCellCursor {
 public:
  explicit SurvivingCellCursor(const StaircaseCovers& covers);
  // Writes the next surviving cell into `cell`; false when exhausted.
  bool next(std::vector<int>& cell);

 private:
  const StaircaseCovers& covers_;
  std::vector<int> current_;
  bool done_ = false;
};

std::vector<std::vector<int>> surviving_cells(const StaircaseCovers& covers);

}  // namespace isa
