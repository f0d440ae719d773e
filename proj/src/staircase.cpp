#include "isa/staircase.hpp"

#include <algorithm>
#include <numeric>

namespace isa {
namespace {

// Directed accumulation matching ism_cell bit-for-bit: exclusion-above
// sums lower bounds rounding down (so the tested sum never exceeds the
// true one), exclusion-below sums upper bounds rounding up.
double step_exact(double acc, double v, bool above) {
  return above ? add_down(acc, v) : add_up(acc, v);
}
double step_optimistic(double acc, double v, bool above) {
  return above ? add_up(acc, v) : add_down(acc, v);
}
bool passes(double total, double threshold, bool above) {
  return above ? total > threshold : total < threshold;
}

// Enumerates maximal corners (in sorted-position space) of the
// downward-closed region where the directed row sums pass the strict
// threshold test. rows[i] holds the sorted-position values of row i:
// position 0 is the most extreme value, so passing is monotone
// (downward-closed) in every position.
class FrontierEnumerator {
 public:
  FrontierEnumerator(const std::vector<std::vector<double>>& rows,
                     double threshold, bool above, std::size_t raw_cap)
      : rows_(rows), threshold_(threshold), above_(above), raw_cap_(raw_cap) {}

  std::vector<std::vector<int>> run() {
    prefix_.assign(rows_.size(), 0);
    recurse(0, 0.0);
    prune_dominated();
    return std::move(corners_);
  }

 private:
  void recurse(std::size_t i, double acc) {
    if (corners_.size() >= raw_cap_) return;
    const auto& row = rows_[i];
    const int N = static_cast<int>(row.size());
    if (i + 1 == rows_.size()) {
      // last coordinate: the largest passing position is the unique
      // maximal choice given the prefix
      for (int p = N - 1; p >= 0; --p) {
        if (passes(step_exact(acc, row[p], above_), threshold_, above_)) {
          prefix_[i] = p;
          corners_.push_back(prefix_);
          return;
        }
      }
      return;
    }
    for (int p = N - 1; p >= 0; --p) {
      // optimistic completion with every remaining row at its best position
      double opt = step_optimistic(acc, row[p], above_);
      for (std::size_t l = i + 1; l < rows_.size(); ++l)
        opt = step_optimistic(opt, rows_[l][0], above_);
      if (!passes(opt, threshold_, above_)) continue;
      prefix_[i] = p;
      const std::size_t before = corners_.size();
      recurse(i + 1, step_exact(acc, row[p], above_));
      if (corners_.size() >= raw_cap_) return;
      // a corner maxed out in all later coordinates dominates every
      // smaller p at this level
      if (corners_.size() > before) {
        bool saturated = true;
        const auto& last = corners_.back();
        for (std::size_t l = i + 1; l < rows_.size(); ++l)
          saturated = saturated && last[l] + 1 == (int)rows_[l].size();
        if (saturated) return;
      }
    }
  }

  void prune_dominated() {
    std::vector<std::vector<int>> keep;
    for (std::size_t k = 0; k < corners_.size(); ++k) {
      bool dominated = false;
      for (std::size_t l = 0; l < corners_.size() && !dominated; ++l) {
        if (l == k) continue;
        bool le = true, lt = false;
        for (std::size_t i = 0; i < corners_[k].size(); ++i) {
          le = le && corners_[k][i] <= corners_[l][i];
          lt = lt || corners_[k][i] < corners_[l][i];
        }
        dominated = le && (lt || l < k);  // drop exact duplicates once
      }
      if (!dominated) keep.push_back(corners_[k]);
    }
    corners_ = std::move(keep);
  }

  const std::vector<std::vector<double>>& rows_;
  double threshold_;
  bool above_;
  std::size_t raw_cap_;
  std::vector<int> prefix_;
  std::vector<std::vector<int>> corners_;
};

std::vector<std::vector<int>> enumerate_corners(
    const std::vector<std::vector<double>>& rows, double threshold, bool above,
    std::size_t max_corners) {
  const std::size_t raw_cap = max_corners == kUnboundedCorners
                                  ? kUnboundedCorners
                                  : max_corners * 4 + 16;
  FrontierEnumerator fe(rows, threshold, above, raw_cap);
  std::vector<std::vector<int>> corners = fe.run();
  if (corners.size() > max_corners) {
    // keep the corners covering the most cells; deterministic tie-break
    std::stable_sort(corners.begin(), corners.end(),
                     [](const std::vector<int>& a, const std::vector<int>& b) {
                       double ca = 0.0, cb = 0.0;
                       for (int v : a) ca += std::log1p((double)v);
                       for (int v : b) cb += std::log1p((double)v);
                       if (ca != cb) return ca > cb;
                       return a > b;
                     });
    corners.resize(max_corners);
  }
  return corners;
}

}  // namespace

RowPermutations sort_rows(const Ism& a) {
  const std::size_t n = a.rows();
  const int N = a.cols();
  RowPermutations p;
  p.pi_lower.resize(n);
  p.pi_upper.resize(n);
  p.rank_lower.resize(n);
  p.rank_upper.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<int> lower(N), upper(N);
    std::iota(lower.begin(), lower.end(), 0);
    std::iota(upper.begin(), upper.end(), 0);
    std::stable_sort(lower.begin(), lower.end(), [&](int x, int y) {
      return a.at(i, x).lo() > a.at(i, y).lo();
    });
    std::stable_sort(upper.begin(), upper.end(), [&](int x, int y) {
      return a.at(i, x).hi() < a.at(i, y).hi();
    });
    p.rank_lower[i].resize(N);
    p.rank_upper[i].resize(N);
    for (int pos = 0; pos < N; ++pos) {
      p.rank_lower[i][lower[pos]] = pos;
      p.rank_upper[i][upper[pos]] = pos;
    }
    p.pi_lower[i] = std::move(lower);
    p.pi_upper[i] = std::move(upper);
  }
  return p;
}

StaircaseCovers build_staircases(const Ism& a, const RowPermutations& perms,
                                 const Interval& band, std::size_t max_corners) {
  if (band.is_empty())
    throw std::invalid_argument("build_staircases: empty band");
  const std::size_t n = a.rows();
  const int N = a.cols();

  std::vector<std::vector<double>> lower_sorted(n), upper_sorted(n);
  for (std::size_t i = 0; i < n; ++i) {
    lower_sorted[i].resize(N);
    upper_sorted[i].resize(N);
    for (int pos = 0; pos < N; ++pos) {
      lower_sorted[i][pos] = a.at(i, perms.pi_lower[i][pos]).lo();
      upper_sorted[i][pos] = a.at(i, perms.pi_upper[i][pos]).hi();
    }
  }

  StaircaseCovers covers{a.grid(), perms, {}, {}};
  covers.above_corners =
      enumerate_corners(lower_sorted, band.hi(), /*above=*/true, max_corners);
  covers.below_corners =
      enumerate_corners(upper_sorted, band.lo(), /*above=*/false, max_corners);
  return covers;
}

bool cells_excluded(const StaircaseCovers& covers, const std::vector<int>& cell) {
  const std::size_t n = cell.size();
  auto under_some_corner = [&](const std::vector<std::vector<int>>& corners,
                               const std::vector<std::vector<int>>& rank) {
    for (const auto& corner : corners) {
      bool under = true;
      for (std::size_t i = 0; i < n && under; ++i)
        under = rank[i][cell[i]] <= corner[i];
      if (under) return true;
    }
    return false;
  };
  return under_some_corner(covers.above_corners, covers.perms.rank_lower) ||
         under_some_corner(covers.below_corners, covers.perms.rank_upper);
}

SurvivingCellCursor::SurvivingCellCursor(const StaircaseCovers& covers)
    : covers_(covers), current_(covers.grid.dims(), 0) {
  current_.back() = -1;  // pre-first position
}

bool SurvivingCellCursor::next(std::vector<int>& cell) {
  if (done_) return false;
  const int N = covers_.grid.pieces();
  for (;;) {
    // lexicographic odometer
    std::size_t i = current_.size();
    for (;;) {
      if (i == 0) {
        done_ = true;
        return false;
      }
      --i;
      if (++current_[i] < N) break;
      current_[i] = 0;
    }
    if (!cells_excluded(covers_, current_)) {
      cell = current_;
      return true;
    }
  }
}

std::vector<std::vector<int>> surviving_cells(const StaircaseCovers& covers) {
  std::vector<std::vector<int>> out;
  SurvivingCellCursor cursor(covers);
  std::vector<int> cell;
  while (cursor.next(cell)) out.push_back(cell);
  return out;
}

}  // namespace isa
