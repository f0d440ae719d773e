#include "isa/setinv.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <optional>

namespace isa {
namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

}  // namespace

void GpeProblem::validate() const {
  if (model.n_outputs() == 0) throw std::invalid_argument("problem: no model outputs");
  if (domain.size() != model.n_vars())
    throw std::invalid_argument("problem: domain dimension mismatch");
  if (domain.is_empty()) throw std::invalid_argument("problem: empty domain");
  if (measurements.empty()) throw std::invalid_argument("problem: no measurements");
  for (const auto& m : measurements) {
    if (m.band.is_empty()) throw std::invalid_argument("problem: empty measurement band");
    if (m.output >= model.n_outputs())
      throw std::invalid_argument("problem: measurement output out of range");
  }
  if (!(epsilon > 0.0)) throw std::invalid_argument("problem: epsilon must be > 0");
  if (grid_pieces < 1) throw std::invalid_argument("problem: grid resolution must be >= 1");
}

std::vector<Interval> natural_extension(const Expr& e, const Box& X) {
  return e.eval_interval(X);
}

BoxClass classify_box(const GpeProblem& p, const Box& X, const BoundingFn& bound) {
  std::vector<Interval> enclosures;
  try {
    enclosures = bound(p.model, X);
  } catch (const DomainViolation&) {
    return BoxClass::Indeterminate;
  }
  bool all_inside = true;
  for (const auto& m : p.measurements) {
    const Interval& y = enclosures[m.output];
    if (disjoint(y, m.band)) return BoxClass::Excluded;
    all_inside = all_inside && is_subset(y, m.band);
  }
  return all_inside ? BoxClass::Interior : BoxClass::Indeterminate;
}

std::pair<Box, Box> bisect(const Box& X) {
  std::size_t widest = 0;
  double w = -1.0;
  for (std::size_t i = 0; i < X.size(); ++i) {
    const double d = diam(X[i]);
    if (d > w) {
      w = d;
      widest = i;
    }
  }
  if (!(w > 0.0)) throw std::invalid_argument("bisect: degenerate box");
  const double m = mid(X[widest]);
  std::vector<Interval> left = X.components(), right = X.components();
  left[widest] = Interval(X[widest].lo(), m);
  right[widest] = Interval(m, X[widest].hi());
  return {Box(std::move(left)), Box(std::move(right))};
}

void sort_boxes(std::vector<Box>& boxes) {
  std::sort(boxes.begin(), boxes.end(), [](const Box& a, const Box& b) {
    for (std::size_t i = 0; i < a.size(); ++i) {
      if (a[i].lo() != b[i].lo()) return a[i].lo() < b[i].lo();
      if (a[i].hi() != b[i].hi()) return a[i].hi() < b[i].hi();
    }
    return false;
  });
}

// ---------------------------------------------------------------------------
// SIVIA baseline: bisection refinement driven by the natural extension.

Subpaving sivia(const GpeProblem& p) {
  p.validate();
  const auto t0 = Clock::now();
  Subpaving out;
  std::deque<Box> queue{p.domain};
  bool budget_hit = false;

  while (!queue.empty() && !budget_hit) {
    // one FIFO level at a time; classification is pure, so a level can be
    // classified in parallel without changing the result
    std::vector<Box> wave(queue.begin(), queue.end());
    queue.clear();
    std::vector<BoxClass> cls(wave.size());
    if (p.parallel) {
#pragma omp parallel for schedule(dynamic)
      for (long i = 0; i < (long)wave.size(); ++i)
        cls[i] = classify_box(p, wave[i]);
    } else {
      for (std::size_t i = 0; i < wave.size(); ++i)
        cls[i] = classify_box(p, wave[i]);
    }
    for (std::size_t i = 0; i < wave.size(); ++i) {
      if (out.stats.iterations >= p.budget) {
        budget_hit = true;
        for (std::size_t j = i; j < wave.size(); ++j) queue.push_back(wave[j]);
        break;
      }
      ++out.stats.iterations;
      ++out.stats.boxes_tested;
      switch (cls[i]) {
        case BoxClass::Interior: out.interior.push_back(wave[i]); break;
        case BoxClass::Excluded: break;
        case BoxClass::Indeterminate:
          if (diam(wave[i]) <= p.epsilon) {
            out.boundary.push_back(wave[i]);
          } else {
            auto halves = bisect(wave[i]);
            queue.push_back(std::move(halves.first));
            queue.push_back(std::move(halves.second));
          }
          break;
      }
    }
  }

  if (budget_hit) {
    // unfinished boxes stay potentially feasible: flush to the boundary
    out.stats.budget_exceeded = true;
    for (const auto& b : queue) out.boundary.push_back(b);
  }
  if (p.parallel) {
    sort_boxes(out.interior);
    sort_boxes(out.boundary);
  }
  out.stats.wall_ms = ms_since(t0);
  return out;
}

// ---------------------------------------------------------------------------
// ISM engine: per box, build models once, prune grid cells through the
// staircase covers of every measurement, then classify the survivors by
// their cell enclosures. Indeterminate cells wider than epsilon re-enter
// the queue and are re-gridded at the same resolution.

namespace {

struct IsmOutcome {
  bool domain_violation = false;
  std::vector<Box> interior_cells;
  std::vector<Box> boundary_cells;
  std::vector<Box> requeue_cells;
  std::size_t tested = 0;
};

IsmOutcome process_box(const GpeProblem& p, const Box& box) {
  IsmOutcome out;
  std::optional<Grid> grid;
  IsmVector models;
  try {
    grid.emplace(box, p.grid_pieces);
    models = ism_of_expr(p.model, *grid);
  } catch (const DomainViolation&) {
    out.domain_violation = true;
    return out;
  } catch (const std::invalid_argument&) {  // degenerate coordinate
    out.domain_violation = true;
    return out;
  }

  std::vector<std::optional<RowPermutations>> perms(models.size());
  std::vector<StaircaseCovers> covers;
  covers.reserve(p.measurements.size());
  for (const auto& m : p.measurements) {
    if (!perms[m.output]) perms[m.output] = sort_rows(models[m.output]);
    covers.push_back(
        build_staircases(models[m.output], *perms[m.output], m.band, p.max_corners));
  }

  const std::size_t n = grid->dims();
  const int N = grid->pieces();
  std::vector<int> cell(n, 0);
  std::vector<char> have_sum(models.size());
  std::vector<Interval> sums(models.size());
  for (;;) {
    bool pruned = false;
    for (const auto& c : covers) {
      if (cells_excluded(c, cell)) {
        pruned = true;
        break;
      }
    }
    if (!pruned) {
      ++out.tested;
      std::fill(have_sum.begin(), have_sum.end(), 0);
      bool all_inside = true, excluded = false;
      for (const auto& m : p.measurements) {
        if (!have_sum[m.output]) {
          sums[m.output] = ism_cell(models[m.output], cell);
          have_sum[m.output] = 1;
        }
        const Interval& s = sums[m.output];
        if (disjoint(s, m.band)) {  // truncated covers can miss this
          excluded = true;
          break;
        }
        all_inside = all_inside && is_subset(s, m.band);
      }
      if (!excluded) {
        Box cb = grid->cell_box(cell);
        if (all_inside)
          out.interior_cells.push_back(std::move(cb));
        else if (diam(cb) <= p.epsilon)
          out.boundary_cells.push_back(std::move(cb));
        else
          out.requeue_cells.push_back(std::move(cb));
      }
    }
    // lexicographic odometer
    std::size_t i = n;
    for (;;) {
      if (i == 0) return out;
      --i;
      if (++cell[i] < N) break;
      cell[i] = 0;
    }
  }
}

}  // namespace

Subpaving ism_setinv(const GpeProblem& p) {
  p.validate();
  const auto t0 = Clock::now();
  Subpaving out;
  std::deque<Box> queue{p.domain};
  bool budget_hit = false;

  while (!queue.empty() && !budget_hit) {
    std::vector<Box> wave(queue.begin(), queue.end());
    queue.clear();
    std::vector<IsmOutcome> results(wave.size());
    if (p.parallel) {
#pragma omp parallel for schedule(dynamic)
      for (long i = 0; i < (long)wave.size(); ++i)
        results[i] = process_box(p, wave[i]);
    } else {
      for (std::size_t i = 0; i < wave.size(); ++i)
        results[i] = process_box(p, wave[i]);
    }
    for (std::size_t i = 0; i < wave.size(); ++i) {
      if (out.stats.iterations >= p.budget) {
        budget_hit = true;
        for (std::size_t j = i; j < wave.size(); ++j) queue.push_back(wave[j]);
        break;
      }
      ++out.stats.iterations;
      IsmOutcome& res = results[i];
      if (res.domain_violation) {
        ++out.stats.boxes_tested;
        if (diam(wave[i]) <= p.epsilon) {
          out.boundary.push_back(wave[i]);
        } else {
          auto halves = bisect(wave[i]);
          queue.push_back(std::move(halves.first));
          queue.push_back(std::move(halves.second));
        }
        continue;
      }
      out.stats.boxes_tested += res.tested;
      for (auto& b : res.interior_cells) out.interior.push_back(std::move(b));
      for (auto& b : res.boundary_cells) out.boundary.push_back(std::move(b));
      for (auto& b : res.requeue_cells) {
        if (b == wave[i]) {
          // a single-cell grid cannot refine further; bisect instead
          auto halves = bisect(b);
          queue.push_back(std::move(halves.first));
          queue.push_back(std::move(halves.second));
        } else {
          queue.push_back(std::move(b));
        }
      }
    }
  }

  if (budget_hit) {
    out.stats.budget_exceeded = true;
    for (const auto& b : queue) out.boundary.push_back(b);
  }
  if (p.parallel) {
    sort_boxes(out.interior);
    sort_boxes(out.boundary);
  }
  out.stats.wall_ms = ms_since(t0);
  return out;
}

Subpaving solve(const GpeProblem& p) {
  return p.engine == EngineKind::Sivia ? sivia(p) : ism_setinv(p);
}

}  // namespace isa
