#include "isa/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace isa {
namespace {

long long checked_total(double base, std::size_t dims, const char* what,
                        double cap) {
  const double total = std::pow(base, (double)dims);
  if (!(total <= cap))
    throw CapExceeded(std::string(what) + ": grid of " + std::to_string(total) +
                      " points exceeds cap");
  return (long long)total;
}

void decode(long long flat, int base, std::vector<int>& idx) {
  for (std::size_t i = idx.size(); i-- > 0;) {
    idx[i] = (int)(flat % base);
    flat /= base;
  }
}

struct RangeAccumulator {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  bool violated = false;
  std::string message;

  void feed(const Expr& e, const std::vector<double>& x, std::size_t output) {
    if (violated) return;
    try {
      const double v = e.eval_real(x)[output];
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    } catch (const DomainViolation& err) {
      violated = true;
      message = err.what();
    }
  }

  void merge(const RangeAccumulator& other) {
    lo = std::min(lo, other.lo);
    hi = std::max(hi, other.hi);
    if (other.violated && !violated) {
      violated = true;
      message = other.message;
    }
  }
};

void sample_point(const Box& X, int k, const std::vector<int>& idx,
                  std::vector<double>& x) {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (idx[i] == k - 1)
      x[i] = X[i].hi();
    else
      x[i] = X[i].lo() + idx[i] * (X[i].hi() - X[i].lo()) / (k - 1);
  }
}

}  // namespace

SampledRange sampled_range_serial(const Expr& e, const Box& X, int k,
                                  std::size_t output) {
  if (k < 2) throw std::invalid_argument("sampled_range: need >= 2 samples per dim");
  if (X.size() != e.n_vars())
    throw std::invalid_argument("sampled_range: dimension mismatch");
  const long long total = checked_total(k, X.size(), "sampled_range", 1e9);

  RangeAccumulator acc;
  std::vector<int> idx(X.size());
  std::vector<double> x(X.size());
  for (long long f = 0; f < total; ++f) {
    decode(f, k, idx);
    sample_point(X, k, idx, x);
    acc.feed(e, x, output);
  }
  if (acc.violated) throw DomainViolation(acc.message);
  return SampledRange{Interval(acc.lo, acc.hi), k};
}

SampledRange sampled_range(const Expr& e, const Box& X, int k, std::size_t output) {
  if (k < 2) throw std::invalid_argument("sampled_range: need >= 2 samples per dim");
  if (X.size() != e.n_vars())
    throw std::invalid_argument("sampled_range: dimension mismatch");
  const long long total = checked_total(k, X.size(), "sampled_range", 1e9);

  RangeAccumulator acc;
#pragma omp parallel
  {
    RangeAccumulator local;
    std::vector<int> idx(X.size());
    std::vector<double> x(X.size());
#pragma omp for nowait
    for (long long f = 0; f < total; ++f) {
      decode(f, k, idx);
      sample_point(X, k, idx, x);
      local.feed(e, x, output);
    }
#pragma omp critical
    acc.merge(local);
  }
  if (acc.violated) throw DomainViolation(acc.message);
  return SampledRange{Interval(acc.lo, acc.hi), k};
}

std::size_t CellClassification::flat_index(const std::vector<int>& cell) const {
  std::size_t f = 0;
  for (std::size_t i = 0; i < cell.size(); ++i)
    f = f * grid.pieces() + cell[i];
  return f;
}

namespace {

BoxClass classify_cell(const IsmVector& models,
                       const std::vector<Measurement>& measurements,
                       const std::vector<int>& cell) {
  bool all_inside = true;
  for (const auto& m : measurements) {
    const Interval s = ism_cell(models[m.output], cell);
    if (disjoint(s, m.band)) return BoxClass::Excluded;
    all_inside = all_inside && is_subset(s, m.band);
  }
  return all_inside ? BoxClass::Interior : BoxClass::Indeterminate;
}

void validate_enumeration_args(const IsmVector& models,
                               const std::vector<Measurement>& measurements) {
  if (models.empty()) throw std::invalid_argument("enumerate_cells: no models");
  for (std::size_t i = 1; i < models.size(); ++i)
    if (models[i].grid() != models[0].grid())
      throw GridMismatch("enumerate_cells: models on different grids");
  for (const auto& m : measurements)
    if (m.output >= models.size())
      throw std::invalid_argument("enumerate_cells: measurement output out of range");
}

// visits flat cells [begin, end) with an incremental odometer; decoding
// once per chunk keeps the per-cell cost down to the classification itself
template <typename Fn>
void walk_cells(const Grid& grid, long long begin, long long end, Fn&& fn) {
  std::vector<int> cell(grid.dims());
  decode(begin, grid.pieces(), cell);
  for (long long f = begin; f < end; ++f) {
    fn((std::size_t)f, cell);
    std::size_t i = cell.size();
    while (i-- > 0) {
      if (++cell[i] < grid.pieces()) break;
      cell[i] = 0;
    }
  }
}

}  // namespace

CellClassification enumerate_cells_serial(const IsmVector& models,
                                          const std::vector<Measurement>& measurements,
                                          std::size_t cap) {
  validate_enumeration_args(models, measurements);
  const Grid& grid = models[0].grid();
  const long long total =
      checked_total(grid.pieces(), grid.dims(), "enumerate_cells", (double)cap);

  CellClassification out{grid, std::vector<BoxClass>((std::size_t)total)};
  walk_cells(grid, 0, total, [&](std::size_t f, const std::vector<int>& cell) {
    out.cells[f] = classify_cell(models, measurements, cell);
  });
  return out;
}

CellClassification enumerate_cells(const IsmVector& models,
                                   const std::vector<Measurement>& measurements,
                                   std::size_t cap) {
  validate_enumeration_args(models, measurements);
  const Grid& grid = models[0].grid();
  const long long total =
      checked_total(grid.pieces(), grid.dims(), "enumerate_cells", (double)cap);

  CellClassification out{grid, std::vector<BoxClass>((std::size_t)total)};
#pragma omp parallel
  {
#ifdef _OPENMP
    const long long workers = omp_get_num_threads();
    const long long rank = omp_get_thread_num();
#else
    const long long workers = 1, rank = 0;
#endif
    const long long chunk = (total + workers - 1) / workers;
    const long long begin = std::min(total, rank * chunk);
    const long long end = std::min(total, begin + chunk);
    walk_cells(grid, begin, end, [&](std::size_t f, const std::vector<int>& cell) {
      out.cells[f] = classify_cell(models, measurements, cell);
    });
  }
  return out;
}

std::array<double, 2> integrate_kinetics_states(const std::array<double, 3>& x,
                                                double t_end, int steps) {
  if (steps < 100) throw std::invalid_argument("integrate_kinetics: steps < 100");
  const double k_out = x[0] + x[2];
  auto f1 = [&](double z1, double z2) { return -k_out * z1 + x[1] * z2; };
  auto f2 = [&](double z1, double z2) { return x[0] * z1 - x[1] * z2; };
  double z1 = 1.0, z2 = 0.0;
  const double h = t_end / steps;
  for (int s = 0; s < steps; ++s) {
    const double a1 = f1(z1, z2), a2 = f2(z1, z2);
    const double b1 = f1(z1 + 0.5 * h * a1, z2 + 0.5 * h * a2);
    const double b2 = f2(z1 + 0.5 * h * a1, z2 + 0.5 * h * a2);
    const double c1 = f1(z1 + 0.5 * h * b1, z2 + 0.5 * h * b2);
    const double c2 = f2(z1 + 0.5 * h * b1, z2 + 0.5 * h * b2);
    const double d1 = f1(z1 + h * c1, z2 + h * c2);
    const double d2 = f2(z1 + h * c1, z2 + h * c2);
    z1 += h / 6.0 * (a1 + 2.0 * b1 + 2.0 * c1 + d1);
    z2 += h / 6.0 * (a2 + 2.0 * b2 + 2.0 * c2 + d2);
  }
  return {z1, z2};
}

double integrate_kinetics(const std::array<double, 3>& x, double t_end, int steps) {
  return integrate_kinetics_states(x, t_end, steps)[1];
}

double closed_form_output(const std::array<double, 3>& x, double t) {
  const double rho = x[0] + x[1] + x[2];
  const double disc = rho * rho - 4.0 * x[1] * x[2];
  const double sigma = std::sqrt(std::max(disc, 0.0));
  // (exp(t s / 2) - exp(-t s / 2)) / s == 2 sinh(t s / 2) / s -> t as s -> 0
  const double shape = sigma == 0.0 ? t : 2.0 * std::sinh(0.5 * t * sigma) / sigma;
  return std::exp(-0.5 * t * rho) * x[0] * shape;
}

double round_to_significant(double v, int digits) {
  if (digits < 1) throw std::invalid_argument("round_to_significant: digits < 1");
  if (v == 0.0 || !std::isfinite(v)) return v;
  const double exponent = std::floor(std::log10(std::fabs(v)));
  const double scale = std::pow(10.0, digits - 1 - exponent);
  return std::nearbyint(v * scale) / scale;
}

}  // namespace isa
