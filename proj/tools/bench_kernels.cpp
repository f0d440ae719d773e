// Compares the OpenMP kernels against their serial reference
// implementations: same results expected, wall time reported.

#include <chrono>
#include <cstdio>
#include <functional>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "isa/oracle.hpp"
#include "isa/problem_io.hpp"

using Clock = std::chrono::steady_clock;

namespace {

double time_ms(const std::function<void()>& fn) {
  const auto t0 = Clock::now();
  fn();
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void report(const char* name, double serial_ms, double parallel_ms, bool equal) {
  std::printf("%-28s serial %9.2f ms   parallel %9.2f ms   speedup %5.2fx   %s\n",
              name, serial_ms, parallel_ms, serial_ms / parallel_ms,
              equal ? "results equal" : "RESULTS DIFFER");
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("OpenMP with %d threads\n\n", omp_get_max_threads());
#else
  std::printf("built without OpenMP; parallel paths run serially\n\n");
#endif

  {
    const isa::Expr f = isa::parse("exp(sin(x1) + sin(x2)*cos(x2))");
    const isa::Box X{isa::Interval(0.0, 1.0), isa::Interval(0.0, 20.0)};
    isa::SampledRange a{isa::Interval(0, 0), 0}, b = a;
    const double ts = time_ms([&] { a = isa::sampled_range_serial(f, X, 1500); });
    const double tp = time_ms([&] { b = isa::sampled_range(f, X, 1500); });
    report("sampled_range (1500^2)", ts, tp, a.interval == b.interval);
  }

  {
    const isa::ProblemFile pf = isa::make_kinetics_case_study();
    const isa::GpeProblem p = isa::to_gpe_problem(pf);
    const isa::Grid grid(p.domain, 1000);
    const isa::IsmVector models = isa::ism_of_expr(p.model, grid);
    isa::CellClassification a{grid, {}}, b{grid, {}};
    const double ts = time_ms(
        [&] { a = isa::enumerate_cells_serial(models, p.measurements, 2000000); });
    const double tp =
        time_ms([&] { b = isa::enumerate_cells(models, p.measurements, 2000000); });
    report("enumerate_cells (1000^2 x15)", ts, tp, a.cells == b.cells);
  }

  {
    isa::GpeProblem p = isa::to_gpe_problem(isa::make_kinetics_case_study());
    p.epsilon = 2e-4;
    isa::Subpaving a, b;
    p.parallel = false;
    const double ts = time_ms([&] { a = isa::sivia(p); });
    p.parallel = true;
    const double tp = time_ms([&] { b = isa::sivia(p); });
    isa::sort_boxes(a.interior);
    isa::sort_boxes(a.boundary);
    const bool equal = a.interior == b.interior && a.boundary == b.boundary;
    report("sivia case study", ts, tp, equal);
  }

  {
    isa::GpeProblem p = isa::to_gpe_problem(isa::make_kinetics_case_study());
    p.engine = isa::EngineKind::IsmStaircase;
    p.epsilon = 2e-4;
    isa::Subpaving a, b;
    p.parallel = false;
    const double ts = time_ms([&] { a = isa::ism_setinv(p); });
    p.parallel = true;
    const double tp = time_ms([&] { b = isa::ism_setinv(p); });
    isa::sort_boxes(a.interior);
    isa::sort_boxes(a.boundary);
    const bool equal = a.interior == b.interior && a.boundary == b.boundary;
    report("ism_setinv case study", ts, tp, equal);
  }

  return 0;
}
