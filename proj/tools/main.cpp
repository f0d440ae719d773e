#include <filesystem>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "isa/oracle.hpp"
#include "isa/problem_io.hpp"

namespace fs = std::filesystem;

namespace {

struct SolveOptions {
  std::string problem_path;
  std::string out_dir = ".";
  std::string engine;
  double epsilon = 0.0;
  int grid_n = 0;
  long budget = 0;
  int n_j_max = 0;
  bool parallel = false;
  bool have_engine = false, have_epsilon = false, have_grid_n = false,
       have_budget = false, have_n_j_max = false;
};

int run_solve(const SolveOptions& opt) {
  isa::ProblemFile pf;
  try {
    pf = isa::load_problem_file(opt.problem_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (opt.have_engine) pf.engine = opt.engine;
  if (opt.have_epsilon) pf.epsilon = opt.epsilon;
  if (opt.have_grid_n) pf.N = opt.grid_n;
  if (opt.have_budget) pf.budget = opt.budget;
  if (opt.have_n_j_max) pf.n_J_max = opt.n_j_max;
  if (pf.engine != "sivia" && pf.engine != "ism") {
    std::cerr << "error: engine must be 'sivia' or 'ism'\n";
    return 1;
  }
  if (!(pf.epsilon > 0.0) || pf.N < 1 || pf.budget < 1 || pf.n_J_max < 1) {
    std::cerr << "error: invalid solver parameters\n";
    return 1;
  }

  isa::GpeProblem p = isa::to_gpe_problem(pf);
  p.parallel = opt.parallel;
  const isa::Subpaving s = isa::solve(p);

  std::error_code ec;
  fs::create_directories(opt.out_dir, ec);
  const std::size_t dims = p.domain.size();
  isa::write_text_file((fs::path(opt.out_dir) / "subpaving.json").string(),
                       isa::subpaving_to_json(s, dims));
  isa::write_text_file((fs::path(opt.out_dir) / "subpaving.csv").string(),
                       isa::subpaving_to_csv(s, dims));
  isa::write_text_file(
      (fs::path(opt.out_dir) / "stats.json").string(),
      isa::stats_to_json(s.stats, pf.engine, pf.N, pf.epsilon, s.interior.size(),
                         s.boundary.size()));

  std::cout << "engine=" << pf.engine << " iterations=" << s.stats.iterations
            << " interior=" << s.interior.size()
            << " boundary=" << s.boundary.size() << " wall_ms=" << s.stats.wall_ms
            << (s.stats.budget_exceeded ? " (budget exceeded)" : "") << "\n";
  return s.stats.budget_exceeded ? 2 : 0;
}

int run_bench(const std::vector<int>& n_list, const std::vector<double>& xbar2_list,
              int samples, const std::string& out_path) {
  const isa::Expr f = isa::parse("exp(sin(x1) + sin(x2)*cos(x2))");
  std::ostringstream csv;
  csv << "N,xbar2,d_H\n";
  for (const double xbar2 : xbar2_list) {
    const isa::Box X{isa::Interval(0.0, 1.0), isa::Interval(0.0, xbar2)};
    const isa::SampledRange sr = isa::sampled_range(f, X, samples);
    for (const int N : n_list) {
      const isa::Ism model = isa::ism_of_expr(f, isa::Grid(X, N))[0];
      const double d = isa::hausdorff_1d(sr.interval, isa::ism_range(model));
      char row[96];
      std::snprintf(row, sizeof row, "%d,%.17g,%.17g\n", N, xbar2, d);
      csv << row;
    }
  }
  if (out_path.empty())
    std::cout << csv.str();
  else
    isa::write_text_file(out_path, csv.str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Interval superposition arithmetic and set-inversion toolkit"};
  app.require_subcommand(1);

  SolveOptions sopt;
  CLI::App* solve = app.add_subcommand(
      "solve", "Run set inversion on a problem file; writes subpaving.json, "
               "subpaving.csv and stats.json");
  solve->add_option("problem", sopt.problem_path, "problem file (JSON)")->required();
  solve->add_option("--out-dir", sopt.out_dir, "output directory");
  auto* oe = solve->add_option("--engine", sopt.engine, "sivia | ism");
  auto* oeps = solve->add_option("--epsilon", sopt.epsilon, "boundary tolerance");
  auto* ogn = solve->add_option("--grid-N", sopt.grid_n, "ISM pieces per coordinate");
  auto* ob = solve->add_option("--budget", sopt.budget, "max boxes dequeued");
  auto* oj = solve->add_option("--n-J-max", sopt.n_j_max, "staircase corner budget");
  solve->add_flag("--parallel", sopt.parallel, "classify queued boxes in parallel");

  std::vector<int> n_list{1, 10, 100};
  std::vector<double> xbar2_list{1, 5, 10, 15, 20};
  int samples = 400;
  std::string bench_out;
  CLI::App* bench = app.add_subcommand(
      "bench-hausdorff",
      "Range-enclosure overestimation of exp(sin(x1) + sin(x2)*cos(x2)) over "
      "[0,1]x[0,xbar2] for several grid resolutions; emits CSV");
  bench->add_option("--N-list", n_list, "grid resolutions")->delimiter(',');
  bench->add_option("--xbar2-list", xbar2_list, "domain heights")->delimiter(',');
  bench->add_option("--samples", samples, "sample points per dimension");
  bench->add_option("--out", bench_out, "CSV path (stdout if omitted)");

  std::string gen_out = "case_study.json";
  CLI::App* gen = app.add_subcommand(
      "generate-case-study",
      "Write the reaction-kinetics estimation problem with synthetic measurements");
  gen->add_option("--out", gen_out, "output problem file");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve->parsed()) {
      sopt.have_engine = oe->count() > 0;
      sopt.have_epsilon = oeps->count() > 0;
      sopt.have_grid_n = ogn->count() > 0;
      sopt.have_budget = ob->count() > 0;
      sopt.have_n_j_max = oj->count() > 0;
      return run_solve(sopt);
    }
    if (bench->parsed()) return run_bench(n_list, xbar2_list, samples, bench_out);
    if (gen->parsed()) {
      isa::write_problem_file(gen_out, isa::make_kinetics_case_study());
      std::cout << "wrote " << gen_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
