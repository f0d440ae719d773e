#pragma once

#include <array>
#include <string>

#include "isa/setinv.hpp"
#include "isa/staircase.hpp"

namespace isa {

class SchemaError : public std::runtime_error {
 public:
  SchemaError(const std::string& field, const std::string& what)
      : std::runtime_error("problem file: field '" + field + "': " + what),
        field(field) {}
  std::string field;
};

// On-disk problem description. Variables must be named x1..xn in order;
// measurement bands are y +/- eta against the selected output expression.
struct ProblemFile {
  std::vector<std::string> variables;
  std::vector<std::string> expressions;
  std::vector<std::array<double, 2>> domain;
  struct MeasurementSpec {
    std::size_t output = 0;
    double y = 0.0;
    double eta = 0.0;
  };
  std::vector<MeasurementSpec> measurements;
  double epsilon = 1e-2;
  std::string engine = "sivia";  // "sivia" | "ism"
  int N = 2;
  int n_J_max = 64;
  long budget = 1000000;
  long seed = 0;
};

// Strict parsing: required fields present, unknown keys rejected, values
// validated before any computation. Throws SchemaError naming the field.
ProblemFile parse_problem_json(const std::string& text);
ProblemFile load_problem_file(const std::string& path);
std::string problem_to_json(const ProblemFile& pf);
void write_problem_file(const std::string& path, const ProblemFile& pf);

GpeProblem to_gpe_problem(const ProblemFile& pf);

// Two-parameter reaction-kinetics estimation problem: 15 output
// expressions (one per sample time t = 1..15, third rate fixed at 0.35),
// synthetic measurements from the analytic solution at (0.6, 0.15)
// rounded to 3 significant digits with +/- 1e-3 bands.
ProblemFile make_kinetics_case_study();

// Result artifacts; numbers carry 17 significant digits.
std::string subpaving_to_csv(const Subpaving& s, std::size_t dims);
std::string subpaving_to_json(const Subpaving& s, std::size_t dims);
std::string stats_to_json(const SolveStats& st, const std::string& engine, int N,
                          double epsilon, std::size_t interior_count,
                          std::size_t boundary_count);

// Debug dumps.
std::string interval_to_json(const Interval& iv);
std::string ism_to_json(const Ism& m);
std::string covers_to_json(const StaircaseCovers& c);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

}  // namespace isa
