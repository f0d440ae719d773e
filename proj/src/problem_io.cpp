#include "isa/problem_io.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "isa/oracle.hpp"
#include "json.hpp"

namespace isa {
namespace {

using nlohmann::json;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

// shortest decimal that round-trips; used where files are meant to be read
std::string fmt_shortest(double v) {
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) return buf;
  }
  return buf;
}

void reject_unknown_keys(const json& obj, std::initializer_list<const char*> known,
                         const std::string& where) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    bool ok = false;
    for (const char* k : known) ok = ok || it.key() == k;
    if (!ok) throw SchemaError(where.empty() ? it.key() : where + "." + it.key(),
                               "unknown key");
  }
}

double require_finite_number(const json& v, const std::string& field) {
  if (!v.is_number()) throw SchemaError(field, "expected a number");
  const double d = v.get<double>();
  if (!std::isfinite(d)) throw SchemaError(field, "must be finite");
  return d;
}

long require_integer(const json& v, const std::string& field) {
  if (!v.is_number_integer()) throw SchemaError(field, "expected an integer");
  return v.get<long>();
}

}  // namespace

ProblemFile parse_problem_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw SchemaError("<document>", std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw SchemaError("<document>", "expected a JSON object");
  reject_unknown_keys(doc,
                      {"variables", "expressions", "domain", "measurements",
                       "epsilon", "engine", "N", "n_J_max", "budget", "seed"},
                      "");
  for (const char* req : {"variables", "expressions", "domain", "measurements", "epsilon"})
    if (!doc.contains(req)) throw SchemaError(req, "missing required field");

  ProblemFile pf;

  if (!doc["variables"].is_array() || doc["variables"].empty())
    throw SchemaError("variables", "expected a non-empty array of names");
  for (std::size_t i = 0; i < doc["variables"].size(); ++i) {
    const json& v = doc["variables"][i];
    if (!v.is_string()) throw SchemaError("variables", "entries must be strings");
    const std::string expected = "x" + std::to_string(i + 1);
    if (v.get<std::string>() != expected)
      throw SchemaError("variables", "variable " + std::to_string(i) +
                                         " must be named '" + expected + "'");
    pf.variables.push_back(v.get<std::string>());
  }

  if (!doc["expressions"].is_array() || doc["expressions"].empty())
    throw SchemaError("expressions", "expected a non-empty array of strings");
  for (const json& e : doc["expressions"]) {
    if (!e.is_string()) throw SchemaError("expressions", "entries must be strings");
    pf.expressions.push_back(e.get<std::string>());
  }

  if (!doc["domain"].is_array() || doc["domain"].size() != pf.variables.size())
    throw SchemaError("domain", "expected one [lo, hi] pair per variable");
  for (const json& c : doc["domain"]) {
    if (!c.is_array() || c.size() != 2)
      throw SchemaError("domain", "entries must be [lo, hi] pairs");
    const double lo = require_finite_number(c[0], "domain");
    const double hi = require_finite_number(c[1], "domain");
    if (!(lo < hi)) throw SchemaError("domain", "needs lo < hi per coordinate");
    pf.domain.push_back({lo, hi});
  }

  if (!doc["measurements"].is_array() || doc["measurements"].empty())
    throw SchemaError("measurements", "expected a non-empty array");
  for (const json& m : doc["measurements"]) {
    if (!m.is_object()) throw SchemaError("measurements", "entries must be objects");
    reject_unknown_keys(m, {"output", "y", "eta"}, "measurements");
    for (const char* req : {"output", "y", "eta"})
      if (!m.contains(req))
        throw SchemaError(std::string("measurements.") + req, "missing required field");
    ProblemFile::MeasurementSpec spec;
    const long output = require_integer(m["output"], "measurements.output");
    if (output < 0 || output >= (long)pf.expressions.size())
      throw SchemaError("measurements.output", "index outside expressions array");
    spec.output = (std::size_t)output;
    spec.y = require_finite_number(m["y"], "measurements.y");
    spec.eta = require_finite_number(m["eta"], "measurements.eta");
    if (spec.eta < 0.0) throw SchemaError("measurements.eta", "must be >= 0");
    pf.measurements.push_back(spec);
  }

  pf.epsilon = require_finite_number(doc["epsilon"], "epsilon");
  if (!(pf.epsilon > 0.0)) throw SchemaError("epsilon", "must be > 0");

  if (doc.contains("engine")) {
    if (!doc["engine"].is_string()) throw SchemaError("engine", "expected a string");
    pf.engine = doc["engine"].get<std::string>();
    if (pf.engine != "sivia" && pf.engine != "ism")
      throw SchemaError("engine", "must be 'sivia' or 'ism'");
  }
  if (doc.contains("N")) {
    pf.N = (int)require_integer(doc["N"], "N");
    if (pf.N < 1) throw SchemaError("N", "must be >= 1");
  }
  if (doc.contains("n_J_max")) {
    pf.n_J_max = (int)require_integer(doc["n_J_max"], "n_J_max");
    if (pf.n_J_max < 1) throw SchemaError("n_J_max", "must be >= 1");
  }
  if (doc.contains("budget")) {
    pf.budget = require_integer(doc["budget"], "budget");
    if (pf.budget < 1) throw SchemaError("budget", "must be >= 1");
  }
  if (doc.contains("seed")) pf.seed = require_integer(doc["seed"], "seed");

  // expressions must parse and respect the variable count
  try {
    (void)parse_many(pf.expressions, pf.variables.size());
  } catch (const ParseError& e) {
    throw SchemaError("expressions", e.what());
  } catch (const std::invalid_argument&) {
    throw SchemaError("expressions", "uses more variables than declared");
  }
  return pf;
}

ProblemFile load_problem_file(const std::string& path) {
  return parse_problem_json(read_text_file(path));
}

std::string problem_to_json(const ProblemFile& pf) {
  json doc;
  doc["variables"] = pf.variables;
  doc["expressions"] = pf.expressions;
  doc["domain"] = json::array();
  for (const auto& c : pf.domain) doc["domain"].push_back({c[0], c[1]});
  doc["measurements"] = json::array();
  for (const auto& m : pf.measurements)
    doc["measurements"].push_back(
        {{"output", m.output}, {"y", m.y}, {"eta", m.eta}});
  doc["epsilon"] = pf.epsilon;
  doc["engine"] = pf.engine;
  doc["N"] = pf.N;
  doc["n_J_max"] = pf.n_J_max;
  doc["budget"] = pf.budget;
  doc["seed"] = pf.seed;
  return doc.dump(2) + "\n";
}

void write_problem_file(const std::string& path, const ProblemFile& pf) {
  write_text_file(path, problem_to_json(pf));
}

GpeProblem to_gpe_problem(const ProblemFile& pf) {
  GpeProblem p;
  p.model = parse_many(pf.expressions, pf.variables.size());
  std::vector<Interval> comps;
  comps.reserve(pf.domain.size());
  for (const auto& c : pf.domain) comps.emplace_back(c[0], c[1]);
  p.domain = Box(std::move(comps));
  for (const auto& m : pf.measurements)
    p.measurements.push_back(
        {m.output, Interval(m.y - m.eta, m.y + m.eta)});
  p.epsilon = pf.epsilon;
  p.engine = pf.engine == "ism" ? EngineKind::IsmStaircase : EngineKind::Sivia;
  p.grid_pieces = pf.N;
  p.max_corners = (std::size_t)pf.n_J_max;
  p.budget = (std::size_t)pf.budget;
  return p;
}

ProblemFile make_kinetics_case_study() {
  constexpr double x3 = 0.35;
  constexpr int n_times = 15;
  const std::array<double, 3> x_true{0.6, 0.15, x3};

  // sigma^2 = rho^2 - 4 x2 x3 written as (x1 + x2 - x3)^2 + 4 x1 x3: each
  // parameter shows up once under the square (whose base stays positive on
  // the domain), so the interval range of sigma is exact
  const std::string sigma = "sqrt((x1 + x2 - " + fmt_shortest(x3) + ")^2 + " +
                            fmt_shortest(4.0 * x3) + "*x1)";
  const std::string rho = "(x1 + x2 + " + fmt_shortest(x3) + ")";
  ProblemFile pf;
  pf.variables = {"x1", "x2"};
  for (int t = 1; t <= n_times; ++t) {
    // exp(-t rho/2) (exp(t s/2) - exp(-t s/2)) collapsed into two
    // exponentials of the decay rates; fewer correlated factors keeps
    // interval evaluation tight
    const std::string th = fmt_shortest(0.5 * t);
    pf.expressions.push_back("x1 * (exp(-" + th + "*" + rho + " + " + th + "*" +
                             sigma + ") - exp(-" + th + "*" + rho + " - " + th +
                             "*" + sigma + ")) / " + sigma);
    ProblemFile::MeasurementSpec m;
    m.output = (std::size_t)(t - 1);
    m.y = round_to_significant(closed_form_output(x_true, (double)t), 3);
    m.eta = 1e-3;
    pf.measurements.push_back(m);
  }
  pf.domain = {{0.5, 0.7}, {0.1, 0.2}};
  pf.epsilon = 1e-3;
  pf.engine = "sivia";
  pf.N = 2;
  return pf;
}

std::string subpaving_to_csv(const Subpaving& s, std::size_t dims) {
  std::ostringstream os;
  os << "class";
  for (std::size_t i = 1; i <= dims; ++i) os << ",lo_" << i << ",hi_" << i;
  os << "\n";
  auto emit = [&](const char* cls, const std::vector<Box>& boxes) {
    for (const auto& b : boxes) {
      os << cls;
      for (std::size_t i = 0; i < b.size(); ++i)
        os << "," << fmt17(b[i].lo()) << "," << fmt17(b[i].hi());
      os << "\n";
    }
  };
  emit("interior", s.interior);
  emit("boundary", s.boundary);
  return os.str();
}

namespace {

void append_box_list(std::ostringstream& os, const std::vector<Box>& boxes) {
  os << "[";
  for (std::size_t k = 0; k < boxes.size(); ++k) {
    if (k) os << ",";
    os << "[";
    for (std::size_t i = 0; i < boxes[k].size(); ++i) {
      if (i) os << ",";
      os << "[" << fmt17(boxes[k][i].lo()) << "," << fmt17(boxes[k][i].hi()) << "]";
    }
    os << "]";
  }
  os << "]";
}

}  // namespace

std::string subpaving_to_json(const Subpaving& s, std::size_t dims) {
  std::ostringstream os;
  os << "{\n  \"dims\": " << dims << ",\n  \"interior\": ";
  append_box_list(os, s.interior);
  os << ",\n  \"boundary\": ";
  append_box_list(os, s.boundary);
  os << ",\n  \"stats\": {\"iterations\": " << s.stats.iterations
     << ", \"boxes_tested\": " << s.stats.boxes_tested
     << ", \"wall_ms\": " << fmt17(s.stats.wall_ms) << ", \"budget_exceeded\": "
     << (s.stats.budget_exceeded ? "true" : "false") << "}\n}\n";
  return os.str();
}

std::string stats_to_json(const SolveStats& st, const std::string& engine, int N,
                          double epsilon, std::size_t interior_count,
                          std::size_t boundary_count) {
  std::ostringstream os;
  os << "{\n"
     << "  \"engine\": \"" << engine << "\",\n"
     << "  \"N\": " << N << ",\n"
     << "  \"epsilon\": " << fmt17(epsilon) << ",\n"
     << "  \"iterations\": " << st.iterations << ",\n"
     << "  \"interior_count\": " << interior_count << ",\n"
     << "  \"boundary_count\": " << boundary_count << ",\n"
     << "  \"wall_ms\": " << fmt17(st.wall_ms) << "\n"
     << "}\n";
  return os.str();
}

std::string interval_to_json(const Interval& iv) {
  if (iv.is_empty()) return "null";
  return "[" + fmt17(iv.lo()) + "," + fmt17(iv.hi()) + "]";
}

std::string ism_to_json(const Ism& m) {
  std::ostringstream os;
  os << "{\"domain\":[";
  for (std::size_t i = 0; i < m.grid().dims(); ++i) {
    if (i) os << ",";
    os << interval_to_json(m.grid().domain()[i]);
  }
  os << "],\"N\":" << m.grid().pieces() << ",\"A\":[";
  for (std::size_t i = 0; i < m.rows(); ++i) {
    if (i) os << ",";
    os << "[";
    for (int j = 0; j < m.cols(); ++j) {
      if (j) os << ",";
      os << interval_to_json(m.at(i, j));
    }
    os << "]";
  }
  os << "]}";
  return os.str();
}

std::string covers_to_json(const StaircaseCovers& c) {
  json doc;
  doc["corners_above"] = c.above_corners;
  doc["corners_below"] = c.below_corners;
  doc["perms"] = {{"pi_lower", c.perms.pi_lower}, {"pi_upper", c.perms.pi_upper}};
  return doc.dump();
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read file: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write file: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

}  // namespace isa
