#include "isa/ism.hpp"

#include <algorithm>
#include <cmath>

namespace isa {
namespace {

const Interval kOne(1.0, 1.0);
const Interval kZero(0.0, 0.0);

void require_same_grid(const Ism& a, const Ism& b, const char* op) {
  if (a.grid() != b.grid())
    throw GridMismatch(std::string(op) + ": operands live on different grids");
}

void require_finite(const std::vector<Interval>& coeffs, const char* op) {
  for (const auto& c : coeffs) {
    if (c.is_empty() || !std::isfinite(c.lo()) || !std::isfinite(c.hi()))
      throw DomainViolation(std::string(op) + ": non-finite model coefficient");
  }
}

// atom domain admissibility for a whole range
void check_atom_domain(AtomTag tag, const Interval& range) {
  switch (tag) {
    case AtomTag::Log:
      if (!(range.lo() > 0.0))
        throw DomainViolation("log: model range not strictly positive");
      return;
    case AtomTag::Sqrt:
      if (range.lo() < 0.0)
        throw DomainViolation("sqrt: model range has negative part");
      return;
    case AtomTag::Recip:
      if (contains(range, 0.0))
        throw DomainViolation("recip: model range contains zero");
      return;
    default:
      return;
  }
}

}  // namespace

Grid::Grid(Box domain, int pieces) : domain_(std::move(domain)), n_(pieces) {
  if (n_ < 1) throw std::invalid_argument("Grid: pieces must be >= 1");
  h_.resize(domain_.size());
  for (std::size_t i = 0; i < domain_.size(); ++i) {
    const Interval& c = domain_[i];
    if (c.is_empty() || !std::isfinite(c.lo()) || !std::isfinite(c.hi()))
      throw std::invalid_argument("Grid: domain must be finite and non-empty");
    h_[i] = (c.hi() - c.lo()) / n_;
    if (!(h_[i] > 0.0))
      throw std::invalid_argument("Grid: degenerate domain coordinate");
  }
}

Interval Grid::cell(std::size_t i, int j) const {
  const double lo = domain_[i].lo();
  const double a = lo + j * h_[i];
  const double b = j + 1 == n_ ? domain_[i].hi() : lo + (j + 1) * h_[i];
  return Interval(std::min(a, b), std::max(a, b));
}

Box Grid::cell_box(const std::vector<int>& j) const {
  if (j.size() != dims()) throw std::invalid_argument("cell_box: bad index size");
  std::vector<Interval> comps(dims());
  for (std::size_t i = 0; i < dims(); ++i) {
    if (j[i] < 0 || j[i] >= n_) throw std::out_of_range("cell_box: index out of range");
    comps[i] = cell(i, j[i]);
  }
  return Box(std::move(comps));
}

int Grid::cell_index(std::size_t i, double x) const {
  const int j = static_cast<int>(std::floor((x - domain_[i].lo()) / h_[i]));
  return std::clamp(j, 0, n_ - 1);
}

Ism::Ism(Grid grid, std::vector<Interval> coeffs)
    : grid_(std::move(grid)), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() != grid_.dims() * static_cast<std::size_t>(grid_.pieces()))
    throw std::invalid_argument("Ism: coefficient count does not match grid");
  require_finite(coeffs_, "Ism");
}

double Ism::row_min(std::size_t row) const {
  double m = at(row, 0).lo();
  for (int j = 1; j < cols(); ++j) m = std::min(m, at(row, j).lo());
  return m;
}

double Ism::row_max(std::size_t row) const {
  double m = at(row, 0).hi();
  for (int j = 1; j < cols(); ++j) m = std::max(m, at(row, j).hi());
  return m;
}

Ism ism_var(const Grid& grid, std::size_t var_index) {
  if (var_index >= grid.dims())
    throw std::out_of_range("ism_var: variable index out of range");
  const int N = grid.pieces();
  std::vector<Interval> coeffs(grid.dims() * N, Interval(0.0, 0.0));
  for (int j = 0; j < N; ++j) {
    const Interval c = grid.cell(var_index, j);
    // pad two steps so boundary points survive floating-point cell assignment
    coeffs[var_index * N + j] =
        Interval(round_down(round_down(c.lo())), round_up(round_up(c.hi())));
  }
  return Ism(grid, std::move(coeffs));
}

Ism ism_const(const Grid& grid, const Interval& c) {
  if (c.is_empty()) throw std::invalid_argument("ism_const: empty constant");
  const int N = grid.pieces();
  std::vector<Interval> coeffs(grid.dims() * N, Interval(0.0, 0.0));
  for (int j = 0; j < N; ++j) coeffs[j] = c;
  return Ism(grid, std::move(coeffs));
}

Ism ism_add(const Ism& a, const Ism& b) {
  require_same_grid(a, b, "ism_add");
  std::vector<Interval> coeffs(a.coefficients().size());
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    coeffs[k] = add(a.coefficients()[k], b.coefficients()[k]);
  return Ism(a.grid(), std::move(coeffs));
}

Ism ism_neg(const Ism& a) {
  std::vector<Interval> coeffs(a.coefficients().size());
  for (std::size_t k = 0; k < coeffs.size(); ++k) coeffs[k] = neg(a.coefficients()[k]);
  return Ism(a.grid(), std::move(coeffs));
}

Ism ism_sub(const Ism& a, const Ism& b) { return ism_add(a, ism_neg(b)); }

Ism ism_scalar_mul(double c, const Ism& a) {
  std::vector<Interval> coeffs(a.coefficients().size());
  for (std::size_t k = 0; k < coeffs.size(); ++k)
    coeffs[k] = scalar_mul(c, a.coefficients()[k]);
  return Ism(a.grid(), std::move(coeffs));
}

namespace {

// Interval enclosure of the atom's derivative over the given range;
// throws DomainViolation where the derivative is unbounded.
Interval atom_derivative(AtomTag tag, const Interval& range) {
  switch (tag) {
    case AtomTag::Exp: return exp(range);
    case AtomTag::Log: return recip(range);
    case AtomTag::Sin: return cos(range);
    case AtomTag::Cos: return neg(sin(range));
    case AtomTag::Sqrt: return recip(scalar_mul(2.0, sqrt(range)));
    case AtomTag::Recip: return neg(recip(pow(range, 2)));
  }
  throw std::logic_error("atom_derivative: unknown atom");
}

// Row of largest total width, smallest index on ties. With every row of
// zero width this degenerates to row 0, which is fine: the remainder may
// go to any single row.
std::size_t widest_row(const Ism& a) {
  std::size_t k = 0;
  double best = -1.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    double w = 0.0;
    for (int j = 0; j < a.cols(); ++j) w += a.at(i, j).hi() - a.at(i, j).lo();
    if (w > best) {
      best = w;
      k = i;
    }
  }
  return k;
}

void add_remainder(std::vector<Interval>& coeffs, std::size_t row, int N, double r) {
  if (r <= 0.0) return;
  if (!std::isfinite(r)) throw DomainViolation("remainder bound overflow");
  const Interval pad(-r, r);
  for (int j = 0; j < N; ++j) coeffs[row * N + j] = add(coeffs[row * N + j], pad);
}

}  // namespace

Ism ism_compose(AtomTag tag, const Ism& a) {
  const std::size_t n = a.rows();
  const int N = a.cols();

  std::vector<double> L(n), U(n);
  Interval range(0.0, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    L[i] = a.row_min(i);
    U[i] = a.row_max(i);
    range = add(range, Interval(L[i], U[i]));
  }
  check_atom_domain(tag, range);

  // central points; exp uses the log-mean that minimizes its remainder
  std::vector<double> center(n);
  for (std::size_t i = 0; i < n; ++i) {
    double c;
    if (tag == AtomTag::Exp)
      c = U[i] + std::log(0.5 * (1.0 + std::exp(L[i] - U[i])));
    else
      c = 0.5 * (L[i] + U[i]);
    center[i] = std::clamp(c, L[i], U[i]);
  }

  Interval omega(0.0, 0.0);
  for (std::size_t i = 0; i < n; ++i)
    omega = add(omega, Interval::point(center[i]));
  omega = intersect(omega, range);
  if (omega.is_empty()) omega = range;  // ulp-level mismatch only

  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < n; ++i)
    if (U[i] > L[i]) active.push_back(i);

  // Remainder bound covering the defect of splitting atom(sum) into a sum
  // of per-row terms. Identically zero when at most one row varies.
  double rem = 0.0;
  if (active.size() > 1) {
    if (tag == AtomTag::Exp) {
      Interval prod = kOne;
      Interval sum = kZero;
      for (std::size_t i : active) {
        const Interval du = sub(Interval::point(U[i]), Interval::point(center[i]));
        const Interval dl = sub(Interval::point(L[i]), Interval::point(center[i]));
        const double s = std::max({sub(exp(du), kOne).hi(), sub(kOne, exp(dl)).hi(), 0.0});
        prod = mul(prod, add(kOne, Interval::point(s)));
        sum = add(sum, Interval::point(s));
      }
      const Interval defect = sub(sub(prod, sum), kOne);
      rem = std::max(0.0, mul(exp(omega), defect).hi());
    } else {
      Interval terms = kZero;
      Interval delta_sum = kZero;
      Interval mag_sum = kZero;
      for (std::size_t i : active) {
        const Interval delta = sub(Interval(L[i], U[i]), Interval::point(center[i]));
        terms = add(terms, univariate(tag, intersect(add(omega, delta), range)));
        delta_sum = add(delta_sum, delta);
        mag_sum = add(mag_sum, Interval::point(mag(delta)));
      }
      const Interval at_omega = univariate(tag, omega);
      const Interval whole = univariate(tag, intersect(add(omega, delta_sum), range));
      const Interval defect = sub(
          sub(terms, scalar_mul(double(active.size() - 1), at_omega)), whole);
      rem = mag(defect);
      // mean-value alternative: the defect telescopes into sums of
      // delta_i * (alpha'(xi_i) - alpha'(xi_0)) with all xi inside the
      // range, so it is also bounded by (sum |delta_i|) * width(alpha').
      // Second order in the row spreads; take whichever bound is smaller.
      try {
        const Interval slope = atom_derivative(tag, range);
        const Interval spread = mul(mag_sum, Interval::point(diam(slope)));
        rem = std::min(rem, spread.hi());
      } catch (const DomainViolation&) {
        // derivative unbounded on the range; keep the direct bound
      }
    }
  }

  std::vector<Interval> coeffs(n * N);
  const Interval at_omega = univariate(tag, omega);
  // interval enclosure of (n-1)/n keeps the row-splitting identity sound
  Interval tail = kZero;
  if (n > 1) {
    const double q = (double(n) - 1.0) / double(n);
    tail = mul(Interval(round_down(q), round_up(q)), at_omega);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const Interval shift = sub(omega, Interval::point(center[i]));
    for (int j = 0; j < N; ++j) {
      Interval arg = intersect(add(shift, a.at(i, j)), range);
      if (arg.is_empty()) arg = range;
      coeffs[i * N + j] = sub(univariate(tag, arg), tail);
    }
  }

  add_remainder(coeffs, widest_row(a), N, rem);
  require_finite(coeffs, "ism_compose");
  return Ism(a.grid(), std::move(coeffs));
}

Ism ism_mul(const Ism& a, const Ism& b) {
  require_same_grid(a, b, "ism_mul");
  const std::size_t n = a.rows();
  const int N = a.cols();

  std::vector<double> ca(n), cb(n), rho_a(n), rho_b(n);
  Interval sum_a = kZero, sum_b = kZero, dot = kZero;
  for (std::size_t i = 0; i < n; ++i) {
    const double La = a.row_min(i), Ua = a.row_max(i);
    const double Lb = b.row_min(i), Ub = b.row_max(i);
    ca[i] = std::clamp(0.5 * (La + Ua), La, Ua);
    cb[i] = std::clamp(0.5 * (Lb + Ub), Lb, Ub);
    rho_a[i] = std::max({round_up(Ua - ca[i]), round_up(ca[i] - La), 0.0});
    rho_b[i] = std::max({round_up(Ub - cb[i]), round_up(cb[i] - Lb), 0.0});
    sum_a = add(sum_a, Interval::point(ca[i]));
    sum_b = add(sum_b, Interval::point(cb[i]));
    dot = add(dot, mul(Interval::point(ca[i]), Interval::point(cb[i])));
  }
  const double inv_n = 1.0 / double(n);
  const Interval omega = mul(sub(mul(sum_a, sum_b), dot),
                             Interval(round_down(inv_n), round_up(inv_n)));

  // cross-variation remainder; zero when the variation sits in one row
  Interval spread_a = kZero, spread_b = kZero, diag = kZero;
  for (std::size_t i = 0; i < n; ++i) {
    spread_a = add(spread_a, Interval::point(rho_a[i]));
    spread_b = add(spread_b, Interval::point(rho_b[i]));
    diag = add(diag, mul(Interval::point(rho_a[i]), Interval::point(rho_b[i])));
  }
  const double rem = std::max(0.0, sub(mul(spread_a, spread_b), diag).hi());

  std::vector<Interval> coeffs(n * N);
  for (std::size_t i = 0; i < n; ++i) {
    const Interval da = sub(sum_a, Interval::point(ca[i]));
    const Interval db = sub(sum_b, Interval::point(cb[i]));
    const Interval cross = mul(da, db);
    for (int j = 0; j < N; ++j) {
      const Interval p = mul(add(a.at(i, j), da), add(b.at(i, j), db));
      coeffs[i * N + j] = sub(sub(p, cross), omega);
    }
  }

  add_remainder(coeffs, widest_row(a), N, rem);
  require_finite(coeffs, "ism_mul");
  return Ism(a.grid(), std::move(coeffs));
}

Ism ism_pow(const Ism& a, long k) {
  if (k < 0) throw std::invalid_argument("ism_pow: exponent must be >= 0");
  if (k == 0) return ism_const(a.grid(), kOne);
  if (k == 1) return a;
  // square-and-multiply over the product rule
  int msb = 0;
  while ((k >> (msb + 1)) != 0) ++msb;
  Ism result = a;
  for (int bit = msb - 1; bit >= 0; --bit) {
    result = ism_mul(result, result);
    if ((k >> bit) & 1) result = ism_mul(result, a);
  }
  return result;
}

Interval ism_range(const Ism& a) {
  double lo = 0.0, hi = 0.0;
  for (std::size_t i = 0; i < a.rows(); ++i) {
    lo = add_down(lo, a.row_min(i));
    hi = add_up(hi, a.row_max(i));
  }
  return Interval(lo, hi);
}

Interval ism_eval(const Ism& a, const std::vector<double>& x) {
  if (x.size() != a.rows()) throw std::invalid_argument("ism_eval: dimension mismatch");
  if (!a.grid().domain().contains(x))
    throw PointOutsideDomain("ism_eval: point outside model domain");
  Interval sum(0.0, 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i)
    sum = add(sum, a.at(i, a.grid().cell_index(i, x[i])));
  return sum;
}

Interval ism_cell(const Ism& a, const std::vector<int>& j) {
  if (j.size() != a.rows()) throw std::invalid_argument("ism_cell: bad index size");
  Interval sum(0.0, 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    if (j[i] < 0 || j[i] >= a.cols())
      throw std::out_of_range("ism_cell: index out of range");
    sum = add(sum, a.at(i, j[i]));
  }
  return sum;
}

IsmVector ism_of_expr(const Expr& e, const Grid& grid) {
  if (grid.dims() != e.n_vars())
    throw std::invalid_argument("ism_of_expr: grid dimension mismatch");
  std::vector<Ism> v;
  v.reserve(e.nodes().size());
  for (std::size_t i = 0; i < e.nodes().size(); ++i) {
    const ExprNode& n = e.nodes()[i];
    try {
      switch (n.kind) {
        case NodeKind::Var: v.push_back(ism_var(grid, n.var)); break;
        case NodeKind::Const:
          v.push_back(ism_const(grid, Interval(n.vlo, n.vhi)));
          break;
        case NodeKind::Add: v.push_back(ism_add(v[n.lhs], v[n.rhs])); break;
        case NodeKind::Sub: v.push_back(ism_sub(v[n.lhs], v[n.rhs])); break;
        case NodeKind::Mul: v.push_back(ism_mul(v[n.lhs], v[n.rhs])); break;
        case NodeKind::Div:
          v.push_back(ism_mul(v[n.lhs], ism_compose(AtomTag::Recip, v[n.rhs])));
          break;
        case NodeKind::Neg: v.push_back(ism_neg(v[n.lhs])); break;
        case NodeKind::ScalarMul:
          v.push_back(ism_scalar_mul(n.scalar, v[n.lhs]));
          break;
        case NodeKind::Pow: v.push_back(ism_pow(v[n.lhs], n.exponent)); break;
        case NodeKind::Univariate: v.push_back(ism_compose(n.tag, v[n.lhs])); break;
      }
    } catch (const DomainViolation& err) {
      throw DomainViolation(err.what(),
                            err.node_index >= 0 ? err.node_index : (long)i);
    }
  }
  IsmVector out;
  out.reserve(e.n_outputs());
  for (const std::int32_t idx : e.outputs()) out.push_back(v[idx]);
  return out;
}

}  // namespace isa
