#include "isa/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>

namespace isa {
namespace {

std::uint64_t bits(double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, sizeof u);
  return u;
}

std::size_t hash_node(const ExprNode& n) {
  std::size_t h = static_cast<std::size_t>(n.kind);
  auto mix = [&h](std::uint64_t v) {
    h ^= v + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
  };
  mix(static_cast<std::uint64_t>(n.tag));
  mix(static_cast<std::uint64_t>(n.named));
  mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(n.lhs)));
  mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(n.rhs)));
  mix(static_cast<std::uint64_t>(static_cast<std::int64_t>(n.var)));
  mix(bits(n.vlo));
  mix(bits(n.vhi));
  mix(bits(n.scalar));
  mix(static_cast<std::uint64_t>(n.exponent));
  return h;
}

const Interval kPiConst(M_PI, round_up(M_PI));
const Interval kEConst(M_E, round_up(M_E));

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

bool operator==(const ExprNode& a, const ExprNode& b) {
  return a.kind == b.kind && a.tag == b.tag && a.named == b.named &&
         a.lhs == b.lhs && a.rhs == b.rhs && a.var == b.var &&
         bits(a.vlo) == bits(b.vlo) && bits(a.vhi) == bits(b.vhi) &&
         bits(a.scalar) == bits(b.scalar) && a.exponent == b.exponent;
}

bool operator==(const Expr& a, const Expr& b) {
  return a.n_vars_ == b.n_vars_ && a.outputs_ == b.outputs_ && a.nodes_ == b.nodes_;
}

std::int32_t ExprBuilder::intern(ExprNode n) {
  const std::size_t h = hash_node(n);
  auto& bucket = buckets_[h];
  for (std::int32_t idx : bucket)
    if (nodes_[idx] == n) return idx;
  nodes_.push_back(n);
  const auto idx = static_cast<std::int32_t>(nodes_.size() - 1);
  bucket.push_back(idx);
  return idx;
}

std::int32_t ExprBuilder::var(std::int32_t index) {
  if (index < 0) throw std::invalid_argument("var index must be >= 0");
  max_var_ = std::max(max_var_, index);
  ExprNode n;
  n.kind = NodeKind::Var;
  n.var = index;
  return intern(n);
}

std::int32_t ExprBuilder::constant(double c) {
  if (!std::isfinite(c)) throw std::invalid_argument("non-finite constant");
  ExprNode n;
  n.kind = NodeKind::Const;
  n.vlo = n.vhi = c;
  return intern(n);
}

std::int32_t ExprBuilder::constant(const Interval& c, NamedConst named) {
  if (c.is_empty()) throw std::invalid_argument("empty interval constant");
  ExprNode n;
  n.kind = NodeKind::Const;
  n.named = named;
  n.vlo = c.lo();
  n.vhi = c.hi();
  return intern(n);
}

namespace {
bool is_point_const(const ExprNode& n) {
  return n.kind == NodeKind::Const && n.named == NamedConst::None &&
         bits(n.vlo) == bits(n.vhi);
}
}  // namespace

std::int32_t ExprBuilder::add(std::int32_t l, std::int32_t r) {
  ExprNode n;
  n.kind = NodeKind::Add;
  n.lhs = l;
  n.rhs = r;
  return intern(n);
}

std::int32_t ExprBuilder::sub(std::int32_t l, std::int32_t r) {
  ExprNode n;
  n.kind = NodeKind::Sub;
  n.lhs = l;
  n.rhs = r;
  return intern(n);
}

std::int32_t ExprBuilder::mul(std::int32_t l, std::int32_t r) {
  if (is_point_const(nodes_.at(l))) return scalar_mul(nodes_[l].vlo, r);
  if (is_point_const(nodes_.at(r))) return scalar_mul(nodes_[r].vlo, l);
  ExprNode n;
  n.kind = NodeKind::Mul;
  n.lhs = l;
  n.rhs = r;
  return intern(n);
}

std::int32_t ExprBuilder::div(std::int32_t l, std::int32_t r) {
  return mul(l, univariate(AtomTag::Recip, r));
}

std::int32_t ExprBuilder::neg(std::int32_t u) {
  if (is_point_const(nodes_.at(u))) return constant(-nodes_[u].vlo);
  ExprNode n;
  n.kind = NodeKind::Neg;
  n.lhs = u;
  return intern(n);
}

std::int32_t ExprBuilder::scalar_mul(double c, std::int32_t u) {
  if (!std::isfinite(c)) throw std::invalid_argument("non-finite scalar");
  ExprNode n;
  n.kind = NodeKind::ScalarMul;
  n.scalar = c;
  n.lhs = u;
  return intern(n);
}

std::int32_t ExprBuilder::pow(std::int32_t u, long k) {
  if (k < 0) throw std::invalid_argument("pow: exponent must be >= 0");
  ExprNode n;
  n.kind = NodeKind::Pow;
  n.lhs = u;
  n.exponent = k;
  return intern(n);
}

std::int32_t ExprBuilder::univariate(AtomTag tag, std::int32_t u) {
  ExprNode n;
  n.kind = NodeKind::Univariate;
  n.tag = tag;
  n.lhs = u;
  return intern(n);
}

void ExprBuilder::mark_output(std::int32_t node) {
  if (node < 0 || node >= static_cast<std::int32_t>(nodes_.size()))
    throw std::invalid_argument("mark_output: bad node index");
  outputs_.push_back(node);
}

Expr ExprBuilder::build(std::size_t n_vars_hint) {
  if (outputs_.empty()) throw std::logic_error("build: no outputs marked");
  const std::size_t used = static_cast<std::size_t>(max_var_ + 1);
  if (n_vars_hint > 0 && n_vars_hint < used)
    throw std::invalid_argument("build: n_vars hint below used variable count");

  // keep only nodes reachable from the outputs, renumbered in depth-first
  // postorder; rewrites can strand interned nodes, and the canonical order
  // makes print/parse reproduce identical node pools
  std::vector<std::int32_t> remap(nodes_.size(), -1);
  Expr e;
  std::function<void(std::int32_t)> visit = [&](std::int32_t idx) {
    if (remap[idx] >= 0) return;
    ExprNode n = nodes_[idx];
    if (n.lhs >= 0) {
      visit(n.lhs);
      n.lhs = remap[n.lhs];
    }
    if (n.rhs >= 0) {
      visit(n.rhs);
      n.rhs = remap[n.rhs];
    }
    remap[idx] = static_cast<std::int32_t>(e.nodes_.size());
    e.nodes_.push_back(n);
  };
  for (const std::int32_t out : outputs_) {
    visit(out);
    e.outputs_.push_back(remap[out]);
  }
  e.n_vars_ = std::max(used, n_vars_hint);
  return e;
}

// ---------------------------------------------------------------------------
// Lexer / parser

namespace {

enum class Tok { Num, Ident, Plus, Minus, Star, Slash, Caret, LParen, RParen, Comma, End };

struct Token {
  Tok type;
  double num = 0.0;
  std::string ident;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& text) : text_(text) { advance(); }

  const Token& peek() const { return tok_; }
  Token take() {
    Token t = tok_;
    advance();
    return t;
  }

 private:
  void advance() {
    while (pos_ < text_.size() && std::isspace((unsigned char)text_[pos_])) bump();
    tok_.line = line_;
    tok_.col = col_;
    if (pos_ >= text_.size()) {
      tok_.type = Tok::End;
      return;
    }
    const char c = text_[pos_];
    if (std::isdigit((unsigned char)c) ||
        (c == '.' && pos_ + 1 < text_.size() &&
         std::isdigit((unsigned char)text_[pos_ + 1]))) {
      lex_number();
      return;
    }
    if (std::isalpha((unsigned char)c) || c == '_') {
      std::string id;
      while (pos_ < text_.size() &&
             (std::isalnum((unsigned char)text_[pos_]) || text_[pos_] == '_')) {
        id += text_[pos_];
        bump();
      }
      tok_.type = Tok::Ident;
      tok_.ident = std::move(id);
      return;
    }
    switch (c) {
      case '+': tok_.type = Tok::Plus; break;
      case '-': tok_.type = Tok::Minus; break;
      case '*': tok_.type = Tok::Star; break;
      case '/': tok_.type = Tok::Slash; break;
      case '^': tok_.type = Tok::Caret; break;
      case '(': tok_.type = Tok::LParen; break;
      case ')': tok_.type = Tok::RParen; break;
      case ',': tok_.type = Tok::Comma; break;
      default:
        throw ParseError(std::string("unexpected character '") + c + "'", line_, col_);
    }
    bump();
  }

  void lex_number() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit((unsigned char)text_[pos_])) bump();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      bump();
      while (pos_ < text_.size() && std::isdigit((unsigned char)text_[pos_])) bump();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t look = pos_ + 1;
      if (look < text_.size() && (text_[look] == '+' || text_[look] == '-')) ++look;
      if (look < text_.size() && std::isdigit((unsigned char)text_[look])) {
        bump();  // e
        if (text_[pos_] == '+' || text_[pos_] == '-') bump();
        while (pos_ < text_.size() && std::isdigit((unsigned char)text_[pos_])) bump();
      }
    }
    tok_.type = Tok::Num;
    tok_.num = std::strtod(text_.substr(start, pos_ - start).c_str(), nullptr);
  }

  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  int line_ = 1, col_ = 1;
  Token tok_;
};

class Parser {
 public:
  Parser(const std::string& text, ExprBuilder& b) : lex_(text), b_(b) {}

  std::int32_t parse_expr() {
    std::int32_t node = parse_term();
    while (lex_.peek().type == Tok::Plus || lex_.peek().type == Tok::Minus) {
      const Token op = lex_.take();
      const std::int32_t rhs = parse_term();
      node = op.type == Tok::Plus ? b_.add(node, rhs) : b_.sub(node, rhs);
    }
    return node;
  }

  void expect_end() {
    const Token& t = lex_.peek();
    if (t.type != Tok::End)
      throw ParseError("trailing input after expression", t.line, t.col);
  }

 private:
  std::int32_t parse_term() {
    std::int32_t node = parse_factor();
    while (lex_.peek().type == Tok::Star || lex_.peek().type == Tok::Slash) {
      const Token op = lex_.take();
      const std::int32_t rhs = parse_factor();
      node = op.type == Tok::Star ? b_.mul(node, rhs) : b_.div(node, rhs);
    }
    return node;
  }

  std::int32_t parse_factor() {
    const std::int32_t base = parse_atom();
    if (lex_.peek().type != Tok::Caret) return base;
    lex_.take();
    const Token t = lex_.peek();
    if (t.type != Tok::Num || t.num < 0 || t.num != std::floor(t.num) ||
        t.num > 1e9)
      throw ParseError("exponent must be a nonnegative integer", t.line, t.col);
    lex_.take();
    return b_.pow(base, static_cast<long>(t.num));
  }

  std::int32_t parse_atom() {
    const Token t = lex_.take();
    switch (t.type) {
      case Tok::Num:
        return b_.constant(t.num);
      case Tok::Minus:
        return b_.neg(parse_factor());
      case Tok::LParen: {
        const std::int32_t node = parse_expr();
        expect(Tok::RParen, "expected ')'");
        return node;
      }
      case Tok::Ident:
        return parse_ident(t);
      default:
        throw ParseError("expected expression", t.line, t.col);
    }
  }

  std::int32_t parse_ident(const Token& t) {
    if (lex_.peek().type == Tok::LParen) {
      lex_.take();
      AtomTag tag;
      if (t.ident == "exp") tag = AtomTag::Exp;
      else if (t.ident == "log") tag = AtomTag::Log;
      else if (t.ident == "sin") tag = AtomTag::Sin;
      else if (t.ident == "cos") tag = AtomTag::Cos;
      else if (t.ident == "sqrt") tag = AtomTag::Sqrt;
      else if (t.ident == "recip") tag = AtomTag::Recip;
      else
        throw UnknownIdentifier("unknown function '" + t.ident + "'", t.line, t.col);
      const std::int32_t arg = parse_expr();
      if (lex_.peek().type == Tok::Comma)
        throw ArityError("'" + t.ident + "' takes exactly one argument", t.line, t.col);
      expect(Tok::RParen, "expected ')'");
      return b_.univariate(tag, arg);
    }
    if (t.ident == "pi") return b_.constant(kPiConst, NamedConst::Pi);
    if (t.ident == "e") return b_.constant(kEConst, NamedConst::E);
    if (t.ident.size() > 1 && t.ident[0] == 'x') {
      bool digits = true;
      for (std::size_t i = 1; i < t.ident.size(); ++i)
        digits = digits && std::isdigit((unsigned char)t.ident[i]);
      if (digits) {
        const long idx = std::strtol(t.ident.c_str() + 1, nullptr, 10);
        if (idx >= 1) return b_.var(static_cast<std::int32_t>(idx - 1));
      }
    }
    throw UnknownIdentifier("unknown identifier '" + t.ident + "'", t.line, t.col);
  }

  void expect(Tok type, const char* msg) {
    const Token& t = lex_.peek();
    if (t.type != type) throw ParseError(msg, t.line, t.col);
    lex_.take();
  }

  Lexer lex_;
  ExprBuilder& b_;
};

}  // namespace

Expr parse(const std::string& text, std::size_t n_vars_hint) {
  return parse_many(std::vector<std::string>{text}, n_vars_hint);
}

Expr parse_many(const std::vector<std::string>& texts, std::size_t n_vars_hint) {
  if (texts.empty()) throw std::invalid_argument("parse_many: no expressions");
  ExprBuilder b;
  for (const auto& text : texts) {
    Parser p(text, b);
    const std::int32_t root = p.parse_expr();
    p.expect_end();
    b.mark_output(root);
  }
  return b.build(n_vars_hint);
}

// ---------------------------------------------------------------------------
// Evaluation

std::vector<double> Expr::eval_real(const std::vector<double>& x) const {
  if (x.size() != n_vars_)
    throw std::invalid_argument("eval_real: dimension mismatch");
  std::vector<double> v(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ExprNode& n = nodes_[i];
    double r = 0.0;
    switch (n.kind) {
      case NodeKind::Var: r = x[n.var]; break;
      case NodeKind::Const: r = n.vlo; break;
      case NodeKind::Add: r = v[n.lhs] + v[n.rhs]; break;
      case NodeKind::Sub: r = v[n.lhs] - v[n.rhs]; break;
      case NodeKind::Mul: r = v[n.lhs] * v[n.rhs]; break;
      case NodeKind::Div:
        if (v[n.rhs] == 0.0) throw DomainViolation("division by zero", (long)i);
        r = v[n.lhs] / v[n.rhs];
        break;
      case NodeKind::Neg: r = -v[n.lhs]; break;
      case NodeKind::ScalarMul: r = n.scalar * v[n.lhs]; break;
      case NodeKind::Pow: r = std::pow(v[n.lhs], (double)n.exponent); break;
      case NodeKind::Univariate: {
        const double u = v[n.lhs];
        switch (n.tag) {
          case AtomTag::Exp: r = std::exp(u); break;
          case AtomTag::Log:
            if (u <= 0.0) throw DomainViolation("log of non-positive value", (long)i);
            r = std::log(u);
            break;
          case AtomTag::Sin: r = std::sin(u); break;
          case AtomTag::Cos: r = std::cos(u); break;
          case AtomTag::Sqrt:
            if (u < 0.0) throw DomainViolation("sqrt of negative value", (long)i);
            r = std::sqrt(u);
            break;
          case AtomTag::Recip:
            if (u == 0.0) throw DomainViolation("reciprocal of zero", (long)i);
            r = 1.0 / u;
            break;
        }
        break;
      }
    }
    if (!std::isfinite(r))
      throw DomainViolation("non-finite value in evaluation", (long)i);
    v[i] = r;
  }
  std::vector<double> out(outputs_.size());
  for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = v[outputs_[k]];
  return out;
}

std::vector<Interval> Expr::eval_interval(const Box& X) const {
  if (X.size() != n_vars_)
    throw std::invalid_argument("eval_interval: dimension mismatch");
  if (X.is_empty()) throw std::invalid_argument("eval_interval: empty box");
  std::vector<Interval> v(nodes_.size());
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    const ExprNode& n = nodes_[i];
    try {
      switch (n.kind) {
        case NodeKind::Var: v[i] = X[n.var]; break;
        case NodeKind::Const: v[i] = Interval(n.vlo, n.vhi); break;
        case NodeKind::Add: v[i] = add(v[n.lhs], v[n.rhs]); break;
        case NodeKind::Sub: v[i] = sub(v[n.lhs], v[n.rhs]); break;
        case NodeKind::Mul: v[i] = mul(v[n.lhs], v[n.rhs]); break;
        case NodeKind::Div: v[i] = mul(v[n.lhs], recip(v[n.rhs])); break;
        case NodeKind::Neg: v[i] = neg(v[n.lhs]); break;
        case NodeKind::ScalarMul: v[i] = scalar_mul(n.scalar, v[n.lhs]); break;
        case NodeKind::Pow: v[i] = pow(v[n.lhs], n.exponent); break;
        case NodeKind::Univariate: v[i] = univariate(n.tag, v[n.lhs]); break;
      }
    } catch (const DomainViolation& e) {
      throw DomainViolation(e.what(), e.node_index >= 0 ? e.node_index : (long)i);
    }
  }
  std::vector<Interval> out(outputs_.size());
  for (std::size_t k = 0; k < outputs_.size(); ++k) out[k] = v[outputs_[k]];
  return out;
}

// ---------------------------------------------------------------------------
// Printing

namespace {

// Syntactic binding strength: what can appear bare in a given slot.
// 0 expr, 1 term, 2 negated factor, 3 pow, 4 plain atom.
int print_level(const ExprNode& n) {
  switch (n.kind) {
    case NodeKind::Add:
    case NodeKind::Sub: return 0;
    case NodeKind::Mul:
    case NodeKind::Div:
    case NodeKind::ScalarMul: return 1;
    case NodeKind::Neg: return 2;
    case NodeKind::Pow: return 3;
    case NodeKind::Const:
      if (n.named != NamedConst::None) return 4;
      return std::signbit(n.vlo) ? 2 : 4;  // negative literal carries a sign
    case NodeKind::Var:
    case NodeKind::Univariate: return 4;
  }
  return 4;
}

}  // namespace

std::string Expr::print(std::size_t output) const {
  if (output >= outputs_.size()) throw std::out_of_range("print: bad output index");
  std::function<std::string(std::int32_t, int)> rec =
      [&](std::int32_t idx, int required) -> std::string {
    const ExprNode& n = nodes_[idx];
    std::string s;
    switch (n.kind) {
      case NodeKind::Var: s = "x" + std::to_string(n.var + 1); break;
      case NodeKind::Const:
        if (n.named == NamedConst::Pi) s = "pi";
        else if (n.named == NamedConst::E) s = "e";
        else s = format_double(n.vlo);
        break;
      case NodeKind::Add: s = rec(n.lhs, 0) + " + " + rec(n.rhs, 1); break;
      case NodeKind::Sub: s = rec(n.lhs, 0) + " - " + rec(n.rhs, 1); break;
      case NodeKind::Mul: s = rec(n.lhs, 1) + " * " + rec(n.rhs, 2); break;
      case NodeKind::Div: s = rec(n.lhs, 1) + " / " + rec(n.rhs, 2); break;
      case NodeKind::ScalarMul:
        s = format_double(n.scalar) + " * " + rec(n.lhs, 2);
        break;
      case NodeKind::Neg: s = "-" + rec(n.lhs, 2); break;
      case NodeKind::Pow:
        s = rec(n.lhs, 4) + "^" + std::to_string(n.exponent);
        break;
      case NodeKind::Univariate:
        s = std::string(atom_name(n.tag)) + "(" + rec(n.lhs, 0) + ")";
        break;
    }
    if (print_level(n) < required) s = "(" + s + ")";
    return s;
  };
  return rec(outputs_[output], 0);
}

}  // namespace isa
