#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "isa/interval.hpp"

namespace isa {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, int line, int col)
      : std::runtime_error(what + " (line " + std::to_string(line) + ", col " +
                           std::to_string(col) + ")"),
        line(line),
        col(col) {}
  int line, col;
};

class UnknownIdentifier : public ParseError {
 public:
  using ParseError::ParseError;
};

class ArityError : public ParseError {
 public:
  using ParseError::ParseError;
};

enum class NodeKind : std::uint8_t {
  Var,        // input variable, index in `var`
  Const,      // interval constant [vlo, vhi]; thin except for named constants
  Add,
  Sub,
  Mul,
  Div,
  Neg,
  ScalarMul,  // scalar * subexpression, factor in `scalar`
  Pow,        // integer exponent >= 0 in `exponent`
  Univariate  // atom in `tag`
};

enum class NamedConst : std::uint8_t { None, Pi, E };

struct ExprNode {
  NodeKind kind;
  AtomTag tag = AtomTag::Exp;
  NamedConst named = NamedConst::None;
  std::int32_t lhs = -1;
  std::int32_t rhs = -1;
  std::int32_t var = -1;
  double vlo = 0.0, vhi = 0.0;  // Const payload
  double scalar = 0.0;          // ScalarMul factor
  long exponent = 0;            // Pow exponent

  friend bool operator==(const ExprNode& a, const ExprNode& b);
};

// Computational graph of a factorable function: a topologically ordered node
// pool (children precede parents) plus one root index per output component.
// Structurally identical subterms are shared (hash-consing).
class Expr {
 public:
  const std::vector<ExprNode>& nodes() const { return nodes_; }
  const std::vector<std::int32_t>& outputs() const { return outputs_; }
  std::size_t n_vars() const { return n_vars_; }
  std::size_t n_outputs() const { return outputs_.size(); }

  std::vector<double> eval_real(const std::vector<double>& x) const;
  std::vector<Interval> eval_interval(const Box& X) const;

  // Textual form of one output; parsing it back reproduces the same DAG.
  std::string print(std::size_t output = 0) const;

  friend bool operator==(const Expr& a, const Expr& b);
  friend class ExprBuilder;

 private:
  std::vector<ExprNode> nodes_;
  std::vector<std::int32_t> outputs_;
  std::size_t n_vars_ = 0;
};

// Incremental DAG construction with hash-consing and the two canonical
// rewrites the parser relies on: Neg(Const c) -> Const(-c) and
// point-Const * u -> ScalarMul. Division is desugared to
// Mul(l, recip(r)) so every engine sees the same graph shape.
class ExprBuilder {
 public:
  std::int32_t var(std::int32_t index);  // 0-based
  std::int32_t constant(double c);
  std::int32_t constant(const Interval& c, NamedConst named = NamedConst::None);
  std::int32_t add(std::int32_t l, std::int32_t r);
  std::int32_t sub(std::int32_t l, std::int32_t r);
  std::int32_t mul(std::int32_t l, std::int32_t r);
  std::int32_t div(std::int32_t l, std::int32_t r);
  std::int32_t neg(std::int32_t u);
  std::int32_t scalar_mul(double c, std::int32_t u);
  std::int32_t pow(std::int32_t u, long k);
  std::int32_t univariate(AtomTag tag, std::int32_t u);

  void mark_output(std::int32_t node);
  // n_vars_hint widens the variable count beyond the largest index used.
  Expr build(std::size_t n_vars_hint = 0);

 private:
  std::int32_t intern(ExprNode n);
  std::vector<ExprNode> nodes_;
  std::vector<std::int32_t> outputs_;
  std::unordered_map<std::size_t, std::vector<std::int32_t>> buckets_;
  std::int32_t max_var_ = -1;
};

// Recursive-descent parser for the factorable-function grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := atom ('^' integer)?
//   atom   := number | ident | ident '(' expr ')' | '(' expr ')' | '-' factor
// Identifiers: x1..xN variables; exp, log, sin, cos, sqrt, recip atoms;
// pi and e as tight interval constants.
Expr parse(const std::string& text, std::size_t n_vars_hint = 0);
Expr parse_many(const std::vector<std::string>& texts, std::size_t n_vars_hint = 0);

}  // namespace isa
