#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "core/error.hpp"

namespace pencilkit {

enum class ExprKind : std::uint8_t {
  Constant,
  Variable,
  Neg,
  Exp,
  Log,
  Sin,
  Cos,
  Sqrt,
  Add,
  Sub,
  Mul,
  Div,
  Pow,  // integer exponent only
};

// Immutable scalar expression in chart coordinates.  Nodes are shared and
// never mutated, so values are cheap to copy and safe to reuse across
// fields.  Evaluation is pure and deterministic.
class Expr {
 public:
  Expr();  // the zero constant

  static Expr constant(double value);
  static Expr variable(std::string name, int index);

  ExprKind kind() const;
  double constant_value() const;    // Constant only
  const std::string& name() const;  // Variable only
  int index() const;                // Variable only
  int exponent() const;             // Pow only
  const Expr& left() const;         // first child
  const Expr& right() const;        // second child (binary ops)

  bool is_constant() const { return kind() == ExprKind::Constant; }
  bool is_zero() const;
  bool is_one() const;

  // Throws Error(EvalDomain) on division by zero, log of a non-positive
  // value or sqrt of a negative value; the witness carries the point.
  double evaluate(std::span<const double> point) const;

  // Exact partial derivative with respect to the variable slot.
  Expr derivative(int var_index) const;

  // Constant folding, 0/1 absorption, x-x -> 0; semantics preserving.
  Expr simplified() const;

  // Replaces every variable by replacements[index]; used for pullbacks.
  Expr substituted(std::span<const Expr> replacements) const;

  std::string str() const;

  bool same_tree(const Expr& other) const;

  struct Node;

 private:
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;

  friend Expr operator+(const Expr&, const Expr&);
  friend Expr operator-(const Expr&, const Expr&);
  friend Expr operator*(const Expr&, const Expr&);
  friend Expr operator/(const Expr&, const Expr&);
  friend Expr operator-(const Expr&);
  friend Expr pow(const Expr&, int);
  friend Expr exp(const Expr&);
  friend Expr log(const Expr&);
  friend Expr sin(const Expr&);
  friend Expr cos(const Expr&);
  friend Expr sqrt(const Expr&);
};

Expr operator+(const Expr& a, const Expr& b);
Expr operator-(const Expr& a, const Expr& b);
Expr operator*(const Expr& a, const Expr& b);
Expr operator/(const Expr& a, const Expr& b);
Expr operator-(const Expr& a);
Expr pow(const Expr& base, int exponent);
Expr exp(const Expr& a);
Expr log(const Expr& a);
Expr sin(const Expr& a);
Expr cos(const Expr& a);
Expr sqrt(const Expr& a);

// Grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := ('-')? atom ('^' integer)?
//   atom   := number | ident | func '(' expr ')' | '(' expr ')'
//   func   := exp | log | sin | cos | sqrt
// Identifiers must be coordinate names; anything else raises
// UnknownIdentifier, malformed input raises SyntaxError with the offset and
// the expected token.
Expr parse_expression(std::string_view text, std::span<const std::string> coords);

}  // namespace pencilkit
