#pragma once

// A small expression language for scalar fields on a chart.
//
//   expr   := term (('+' | '-') term)*
//   term   := factor (('*' | '/') factor)*
//   factor := ('-')? atom
//   atom   := number | ident | func '(' args ')' | '(' expr ')'
//   ident  := 'x1' .. 'xn' | 'normsq'
//   func   := 'pow' | 'exp' | 'log' | 'sqrt' | 'sin' | 'cos'
//
// pow takes an expression and an integer literal (optionally signed).
// normsq is x1^2 + ... + xn^2.

#include "statcurv/jet.hpp"

#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace statcurv {

enum class ExprOp { Number, Coord, NormSq, Add, Sub, Mul, Div, Neg, Pow, Exp, Log, Sqrt, Sin, Cos };

struct ExprNode {
  ExprOp op = ExprOp::Number;
  double number = 0.0;  // Number
  int index = 0;        // Coord (0-based) or Pow exponent
  std::vector<std::shared_ptr<const ExprNode>> args;
};

/// Immutable expression tree bound to a chart dimension.
class Expr {
 public:
  Expr() = default;
  Expr(std::shared_ptr<const ExprNode> root, int dimension) : root_(std::move(root)), dimension_(dimension) {}

  int dimension() const { return dimension_; }
  const ExprNode& root() const { return *root_; }
  const std::shared_ptr<const ExprNode>& root_ptr() const { return root_; }
  bool empty() const { return root_ == nullptr; }

  /// True when no coordinate (or normsq) appears in the tree.
  bool is_constant() const;

  /// Canonical text; parses back to an equivalent tree.
  std::string to_string() const;

  static Expr constant(double value, int dimension);
  Expr operator+(const Expr& other) const;

 private:
  std::shared_ptr<const ExprNode> root_;
  int dimension_ = 0;
};

Expr parse_expression(std::string_view source, int dimension);

/// Value, gradient and Hessian at `point` by forward-mode propagation.
Jet2 eval_jet2(const Expr& e, std::span<const double> point);

/// Symbolic partial derivative d/dx_{index+1}. Zero and unit factors are
/// folded so that repeated differentiation stays compact.
Expr differentiate(const Expr& e, int index);

/// Value only.
double eval_value(const Expr& e, std::span<const double> point);

std::string format_number(double value);

}  // namespace statcurv
