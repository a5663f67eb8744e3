#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>

namespace randopt {

/// Node kinds of the expression language. Powers carry an integer exponent.
enum class Op { Number, Var, Param, Neg, Add, Sub, Mul, Div, Pow, Sin, Cos, Exp, Log, Sqrt };

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::Number;
  double value = 0.0;  // Number
  int index = 0;       // Var/Param: zero-based slot. Pow: exponent.
  NodePtr lhs;         // unary operand, or left operand
  NodePtr rhs;
};

/// Immutable expression over decision variables x1..xn and scenario
/// parameters p1..pk.
///
/// Grammar:
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | base ('^' int)?
///   base   := number | x<i> | p<i> | func '(' expr ')' | '(' expr ')'
/// so `-x1^2` is `-(x1^2)`. A minus applied directly to a number literal is
/// folded into the literal.
class Expression {
 public:
  Expression() = default;
  Expression(NodePtr root, int n, int k) : root_(std::move(root)), n_(n), k_(k) {}

  const NodePtr& root() const noexcept { return root_; }
  int num_vars() const noexcept { return n_; }
  int num_params() const noexcept { return k_; }

  /// True if any parameter occurs in the tree.
  bool depends_on_params() const;

 private:
  NodePtr root_;
  int n_ = 0;
  int k_ = 0;
};

/// Throws ParseError (with byte offset) or DimensionError.
Expression parse(std::string_view text, int n, int k);

/// Evaluates with variables `x` and parameters `p`. Throws DimensionError on
/// size mismatch and EvalError instead of ever returning a non-finite number.
double eval(const Expression& e, std::span<const double> x, std::span<const double> p = {});

/// Exact symbolic partial derivative with respect to x_{var+1}, with constant
/// folding. `var` is zero-based.
Expression differentiate(const Expression& e, int var);

/// Minimal-parenthesis text that parses back to the same tree.
std::string to_string(const Expression& e);

/// Replaces every parameter by its literal value and folds constants.
/// The result has zero parameters.
Expression substitute_params(const Expression& e, std::span<const double> p);

/// Same tree shape and operators; literals compared within `tol`.
bool structurally_equal(const Expression& a, const Expression& b, double tol = 0.0);

namespace build {
// Node constructors that fold constants (0*e -> 0, 1*e -> e, c op c' -> literal, ...).
NodePtr number(double v);
NodePtr var(int i);
NodePtr param(int i);
NodePtr neg(NodePtr a);
NodePtr add(NodePtr a, NodePtr b);
NodePtr sub(NodePtr a, NodePtr b);
NodePtr mul(NodePtr a, NodePtr b);
NodePtr div(NodePtr a, NodePtr b);
NodePtr pow(NodePtr a, int k);
NodePtr func(Op op, NodePtr a);
}  // namespace build

}  // namespace randopt
