#pragma once

// Symbolic scalar expressions: parsing, evaluation, exact differentiation.
//
// Grammar (whitespace ignored):
//   expr   := term (('+'|'-') term)*
//   term   := '-' term | factor (('*'|'/') factor)*
//   factor := base ('^' uint)?
//   base   := number | ident | '(' expr ')' | '-' factor | func '(' expr ')'
//   func   := sin | cos | exp | tanh | bump
//
// A leading minus applies to the whole product that follows it, so
// "-x*y" is -(x*y) and "-x^2" is -(x^2).
//
// Zero annihilates: 0*a and 0/a evaluate to 0 without evaluating `a`.
// This keeps evaluate() consistent with the simplifier's 0*x -> 0 rule and
// lets the piecewise derivative of bump() vanish outside its support.

#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace ghg {

enum class NodeKind { constant, variable, add, sub, mul, div, pow, neg, call };

enum class Function { sin, cos, exp, tanh, bump };

std::string_view function_name(Function f);

class Expr {
 public:
  /// The constant 0.
  Expr();

  static Expr constant(double value);
  static Expr variable(std::string name);
  static Expr add(Expr lhs, Expr rhs);
  static Expr sub(Expr lhs, Expr rhs);
  static Expr mul(Expr lhs, Expr rhs);
  static Expr div(Expr lhs, Expr rhs);
  static Expr pow(Expr base, unsigned exponent);
  static Expr neg(Expr operand);
  static Expr call(Function f, Expr argument);

  NodeKind kind() const;
  double value() const;              // constant
  const std::string& name() const;   // variable
  unsigned exponent() const;         // pow
  Function function() const;         // call
  std::span<const Expr> children() const;

  bool is_constant(double v) const;

  /// Structural equality.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node);
  std::shared_ptr<const Node> node_;
};

using Env = std::map<std::string, double, std::less<>>;

Expr parse(std::string_view text, const std::set<std::string, std::less<>>& vars);

double evaluate(const Expr& e, const Env& env);

Expr differentiate(const Expr& e, std::string_view var);

Expr simplify(const Expr& e);

std::string render(const Expr& e);

/// Names of all variables occurring in `e`.
std::set<std::string, std::less<>> variables_of(const Expr& e);

/// bump(t) = exp(-1/(1-t^2)) on |t| < 1, else 0.
double bump(double t);

/// An expression with its variables resolved to positions in a coordinate
/// vector, for repeated evaluation in inner loops.
class BoundExpr {
 public:
  BoundExpr() = default;
  /// Throws EnvError if `e` uses a name not in `vars`.
  BoundExpr(const Expr& e, std::span<const std::string> vars);

  double operator()(std::span<const double> x) const;

 private:
  struct Op {
    NodeKind kind;
    Function fn;
    unsigned exponent;
    double value;
    int slot;
    int lhs;
    int rhs;
  };
  int compile(const Expr& e, std::span<const std::string> vars);

  std::vector<Op> ops_;
  int root_ = -1;

  friend struct BoundEval;
};

}  // namespace ghg
