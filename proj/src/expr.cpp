#include "ghg/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <stdexcept>

#include "ghg/error.hpp"

namespace ghg {

struct Expr::Node {
  NodeKind kind = NodeKind::constant;
  double value = 0.0;
  std::string name;
  unsigned exponent = 0;
  Function fn = Function::sin;
  std::vector<Expr> children;
};

std::string_view function_name(Function f) {
  switch (f) {
    case Function::sin: return "sin";
    case Function::cos: return "cos";
    case Function::exp: return "exp";
    case Function::tanh: return "tanh";
    case Function::bump: return "bump";
  }
  return "?";
}

double bump(double t) {
  if (std::abs(t) >= 1.0) return 0.0;
  return std::exp(-1.0 / (1.0 - t * t));
}

Expr::Expr() : Expr(constant(0.0)) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::constant(double value) {
  if (!std::isfinite(value)) throw DomainError("non-finite constant");
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::constant;
  n->value = value == 0.0 ? 0.0 : value;  // no negative zero
  return Expr(std::move(n));
}

Expr Expr::variable(std::string name) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::variable;
  n->name = std::move(name);
  return Expr(std::move(n));
}

#define GHG_BINARY(fname, KIND)                      \
  Expr Expr::fname(Expr lhs, Expr rhs) {             \
    auto n = std::make_shared<Node>();               \
    n->kind = NodeKind::KIND;                        \
    n->children = {std::move(lhs), std::move(rhs)};  \
    return Expr(std::move(n));                       \
  }
GHG_BINARY(add, add)
GHG_BINARY(sub, sub)
GHG_BINARY(mul, mul)
GHG_BINARY(div, div)
#undef GHG_BINARY

Expr Expr::pow(Expr base, unsigned exponent) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::pow;
  n->exponent = exponent;
  n->children = {std::move(base)};
  return Expr(std::move(n));
}

Expr Expr::neg(Expr operand) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::neg;
  n->children = {std::move(operand)};
  return Expr(std::move(n));
}

Expr Expr::call(Function f, Expr argument) {
  auto n = std::make_shared<Node>();
  n->kind = NodeKind::call;
  n->fn = f;
  n->children = {std::move(argument)};
  return Expr(std::move(n));
}

NodeKind Expr::kind() const { return node_->kind; }
double Expr::value() const { return node_->value; }
const std::string& Expr::name() const { return node_->name; }
unsigned Expr::exponent() const { return node_->exponent; }
Function Expr::function() const { return node_->fn; }
std::span<const Expr> Expr::children() const { return node_->children; }

bool Expr::is_constant(double v) const {
  return node_->kind == NodeKind::constant && node_->value == v;
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case NodeKind::constant: return x.value == y.value;
    case NodeKind::variable: return x.name == y.name;
    case NodeKind::pow:
      if (x.exponent != y.exponent) return false;
      break;
    case NodeKind::call:
      if (x.fn != y.fn) return false;
      break;
    default: break;
  }
  return std::equal(x.children.begin(), x.children.end(), y.children.begin(),
                    y.children.end());
}

// ---------------------------------------------------------------------------
// Simplification. Each smart constructor assumes simplified children and
// returns a simplified node, so a single bottom-up pass is a fixpoint.

namespace {

double apply_function(Function f, double t) {
  switch (f) {
    case Function::sin: return std::sin(t);
    case Function::cos: return std::cos(t);
    case Function::exp: return std::exp(t);
    case Function::tanh: return std::tanh(t);
    case Function::bump: return bump(t);
  }
  return 0.0;
}

bool is_const(const Expr& e) { return e.kind() == NodeKind::constant; }

Expr folded(double v, const Expr& fallback) {
  return std::isfinite(v) ? Expr::constant(v) : fallback;
}

Expr s_neg(Expr a) {
  if (is_const(a)) return Expr::constant(-a.value());
  if (a.kind() == NodeKind::neg) return a.children()[0];
  return Expr::neg(std::move(a));
}

Expr s_add(Expr a, Expr b) {
  if (is_const(a) && is_const(b))
    return folded(a.value() + b.value(), Expr::add(a, b));
  if (a.is_constant(0.0)) return b;
  if (b.is_constant(0.0)) return a;
  return Expr::add(std::move(a), std::move(b));
}

Expr s_sub(Expr a, Expr b) {
  if (is_const(a) && is_const(b))
    return folded(a.value() - b.value(), Expr::sub(a, b));
  if (b.is_constant(0.0)) return a;
  if (a.is_constant(0.0)) return s_neg(std::move(b));
  return Expr::sub(std::move(a), std::move(b));
}

Expr s_mul(Expr a, Expr b) {
  if (a.is_constant(0.0) || b.is_constant(0.0)) return Expr::constant(0.0);
  if (is_const(a) && is_const(b))
    return folded(a.value() * b.value(), Expr::mul(a, b));
  if (a.is_constant(1.0)) return b;
  if (b.is_constant(1.0)) return a;
  return Expr::mul(std::move(a), std::move(b));
}

Expr s_div(Expr a, Expr b) {
  if (a.is_constant(0.0)) return Expr::constant(0.0);
  if (b.is_constant(1.0)) return a;
  if (is_const(a) && is_const(b) && b.value() != 0.0)
    return folded(a.value() / b.value(), Expr::div(a, b));
  return Expr::div(std::move(a), std::move(b));
}

Expr s_pow(Expr a, unsigned k) {
  if (k == 0) return Expr::constant(1.0);
  if (k == 1) return a;
  if (is_const(a)) return folded(std::pow(a.value(), static_cast<double>(k)), Expr::pow(a, k));
  return Expr::pow(std::move(a), k);
}

Expr s_call(Function f, Expr a) {
  if (is_const(a)) return folded(apply_function(f, a.value()), Expr::call(f, a));
  return Expr::call(f, std::move(a));
}

}  // namespace

Expr simplify(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::constant:
    case NodeKind::variable: return e;
    case NodeKind::add: return s_add(simplify(e.children()[0]), simplify(e.children()[1]));
    case NodeKind::sub: return s_sub(simplify(e.children()[0]), simplify(e.children()[1]));
    case NodeKind::mul: return s_mul(simplify(e.children()[0]), simplify(e.children()[1]));
    case NodeKind::div: return s_div(simplify(e.children()[0]), simplify(e.children()[1]));
    case NodeKind::pow: return s_pow(simplify(e.children()[0]), e.exponent());
    case NodeKind::neg: return s_neg(simplify(e.children()[0]));
    case NodeKind::call: return s_call(e.function(), simplify(e.children()[0]));
  }
  return e;
}

// ---------------------------------------------------------------------------
// Differentiation

namespace {

Expr d(const Expr& e, std::string_view var) {
  const auto c = e.children();
  switch (e.kind()) {
    case NodeKind::constant: return Expr::constant(0.0);
    case NodeKind::variable: return Expr::constant(e.name() == var ? 1.0 : 0.0);
    case NodeKind::add: return s_add(d(c[0], var), d(c[1], var));
    case NodeKind::sub: return s_sub(d(c[0], var), d(c[1], var));
    case NodeKind::neg: return s_neg(d(c[0], var));
    case NodeKind::mul:
      return s_add(s_mul(d(c[0], var), c[1]), s_mul(c[0], d(c[1], var)));
    case NodeKind::div: {
      Expr num = s_sub(s_mul(d(c[0], var), c[1]), s_mul(c[0], d(c[1], var)));
      return s_div(std::move(num), s_pow(c[1], 2));
    }
    case NodeKind::pow: {
      const unsigned k = e.exponent();
      if (k == 0) return Expr::constant(0.0);
      Expr outer = s_mul(Expr::constant(static_cast<double>(k)), s_pow(c[0], k - 1));
      return s_mul(std::move(outer), d(c[0], var));
    }
    case NodeKind::call: {
      const Expr& a = c[0];
      Expr inner = d(a, var);
      if (inner.is_constant(0.0)) return inner;
      switch (e.function()) {
        case Function::sin: return s_mul(s_call(Function::cos, a), inner);
        case Function::cos: return s_neg(s_mul(s_call(Function::sin, a), inner));
        case Function::exp: return s_mul(e, inner);
        case Function::tanh: {
          Expr sech2 = s_sub(Expr::constant(1.0), s_pow(e, 2));
          return s_mul(std::move(sech2), inner);
        }
        case Function::bump: {
          // bump'(t) = bump(t) * (-2t / (1-t^2)^2). bump(t) stays the
          // leftmost factor so the product short-circuits to 0 for |t| >= 1.
          Expr ratio = s_div(s_mul(Expr::constant(-2.0), a),
                             s_pow(s_sub(Expr::constant(1.0), s_pow(a, 2)), 2));
          return s_mul(s_mul(e, std::move(ratio)), inner);
        }
      }
      break;
    }
  }
  return Expr::constant(0.0);
}

}  // namespace

Expr differentiate(const Expr& e, std::string_view var) { return simplify(d(e, var)); }

// ---------------------------------------------------------------------------
// Rendering. Contexts describe where a subexpression sits so that the
// output parses back to the same tree.

namespace {

enum class Slot { top, add_right, mul_left, mul_right, pow_base, neg_operand };

std::string number_text(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  (void)ec;
  return std::string(buf, end);
}

void emit(const Expr& e, Slot slot, std::string& out) {
  const auto c = e.children();
  auto wrapped = [&](bool parens, auto&& body) {
    if (parens) out += '(';
    body();
    if (parens) out += ')';
  };
  switch (e.kind()) {
    case NodeKind::constant:
      if (e.value() < 0.0) {
        out += "(-" + number_text(-e.value()) + ")";
      } else {
        out += number_text(e.value());
      }
      return;
    case NodeKind::variable: out += e.name(); return;
    case NodeKind::call:
      out += function_name(e.function());
      out += '(';
      emit(c[0], Slot::top, out);
      out += ')';
      return;
    case NodeKind::add:
    case NodeKind::sub:
      wrapped(slot != Slot::top, [&] {
        emit(c[0], Slot::top, out);
        out += e.kind() == NodeKind::add ? " + " : " - ";
        emit(c[1], Slot::add_right, out);
      });
      return;
    case NodeKind::neg:
      wrapped(slot == Slot::mul_left || slot == Slot::mul_right || slot == Slot::pow_base, [&] {
        out += '-';
        emit(c[0], Slot::neg_operand, out);
      });
      return;
    case NodeKind::mul:
    case NodeKind::div:
      wrapped(slot == Slot::mul_right || slot == Slot::pow_base, [&] {
        emit(c[0], Slot::mul_left, out);
        out += e.kind() == NodeKind::mul ? '*' : '/';
        emit(c[1], Slot::mul_right, out);
      });
      return;
    case NodeKind::pow:
      wrapped(slot == Slot::pow_base, [&] {
        emit(c[0], Slot::pow_base, out);
        out += '^';
        out += std::to_string(e.exponent());
      });
      return;
  }
}

}  // namespace

std::string render(const Expr& e) {
  std::string out;
  emit(e, Slot::top, out);
  return out;
}

namespace {

void collect(const Expr& e, std::set<std::string, std::less<>>& out) {
  if (e.kind() == NodeKind::variable) out.insert(e.name());
  for (const auto& c : e.children()) collect(c, out);
}

}  // namespace

std::set<std::string, std::less<>> variables_of(const Expr& e) {
  std::set<std::string, std::less<>> out;
  collect(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Evaluation

BoundExpr::BoundExpr(const Expr& e, std::span<const std::string> vars) {
  root_ = compile(e, vars);
}

int BoundExpr::compile(const Expr& e, std::span<const std::string> vars) {
  Op op{e.kind(), e.function(), e.exponent(), e.value(), -1, -1, -1};
  if (e.kind() == NodeKind::variable) {
    auto it = std::find(vars.begin(), vars.end(), e.name());
    if (it == vars.end()) throw EnvError("no binding for variable '" + e.name() + "'");
    op.slot = static_cast<int>(it - vars.begin());
  }
  const auto c = e.children();
  if (!c.empty()) op.lhs = compile(c[0], vars);
  if (c.size() > 1) op.rhs = compile(c[1], vars);
  ops_.push_back(op);
  return static_cast<int>(ops_.size()) - 1;
}

struct BoundEval {
  const std::vector<BoundExpr::Op>& ops;
  std::span<const double> x;

  double run(int i) const {
    const auto& op = ops[static_cast<std::size_t>(i)];
    switch (op.kind) {
      case NodeKind::constant: return op.value;
      case NodeKind::variable: return x[static_cast<std::size_t>(op.slot)];
      case NodeKind::add: return run(op.lhs) + run(op.rhs);
      case NodeKind::sub: return run(op.lhs) - run(op.rhs);
      case NodeKind::neg: return -run(op.lhs);
      case NodeKind::mul: {
        double a;
        try {
          a = run(op.lhs);
        } catch (const DomainError&) {
          if (run(op.rhs) == 0.0) return 0.0;
          throw;
        }
        if (a == 0.0) return 0.0;
        const double b = run(op.rhs);
        return b == 0.0 ? 0.0 : a * b;
      }
      case NodeKind::div: {
        const double a = run(op.lhs);
        if (a == 0.0) return 0.0;
        const double b = run(op.rhs);
        if (b == 0.0) throw DomainError("division by zero");
        return a / b;
      }
      case NodeKind::pow: return std::pow(run(op.lhs), static_cast<double>(op.exponent));
      case NodeKind::call: return apply_function(op.fn, run(op.lhs));
    }
    return 0.0;
  }
};

double BoundExpr::operator()(std::span<const double> x) const {
  if (root_ < 0) return 0.0;
  return BoundEval{ops_, x}.run(root_);
}

double evaluate(const Expr& e, const Env& env) {
  const auto names = variables_of(e);
  std::vector<std::string> vars;
  std::vector<double> values;
  for (const auto& n : names) {
    auto it = env.find(n);
    if (it == env.end()) throw EnvError("no binding for variable '" + n + "'");
    vars.push_back(n);
    values.push_back(it->second);
  }
  return BoundExpr(e, vars)(values);
}

}  // namespace ghg
