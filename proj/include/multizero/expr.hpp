#pragma once

#include <complex>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace multizero {

using Complex = std::complex<double>;
using Point = std::vector<Complex>;

struct ParseError : std::runtime_error {
  ParseError(const std::string& msg, int line, int col);
  int line;
  int col;
};

struct DomainError : std::runtime_error {
  explicit DomainError(const std::string& msg, int equation = -1);
  int equation;  // 0-based equation index, -1 when not tied to a system
};

enum class UnaryOp { Neg, Sin, Cos, Tan, Exp, Log, Sqrt };
enum class BinaryOp { Add, Sub, Mul, Div };

class Expression;
using ExprPtr = std::shared_ptr<const Expression>;

// Immutable expression tree node.  Subtrees are shared, so copies are cheap
// and evaluation never mutates the tree.
class Expression {
 public:
  enum class Kind { Constant, Variable, Unary, Binary, Power };

  static ExprPtr constant(Complex value);
  static ExprPtr variable(int index);
  static ExprPtr unary(UnaryOp op, ExprPtr operand);
  static ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
  static ExprPtr power(ExprPtr base, int exponent);  // exponent >= 0

  Kind kind() const { return kind_; }
  Complex value() const { return value_; }       // Constant only
  int variable_index() const { return var_; }    // Variable only
  UnaryOp unary_op() const { return unary_; }
  BinaryOp binary_op() const { return binary_; }
  int exponent() const { return exponent_; }     // Power only
  const ExprPtr& lhs() const { return lhs_; }    // Unary/Power operand too
  const ExprPtr& rhs() const { return rhs_; }

 private:
  Expression() = default;

  Kind kind_ = Kind::Constant;
  Complex value_{};
  int var_ = -1;
  UnaryOp unary_ = UnaryOp::Neg;
  BinaryOp binary_ = BinaryOp::Add;
  int exponent_ = 0;
  ExprPtr lhs_;
  ExprPtr rhs_;
};

struct System {
  std::vector<std::string> variables;  // declaration order fixes coordinates
  std::vector<ExprPtr> equations;

  int num_vars() const { return static_cast<int>(variables.size()); }
  int num_eqs() const { return static_cast<int>(equations.size()); }
};

// Text format: optional '#' comments, a leading "vars <name>..." line, then
// one equation per line (implicitly "= 0").
System parse_system(std::string_view text);
System load_system(const std::string& path);
ExprPtr parse_expression(std::string_view text,
                         const std::vector<std::string>& variables);

Complex eval_expression(const Expression& e, const Point& at);
std::vector<Complex> eval_system(const System& sys, const Point& at);

std::string render(const Expression& e,
                   const std::vector<std::string>& variables);
std::string render(const System& sys);

std::string format_double(double v);  // shortest text that round-trips

// --- checked scalar ops used by the generic evaluator ---------------------

inline Complex div_op(const Complex& a, const Complex& b) {
  if (b == Complex(0.0, 0.0)) throw DomainError("division by zero");
  return a / b;
}

inline Complex log_op(const Complex& a) {
  if (a == Complex(0.0, 0.0)) throw DomainError("log of zero");
  return std::log(a);
}

inline Complex sqrt_op(const Complex& a) { return std::sqrt(a); }

inline Complex pow_int(Complex base, int exponent) {
  Complex acc(1.0, 0.0);
  for (int k = 0; k < exponent; ++k) acc *= base;
  return acc;
}

// Evaluates the tree over any scalar type with ring ops plus sin/cos/tan/exp
// (ADL or std) and div_op/log_op/sqrt_op/pow_int overloads.  The context
// supplies leaf values: ctx.constant(Complex) and ctx.variable(int).
template <class T, class Ctx>
T eval_tree(const Expression& e, const Ctx& ctx) {
  using K = Expression::Kind;
  switch (e.kind()) {
    case K::Constant:
      return ctx.constant(e.value());
    case K::Variable:
      return ctx.variable(e.variable_index());
    case K::Unary: {
      T a = eval_tree<T>(*e.lhs(), ctx);
      using std::cos;
      using std::exp;
      using std::sin;
      using std::tan;
      switch (e.unary_op()) {
        case UnaryOp::Neg:
          return -a;
        case UnaryOp::Sin:
          return sin(a);
        case UnaryOp::Cos:
          return cos(a);
        case UnaryOp::Tan:
          return tan(a);
        case UnaryOp::Exp:
          return exp(a);
        case UnaryOp::Log:
          return log_op(a);
        case UnaryOp::Sqrt:
          return sqrt_op(a);
      }
      break;
    }
    case K::Binary: {
      T a = eval_tree<T>(*e.lhs(), ctx);
      T b = eval_tree<T>(*e.rhs(), ctx);
      switch (e.binary_op()) {
        case BinaryOp::Add:
          return a + b;
        case BinaryOp::Sub:
          return a - b;
        case BinaryOp::Mul:
          return a * b;
        case BinaryOp::Div:
          return div_op(a, b);
      }
      break;
    }
    case K::Power:
      return pow_int(eval_tree<T>(*e.lhs(), ctx), e.exponent());
  }
  throw std::logic_error("corrupt expression node");
}

}  // namespace multizero
