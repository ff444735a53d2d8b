#pragma once

// Arithmetic expression DSL for metric entries.
//
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' ['-'] integer)?
//   primary := number | identifier | func '(' expr ')' | '(' expr ')'
//   func    := sin | cos | sinh | cosh | exp | sqrt
//
// Identifiers are the declared coordinates, declared parameters, or `pi`.
// Evaluation is templated on the scalar type so the same tree runs on doubles
// and on (nested) dual numbers.

#include "gbcurv/dual.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gbcurv {

class ParseError : public std::runtime_error {
 public:
  ParseError(std::size_t offset, std::vector<std::string> expected, const std::string& msg);
  std::size_t offset() const { return offset_; }
  const std::vector<std::string>& expected() const { return expected_; }

 private:
  std::size_t offset_;
  std::vector<std::string> expected_;
};

class UnknownIdentifierError : public ParseError {
 public:
  UnknownIdentifierError(std::size_t offset, const std::string& name);
  const std::string& name() const { return name_; }

 private:
  std::string name_;
};

/// Raised while evaluating: division by zero, sqrt outside its domain.
class EvaluationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Names visible to the parser.
struct ExpressionScope {
  std::vector<std::string> coordinates;
  std::map<std::string, double> parameters;
};

class Expression {
 public:
  enum class Op { Constant, Parameter, Coordinate, Add, Sub, Mul, Div, Neg, Pow,
                  Sin, Cos, Sinh, Cosh, Exp, Sqrt };

  /// The zero constant.
  Expression();

  static Expression parse(std::string_view source, const ExpressionScope& scope);
  static Expression constant(double v);
  static Expression coordinate(int index, std::string name);
  static Expression parameter(std::string name, double value);

  /// Value at a point; `x` holds the coordinates in declaration order.
  template <typename T>
  T eval(std::span<const T> x) const;
  double operator()(std::span<const double> x) const { return eval<double>(x); }

  /// Symbolic partial derivative with respect to coordinate `index` (0-based).
  Expression derivative(int index) const;

  /// Fully parenthesized source text that parses back to an equal tree.
  std::string to_string() const;

  bool is_zero_constant() const;

  friend Expression operator+(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a, const Expression& b);
  friend Expression operator*(const Expression& a, const Expression& b);
  friend Expression operator/(const Expression& a, const Expression& b);
  friend Expression operator-(const Expression& a);
  friend Expression pow(const Expression& a, int n);
  friend Expression sin(const Expression& a);
  friend Expression cos(const Expression& a);
  friend Expression sinh(const Expression& a);
  friend Expression cosh(const Expression& a);
  friend Expression exp(const Expression& a);
  friend Expression sqrt(const Expression& a);

 private:
  struct Node {
    Op op = Op::Constant;
    double value = 0.0;
    int index = -1;  // coordinate slot or integer exponent
    std::string name;
    std::shared_ptr<const Node> a, b;
  };
  using NodePtr = std::shared_ptr<const Node>;

  struct Instr {
    Op op;
    double value;
    int index;
    int a, b;  // tape slots of operands
  };

  explicit Expression(NodePtr root);
  static NodePtr make(Op op, NodePtr a, NodePtr b = nullptr);
  static NodePtr derive(const NodePtr& n, int index);
  static std::string render(const NodePtr& n);
  int flatten(const NodePtr& n);

  friend class ExpressionParser;

  NodePtr root_;
  std::vector<Instr> tape_;
};

namespace detail {
template <typename T>
T ipow(const T& x, int n) {
  if (n == 0) return T(1.0);
  if (n < 0) {
    if (base_value(x) == 0.0) throw EvaluationError("division by zero in negative power");
    return T(1.0) / ipow(x, -n);
  }
  T r = x;
  for (int i = 1; i < n; ++i) r = r * x;
  return r;
}
}  // namespace detail

template <typename T>
T Expression::eval(std::span<const T> x) const {
  using std::cos;
  using std::cosh;
  using std::exp;
  using std::sin;
  using std::sinh;
  using std::sqrt;
  std::vector<T> reg(tape_.size());
  for (std::size_t i = 0; i < tape_.size(); ++i) {
    const Instr& in = tape_[i];
    const auto A = [&]() -> const T& { return reg[static_cast<std::size_t>(in.a)]; };
    const auto B = [&]() -> const T& { return reg[static_cast<std::size_t>(in.b)]; };
    switch (in.op) {
      case Op::Constant:
      case Op::Parameter: reg[i] = T(in.value); break;
      case Op::Coordinate:
        if (static_cast<std::size_t>(in.index) >= x.size())
          throw EvaluationError("expression references a missing coordinate");
        reg[i] = x[static_cast<std::size_t>(in.index)];
        break;
      case Op::Add: reg[i] = A() + B(); break;
      case Op::Sub: reg[i] = A() - B(); break;
      case Op::Mul: reg[i] = A() * B(); break;
      case Op::Div:
        if (base_value(B()) == 0.0) throw EvaluationError("division by zero");
        reg[i] = A() / B();
        break;
      case Op::Neg: reg[i] = -A(); break;
      case Op::Pow: reg[i] = detail::ipow(A(), in.index); break;
      case Op::Sin: reg[i] = sin(A()); break;
      case Op::Cos: reg[i] = cos(A()); break;
      case Op::Sinh: reg[i] = sinh(A()); break;
      case Op::Cosh: reg[i] = cosh(A()); break;
      case Op::Exp: reg[i] = exp(A()); break;
      case Op::Sqrt: {
        const double v = base_value(A());
        if (v < 0.0 || (v == 0.0 && !std::is_same_v<T, double>))
          throw EvaluationError("sqrt outside its differentiable domain");
        reg[i] = sqrt(A());
        break;
      }
    }
  }
  return reg.back();
}

}  // namespace gbcurv
