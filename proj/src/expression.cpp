#include "gbcurv/expression.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <sstream>

namespace gbcurv {

namespace {

std::string join(const std::vector<std::string>& items) {
  std::string out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    if (i) out += ", ";
    out += items[i];
  }
  return out;
}

const std::map<std::string, Expression::Op>& functions() {
  static const std::map<std::string, Expression::Op> f = {
      {"sin", Expression::Op::Sin},   {"cos", Expression::Op::Cos},
      {"sinh", Expression::Op::Sinh}, {"cosh", Expression::Op::Cosh},
      {"exp", Expression::Op::Exp},   {"sqrt", Expression::Op::Sqrt}};
  return f;
}

// Shortest decimal text that reads back to the same double.
std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

ParseError::ParseError(std::size_t offset, std::vector<std::string> expected,
                       const std::string& msg)
    : std::runtime_error("at byte " + std::to_string(offset) + ": " + msg +
                         (expected.empty() ? "" : " (expected " + join(expected) + ")")),
      offset_(offset),
      expected_(std::move(expected)) {}

UnknownIdentifierError::UnknownIdentifierError(std::size_t offset, const std::string& name)
    : ParseError(offset, {}, "unknown identifier '" + name + "'"), name_(name) {}

// ---------------------------------------------------------------------------

class ExpressionParser {
 public:
  using NodePtr = Expression::NodePtr;
  using Op = Expression::Op;

  ExpressionParser(std::string_view src, const ExpressionScope& scope)
      : src_(src), scope_(scope) {}

  NodePtr parse() {
    NodePtr n = expr();
    skip_ws();
    if (pos_ != src_.size())
      throw ParseError(pos_, {"operator", "end of input"}, "unexpected trailing input");
    return n;
  }

 private:
  void skip_ws() {
    while (pos_ < src_.size() && std::isspace(static_cast<unsigned char>(src_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip_ws();
    if (pos_ < src_.size() && src_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  NodePtr expr() {
    NodePtr n = term();
    for (;;) {
      if (accept('+')) n = Expression::make(Op::Add, n, term());
      else if (accept('-')) n = Expression::make(Op::Sub, n, term());
      else return n;
    }
  }

  NodePtr term() {
    NodePtr n = unary();
    for (;;) {
      if (accept('*')) n = Expression::make(Op::Mul, n, unary());
      else if (accept('/')) n = Expression::make(Op::Div, n, unary());
      else return n;
    }
  }

  NodePtr unary() {
    if (accept('-')) return Expression::make(Op::Neg, unary());
    return power();
  }

  NodePtr power() {
    NodePtr base = primary();
    if (!accept('^')) return base;
    skip_ws();
    const std::size_t start = pos_;
    bool neg = false;
    if (pos_ < src_.size() && src_[pos_] == '-') {
      neg = true;
      ++pos_;
    }
    const std::size_t digits = pos_;
    while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
    if (pos_ == digits) throw ParseError(start, {"integer exponent"}, "bad exponent");
    if (pos_ < src_.size() && (src_[pos_] == '.' || src_[pos_] == 'e' || src_[pos_] == 'E'))
      throw ParseError(start, {"integer exponent"}, "only integer powers are supported");
    int e = 0;
    std::from_chars(src_.data() + digits, src_.data() + pos_, e);
    auto node = std::make_shared<Expression::Node>();
    node->op = Op::Pow;
    node->index = neg ? -e : e;
    node->a = base;
    return node;
  }

  NodePtr primary() {
    skip_ws();
    if (pos_ >= src_.size())
      throw ParseError(pos_, {"number", "identifier", "'('", "'-'"}, "unexpected end of input");
    const char c = src_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr n = expr();
      if (!accept(')')) throw ParseError(pos_, {"')'"}, "unbalanced parenthesis");
      return n;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') return identifier();
    throw ParseError(pos_, {"number", "identifier", "'('", "'-'"},
                     std::string("unexpected character '") + c + "'");
  }

  NodePtr number() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isdigit(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '.'))
      ++pos_;
    if (pos_ < src_.size() && (src_[pos_] == 'e' || src_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < src_.size() && (src_[p] == '+' || src_[p] == '-')) ++p;
      if (p < src_.size() && std::isdigit(static_cast<unsigned char>(src_[p]))) {
        pos_ = p;
        while (pos_ < src_.size() && std::isdigit(static_cast<unsigned char>(src_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    auto res = std::from_chars(src_.data() + start, src_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != src_.data() + pos_)
      throw ParseError(start, {"number"}, "malformed number");
    return Expression::constant(v).root_;
  }

  NodePtr identifier() {
    const std::size_t start = pos_;
    while (pos_ < src_.size() &&
           (std::isalnum(static_cast<unsigned char>(src_[pos_])) || src_[pos_] == '_'))
      ++pos_;
    const std::string name(src_.substr(start, pos_ - start));

    if (auto f = functions().find(name); f != functions().end()) {
      if (!accept('(')) throw ParseError(pos_, {"'('"}, "function call needs an argument");
      NodePtr arg = expr();
      if (!accept(')')) throw ParseError(pos_, {"')'"}, "unbalanced parenthesis");
      return Expression::make(f->second, arg);
    }
    for (std::size_t i = 0; i < scope_.coordinates.size(); ++i)
      if (scope_.coordinates[i] == name)
        return Expression::coordinate(static_cast<int>(i), name).root_;
    if (auto p = scope_.parameters.find(name); p != scope_.parameters.end())
      return Expression::parameter(name, p->second).root_;
    if (name == "pi") return Expression::parameter("pi", M_PI).root_;
    throw UnknownIdentifierError(start, name);
  }

  std::string_view src_;
  const ExpressionScope& scope_;
  std::size_t pos_ = 0;
};

// ---------------------------------------------------------------------------

Expression::Expression() : Expression(constant(0.0)) {}

Expression::Expression(NodePtr root) : root_(std::move(root)) { flatten(root_); }

int Expression::flatten(const NodePtr& n) {
  Instr in{n->op, n->value, n->index, -1, -1};
  if (n->a) in.a = flatten(n->a);
  if (n->b) in.b = flatten(n->b);
  tape_.push_back(in);
  return static_cast<int>(tape_.size()) - 1;
}

Expression::NodePtr Expression::make(Op op, NodePtr a, NodePtr b) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

Expression Expression::parse(std::string_view source, const ExpressionScope& scope) {
  ExpressionParser p(source, scope);
  return Expression(p.parse());
}

Expression Expression::constant(double v) {
  auto n = std::make_shared<Node>();
  n->op = Op::Constant;
  n->value = v;
  return Expression(NodePtr(n));
}

Expression Expression::coordinate(int index, std::string name) {
  auto n = std::make_shared<Node>();
  n->op = Op::Coordinate;
  n->index = index;
  n->name = std::move(name);
  return Expression(NodePtr(n));
}

Expression Expression::parameter(std::string name, double value) {
  auto n = std::make_shared<Node>();
  n->op = Op::Parameter;
  n->value = value;
  n->name = std::move(name);
  return Expression(NodePtr(n));
}

bool Expression::is_zero_constant() const {
  return root_->op == Op::Constant && root_->value == 0.0;
}

Expression operator+(const Expression& a, const Expression& b) {
  if (a.is_zero_constant()) return b;
  if (b.is_zero_constant()) return a;
  return Expression(Expression::make(Expression::Op::Add, a.root_, b.root_));
}

Expression operator-(const Expression& a, const Expression& b) {
  if (b.is_zero_constant()) return a;
  if (a.is_zero_constant()) return -b;
  return Expression(Expression::make(Expression::Op::Sub, a.root_, b.root_));
}

Expression operator*(const Expression& a, const Expression& b) {
  using Op = Expression::Op;
  if (a.is_zero_constant() || b.is_zero_constant()) return Expression::constant(0.0);
  if (a.root_->op == Op::Constant && a.root_->value == 1.0) return b;
  if (b.root_->op == Op::Constant && b.root_->value == 1.0) return a;
  return Expression(Expression::make(Op::Mul, a.root_, b.root_));
}

Expression operator/(const Expression& a, const Expression& b) {
  if (a.is_zero_constant()) return Expression::constant(0.0);
  return Expression(Expression::make(Expression::Op::Div, a.root_, b.root_));
}

Expression operator-(const Expression& a) {
  if (a.is_zero_constant()) return a;
  return Expression(Expression::make(Expression::Op::Neg, a.root_));
}

Expression pow(const Expression& a, int n) {
  if (n == 0) return Expression::constant(1.0);
  if (n == 1) return a;
  auto node = std::make_shared<Expression::Node>();
  node->op = Expression::Op::Pow;
  node->index = n;
  node->a = a.root_;
  return Expression(Expression::NodePtr(node));
}

#define GBCURV_UNARY(fn, OP)                                                \
  Expression fn(const Expression& a) {                                       \
    return Expression(Expression::make(Expression::Op::OP, a.root_));        \
  }
GBCURV_UNARY(sin, Sin)
GBCURV_UNARY(cos, Cos)
GBCURV_UNARY(sinh, Sinh)
GBCURV_UNARY(cosh, Cosh)
GBCURV_UNARY(exp, Exp)
GBCURV_UNARY(sqrt, Sqrt)
#undef GBCURV_UNARY

Expression::NodePtr Expression::derive(const NodePtr& n, int index) {
  const Expression self(n);
  auto d = [&](const NodePtr& c) { return Expression(derive(c, index)); };
  auto wrap = [](const NodePtr& c) { return Expression(c); };
  Expression r;
  switch (n->op) {
    case Op::Constant:
    case Op::Parameter: r = constant(0.0); break;
    case Op::Coordinate: r = constant(n->index == index ? 1.0 : 0.0); break;
    case Op::Add: r = d(n->a) + d(n->b); break;
    case Op::Sub: r = d(n->a) - d(n->b); break;
    case Op::Mul: r = d(n->a) * wrap(n->b) + wrap(n->a) * d(n->b); break;
    case Op::Div:
      r = (d(n->a) * wrap(n->b) - wrap(n->a) * d(n->b)) / pow(wrap(n->b), 2);
      break;
    case Op::Neg: r = -d(n->a); break;
    case Op::Pow:
      r = constant(n->index) * pow(wrap(n->a), n->index - 1) * d(n->a);
      break;
    case Op::Sin: r = cos(wrap(n->a)) * d(n->a); break;
    case Op::Cos: r = -(sin(wrap(n->a)) * d(n->a)); break;
    case Op::Sinh: r = cosh(wrap(n->a)) * d(n->a); break;
    case Op::Cosh: r = sinh(wrap(n->a)) * d(n->a); break;
    case Op::Exp: r = self * d(n->a); break;
    case Op::Sqrt: r = d(n->a) / (constant(2.0) * self); break;
  }
  return r.root_;
}

Expression Expression::derivative(int index) const { return Expression(derive(root_, index)); }

std::string Expression::render(const NodePtr& n) {
  switch (n->op) {
    case Op::Constant: {
      const std::string s = format_double(n->value);
      return n->value < 0 ? "(" + s + ")" : s;
    }
    case Op::Parameter:
    case Op::Coordinate: return n->name;
    case Op::Add: return "(" + render(n->a) + " + " + render(n->b) + ")";
    case Op::Sub: return "(" + render(n->a) + " - " + render(n->b) + ")";
    case Op::Mul: return "(" + render(n->a) + " * " + render(n->b) + ")";
    case Op::Div: return "(" + render(n->a) + " / " + render(n->b) + ")";
    case Op::Neg: return "(-" + render(n->a) + ")";
    case Op::Pow: return "(" + render(n->a) + "^" + std::to_string(n->index) + ")";
    case Op::Sin: return "sin(" + render(n->a) + ")";
    case Op::Cos: return "cos(" + render(n->a) + ")";
    case Op::Sinh: return "sinh(" + render(n->a) + ")";
    case Op::Cosh: return "cosh(" + render(n->a) + ")";
    case Op::Exp: return "exp(" + render(n->a) + ")";
    case Op::Sqrt: return "sqrt(" + render(n->a) + ")";
  }
  return {};
}

std::string Expression::to_string() const { return render(root_); }

}  // namespace gbcurv
