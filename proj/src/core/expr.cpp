#include "core/expr.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>

namespace pencilkit {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnknownIdentifier: return "UnknownIdentifier";
    case ErrorCode::EvalDomain: return "EvalDomainError";
    case ErrorCode::DimensionCap: return "DimensionCap";
    case ErrorCode::SingularMetric: return "SingularMetric";
    case ErrorCode::SingularPencil: return "SingularPencil";
    case ErrorCode::PreconditionFailed: return "PreconditionFailed";
    case ErrorCode::NoUnity: return "NoUnity";
    case ErrorCode::NotAutomorphism: return "NotAutomorphism";
    case ErrorCode::NotInvertibleEulerMultiplication:
      return "NotInvertibleEulerMultiplication";
    case ErrorCode::AsymmetryDetected: return "AsymmetryDetected";
    case ErrorCode::RankDeficient: return "RankDeficient";
    case ErrorCode::SingularInducedMetric: return "SingularInducedMetric";
    case ErrorCode::NotDistinguished: return "NotDistinguished";
    case ErrorCode::ClosureFailed: return "ClosureFailed";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::Internal: return "Internal";
  }
  return "Error";
}

struct Expr::Node {
  ExprKind kind = ExprKind::Constant;
  double value = 0.0;  // Constant
  std::string name;    // Variable
  int index = -1;      // Variable
  int exponent = 0;    // Pow
  Expr a;              // first child
  Expr b;              // second child
};

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

// A null node is the zero constant; this keeps Node (which holds Expr
// children) default-constructible without recursion.
Expr::Expr() = default;

Expr Expr::constant(double value) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Constant;
  n->value = value;
  return Expr(std::move(n));
}

Expr Expr::variable(std::string name, int index) {
  auto n = std::make_shared<Node>();
  n->kind = ExprKind::Variable;
  n->name = std::move(name);
  n->index = index;
  return Expr(std::move(n));
}

ExprKind Expr::kind() const {
  return node_ ? node_->kind : ExprKind::Constant;
}
double Expr::constant_value() const { return node_ ? node_->value : 0.0; }
const std::string& Expr::name() const { return node_->name; }
int Expr::index() const { return node_->index; }
int Expr::exponent() const { return node_->exponent; }
const Expr& Expr::left() const { return node_->a; }
const Expr& Expr::right() const { return node_->b; }

bool Expr::is_zero() const { return is_constant() && constant_value() == 0.0; }
bool Expr::is_one() const { return is_constant() && constant_value() == 1.0; }

bool Expr::same_tree(const Expr& other) const {
  if (node_ == other.node_) return true;
  if (kind() != other.kind()) return false;
  switch (kind()) {
    case ExprKind::Constant:
      return constant_value() == other.constant_value();
    case ExprKind::Variable:
      return index() == other.index();
    case ExprKind::Neg:
    case ExprKind::Exp:
    case ExprKind::Log:
    case ExprKind::Sin:
    case ExprKind::Cos:
    case ExprKind::Sqrt:
      return left().same_tree(other.left());
    case ExprKind::Pow:
      return exponent() == other.exponent() && left().same_tree(other.left());
    default:
      return left().same_tree(other.left()) && right().same_tree(other.right());
  }
}

namespace {

[[noreturn]] void eval_error(const char* what, std::span<const double> point) {
  throw Error(ErrorCode::EvalDomain, what,
              std::vector<double>(point.begin(), point.end()));
}

double ipow_checked(double base, int n, std::span<const double> point) {
  if (n < 0) {
    if (base == 0.0) eval_error("zero raised to a negative power", point);
    return 1.0 / ipow_checked(base, -n, point);
  }
  double result = 1.0;
  double acc = base;
  while (n > 0) {
    if (n & 1) result *= acc;
    n >>= 1;
    if (n) acc *= acc;
  }
  return result;
}

}  // namespace

double Expr::evaluate(std::span<const double> point) const {
  switch (kind()) {
    case ExprKind::Constant: return constant_value();
    case ExprKind::Variable: {
      const int i = index();
      if (i < 0 || static_cast<size_t>(i) >= point.size())
        throw Error(ErrorCode::EvalDomain,
                    "variable index out of range for evaluation point");
      return point[static_cast<size_t>(i)];
    }
    case ExprKind::Neg: return -left().evaluate(point);
    case ExprKind::Exp: return std::exp(left().evaluate(point));
    case ExprKind::Log: {
      const double v = left().evaluate(point);
      if (v <= 0.0) eval_error("log of a non-positive value", point);
      return std::log(v);
    }
    case ExprKind::Sin: return std::sin(left().evaluate(point));
    case ExprKind::Cos: return std::cos(left().evaluate(point));
    case ExprKind::Sqrt: {
      const double v = left().evaluate(point);
      if (v < 0.0) eval_error("sqrt of a negative value", point);
      return std::sqrt(v);
    }
    case ExprKind::Add: return left().evaluate(point) + right().evaluate(point);
    case ExprKind::Sub: return left().evaluate(point) - right().evaluate(point);
    case ExprKind::Mul: return left().evaluate(point) * right().evaluate(point);
    case ExprKind::Div: {
      const double d = right().evaluate(point);
      if (d == 0.0) eval_error("division by zero", point);
      return left().evaluate(point) / d;
    }
    case ExprKind::Pow:
      return ipow_checked(left().evaluate(point), exponent(), point);
  }
  throw Error(ErrorCode::Internal, "unhandled expression kind");
}

// ---------------------------------------------------------------------------
// Builders.  Folding happens at construction so derived fields (inverse
// metrics, Christoffel symbols, curvature) stay compact for sparse inputs.

namespace {

std::shared_ptr<Expr::Node> node(ExprKind kind) {
  auto n = std::make_shared<Expr::Node>();
  n->kind = kind;
  return n;
}

}  // namespace

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.is_constant() && b.is_constant())
    return Expr::constant(a.constant_value() + b.constant_value());
  auto n = node(ExprKind::Add);
  n->a = a;
  n->b = b;
  return Expr(std::move(n));
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_zero()) return a;
  if (a.is_constant() && b.is_constant())
    return Expr::constant(a.constant_value() - b.constant_value());
  if (a.same_tree(b)) return Expr::constant(0.0);
  if (a.is_zero()) return -b;
  auto n = node(ExprKind::Sub);
  n->a = a;
  n->b = b;
  return Expr(std::move(n));
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_zero() || b.is_zero()) return Expr::constant(0.0);
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (a.is_constant() && b.is_constant())
    return Expr::constant(a.constant_value() * b.constant_value());
  auto n = node(ExprKind::Mul);
  n->a = a;
  n->b = b;
  return Expr(std::move(n));
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_zero()) return Expr::constant(0.0);
  if (b.is_one()) return a;
  if (a.is_constant() && b.is_constant() && b.constant_value() != 0.0)
    return Expr::constant(a.constant_value() / b.constant_value());
  auto n = node(ExprKind::Div);
  n->a = a;
  n->b = b;
  return Expr(std::move(n));
}

Expr operator-(const Expr& a) {
  if (a.is_constant()) return Expr::constant(-a.constant_value());
  if (a.kind() == ExprKind::Neg) return a.left();
  auto n = node(ExprKind::Neg);
  n->a = a;
  return Expr(std::move(n));
}

Expr pow(const Expr& base, int exponent) {
  if (exponent == 0) return Expr::constant(1.0);
  if (exponent == 1) return base;
  if (base.is_constant() && !(base.constant_value() == 0.0 && exponent < 0)) {
    std::vector<double> none;
    return Expr::constant(ipow_checked(base.constant_value(), exponent, none));
  }
  if (base.kind() == ExprKind::Pow)
    return pow(base.left(), base.exponent() * exponent);
  auto n = node(ExprKind::Pow);
  n->a = base;
  n->exponent = exponent;
  return Expr(std::move(n));
}

namespace {

bool domain_safe_unary(ExprKind kind, double v) {
  switch (kind) {
    case ExprKind::Log: return v > 0.0;
    case ExprKind::Sqrt: return v >= 0.0;
    default: return true;
  }
}

double fold_unary(ExprKind kind, double v) {
  switch (kind) {
    case ExprKind::Exp: return std::exp(v);
    case ExprKind::Log: return std::log(v);
    case ExprKind::Sin: return std::sin(v);
    case ExprKind::Cos: return std::cos(v);
    case ExprKind::Sqrt: return std::sqrt(v);
    default: return v;
  }
}

}  // namespace

#define PENCILKIT_UNARY_BUILDER(fn, KIND)                               \
  Expr fn(const Expr& a) {                                              \
    if (a.is_constant() && domain_safe_unary(ExprKind::KIND,            \
                                             a.constant_value()))       \
      return Expr::constant(                                            \
          fold_unary(ExprKind::KIND, a.constant_value()));              \
    auto n = node(ExprKind::KIND);                                      \
    n->a = a;                                                           \
    return Expr(std::move(n));                                          \
  }

PENCILKIT_UNARY_BUILDER(exp, Exp)
PENCILKIT_UNARY_BUILDER(log, Log)
PENCILKIT_UNARY_BUILDER(sin, Sin)
PENCILKIT_UNARY_BUILDER(cos, Cos)
PENCILKIT_UNARY_BUILDER(sqrt, Sqrt)
#undef PENCILKIT_UNARY_BUILDER

Expr Expr::derivative(int var_index) const {
  switch (kind()) {
    case ExprKind::Constant: return Expr::constant(0.0);
    case ExprKind::Variable:
      return Expr::constant(index() == var_index ? 1.0 : 0.0);
    case ExprKind::Neg: return -left().derivative(var_index);
    case ExprKind::Exp:
      return left().derivative(var_index) * pencilkit::exp(left());
    case ExprKind::Log: return left().derivative(var_index) / left();
    case ExprKind::Sin:
      return left().derivative(var_index) * pencilkit::cos(left());
    case ExprKind::Cos:
      return -(left().derivative(var_index) * pencilkit::sin(left()));
    case ExprKind::Sqrt:
      return left().derivative(var_index) /
             (Expr::constant(2.0) * pencilkit::sqrt(left()));
    case ExprKind::Add:
      return left().derivative(var_index) + right().derivative(var_index);
    case ExprKind::Sub:
      return left().derivative(var_index) - right().derivative(var_index);
    case ExprKind::Mul:
      return left().derivative(var_index) * right() +
             left() * right().derivative(var_index);
    case ExprKind::Div:
      return (left().derivative(var_index) * right() -
              left() * right().derivative(var_index)) /
             pencilkit::pow(right(), 2);
    case ExprKind::Pow:
      return Expr::constant(static_cast<double>(exponent())) *
             pencilkit::pow(left(), exponent() - 1) * left().derivative(var_index);
  }
  throw Error(ErrorCode::Internal, "unhandled expression kind");
}

Expr Expr::simplified() const {
  switch (kind()) {
    case ExprKind::Constant:
    case ExprKind::Variable:
      return *this;
    case ExprKind::Neg: return -left().simplified();
    case ExprKind::Exp: return pencilkit::exp(left().simplified());
    case ExprKind::Log: return pencilkit::log(left().simplified());
    case ExprKind::Sin: return pencilkit::sin(left().simplified());
    case ExprKind::Cos: return pencilkit::cos(left().simplified());
    case ExprKind::Sqrt: return pencilkit::sqrt(left().simplified());
    case ExprKind::Add: return left().simplified() + right().simplified();
    case ExprKind::Sub: return left().simplified() - right().simplified();
    case ExprKind::Mul: return left().simplified() * right().simplified();
    case ExprKind::Div: return left().simplified() / right().simplified();
    case ExprKind::Pow: return pencilkit::pow(left().simplified(), exponent());
  }
  throw Error(ErrorCode::Internal, "unhandled expression kind");
}

Expr Expr::substituted(std::span<const Expr> replacements) const {
  switch (kind()) {
    case ExprKind::Constant: return *this;
    case ExprKind::Variable: {
      const int i = index();
      if (i < 0 || static_cast<size_t>(i) >= replacements.size())
        throw Error(ErrorCode::Internal, "substitution index out of range");
      return replacements[static_cast<size_t>(i)];
    }
    case ExprKind::Neg: return -left().substituted(replacements);
    case ExprKind::Exp: return pencilkit::exp(left().substituted(replacements));
    case ExprKind::Log: return pencilkit::log(left().substituted(replacements));
    case ExprKind::Sin: return pencilkit::sin(left().substituted(replacements));
    case ExprKind::Cos: return pencilkit::cos(left().substituted(replacements));
    case ExprKind::Sqrt: return pencilkit::sqrt(left().substituted(replacements));
    case ExprKind::Add:
      return left().substituted(replacements) + right().substituted(replacements);
    case ExprKind::Sub:
      return left().substituted(replacements) - right().substituted(replacements);
    case ExprKind::Mul:
      return left().substituted(replacements) * right().substituted(replacements);
    case ExprKind::Div:
      return left().substituted(replacements) / right().substituted(replacements);
    case ExprKind::Pow:
      return pencilkit::pow(left().substituted(replacements), exponent());
  }
  throw Error(ErrorCode::Internal, "unhandled expression kind");
}

// ---------------------------------------------------------------------------
// Printing.  Output re-parses to an evaluation-equal tree.

namespace {

// precedence: additive 1, multiplicative 2, unary minus 3, power 4, atom 5
int precedence(ExprKind kind) {
  switch (kind) {
    case ExprKind::Add:
    case ExprKind::Sub: return 1;
    case ExprKind::Mul:
    case ExprKind::Div: return 2;
    case ExprKind::Neg: return 3;
    case ExprKind::Pow: return 4;
    default: return 5;
  }
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void print_rec(const Expr& e, int parent_prec, std::string& out) {
  const int prec = precedence(e.kind());
  const bool parens = prec < parent_prec;
  if (parens) out += '(';
  switch (e.kind()) {
    case ExprKind::Constant: {
      const double v = e.constant_value();
      if (v < 0.0) {
        out += '(';
        out += format_double(v);
        out += ')';
      } else {
        out += format_double(v);
      }
      break;
    }
    case ExprKind::Variable: out += e.name(); break;
    case ExprKind::Neg:
      out += '-';
      print_rec(e.left(), 4, out);
      break;
    case ExprKind::Exp:
    case ExprKind::Log:
    case ExprKind::Sin:
    case ExprKind::Cos:
    case ExprKind::Sqrt: {
      switch (e.kind()) {
        case ExprKind::Exp: out += "exp"; break;
        case ExprKind::Log: out += "log"; break;
        case ExprKind::Sin: out += "sin"; break;
        case ExprKind::Cos: out += "cos"; break;
        default: out += "sqrt"; break;
      }
      out += '(';
      print_rec(e.left(), 0, out);
      out += ')';
      break;
    }
    case ExprKind::Add:
      print_rec(e.left(), 1, out);
      out += " + ";
      print_rec(e.right(), 1, out);
      break;
    case ExprKind::Sub:
      print_rec(e.left(), 1, out);
      out += " - ";
      print_rec(e.right(), 2, out);
      break;
    case ExprKind::Mul:
      print_rec(e.left(), 2, out);
      out += "*";
      print_rec(e.right(), 3, out);
      break;
    case ExprKind::Div:
      print_rec(e.left(), 2, out);
      out += "/";
      print_rec(e.right(), 3, out);
      break;
    case ExprKind::Pow:
      print_rec(e.left(), 5, out);
      out += '^';
      out += std::to_string(e.exponent());
      break;
  }
  if (parens) out += ')';
}

}  // namespace

std::string Expr::str() const {
  std::string out;
  print_rec(*this, 0, out);
  return out;
}

// ---------------------------------------------------------------------------
// Recursive-descent parser.

namespace {

struct Parser {
  std::string_view text;
  size_t pos = 0;
  std::span<const std::string> coords;

  [[noreturn]] void fail(const std::string& expected) {
    throw Error(ErrorCode::SyntaxError,
                "syntax error at offset " + std::to_string(pos) +
                    ": expected " + expected);
  }

  void skip_ws() {
    while (pos < text.size() &&
           std::isspace(static_cast<unsigned char>(text[pos])))
      ++pos;
  }

  bool peek(char c) {
    skip_ws();
    return pos < text.size() && text[pos] == c;
  }

  bool consume(char c) {
    if (peek(c)) {
      ++pos;
      return true;
    }
    return false;
  }

  Expr parse() {
    Expr e = parse_expr();
    skip_ws();
    if (pos != text.size()) fail("end of input");
    return e;
  }

  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      if (consume('+')) {
        e = e + parse_term();
      } else if (consume('-')) {
        e = e - parse_term();
      } else {
        return e;
      }
    }
  }

  Expr parse_term() {
    Expr e = parse_factor();
    for (;;) {
      if (consume('*')) {
        e = e * parse_factor();
      } else if (consume('/')) {
        e = e / parse_factor();
      } else {
        return e;
      }
    }
  }

  Expr parse_factor() {
    skip_ws();
    bool negated = false;
    if (consume('-')) negated = true;
    Expr e = parse_atom();
    if (consume('^')) e = pencilkit::pow(e, parse_integer());
    return negated ? -e : e;
  }

  int parse_integer() {
    skip_ws();
    bool neg = false;
    if (consume('-')) neg = true;
    skip_ws();
    if (pos >= text.size() ||
        !std::isdigit(static_cast<unsigned char>(text[pos])))
      fail("an integer exponent");
    long value = 0;
    while (pos < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[pos]))) {
      value = value * 10 + (text[pos] - '0');
      if (value > 1000000) fail("a smaller exponent");
      ++pos;
    }
    return static_cast<int>(neg ? -value : value);
  }

  Expr parse_atom() {
    skip_ws();
    if (pos >= text.size()) fail("a number, identifier or '('");
    const char c = text[pos];
    if (c == '(') {
      ++pos;
      Expr e = parse_expr();
      if (!consume(')')) fail("')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.')
      return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_')
      return parse_ident();
    fail("a number, identifier or '('");
  }

  Expr parse_number() {
    const size_t start = pos;
    while (pos < text.size() &&
           std::isdigit(static_cast<unsigned char>(text[pos])))
      ++pos;
    if (pos < text.size() && text[pos] == '.') {
      ++pos;
      while (pos < text.size() &&
             std::isdigit(static_cast<unsigned char>(text[pos])))
        ++pos;
    }
    if (pos < text.size() && (text[pos] == 'e' || text[pos] == 'E')) {
      size_t mark = pos;
      ++pos;
      if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) ++pos;
      if (pos < text.size() &&
          std::isdigit(static_cast<unsigned char>(text[pos]))) {
        while (pos < text.size() &&
               std::isdigit(static_cast<unsigned char>(text[pos])))
          ++pos;
      } else {
        pos = mark;
      }
    }
    if (pos == start) fail("a number");
    const std::string token(text.substr(start, pos - start));
    try {
      return Expr::constant(std::stod(token));
    } catch (const std::exception&) {
      pos = start;
      fail("a valid number");
    }
  }

  Expr parse_ident() {
    const size_t start = pos;
    while (pos < text.size() &&
           (std::isalnum(static_cast<unsigned char>(text[pos])) ||
            text[pos] == '_'))
      ++pos;
    const std::string ident(text.substr(start, pos - start));
    static const char* funcs[] = {"exp", "log", "sin", "cos", "sqrt"};
    for (const char* f : funcs) {
      if (ident == f) {
        if (!consume('(')) fail("'(' after function name");
        Expr arg = parse_expr();
        if (!consume(')')) fail("')'");
        if (ident == "exp") return pencilkit::exp(arg);
        if (ident == "log") return pencilkit::log(arg);
        if (ident == "sin") return pencilkit::sin(arg);
        if (ident == "cos") return pencilkit::cos(arg);
        return pencilkit::sqrt(arg);
      }
    }
    for (size_t i = 0; i < coords.size(); ++i) {
      if (coords[i] == ident) return Expr::variable(ident, static_cast<int>(i));
    }
    throw Error(ErrorCode::UnknownIdentifier,
                "unknown identifier '" + ident + "' at offset " +
                    std::to_string(start));
  }
};

}  // namespace

Expr parse_expression(std::string_view text,
                      std::span<const std::string> coords) {
  Parser p{text, 0, coords};
  return p.parse();
}

}  // namespace pencilkit
