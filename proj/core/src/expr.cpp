#include "mconn/expr.hpp"

#include <cassert>
#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <map>
#include <stdexcept>

#include "mconn/errors.hpp"

namespace mconn {

double Point::coordinate(int c) const {
  const int n = dim();
  assert(c >= 0 && c < 2 * n);
  return c < n ? x[static_cast<std::size_t>(c)] : y[static_cast<std::size_t>(c - n)];
}

Point Point::shifted(int c, double delta) const {
  Point out = *this;
  const int n = dim();
  if (c < n) {
    out.x[static_cast<std::size_t>(c)] += delta;
  } else {
    out.y[static_cast<std::size_t>(c - n)] += delta;
  }
  return out;
}

std::string coordinate_name(int dim, int c) {
  if (c < dim) return "x" + std::to_string(c + 1);
  return "y" + std::to_string(c - dim + 1);
}

namespace detail {

enum class Kind { Constant, Coordinate, Add, Sub, Mul, Div, Pow, Neg, Call };

struct ExprNode {
  Kind kind;
  double value = 0.0;  // Constant
  int coord = -1;      // Coordinate
  Func func = Func::Sin;
  NodePtr a;
  NodePtr b;
};

namespace {

NodePtr make_constant(double v) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Constant;
  n->value = v;
  return n;
}

NodePtr make_coordinate(int c) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Coordinate;
  n->coord = c;
  return n;
}

NodePtr make_binary(Kind k, NodePtr a, NodePtr b) {
  auto n = std::make_shared<ExprNode>();
  n->kind = k;
  n->a = std::move(a);
  n->b = std::move(b);
  return n;
}

NodePtr make_neg(NodePtr a) {
  // Fold a negated literal into a negative literal so printed constants
  // reparse to the identical tree.
  if (a->kind == Kind::Constant) return make_constant(-a->value);
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Neg;
  n->a = std::move(a);
  return n;
}

NodePtr make_call(Func f, NodePtr a) {
  auto n = std::make_shared<ExprNode>();
  n->kind = Kind::Call;
  n->func = f;
  n->a = std::move(a);
  return n;
}

bool is_const(const NodePtr& n, double v) { return n->kind == Kind::Constant && n->value == v; }
bool is_const(const NodePtr& n) { return n->kind == Kind::Constant; }

// ---- simplifying builders -------------------------------------------------
// Conservative by design: constant folding plus identity elimination only.
// A fold is skipped whenever the folded value would be non-finite or hit a
// domain restriction; the node is kept and the error surfaces at evaluation.

NodePtr simp_add(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  if (is_const(a) && is_const(b)) {
    const double v = a->value + b->value;
    if (std::isfinite(v)) return make_constant(v);
  }
  return make_binary(Kind::Add, std::move(a), std::move(b));
}

NodePtr simp_sub(NodePtr a, NodePtr b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return make_neg(std::move(b));
  if (is_const(a) && is_const(b)) {
    const double v = a->value - b->value;
    if (std::isfinite(v)) return make_constant(v);
  }
  return make_binary(Kind::Sub, std::move(a), std::move(b));
}

NodePtr simp_mul(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (is_const(a) && is_const(b)) {
    const double v = a->value * b->value;
    if (std::isfinite(v)) return make_constant(v);
  }
  return make_binary(Kind::Mul, std::move(a), std::move(b));
}

NodePtr simp_div(NodePtr a, NodePtr b) {
  if (is_const(a, 0.0)) return make_constant(0.0);
  if (is_const(b, 1.0)) return a;
  if (is_const(a) && is_const(b) && b->value != 0.0) {
    const double v = a->value / b->value;
    if (std::isfinite(v)) return make_constant(v);
  }
  return make_binary(Kind::Div, std::move(a), std::move(b));
}

double eval_pow(double base, double exponent, const NodePtr& where);
std::string print_node(const NodePtr& n, int min_prec);

NodePtr simp_pow(NodePtr a, NodePtr b) {
  if (is_const(b, 1.0)) return a;
  if (is_const(b, 0.0)) return make_constant(1.0);
  if (is_const(a) && is_const(b)) {
    const double base = a->value;
    const double ex = b->value;
    const bool integral = ex == std::floor(ex);
    if ((base > 0.0 || (base != 0.0 && integral) || (base == 0.0 && ex > 0.0))) {
      const double v = std::pow(base, ex);
      if (std::isfinite(v)) return make_constant(v);
    }
  }
  return make_binary(Kind::Pow, std::move(a), std::move(b));
}

double eval_func(Func f, double arg, const NodePtr& where) {
  switch (f) {
    case Func::Sin:
      return std::sin(arg);
    case Func::Cos:
      return std::cos(arg);
    case Func::Exp:
      return std::exp(arg);
    case Func::Tanh:
      return std::tanh(arg);
    case Func::Log:
      if (arg <= 0.0) throw EvalError("log of non-positive argument", print_node(where, 0));
      return std::log(arg);
    case Func::Sqrt:
      if (arg < 0.0) throw EvalError("sqrt of negative argument", print_node(where, 0));
      return std::sqrt(arg);
  }
  std::abort();
}

NodePtr simp_call(Func f, NodePtr a) {
  if (is_const(a)) {
    const double arg = a->value;
    const bool valid = !((f == Func::Log && arg <= 0.0) || (f == Func::Sqrt && arg < 0.0));
    if (valid) {
      const double v = eval_func(f, arg, a);
      if (std::isfinite(v)) return make_constant(v);
    }
  }
  return make_call(f, std::move(a));
}

// ---- evaluation -----------------------------------------------------------

double eval_pow(double base, double exponent, const NodePtr& where) {
  if (base == 0.0 && exponent < 0.0)
    throw EvalError("zero base with negative exponent", print_node(where, 0));
  if (base < 0.0 && exponent != std::floor(exponent))
    throw EvalError("negative base with non-integer exponent", print_node(where, 0));
  return std::pow(base, exponent);
}

double eval_node(const NodePtr& n, const Point& u) {
  double v = 0.0;
  switch (n->kind) {
    case Kind::Constant:
      return n->value;
    case Kind::Coordinate:
      return u.coordinate(n->coord);
    case Kind::Add:
      v = eval_node(n->a, u) + eval_node(n->b, u);
      break;
    case Kind::Sub:
      v = eval_node(n->a, u) - eval_node(n->b, u);
      break;
    case Kind::Mul:
      v = eval_node(n->a, u) * eval_node(n->b, u);
      break;
    case Kind::Div: {
      const double d = eval_node(n->b, u);
      if (d == 0.0) throw EvalError("division by zero", print_node(n, 0));
      v = eval_node(n->a, u) / d;
      break;
    }
    case Kind::Pow:
      v = eval_pow(eval_node(n->a, u), eval_node(n->b, u), n);
      break;
    case Kind::Neg:
      v = -eval_node(n->a, u);
      break;
    case Kind::Call:
      v = eval_func(n->func, eval_node(n->a, u), n);
      break;
  }
  if (!std::isfinite(v)) throw EvalError("non-finite result", print_node(n, 0));
  return v;
}

// ---- printing -------------------------------------------------------------
// Precedence: + - (1), * / (2), unary - (3), ^ (4), atoms (5). Negative
// literals print as "-c" and therefore rank like unary minus.

int precedence(const NodePtr& n) {
  switch (n->kind) {
    case Kind::Add:
    case Kind::Sub:
      return 1;
    case Kind::Mul:
    case Kind::Div:
      return 2;
    case Kind::Neg:
      return 3;
    case Kind::Pow:
      return 4;
    case Kind::Constant:
      return n->value < 0.0 ? 3 : 5;
    default:
      return 5;
  }
}

std::string format_number(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

const char* func_name(Func f) {
  switch (f) {
    case Func::Sin:
      return "sin";
    case Func::Cos:
      return "cos";
    case Func::Exp:
      return "exp";
    case Func::Log:
      return "log";
    case Func::Sqrt:
      return "sqrt";
    case Func::Tanh:
      return "tanh";
  }
  std::abort();
}

std::string print_node_dim(const NodePtr& n, int min_prec, int dim);

std::string render(const NodePtr& n, int dim) {
  switch (n->kind) {
    case Kind::Constant:
      return format_number(n->value);
    case Kind::Coordinate:
      return coordinate_name(dim, n->coord);
    case Kind::Add:
      return print_node_dim(n->a, 1, dim) + " + " + print_node_dim(n->b, 2, dim);
    case Kind::Sub:
      return print_node_dim(n->a, 1, dim) + " - " + print_node_dim(n->b, 2, dim);
    case Kind::Mul:
      return print_node_dim(n->a, 2, dim) + " * " + print_node_dim(n->b, 3, dim);
    case Kind::Div:
      return print_node_dim(n->a, 2, dim) + " / " + print_node_dim(n->b, 3, dim);
    case Kind::Neg:
      return "-" + print_node_dim(n->a, 4, dim);
    case Kind::Pow:
      return print_node_dim(n->a, 5, dim) + "^" + print_node_dim(n->b, 3, dim);
    case Kind::Call:
      return std::string(func_name(n->func)) + "(" + print_node_dim(n->a, 0, dim) + ")";
  }
  std::abort();
}

std::string print_node_dim(const NodePtr& n, int min_prec, int dim) {
  std::string s = render(n, dim);
  if (precedence(n) < min_prec) return "(" + s + ")";
  return s;
}

// print_node without a dim is only used in error messages raised from deep
// inside evaluation, where the dim is not threaded through; coordinate names
// fall back to a large split so x-indices print correctly.
thread_local int g_print_dim = 1 << 20;

std::string print_node(const NodePtr& n, int min_prec) {
  return print_node_dim(n, min_prec, g_print_dim);
}

// ---- differentiation ------------------------------------------------------

NodePtr diff_node(const NodePtr& n, int var) {
  switch (n->kind) {
    case Kind::Constant:
      return make_constant(0.0);
    case Kind::Coordinate:
      return make_constant(n->coord == var ? 1.0 : 0.0);
    case Kind::Add:
      return simp_add(diff_node(n->a, var), diff_node(n->b, var));
    case Kind::Sub:
      return simp_sub(diff_node(n->a, var), diff_node(n->b, var));
    case Kind::Mul:
      return simp_add(simp_mul(diff_node(n->a, var), n->b),
                      simp_mul(n->a, diff_node(n->b, var)));
    case Kind::Div:
      // (a/b)' = (a'b - ab') / b^2
      return simp_div(simp_sub(simp_mul(diff_node(n->a, var), n->b),
                               simp_mul(n->a, diff_node(n->b, var))),
                      simp_pow(n->b, make_constant(2.0)));
    case Kind::Neg:
      return make_neg(diff_node(n->a, var));
    case Kind::Pow: {
      if (is_const(n->b)) {
        // (a^k)' = k a^(k-1) a'
        const double k = n->b->value;
        return simp_mul(simp_mul(make_constant(k), simp_pow(n->a, make_constant(k - 1.0))),
                        diff_node(n->a, var));
      }
      // (a^b)' = a^b (b' log a + b a' / a)
      return simp_mul(simp_pow(n->a, n->b),
                      simp_add(simp_mul(diff_node(n->b, var), make_call(Func::Log, n->a)),
                               simp_div(simp_mul(n->b, diff_node(n->a, var)), n->a)));
    }
    case Kind::Call: {
      NodePtr da = diff_node(n->a, var);
      switch (n->func) {
        case Func::Sin:
          return simp_mul(simp_call(Func::Cos, n->a), da);
        case Func::Cos:
          return make_neg(simp_mul(simp_call(Func::Sin, n->a), da));
        case Func::Exp:
          return simp_mul(simp_call(Func::Exp, n->a), da);
        case Func::Log:
          return simp_div(da, n->a);
        case Func::Sqrt:
          return simp_div(da, simp_mul(make_constant(2.0), simp_call(Func::Sqrt, n->a)));
        case Func::Tanh:
          return simp_mul(simp_sub(make_constant(1.0),
                                   simp_pow(simp_call(Func::Tanh, n->a), make_constant(2.0))),
                          da);
      }
      std::abort();
    }
  }
  std::abort();
}

bool same_node(const NodePtr& a, const NodePtr& b) {
  if (a == b) return true;
  if (a->kind != b->kind) return false;
  switch (a->kind) {
    case Kind::Constant:
      return a->value == b->value;
    case Kind::Coordinate:
      return a->coord == b->coord;
    case Kind::Call:
      if (a->func != b->func) return false;
      return same_node(a->a, b->a);
    case Kind::Neg:
      return same_node(a->a, b->a);
    default:
      return same_node(a->a, b->a) && same_node(a->b, b->b);
  }
}

}  // namespace
}  // namespace detail

using detail::ExprNode;
using detail::Kind;
using detail::NodePtr;

double Expr::evaluate(const Point& u) const {
  if (empty()) throw EvalError("empty expression", "");
  if (u.dim() != dim_ || static_cast<int>(u.y.size()) != dim_)
    throw EvalError("point dimension " + std::to_string(u.dim()) +
                        " does not match expression dimension " + std::to_string(dim_),
                    str());
  detail::g_print_dim = dim_;
  return detail::eval_node(node_, u);
}

Expr Expr::derivative(int coord) const {
  assert(!empty());
  assert(coord >= 0 && coord < 2 * dim_);
  return Expr(dim_, detail::diff_node(node_, coord));
}

std::string Expr::str() const {
  if (empty()) return "";
  return detail::print_node_dim(node_, 0, dim_);
}

bool Expr::same_tree(const Expr& other) const {
  if (empty() || other.empty()) return empty() && other.empty();
  return dim_ == other.dim_ && detail::same_node(node_, other.node_);
}

bool Expr::is_constant(double value) const {
  return !empty() && node_->kind == Kind::Constant && node_->value == value;
}

Expr Expr::constant(int dim, double value) { return Expr(dim, detail::make_constant(value)); }

Expr Expr::coordinate(int dim, int c) {
  assert(c >= 0 && c < 2 * dim);
  return Expr(dim, detail::make_coordinate(c));
}

Expr Expr::call(Func f, Expr argument) {
  return Expr(argument.dim_, detail::simp_call(f, std::move(argument.node_)));
}

Expr Expr::pow(Expr base, Expr exponent) {
  assert(base.dim_ == exponent.dim_);
  return Expr(base.dim_, detail::simp_pow(std::move(base.node_), std::move(exponent.node_)));
}

Expr Expr::pow(Expr base, double exponent) {
  const int d = base.dim_;
  return pow(std::move(base), Expr::constant(d, exponent));
}

Expr operator+(const Expr& a, const Expr& b) {
  assert(a.dim_ == b.dim_);
  return Expr(a.dim_, detail::simp_add(a.node_, b.node_));
}

Expr operator-(const Expr& a, const Expr& b) {
  assert(a.dim_ == b.dim_);
  return Expr(a.dim_, detail::simp_sub(a.node_, b.node_));
}

Expr operator*(const Expr& a, const Expr& b) {
  assert(a.dim_ == b.dim_);
  return Expr(a.dim_, detail::simp_mul(a.node_, b.node_));
}

Expr operator/(const Expr& a, const Expr& b) {
  assert(a.dim_ == b.dim_);
  return Expr(a.dim_, detail::simp_div(a.node_, b.node_));
}

Expr operator-(const Expr& a) { return Expr(a.dim_, detail::make_neg(a.node_)); }

// ---- parser ---------------------------------------------------------------

class Parser {
 public:
  Parser(std::string_view text, int dim) : text_(text), dim_(dim) {}

  Expr run() {
    NodePtr root = parse_expr();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return Expr(dim_, std::move(root));
  }

 private:
  [[noreturn]] void fail(const std::string& message) const { throw ParseError(message, pos_); }
  [[noreturn]] void fail_at(const std::string& message, std::size_t at) const {
    throw ParseError(message, at);
  }

  void skip_space() {
    while (pos_ < text_.size() && (text_[pos_] == ' ' || text_[pos_] == '\t')) ++pos_;
  }

  bool peek_is(char c) {
    skip_space();
    return pos_ < text_.size() && text_[pos_] == c;
  }

  bool consume(char c) {
    if (peek_is(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  // expr := term { ('+'|'-') term }
  NodePtr parse_expr() {
    NodePtr left = parse_term();
    for (;;) {
      if (consume('+')) {
        left = detail::make_binary(Kind::Add, std::move(left), parse_term());
      } else if (consume('-')) {
        left = detail::make_binary(Kind::Sub, std::move(left), parse_term());
      } else {
        return left;
      }
    }
  }

  // term := factor { ('*'|'/') factor }
  NodePtr parse_term() {
    NodePtr left = parse_factor();
    for (;;) {
      if (consume('*')) {
        left = detail::make_binary(Kind::Mul, std::move(left), parse_factor());
      } else if (consume('/')) {
        left = detail::make_binary(Kind::Div, std::move(left), parse_factor());
      } else {
        return left;
      }
    }
  }

  // factor := '-' factor | power
  NodePtr parse_factor() {
    if (consume('-')) return detail::make_neg(parse_factor());
    return parse_power();
  }

  // power := atom [ '^' factor ]   (right associative; exponent may be signed)
  NodePtr parse_power() {
    NodePtr base = parse_atom();
    if (consume('^')) return detail::make_binary(Kind::Pow, std::move(base), parse_factor());
    return base;
  }

  NodePtr parse_atom() {
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of input");
    const char c = text_[pos_];
    if (c == '(') {
      ++pos_;
      NodePtr inner = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return inner;
    }
    if ((c >= '0' && c <= '9') || c == '.') return parse_number();
    if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return parse_identifier();
    fail(std::string("unexpected character '") + c + "'");
  }

  NodePtr parse_number() {
    const char* begin = text_.data() + pos_;
    const char* end = text_.data() + text_.size();
    double value = 0.0;
    auto res = std::from_chars(begin, end, value);
    if (res.ec != std::errc()) fail("malformed number");
    pos_ = static_cast<std::size_t>(res.ptr - text_.data());
    return detail::make_constant(value);
  }

  NodePtr parse_identifier() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                                   text_[pos_] == '_')) {
      ++pos_;
    }
    const std::string_view name = text_.substr(start, pos_ - start);

    // Coordinate: x<k> or y<k>, k a 1-based decimal index.
    if (name.size() >= 2 && (name[0] == 'x' || name[0] == 'y')) {
      bool digits = true;
      for (std::size_t i = 1; i < name.size(); ++i) {
        if (name[i] < '0' || name[i] > '9') {
          digits = false;
          break;
        }
      }
      if (digits) {
        int index = 0;
        auto res = std::from_chars(name.data() + 1, name.data() + name.size(), index);
        if (res.ec != std::errc() || index < 1 || index > dim_)
          fail_at("coordinate index out of range for dimension " + std::to_string(dim_), start);
        const int c = (name[0] == 'x') ? index - 1 : dim_ + index - 1;
        return detail::make_coordinate(c);
      }
    }

    static const std::map<std::string_view, Func> functions = {
        {"sin", Func::Sin}, {"cos", Func::Cos},   {"exp", Func::Exp},
        {"log", Func::Log}, {"sqrt", Func::Sqrt}, {"tanh", Func::Tanh},
    };
    auto it = functions.find(name);
    if (it != functions.end()) {
      if (!consume('(')) fail("expected '(' after function name");
      NodePtr arg = parse_expr();
      if (!consume(')')) fail("expected ')'");
      return detail::make_call(it->second, std::move(arg));
    }
    fail_at("unknown identifier '" + std::string(name) + "'", start);
  }

  std::string_view text_;
  int dim_;
  std::size_t pos_ = 0;
};

Expr parse_expression(std::string_view text, int dim) {
  if (dim < 1) throw ParseError("dimension must be positive", 0);
  return Parser(text, dim).run();
}

}  // namespace mconn
