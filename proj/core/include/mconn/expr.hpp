#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace mconn {

/// A point u = (x, y) of the induced chart on the tangent bundle.
/// Coordinates are indexed 0..2n-1 with the base block first: index c < n
/// names x_{c+1}, index c >= n names y_{c-n+1}.
struct Point {
  std::vector<double> x;
  std::vector<double> y;

  int dim() const { return static_cast<int>(x.size()); }
  double coordinate(int c) const;
  Point shifted(int c, double delta) const;
};

enum class Func { Sin, Cos, Exp, Log, Sqrt, Tanh };

namespace detail {
struct ExprNode;
using NodePtr = std::shared_ptr<const ExprNode>;
}  // namespace detail

/// Printable name of coordinate index `c` in dimension `dim` ("x1".."yn").
std::string coordinate_name(int dim, int c);

/// Immutable scalar expression over the 2n chart coordinates x1..xn, y1..yn,
/// numeric literals, +, -, *, /, ^, unary minus and the functions
/// sin, cos, exp, log, sqrt, tanh.
///
/// Expressions are value types backed by shared immutable nodes; evaluation
/// and differentiation never mutate shared state and are safe to run
/// concurrently at distinct points.
class Expr {
 public:
  Expr() = default;

  int dim() const noexcept { return dim_; }
  bool empty() const noexcept { return node_ == nullptr; }

  /// Arithmetic evaluation at the point. Throws EvalError on division by
  /// zero, log/sqrt of invalid arguments, negative base with non-integer
  /// exponent, or any non-finite intermediate.
  double evaluate(const Point& u) const;

  /// Exact symbolic partial derivative with respect to coordinate index
  /// `coord` (0..2n-1). Light simplification (constant folding plus the
  /// 0*e, e+0, 1*e, e^1, e^0 identities) keeps repeated derivatives bounded;
  /// no canonicalization is attempted.
  Expr derivative(int coord) const;

  /// Infix rendering that reparses to a structurally equal tree.
  std::string str() const;

  bool same_tree(const Expr& other) const;
  bool is_constant(double value) const;

  // ---- builders (these apply the conservative simplification rules) ----
  static Expr constant(int dim, double value);
  static Expr coordinate(int dim, int c);
  /// 1-based base coordinate x_i.
  static Expr base(int dim, int i) { return coordinate(dim, i - 1); }
  /// 1-based fiber coordinate y_i.
  static Expr fiber(int dim, int i) { return coordinate(dim, dim + i - 1); }
  static Expr call(Func f, Expr argument);
  static Expr pow(Expr base, Expr exponent);
  static Expr pow(Expr base, double exponent);

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr operator+(double a, const Expr& b) { return Expr::constant(b.dim(), a) + b; }
  friend Expr operator+(const Expr& a, double b) { return a + Expr::constant(a.dim(), b); }
  friend Expr operator-(double a, const Expr& b) { return Expr::constant(b.dim(), a) - b; }
  friend Expr operator-(const Expr& a, double b) { return a - Expr::constant(a.dim(), b); }
  friend Expr operator*(double a, const Expr& b) { return Expr::constant(b.dim(), a) * b; }
  friend Expr operator*(const Expr& a, double b) { return a * Expr::constant(a.dim(), b); }
  friend Expr operator/(double a, const Expr& b) { return Expr::constant(b.dim(), a) / b; }
  friend Expr operator/(const Expr& a, double b) { return a / Expr::constant(a.dim(), b); }

 private:
  friend Expr parse_expression(std::string_view, int);
  friend class Parser;

  Expr(int dim, detail::NodePtr node) : dim_(dim), node_(std::move(node)) {}

  int dim_ = 0;
  detail::NodePtr node_;
};

/// Parse an infix expression in dimension n. Variables are x1..xn, y1..yn;
/// + and - are left associative, * and / bind tighter, ^ is right
/// associative and binds tightest; functions use call syntax f(expr).
/// Throws ParseError with the byte offset of the problem.
Expr parse_expression(std::string_view text, int dim);

}  // namespace mconn
