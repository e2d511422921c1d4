#pragma once

#include <Eigen/Dense>
#include <vector>

#include "mconn/expr.hpp"

namespace mconn {

/// Value and partial derivatives of a scalar field at a fixed point, up to
/// third order. Derivative slots above `order` are zero-filled and flagged
/// absent through `order`.
///
/// Index convention matches Point: slot c < n is d/dx_{c+1}, slot c >= n is
/// d/dy_{c-n+1}.
struct Jet {
  int dim = 0;    // n
  int order = 0;  // highest filled derivative order, 0..3
  double value = 0.0;
  Eigen::VectorXd grad;   // 2n
  Eigen::MatrixXd hess;   // 2n x 2n
  std::vector<double> third;  // (2n)^3 row-major

  double third_at(int a, int b, int c) const {
    const int m = 2 * dim;
    return third[static_cast<std::size_t>((a * m + b) * m + c)];
  }
};

/// Precomputed symbolic derivative trees of one expression, up to a fixed
/// order. Building the table costs one symbolic differentiation per slot;
/// evaluating a jet afterwards is a plain tree walk per slot. Fields that
/// are evaluated at many points hold one of these.
///
/// Entries are computed per ordered index tuple (no mirroring), so the
/// symmetry of mixed partials is a checkable property rather than a
/// construction artifact.
class JetTable {
 public:
  JetTable(Expr e, int order);

  const Expr& source() const noexcept { return source_; }
  int order() const noexcept { return order_; }
  int dim() const noexcept { return source_.dim(); }

  Jet eval(const Point& u) const;

  /// First-derivative tree for coordinate slot c.
  const Expr& first(int c) const { return first_[static_cast<std::size_t>(c)]; }

 private:
  Expr source_;
  int order_;
  std::vector<Expr> first_;   // 2n
  std::vector<Expr> second_;  // (2n)^2 row-major
  std::vector<Expr> third_;   // (2n)^3 row-major
};

/// One-shot jet of an expression. Builds a throwaway JetTable; prefer a
/// retained JetTable when evaluating the same field at many points.
Jet jet(const Expr& e, const Point& u, int order);

}  // namespace mconn
