#pragma once

#include <span>

#include "mconn/expr.hpp"

namespace mconn {

// Central finite differences, O(h^2). Test oracle for the symbolic engine;
// production code paths never call these.

/// Central-difference estimate of the partial selected by `multi_index`
/// (one or two coordinate slots). Throws EvalError if a stencil point is
/// singular.
double finite_difference_partial(const Expr& e, const Point& u,
                                 std::span<const int> multi_index, double h);

inline double finite_difference_partial(const Expr& e, const Point& u, int c, double h) {
  const int mi[] = {c};
  return finite_difference_partial(e, u, mi, h);
}

inline double finite_difference_partial(const Expr& e, const Point& u, int c, int d, double h) {
  const int mi[] = {c, d};
  return finite_difference_partial(e, u, mi, h);
}

}  // namespace mconn
