#include "mconn/finite_difference.hpp"

#include <stdexcept>

namespace mconn {

double finite_difference_partial(const Expr& e, const Point& u,
                                 std::span<const int> multi_index, double h) {
  if (h <= 0.0) throw std::invalid_argument("finite difference step must be positive");
  if (multi_index.empty() || multi_index.size() > 2)
    throw std::invalid_argument("multi-index must have one or two entries");

  if (multi_index.size() == 1) {
    const int c = multi_index[0];
    return (e.evaluate(u.shifted(c, h)) - e.evaluate(u.shifted(c, -h))) / (2.0 * h);
  }

  const int c = multi_index[0];
  const int d = multi_index[1];
  if (c == d) {
    return (e.evaluate(u.shifted(c, h)) - 2.0 * e.evaluate(u) + e.evaluate(u.shifted(c, -h))) /
           (h * h);
  }
  const double pp = e.evaluate(u.shifted(c, h).shifted(d, h));
  const double pm = e.evaluate(u.shifted(c, h).shifted(d, -h));
  const double mp = e.evaluate(u.shifted(c, -h).shifted(d, h));
  const double mm = e.evaluate(u.shifted(c, -h).shifted(d, -h));
  return (pp - pm - mp + mm) / (4.0 * h * h);
}

}  // namespace mconn
