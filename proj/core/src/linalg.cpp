#include "mconn/linalg.hpp"

#include <cmath>

#include "mconn/errors.hpp"

namespace mconn {

InverseResult checked_inverse(const Eigen::MatrixXd& m, double tolerance) {
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(m);
  const double det = lu.determinant();
  if (!std::isfinite(det) || std::abs(det) <= tolerance)
    throw SingularMetricError(det, tolerance);
  return {lu.inverse(), det};
}

}  // namespace mconn
