#pragma once

#include <Eigen/Dense>

namespace mconn {

inline constexpr double kSingularityTolerance = 1e-10;

struct InverseResult {
  Eigen::MatrixXd inverse;
  double determinant;
};

/// LU inversion with partial pivoting. Throws SingularMetricError when
/// |det| falls at or below `tolerance`.
InverseResult checked_inverse(const Eigen::MatrixXd& m,
                              double tolerance = kSingularityTolerance);

inline double max_abs(const Eigen::MatrixXd& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace mconn
