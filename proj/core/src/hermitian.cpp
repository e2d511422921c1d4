#include "mconn/hermitian.hpp"

namespace mconn {

AdaptedFrame adapted_frame(const Eigen::MatrixXd& N) {
  const int n = static_cast<int>(N.rows());
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);

  AdaptedFrame out;
  out.basis = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  out.basis.block(n, 0, n, n) = -N;
  out.inverse = Eigen::MatrixXd::Identity(2 * n, 2 * n);
  out.inverse.block(n, 0, n, n) = N;

  out.horizontal = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  out.horizontal.block(0, 0, n, n) = id;
  out.horizontal.block(n, 0, n, n) = -N;
  out.vertical = Eigen::MatrixXd::Identity(2 * n, 2 * n) - out.horizontal;
  return out;
}

Eigen::MatrixXd tangent_structure(int n) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  J.block(n, 0, n, n) = Eigen::MatrixXd::Identity(n, n);
  return J;
}

Eigen::MatrixXd almost_complex_structure(const Eigen::MatrixXd& N) {
  const int n = static_cast<int>(N.rows());
  Eigen::MatrixXd F(2 * n, 2 * n);
  F.block(0, 0, n, n) = N;
  F.block(0, n, n, n) = Eigen::MatrixXd::Identity(n, n);
  F.block(n, 0, n, n) = -Eigen::MatrixXd::Identity(n, n) - N * N;
  F.block(n, n, n, n) = -N;
  return F;
}

Eigen::MatrixXd sasaki_metric(const Eigen::MatrixXd& g, const Eigen::MatrixXd& N) {
  const int n = static_cast<int>(g.rows());
  const Eigen::MatrixXd gN = g * N;
  Eigen::MatrixXd G(2 * n, 2 * n);
  G.block(0, 0, n, n) = g + N.transpose() * gN;
  G.block(0, n, n, n) = gN.transpose();
  G.block(n, 0, n, n) = gN;
  G.block(n, n, n, n) = g;
  return G;
}

HermitianPair almost_hermitian(const GLMetricField& g, const ConnectionValue& conn,
                               const Point& u) {
  const Eigen::MatrixXd gv = g.value(u);
  checked_inverse(gv);  // nondegeneracy gate
  return {almost_complex_structure(conn.coefficients), sasaki_metric(gv, conn.coefficients)};
}

}  // namespace mconn
