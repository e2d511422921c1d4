#pragma once

#include <Eigen/Dense>

#include "mconn/geometry.hpp"

namespace mconn {

/// Change of basis between the natural frame (d/dx^i, d/dy^i) and the
/// Berwald frame (delta/delta x^i = d/dx^i - N^j_i d/dy^j, d/dy^i) of a
/// connection, with the induced horizontal/vertical projectors expressed in
/// the natural frame.
struct AdaptedFrame {
  Eigen::MatrixXd basis;       // columns: Berwald frame vectors, [[I,0],[-N,I]]
  Eigen::MatrixXd inverse;     // [[I,0],[N,I]]
  Eigen::MatrixXd horizontal;  // h = [[I,0],[-N,0]]
  Eigen::MatrixXd vertical;    // v = I - h
};
AdaptedFrame adapted_frame(const Eigen::MatrixXd& N);

/// Tangent structure J = d/dy^i (x) dx^i in the natural frame.
Eigen::MatrixXd tangent_structure(int n);

/// Almost complex structure F = delta/delta x^i (x) delta y^i
/// - d/dy^i (x) dx^i in the natural frame; satisfies F^2 = -Id for every N.
Eigen::MatrixXd almost_complex_structure(const Eigen::MatrixXd& N);

/// Sasaki-type lift G = g_ij dx^i (x) dx^j + g_ij delta y^i (x) delta y^j
/// as a bilinear-form matrix in the natural frame.
Eigen::MatrixXd sasaki_metric(const Eigen::MatrixXd& g, const Eigen::MatrixXd& N);

struct HermitianPair {
  Eigen::MatrixXd complex_structure;  // F, 2n x 2n
  Eigen::MatrixXd metric;             // G, 2n x 2n
};
HermitianPair almost_hermitian(const GLMetricField& g, const ConnectionValue& conn,
                               const Point& u);

/// Matrix of the bilinear form (X, Y) -> G(F X, Y); equals the Cartan
/// 2-form matrix exactly when the connection's horizontal subbundle is
/// Lagrangian.
inline Eigen::MatrixXd hermitian_form(const HermitianPair& pair) {
  return pair.complex_structure.transpose() * pair.metric;
}

}  // namespace mconn
