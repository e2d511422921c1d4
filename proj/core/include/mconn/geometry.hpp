#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "mconn/expr.hpp"
#include "mconn/jet.hpp"
#include "mconn/linalg.hpp"

namespace mconn {

/// Generalized Lagrange metric g_ij(x, y): a symmetric expression-valued
/// matrix field. Only the upper triangle is stored, so g_ij(u) = g_ji(u)
/// holds structurally at every point. Invertibility is enforced at each
/// evaluation through the LU singularity threshold.
class GLMetricField {
 public:
  /// `upper` holds the i <= j entries row by row:
  /// g11, g12, ..., g1n, g22, ..., g2n, ..., gnn.
  GLMetricField(int n, std::vector<Expr> upper);

  static GLMetricField identity(int n);

  int dim() const noexcept { return n_; }
  const Expr& entry(int i, int j) const;

  Eigen::MatrixXd value(const Point& u) const;
  InverseResult inverse(const Point& u) const;

  /// S(g_ij)(u) for the semispray with the given coefficient values:
  /// S(g) = y^c dg/dx^c - 2 G^c dg/dy^c.
  Eigen::MatrixXd semispray_derivative(const Eigen::VectorXd& spray_values,
                                       const Point& u) const;

 private:
  int upper_index(int i, int j) const;

  int n_;
  std::vector<Expr> upper_;
  std::vector<JetTable> tables_;  // order-1 tables, one per stored entry
};

/// Semispray coefficient field G^i(x, y). Realizes the second-order vector
/// field S = y^i d/dx^i - 2 G^i d/dy^i.
class SemisprayField {
 public:
  SemisprayField(int n, std::vector<Expr> coefficients);

  static SemisprayField zero(int n);

  int dim() const noexcept { return n_; }
  const Expr& coefficient(int i) const { return coefficients_[static_cast<std::size_t>(i)]; }

  Eigen::VectorXd value(const Point& u) const;

  /// dG^i/dy^j (u), the induced nonlinear connection coefficients.
  Eigen::MatrixXd fiber_jacobian(const Point& u) const;

 private:
  int n_;
  std::vector<Expr> coefficients_;
  std::vector<Expr> fiber_derivatives_;  // n*n row-major, dG^i/dy^j
};

/// Nonlinear connection coefficients N^i_j at a point, together with the
/// g-lowered matrix N_ij = g_ik N^k_j and its symmetric/skew split
/// (performed on the lowered matrix, never on N^i_j directly).
struct ConnectionValue {
  Point point;
  Eigen::MatrixXd coefficients;  // N^i_j
  Eigen::MatrixXd lowered;       // N_ij
  Eigen::MatrixXd sym;           // N_(ij)
  Eigen::MatrixXd skew;          // N_[ij]

  static ConnectionValue make(Point u, Eigen::MatrixXd n_coeffs,
                              const Eigen::MatrixXd& metric_at_u);
};

/// Dense rank-4 array with n entries per slot; index order matches the
/// written form T^{ab}_{cd} -> t(a, b, c, d).
class Tensor4 {
 public:
  explicit Tensor4(int n) : n_(n), data_(static_cast<std::size_t>(n) * n * n * n, 0.0) {}

  int dim() const noexcept { return n_; }

  double& operator()(int a, int b, int c, int d) {
    return data_[flat(a, b, c, d)];
  }
  double operator()(int a, int b, int c, int d) const { return data_[flat(a, b, c, d)]; }

 private:
  std::size_t flat(int a, int b, int c, int d) const {
    return static_cast<std::size_t>(((a * n_ + b) * n_ + c) * n_ + d);
  }

  int n_;
  std::vector<double> data_;
};

/// The pair O, O* with O^{ij}_{kl} = (1/2)(d^i_k d^j_l - g^{ij} g_kl) and
/// O*^{ij}_{kl} = (1/2)(d^i_k d^j_l + g^{ij} g_kl). Both act on (1,1)
/// tensors through obata_apply and are complementary projectors under
/// obata_compose.
struct ObataPair {
  Tensor4 projector;   // O
  Tensor4 complement;  // O*
};

/// Action of an operator kernel on a (1,1) tensor: (T X)^i_j = T^{ki}_{jm} X^m_k.
/// Lowering indices with g, O extracts the skew part of X_ij and O* the
/// symmetric part.
Eigen::MatrixXd obata_apply(const Tensor4& op, const Eigen::MatrixXd& X);

/// Kernel composition matching obata_apply(A, obata_apply(B, X)):
/// (A o B)^{qi}_{jp} = A^{ki}_{jm} B^{qm}_{kp}.
Tensor4 obata_compose(const Tensor4& a, const Tensor4& b);

/// Kernel of the identity action, delta^i_k delta^j_l.
Tensor4 obata_identity(int n);

ObataPair obata_operators(const Eigen::MatrixXd& g, const Eigen::MatrixXd& g_inverse);
ObataPair obata_operators(const GLMetricField& g, const Point& u);

/// (1,1)-type tensor field X^m_k with expression entries; constant matrices
/// are wrapped as constant expressions.
class Tensor11Field {
 public:
  Tensor11Field(int n, std::vector<Expr> entries);  // n*n row-major
  static Tensor11Field constant(int n, const Eigen::MatrixXd& value);

  int dim() const noexcept { return n_; }
  Eigen::MatrixXd value(const Point& u) const;

 private:
  int n_;
  std::vector<Expr> entries_;
};

// ---- pointwise operations ---------------------------------------------------

/// S(f)(u) = y^i df/dx^i - 2 G^i df/dy^i.
double apply_semispray(const SemisprayField& G, const Expr& f, const Point& u);

/// Induced nonlinear connection N^i_j = dG^i/dy^j at u.
Eigen::MatrixXd connection_from_semispray(const SemisprayField& G, const Point& u);
ConnectionValue connection_from_semispray(const SemisprayField& G, const GLMetricField& g,
                                          const Point& u);

/// Components of the dynamical covariant derivative of the vertical field
/// X^i d/dy^i: (nabla X)^i = S(X^i) + X^j N^i_j.
Eigen::VectorXd nabla_vertical(const SemisprayField& G, const Eigen::MatrixXd& N,
                               std::span<const Expr> X, const Point& u);

/// g_{ij|} = S(g_ij) - g_im N^m_j - g_mj N^m_i. Zero iff N is metric for g
/// along S.
Eigen::MatrixXd nabla_metric(const SemisprayField& G, const Eigen::MatrixXd& N,
                             const GLMetricField& g, const Point& u);

/// The metric nonlinear connection N^c of the pair (S, g):
/// N^{ci}_j = (1/2) g^{ik} S(g_kj) + O^{ik}_{sj} dG^s/dy^k.
ConnectionValue metric_connection(const SemisprayField& G, const GLMetricField& g,
                                  const Point& u);

/// The same coefficients along three algebraically equivalent routes:
/// `direct` contracts the Obata kernel, `covariant` adds the lowered
/// covariant derivative of g to dG/dy, `lackey` expands the kernel.
/// They agree to roundoff; exposed for the equivalence checks.
struct MetricConnectionForms {
  Eigen::MatrixXd direct;
  Eigen::MatrixXd covariant;
  Eigen::MatrixXd lackey;
};
MetricConnectionForms metric_connection_forms(const SemisprayField& G, const GLMetricField& g,
                                              const Point& u);

/// A member N = N^c + O X of the family of metric nonlinear connections.
ConnectionValue family_member(const ConnectionValue& metric_conn, const Eigen::MatrixXd& X,
                              const GLMetricField& g, const Point& u);

/// Helmholtz residual S(g_ij) - g_im dG^m/dy^j - g_mj dG^m/dy^i of the
/// induced connection dG/dy; vanishes iff dG/dy is itself metric.
Eigen::MatrixXd helmholtz_residual(const SemisprayField& G, const GLMetricField& g,
                                   const Point& u);

/// Semispray generated by a connection through 2 G^i = N^i_j y^j.
Eigen::VectorXd horizontal_semispray(const Eigen::MatrixXd& N, const Point& u);

}  // namespace mconn
