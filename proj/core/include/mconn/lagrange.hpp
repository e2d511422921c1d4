#pragma once

#include <Eigen/Dense>

#include "mconn/expr.hpp"
#include "mconn/geometry.hpp"
#include "mconn/jet.hpp"

namespace mconn {

/// A Lagrange space (M, L) with regular Lagrangian L(x, y). All derived
/// structures are built once at construction and immutable afterwards:
///
///  - the metric g_ij = (1/2) d2L/dy_i dy_j as a symbolic GLMetricField,
///  - the canonic semispray G^i = (1/4) g^{ik} (d2L/dy^k dx^h y^h - dL/dx^k)
///    as a symbolic SemisprayField (the metric inverse enters through the
///    exact adjugate/determinant trees, so dG/dy stays symbolic and exact),
///  - the energy E_L = y^i dL/dy^i - L,
///  - an order-3 jet table of L feeding the purely pointwise route for the
///    compatible connection.
///
/// The two connection routes (`canonic_connection` through the symbolic
/// spray, `unique_connection` through jets of L) are computed along disjoint
/// arithmetic paths and agree to roundoff; both are exposed so the agreement
/// is testable.
class LagrangeSpace {
 public:
  LagrangeSpace(int n, Expr lagrangian);

  int dim() const noexcept { return n_; }
  const Expr& lagrangian() const noexcept { return lagrangian_; }
  const GLMetricField& metric_field() const noexcept { return metric_; }
  const SemisprayField& canonic_spray_field() const noexcept { return spray_; }
  const Expr& energy_expression() const noexcept { return energy_; }

  /// g_ij(u); throws DegenerateLagrangianError when the fiber Hessian loses
  /// rank at u.
  Eigen::MatrixXd metric(const Point& u) const;
  InverseResult metric_inverse(const Point& u) const;

  /// Canonic semispray coefficients at u, evaluated from jets of L.
  Eigen::VectorXd canonic_spray(const Point& u) const;

  /// dG^i/dy^j of the symbolic canonic spray.
  ConnectionValue canonic_connection(const Point& u) const;

  /// The connection compatible with both g and the Cartan 2-form,
  /// N^i_j = (1/2) g^{ik} [S(g_kj) + (1/2)(d2L/dy^k dx^j - d2L/dx^k dy^j)],
  /// evaluated pointwise from the order-3 jet of L.
  ConnectionValue unique_connection(const Point& u) const;

  double energy(const Point& u) const;

  /// S(g_ij)(u) along the canonic semispray, from third derivatives of L.
  Eigen::MatrixXd metric_spray_derivative(const Point& u) const;

  /// (1/4)(d2L/dy^i dx^j - d2L/dx^i dy^j): the skew block the symplectic
  /// structure forces on the lowered connection.
  Eigen::MatrixXd mixed_skew(const Point& u) const;

  Jet lagrangian_jet(const Point& u) const { return table_.eval(u); }

 private:
  Eigen::MatrixXd metric_from_jet(const Jet& j) const;
  Eigen::VectorXd spray_from_jet(const Jet& j, const Eigen::MatrixXd& g_inverse,
                                 const Point& u) const;

  int n_;
  Expr lagrangian_;
  JetTable table_;  // order 3
  GLMetricField metric_;
  SemisprayField spray_;
  Expr energy_;
};

/// The Cartan 2-form blocks in the adapted cobasis of the connection N:
/// omega = g_ij dy^j /\ dx^i + hh_ij dx^j /\ dx^i with
/// hh_ij = -N_[ij] + (1/4)(d2L/dy^i dx^j - d2L/dx^i dy^j).
/// hh vanishes exactly when the horizontal subbundle of N is Lagrangian.
struct SymplecticBlocks {
  Eigen::MatrixXd metric_block;      // g_ij(u)
  Eigen::MatrixXd horizontal_block;  // hh_ij(u), skew
};
SymplecticBlocks symplectic_adapted(const LagrangeSpace& space, const ConnectionValue& conn,
                                    const Point& u);

/// Member N = N^c + O X of the family of connections compatible with the
/// Lagrange metric; N^c is the canonic connection.
ConnectionValue lagrange_family_member(const LagrangeSpace& space, const Tensor11Field& X,
                                       const Point& u);

/// Matrix of the Cartan 2-form in the natural frame
/// (dx^1..dx^n, dy^1..dy^n): Omega_ab = omega(e_a, e_b).
Eigen::MatrixXd cartan_two_form(const LagrangeSpace& space, const Point& u);

}  // namespace mconn
