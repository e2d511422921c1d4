#include "mconn/lagrange.hpp"

#include <cassert>
#include <cmath>
#include <stdexcept>
#include <utility>

#include "mconn/errors.hpp"

namespace mconn {

namespace {

using ExprMatrix = std::vector<std::vector<Expr>>;

ExprMatrix minor_matrix(const ExprMatrix& m, int row, int col) {
  const int n = static_cast<int>(m.size());
  ExprMatrix out;
  out.reserve(static_cast<std::size_t>(n - 1));
  for (int i = 0; i < n; ++i) {
    if (i == row) continue;
    std::vector<Expr> r;
    r.reserve(static_cast<std::size_t>(n - 1));
    for (int j = 0; j < n; ++j) {
      if (j == col) continue;
      r.push_back(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
    }
    out.push_back(std::move(r));
  }
  return out;
}

Expr symbolic_det(const ExprMatrix& m) {
  const int n = static_cast<int>(m.size());
  if (n == 1) return m[0][0];
  Expr acc;
  for (int j = 0; j < n; ++j) {
    Expr term = m[0][static_cast<std::size_t>(j)] * symbolic_det(minor_matrix(m, 0, j));
    if (j % 2 == 1) term = -term;
    acc = acc.empty() ? term : acc + term;
  }
  return acc;
}

/// Exact inverse entries via the adjugate: inv_ij = cofactor_ji / det.
ExprMatrix symbolic_inverse(const ExprMatrix& m, const Expr& det) {
  const int n = static_cast<int>(m.size());
  ExprMatrix inv(static_cast<std::size_t>(n), std::vector<Expr>(static_cast<std::size_t>(n)));
  if (n == 1) {
    inv[0][0] = Expr::constant(m[0][0].dim(), 1.0) / m[0][0];
    return inv;
  }
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      Expr cof = symbolic_det(minor_matrix(m, j, i));
      if ((i + j) % 2 == 1) cof = -cof;
      inv[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = cof / det;
    }
  return inv;
}

}  // namespace

// ---- LagrangeSpace ----------------------------------------------------------

namespace {

std::vector<Expr> metric_entries_from(const Expr& L, int n) {
  std::vector<Expr> upper;
  upper.reserve(static_cast<std::size_t>(n) * (n + 1) / 2);
  std::vector<Expr> dy;
  dy.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) dy.push_back(L.derivative(n + i));
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) upper.push_back(0.5 * dy[static_cast<std::size_t>(i)].derivative(n + j));
  return upper;
}

std::vector<Expr> canonic_spray_entries(const Expr& L, const GLMetricField& g, int n) {
  ExprMatrix gm(static_cast<std::size_t>(n), std::vector<Expr>(static_cast<std::size_t>(n)));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) gm[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = g.entry(i, j);
  const Expr det = symbolic_det(gm);
  const ExprMatrix ginv = symbolic_inverse(gm, det);

  std::vector<Expr> dx, dy;
  for (int k = 0; k < n; ++k) dx.push_back(L.derivative(k));
  for (int k = 0; k < n; ++k) dy.push_back(L.derivative(n + k));

  std::vector<Expr> spray;
  spray.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    Expr acc;
    for (int k = 0; k < n; ++k) {
      Expr inner;  // d2L/dy^k dx^h y^h - dL/dx^k
      for (int h = 0; h < n; ++h) {
        Expr term = dy[static_cast<std::size_t>(k)].derivative(h) * Expr::fiber(n, h + 1);
        inner = inner.empty() ? term : inner + term;
      }
      inner = inner - dx[static_cast<std::size_t>(k)];
      Expr term = ginv[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)] * inner;
      acc = acc.empty() ? term : acc + term;
    }
    spray.push_back(0.25 * acc);
  }
  return spray;
}

Expr energy_from(const Expr& L, int n) {
  Expr acc;
  for (int i = 0; i < n; ++i) {
    Expr term = Expr::fiber(n, i + 1) * L.derivative(n + i);
    acc = acc.empty() ? term : acc + term;
  }
  return acc - L;
}

Expr validated_lagrangian(Expr L, int n) {
  if (L.empty() || L.dim() != n)
    throw std::invalid_argument("Lagrangian dimension does not match the declared n");
  return L;
}

}  // namespace

LagrangeSpace::LagrangeSpace(int n, Expr lagrangian)
    : n_(n),
      lagrangian_(validated_lagrangian(std::move(lagrangian), n)),
      table_(lagrangian_, 3),
      metric_(n, metric_entries_from(lagrangian_, n)),
      spray_(n, canonic_spray_entries(lagrangian_, metric_, n)),
      energy_(energy_from(lagrangian_, n)) {}

Eigen::MatrixXd LagrangeSpace::metric_from_jet(const Jet& j) const {
  Eigen::MatrixXd g(n_, n_);
  for (int a = 0; a < n_; ++a)
    for (int b = 0; b < n_; ++b) g(a, b) = 0.5 * j.hess(n_ + a, n_ + b);
  return g;
}

Eigen::MatrixXd LagrangeSpace::metric(const Point& u) const {
  const Eigen::MatrixXd g = metric_.value(u);
  const double det = Eigen::PartialPivLU<Eigen::MatrixXd>(g).determinant();
  if (!std::isfinite(det) || std::abs(det) <= kSingularityTolerance)
    throw DegenerateLagrangianError(det);
  return g;
}

InverseResult LagrangeSpace::metric_inverse(const Point& u) const {
  try {
    return checked_inverse(metric_.value(u));
  } catch (const SingularMetricError& err) {
    throw DegenerateLagrangianError(err.determinant());
  }
}

Eigen::VectorXd LagrangeSpace::spray_from_jet(const Jet& j, const Eigen::MatrixXd& g_inverse,
                                              const Point& u) const {
  Eigen::VectorXd rhs(n_);
  for (int k = 0; k < n_; ++k) {
    double s = 0.0;
    for (int h = 0; h < n_; ++h)
      s += j.hess(n_ + k, h) * u.y[static_cast<std::size_t>(h)];
    rhs(k) = s - j.grad(k);
  }
  return 0.25 * (g_inverse * rhs);
}

Eigen::VectorXd LagrangeSpace::canonic_spray(const Point& u) const {
  const Jet j = table_.eval(u);
  const Eigen::MatrixXd g = metric_from_jet(j);
  Eigen::MatrixXd ginv;
  try {
    ginv = checked_inverse(g).inverse;
  } catch (const SingularMetricError& err) {
    throw DegenerateLagrangianError(err.determinant());
  }
  return spray_from_jet(j, ginv, u);
}

ConnectionValue LagrangeSpace::canonic_connection(const Point& u) const {
  return ConnectionValue::make(u, spray_.fiber_jacobian(u), metric(u));
}

ConnectionValue LagrangeSpace::unique_connection(const Point& u) const {
  const Jet j = table_.eval(u);
  const Eigen::MatrixXd g = metric_from_jet(j);
  Eigen::MatrixXd ginv;
  try {
    ginv = checked_inverse(g).inverse;
  } catch (const SingularMetricError& err) {
    throw DegenerateLagrangianError(err.determinant());
  }
  const Eigen::VectorXd spray = spray_from_jet(j, ginv, u);

  // S(g_kj) from third derivatives: g_kj = (1/2) L_{y^k y^j}.
  Eigen::MatrixXd sg(n_, n_);
  for (int k = 0; k < n_; ++k)
    for (int jj = 0; jj < n_; ++jj) {
      double s = 0.0;
      for (int c = 0; c < n_; ++c) {
        s += u.y[static_cast<std::size_t>(c)] * 0.5 * j.third_at(n_ + k, n_ + jj, c);
        s -= 2.0 * spray(c) * 0.5 * j.third_at(n_ + k, n_ + jj, n_ + c);
      }
      sg(k, jj) = s;
    }

  Eigen::MatrixXd bracket(n_, n_);
  for (int k = 0; k < n_; ++k)
    for (int jj = 0; jj < n_; ++jj)
      bracket(k, jj) = j.hess(n_ + k, jj) - j.hess(k, n_ + jj);

  Eigen::MatrixXd n_coeffs = 0.5 * ginv * (sg + 0.5 * bracket);
  return ConnectionValue::make(u, std::move(n_coeffs), g);
}

double LagrangeSpace::energy(const Point& u) const { return energy_.evaluate(u); }

Eigen::MatrixXd LagrangeSpace::metric_spray_derivative(const Point& u) const {
  return metric_.semispray_derivative(canonic_spray(u), u);
}

Eigen::MatrixXd LagrangeSpace::mixed_skew(const Point& u) const {
  const Jet j = table_.eval(u);
  Eigen::MatrixXd out(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int jj = 0; jj < n_; ++jj)
      out(i, jj) = 0.25 * (j.hess(n_ + i, jj) - j.hess(i, n_ + jj));
  return out;
}

// ---- derived structures -------------------------------------------------------

SymplecticBlocks symplectic_adapted(const LagrangeSpace& space, const ConnectionValue& conn,
                                    const Point& u) {
  SymplecticBlocks out;
  out.metric_block = space.metric(u);
  out.horizontal_block = -conn.skew + space.mixed_skew(u);
  return out;
}

ConnectionValue lagrange_family_member(const LagrangeSpace& space, const Tensor11Field& X,
                                       const Point& u) {
  const Eigen::MatrixXd g = space.metric(u);
  Eigen::MatrixXd ginv;
  try {
    ginv = checked_inverse(g).inverse;
  } catch (const SingularMetricError& err) {
    throw DegenerateLagrangianError(err.determinant());
  }
  const ObataPair obata = obata_operators(g, ginv);
  const ConnectionValue canonic = space.canonic_connection(u);
  Eigen::MatrixXd n_coeffs = canonic.coefficients + obata_apply(obata.projector, X.value(u));
  return ConnectionValue::make(u, std::move(n_coeffs), g);
}

Eigen::MatrixXd cartan_two_form(const LagrangeSpace& space, const Point& u) {
  const int n = space.dim();
  const Jet j = space.lagrangian_jet(u);
  Eigen::MatrixXd g(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) g(a, b) = 0.5 * j.hess(n + a, n + b);

  Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  // omega(d/dx^p, d/dx^q) = (1/2)(L_{x^p y^q} - L_{x^q y^p})
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q) omega(p, q) = 0.5 * (j.hess(p, n + q) - j.hess(q, n + p));
  // omega(d/dx^p, d/dy^q) = -g_pq, omega(d/dy^p, d/dx^q) = g_pq
  omega.block(0, n, n, n) = -g;
  omega.block(n, 0, n, n) = g;
  return omega;
}

}  // namespace mconn
