#include "mconn/geometry.hpp"

#include <cassert>
#include <stdexcept>

#include "mconn/errors.hpp"

namespace mconn {

// ---- GLMetricField ----------------------------------------------------------

GLMetricField::GLMetricField(int n, std::vector<Expr> upper) : n_(n), upper_(std::move(upper)) {
  const auto expected = static_cast<std::size_t>(n) * (n + 1) / 2;
  if (n < 1 || upper_.size() != expected)
    throw std::invalid_argument("metric needs the " + std::to_string(expected) +
                                " upper-triangle entries, got " + std::to_string(upper_.size()));
  tables_.reserve(upper_.size());
  for (const Expr& e : upper_) tables_.emplace_back(e, 1);
}

GLMetricField GLMetricField::identity(int n) {
  std::vector<Expr> upper;
  for (int i = 0; i < n; ++i)
    for (int j = i; j < n; ++j) upper.push_back(Expr::constant(n, i == j ? 1.0 : 0.0));
  return GLMetricField(n, std::move(upper));
}

int GLMetricField::upper_index(int i, int j) const {
  assert(i <= j && i >= 0 && j < n_);
  // Row-major upper triangle: row i starts after i*n - i(i-1)/2 entries.
  return i * n_ - i * (i - 1) / 2 + (j - i);
}

const Expr& GLMetricField::entry(int i, int j) const {
  if (i > j) std::swap(i, j);
  return upper_[static_cast<std::size_t>(upper_index(i, j))];
}

Eigen::MatrixXd GLMetricField::value(const Point& u) const {
  Eigen::MatrixXd g(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) {
      const double v = upper_[static_cast<std::size_t>(upper_index(i, j))].evaluate(u);
      g(i, j) = v;
      g(j, i) = v;
    }
  return g;
}

InverseResult GLMetricField::inverse(const Point& u) const { return checked_inverse(value(u)); }

Eigen::MatrixXd GLMetricField::semispray_derivative(const Eigen::VectorXd& spray_values,
                                                    const Point& u) const {
  assert(spray_values.size() == n_);
  Eigen::MatrixXd out(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = i; j < n_; ++j) {
      const JetTable& t = tables_[static_cast<std::size_t>(upper_index(i, j))];
      double s = 0.0;
      for (int c = 0; c < n_; ++c) {
        s += u.y[static_cast<std::size_t>(c)] * t.first(c).evaluate(u);
        s -= 2.0 * spray_values(c) * t.first(n_ + c).evaluate(u);
      }
      out(i, j) = s;
      out(j, i) = s;
    }
  return out;
}

// ---- SemisprayField ---------------------------------------------------------

SemisprayField::SemisprayField(int n, std::vector<Expr> coefficients)
    : n_(n), coefficients_(std::move(coefficients)) {
  if (n < 1 || coefficients_.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("semispray needs n coefficient expressions");
  fiber_derivatives_.reserve(static_cast<std::size_t>(n) * n);
  for (const Expr& g : coefficients_)
    for (int j = 0; j < n; ++j) fiber_derivatives_.push_back(g.derivative(n + j));
}

SemisprayField SemisprayField::zero(int n) {
  std::vector<Expr> coeffs(static_cast<std::size_t>(n), Expr::constant(n, 0.0));
  return SemisprayField(n, std::move(coeffs));
}

Eigen::VectorXd SemisprayField::value(const Point& u) const {
  Eigen::VectorXd out(n_);
  for (int i = 0; i < n_; ++i) out(i) = coefficients_[static_cast<std::size_t>(i)].evaluate(u);
  return out;
}

Eigen::MatrixXd SemisprayField::fiber_jacobian(const Point& u) const {
  Eigen::MatrixXd out(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      out(i, j) = fiber_derivatives_[static_cast<std::size_t>(i * n_ + j)].evaluate(u);
  return out;
}

// ---- ConnectionValue --------------------------------------------------------

ConnectionValue ConnectionValue::make(Point u, Eigen::MatrixXd n_coeffs,
                                      const Eigen::MatrixXd& metric_at_u) {
  ConnectionValue out;
  out.point = std::move(u);
  out.lowered = metric_at_u * n_coeffs;
  out.coefficients = std::move(n_coeffs);
  out.sym = 0.5 * (out.lowered + out.lowered.transpose());
  out.skew = 0.5 * (out.lowered - out.lowered.transpose());
  return out;
}

// ---- Obata operators --------------------------------------------------------

Eigen::MatrixXd obata_apply(const Tensor4& op, const Eigen::MatrixXd& X) {
  const int n = op.dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        for (int m = 0; m < n; ++m) s += op(k, i, j, m) * X(m, k);
      out(i, j) = s;
    }
  return out;
}

Tensor4 obata_compose(const Tensor4& a, const Tensor4& b) {
  const int n = a.dim();
  Tensor4 out(n);
  for (int q = 0; q < n; ++q)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        for (int p = 0; p < n; ++p) {
          double s = 0.0;
          for (int m = 0; m < n; ++m)
            for (int k = 0; k < n; ++k) s += a(k, i, j, m) * b(q, m, k, p);
          out(q, i, j, p) = s;
        }
  return out;
}

Tensor4 obata_identity(int n) {
  Tensor4 out(n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) out(i, j, i, j) = 1.0;
  return out;
}

ObataPair obata_operators(const Eigen::MatrixXd& g, const Eigen::MatrixXd& g_inverse) {
  const int n = static_cast<int>(g.rows());
  ObataPair out{Tensor4(n), Tensor4(n)};
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          const double id = (i == k && j == l) ? 1.0 : 0.0;
          const double gg = g_inverse(i, j) * g(k, l);
          out.projector(i, j, k, l) = 0.5 * (id - gg);
          out.complement(i, j, k, l) = 0.5 * (id + gg);
        }
  return out;
}

ObataPair obata_operators(const GLMetricField& g, const Point& u) {
  const Eigen::MatrixXd gv = g.value(u);
  return obata_operators(gv, checked_inverse(gv).inverse);
}

// ---- Tensor11Field ----------------------------------------------------------

Tensor11Field::Tensor11Field(int n, std::vector<Expr> entries)
    : n_(n), entries_(std::move(entries)) {
  if (n < 1 || entries_.size() != static_cast<std::size_t>(n) * n)
    throw std::invalid_argument("tensor field needs n*n entries");
}

Tensor11Field Tensor11Field::constant(int n, const Eigen::MatrixXd& value) {
  std::vector<Expr> entries;
  entries.reserve(static_cast<std::size_t>(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) entries.push_back(Expr::constant(n, value(i, j)));
  return Tensor11Field(n, std::move(entries));
}

Eigen::MatrixXd Tensor11Field::value(const Point& u) const {
  Eigen::MatrixXd out(n_, n_);
  for (int i = 0; i < n_; ++i)
    for (int j = 0; j < n_; ++j)
      out(i, j) = entries_[static_cast<std::size_t>(i * n_ + j)].evaluate(u);
  return out;
}

// ---- operations -------------------------------------------------------------

double apply_semispray(const SemisprayField& G, const Expr& f, const Point& u) {
  const int n = G.dim();
  assert(f.dim() == n);
  double s = 0.0;
  for (int c = 0; c < n; ++c) {
    s += u.y[static_cast<std::size_t>(c)] * f.derivative(c).evaluate(u);
    s -= 2.0 * G.coefficient(c).evaluate(u) * f.derivative(n + c).evaluate(u);
  }
  return s;
}

Eigen::MatrixXd connection_from_semispray(const SemisprayField& G, const Point& u) {
  return G.fiber_jacobian(u);
}

ConnectionValue connection_from_semispray(const SemisprayField& G, const GLMetricField& g,
                                          const Point& u) {
  return ConnectionValue::make(u, G.fiber_jacobian(u), g.value(u));
}

Eigen::VectorXd nabla_vertical(const SemisprayField& G, const Eigen::MatrixXd& N,
                               std::span<const Expr> X, const Point& u) {
  const int n = G.dim();
  assert(static_cast<int>(X.size()) == n);
  Eigen::VectorXd xv(n);
  for (int j = 0; j < n; ++j) xv(j) = X[static_cast<std::size_t>(j)].evaluate(u);
  Eigen::VectorXd out = N * xv;
  for (int i = 0; i < n; ++i) out(i) += apply_semispray(G, X[static_cast<std::size_t>(i)], u);
  return out;
}

Eigen::MatrixXd nabla_metric(const SemisprayField& G, const Eigen::MatrixXd& N,
                             const GLMetricField& g, const Point& u) {
  const Eigen::MatrixXd gv = g.value(u);
  const Eigen::MatrixXd sg = g.semispray_derivative(G.value(u), u);
  const Eigen::MatrixXd gn = gv * N;
  return sg - gn - gn.transpose();
}

namespace {

/// O^{ik}_{sj} dG^s/dy^k, the Obata term of the direct formulation.
Eigen::MatrixXd contract_obata_connection(const Tensor4& op, const Eigen::MatrixXd& A) {
  const int n = op.dim();
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k)
        for (int t = 0; t < n; ++t) s += op(i, k, t, j) * A(t, k);
      out(i, j) = s;
    }
  return out;
}

}  // namespace

MetricConnectionForms metric_connection_forms(const SemisprayField& G, const GLMetricField& g,
                                              const Point& u) {
  const Eigen::MatrixXd gv = g.value(u);
  const Eigen::MatrixXd ginv = checked_inverse(gv).inverse;
  const Eigen::MatrixXd A = G.fiber_jacobian(u);
  const Eigen::MatrixXd sg = g.semispray_derivative(G.value(u), u);

  MetricConnectionForms out;

  const ObataPair obata = obata_operators(gv, ginv);
  out.direct = 0.5 * ginv * sg + contract_obata_connection(obata.projector, A);

  const Eigen::MatrixXd ga = gv * A;
  const Eigen::MatrixXd lowered_residual = sg - ga - ga.transpose();
  out.covariant = 0.5 * ginv * lowered_residual + A;

  out.lackey = 0.5 * ginv * sg + 0.5 * (A - ginv * A.transpose() * gv);

  return out;
}

ConnectionValue metric_connection(const SemisprayField& G, const GLMetricField& g,
                                  const Point& u) {
  const Eigen::MatrixXd gv = g.value(u);
  const Eigen::MatrixXd ginv = checked_inverse(gv).inverse;
  const Eigen::MatrixXd A = G.fiber_jacobian(u);
  const Eigen::MatrixXd sg = g.semispray_derivative(G.value(u), u);
  const ObataPair obata = obata_operators(gv, ginv);
  Eigen::MatrixXd n_coeffs = 0.5 * ginv * sg + contract_obata_connection(obata.projector, A);
  return ConnectionValue::make(u, std::move(n_coeffs), gv);
}

ConnectionValue family_member(const ConnectionValue& metric_conn, const Eigen::MatrixXd& X,
                              const GLMetricField& g, const Point& u) {
  const Eigen::MatrixXd gv = g.value(u);
  const ObataPair obata = obata_operators(gv, checked_inverse(gv).inverse);
  Eigen::MatrixXd n_coeffs = metric_conn.coefficients + obata_apply(obata.projector, X);
  return ConnectionValue::make(u, std::move(n_coeffs), gv);
}

Eigen::MatrixXd helmholtz_residual(const SemisprayField& G, const GLMetricField& g,
                                   const Point& u) {
  const Eigen::MatrixXd gv = g.value(u);
  const Eigen::MatrixXd ga = gv * G.fiber_jacobian(u);
  return g.semispray_derivative(G.value(u), u) - ga - ga.transpose();
}

Eigen::VectorXd horizontal_semispray(const Eigen::MatrixXd& N, const Point& u) {
  const Eigen::VectorXd y =
      Eigen::Map<const Eigen::VectorXd>(u.y.data(), static_cast<Eigen::Index>(u.y.size()));
  return 0.5 * N * y;
}

}  // namespace mconn
