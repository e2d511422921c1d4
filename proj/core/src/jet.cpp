#include "mconn/jet.hpp"

#include <stdexcept>

#include "mconn/errors.hpp"

namespace mconn {

JetTable::JetTable(Expr e, int order) : source_(std::move(e)), order_(order) {
  if (order_ < 0 || order_ > 3)
    throw std::invalid_argument("jet order must lie in 0..3, got " + std::to_string(order_));
  const int m = 2 * source_.dim();
  if (order_ >= 1) {
    first_.reserve(static_cast<std::size_t>(m));
    for (int c = 0; c < m; ++c) first_.push_back(source_.derivative(c));
  }
  if (order_ >= 2) {
    second_.reserve(static_cast<std::size_t>(m * m));
    for (int c = 0; c < m; ++c)
      for (int d = 0; d < m; ++d)
        second_.push_back(first_[static_cast<std::size_t>(c)].derivative(d));
  }
  if (order_ >= 3) {
    third_.reserve(static_cast<std::size_t>(m * m * m));
    for (int c = 0; c < m; ++c)
      for (int d = 0; d < m; ++d)
        for (int f = 0; f < m; ++f)
          third_.push_back(second_[static_cast<std::size_t>(c * m + d)].derivative(f));
  }
}

namespace {

[[noreturn]] void rethrow_with_slot(const EvalError& err, const std::string& slot) {
  throw EvalError("while evaluating partial " + slot + ": " + err.what(), err.subexpression());
}

std::string slot_name(int dim, int a, int b = -1, int c = -1) {
  std::string s = "d/d" + coordinate_name(dim, a);
  if (b >= 0) s += " d/d" + coordinate_name(dim, b);
  if (c >= 0) s += " d/d" + coordinate_name(dim, c);
  return s;
}

}  // namespace

Jet JetTable::eval(const Point& u) const {
  const int n = source_.dim();
  const int m = 2 * n;
  Jet out;
  out.dim = n;
  out.order = order_;
  out.value = source_.evaluate(u);
  out.grad = Eigen::VectorXd::Zero(m);
  out.hess = Eigen::MatrixXd::Zero(m, m);
  out.third.assign(static_cast<std::size_t>(m) * m * m, 0.0);

  if (order_ >= 1) {
    for (int c = 0; c < m; ++c) {
      try {
        out.grad(c) = first_[static_cast<std::size_t>(c)].evaluate(u);
      } catch (const EvalError& err) {
        rethrow_with_slot(err, slot_name(n, c));
      }
    }
  }
  if (order_ >= 2) {
    for (int c = 0; c < m; ++c)
      for (int d = 0; d < m; ++d) {
        try {
          out.hess(c, d) = second_[static_cast<std::size_t>(c * m + d)].evaluate(u);
        } catch (const EvalError& err) {
          rethrow_with_slot(err, slot_name(n, c, d));
        }
      }
  }
  if (order_ >= 3) {
    for (int c = 0; c < m; ++c)
      for (int d = 0; d < m; ++d)
        for (int f = 0; f < m; ++f) {
          const auto idx = static_cast<std::size_t>((c * m + d) * m + f);
          try {
            out.third[idx] = third_[idx].evaluate(u);
          } catch (const EvalError& err) {
            rethrow_with_slot(err, slot_name(n, c, d, f));
          }
        }
  }
  return out;
}

Jet jet(const Expr& e, const Point& u, int order) { return JetTable(e, order).eval(u); }

}  // namespace mconn
