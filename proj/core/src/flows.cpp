#include "mconn/flows.hpp"

#include <cmath>

#include "mconn/errors.hpp"

namespace mconn {

namespace {

// First-order state (x, y) packed as a 2n vector, x block first.
Eigen::VectorXd pack(const Point& u) {
  const int n = u.dim();
  Eigen::VectorXd s(2 * n);
  for (int i = 0; i < n; ++i) {
    s(i) = u.x[static_cast<std::size_t>(i)];
    s(n + i) = u.y[static_cast<std::size_t>(i)];
  }
  return s;
}

Point unpack(const Eigen::VectorXd& s) {
  const int n = static_cast<int>(s.size()) / 2;
  Point u;
  u.x.resize(static_cast<std::size_t>(n));
  u.y.resize(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    u.x[static_cast<std::size_t>(i)] = s(i);
    u.y[static_cast<std::size_t>(i)] = s(n + i);
  }
  return u;
}

Eigen::VectorXd sode_rhs(const SemisprayField& G, const Eigen::VectorXd& s) {
  const int n = static_cast<int>(s.size()) / 2;
  const Point u = unpack(s);
  const Eigen::VectorXd g = G.value(u);
  Eigen::VectorXd f(2 * n);
  f.head(n) = s.tail(n);
  f.tail(n) = -2.0 * g;
  return f;
}

}  // namespace

SodeResult integrate_sode(const SemisprayField& G, const Point& u0, double h, int steps,
                          const SodeOptions& options) {
  if (h <= 0.0) throw std::invalid_argument("step size must be positive");
  if (steps < 0) throw std::invalid_argument("step count must be non-negative");

  SodeResult out;
  Trajectory& traj = out.trajectory;
  traj.step = h;
  traj.times.reserve(static_cast<std::size_t>(steps) + 1);
  traj.states.reserve(static_cast<std::size_t>(steps) + 1);
  traj.times.push_back(0.0);
  traj.states.push_back(u0);

  Eigen::VectorXd s = pack(u0);
  const int n = u0.dim();

  for (int k = 0; k < steps; ++k) {
    const double t = h * k;
    Eigen::VectorXd next;
    try {
      const Eigen::VectorXd k1 = sode_rhs(G, s);
      const Eigen::VectorXd k2 = sode_rhs(G, s + 0.5 * h * k1);
      const Eigen::VectorXd k3 = sode_rhs(G, s + 0.5 * h * k2);
      const Eigen::VectorXd k4 = sode_rhs(G, s + h * k3);
      next = s + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    } catch (const EvalError& err) {
      out.abort = AbortInfo{AbortKind::DomainError, t, err.what()};
      return out;
    }

    if (next.tail(n).norm() > options.blow_up_norm) {
      out.abort = AbortInfo{AbortKind::BlowUp, t,
                            "fiber norm exceeded " + std::to_string(options.blow_up_norm)};
      return out;
    }
    Point u_next = unpack(next);
    if (options.guard && !options.guard->contains(u_next)) {
      out.abort = AbortInfo{AbortKind::LeftBox, t, "state left the declared domain box"};
      return out;
    }

    s = std::move(next);
    traj.times.push_back(h * (k + 1));
    traj.states.push_back(std::move(u_next));
  }
  return out;
}

TransportedVector parallel_transport(const SemisprayField& G,
                                     const ConnectionCoefficientField& N,
                                     const Trajectory& trajectory, const Eigen::VectorXd& X0) {
  TransportedVector out;
  const std::size_t m = trajectory.states.size();
  out.times = trajectory.times;
  out.samples.reserve(m);
  out.samples.push_back(X0);
  if (m < 2) return out;

  const double h = trajectory.step;
  Eigen::VectorXd X = X0;

  Eigen::VectorXd s_right = pack(trajectory.states[0]);
  Eigen::VectorXd f_right = sode_rhs(G, s_right);
  Eigen::MatrixXd n_right = N(trajectory.states[0]);

  for (std::size_t k = 0; k + 1 < m; ++k) {
    const Eigen::VectorXd s0 = s_right;
    const Eigen::VectorXd f0 = f_right;
    const Eigen::MatrixXd n0 = n_right;

    const Eigen::VectorXd s1 = pack(trajectory.states[k + 1]);
    const Eigen::VectorXd f1 = sode_rhs(G, s1);
    n_right = N(trajectory.states[k + 1]);
    s_right = s1;
    f_right = f1;

    // Cubic Hermite midpoint of the segment.
    const Eigen::VectorXd s_mid = 0.5 * (s0 + s1) + (h / 8.0) * (f0 - f1);
    const Eigen::MatrixXd n_mid = N(unpack(s_mid));

    const Eigen::VectorXd k1 = -(n0 * X);
    const Eigen::VectorXd k2 = -(n_mid * (X + 0.5 * h * k1));
    const Eigen::VectorXd k3 = -(n_mid * (X + 0.5 * h * k2));
    const Eigen::VectorXd k4 = -(n_right * (X + h * k3));
    X = X + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    out.samples.push_back(X);
  }
  return out;
}

ConservationReport conservation_report(const LagrangeSpace& space, const Trajectory& trajectory) {
  ConservationReport out;
  out.samples.reserve(trajectory.states.size());
  double e0 = 0.0;
  for (std::size_t k = 0; k < trajectory.states.size(); ++k) {
    const double e = space.energy(trajectory.states[k]);
    if (k == 0) e0 = e;
    out.samples.push_back({trajectory.times[k], e});
    out.max_drift = std::max(out.max_drift, std::abs(e - e0));
  }
  return out;
}

}  // namespace mconn
