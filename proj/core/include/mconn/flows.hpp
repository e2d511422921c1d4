#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mconn/geometry.hpp"
#include "mconn/lagrange.hpp"
#include "mconn/sampling.hpp"

namespace mconn {

/// Fixed-step orbit of the second-order system dx/dt = y, dy/dt = -2 G(x, y).
struct Trajectory {
  std::vector<double> times;   // strictly increasing, constant spacing
  std::vector<Point> states;
  double step = 0.0;
  std::string method = "rk4";
};

enum class AbortKind { DomainError, BlowUp, LeftBox };

struct AbortInfo {
  AbortKind kind;
  double last_valid_time;
  std::string message;
};

struct SodeOptions {
  double blow_up_norm = 1e6;   // abort when ||y||_2 exceeds this
  std::optional<Box> guard;    // abort when the state leaves this box
};

struct SodeResult {
  Trajectory trajectory;       // valid prefix, always contains the start state
  std::optional<AbortInfo> abort;
};

/// Classical explicit fourth-order Runge-Kutta on the first-order form of
/// the SODE. On a mid-orbit evaluation error or guard trip the valid prefix
/// is returned together with the abort record.
SodeResult integrate_sode(const SemisprayField& G, const Point& u0, double h, int steps,
                          const SodeOptions& options = {});

/// Connection coefficients as a pointwise field; any closure over the
/// problem data works (an induced dG/dy field, a metric connection
/// evaluator, ...).
using ConnectionCoefficientField = std::function<Eigen::MatrixXd(const Point&)>;

struct TransportedVector {
  std::vector<double> times;
  std::vector<Eigen::VectorXd> samples;
};

/// Solve the parallel-transport system dX^i/dt = -N^i_j(x(t), y(t)) X^j on
/// the trajectory grid. States between stored samples come from cubic
/// Hermite interpolation of the segment (the stored endpoints and their
/// SODE derivatives), so the base flow is never re-integrated.
TransportedVector parallel_transport(const SemisprayField& G,
                                     const ConnectionCoefficientField& N,
                                     const Trajectory& trajectory, const Eigen::VectorXd& X0);

struct EnergySample {
  double t;
  double energy;
};

struct ConservationReport {
  std::vector<EnergySample> samples;
  double max_drift = 0.0;  // max |E(t) - E(0)|
};

/// Per-sample energy along a trajectory of the canonic semispray.
ConservationReport conservation_report(const LagrangeSpace& space, const Trajectory& trajectory);

}  // namespace mconn
