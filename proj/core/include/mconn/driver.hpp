#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "mconn/flows.hpp"
#include "mconn/problem.hpp"

namespace mconn {

struct CheckRecord {
  std::string check;
  int point_index = 0;
  Point point;
  double residual = 0.0;
  bool pass = false;
  bool skipped = false;       // singular point; does not affect the verdict
  bool informational = false; // reported but excluded from the exit code
  std::string note;
};

struct CheckSummary {
  std::string check;
  double tolerance = 0.0;
  double worst_residual = 0.0;
  int passed = 0;
  int failed = 0;
  int skipped = 0;
  bool informational = false;
};

struct Report {
  std::vector<CheckRecord> records;     // sorted by (check, point_index)
  std::vector<CheckSummary> summaries;  // one per check, in run order

  /// 0 when every counted record passes, 1 otherwise.
  int exit_code() const;
};

struct RunOptions {
  std::optional<std::uint64_t> seed;
  std::optional<int> samples;
  std::optional<double> tol_algebraic;
  std::optional<double> tol_derived;
  bool expect_helmholtz_fail = false;
  int threads = 0;  // 0 = pick from hardware
};

/// Run the verification battery for the definition. Generalized mode checks
/// metricity of the metric connection, the deformation family, the
/// Helmholtz residual of dG/dy and the three-formulation equivalence;
/// lagrangian mode adds the uniqueness, decomposition, symplectic-block,
/// almost-Hermitian and energy-conservation checks.
Report run_check(const ProblemInstance& problem, const RunOptions& options = {});

/// Connection coefficients per point: the metric connection in generalized
/// mode, the canonic connection in lagrangian mode.
struct ConnectionRow {
  int point_index = 0;
  Point point;
  Eigen::MatrixXd coefficients;
  bool skipped = false;
  std::string note;
};
struct ConnectionTable {
  std::vector<ConnectionRow> rows;
};
ConnectionTable run_connection(const ProblemInstance& problem,
                               const std::vector<Point>& points);

/// Family member N^c + O X evaluated per point with its metricity residual.
struct FamilyRow {
  int point_index = 0;
  Point point;
  Eigen::MatrixXd coefficients;
  double metric_residual = 0.0;
  bool pass = false;
  bool skipped = false;
  std::string note;
};
struct FamilyTable {
  std::vector<FamilyRow> rows;
  double tolerance = 0.0;
};
FamilyTable run_family(const ProblemInstance& problem, const Tensor11Field& tensor,
                       const std::vector<Point>& points, const RunOptions& options = {});

/// Hermitian-identity residuals per point under the unique connection
/// (lagrangian mode only).
struct HermitianRow {
  int point_index = 0;
  Point point;
  double complex_residual = 0.0;    // max |F^2 + Id|
  double compatibility_residual = 0.0;  // max |Omega - F^T G|
  bool pass = false;
  bool skipped = false;
  std::string note;
};
struct HermitianTable {
  std::vector<HermitianRow> rows;
  double tol_algebraic = 0.0;
  double tol_derived = 0.0;
};
HermitianTable run_hermitian(const ProblemInstance& problem, const std::vector<Point>& points,
                             const RunOptions& options = {});

/// Orbit integration with optional parallel transport of X0 along it.
struct IntegrateOutcome {
  SodeResult sode;
  std::vector<double> energies;             // lagrangian mode only
  double energy_drift = 0.0;
  std::optional<TransportedVector> transport;
  std::vector<double> transported_norms;    // g(X, X) along the orbit
  double transport_drift = 0.0;
};
IntegrateOutcome run_integrate(const ProblemInstance& problem, const Point& start, double h,
                               int steps, const std::optional<Eigen::VectorXd>& transport_x0);

// ---- rendering ------------------------------------------------------------
// All renderers are deterministic functions of their inputs; byte-identical
// reports for byte-identical (definition, seed, flags).

std::string render_report_table(const Report& report);
std::string render_report_json(const Report& report);
std::string render_connection_table(const ConnectionTable& table);
std::string render_connection_json(const ConnectionTable& table);
std::string render_family_table(const FamilyTable& table);
std::string render_family_json(const FamilyTable& table);
std::string render_hermitian_table(const HermitianTable& table);
std::string render_hermitian_json(const HermitianTable& table);
std::string render_integrate_table(const IntegrateOutcome& outcome);
std::string render_integrate_json(const IntegrateOutcome& outcome);

}  // namespace mconn
