#include "mconn/driver.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "mconn/errors.hpp"
#include "mconn/hermitian.hpp"

namespace mconn {

namespace {

using nlohmann::json;

// Stream seed for auxiliary draws (family tensors), derived from the
// definition seed so it never collides with the point stream.
constexpr std::uint64_t kAuxStreamSalt = 0x9E3779B97F4A7C15ULL;

int resolve_threads(int requested, int work_items) {
  if (work_items < 16) return 1;
  if (requested > 0) return requested;
  const unsigned hw = std::thread::hardware_concurrency();
  return static_cast<int>(std::min<unsigned>(hw == 0 ? 1 : hw, 8));
}

void parallel_for(int count, int threads, const std::function<void(int)>& fn) {
  if (threads <= 1) {
    for (int i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  std::exception_ptr first_error;
  std::mutex error_mutex;
  std::atomic<int> cursor{0};
  for (int t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const int i = cursor.fetch_add(1);
        if (i >= count) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(error_mutex);
          if (!first_error) first_error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);
}

std::string fmt_sci(double v) {
  if (v == 0.0) v = 0.0;  // drop the sign of -0 in tables
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

std::string fmt_g(double v) {
  if (v == 0.0) v = 0.0;
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

std::string point_text(const Point& u) {
  std::string s = "x=(";
  for (std::size_t i = 0; i < u.x.size(); ++i) {
    if (i) s += ", ";
    s += fmt_g(u.x[i]);
  }
  s += ") y=(";
  for (std::size_t i = 0; i < u.y.size(); ++i) {
    if (i) s += ", ";
    s += fmt_g(u.y[i]);
  }
  s += ")";
  return s;
}

/// Runs `body`; a pointwise domain failure (singular metric, degenerate
/// Lagrangian, evaluation error) lands in (skipped, note) instead of
/// propagating.
template <typename Body>
void guard_point(bool& skipped, std::string& note, Body&& body) {
  try {
    body();
  } catch (const SingularMetricError& err) {
    skipped = true;
    note = err.what();
  } catch (const DegenerateLagrangianError& err) {
    skipped = true;
    note = err.what();
  } catch (const EvalError& err) {
    skipped = true;
    note = err.what();
  }
}

/// One named residual check swept over the sample points. `eval` returns
/// the residual max-norm at a point; singular points are recorded as
/// skipped.
struct CheckSpec {
  std::string name;
  double tolerance;
  bool informational = false;
  std::function<double(const Point&, int)> eval;
};

void run_sweep(const CheckSpec& spec, const std::vector<Point>& points, int threads,
               Report& report) {
  std::vector<CheckRecord> records(points.size());
  parallel_for(static_cast<int>(points.size()), threads, [&](int k) {
    CheckRecord& rec = records[static_cast<std::size_t>(k)];
    rec.check = spec.name;
    rec.point_index = k;
    rec.point = points[static_cast<std::size_t>(k)];
    rec.informational = spec.informational;
    try {
      rec.residual = spec.eval(rec.point, k);
      rec.pass = rec.residual < spec.tolerance;
    } catch (const SingularMetricError& err) {
      rec.skipped = true;
      rec.note = err.what();
    } catch (const DegenerateLagrangianError& err) {
      rec.skipped = true;
      rec.note = err.what();
    } catch (const EvalError& err) {
      rec.skipped = true;
      rec.note = err.what();
    }
  });

  CheckSummary summary;
  summary.check = spec.name;
  summary.tolerance = spec.tolerance;
  summary.informational = spec.informational;
  for (const CheckRecord& rec : records) {
    if (rec.skipped) {
      ++summary.skipped;
      continue;
    }
    summary.worst_residual = std::max(summary.worst_residual, rec.residual);
    if (rec.pass)
      ++summary.passed;
    else
      ++summary.failed;
  }
  report.summaries.push_back(std::move(summary));
  report.records.insert(report.records.end(), std::make_move_iterator(records.begin()),
                        std::make_move_iterator(records.end()));
}

}  // namespace

int Report::exit_code() const {
  for (const CheckRecord& rec : records)
    if (!rec.skipped && !rec.informational && !rec.pass) return 1;
  return 0;
}

Report run_check(const ProblemInstance& problem, const RunOptions& options) {
  const ProblemDefinition& def = problem.definition();
  Tolerances tol = def.tol;
  if (options.tol_algebraic) tol.algebraic = *options.tol_algebraic;
  if (options.tol_derived) tol.derived = *options.tol_derived;

  const std::vector<Point> points =
      problem.sample(options.samples.value_or(-1), options.seed);
  const int threads = resolve_threads(options.threads, static_cast<int>(points.size()));

  const GLMetricField& g = problem.metric();
  const SemisprayField& G = problem.spray();

  // Deformation tensors for the family check, drawn from the auxiliary
  // stream (three constant matrices, entries in [-1, 1]).
  const std::uint64_t seed = options.seed.value_or(def.seed);
  SampleRng aux(seed + kAuxStreamSalt);
  std::vector<Eigen::MatrixXd> tensors;
  for (int t = 0; t < 3; ++t) tensors.push_back(sample_matrix(def.dim, 1.0, aux));

  Report report;

  run_sweep({"metricity", tol.derived, false,
             [&](const Point& u, int) {
               const ConnectionValue nc = metric_connection(G, g, u);
               return max_abs(nabla_metric(G, nc.coefficients, g, u));
             }},
            points, threads, report);

  run_sweep({"family", tol.derived, false,
             [&](const Point& u, int) {
               const ConnectionValue nc = metric_connection(G, g, u);
               const Eigen::MatrixXd gv = g.value(u);
               const ObataPair obata = obata_operators(gv, checked_inverse(gv).inverse);
               double worst = 0.0;
               for (const Eigen::MatrixXd& X : tensors) {
                 const ConnectionValue member = family_member(nc, X, g, u);
                 worst = std::max(worst,
                                  max_abs(nabla_metric(G, member.coefficients, g, u)));
                 const Eigen::MatrixXd diff = member.coefficients - nc.coefficients;
                 worst = std::max(worst, max_abs(obata_apply(obata.complement, diff)));
               }
               return worst;
             }},
            points, threads, report);

  run_sweep({"helmholtz", tol.derived, options.expect_helmholtz_fail,
             [&](const Point& u, int) { return max_abs(helmholtz_residual(G, g, u)); }},
            points, threads, report);

  run_sweep({"equivalence", tol.algebraic, false,
             [&](const Point& u, int) {
               const MetricConnectionForms forms = metric_connection_forms(G, g, u);
               double worst = max_abs(forms.direct - forms.covariant);
               worst = std::max(worst, max_abs(forms.direct - forms.lackey));
               worst = std::max(worst, max_abs(forms.covariant - forms.lackey));
               return worst;
             }},
            points, threads, report);

  if (problem.mode() == ProblemMode::Lagrangian) {
    const LagrangeSpace& lag = problem.lagrange();

    run_sweep({"uniqueness", tol.derived, false,
               [&](const Point& u, int) {
                 const ConnectionValue uniq = lag.unique_connection(u);
                 const ConnectionValue canon = lag.canonic_connection(u);
                 return max_abs(uniq.coefficients - canon.coefficients);
               }},
              points, threads, report);

    run_sweep({"decomposition", tol.derived, false,
               [&](const Point& u, int) {
                 const ConnectionValue uniq = lag.unique_connection(u);
                 const Eigen::MatrixXd sg = lag.metric_spray_derivative(u);
                 const double r24 = max_abs(2.0 * uniq.sym - sg);
                 const double r25 = max_abs(uniq.skew - lag.mixed_skew(u));
                 return std::max(r24, r25);
               }},
              points, threads, report);

    run_sweep({"symplectic", tol.derived, false,
               [&](const Point& u, int) {
                 const ConnectionValue uniq = lag.unique_connection(u);
                 return max_abs(symplectic_adapted(lag, uniq, u).horizontal_block);
               }},
              points, threads, report);

    run_sweep({"hermitian-complex", tol.algebraic, false,
               [&](const Point& u, int) {
                 const ConnectionValue uniq = lag.unique_connection(u);
                 const Eigen::MatrixXd F = almost_complex_structure(uniq.coefficients);
                 const Eigen::MatrixXd r =
                     F * F + Eigen::MatrixXd::Identity(F.rows(), F.cols());
                 return max_abs(r);
               }},
              points, threads, report);

    run_sweep({"hermitian-compat", tol.derived, false,
               [&](const Point& u, int) {
                 const ConnectionValue uniq = lag.unique_connection(u);
                 const HermitianPair pair = almost_hermitian(lag.metric_field(), uniq, u);
                 return max_abs(cartan_two_form(lag, u) - hermitian_form(pair));
               }},
              points, threads, report);

    // Energy conservation smoke run: a short canonic orbit from each sample
    // point, guarded by the declared domain box. Orbits that leave the box
    // almost immediately are skipped (counted); the drift threshold is
    // 100x the derived tolerance.
    const double smoke_h = 1e-3;
    const int smoke_steps = 200;
    const int min_prefix = 32;
    run_sweep({"energy", 100.0 * tol.derived, false,
               [&](const Point& u, int) -> double {
                 SodeOptions sode_options;
                 sode_options.guard = def.domain;
                 const SodeResult res =
                     integrate_sode(G, u, smoke_h, smoke_steps, sode_options);
                 if (static_cast<int>(res.trajectory.states.size()) < min_prefix)
                   throw EvalError("orbit left the domain box after " +
                                       std::to_string(res.trajectory.states.size()) + " steps",
                                   "energy smoke run");
                 return conservation_report(lag, res.trajectory).max_drift;
               }},
              points, threads, report);
  }

  std::stable_sort(report.records.begin(), report.records.end(),
                   [](const CheckRecord& a, const CheckRecord& b) {
                     if (a.check != b.check) return a.check < b.check;
                     return a.point_index < b.point_index;
                   });
  return report;
}

ConnectionTable run_connection(const ProblemInstance& problem,
                               const std::vector<Point>& points) {
  ConnectionTable table;
  table.rows.resize(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    ConnectionRow& row = table.rows[k];
    row.point_index = static_cast<int>(k);
    row.point = points[k];
    guard_point(row.skipped, row.note, [&] {
      if (problem.mode() == ProblemMode::Lagrangian)
        row.coefficients = problem.lagrange().canonic_connection(points[k]).coefficients;
      else
        row.coefficients =
            metric_connection(problem.spray(), problem.metric(), points[k]).coefficients;
    });
  }
  return table;
}

FamilyTable run_family(const ProblemInstance& problem, const Tensor11Field& tensor,
                       const std::vector<Point>& points, const RunOptions& options) {
  FamilyTable table;
  table.tolerance = options.tol_derived.value_or(problem.definition().tol.derived);
  table.rows.resize(points.size());
  const GLMetricField& g = problem.metric();
  const SemisprayField& G = problem.spray();
  for (std::size_t k = 0; k < points.size(); ++k) {
    FamilyRow& row = table.rows[k];
    row.point_index = static_cast<int>(k);
    row.point = points[k];
    guard_point(row.skipped, row.note, [&] {
      const ConnectionValue nc = metric_connection(G, g, points[k]);
      const ConnectionValue member =
          family_member(nc, tensor.value(points[k]), g, points[k]);
      row.coefficients = member.coefficients;
      row.metric_residual = max_abs(nabla_metric(G, member.coefficients, g, points[k]));
      row.pass = row.metric_residual < table.tolerance;
    });
  }
  return table;
}

HermitianTable run_hermitian(const ProblemInstance& problem, const std::vector<Point>& points,
                             const RunOptions& options) {
  const LagrangeSpace& lag = problem.lagrange();
  HermitianTable table;
  table.tol_algebraic = options.tol_algebraic.value_or(problem.definition().tol.algebraic);
  table.tol_derived = options.tol_derived.value_or(problem.definition().tol.derived);
  table.rows.resize(points.size());
  for (std::size_t k = 0; k < points.size(); ++k) {
    HermitianRow& row = table.rows[k];
    row.point_index = static_cast<int>(k);
    row.point = points[k];
    guard_point(row.skipped, row.note, [&] {
      const ConnectionValue uniq = lag.unique_connection(points[k]);
      const HermitianPair pair = almost_hermitian(lag.metric_field(), uniq, points[k]);
      const Eigen::MatrixXd F = pair.complex_structure;
      row.complex_residual =
          max_abs(F * F + Eigen::MatrixXd::Identity(F.rows(), F.cols()));
      row.compatibility_residual =
          max_abs(cartan_two_form(lag, points[k]) - hermitian_form(pair));
      row.pass = row.complex_residual < table.tol_algebraic &&
                 row.compatibility_residual < table.tol_derived;
    });
  }
  return table;
}

IntegrateOutcome run_integrate(const ProblemInstance& problem, const Point& start, double h,
                               int steps, const std::optional<Eigen::VectorXd>& transport_x0) {
  IntegrateOutcome out;
  SodeOptions options;  // no box guard: the caller chose the start deliberately
  out.sode = integrate_sode(problem.spray(), start, h, steps, options);
  const Trajectory& traj = out.sode.trajectory;

  if (problem.mode() == ProblemMode::Lagrangian) {
    const ConservationReport report = conservation_report(problem.lagrange(), traj);
    out.energies.reserve(report.samples.size());
    for (const EnergySample& s : report.samples) out.energies.push_back(s.energy);
    out.energy_drift = report.max_drift;
  }

  if (transport_x0) {
    ConnectionCoefficientField field;
    if (problem.mode() == ProblemMode::Lagrangian) {
      const LagrangeSpace* lag = &problem.lagrange();
      field = [lag](const Point& u) { return lag->canonic_connection(u).coefficients; };
    } else {
      const GLMetricField* g = &problem.metric();
      const SemisprayField* G = &problem.spray();
      field = [g, G](const Point& u) { return metric_connection(*G, *g, u).coefficients; };
    }
    out.transport = parallel_transport(problem.spray(), field, traj, *transport_x0);

    out.transported_norms.reserve(out.transport->samples.size());
    double first = 0.0;
    for (std::size_t k = 0; k < out.transport->samples.size(); ++k) {
      const Eigen::MatrixXd gv = problem.metric().value(traj.states[k]);
      const Eigen::VectorXd& X = out.transport->samples[k];
      const double norm = X.dot(gv * X);
      if (k == 0) first = norm;
      out.transported_norms.push_back(norm);
      out.transport_drift = std::max(out.transport_drift, std::abs(norm - first));
    }
  }
  return out;
}

// ---- rendering ----------------------------------------------------------------

std::string render_report_table(const Report& report) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-18s %7s %6s %6s %6s %15s %11s  %s\n", "check", "points",
                "pass", "fail", "skip", "worst residual", "tolerance", "status");
  out << line;
  for (const CheckSummary& s : report.summaries) {
    const int total = s.passed + s.failed + s.skipped;
    const char* status = s.failed == 0 ? "PASS" : (s.informational ? "FAIL (info)" : "FAIL");
    std::snprintf(line, sizeof line, "%-18s %7d %6d %6d %6d %15s %11s  %s\n", s.check.c_str(),
                  total, s.passed, s.failed, s.skipped, fmt_sci(s.worst_residual).c_str(),
                  fmt_g(s.tolerance).c_str(), status);
    out << line;
  }

  int shown = 0;
  std::string current;
  for (const CheckRecord& rec : report.records) {
    if (rec.skipped || rec.pass) continue;
    if (rec.check != current) {
      current = rec.check;
      shown = 0;
    }
    if (++shown > 8) continue;
    out << "  fail " << rec.check << " @" << rec.point_index << " " << point_text(rec.point)
        << " residual=" << fmt_sci(rec.residual) << (rec.informational ? " (info)" : "")
        << "\n";
  }

  int skipped_total = 0;
  for (const CheckSummary& s : report.summaries) skipped_total += s.skipped;
  if (skipped_total > 0) out << "skipped point-checks: " << skipped_total << "\n";

  out << "overall: " << (report.exit_code() == 0 ? "PASS" : "FAIL") << "\n";
  return out.str();
}

std::string render_report_json(const Report& report) {
  std::ostringstream out;
  for (const CheckRecord& rec : report.records) {
    json j;
    j["check"] = rec.check;
    j["point"] = rec.point_index;
    j["x"] = rec.point.x;
    j["y"] = rec.point.y;
    j["residual"] = rec.residual;
    j["pass"] = rec.pass;
    if (rec.skipped) j["skipped"] = true;
    if (rec.informational) j["informational"] = true;
    if (!rec.note.empty()) j["note"] = rec.note;
    out << j.dump() << "\n";
  }
  return out.str();
}

namespace {

std::string matrix_text(const Eigen::MatrixXd& m) {
  std::string s = "[";
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    if (i) s += "; ";
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j) s += ", ";
      s += fmt_g(m(i, j));
    }
  }
  s += "]";
  return s;
}

json matrix_json(const Eigen::MatrixXd& m) {
  json rows = json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

std::string render_connection_table(const ConnectionTable& table) {
  std::ostringstream out;
  out << "point  N^i_j\n";
  for (const ConnectionRow& row : table.rows) {
    out << "#" << row.point_index << " " << point_text(row.point) << "\n";
    if (row.skipped)
      out << "   skipped: " << row.note << "\n";
    else
      out << "   N = " << matrix_text(row.coefficients) << "\n";
  }
  return out.str();
}

std::string render_connection_json(const ConnectionTable& table) {
  std::ostringstream out;
  for (const ConnectionRow& row : table.rows) {
    json j;
    j["point"] = row.point_index;
    j["x"] = row.point.x;
    j["y"] = row.point.y;
    if (row.skipped) {
      j["skipped"] = true;
      j["note"] = row.note;
    } else {
      j["N"] = matrix_json(row.coefficients);
    }
    out << j.dump() << "\n";
  }
  return out.str();
}

std::string render_family_table(const FamilyTable& table) {
  std::ostringstream out;
  out << "family member N = N^c + O X   (tolerance " << fmt_g(table.tolerance) << ")\n";
  for (const FamilyRow& row : table.rows) {
    out << "#" << row.point_index << " " << point_text(row.point) << "\n";
    if (row.skipped) {
      out << "   skipped: " << row.note << "\n";
      continue;
    }
    out << "   N = " << matrix_text(row.coefficients)
        << "  nabla_g residual = " << fmt_sci(row.metric_residual) << "  "
        << (row.pass ? "PASS" : "FAIL") << "\n";
  }
  return out.str();
}

std::string render_family_json(const FamilyTable& table) {
  std::ostringstream out;
  for (const FamilyRow& row : table.rows) {
    json j;
    j["point"] = row.point_index;
    j["x"] = row.point.x;
    j["y"] = row.point.y;
    if (row.skipped) {
      j["skipped"] = true;
      j["note"] = row.note;
    } else {
      j["N"] = matrix_json(row.coefficients);
      j["residual"] = row.metric_residual;
      j["pass"] = row.pass;
    }
    out << j.dump() << "\n";
  }
  return out.str();
}

std::string render_hermitian_table(const HermitianTable& table) {
  std::ostringstream out;
  char line[256];
  std::snprintf(line, sizeof line, "%-6s %-44s %14s %14s  %s\n", "point", "u", "|F^2+I|",
                "|omega-G.F|", "status");
  out << line;
  for (const HermitianRow& row : table.rows) {
    if (row.skipped) {
      std::snprintf(line, sizeof line, "#%-5d %-44s %14s %14s  skipped: %s\n", row.point_index,
                    point_text(row.point).c_str(), "-", "-", row.note.c_str());
    } else {
      std::snprintf(line, sizeof line, "#%-5d %-44s %14s %14s  %s\n", row.point_index,
                    point_text(row.point).c_str(), fmt_sci(row.complex_residual).c_str(),
                    fmt_sci(row.compatibility_residual).c_str(), row.pass ? "PASS" : "FAIL");
    }
    out << line;
  }
  return out.str();
}

std::string render_hermitian_json(const HermitianTable& table) {
  std::ostringstream out;
  for (const HermitianRow& row : table.rows) {
    json j;
    j["point"] = row.point_index;
    j["x"] = row.point.x;
    j["y"] = row.point.y;
    if (row.skipped) {
      j["skipped"] = true;
      j["note"] = row.note;
    } else {
      j["complex_residual"] = row.complex_residual;
      j["compatibility_residual"] = row.compatibility_residual;
      j["pass"] = row.pass;
    }
    out << j.dump() << "\n";
  }
  return out.str();
}

std::string render_integrate_table(const IntegrateOutcome& outcome) {
  std::ostringstream out;
  const Trajectory& traj = outcome.sode.trajectory;
  out << "t";
  if (!traj.states.empty()) {
    const int n = traj.states.front().dim();
    for (int i = 1; i <= n; ++i) out << " x" << i;
    for (int i = 1; i <= n; ++i) out << " y" << i;
  }
  if (!outcome.energies.empty()) out << " E";
  if (outcome.transport) out << " gXX";
  out << "\n";

  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    out << fmt_g(traj.times[k]);
    for (double v : traj.states[k].x) out << " " << fmt_g(v);
    for (double v : traj.states[k].y) out << " " << fmt_g(v);
    if (k < outcome.energies.size()) out << " " << fmt_g(outcome.energies[k]);
    if (outcome.transport && k < outcome.transported_norms.size())
      out << " " << fmt_g(outcome.transported_norms[k]);
    out << "\n";
  }

  if (!outcome.energies.empty())
    out << "energy drift: " << fmt_sci(outcome.energy_drift) << "\n";
  if (outcome.transport)
    out << "transport g(X,X) drift: " << fmt_sci(outcome.transport_drift) << "\n";
  if (outcome.sode.abort) {
    const char* kind = outcome.sode.abort->kind == AbortKind::BlowUp       ? "blow-up"
                       : outcome.sode.abort->kind == AbortKind::DomainError ? "domain-error"
                                                                            : "left-box";
    out << "aborted (" << kind << ") at t=" << fmt_g(outcome.sode.abort->last_valid_time)
        << ": " << outcome.sode.abort->message << "\n";
  }
  return out.str();
}

std::string render_integrate_json(const IntegrateOutcome& outcome) {
  std::ostringstream out;
  const Trajectory& traj = outcome.sode.trajectory;
  for (std::size_t k = 0; k < traj.states.size(); ++k) {
    json j;
    j["t"] = traj.times[k];
    j["x"] = traj.states[k].x;
    j["y"] = traj.states[k].y;
    if (k < outcome.energies.size()) j["E"] = outcome.energies[k];
    if (outcome.transport && k < outcome.transport->samples.size()) {
      const Eigen::VectorXd& X = outcome.transport->samples[k];
      j["X"] = std::vector<double>(X.data(), X.data() + X.size());
      j["gXX"] = outcome.transported_norms[k];
    }
    out << j.dump() << "\n";
  }
  json tail;
  tail["summary"] = true;
  if (!outcome.energies.empty()) tail["energy_drift"] = outcome.energy_drift;
  if (outcome.transport) tail["transport_drift"] = outcome.transport_drift;
  if (outcome.sode.abort) {
    tail["aborted"] = true;
    tail["abort_t"] = outcome.sode.abort->last_valid_time;
    tail["abort_message"] = outcome.sode.abort->message;
  }
  out << tail.dump() << "\n";
  return out.str();
}

}  // namespace mconn
