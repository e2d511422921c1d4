#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>

#include "mconn/driver.hpp"
#include "mconn/errors.hpp"
#include "mconn/problem.hpp"

using namespace mconn;

namespace {

const char* kFlatDef = R"(
# flat two-dimensional Lagrange space
dim = 2
mode = lagrangian
L = y1^2 + y2^2
samples = 12
seed = 5
)";

const char* kPoincareDef = R"(
dim = 2
mode = lagrangian
L = (y1^2 + y2^2) / (x2^2)
domain.x2 = 0.5 2
domain.y1 = -2 2
domain.y2 = -2 2
samples = 8
seed = 42
)";

const char* kShearDef = R"(
dim = 2
mode = generalized
g.1.1 = 1
g.1.2 = 0
g.2.2 = 1
G.1 = x1 * y2
G.2 = 0
samples = 10
seed = 7
)";

}  // namespace

TEST_CASE("definition parsing fills defaults and validates") {
  const ProblemDefinition def = parse_problem(kPoincareDef);
  CHECK(def.dim == 2);
  CHECK(def.mode == ProblemMode::Lagrangian);
  CHECK(def.samples == 8);
  CHECK(def.seed == 42);
  CHECK(def.domain.ranges[0][0] == -1.0);  // x1 default
  CHECK(def.domain.ranges[1][0] == 0.5);   // x2 override
  CHECK(def.domain.ranges[2][1] == 2.0);   // y1 override
  CHECK(def.tol.algebraic == 1e-12);
  CHECK(def.tol.derived == 1e-9);
}

TEST_CASE("definition validation rejects the documented failure modes") {
  CHECK_THROWS_AS(parse_problem("mode = lagrangian\nL = y1^2\n"), ValidationError);  // no dim
  CHECK_THROWS_AS(parse_problem("dim = 1\nmode = bogus\nL = y1^2\n"), ValidationError);
  CHECK_THROWS_AS(parse_problem("dim = 1\nmode = lagrangian\n"), ValidationError);  // no L
  CHECK_THROWS_AS(parse_problem("dim = 1\nmode = lagrangian\nL = y7^2\n"), ValidationError);
  CHECK_THROWS_AS(parse_problem("dim = 1\nmode = lagrangian\nL = y1^2\nwhat = 3\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse_problem("dim = 1\nmode = lagrangian\nL = y1^2\ndomain.x1 = 2 1\n"),
                  ValidationError);
  CHECK_THROWS_AS(parse_problem("dim = 1\nmode = lagrangian\nL = y1^2\nL = y1^2\n"),
                  ValidationError);  // duplicate key
  CHECK_THROWS_AS(parse_problem("dim = 2\nmode = generalized\ng.1.1 = 1\nG.1 = 0\nG.2 = 0\n"),
                  ValidationError);  // missing metric entries
  CHECK_THROWS_AS(
      parse_problem("dim = 1\nmode = lagrangian\nL = y1^2\npoints = 1 2 3\n"),
      ValidationError);  // wrong point arity
}

TEST_CASE("explicit point lists override sampling") {
  const ProblemDefinition def = parse_problem(
      "dim = 1\nmode = lagrangian\nL = y1^2\npoints = 0.5 1.5 ; -0.25 2\n");
  const ProblemInstance instance(def);
  const auto pts = instance.sample();
  REQUIRE(pts.size() == 2);
  CHECK(pts[0].x[0] == 0.5);
  CHECK(pts[0].y[0] == 1.5);
  CHECK(pts[1].x[0] == -0.25);
  CHECK(pts[1].y[0] == 2.0);
}

TEST_CASE("flat lagrangian definition passes every check") {
  const ProblemInstance instance(parse_problem(kFlatDef));
  const Report report = run_check(instance);
  CHECK(report.exit_code() == 0);
  for (const CheckSummary& s : report.summaries) {
    CAPTURE(s.check);
    CHECK(s.failed == 0);
  }
  // All ten lagrangian checks ran.
  CHECK(report.summaries.size() == 10);
}

TEST_CASE("poincare definition passes every check") {
  const ProblemInstance instance(parse_problem(kPoincareDef));
  const Report report = run_check(instance);
  CHECK(report.exit_code() == 0);
}

TEST_CASE("the shear control fails helmholtz and nothing else") {
  const ProblemInstance instance(parse_problem(kShearDef));
  const Report report = run_check(instance);
  CHECK(report.exit_code() == 1);
  for (const CheckSummary& s : report.summaries) {
    CAPTURE(s.check);
    if (s.check == "helmholtz")
      CHECK(s.failed > 0);
    else
      CHECK(s.failed == 0);
  }

  // Expected-failure mode reports it as informational and exits 0.
  RunOptions options;
  options.expect_helmholtz_fail = true;
  const Report tolerant = run_check(instance, options);
  CHECK(tolerant.exit_code() == 0);

  // The residual entry is the documented -x1, exactly.
  for (const CheckRecord& rec : tolerant.records) {
    if (rec.check != "helmholtz") continue;
    CHECK(rec.residual == doctest::Approx(std::abs(rec.point.x[0])).epsilon(1e-12));
  }
}

TEST_CASE("reports are deterministic functions of definition and seed") {
  const ProblemInstance instance(parse_problem(kShearDef));
  const Report a = run_check(instance);
  const Report b = run_check(instance);
  CHECK(render_report_table(a) == render_report_table(b));
  CHECK(render_report_json(a) == render_report_json(b));

  RunOptions other;
  other.seed = 99;
  const Report c = run_check(instance, other);
  CHECK(render_report_json(a) != render_report_json(c));
}

TEST_CASE("records cover every sampled point in every check") {
  const ProblemInstance instance(parse_problem(kShearDef));
  const Report report = run_check(instance);
  const int points = instance.definition().samples;
  for (const CheckSummary& s : report.summaries)
    CHECK(s.passed + s.failed + s.skipped == points);
  CHECK(static_cast<int>(report.records.size()) ==
        points * static_cast<int>(report.summaries.size()));

  // Sorted by (check, point index).
  for (std::size_t k = 1; k < report.records.size(); ++k) {
    const auto& a = report.records[k - 1];
    const auto& b = report.records[k];
    CHECK((a.check < b.check || (a.check == b.check && a.point_index < b.point_index)));
  }
}

TEST_CASE("connection tables evaluate the right formulas") {
  // n = 1 generalized: g = e^{x1}, G = 0 gives N = y1 / 2.
  const ProblemDefinition def = parse_problem(
      "dim = 1\nmode = generalized\ng.1.1 = exp(x1)\nG.1 = 0\npoints = 0 2\n");
  const ProblemInstance instance(def);
  const ConnectionTable table = run_connection(instance, instance.sample());
  REQUIRE(table.rows.size() == 1);
  CHECK(table.rows[0].coefficients(0, 0) == doctest::Approx(1.0).epsilon(1e-12));

  // Lagrangian mode evaluates the canonic connection.
  const ProblemInstance flat(parse_problem(kFlatDef));
  const ConnectionTable ft = run_connection(flat, flat.sample(3));
  for (const ConnectionRow& row : ft.rows) CHECK(max_abs(row.coefficients) < 1e-12);

  // Poincare at the pinned point.
  const ProblemInstance p(parse_problem(kPoincareDef));
  const ConnectionTable pt = run_connection(p, {Point{{0, 1}, {1, 0}}});
  Eigen::MatrixXd expected(2, 2);
  expected << 0, -1, 1, 0;
  REQUIRE(pt.rows.size() == 1);
  CHECK(max_abs(pt.rows[0].coefficients - expected) < 1e-9);
}

TEST_CASE("run_integrate produces diagnostics and honors transport") {
  const ProblemInstance instance(parse_problem(kPoincareDef));
  Eigen::VectorXd x0(2);
  x0 << 1.0, 0.0;
  const IntegrateOutcome outcome =
      run_integrate(instance, Point{{0, 1}, {1, 0}}, 1e-3, 1000, x0);
  CHECK(!outcome.sode.abort);
  CHECK(outcome.energy_drift < 1e-8);
  REQUIRE(outcome.transport);
  CHECK(outcome.transport_drift < 1e-7);
  CHECK(outcome.transported_norms.front() == doctest::Approx(1.0).epsilon(1e-12));

  const std::string table = render_integrate_table(outcome);
  CHECK(table.find("energy drift") != std::string::npos);
  CHECK(table.find("transport g(X,X) drift") != std::string::npos);
}

TEST_CASE("hermitian tables require lagrangian mode") {
  const ProblemInstance shear(parse_problem(kShearDef));
  CHECK_THROWS_AS(run_hermitian(shear, shear.sample(2)), ValidationError);

  const ProblemInstance flat(parse_problem(kFlatDef));
  const HermitianTable table = run_hermitian(flat, flat.sample(4));
  for (const HermitianRow& row : table.rows) {
    CHECK(!row.skipped);
    CHECK(row.pass);
  }
}

TEST_CASE("family tables verify metricity of the deformed connection") {
  const ProblemInstance shear(parse_problem(kShearDef));
  Eigen::MatrixXd X(2, 2);
  X << 0, 1, 0, 0;
  const FamilyTable table =
      run_family(shear, Tensor11Field::constant(2, X), shear.sample(5));
  for (const FamilyRow& row : table.rows) {
    CHECK(!row.skipped);
    CHECK(row.pass);
  }
}
