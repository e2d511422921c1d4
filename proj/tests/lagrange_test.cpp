#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mconn/errors.hpp"
#include "mconn/lagrange.hpp"
#include "mconn/sampling.hpp"
#include "support/christoffel.hpp"
#include "support/generators.hpp"

using namespace mconn;

namespace {

LagrangeSpace flat2() { return LagrangeSpace(2, parse_expression("y1^2 + y2^2", 2)); }

LagrangeSpace poincare() {
  return LagrangeSpace(2, parse_expression(testing::poincare_lagrangian_text(), 2));
}

const Point kPinned{{0, 1}, {1, 0}};

Box poincare_box() {
  Box box = Box::cube(2, -1.0, 1.0);
  box.ranges[1] = {0.5, 2.0};  // x2 bounded away from the pole
  box.ranges[2] = {-2.0, 2.0};
  box.ranges[3] = {-2.0, 2.0};
  return box;
}

}  // namespace

TEST_CASE("lagrange metric of quadratic Lagrangians") {
  const LagrangeSpace flat = flat2();
  const Point u{{0.4, -0.2}, {1.3, 0.8}};
  CHECK(max_abs(flat.metric(u) - Eigen::MatrixXd::Identity(2, 2)) < 1e-15);

  const LagrangeSpace p = poincare();
  CHECK(max_abs(p.metric(kPinned) - Eigen::MatrixXd::Identity(2, 2)) < 1e-13);
  const Point v{{0.3, 2.0}, {0.5, 0.5}};
  CHECK(max_abs(p.metric(v) - 0.25 * Eigen::MatrixXd::Identity(2, 2)) < 1e-13);
}

TEST_CASE("degenerate Lagrangians are rejected") {
  const LagrangeSpace bad(2, parse_expression("x1*y1", 2));
  const Point u{{0.5, 0.5}, {1.0, 1.0}};
  CHECK_THROWS_AS(bad.metric(u), DegenerateLagrangianError);
  CHECK_THROWS_AS(bad.canonic_spray(u), DegenerateLagrangianError);
  CHECK_THROWS_AS(bad.unique_connection(u), DegenerateLagrangianError);
}

TEST_CASE("canonic semispray of the documented cases") {
  const LagrangeSpace flat = flat2();
  const Point u{{0.7, -0.9}, {0.4, 1.6}};
  CHECK(flat.canonic_spray(u).cwiseAbs().maxCoeff() < 1e-15);
  CHECK(max_abs(flat.canonic_spray_field().value(u)) < 1e-15);

  const LagrangeSpace p = poincare();
  const Eigen::VectorXd g = p.canonic_spray(kPinned);
  CHECK(g(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(g(1) == doctest::Approx(0.5).epsilon(1e-12));

  // n=1 closed form: L = e^{x1} y1^2 has G = y1^2 / 4.
  const LagrangeSpace exp1(1, parse_expression("exp(x1) * y1^2", 1));
  const Point w{{0.35}, {1.0}};
  CHECK(exp1.canonic_spray(w)(0) == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(exp1.canonic_spray_field().value(w)(0) == doctest::Approx(0.25).epsilon(1e-12));
}

TEST_CASE("canonic spray matches the Christoffel oracle on the Poincare box") {
  const LagrangeSpace p = poincare();
  const auto oracle = testing::poincare_oracle();
  SampleRng rng(31);
  for (const Point& u : sample_points(poincare_box(), 25, rng)) {
    CHECK((p.canonic_spray(u) - oracle.spray(u)).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((p.canonic_spray_field().value(u) - oracle.spray(u)).cwiseAbs().maxCoeff() < 1e-10);
  }
}

TEST_CASE("energy of the documented cases") {
  const LagrangeSpace flat = flat2();
  const Point u{{0.1, 0.2}, {1.5, -2.5}};
  CHECK(flat.energy(u) ==
        doctest::Approx(flat.lagrangian().evaluate(u)).epsilon(1e-14));

  const LagrangeSpace mixed(1, parse_expression("y1^2 - x1", 1));
  const Point w{{0.7}, {1.2}};
  CHECK(mixed.energy(w) == doctest::Approx(1.2 * 1.2 + 0.7).epsilon(1e-14));
}

TEST_CASE("unique connection equals the canonic connection") {
  const LagrangeSpace flat = flat2();
  const Point u{{0.2, 0.6}, {0.9, -1.1}};
  CHECK(max_abs(flat.unique_connection(u).coefficients) < 1e-15);
  CHECK(max_abs(flat.canonic_connection(u).coefficients) < 1e-15);

  const LagrangeSpace p = poincare();
  Eigen::MatrixXd expected(2, 2);
  expected << 0, -1, 1, 0;
  CHECK(max_abs(p.unique_connection(kPinned).coefficients - expected) < 1e-12);
  CHECK(max_abs(p.canonic_connection(kPinned).coefficients - expected) < 1e-12);

  const LagrangeSpace exp1(1, parse_expression("exp(x1) * y1^2", 1));
  const Point w{{-0.2}, {0.8}};
  CHECK(max_abs(exp1.unique_connection(w).coefficients -
                exp1.canonic_connection(w).coefficients) < 1e-12);
}

TEST_CASE("theorem 3.1 on random regular Lagrangians") {
  SampleRng rng(71);
  for (int n : {1, 2, 3}) {
    const Box box = Box::cube(n, -1.0, 1.0);
    for (int trial = 0; trial < 4; ++trial) {
      const LagrangeSpace space = testing::random_quadratic_lagrangian(rng, n);
      for (const Point& u : sample_points(box, 10, rng)) {
        const ConnectionValue uniq = space.unique_connection(u);
        const ConnectionValue canon = space.canonic_connection(u);
        CHECK(max_abs(uniq.coefficients - canon.coefficients) < 1e-9);

        // 2 N_(ij) = S(g_ij) and N_[ij] = (1/4)(L_{y x} - L_{x y}).
        CHECK(max_abs(2.0 * uniq.sym - space.metric_spray_derivative(u)) < 1e-9);
        CHECK(max_abs(uniq.skew - space.mixed_skew(u)) < 1e-9);
      }
    }
  }
}

TEST_CASE("symplectic blocks vanish exactly on the unique connection") {
  const LagrangeSpace p = poincare();
  SampleRng rng(72);
  for (const Point& u : sample_points(poincare_box(), 10, rng)) {
    const ConnectionValue uniq = p.unique_connection(u);
    const SymplecticBlocks blocks = symplectic_adapted(p, uniq, u);
    CHECK(max_abs(blocks.horizontal_block) < 1e-9);
    CHECK(max_abs(blocks.metric_block - p.metric(u)) < 1e-13);

    // A symmetric lowered perturbation leaves the hh block untouched.
    const Eigen::MatrixXd raw = sample_matrix(p.dim(), 1.0, rng);
    const Eigen::MatrixXd sym = 0.5 * (raw + raw.transpose());
    const Eigen::MatrixXd g = p.metric(u);
    const Eigen::MatrixXd perturbed =
        uniq.coefficients + checked_inverse(g).inverse * sym;
    const ConnectionValue pert = ConnectionValue::make(u, perturbed, g);
    CHECK(max_abs(symplectic_adapted(p, pert, u).horizontal_block) < 1e-9);

    // The zero connection is not symplectic away from flat space.
    const ConnectionValue zero =
        ConnectionValue::make(u, Eigen::MatrixXd::Zero(2, 2), g);
    CHECK(max_abs(symplectic_adapted(p, zero, u).horizontal_block) > 1e-4);
  }
}

TEST_CASE("lagrange family members are metric but not symplectic") {
  const LagrangeSpace flat = flat2();
  const Point u{{0.0, 0.0}, {1.0, 1.0}};
  Eigen::MatrixXd X(2, 2);
  X << 0, 1, 0, 0;
  const ConnectionValue member =
      lagrange_family_member(flat, Tensor11Field::constant(2, X), u);
  Eigen::MatrixXd expected(2, 2);
  expected << 0, 0.5, -0.5, 0;
  CHECK(max_abs(member.coefficients - expected) < 1e-15);

  // Metric but the symplectic block picks up -g * skew.
  const SymplecticBlocks blocks = symplectic_adapted(flat, member, u);
  CHECK(max_abs(blocks.horizontal_block + expected) < 1e-15);

  // X = 0 recovers the canonic connection.
  const ConnectionValue base = lagrange_family_member(
      flat, Tensor11Field::constant(2, Eigen::MatrixXd::Zero(2, 2)), u);
  CHECK(max_abs(base.coefficients - flat.canonic_connection(u).coefficients) < 1e-15);

  // n = 1: the family has a single member.
  const LagrangeSpace exp1(1, parse_expression("exp(x1) * y1^2", 1));
  const Point w{{0.1}, {1.3}};
  Eigen::MatrixXd X1(1, 1);
  X1 << -2.4;
  CHECK(max_abs(lagrange_family_member(exp1, Tensor11Field::constant(1, X1), w).coefficients -
                exp1.canonic_connection(w).coefficients) < 1e-15);
}

TEST_CASE("family members keep metricity for random Lagrangians") {
  SampleRng rng(73);
  const int n = 2;
  const Box box = Box::cube(n, -1.0, 1.0);
  const LagrangeSpace space = testing::random_quadratic_lagrangian(rng, n);
  const GLMetricField& g = space.metric_field();
  const SemisprayField& G = space.canonic_spray_field();
  for (const Point& u : sample_points(box, 10, rng)) {
    const Tensor11Field X = Tensor11Field::constant(n, sample_matrix(n, 1.5, rng));
    const ConnectionValue member = lagrange_family_member(space, X, u);
    CHECK(max_abs(nabla_metric(G, member.coefficients, g, u)) < 1e-9);
  }
}
