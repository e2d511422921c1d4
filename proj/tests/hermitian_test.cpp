#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mconn/hermitian.hpp"
#include "mconn/lagrange.hpp"
#include "mconn/sampling.hpp"
#include "support/christoffel.hpp"
#include "support/generators.hpp"

using namespace mconn;

namespace {

Box poincare_box() {
  Box box = Box::cube(2, -1.0, 1.0);
  box.ranges[1] = {0.5, 2.0};
  box.ranges[2] = {-2.0, 2.0};
  box.ranges[3] = {-2.0, 2.0};
  return box;
}

}  // namespace

TEST_CASE("flat almost complex structure is the standard one") {
  const Eigen::MatrixXd F = almost_complex_structure(Eigen::MatrixXd::Zero(2, 2));
  Eigen::MatrixXd expected(4, 4);
  expected << 0, 0, 1, 0,  //
      0, 0, 0, 1,          //
      -1, 0, 0, 0,         //
      0, -1, 0, 0;
  CHECK(max_abs(F - expected) == doctest::Approx(0.0));
  CHECK(max_abs(F * F + Eigen::MatrixXd::Identity(4, 4)) == doctest::Approx(0.0));
}

TEST_CASE("F squared is minus the identity for arbitrary connections") {
  SampleRng rng(11);
  for (int n : {1, 2, 3}) {
    for (int k = 0; k < 30; ++k) {
      const Eigen::MatrixXd N = sample_matrix(n, 5.0, rng);
      const Eigen::MatrixXd F = almost_complex_structure(N);
      CHECK(max_abs(F * F + Eigen::MatrixXd::Identity(2 * n, 2 * n)) < 1e-12);
    }
  }
}

TEST_CASE("adapted frame projectors and the tangent structure") {
  SampleRng rng(12);
  for (int n : {1, 2, 3}) {
    const Eigen::MatrixXd N = sample_matrix(n, 3.0, rng);
    const AdaptedFrame frame = adapted_frame(N);
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(2 * n, 2 * n);

    CHECK(max_abs(frame.basis * frame.inverse - id) < 1e-12);
    CHECK(max_abs(frame.horizontal + frame.vertical - id) < 1e-12);
    CHECK(max_abs(frame.horizontal * frame.horizontal - frame.horizontal) < 1e-12);
    CHECK(max_abs(frame.vertical * frame.vertical - frame.vertical) < 1e-12);
    CHECK(max_abs(frame.horizontal * frame.vertical) < 1e-12);

    const Eigen::MatrixXd J = tangent_structure(n);
    CHECK(max_abs(J * J) == doctest::Approx(0.0));
    CHECK(max_abs(J * frame.horizontal - J) < 1e-12);
    CHECK(Eigen::FullPivLU<Eigen::MatrixXd>(J * frame.horizontal).rank() == n);
  }
}

TEST_CASE("sasaki metric is block diagonal in the Berwald frame") {
  SampleRng rng(13);
  const int n = 2;
  const GLMetricField g = testing::random_dominant_metric(rng, n);
  const Box box = Box::cube(n, -1.0, 1.0);
  for (const Point& u : sample_points(box, 5, rng)) {
    const Eigen::MatrixXd N = sample_matrix(n, 2.0, rng);
    const Eigen::MatrixXd gv = g.value(u);
    const Eigen::MatrixXd Gm = sasaki_metric(gv, N);

    CHECK(max_abs(Gm - Gm.transpose()) < 1e-12);

    const AdaptedFrame frame = adapted_frame(N);
    const Eigen::MatrixXd adapted = frame.basis.transpose() * Gm * frame.basis;
    CHECK(max_abs(adapted.block(0, 0, n, n) - gv) < 1e-12);
    CHECK(max_abs(adapted.block(n, n, n, n) - gv) < 1e-12);
    CHECK(max_abs(adapted.block(0, n, n, n)) < 1e-12);
    CHECK(max_abs(adapted.block(n, 0, n, n)) < 1e-12);
  }
}

TEST_CASE("cartan form equals G(F.,.) under the unique connection") {
  const LagrangeSpace p(2, parse_expression(testing::poincare_lagrangian_text(), 2));
  SampleRng rng(14);
  for (const Point& u : sample_points(poincare_box(), 15, rng)) {
    const ConnectionValue uniq = p.unique_connection(u);
    const HermitianPair pair = almost_hermitian(p.metric_field(), uniq, u);
    const Eigen::MatrixXd omega = cartan_two_form(p, u);
    CHECK(max_abs(omega - hermitian_form(pair)) < 1e-9);
    CHECK(max_abs(omega + omega.transpose()) < 1e-12);  // omega is skew
  }
}

TEST_CASE("compatibility fails for a non-symplectic metric connection") {
  const LagrangeSpace p(2, parse_expression(testing::poincare_lagrangian_text(), 2));
  const Point u{{0.3, 1.0}, {1.0, 0.5}};
  // Deform inside the metric family: still metric, no longer symplectic.
  Eigen::MatrixXd X(2, 2);
  X << 0, 2, 0, 0;
  const ConnectionValue member = lagrange_family_member(p, Tensor11Field::constant(2, X), u);
  const HermitianPair pair = almost_hermitian(p.metric_field(), member, u);
  CHECK(max_abs(cartan_two_form(p, u) - hermitian_form(pair)) > 1e-3);
  // F^2 = -Id still holds: it is connection independent.
  const Eigen::MatrixXd F = pair.complex_structure;
  CHECK(max_abs(F * F + Eigen::MatrixXd::Identity(4, 4)) < 1e-12);
}

TEST_CASE("random quadratic Lagrangians satisfy the hermitian identity") {
  SampleRng rng(15);
  for (int n : {1, 2, 3}) {
    const Box box = Box::cube(n, -1.0, 1.0);
    const LagrangeSpace space = testing::random_quadratic_lagrangian(rng, n);
    for (const Point& u : sample_points(box, 8, rng)) {
      const ConnectionValue uniq = space.unique_connection(u);
      const HermitianPair pair = almost_hermitian(space.metric_field(), uniq, u);
      CHECK(max_abs(cartan_two_form(space, u) - hermitian_form(pair)) < 1e-9);
    }
  }
}
