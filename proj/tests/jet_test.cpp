#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "mconn/errors.hpp"
#include "mconn/finite_difference.hpp"
#include "mconn/jet.hpp"
#include "mconn/sampling.hpp"
#include "support/generators.hpp"

using namespace mconn;

namespace {

double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

TEST_CASE("jet of a quadratic") {
  const Expr e = parse_expression("y1^2", 2);
  const Point u{{0.3, -0.7}, {1.5, 2.0}};
  const Jet j = jet(e, u, 2);
  CHECK(j.value == doctest::Approx(2.25));
  CHECK(j.grad(2) == doctest::Approx(3.0));  // slot y1
  CHECK(j.grad(0) == doctest::Approx(0.0));
  CHECK(j.hess(2, 2) == doctest::Approx(2.0));
  CHECK(j.hess(3, 3) == doctest::Approx(0.0));
}

TEST_CASE("jet of a bilinear term fills both mixed slots") {
  const Expr e = parse_expression("x1*y1", 2);
  const Jet j = jet(e, Point{{2, 0}, {5, 1}}, 2);
  CHECK(j.hess(0, 2) == doctest::Approx(1.0));
  CHECK(j.hess(2, 0) == doctest::Approx(1.0));
  CHECK(j.hess(0, 0) == doctest::Approx(0.0));
}

TEST_CASE("third-order partial of the rational example") {
  // d3 e / dy1 dy1 dx2 at x=(0,1), y=(1,0); the finite-difference oracle on
  // the symbolic second derivative fixes the expected value -4.
  const Expr e = parse_expression("(y1^2+y2^2)/(x2^2)", 2);
  const Point u{{0, 1}, {1, 0}};

  const Expr d2 = e.derivative(2).derivative(2);  // d2/dy1 dy1
  const double oracle = finite_difference_partial(d2, u, 1, 1e-5);
  CHECK(oracle == doctest::Approx(-4.0).epsilon(1e-7));

  const Jet j = jet(e, u, 3);
  CHECK(j.third_at(2, 2, 1) == doctest::Approx(-4.0).epsilon(1e-12));
  CHECK(rel_err(j.third_at(2, 2, 1), oracle) < 1e-6);
}

TEST_CASE("jet slots above the requested order are zeroed and flagged") {
  const Expr e = parse_expression("y1^3", 1);
  const Point u{{0}, {2}};
  const Jet j1 = jet(e, u, 1);
  CHECK(j1.order == 1);
  CHECK(j1.grad(1) == doctest::Approx(12.0));
  CHECK(j1.hess(1, 1) == 0.0);
  CHECK(j1.third_at(1, 1, 1) == 0.0);

  const Jet j3 = jet(e, u, 3);
  CHECK(j3.hess(1, 1) == doctest::Approx(12.0));
  CHECK(j3.third_at(1, 1, 1) == doctest::Approx(6.0));
}

TEST_CASE("jet order is capped at 3") {
  const Expr e = parse_expression("y1", 1);
  CHECK_THROWS_AS(JetTable(e, 4), std::invalid_argument);
  CHECK_THROWS_AS(JetTable(e, -1), std::invalid_argument);
}

TEST_CASE("evaluation errors identify the failing partial") {
  const Expr e = parse_expression("log(x1)", 1);
  const JetTable t(e, 1);
  try {
    t.eval(Point{{0.0}, {0.0}});
    FAIL("expected EvalError");
  } catch (const EvalError& err) {
    CHECK(std::string(err.what()).find("log") != std::string::npos);
  }
}

TEST_CASE("finite differences reproduce the documented stencils") {
  CHECK(finite_difference_partial(parse_expression("y1^2", 1), Point{{0}, {3}}, 1, 1e-5) ==
        doctest::Approx(6.0).epsilon(1e-9));
  CHECK(finite_difference_partial(parse_expression("y1^3", 1), Point{{0}, {2}}, 1, 1, 1e-4) ==
        doctest::Approx(12.0).epsilon(1e-6));
  CHECK(finite_difference_partial(parse_expression("sin(x1)", 1), Point{{0}, {0}}, 0, 1e-4) ==
        doctest::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("finite differences propagate stencil domain errors") {
  const Expr e = parse_expression("log(x1)", 1);
  CHECK_THROWS_AS(finite_difference_partial(e, Point{{1e-9}, {0}}, 0, 1e-5), EvalError);
  CHECK_THROWS_AS(finite_difference_partial(e, Point{{1}, {0}}, std::vector<int>{0, 0, 0},
                                            1e-5),
                  std::invalid_argument);
}

TEST_CASE("jet partials agree with finite differences up to order 2") {
  SampleRng rng(91);
  const Box box = Box::cube(2, -1.0, 1.0);
  int checked = 0;
  while (checked < 60) {
    const Expr e = testing::random_expression(rng, 2, 3);
    const auto pts = sample_points(box, 1, rng);
    const int a = rng.uniform_int(0, 3);
    const int b = rng.uniform_int(0, 3);
    Jet j;
    double fd1 = 0.0, fd2 = 0.0;
    try {
      j = jet(e, pts[0], 2);
      fd1 = finite_difference_partial(e, pts[0], a, 1e-5);
      fd2 = finite_difference_partial(e, pts[0], a, b, 1e-4);
    } catch (const EvalError&) {
      continue;
    }
    if (std::abs(j.value) > 1e3 || std::abs(j.grad(a)) > 1e3 || std::abs(j.hess(a, b)) > 1e3)
      continue;
    CHECK(rel_err(j.grad(a), fd1) < 1e-6);
    CHECK(rel_err(j.hess(a, b), fd2) < 1e-5);
    ++checked;
  }
}

TEST_CASE("jets are linear in the field") {
  SampleRng rng(92);
  const Box box = Box::cube(2, -1.0, 1.0);
  int checked = 0;
  while (checked < 40) {
    const Expr e1 = testing::random_polynomial(rng, 2, 3, 1.0, 4);
    const Expr e2 = testing::random_polynomial(rng, 2, 3, 1.0, 4);
    const auto pts = sample_points(box, 1, rng);
    const Jet ja = jet(e1, pts[0], 2);
    const Jet jb = jet(e2, pts[0], 2);
    const Jet js = jet(e1 + e2, pts[0], 2);
    CHECK(std::abs(js.value - (ja.value + jb.value)) < 1e-12 * std::max(1.0, std::abs(js.value)));
    CHECK((js.grad - (ja.grad + jb.grad)).cwiseAbs().maxCoeff() <
          1e-12 * std::max(1.0, js.grad.cwiseAbs().maxCoeff()));
    CHECK((js.hess - (ja.hess + jb.hess)).cwiseAbs().maxCoeff() <
          1e-12 * std::max(1.0, js.hess.cwiseAbs().maxCoeff()));
    ++checked;
  }
}

TEST_CASE("jet hessian and third tensor are symmetric") {
  SampleRng rng(93);
  const Box box = Box::cube(2, -1.0, 1.0);
  int checked = 0;
  while (checked < 25) {
    const Expr e = testing::random_expression(rng, 2, 3);
    const auto pts = sample_points(box, 1, rng);
    Jet j;
    try {
      j = jet(e, pts[0], 3);
    } catch (const EvalError&) {
      continue;
    }
    double scale = 1.0;
    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b)
        for (int c = 0; c < 4; ++c) scale = std::max(scale, std::abs(j.third_at(a, b, c)));
    if (scale > 1e6) continue;

    for (int a = 0; a < 4; ++a)
      for (int b = 0; b < 4; ++b) {
        CHECK(rel_err(j.hess(a, b), j.hess(b, a)) < 1e-10);
        for (int c = 0; c < 4; ++c) {
          const double base = j.third_at(a, b, c);
          CHECK(rel_err(base, j.third_at(a, c, b)) < 1e-10);
          CHECK(rel_err(base, j.third_at(b, a, c)) < 1e-10);
          CHECK(rel_err(base, j.third_at(c, b, a)) < 1e-10);
        }
      }
    ++checked;
  }
}
