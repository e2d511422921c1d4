#pragma once

#include <vector>

#include "mconn/expr.hpp"
#include "mconn/geometry.hpp"
#include "mconn/lagrange.hpp"
#include "mconn/sampling.hpp"

namespace mconn::testing {

/// Random low-degree polynomial in the chart coordinates: `terms` monomials
/// of total degree <= `degree` with coefficients in [-magnitude, magnitude].
/// With x_only set, fiber coordinates never appear.
Expr random_polynomial(SampleRng& rng, int n, int degree, double magnitude, int terms,
                       bool x_only = false);

/// Random expression tree mixing arithmetic, integer powers and the
/// function set; log/sqrt arguments are wrapped positive by construction.
Expr random_expression(SampleRng& rng, int n, int max_depth);

/// GL-metric g = diag(2 + p_ii) + small symmetric off-diagonal polynomials;
/// diagonally dominant, hence invertible, on [-1, 1]^{2n}.
GLMetricField random_dominant_metric(SampleRng& rng, int n);

/// Semispray with random polynomial coefficients.
SemisprayField random_spray(SampleRng& rng, int n);

/// Regular Lagrangian quadratic in y with smooth x-coefficients:
/// L = a_ij(x) y^i y^j + b_i(x) y^i + c(x), a = diag(2 + small) + small sym.
LagrangeSpace random_quadratic_lagrangian(SampleRng& rng, int n);

}  // namespace mconn::testing
