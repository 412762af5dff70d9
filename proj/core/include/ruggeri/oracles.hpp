#pragma once

// Numeric cross-checks that only use the pencil matrices, never the closed
// forms in modes.hpp.

#include "ruggeri/models.hpp"

namespace ruggeri::oracle {

/// Eigenvalue of (A1, A0) at `v` nearest to `target` (real part).
double tracked_eigenvalue(const QuasilinearSystem& sys, const Vec& v, double target);

/// d/ds lambda(v + s r) at s = 0, where lambda is tracked from `lambda0` by
/// nearest-match continuation. Central differences with step
/// h = 1e-5 (1 + |v|_inf) / |r|_inf and one Richardson halving.
double gnl_finite_difference(const QuasilinearSystem& sys, const Vec& v, const Vec& r, double lambda0);

/// d/ds det(-lambda A0(v + s r) + A1(v + s r)) at s = 0, lambda fixed.
/// Same step rule as gnl_finite_difference.
double det_directional_derivative(const QuasilinearSystem& sys, const Vec& v, const Vec& r, double lambda);

/// d/dlambda det(-lambda A0(v) + A1(v)) by central differences with Richardson.
double det_lambda_derivative(const QuasilinearSystem& sys, const Vec& v, double lambda);

/// ||(-lambda A0 + A1) r|| / ||r||.
double pencil_residual(const QuasilinearSystem& sys, const Vec& v, double lambda, const Vec& r);

}  // namespace ruggeri::oracle
