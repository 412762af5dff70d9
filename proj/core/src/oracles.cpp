#include "ruggeri/oracles.hpp"

#include <cmath>
#include <complex>
#include <limits>

#include <Eigen/Eigenvalues>

namespace ruggeri::oracle {

namespace {

double step_size(const Vec& v, const Vec& r) {
  return 1e-5 * (1.0 + v.cwiseAbs().maxCoeff()) / r.cwiseAbs().maxCoeff();
}

template <class F>
double richardson_central(F&& f, double h) {
  const double d1 = (f(h) - f(-h)) / (2.0 * h);
  const double d2 = (f(0.5 * h) - f(-0.5 * h)) / h;
  return (4.0 * d2 - d1) / 3.0;
}

}  // namespace

double tracked_eigenvalue(const QuasilinearSystem& sys, const Vec& v, double target) {
  const Mat m = sys.A0(v).partialPivLu().solve(sys.A1(v));
  const Eigen::EigenSolver<Mat> es(m, false);
  double best = std::numeric_limits<double>::quiet_NaN();
  double dist = std::numeric_limits<double>::infinity();
  const auto& vals = es.eigenvalues();
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    const double d = std::abs(vals(i).real() - target);
    if (d < dist) {
      dist = d;
      best = vals(i).real();
    }
  }
  return best;
}

double gnl_finite_difference(const QuasilinearSystem& sys, const Vec& v, const Vec& r, double lambda0) {
  const double h = step_size(v, r);
  return richardson_central([&](double s) { return tracked_eigenvalue(sys, v + s * r, lambda0); }, h);
}

double det_directional_derivative(const QuasilinearSystem& sys, const Vec& v, const Vec& r, double lambda) {
  const double h = step_size(v, r);
  return richardson_central([&](double s) { return sys.pencil(v + s * r, lambda).determinant(); }, h);
}

double det_lambda_derivative(const QuasilinearSystem& sys, const Vec& v, double lambda) {
  const double h = 1e-5 * (1.0 + std::abs(lambda));
  const Mat a0 = sys.A0(v);
  const Mat a1 = sys.A1(v);
  return richardson_central([&](double s) { return Mat(a1 - (lambda + s) * a0).determinant(); }, h);
}

double pencil_residual(const QuasilinearSystem& sys, const Vec& v, double lambda, const Vec& r) {
  return (sys.pencil(v, lambda) * r).norm() / r.norm();
}

}  // namespace ruggeri::oracle
