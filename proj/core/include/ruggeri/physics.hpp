#pragma once

// Fixed-size per-state kernels for the four systems. The solver calls these
// directly; QuasilinearSystem wraps them with dynamic-size Eigen types.

#include <array>
#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Dense>

#include "ruggeri/errors.hpp"
#include "ruggeri/models.hpp"

namespace ruggeri::physics {

template <int N>
using Array = std::array<double, N>;

template <int N>
using Matrix = Eigen::Matrix<double, N, N>;

namespace detail {

inline void require_positive(const char* name, double value) {
  if (!(value > 0.0) || !std::isfinite(value)) {
    throw ReconstructionError(std::string("conserved state implies non-positive ") + name + " (" +
                                  std::to_string(value) + ")",
                              value);
  }
}

}  // namespace detail

/// Larger root X = lambda_+^2 of the equilibrium Lagrangian speed polynomial
/// e_theta*(delta/theta^2)*X*(X - l2) - (X - l1), where l1 = R*theta/tau^2 + theta/eps
/// and l2 = l1 + R^2*theta/(c*tau^2). `smaller` receives the other root.
inline double lagrangian_speed_roots(const FluidParams& p, double tau, double theta,
                                     double* smaller = nullptr) {
  const double lam_star = p.R * theta / (tau * tau) + theta / p.eps;
  const double lam_2star = lam_star + p.R * p.R * theta / (p.c * tau * tau);
  const double a = p.c * p.delta / (theta * theta);
  const double b = -a * lam_2star - 1.0;
  const double c0 = lam_star;
  const double disc = b * b - 4.0 * a * c0;
  const double sq = std::sqrt(disc);
  // b < 0, so -b + sq has no cancellation.
  const double big = (-b + sq) / (2.0 * a);
  if (smaller != nullptr) *smaller = c0 / (a * big);
  return big;
}

/// Isothermal Eulerian system, V = (rho, u, sigma).
struct Isothermal3 {
  static constexpr int n = 3;
  static constexpr SystemKind kind = SystemKind::E3;

  static Array<3> conserved(const FluidParams& p, const Array<3>& v) {
    const auto [rho, u, sigma] = v;
    return {rho, rho * u, p.eps * rho * sigma};
  }

  static Array<3> primitive(const FluidParams& p, const Array<3>& w) {
    const double rho = w[0];
    detail::require_positive("density", rho);
    return {rho, w[1] / rho, w[2] / (p.eps * rho)};
  }

  static Array<3> flux(const FluidParams& p, const Array<3>& v) {
    const auto [rho, u, sigma] = v;
    return {rho * u, rho * u * u + p.R * rho + sigma, p.eps * rho * u * sigma + u};
  }

  static Array<3> source(const FluidParams& p, const Array<3>& v) { return {0.0, 0.0, -v[2] / p.eta}; }

  static Matrix<3> a0(const FluidParams& p, const Array<3>& v) {
    const auto [rho, u, sigma] = v;
    Matrix<3> m;
    m << 1.0, 0.0, 0.0,
         u, rho, 0.0,
         p.eps * sigma, 0.0, p.eps * rho;
    return m;
  }

  static Matrix<3> a1(const FluidParams& p, const Array<3>& v) {
    const auto [rho, u, sigma] = v;
    Matrix<3> m;
    m << u, rho, 0.0,
         u * u + p.R, 2.0 * rho * u, 1.0,
         p.eps * u * sigma, p.eps * rho * sigma + 1.0, p.eps * rho * u;
    return m;
  }

  // mu^2 = R + 1/(eps rho^2) independently of sigma.
  static double spectral_radius(const FluidParams& p, const Array<3>& v) {
    return std::abs(v[1]) + std::sqrt(p.R + 1.0 / (p.eps * v[0] * v[0]));
  }

  static double relaxation_time(const FluidParams& p, const Array<3>& v) { return p.eps * v[0] * p.eta; }

  static bool admissible(const Array<3>& v) { return v[0] > 0.0 && std::isfinite(v[0]); }
};

/// Eulerian system without heat conduction, V = (rho, u, theta, sigma).
struct Eulerian4 {
  static constexpr int n = 4;
  static constexpr SystemKind kind = SystemKind::E4;

  static Array<4> conserved(const FluidParams& p, const Array<4>& v) {
    const auto [rho, u, theta, sigma] = v;
    return {rho, rho * u, rho * (p.c * theta + 0.5 * u * u), p.eps * rho * sigma / theta};
  }

  static Array<4> primitive(const FluidParams& p, const Array<4>& w) {
    const double rho = w[0];
    detail::require_positive("density", rho);
    const double u = w[1] / rho;
    const double theta = (w[2] / rho - 0.5 * u * u) / p.c;
    detail::require_positive("temperature", theta);
    return {rho, u, theta, w[3] * theta / (p.eps * rho)};
  }

  static Array<4> flux(const FluidParams& p, const Array<4>& v) {
    const auto [rho, u, theta, sigma] = v;
    const double pres = p.R * rho * theta;
    const double energy = rho * (p.c * theta + 0.5 * u * u);
    return {rho * u, rho * u * u + pres + sigma, (energy + pres + sigma) * u,
            p.eps * rho * u * sigma / theta + u};
  }

  static Array<4> source(const FluidParams& p, const Array<4>& v) { return {0.0, 0.0, 0.0, -v[3] / p.eta}; }

  static Matrix<4> a0(const FluidParams& p, const Array<4>& v) {
    const auto [rho, u, theta, sigma] = v;
    Matrix<4> m;
    m << 1.0, 0.0, 0.0, 0.0,
         u, rho, 0.0, 0.0,
         p.c * theta + 0.5 * u * u, rho * u, rho * p.c, 0.0,
         p.eps * sigma / theta, 0.0, -p.eps * rho * sigma / (theta * theta), p.eps * rho / theta;
    return m;
  }

  static Matrix<4> a1(const FluidParams& p, const Array<4>& v) {
    const auto [rho, u, theta, sigma] = v;
    const double pres = p.R * rho * theta;
    const double energy = rho * (p.c * theta + 0.5 * u * u);
    Matrix<4> m;
    m << u, rho, 0.0, 0.0,
         u * u + p.R * theta, 2.0 * rho * u, p.R * rho, 1.0,
         (p.c * theta + 0.5 * u * u + p.R * theta) * u, rho * u * u + energy + pres + sigma,
             (p.c + p.R) * rho * u, u,
         p.eps * u * sigma / theta, p.eps * rho * sigma / theta + 1.0,
             -p.eps * rho * u * sigma / (theta * theta), p.eps * rho * u / theta;
    return m;
  }

  /// Squared relative speed mu^2 of the acoustic-viscous pair.
  static double mu_squared(const FluidParams& p, double rho, double theta, double sigma) {
    const double bracket = p.R * p.R * rho * rho * theta + 2.0 * p.R * rho * sigma + sigma * sigma / theta;
    return p.R * theta + theta / (p.eps * rho * rho) + bracket / (rho * rho * p.c);
  }

  static double spectral_radius(const FluidParams& p, const Array<4>& v) {
    return std::abs(v[1]) + std::sqrt(mu_squared(p, v[0], v[2], v[3]));
  }

  static double relaxation_time(const FluidParams& p, const Array<4>& v) {
    return p.eps * v[0] * p.eta / v[2];
  }

  static bool admissible(const Array<4>& v) {
    return v[0] > 0.0 && v[2] > 0.0 && std::isfinite(v[0]) && std::isfinite(v[2]);
  }
};

/// Eulerian system with heat conduction, V = (rho, u, theta, sigma, q).
struct Eulerian5 {
  static constexpr int n = 5;
  static constexpr SystemKind kind = SystemKind::E5;

  static Array<5> conserved(const FluidParams& p, const Array<5>& v) {
    const auto [rho, u, theta, sigma, q] = v;
    return {rho, rho * u, rho * (p.c * theta + 0.5 * u * u), p.eps * rho * sigma / theta,
            p.delta * rho * q / (theta * theta)};
  }

  static Array<5> primitive(const FluidParams& p, const Array<5>& w) {
    const double rho = w[0];
    detail::require_positive("density", rho);
    const double u = w[1] / rho;
    const double theta = (w[2] / rho - 0.5 * u * u) / p.c;
    detail::require_positive("temperature", theta);
    return {rho, u, theta, w[3] * theta / (p.eps * rho), w[4] * theta * theta / (p.delta * rho)};
  }

  static Array<5> flux(const FluidParams& p, const Array<5>& v) {
    const auto [rho, u, theta, sigma, q] = v;
    const double pres = p.R * rho * theta;
    const double energy = rho * (p.c * theta + 0.5 * u * u);
    return {rho * u, rho * u * u + pres + sigma, (energy + pres + sigma) * u + q,
            p.eps * rho * u * sigma / theta + u, p.delta * rho * u * q / (theta * theta) + theta};
  }

  static Array<5> source(const FluidParams& p, const Array<5>& v) {
    return {0.0, 0.0, 0.0, -v[3] / p.eta, -v[4] / p.chi};
  }

  static Matrix<5> a0(const FluidParams& p, const Array<5>& v) {
    const auto [rho, u, theta, sigma, q] = v;
    const double th2 = theta * theta;
    Matrix<5> m;
    m << 1.0, 0.0, 0.0, 0.0, 0.0,
         u, rho, 0.0, 0.0, 0.0,
         p.c * theta + 0.5 * u * u, rho * u, rho * p.c, 0.0, 0.0,
         p.eps * sigma / theta, 0.0, -p.eps * rho * sigma / th2, p.eps * rho / theta, 0.0,
         p.delta * q / th2, 0.0, -2.0 * p.delta * rho * q / (th2 * theta), 0.0, p.delta * rho / th2;
    return m;
  }

  static Matrix<5> a1(const FluidParams& p, const Array<5>& v) {
    const auto [rho, u, theta, sigma, q] = v;
    const double th2 = theta * theta;
    const double pres = p.R * rho * theta;
    const double energy = rho * (p.c * theta + 0.5 * u * u);
    Matrix<5> m;
    m << u, rho, 0.0, 0.0, 0.0,
         u * u + p.R * theta, 2.0 * rho * u, p.R * rho, 1.0, 0.0,
         (p.c * theta + 0.5 * u * u + p.R * theta) * u, rho * u * u + energy + pres + sigma,
             (p.c + p.R) * rho * u, u, 1.0,
         p.eps * u * sigma / theta, p.eps * rho * sigma / theta + 1.0,
             -p.eps * rho * u * sigma / th2, p.eps * rho * u / theta, 0.0,
         p.delta * u * q / th2, p.delta * rho * q / th2,
             -2.0 * p.delta * rho * u * q / (th2 * theta) + 1.0, 0.0, p.delta * rho * u / th2;
    return m;
  }

  /// Extreme speeds of the pencil: seeded with the equilibrium values
  /// u -/+ tau*lambda_+ (or with `hint`, the roots found previously for a
  /// nearby state) and polished by Newton on det(-lambda A0 + A1), using
  /// d/dlambda log det = -tr(M^{-1} A0). Falls back to a full eigensolve.
  static double spectral_radius(const FluidParams& p, const Array<5>& v, std::array<double, 2>* hint = nullptr) {
    double lo0;
    double hi0;
    // Newton converges quadratically, so from a warm start a step below
    // 1e-6 leaves an error far below anything the flux dissipation can see.
    double tol = 1e-13;
    if (hint && std::isfinite((*hint)[0]) && std::isfinite((*hint)[1])) {
      lo0 = (*hint)[0];
      hi0 = (*hint)[1];
      tol = 1e-6;
    } else {
      const double tau = 1.0 / v[0];
      const double seed = tau * std::sqrt(lagrangian_speed_roots(p, tau, v[2]));
      lo0 = v[1] - seed;
      hi0 = v[1] + seed;
    }
    const Matrix<5> m0 = a0(p, v);
    const Matrix<5> m1 = a1(p, v);
    const double lo = polish(m0, m1, lo0, tol);
    const double hi = polish(m0, m1, hi0, tol);
    if (std::isfinite(lo) && std::isfinite(hi) && lo < hi) {
      if (hint) *hint = {lo, hi};
      return std::max(std::abs(lo), std::abs(hi));
    }
    if (hint) *hint = {std::numeric_limits<double>::quiet_NaN(), std::numeric_limits<double>::quiet_NaN()};
    const Eigen::EigenSolver<Matrix<5>> es(m0.partialPivLu().solve(m1), false);
    return es.eigenvalues().cwiseAbs().maxCoeff();
  }

  static double relaxation_time(const FluidParams& p, const Array<5>& v) {
    return std::min(p.eps * v[0] * p.eta / v[2], p.delta * v[0] * p.chi / (v[2] * v[2]));
  }

  static bool admissible(const Array<5>& v) {
    return v[0] > 0.0 && v[2] > 0.0 && std::isfinite(v[0]) && std::isfinite(v[2]);
  }

 private:
  static double polish(const Matrix<5>& m0, const Matrix<5>& m1, double lambda, double tol) {
    for (int it = 0; it < 12; ++it) {
      const Eigen::PartialPivLU<Matrix<5>> lu(m1 - lambda * m0);
      const double trace = lu.solve(m0).trace();
      if (!std::isfinite(trace)) return lambda;  // singular pencil: already a root
      if (trace == 0.0) break;
      const double step = 1.0 / trace;
      lambda += step;
      if (std::abs(step) <= tol * (1.0 + std::abs(lambda))) return lambda;
    }
    return std::numeric_limits<double>::quiet_NaN();
  }
};

/// Lagrangian heat-conducting system, V = (tau, u, theta, sigma, q).
struct Lagrangian5 {
  static constexpr int n = 5;
  static constexpr SystemKind kind = SystemKind::L5;

  static Array<5> conserved(const FluidParams& p, const Array<5>& v) {
    const auto [tau, u, theta, sigma, q] = v;
    return {tau, u, p.c * theta + 0.5 * u * u, p.eps * sigma / theta, p.delta * q / (theta * theta)};
  }

  static Array<5> primitive(const FluidParams& p, const Array<5>& w) {
    const double tau = w[0];
    detail::require_positive("specific volume", tau);
    const double u = w[1];
    const double theta = (w[2] - 0.5 * u * u) / p.c;
    detail::require_positive("temperature", theta);
    return {tau, u, theta, w[3] * theta / p.eps, w[4] * theta * theta / p.delta};
  }

  static Array<5> flux(const FluidParams& p, const Array<5>& v) {
    const auto [tau, u, theta, sigma, q] = v;
    const double pres = p.R * theta / tau;
    return {-u, pres + sigma, (pres + sigma) * u + q, u, theta};
  }

  static Array<5> source(const FluidParams& p, const Array<5>& v) {
    const double tau = v[0];
    return {0.0, 0.0, 0.0, -v[3] * tau / p.eta, -v[4] * tau / p.chi};
  }

  static Matrix<5> a0(const FluidParams& p, const Array<5>& v) {
    const auto [tau, u, theta, sigma, q] = v;
    const double th2 = theta * theta;
    Matrix<5> m;
    m << 1.0, 0.0, 0.0, 0.0, 0.0,
         0.0, 1.0, 0.0, 0.0, 0.0,
         0.0, u, p.c, 0.0, 0.0,
         0.0, 0.0, -p.eps * sigma / th2, p.eps / theta, 0.0,
         0.0, 0.0, -2.0 * p.delta * q / (th2 * theta), 0.0, p.delta / th2;
    return m;
  }

  static Matrix<5> a1(const FluidParams& p, const Array<5>& v) {
    const auto [tau, u, theta, sigma, q] = v;
    const double pres = p.R * theta / tau;
    const double p_tau = -p.R * theta / (tau * tau);
    const double p_theta = p.R / tau;
    Matrix<5> m;
    m << 0.0, -1.0, 0.0, 0.0, 0.0,
         p_tau, 0.0, p_theta, 1.0, 0.0,
         u * p_tau, pres + sigma, u * p_theta, u, 1.0,
         0.0, 1.0, 0.0, 0.0, 0.0,
         0.0, 0.0, 1.0, 0.0, 0.0;
    return m;
  }

  static bool admissible(const Array<5>& v) {
    return v[0] > 0.0 && v[2] > 0.0 && std::isfinite(v[0]) && std::isfinite(v[2]);
  }
};

}  // namespace ruggeri::physics
