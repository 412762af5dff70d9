#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "ruggeri/models.hpp"

namespace ruggeri {

enum class ModeLabel { FastMinus, SlowMinus, Contact, SlowPlus, FastPlus };

std::string_view to_string(ModeLabel label);
/// "fast+", "fast-", "slow+", "slow-", "contact". Throws ConfigError.
ModeLabel parse_mode_label(std::string_view name);

/// Plus selects the right-moving member of a pair: lambda = u + |mu| in
/// Eulerian variables (so mu = u - lambda is negative), lambda = +lambda_mode
/// in Lagrangian variables.
enum class Branch { Minus, Plus };

/// The two positive Lagrangian speed magnitudes of the heat-conducting system.
enum class LagrangianMode { Slow, Fast };

struct ModeReport {
  double lambda{0.0};
  std::optional<double> mu;   ///< u - lambda, Eulerian kinds only
  Vec r;                      ///< empty when only speeds were requested
  std::optional<double> gnl;  ///< r . grad(lambda)
  ModeLabel label{ModeLabel::Contact};
};

// ---------------------------------------------------------------------------
// E4 closed forms

/// Speeds u -/+ |mu| and the double contact speed u, ascending.
/// mu^2 = R theta + theta/(eps rho^2) + (R^2 rho^2 theta + 2 R rho sigma + sigma^2/theta)/(rho^2 c).
std::vector<ModeReport> speeds_E4(const FluidParams& params, const StateE4& state);

/// Eigenvector (eps rho^2/theta, -eps rho mu/theta, eps R rho/c, 1) at an
/// equilibrium (sigma == 0). Throws PreconditionError otherwise.
ModeReport eigvec_E4_equilibrium(const FluidParams& params, const StateE4& state, Branch branch);

/// Genuine-nonlinearity coefficient of the acoustic pair at equilibrium.
struct GnlE4 {
  double gnl;          ///< r . grad(lambda)
  double scaled;       ///< -2 mu (r . grad(lambda)), branch independent
  double lower_bound;  ///< -2/rho + 2 eps (rho/theta) mu^2; scaled must exceed it
};

GnlE4 gnl_E4(const FluidParams& params, const StateE4& state, Branch branch);

/// Isothermal eigenvector (eps rho^2, -eps rho mu, 1), mu^2 = R + 1/(eps rho^2).
ModeReport eigvec_E3_equilibrium(const FluidParams& params, const StateE3& state, Branch branch);

// ---------------------------------------------------------------------------
// Generic pencil spectrum

struct EigenPair {
  double lambda;
  Vec r;  ///< unit Euclidean norm
};

/// Real eigenpairs of (A1, A0), ascending in lambda. Throws HyperbolicityLoss
/// when an eigenvalue has imaginary part above imag_tol * max(1, |lambda|).
std::vector<EigenPair> speeds_generic(const QuasilinearSystem& sys, const Vec& v, double imag_tol = 1e-9);

// ---------------------------------------------------------------------------
// Lagrangian heat-conducting system at equilibrium

/// Nonlinearity coefficient decomposition at equilibrium:
///   N = a_tau  lambda (lambda^2 - lt)
///     + a_theta lambda^3 (lambda^2 - ls)(lambda^2 - lh)
///     + a_sigma lambda^3
///     + a_q    lambda (lambda^2 - ls)^2
/// with lt = lam_tau_sq, ls = lam_star_sq, lh = lam_theta_sq. N is the
/// derivative of det(-lambda A0 + A1) along the kernel vector of
/// eigvec_L5_equilibrium, lambda held fixed.
struct Pi0Report {
  double lam_star_sq{};   ///< -p_tau + theta/eps
  double lam_2star_sq{};  ///< lam_star_sq + theta p_theta^2 / e_theta
  double lam_tau_sq{};    ///< theta^2 / (delta (R + c))
  double lam_theta_sq{};  ///< 2 R theta (R + c)/(3 c tau^2) + 2 theta/(3 eps) + theta^2/(3 c delta)
  double root_slow{};     ///< lambda_-^2
  double root_fast{};     ///< lambda_+^2
  struct Alphas {
    double tau{};
    double theta{};
    double sigma{};
    double q{};
  } alpha;
  double N_fast{};  ///< N at lambda = +sqrt(root_fast)
  double N_slow{};  ///< N at lambda = +sqrt(root_slow)
  /// 0 < root_slow < lam_star_sq < lam_2star_sq < root_fast
  bool ordering_holds{};
  /// lam_tau_sq < root_fast and lam_theta_sq <= root_fast: every term of N
  /// is then nonnegative at the fast speed, so N_fast > 0.
  bool fast_certified{};
};

/// Value of the quadratic e_theta (delta/theta^2) X (X - lam_2star_sq) - (X - lam_star_sq).
double pi0_value(const FluidParams& params, double tau, double theta, double x);

Pi0Report pi0_report(const FluidParams& params, double tau, double theta);

/// N from the decomposition above, for any lambda (not only roots).
double nonlinearity_N(const Pi0Report& report, double lambda);

/// Kernel vector of the equilibrium pencil at a nonzero Lagrangian speed.
Vec eigvec_L5_equilibrium(const FluidParams& params, double tau, double theta, double lambda);

/// N for the chosen mode and branch; odd in lambda.
double gnl_L5(const FluidParams& params, double tau, double theta, LagrangianMode mode, Branch branch);

/// Full report for one Lagrangian mode: speed, kernel vector and
/// r . grad(lambda) = -N / (d Pi / d lambda).
ModeReport mode_L5(const FluidParams& params, double tau, double theta, LagrangianMode mode, Branch branch);

/// Eulerian heat-conducting mode obtained from the Lagrangian one:
/// lambda = u + tau lambda_L, r_rho = -rho^2 r_tau, other components unchanged.
ModeReport eigvec_E5_equilibrium(const FluidParams& params, const StateE5& state, LagrangianMode mode,
                                 Branch branch);

/// Dispatches to the closed-form eigenvector of `kind` at the equilibrium `v`.
ModeReport equilibrium_mode(SystemKind kind, const FluidParams& params, const Vec& v, ModeLabel label);

// ---------------------------------------------------------------------------
// Small-tau condition

/// lambda_tau^2 = theta^2/(delta (R + c)) and lambda_theta^2 = theta^2/(delta c) + 2 theta/eps,
/// the two thresholds that are compared against lambda_*^2(tau).
struct SmallTauThresholds {
  double lam_tau_sq;
  double lam_theta_sq;
};

SmallTauThresholds small_tau_thresholds(const FluidParams& params, double theta);
bool small_tau_condition(const FluidParams& params, double tau, double theta);

/// Largest tau with max(thresholds) < R theta/tau^2 + theta/eps; +inf when the
/// condition holds for every tau.
double find_tau_threshold(const FluidParams& params, double theta);
/// Same quantity by bracketing and bisection on small_tau_condition.
double find_tau_threshold_bisect(const FluidParams& params, double theta, double rel_tol = 1e-15);

// ---------------------------------------------------------------------------
// Degeneracy scan

struct ScanPoint {
  double tau;
  double theta;
  double lambda;
  double N;
  int sign;
};

enum class ScanAxis { Tau, Theta };

struct Crossing {
  ScanAxis axis;  ///< coordinate that was refined
  double fixed;   ///< value of the other coordinate
  double lo;
  double hi;
  double root;
};

struct DegeneracyScan {
  int n_tau{0};
  int n_theta{0};
  std::vector<ScanPoint> points;  ///< theta-major: index = j * n_tau + i
  std::vector<Crossing> crossings;
};

/// Evaluates gnl_L5 on the tensor grid taus x thetas and brackets sign
/// changes along both axes, refined by bisection to `tol`.
DegeneracyScan degeneracy_scan(const FluidParams& params, std::span<const double> taus,
                               std::span<const double> thetas, LagrangianMode mode, Branch branch,
                               int threads = 0, double tol = 1e-8);

}  // namespace ruggeri
