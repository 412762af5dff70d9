#pragma once

#include <array>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace ruggeri {

/// Small dense vector/matrix with at most five rows; never heap-allocates.
using Vec = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, 5, 1>;
using Mat = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, 5, 5>;

/// The four system variants.
///  E3: isothermal Eulerian (rho, u, sigma)
///  E4: Eulerian without heat conduction (rho, u, theta, sigma)
///  E5: Eulerian with heat conduction (rho, u, theta, sigma, q)
///  L5: Lagrangian heat-conducting system (tau, u, theta, sigma, q), tau = 1/rho
enum class SystemKind { E3, E4, E5, L5 };

std::string_view to_string(SystemKind kind);
/// Accepts "e3", "e4", "e5", "l5" (case-insensitive). Throws ConfigError.
SystemKind parse_kind(std::string_view name);
int dimension(SystemKind kind);
std::span<const std::string_view> variable_names(SystemKind kind);
bool is_eulerian(SystemKind kind);

/// Ideal-gas constants and relaxation coefficients. Pressure is R*theta*rho and
/// internal energy c*theta. delta and chi are only read by the heat-conducting
/// systems and may stay zero otherwise.
struct FluidParams {
  double R{1.0};
  double c{1.5};
  double eta{1.0};
  double eps{1.0};
  double delta{0.0};
  double chi{0.0};
};

/// Throws ConfigError if `params` does not satisfy the requirements of `kind`.
void validate(const FluidParams& params, SystemKind kind);

struct StateE3 {
  double rho{1.0};
  double u{0.0};
  double sigma{0.0};
};

struct StateE4 {
  double rho{1.0};
  double u{0.0};
  double theta{1.0};
  double sigma{0.0};
};

struct StateE5 {
  double rho{1.0};
  double u{0.0};
  double theta{1.0};
  double sigma{0.0};
  double q{0.0};
};

struct StateL5 {
  double tau{1.0};
  double u{0.0};
  double theta{1.0};
  double sigma{0.0};
  double q{0.0};
};

Vec to_vector(const StateE3& s);
Vec to_vector(const StateE4& s);
Vec to_vector(const StateE5& s);
Vec to_vector(const StateL5& s);

/// Eulerian equation of state and its exact partials.
struct EosPoint {
  double p;
  double e;
  double p_rho;
  double p_theta;
  double e_theta;
};

/// Lagrangian equation of state, p = R*theta/tau.
struct EosLagrangianPoint {
  double p;
  double e;
  double p_tau;
  double p_theta;
  double e_tau;
  double e_theta;
};

EosPoint eos(const FluidParams& params, double rho, double theta);
EosLagrangianPoint eos_lagrangian(const FluidParams& params, double tau, double theta);

/// A bare first-derivative term (u_x in the stress equation, theta_x in the
/// heat-flux equation). The solver treats it as part of the flux of `row`.
struct GradientTerm {
  int row;
  int variable;
};

/// Quasilinear form A0(V) V_t + A1(V) V_x = G(V) of one system, together with
/// the conservative form U_t + F(U)_x = G that it is derived from.
/// A0 = dU/dV and A1 = dF/dV, so det(-lambda A0 + A1) vanishes exactly at the
/// characteristic speeds.
class QuasilinearSystem {
 public:
  QuasilinearSystem(SystemKind kind, const FluidParams& params);

  SystemKind kind() const noexcept { return kind_; }
  const FluidParams& params() const noexcept { return params_; }
  int n() const noexcept { return dimension(kind_); }

  Mat A0(const Vec& v) const;
  Mat A1(const Vec& v) const;
  /// -lambda A0 + A1.
  Mat pencil(const Vec& v, double lambda) const;
  Vec source(const Vec& v) const;
  Vec flux(const Vec& v) const;

  Vec to_conserved(const Vec& v) const;
  /// Throws ReconstructionError when the implied rho/tau or theta is not positive.
  Vec to_primitive(const Vec& u) const;

  std::span<const GradientTerm> gradient_terms() const;

  /// Throws DomainError unless rho (tau) and theta are positive and finite.
  void check_admissible(const Vec& v) const;
  /// True when the relaxation variables (sigma, and q where present) vanish.
  bool is_equilibrium(const Vec& v) const;

 private:
  void check_size(const Vec& v) const;

  SystemKind kind_;
  FluidParams params_;
};

/// Validates `params` for `kind` and returns the system.
QuasilinearSystem build_system(SystemKind kind, const FluidParams& params);

}  // namespace ruggeri
