#include "ruggeri/modes.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <sstream>
#include <string>

#include <Eigen/Eigenvalues>

#include "ruggeri/errors.hpp"
#include "ruggeri/parallel.hpp"
#include "ruggeri/physics.hpp"

namespace ruggeri {

namespace {

void require_equilibrium_e4(const StateE4& s) {
  if (s.sigma != 0.0) {
    throw PreconditionError("equilibrium eigenvector requested at sigma = " + std::to_string(s.sigma) +
                            " (must be 0)");
  }
}

double signed_unit(Branch b) { return b == Branch::Plus ? 1.0 : -1.0; }

double mode_root(const Pi0Report& rep, LagrangianMode mode) {
  return mode == LagrangianMode::Fast ? rep.root_fast : rep.root_slow;
}

ModeLabel label_for(LagrangianMode mode, Branch branch) {
  if (mode == LagrangianMode::Fast) return branch == Branch::Plus ? ModeLabel::FastPlus : ModeLabel::FastMinus;
  return branch == Branch::Plus ? ModeLabel::SlowPlus : ModeLabel::SlowMinus;
}

}  // namespace

std::string_view to_string(ModeLabel label) {
  switch (label) {
    case ModeLabel::FastMinus: return "fast-";
    case ModeLabel::SlowMinus: return "slow-";
    case ModeLabel::Contact: return "contact";
    case ModeLabel::SlowPlus: return "slow+";
    case ModeLabel::FastPlus: return "fast+";
  }
  return "?";
}

ModeLabel parse_mode_label(std::string_view name) {
  if (name == "fast+") return ModeLabel::FastPlus;
  if (name == "fast-") return ModeLabel::FastMinus;
  if (name == "slow+") return ModeLabel::SlowPlus;
  if (name == "slow-") return ModeLabel::SlowMinus;
  if (name == "contact") return ModeLabel::Contact;
  throw ConfigError("unknown mode '" + std::string(name) + "' (expected fast+, fast-, slow+, slow- or contact)");
}

// ---------------------------------------------------------------------------
// E4

std::vector<ModeReport> speeds_E4(const FluidParams& params, const StateE4& s) {
  eos(params, s.rho, s.theta);  // domain check
  const double mu_sq = physics::Eulerian4::mu_squared(params, s.rho, s.theta, s.sigma);
  if (!(mu_sq > 0.0)) {
    std::ostringstream os;
    os << "mu^2 = " << mu_sq << " is not positive for an admissible state";
    throw InternalInconsistency(os.str());
  }
  const double mu = std::sqrt(mu_sq);
  std::vector<ModeReport> out(4);
  out[0] = {s.u - mu, mu, {}, {}, ModeLabel::FastMinus};
  out[1] = {s.u, 0.0, {}, 0.0, ModeLabel::Contact};
  out[2] = {s.u, 0.0, {}, 0.0, ModeLabel::Contact};
  out[3] = {s.u + mu, -mu, {}, {}, ModeLabel::FastPlus};
  return out;
}

ModeReport eigvec_E4_equilibrium(const FluidParams& params, const StateE4& s, Branch branch) {
  require_equilibrium_e4(s);
  const auto th = eos(params, s.rho, s.theta);
  const double mu = -signed_unit(branch) * std::sqrt(physics::Eulerian4::mu_squared(params, s.rho, s.theta, 0.0));
  Vec r(4);
  r << params.eps * s.rho * s.rho / s.theta, -params.eps * s.rho * mu / s.theta,
      params.eps * th.p_theta / th.e_theta, 1.0;
  ModeReport rep;
  rep.lambda = s.u - mu;
  rep.mu = mu;
  rep.r = r;
  rep.gnl = gnl_E4(params, s, branch).gnl;
  rep.label = branch == Branch::Plus ? ModeLabel::FastPlus : ModeLabel::FastMinus;
  return rep;
}

GnlE4 gnl_E4(const FluidParams& params, const StateE4& s, Branch branch) {
  require_equilibrium_e4(s);
  eos(params, s.rho, s.theta);
  const double R = params.R;
  const double c = params.c;
  const double eps = params.eps;
  const double rho = s.rho;
  const double theta = s.theta;
  const double mu_sq = physics::Eulerian4::mu_squared(params, rho, theta, 0.0);
  const double mu = -signed_unit(branch) * std::sqrt(mu_sq);

  // Partials of mu^2 at sigma = 0; dlambda/du = 1.
  const double dmu2_drho = -2.0 * theta / (eps * rho * rho * rho);
  const double dmu2_dtheta = R + R * R / c + 1.0 / (eps * rho * rho);
  const double dmu2_dsigma = 2.0 * R / (rho * c);

  const double r_rho = eps * rho * rho / theta;
  const double r_u = -eps * rho * mu / theta;
  const double r_theta = eps * R * rho / c;
  const double r_sigma = 1.0;

  const double scaled = dmu2_drho * r_rho - 2.0 * mu * r_u + dmu2_dtheta * r_theta + dmu2_dsigma * r_sigma;
  return {scaled / (-2.0 * mu), scaled, -2.0 / rho + 2.0 * eps * (rho / theta) * mu_sq};
}

ModeReport eigvec_E3_equilibrium(const FluidParams& params, const StateE3& s, Branch branch) {
  if (!(s.rho > 0.0)) throw DomainError("density must be positive, got " + std::to_string(s.rho));
  if (s.sigma != 0.0) throw PreconditionError("equilibrium eigenvector requested at sigma != 0");
  const double mu = -signed_unit(branch) * std::sqrt(params.R + 1.0 / (params.eps * s.rho * s.rho));
  Vec r(3);
  r << params.eps * s.rho * s.rho, -params.eps * s.rho * mu, 1.0;
  ModeReport rep;
  rep.lambda = s.u - mu;
  rep.mu = mu;
  rep.r = r;
  // lambda = u - mu(rho): dlambda/drho = 1/(eps rho^3 mu), dlambda/du = 1.
  rep.gnl = r(0) / (params.eps * s.rho * s.rho * s.rho * mu) + r(1);
  rep.label = branch == Branch::Plus ? ModeLabel::FastPlus : ModeLabel::FastMinus;
  return rep;
}

// ---------------------------------------------------------------------------
// Generic spectrum

std::vector<EigenPair> speeds_generic(const QuasilinearSystem& sys, const Vec& v, double imag_tol) {
  const Mat a0 = sys.A0(v);
  const Mat a1 = sys.A1(v);
  Eigen::PartialPivLU<Mat> lu(a0);
  if (!(std::abs(lu.determinant()) > 0.0)) throw PreconditionError("A0 is singular at the requested state");
  const Mat m = lu.solve(a1);
  Eigen::EigenSolver<Mat> es(m, true);
  if (es.info() != Eigen::Success) throw InternalInconsistency("eigensolver did not converge");

  const auto& vals = es.eigenvalues();
  const auto& vecs = es.eigenvectors();
  std::vector<EigenPair> out;
  out.reserve(static_cast<std::size_t>(vals.size()));
  for (Eigen::Index i = 0; i < vals.size(); ++i) {
    const std::complex<double> z = vals(i);
    if (std::abs(z.imag()) > imag_tol * std::max(1.0, std::abs(z.real()))) {
      std::ostringstream os;
      os.precision(17);
      os << "loss of hyperbolicity for " << to_string(sys.kind()) << " at V = (" << v.transpose()
         << "); spectrum:";
      for (Eigen::Index k = 0; k < vals.size(); ++k) os << ' ' << vals(k);
      throw HyperbolicityLoss(os.str());
    }
    Vec r = vecs.col(i).real();
    const double nrm = r.norm();
    if (nrm > 0.0) r /= nrm;
    out.push_back({z.real(), r});
  }
  std::sort(out.begin(), out.end(), [](const EigenPair& a, const EigenPair& b) { return a.lambda < b.lambda; });
  return out;
}

// ---------------------------------------------------------------------------
// Lagrangian

double pi0_value(const FluidParams& params, double tau, double theta, double x) {
  const auto th = eos_lagrangian(params, tau, theta);
  const double lam_star = -th.p_tau + theta / params.eps;
  const double lam_2star = lam_star + theta * th.p_theta * th.p_theta / th.e_theta;
  return th.e_theta * params.delta / (theta * theta) * x * (x - lam_2star) - (x - lam_star);
}

Pi0Report pi0_report(const FluidParams& params, double tau, double theta) {
  validate(params, SystemKind::L5);
  const auto th = eos_lagrangian(params, tau, theta);
  const double R = params.R;
  const double c = params.c;
  const double eps = params.eps;
  const double delta = params.delta;

  Pi0Report rep;
  rep.lam_star_sq = -th.p_tau + theta / eps;
  rep.lam_2star_sq = rep.lam_star_sq + theta * th.p_theta * th.p_theta / th.e_theta;
  rep.lam_tau_sq = theta * theta / (delta * (R + c));
  rep.lam_theta_sq = 2.0 * R * theta * (R + c) / (3.0 * c * tau * tau) + 2.0 * theta / (3.0 * eps) +
                     theta * theta / (3.0 * c * delta);

  // a X^2 + b X + c0 = 0
  const double a = th.e_theta * delta / (theta * theta);
  const double b = -a * rep.lam_2star_sq - 1.0;
  const double c0 = rep.lam_star_sq;
  const double disc = b * b - 4.0 * a * c0;
  if (!(disc > 0.0)) {
    std::ostringstream os;
    os << "speed polynomial discriminant " << disc << " <= 0 at tau=" << tau << ", theta=" << theta;
    throw InternalInconsistency(os.str());
  }
  const double big = (-b + std::sqrt(disc)) / (2.0 * a);
  rep.root_fast = big;
  rep.root_slow = c0 / (a * big);

  const double th2 = theta * theta;
  const double th3 = th2 * theta;
  rep.alpha.tau = 2.0 * eps * eps * delta * R * (R + c) / (tau * tau * tau * th3);
  rep.alpha.theta = 3.0 * eps * eps * delta * c * tau / (R * th2 * th3);
  rep.alpha.sigma = 2.0 * eps * delta * R / (tau * th3);
  rep.alpha.q = 2.0 * eps * eps * tau / (R * th3);

  rep.N_fast = nonlinearity_N(rep, std::sqrt(rep.root_fast));
  rep.N_slow = nonlinearity_N(rep, std::sqrt(rep.root_slow));
  rep.ordering_holds = 0.0 < rep.root_slow && rep.root_slow < rep.lam_star_sq &&
                       rep.lam_star_sq < rep.lam_2star_sq && rep.lam_2star_sq < rep.root_fast;
  rep.fast_certified = rep.lam_tau_sq < rep.root_fast && rep.lam_theta_sq <= rep.root_fast;
  return rep;
}

double nonlinearity_N(const Pi0Report& rep, double lambda) {
  const double l2 = lambda * lambda;
  const double l3 = l2 * lambda;
  const double ds = l2 - rep.lam_star_sq;
  return rep.alpha.tau * lambda * (l2 - rep.lam_tau_sq) + rep.alpha.theta * l3 * ds * (l2 - rep.lam_theta_sq) +
         rep.alpha.sigma * l3 + rep.alpha.q * lambda * ds * ds;
}

Vec eigvec_L5_equilibrium(const FluidParams& params, double tau, double theta, double lambda) {
  if (lambda == 0.0) throw PreconditionError("kernel vector requested at lambda = 0 (contact mode)");
  validate(params, SystemKind::L5);
  const auto th = eos_lagrangian(params, tau, theta);
  const double eps = params.eps;
  const double lam_star = -th.p_tau + theta / eps;
  const double d = lambda * lambda - lam_star;
  Vec r(5);
  r << -eps / theta, eps / theta * lambda, eps / (theta * th.p_theta) * d, 1.0,
      eps * theta / (params.delta * th.p_theta) * d / lambda;
  return r;
}

double gnl_L5(const FluidParams& params, double tau, double theta, LagrangianMode mode, Branch branch) {
  const Pi0Report rep = pi0_report(params, tau, theta);
  return nonlinearity_N(rep, signed_unit(branch) * std::sqrt(mode_root(rep, mode)));
}

ModeReport mode_L5(const FluidParams& params, double tau, double theta, LagrangianMode mode, Branch branch) {
  const Pi0Report rep = pi0_report(params, tau, theta);
  const double x = mode_root(rep, mode);
  const double lambda = signed_unit(branch) * std::sqrt(x);
  // Pi(lambda) = -(eps/theta) lambda pi0(lambda^2), so at a root
  // dPi/dlambda = -(2 eps/theta) lambda^2 pi0'(lambda^2).
  const double a = params.c * params.delta / (theta * theta);
  const double dpi0 = a * (2.0 * x - rep.lam_2star_sq) - 1.0;
  const double dPi = -2.0 * params.eps / theta * x * dpi0;

  ModeReport out;
  out.lambda = lambda;
  out.r = eigvec_L5_equilibrium(params, tau, theta, lambda);
  out.gnl = -nonlinearity_N(rep, lambda) / dPi;
  out.label = label_for(mode, branch);
  return out;
}

ModeReport eigvec_E5_equilibrium(const FluidParams& params, const StateE5& s, LagrangianMode mode,
                                 Branch branch) {
  if (s.sigma != 0.0 || s.q != 0.0) throw PreconditionError("equilibrium eigenvector requested at sigma/q != 0");
  eos(params, s.rho, s.theta);
  const double tau = 1.0 / s.rho;
  const ModeReport lag = mode_L5(params, tau, s.theta, mode, branch);
  ModeReport out;
  out.lambda = s.u + tau * lag.lambda;
  out.mu = s.u - out.lambda;
  out.r = lag.r;
  out.r(0) = -s.rho * s.rho * lag.r(0);
  // lambda_E = u + tau lambda_L(tau, theta, sigma, q), differentiated along r.
  out.gnl = lag.r(1) + lag.lambda * lag.r(0) + tau * *lag.gnl;
  out.label = lag.label;
  return out;
}

ModeReport equilibrium_mode(SystemKind kind, const FluidParams& params, const Vec& v, ModeLabel label) {
  if (label == ModeLabel::Contact) throw ConfigError("contact modes carry no closed-form seed eigenvector");
  const Branch branch = (label == ModeLabel::FastPlus || label == ModeLabel::SlowPlus) ? Branch::Plus : Branch::Minus;
  const bool slow = label == ModeLabel::SlowPlus || label == ModeLabel::SlowMinus;
  if (v.size() != dimension(kind)) throw PreconditionError("state size does not match system kind");
  switch (kind) {
    case SystemKind::E3:
      if (slow) throw ConfigError("the isothermal system has no slow mode");
      return eigvec_E3_equilibrium(params, {v(0), v(1), v(2)}, branch);
    case SystemKind::E4:
      if (slow) throw ConfigError("the E4 system has no slow mode");
      return eigvec_E4_equilibrium(params, {v(0), v(1), v(2), v(3)}, branch);
    case SystemKind::E5:
      return eigvec_E5_equilibrium(params, {v(0), v(1), v(2), v(3), v(4)},
                                   slow ? LagrangianMode::Slow : LagrangianMode::Fast, branch);
    case SystemKind::L5: {
      if (v(3) != 0.0 || v(4) != 0.0) throw PreconditionError("equilibrium eigenvector requested at sigma/q != 0");
      return mode_L5(params, v(0), v(2), slow ? LagrangianMode::Slow : LagrangianMode::Fast, branch);
    }
  }
  throw ConfigError("unknown system kind");
}

// ---------------------------------------------------------------------------
// Small-tau condition

SmallTauThresholds small_tau_thresholds(const FluidParams& params, double theta) {
  validate(params, SystemKind::L5);
  if (!(theta > 0.0)) throw DomainError("temperature must be positive");
  return {theta * theta / (params.delta * (params.R + params.c)),
          theta * theta / (params.delta * params.c) + 2.0 * theta / params.eps};
}

bool small_tau_condition(const FluidParams& params, double tau, double theta) {
  const auto t = small_tau_thresholds(params, theta);
  const double lam_star = params.R * theta / (tau * tau) + theta / params.eps;
  return std::max(t.lam_tau_sq, t.lam_theta_sq) < lam_star;
}

double find_tau_threshold(const FluidParams& params, double theta) {
  const auto t = small_tau_thresholds(params, theta);
  const double denom = std::max(t.lam_tau_sq, t.lam_theta_sq) - theta / params.eps;
  if (!(denom > 0.0)) return std::numeric_limits<double>::infinity();
  return std::sqrt(params.R * theta / denom);
}

double find_tau_threshold_bisect(const FluidParams& params, double theta, double rel_tol) {
  double lo = 1e-6;
  while (!small_tau_condition(params, lo, theta)) {
    lo *= 1e-3;
    if (lo < 1e-300) return 0.0;
  }
  double hi = std::max(1.0, 2.0 * lo);
  while (small_tau_condition(params, hi, theta)) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e150) return std::numeric_limits<double>::infinity();
  }
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (small_tau_condition(params, mid, theta) ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// ---------------------------------------------------------------------------
// Degeneracy scan

namespace {

int sign_of(double x) { return (x > 0.0) - (x < 0.0); }

double bisect_root(const std::function<double(double)>& f, double lo, double hi, double tol) {
  double flo = f(lo);
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if (sign_of(fm) == sign_of(flo)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

DegeneracyScan degeneracy_scan(const FluidParams& params, std::span<const double> taus,
                               std::span<const double> thetas, LagrangianMode mode, Branch branch, int threads,
                               double tol) {
  validate(params, SystemKind::L5);
  DegeneracyScan scan;
  scan.n_tau = static_cast<int>(taus.size());
  scan.n_theta = static_cast<int>(thetas.size());
  const std::size_t total = taus.size() * thetas.size();
  scan.points.resize(total);
  if (total == 0) return scan;

  parallel_for(
      total,
      [&](std::size_t k) {
        const std::size_t i = k % taus.size();
        const std::size_t j = k / taus.size();
        const double tau = taus[i];
        const double theta = thetas[j];
        const Pi0Report rep = pi0_report(params, tau, theta);
        const double lambda = signed_unit(branch) * std::sqrt(mode_root(rep, mode));
        const double n = nonlinearity_N(rep, lambda);
        scan.points[k] = {tau, theta, lambda, n, sign_of(n)};
      },
      threads);

  auto N_at = [&](double tau, double theta) { return gnl_L5(params, tau, theta, mode, branch); };
  const auto nt = taus.size();
  for (std::size_t j = 0; j < thetas.size(); ++j) {
    for (std::size_t i = 0; i + 1 < nt; ++i) {
      const auto& a = scan.points[j * nt + i];
      const auto& b = scan.points[j * nt + i + 1];
      if (a.sign != b.sign) {
        const double theta = thetas[j];
        const double root =
            bisect_root([&](double t) { return N_at(t, theta); }, std::min(a.tau, b.tau), std::max(a.tau, b.tau), tol);
        scan.crossings.push_back({ScanAxis::Tau, theta, a.tau, b.tau, root});
      }
    }
  }
  for (std::size_t i = 0; i < nt; ++i) {
    for (std::size_t j = 0; j + 1 < thetas.size(); ++j) {
      const auto& a = scan.points[j * nt + i];
      const auto& b = scan.points[(j + 1) * nt + i];
      if (a.sign != b.sign) {
        const double tau = taus[i];
        const double root = bisect_root([&](double th) { return N_at(tau, th); }, std::min(a.theta, b.theta),
                                        std::max(a.theta, b.theta), tol);
        scan.crossings.push_back({ScanAxis::Theta, tau, a.theta, b.theta, root});
      }
    }
  }
  return scan;
}

}  // namespace ruggeri
