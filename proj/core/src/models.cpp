#include "ruggeri/models.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <string>

#include "ruggeri/errors.hpp"
#include "ruggeri/physics.hpp"

namespace ruggeri {

namespace {

constexpr std::array<std::string_view, 3> kNamesE3{"rho", "u", "sigma"};
constexpr std::array<std::string_view, 4> kNamesE4{"rho", "u", "theta", "sigma"};
constexpr std::array<std::string_view, 5> kNamesE5{"rho", "u", "theta", "sigma", "q"};
constexpr std::array<std::string_view, 5> kNamesL5{"tau", "u", "theta", "sigma", "q"};

constexpr std::array<GradientTerm, 1> kGradE3{{{2, 1}}};
constexpr std::array<GradientTerm, 1> kGradE4{{{3, 1}}};
constexpr std::array<GradientTerm, 2> kGradE5{{{3, 1}, {4, 2}}};
constexpr std::array<GradientTerm, 2> kGradL5{{{3, 1}, {4, 2}}};

bool positive(double x) { return x > 0.0 && std::isfinite(x); }

template <int N>
physics::Array<N> to_array(const Vec& v) {
  physics::Array<N> a{};
  for (int i = 0; i < N; ++i) a[i] = v(i);
  return a;
}

template <int N>
Vec to_vec(const physics::Array<N>& a) {
  Vec v(N);
  for (int i = 0; i < N; ++i) v(i) = a[i];
  return v;
}

template <class F>
decltype(auto) dispatch(SystemKind kind, F&& f) {
  switch (kind) {
    case SystemKind::E3: return f(physics::Isothermal3{});
    case SystemKind::E4: return f(physics::Eulerian4{});
    case SystemKind::E5: return f(physics::Eulerian5{});
    case SystemKind::L5: return f(physics::Lagrangian5{});
  }
  throw ConfigError("unknown system kind");
}

}  // namespace

std::string_view to_string(SystemKind kind) {
  switch (kind) {
    case SystemKind::E3: return "e3";
    case SystemKind::E4: return "e4";
    case SystemKind::E5: return "e5";
    case SystemKind::L5: return "l5";
  }
  return "?";
}

SystemKind parse_kind(std::string_view name) {
  std::string lower(name);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  if (lower == "e3") return SystemKind::E3;
  if (lower == "e4") return SystemKind::E4;
  if (lower == "e5") return SystemKind::E5;
  if (lower == "l5") return SystemKind::L5;
  throw ConfigError("unknown system kind '" + std::string(name) + "' (expected e3, e4, e5 or l5)");
}

int dimension(SystemKind kind) {
  switch (kind) {
    case SystemKind::E3: return 3;
    case SystemKind::E4: return 4;
    case SystemKind::E5:
    case SystemKind::L5: return 5;
  }
  return 0;
}

std::span<const std::string_view> variable_names(SystemKind kind) {
  switch (kind) {
    case SystemKind::E3: return kNamesE3;
    case SystemKind::E4: return kNamesE4;
    case SystemKind::E5: return kNamesE5;
    case SystemKind::L5: return kNamesL5;
  }
  return {};
}

bool is_eulerian(SystemKind kind) { return kind != SystemKind::L5; }

void validate(const FluidParams& p, SystemKind kind) {
  if (!positive(p.R)) throw ConfigError("R must be positive");
  if (kind != SystemKind::E3 && !positive(p.c)) throw ConfigError("c must be positive");
  if (!positive(p.eta)) throw ConfigError("eta must be positive");
  if (!positive(p.eps)) throw ConfigError("eps must be positive");
  if (kind == SystemKind::E5 || kind == SystemKind::L5) {
    if (!positive(p.delta)) throw ConfigError("delta must be positive for the heat-conducting system");
    if (!positive(p.chi)) throw ConfigError("chi must be positive for the heat-conducting system");
  }
}

Vec to_vector(const StateE3& s) { return to_vec<3>({s.rho, s.u, s.sigma}); }
Vec to_vector(const StateE4& s) { return to_vec<4>({s.rho, s.u, s.theta, s.sigma}); }
Vec to_vector(const StateE5& s) { return to_vec<5>({s.rho, s.u, s.theta, s.sigma, s.q}); }
Vec to_vector(const StateL5& s) { return to_vec<5>({s.tau, s.u, s.theta, s.sigma, s.q}); }

EosPoint eos(const FluidParams& p, double rho, double theta) {
  if (!positive(rho)) throw DomainError("density must be positive, got " + std::to_string(rho));
  if (!positive(theta)) throw DomainError("temperature must be positive, got " + std::to_string(theta));
  return {p.R * theta * rho, p.c * theta, p.R * theta, p.R * rho, p.c};
}

EosLagrangianPoint eos_lagrangian(const FluidParams& p, double tau, double theta) {
  if (!positive(tau)) throw DomainError("specific volume must be positive, got " + std::to_string(tau));
  if (!positive(theta)) throw DomainError("temperature must be positive, got " + std::to_string(theta));
  return {p.R * theta / tau, p.c * theta, -p.R * theta / (tau * tau), p.R / tau, 0.0, p.c};
}

QuasilinearSystem::QuasilinearSystem(SystemKind kind, const FluidParams& params)
    : kind_(kind), params_(params) {
  validate(params_, kind_);
}

void QuasilinearSystem::check_size(const Vec& v) const {
  if (v.size() != n()) {
    throw PreconditionError("state has " + std::to_string(v.size()) + " components, system " +
                            std::string(to_string(kind_)) + " needs " + std::to_string(n()));
  }
}

void QuasilinearSystem::check_admissible(const Vec& v) const {
  check_size(v);
  const bool ok = dispatch(kind_, [&](auto phys) {
    using P = decltype(phys);
    return P::admissible(to_array<P::n>(v));
  });
  if (!ok) {
    throw DomainError("inadmissible state for " + std::string(to_string(kind_)) +
                      " (density/specific volume and temperature must be positive)");
  }
}

bool QuasilinearSystem::is_equilibrium(const Vec& v) const {
  check_size(v);
  switch (kind_) {
    case SystemKind::E3: return v(2) == 0.0;
    case SystemKind::E4: return v(3) == 0.0;
    case SystemKind::E5:
    case SystemKind::L5: return v(3) == 0.0 && v(4) == 0.0;
  }
  return false;
}

Mat QuasilinearSystem::A0(const Vec& v) const {
  check_admissible(v);
  return dispatch(kind_, [&](auto phys) -> Mat {
    using P = decltype(phys);
    return P::a0(params_, to_array<P::n>(v));
  });
}

Mat QuasilinearSystem::A1(const Vec& v) const {
  check_admissible(v);
  return dispatch(kind_, [&](auto phys) -> Mat {
    using P = decltype(phys);
    return P::a1(params_, to_array<P::n>(v));
  });
}

Mat QuasilinearSystem::pencil(const Vec& v, double lambda) const { return A1(v) - lambda * A0(v); }

Vec QuasilinearSystem::source(const Vec& v) const {
  check_admissible(v);
  return dispatch(kind_, [&](auto phys) {
    using P = decltype(phys);
    return to_vec<P::n>(P::source(params_, to_array<P::n>(v)));
  });
}

Vec QuasilinearSystem::flux(const Vec& v) const {
  check_admissible(v);
  return dispatch(kind_, [&](auto phys) {
    using P = decltype(phys);
    return to_vec<P::n>(P::flux(params_, to_array<P::n>(v)));
  });
}

Vec QuasilinearSystem::to_conserved(const Vec& v) const {
  check_admissible(v);
  return dispatch(kind_, [&](auto phys) {
    using P = decltype(phys);
    return to_vec<P::n>(P::conserved(params_, to_array<P::n>(v)));
  });
}

Vec QuasilinearSystem::to_primitive(const Vec& u) const {
  check_size(u);
  return dispatch(kind_, [&](auto phys) {
    using P = decltype(phys);
    return to_vec<P::n>(P::primitive(params_, to_array<P::n>(u)));
  });
}

std::span<const GradientTerm> QuasilinearSystem::gradient_terms() const {
  switch (kind_) {
    case SystemKind::E3: return kGradE3;
    case SystemKind::E4: return kGradE4;
    case SystemKind::E5: return kGradE5;
    case SystemKind::L5: return kGradL5;
  }
  return {};
}

QuasilinearSystem build_system(SystemKind kind, const FluidParams& params) {
  return QuasilinearSystem(kind, params);
}

}  // namespace ruggeri
