#include <cmath>

#include "doctest.h"
#include "reference.hpp"
#include "ruggeri/errors.hpp"
#include "ruggeri/models.hpp"
#include "sampling.hpp"

using namespace ruggeri;

namespace {

constexpr SystemKind kAllKinds[] = {SystemKind::E3, SystemKind::E4, SystemKind::E5, SystemKind::L5};

FluidParams heat_params() { return {1.0, 1.5, 1.0, 1.0, 1.0, 1.0}; }

}  // namespace

TEST_CASE("kind names round-trip and dimensions match") {
  for (auto k : kAllKinds) {
    CHECK(parse_kind(to_string(k)) == k);
    CHECK(static_cast<int>(variable_names(k).size()) == dimension(k));
  }
  CHECK(parse_kind("E4") == SystemKind::E4);
  CHECK_THROWS_AS(parse_kind("e6"), ConfigError);
  CHECK(is_eulerian(SystemKind::E5));
  CHECK_FALSE(is_eulerian(SystemKind::L5));
}

TEST_CASE("parameter validation") {
  FluidParams p;
  CHECK_NOTHROW(validate(p, SystemKind::E4));
  CHECK_THROWS_AS(validate(p, SystemKind::E5), ConfigError);  // delta = chi = 0
  p.eps = 0.0;
  CHECK_THROWS_AS(validate(p, SystemKind::E3), ConfigError);
  FluidParams q = heat_params();
  q.R = std::nan("");
  CHECK_THROWS_AS(build_system(SystemKind::L5, q), ConfigError);
}

TEST_CASE("equation of state") {
  const FluidParams p = heat_params();
  const EosPoint e = eos(p, 2.0, 3.0);
  CHECK(e.p == doctest::Approx(6.0));
  CHECK(e.e == doctest::Approx(4.5));
  CHECK(e.p_rho == doctest::Approx(3.0));
  CHECK(e.p_theta == doctest::Approx(2.0));
  const EosLagrangianPoint l = eos_lagrangian(p, 0.5, 1.0);
  CHECK(l.p == doctest::Approx(2.0));
  CHECK(l.p_tau == doctest::Approx(-4.0));
  CHECK(l.p_theta == doctest::Approx(2.0));
  CHECK_THROWS_AS(eos(p, 0.0, 1.0), DomainError);
  CHECK_THROWS_AS(eos_lagrangian(p, 1.0, -1.0), DomainError);
}

TEST_CASE("A0 and A1 are the Jacobians of the conserved vector and the flux") {
  ref::Sampler s(11);
  for (auto kind : kAllKinds) {
    for (int trial = 0; trial < 50; ++trial) {
      const FluidParams p = s.params();
      const auto sys = build_system(kind, p);
      const Vec v = s.state(kind, false);
      const Mat j0 = ref::fd_jacobian([&](const Vec& w) { return sys.to_conserved(w); }, v);
      const Mat j1 = ref::fd_jacobian([&](const Vec& w) { return sys.flux(w); }, v);
      const Mat a0 = sys.A0(v);
      const Mat a1 = sys.A1(v);
      CHECK((j0 - a0).norm() <= 1e-6 * (1.0 + a0.norm()));
      CHECK((j1 - a1).norm() <= 1e-6 * (1.0 + a1.norm()));
    }
  }
}

TEST_CASE("primitive and conserved variables round-trip") {
  ref::Sampler s(12);
  for (auto kind : kAllKinds) {
    const auto sys = build_system(kind, s.params());
    for (int trial = 0; trial < 100; ++trial) {
      const Vec v = s.state(kind, false);
      const Vec back = sys.to_primitive(sys.to_conserved(v));
      CHECK((back - v).norm() <= 1e-12 * (1.0 + v.norm()));
    }
  }
}

TEST_CASE("conversion rejects states with nonpositive temperature") {
  const auto sys = build_system(SystemKind::E4, {});
  Vec u(4);
  u << 1.0, 0.0, -0.1, 0.0;  // energy below the kinetic part
  try {
    (void)sys.to_primitive(u);
    FAIL("expected ReconstructionError");
  } catch (const ReconstructionError& e) {
    CHECK(e.offending_value() < 0.0);
  }
}

TEST_CASE("pencil determinant of the four-field model matches the printed expansion") {
  ref::Sampler s(13);
  for (int trial = 0; trial < 200; ++trial) {
    const FluidParams p = s.params();
    const auto sys = build_system(SystemKind::E4, p);
    const Vec v = s.state(SystemKind::E4, false);
    const double lambda = s.uniform(-4.0, 4.0);
    const double mu = v(1) - lambda;
    const double det = sys.pencil(v, lambda).determinant();
    const double printed = ref::printed_det_E4(p, v(0), v(2), v(3), mu);
    const double matrix = ref::printed_M_E4(p, v(0), v(2), v(3), mu).determinant();
    const double scale = 1.0 + std::abs(printed);
    CHECK(std::abs(det - printed) <= 1e-9 * scale);
    CHECK(std::abs(matrix - printed) <= 1e-9 * scale);
  }
}

TEST_CASE("Lagrangian pencil determinant matches the printed characteristic matrix") {
  ref::Sampler s(14);
  for (int trial = 0; trial < 200; ++trial) {
    const FluidParams p = s.params();
    const auto sys = build_system(SystemKind::L5, p);
    const Vec v = s.state(SystemKind::L5, false);
    const double lambda = s.uniform(-4.0, 4.0);
    const double det = sys.pencil(v, lambda).determinant();
    const double printed = ref::printed_M_L5(p, v(0), v(2), v(3), v(4), lambda).determinant();
    CHECK(std::abs(det - printed) <= 1e-9 * (1.0 + std::abs(printed)));
  }
}

TEST_CASE("sources vanish exactly at equilibrium") {
  ref::Sampler s(15);
  for (auto kind : kAllKinds) {
    const auto sys = build_system(kind, s.params());
    const Vec v = s.state(kind, true);
    CHECK(sys.is_equilibrium(v));
    CHECK(sys.source(v).norm() == 0.0);
    const Vec w = s.state(kind, false);
    CHECK_FALSE(sys.is_equilibrium(w));
  }
}

TEST_CASE("relaxation sources damp stress and heat flux") {
  const FluidParams p{1.0, 1.5, 2.0, 1.0, 1.0, 4.0};
  const auto sys = build_system(SystemKind::E5, p);
  Vec v(5);
  v << 2.0, 0.0, 1.0, 0.3, 0.2;
  const Vec g = sys.source(v);
  CHECK(g(0) == 0.0);
  CHECK(g(1) == 0.0);
  CHECK(g(2) == 0.0);
  CHECK(g(3) < 0.0);
  CHECK(g(4) < 0.0);
}

TEST_CASE("gradient terms are recorded per kind") {
  CHECK(build_system(SystemKind::E3, {}).gradient_terms().size() == 1);
  CHECK(build_system(SystemKind::E4, {}).gradient_terms().size() == 1);
  const auto t = build_system(SystemKind::E5, heat_params()).gradient_terms();
  REQUIRE(t.size() == 2);
  CHECK(t[0].row == 3);
  CHECK(t[0].variable == 1);
  CHECK(t[1].row == 4);
  CHECK(t[1].variable == 2);
}

TEST_CASE("wrong state size and inadmissible states are rejected") {
  const auto sys = build_system(SystemKind::E4, {});
  Vec small(3);
  small << 1.0, 0.0, 1.0;
  CHECK_THROWS_AS(sys.A0(small), PreconditionError);
  Vec bad(4);
  bad << -1.0, 0.0, 1.0, 0.0;
  CHECK_THROWS_AS(sys.A1(bad), DomainError);
  CHECK_THROWS_AS(sys.check_admissible(bad), DomainError);
}
