#include <cmath>
#include <string>

#include "doctest.h"
#include "ruggeri/errors.hpp"
#include "ruggeri/sim1d.hpp"
#include "studies.hpp"

using namespace ruggeri;

namespace {

RunConfig e4_config(double amplitude, int n_cells = 256) {
  RunConfig c;
  c.kind = SystemKind::E4;
  c.params = {1.0, 1.5, 10.0, 1.0, 0.0, 0.0};
  c.reference = to_vector(StateE4{1.0, 0.0, 1.0, 0.0});
  c.perturbation = {amplitude, 1.0, {}};
  c.grid = {n_cells, 0.0, 4.0};
  c.t_end = 0.5;
  c.snapshot_count = 4;
  return c;
}

RunConfig config_for(SystemKind kind) {
  RunConfig c = e4_config(0.05, 64);
  c.kind = kind;
  switch (kind) {
    case SystemKind::E3: c.reference = to_vector(StateE3{1.0, 0.2, 0.0}); break;
    case SystemKind::E4: c.reference = to_vector(StateE4{1.0, 0.2, 1.0, 0.0}); break;
    case SystemKind::E5:
      c.params = {1.0, 1.5, 10.0, 1.0, 1.0, 1.0};
      c.reference = to_vector(StateE5{2.0, 0.2, 1.0, 0.0, 0.0});
      break;
    case SystemKind::L5: break;
  }
  return c;
}

double max_abs_diff(const FieldSet& a, const FieldSet& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.prim.size(); ++i) m = std::max(m, std::abs(a.prim[i] - b.prim[i]));
  return m;
}

}  // namespace

TEST_CASE("bump profile") {
  CHECK(bump(0.0) == 1.0);
  CHECK(bump(1.0) == 0.0);
  CHECK(bump(-1.5) == 0.0);
  CHECK(bump(0.5) == doctest::Approx(std::exp(1.0 - 1.0 / 0.75)));
  // Flat to machine precision near the edge.
  CHECK(bump(0.98) < 1e-10);
  CHECK(bump(0.995) < 1e-40);
}

TEST_CASE("grid validation") {
  CHECK_THROWS_AS((Grid1D{8, 0.0, 1.0}.validate()), ConfigError);
  CHECK_THROWS_AS((Grid1D{32, 1.0, 1.0}.validate()), ConfigError);
  CHECK(Grid1D{16, 0.0, 2.0}.dx() == 0.125);
}

TEST_CASE("limiter names") {
  CHECK(parse_limiter("mc") == Limiter::MonotonizedCentral);
  CHECK(to_string(Limiter::None) == "none");
  CHECK_THROWS_AS(parse_limiter("superbee"), ConfigError);
  CHECK(to_string(RunStatus::BlowupDetected) == "blowup_detected");
}

TEST_CASE("initial data follows the fast eigenvector") {
  RunConfig c = e4_config(0.05, 257);
  const FieldSet f = initial_data(c);
  double umax = 0.0;
  for (int i = 0; i < c.grid.n_cells; ++i) umax = std::max(umax, std::abs(f.cell(i)[1]));
  // 257 cells put one center exactly at the middle of the domain.
  CHECK(umax == doctest::Approx(0.05 * std::sqrt(8.0 / 3.0)).epsilon(1e-12));
  CHECK(f.cell(0)[0] == 1.0);
  CHECK(f.cell(0)[1] == 0.0);
}

TEST_CASE("zero amplitude gives the reference state") {
  const FieldSet f = initial_data(e4_config(0.0));
  for (int i = 0; i < f.grid.n_cells; ++i) {
    CHECK(f.cell(i)[0] == 1.0);
    CHECK(f.cell(i)[3] == 0.0);
  }
}

TEST_CASE("perturbations outside the ball are rejected") {
  RunConfig c = e4_config(0.4);  // 0.4 * |r|_inf = 0.65 > 0.5
  try {
    (void)initial_data(c);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("perturbation exceeds ball radius") != std::string::npos);
  }
}

TEST_CASE("run settings are validated") {
  RunConfig c = e4_config(0.05);
  c.reference = to_vector(StateE4{1.0, 0.0, 1.0, 0.1});
  CHECK_THROWS_AS(run(c), ConfigError);
  c = e4_config(0.05);
  c.cfl = 1.5;
  CHECK_THROWS_AS(run(c), ConfigError);
  c = e4_config(0.05);
  c.kind = SystemKind::L5;
  CHECK_THROWS_AS(run(c), ConfigError);
}

TEST_CASE("equilibrium is a fixed point of one step") {
  for (auto kind : {SystemKind::E3, SystemKind::E4, SystemKind::E5}) {
    RunConfig c = config_for(kind);
    c.perturbation.amplitude = 0.0;
    const auto sys = build_system(kind, c.params);
    const FieldSet f0 = initial_data(c);
    FieldSet f = f0;
    for (int n = 0; n < 20; ++n) {
      const FieldSet g = step(f, sys, stable_dt(f, sys, 0.4));
      CHECK(max_abs_diff(g, f) <= 1e-14);
      f = g;
    }
    CHECK(max_abs_diff(f, f0) <= 20 * 1e-14);
  }
}

TEST_CASE("one step conserves mass, momentum and energy") {
  for (auto kind : {SystemKind::E3, SystemKind::E4, SystemKind::E5}) {
    RunConfig c = config_for(kind);
    const auto sys = build_system(kind, c.params);
    const FieldSet f = initial_data(c);
    const auto before = conserved_totals(f, sys);
    const FieldSet g = step(f, sys, stable_dt(f, sys, 0.4));
    const auto after = conserved_totals(g, sys);
    for (int k = 0; k < 3; ++k) {
      if (kind == SystemKind::E3 && k == 2) {
        CHECK(std::isnan(after[2]));
        continue;
      }
      CHECK(std::abs(after[k] - before[k]) <= 1e-14 * std::max(1.0, std::abs(before[k])));
    }
  }
}

TEST_CASE("time step respects the relaxation time") {
  RunConfig c = e4_config(0.0, 32);
  c.params.eta = 1e-3;
  const auto sys = build_system(SystemKind::E4, c.params);
  const FieldSet f = initial_data(c);
  CHECK(stable_dt(f, sys, 0.4) == doctest::Approx(0.5 * 1e-3));
  c.params.eta = 1e3;
  const auto loose = build_system(SystemKind::E4, c.params);
  CHECK(stable_dt(f, loose, 0.4) == doctest::Approx(0.4 * c.grid.dx() / std::sqrt(8.0 / 3.0)));
}

TEST_CASE("slopes use centered differences") {
  FieldSet f;
  f.kind = SystemKind::E3;
  f.grid = {16, 0.0, 16.0};
  f.prim.assign(48, 0.0);
  for (int i = 0; i < 16; ++i) {
    f.cell(i)[0] = 1.0;
    f.cell(i)[1] = (i == 5) ? 2.0 : 0.0;
  }
  const auto s = max_slopes(f);
  CHECK(s[0] == doctest::Approx(1.0));
  CHECK(s[1] == doctest::Approx(1.0));
}

TEST_CASE("inadmissible cells are reported with their index") {
  RunConfig c = e4_config(0.0, 32);
  const auto sys = build_system(SystemKind::E4, c.params);
  FieldSet f = initial_data(c);
  f.cell(7)[2] = -1.0;
  try {
    (void)step(f, sys, 1e-3);
    FAIL("expected AdmissibilityViolation");
  } catch (const AdmissibilityViolation& e) {
    CHECK(e.cell() == 7);
  }
}

TEST_CASE("zero-amplitude run stays smooth with flat slopes") {
  RunConfig c = e4_config(0.0, 64);
  const RunResult r = run(c);
  CHECK(r.status == RunStatus::SmoothUntilTEnd);
  CHECK(r.t_end_reached == doctest::Approx(c.t_end));
  for (const auto& row : r.series) {
    CHECK(row.max_slope_u == 0.0);
    CHECK(row.mass == r.series.front().mass);
  }
  CHECK(r.conservation_drift[0] <= 1e-12);
}

TEST_CASE("small runs conserve and keep every series value finite") {
  const RunResult r = run(e4_config(0.1));
  CHECK(r.status == RunStatus::SmoothUntilTEnd);
  CHECK(r.series.size() >= 2);
  CHECK(r.snapshots.size() <= 64);
  CHECK(r.snapshots.front().t == 0.0);
  for (int k = 0; k < 3; ++k) CHECK(r.conservation_drift[k] <= 1e-12);
  for (const auto& row : r.series) {
    CHECK(row.max_slope_u >= 0.0);
    CHECK(row.max_slope_all >= row.max_slope_u);
    CHECK(std::isfinite(row.energy));
  }
}

TEST_CASE("ball exit is detected") {
  // The heat-conducting fast pulse grows in sup norm early on; starting at
  // 96% of the radius it leaves the ball.
  RunConfig c = config_for(SystemKind::E5);
  c.reference = to_vector(StateE5{2.0, 0.0, 1.0, 0.0, 0.0});
  c.perturbation.amplitude = 0.12;
  c.grid = {256, 0.0, 4.0};
  c.t_end = 1.0;
  const RunResult r = run(c);
  CHECK(r.status == RunStatus::BallExit);
  CHECK(r.max_ball_dist > c.ball_radius);
  CHECK(r.t_end_reached < c.t_end);
  c.stop_on_ball_exit = false;
  const RunResult cont = run(c);
  CHECK(cont.status != RunStatus::BallExit);
}

TEST_CASE("amplitude sweep brackets the regimes") {
  // Coarse grids saturate the measured slope early, so the growth factor is
  // lowered to what 512 cells can resolve.
  RunConfig c = e4_config(0.0, 512);
  c.t_end = 2.5;
  c.blowup_slope_factor = 8.0;
  c.snapshot_count = 0;
  const std::vector<double> amps{0.0125, 0.25};
  const SweepReport rep = amplitude_sweep(c, amps, 2);
  REQUIRE(rep.entries.size() == 2);
  CHECK(rep.entries[0].status == RunStatus::SmoothUntilTEnd);
  CHECK(rep.entries[1].status == RunStatus::BlowupDetected);
  CHECK(rep.monotone);
  REQUIRE(rep.bracket.has_value());
  CHECK(rep.bracket->first == 0.0125);
  CHECK(rep.bracket->second == 0.25);

  const std::vector<double> unsorted{0.2, 0.1};
  CHECK_THROWS_AS(amplitude_sweep(c, unsorted), ConfigError);
  const std::vector<double> smooth_only{0.01};
  const SweepReport one = amplitude_sweep(c, smooth_only);
  CHECK(one.entries.size() == 1);
  CHECK_FALSE(one.bracket.has_value());
}

TEST_CASE("unlimited scheme is second order on a smooth pulse") {
  const auto study = ref::smooth_order_study({128, 256, 512}, 4096, 0.25);
  REQUIRE(study.orders.size() == 2);
  CHECK(study.orders.back() >= 1.9);
}

TEST_CASE("boosting the reference shifts the pulse speed by the boost") {
  const double still = ref::measured_pulse_speed(0.0, 512);
  const double moving = ref::measured_pulse_speed(0.3, 512);
  CHECK(still == doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(0.02));
  CHECK(moving - still == doctest::Approx(0.3).epsilon(0.02));
}
