// Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <string>
#include <vector>

#include "reference.hpp"
#include "ruggeri/errors.hpp"
#include "ruggeri/modes.hpp"
#include "ruggeri/oracles.hpp"
#include "ruggeri/sim1d.hpp"
#include "sampling.hpp"
#include "studies.hpp"

using namespace ruggeri;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass;
  std::string detail;
};

std::string num(double x, const char* f = "%.6g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

double speed_err(double closed, double numeric) { return std::abs(closed - numeric) / std::max(1.0, std::abs(numeric)); }

/// Largest mismatch between two ascending speed lists of equal length.
double list_err(const std::vector<double>& closed, const std::vector<double>& numeric) {
  if (closed.size() != numeric.size()) return INFINITY;
  double worst = 0.0;
  for (std::size_t i = 0; i < closed.size(); ++i) worst = std::max(worst, speed_err(closed[i], numeric[i]));
  return worst;
}

const FluidParams kUnit{1.0, 1.5, 10.0, 1.0, 0.0, 0.0};
const FluidParams kHeat{1.0, 1.5, 1.0, 1.0, 1.0, 1.0};

std::vector<double> heat_closed_speeds(const FluidParams& p, double tau, double theta, double shift, double scale) {
  std::vector<double> out{shift};
  for (auto mode : {LagrangianMode::Slow, LagrangianMode::Fast}) {
    for (auto b : {Branch::Minus, Branch::Plus}) out.push_back(shift + scale * mode_L5(p, tau, theta, mode, b).lambda);
  }
  std::sort(out.begin(), out.end());
  return out;
}

// ---------------------------------------------------------------------------

Outcome criterion1() {
  const auto t0 = Clock::now();
  ref::Sampler s(101);
  double worst[4] = {0, 0, 0, 0};
  for (int trial = 0; trial < 1000; ++trial) {
    const FluidParams p = s.params();
    {
      // The isothermal speed does not depend on the stress, so the
      // equilibrium closed form is compared against a stressed state.
      const Vec v = s.state(SystemKind::E3, false);
      const auto sys = build_system(SystemKind::E3, p);
      const auto num = ref::numeric_speeds(sys, v);
      std::vector<double> closed{v(1)};
      for (auto b : {Branch::Minus, Branch::Plus}) closed.push_back(eigvec_E3_equilibrium(p, {v(0), v(1), 0.0}, b).lambda);
      std::sort(closed.begin(), closed.end());
      worst[0] = std::max(worst[0], list_err(closed, num));
    }
    {
      const Vec v = s.state(SystemKind::E4, false);
      const auto sys = build_system(SystemKind::E4, p);
      std::vector<double> closed;
      for (const auto& m : speeds_E4(p, {v(0), v(1), v(2), v(3)})) closed.push_back(m.lambda);
      worst[1] = std::max(worst[1], list_err(closed, ref::numeric_speeds(sys, v)));
    }
    {
      const Vec v = s.state(SystemKind::E5, true);
      const auto sys = build_system(SystemKind::E5, p);
      const double tau = 1.0 / v(0);
      worst[2] = std::max(worst[2], list_err(heat_closed_speeds(p, tau, v(2), v(1), tau), ref::numeric_speeds(sys, v)));
    }
    {
      const Vec v = s.state(SystemKind::L5, true);
      const auto sys = build_system(SystemKind::L5, p);
      worst[3] = std::max(worst[3], list_err(heat_closed_speeds(p, v(0), v(2), 0.0, 1.0), ref::numeric_speeds(sys, v)));
    }
  }
  const double w = *std::max_element(worst, worst + 4);
  return {w <= 1e-9, "max rel err e3=" + num(worst[0]) + " e4=" + num(worst[1]) + " e5=" + num(worst[2]) +
                         " l5=" + num(worst[3]) + " (tol 1e-9, 4x1000 states, " + num(seconds_since(t0), "%.2f") +
                         " s)"};
}

Outcome criterion2() {
  ref::Sampler s(102);
  double worst_e4 = 0.0;
  double worst_l5 = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const FluidParams p = s.params();
    const Vec v = s.state(SystemKind::E4, true);
    const auto sys4 = build_system(SystemKind::E4, p);
    for (auto b : {Branch::Minus, Branch::Plus}) {
      const ModeReport m = eigvec_E4_equilibrium(p, {v(0), v(1), v(2), v(3)}, b);
      worst_e4 = std::max(worst_e4, oracle::pencil_residual(sys4, v, m.lambda, m.r));
    }
    const Vec w = s.state(SystemKind::L5, true);
    const auto sys5 = build_system(SystemKind::L5, p);
    for (auto mode : {LagrangianMode::Slow, LagrangianMode::Fast}) {
      for (auto b : {Branch::Minus, Branch::Plus}) {
        const ModeReport m = mode_L5(p, w(0), w(2), mode, b);
        worst_l5 = std::max(worst_l5, oracle::pencil_residual(sys5, w, m.lambda, m.r));
      }
    }
  }
  return {std::max(worst_e4, worst_l5) <= 1e-9,
          "max ||(-lambda A0 + A1) r||/||r||: e4=" + num(worst_e4) + " l5=" + num(worst_l5) + " over 1000 equilibria"};
}

Outcome criterion3() {
  const GnlE4 g = gnl_E4(kUnit, {1.0, 0.0, 1.0, 0.0}, Branch::Plus);
  const bool exact = std::abs(g.scaled - 58.0 / 9.0) <= 1e-12;

  ref::Sampler s(103);
  double worst_fd = 0.0;
  int violations = 0;
  int checked = 0;
  for (int trial = 0; trial < 1000; ++trial) {
    const FluidParams p = s.params();
    const Vec v = s.state(SystemKind::E4, true);
    const auto sys = build_system(SystemKind::E4, p);
    for (auto b : {Branch::Minus, Branch::Plus}) {
      const StateE4 st{v(0), v(1), v(2), v(3)};
      const ModeReport m = eigvec_E4_equilibrium(p, st, b);
      const GnlE4 lg = gnl_E4(p, st, b);
      const double fd = ref::fd_speed_derivative(sys, v, m.r, m.lambda);
      worst_fd = std::max(worst_fd, ref::rel_err(*m.gnl, fd));
      if (!(lg.scaled > lg.lower_bound && lg.lower_bound > 0.0)) ++violations;
      ++checked;
    }
  }
  // The unit state itself against the oracle.
  const Vec unit = to_vector(StateE4{1.0, 0.0, 1.0, 0.0});
  const ModeReport mu = eigvec_E4_equilibrium(kUnit, {1.0, 0.0, 1.0, 0.0}, Branch::Plus);
  const double fd_unit = oracle::gnl_finite_difference(build_system(SystemKind::E4, kUnit), unit, mu.r, mu.lambda);
  const double unit_err = ref::rel_err(*mu.gnl, fd_unit);
  worst_fd = std::max(worst_fd, unit_err);
  return {exact && worst_fd <= 1e-5 && violations == 0,
          "-2mu(r.grad lambda)=" + num(g.scaled, "%.15g") + " (58/9=" + num(58.0 / 9.0, "%.15g") +
              "), max fd rel err " + num(worst_fd) + " (tol 1e-5), chain violations " + std::to_string(violations) +
              "/" + std::to_string(checked)};
}

Outcome criterion4() {
  const Pi0Report one = pi0_report(kHeat, 1.0, 1.0);
  const Pi0Report half = pi0_report(kHeat, 0.5, 1.0);
  const double root_err = std::max({std::abs(one.root_slow - (5.0 - std::sqrt(13.0)) / 3.0),
                                    std::abs(one.root_fast - (5.0 + std::sqrt(13.0)) / 3.0),
                                    std::abs(half.root_slow - (25.0 - std::sqrt(505.0)) / 6.0),
                                    std::abs(half.root_fast - (25.0 + std::sqrt(505.0)) / 6.0)});

  ref::Sampler s(104);
  int order_fail = 0;
  for (int trial = 0; trial < 10000; ++trial) {
    const FluidParams p = s.params();
    const Pi0Report rep = pi0_report(p, s.log_uniform(0.05, 20.0), s.log_uniform(0.05, 20.0));
    if (!rep.ordering_holds) ++order_fail;
  }

  const double exact = std::sqrt(3.0 / 5.0);
  const double closed = find_tau_threshold(kHeat, 1.0);
  const double bisect = find_tau_threshold_bisect(kHeat, 1.0);
  const double tau_err = std::max(std::abs(closed - exact), std::abs(bisect - exact));

  int n_fail = 0;
  for (int trial = 0; trial < 2000; ++trial) {
    const double tau = s.uniform(1e-3, closed);
    if (!(gnl_L5(kHeat, tau, 1.0, LagrangianMode::Fast, Branch::Plus) > 0.0)) ++n_fail;
  }

  double worst_n = 0.0;
  for (int trial = 0; trial < 500; ++trial) {
    const FluidParams p = s.params();
    const double tau = s.log_uniform(0.2, 3.0);
    const double theta = s.log_uniform(0.3, 3.0);
    const Pi0Report rep = pi0_report(p, tau, theta);
    for (double x : {rep.root_slow, rep.root_fast}) {
      const double lambda = std::sqrt(x);
      const Vec r = eigvec_L5_equilibrium(p, tau, theta, lambda);
      const double fd = ref::fd_det_direction(p, tau, theta, r, lambda, 1e-4 * std::min(tau, theta));
      worst_n = std::max(worst_n, ref::rel_err(nonlinearity_N(rep, lambda), fd));
    }
  }
  const bool pass = root_err <= 1e-12 && order_fail == 0 && tau_err <= 1e-8 && n_fail == 0 && worst_n <= 1e-4;
  return {pass, "root err " + num(root_err) + ", ordering failures " + std::to_string(order_fail) +
                    "/10000, tau_max closed=" + num(closed, "%.10f") + " bisect=" + num(bisect, "%.10f") +
                    ", N_fast<=0 below tau_max " + std::to_string(n_fail) + "/2000, N vs det fd " + num(worst_n) +
                    " (tol 1e-4)"};
}

Outcome criterion5() {
  ref::Sampler s(105);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const FluidParams p = s.params();
    const Vec e = s.state(SystemKind::E5, true);
    const double tau = 1.0 / e(0);
    Vec l(5);
    l << tau, e(1), e(2), 0.0, 0.0;
    const auto eul = ref::numeric_speeds(build_system(SystemKind::E5, p), e);
    auto lag = ref::numeric_speeds(build_system(SystemKind::L5, p), l);
    for (double& x : lag) x = e(1) + tau * x;
    worst = std::max(worst, list_err(lag, eul));
  }
  return {worst <= 1e-9, "max |lambda_E - (u + tau lambda_L)| rel " + num(worst) + " over 1000 equilibria"};
}

// ---------------------------------------------------------------------------
// Runs

RunConfig e4_scenario(double amplitude, int n_cells) {
  RunConfig c;
  c.kind = SystemKind::E4;
  c.params = kUnit;
  c.reference = to_vector(StateE4{1.0, 0.0, 1.0, 0.0});
  c.ball_radius = 0.5;
  c.perturbation = {amplitude, 1.0, {}};
  c.mode_branch = ModeLabel::FastPlus;
  c.grid = {n_cells, 0.0, 4.0};
  c.t_end = 10.0;
  c.blowup_slope_factor = 50.0;
  c.snapshot_count = 0;
  return c;
}

RunConfig e5_scenario(int n_cells) {
  RunConfig c;
  c.kind = SystemKind::E5;
  c.params = {1.0, 1.5, 10.0, 1.0, 1.0, 1.0};
  c.reference = to_vector(StateE5{2.0, 0.0, 1.0, 0.0, 0.0});
  c.ball_radius = 0.5;
  c.perturbation = {0.11, 1.0, {}};
  c.mode_branch = ModeLabel::FastPlus;
  c.grid = {n_cells, 0.0, 4.0};
  c.t_end = 4.0;
  c.blowup_slope_factor = 50.0;
  c.snapshot_count = 0;
  return c;
}

/// Superlinear growth: a quadratic least-squares fit of the slope over the
/// final quarter of the steepening phase curves upward. The phase ends at
/// the first sample whose growth reaches sqrt(factor); past that the front
/// is a captured shock whose slope is set by the grid.
bool superlinear_tail(const RunResult& r, double factor) {
  std::vector<SeriesRow> phase;
  for (const auto& row : r.series) {
    phase.push_back(row);
    if (row.max_slope_u >= std::sqrt(factor) * r.initial_slope_u) break;
  }
  if (phase.size() < 8) return false;
  const double t_last = phase.back().t;
  const double t_first = 0.75 * t_last;
  double s[5] = {0, 0, 0, 0, 0};
  double b[3] = {0, 0, 0};
  int n = 0;
  for (const auto& row : phase) {
    if (row.t < t_first) continue;
    const double x = row.t - t_first;
    double p = 1.0;
    for (int k = 0; k < 5; ++k) {
      s[k] += p;
      if (k < 3) b[k] += p * row.max_slope_u;
      p *= x;
    }
    ++n;
  }
  if (n < 4) return false;
  Eigen::Matrix3d m;
  m << s[0], s[1], s[2], s[1], s[2], s[3], s[2], s[3], s[4];
  const Eigen::Vector3d coef = m.ldlt().solve(Eigen::Vector3d(b[0], b[1], b[2]));
  return coef(2) > 0.0;
}

struct Pair {
  RunResult coarse;
  RunResult fine;
  double seconds;
};

Pair refine(const std::function<RunConfig(int)>& make, int n) {
  const auto t0 = Clock::now();
  Pair p{run(make(n)), run(make(2 * n)), 0.0};
  p.seconds = seconds_since(t0);
  return p;
}

std::string describe(const RunResult& r) {
  return std::string(to_string(r.status)) + " t_b=" + (r.t_blowup_estimate ? num(*r.t_blowup_estimate, "%.4f") : "none") +
         " growth=" + num(r.peak_slope_u / r.initial_slope_u, "%.1f") + "x ball=" + num(r.max_ball_dist, "%.3f");
}

Outcome blowup_outcome(const Pair& p, double budget_seconds) {
  const RunResult& a = p.coarse;
  const RunResult& b = p.fine;
  bool pass = true;
  std::string consistency = "n/a";
  bool superlinear = true;
  for (const RunResult* r : {&a, &b}) {
    pass = pass && r->status == RunStatus::BlowupDetected && r->t_blowup_estimate.has_value();
    pass = pass && r->peak_slope_u >= 50.0 * r->initial_slope_u;
    pass = pass && r->max_ball_dist <= 0.5;
    superlinear = superlinear && superlinear_tail(*r, 50.0);
  }
  pass = pass && superlinear;
  if (a.t_blowup_estimate && b.t_blowup_estimate) {
    const double rel = std::abs(*a.t_blowup_estimate - *b.t_blowup_estimate) / *b.t_blowup_estimate;
    pass = pass && rel <= 0.1;
    consistency = num(rel, "%.4f");
  }
  pass = pass && p.seconds <= budget_seconds;
  return {pass, "n=" + std::to_string(a.n_cells) + ": " + describe(a) + "; n=" + std::to_string(b.n_cells) + ": " +
                    describe(b) + "; rel diff " + consistency + " (tol 0.1), steepening superlinear " +
                    (superlinear ? "yes" : "no") + ", " + num(p.seconds, "%.1f") + " s"};
}

double max_abs_diff(const FieldSet& a, const FieldSet& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.prim.size(); ++i) m = std::max(m, std::abs(a.prim[i] - b.prim[i]));
  return m;
}

Outcome criterion6(const Pair& e4) {
  double drift = 0.0;
  for (auto kind : {SystemKind::E3, SystemKind::E4, SystemKind::E5}) {
    RunConfig c = kind == SystemKind::E5 ? e5_scenario(1024) : e4_scenario(0.0, 1024);
    c.kind = kind;
    c.perturbation.amplitude = 0.0;
    if (kind == SystemKind::E3) c.reference = to_vector(StateE3{1.0, 0.3, 0.0});
    if (kind == SystemKind::E4) c.reference = to_vector(StateE4{1.0, 0.3, 1.0, 0.0});
    const auto sys = build_system(kind, c.params);
    FieldSet f = initial_data(c);
    for (int n = 0; n < 50; ++n) {
      const FieldSet g = step(f, sys, stable_dt(f, sys, c.cfl));
      drift = std::max(drift, max_abs_diff(f, g));
      f = g;
    }
  }

  // Conservation over full runs of each kind.
  double cons = 0.0;
  for (const RunResult* r : {&e4.coarse, &e4.fine}) cons = std::max({cons, r->conservation_drift[0], r->conservation_drift[1], r->conservation_drift[2]});
  RunConfig iso = e4_scenario(0.1, 1024);
  iso.kind = SystemKind::E3;
  iso.reference = to_vector(StateE3{1.0, 0.0, 0.0});
  iso.t_end = 1.0;
  const RunResult ri = run(iso);
  cons = std::max({cons, ri.conservation_drift[0], ri.conservation_drift[1]});

  const auto t0 = Clock::now();
  const RunResult r5 = run(e5_scenario(1024));
  const double e5_seconds = seconds_since(t0);
  cons = std::max({cons, r5.conservation_drift[0], r5.conservation_drift[1], r5.conservation_drift[2]});
  const auto t1 = Clock::now();
  RunConfig long4 = e4_scenario(0.0125, 1024);
  long4.t_end = 3.0;
  const RunResult r4 = run(long4);
  const double e4_seconds = seconds_since(t1);
  cons = std::max({cons, r4.conservation_drift[0], r4.conservation_drift[1], r4.conservation_drift[2]});

  const auto study = ref::smooth_order_study({128, 256, 512}, 4096, 0.25);
  const double order = study.orders.back();
  const bool pass = drift <= 1e-14 && cons <= 1e-12 && order >= 1.9 && e5_seconds <= 60.0 && e4_seconds <= 60.0;
  return {pass, "fixed-point drift " + num(drift) + "/step, conservation drift " + num(cons) + ", order " +
                    num(study.orders.front(), "%.3f") + " -> " + num(order, "%.3f") + ", n=1024 runtime e5 " +
                    num(e5_seconds, "%.1f") + " s (to t=" + num(r5.t_end_reached, "%.3f") + "), e4 " +
                    num(e4_seconds, "%.1f") + " s (to t=3)"};
}

Outcome criterion8(double t_b) {
  RunConfig c = e4_scenario(0.25 / 20.0, 2048);
  c.t_end = 3.0 * t_b;
  const RunResult r = run(c);
  const double ratio = r.peak_slope_u / r.initial_slope_u;
  const bool pass = r.status == RunStatus::SmoothUntilTEnd && r.t_end_reached >= c.t_end * (1.0 - 1e-12) && ratio <= 2.0;
  return {pass, std::string(to_string(r.status)) + " to t=" + num(r.t_end_reached, "%.4f") + " (3 t_b), max slope " +
                    num(ratio, "%.3f") + "x initial (limit 2)"};
}

void report(int id, const Outcome& o, bool& all) {
  std::printf("criterion %d: %s — %s\n", id, o.pass ? "PASS" : "FAIL", o.detail.c_str());
  std::fflush(stdout);
  all = all && o.pass;
}

Outcome guarded(const std::function<Outcome()>& f) {
  try {
    return f();
  } catch (const std::exception& e) {
    return {false, std::string("exception: ") + e.what()};
  }
}

}  // namespace

int main() {
  bool all = true;
  report(1, guarded(criterion1), all);
  report(2, guarded(criterion2), all);
  report(3, guarded(criterion3), all);
  report(4, guarded(criterion4), all);
  report(5, guarded(criterion5), all);

  Pair e4{};
  const Outcome c7 = guarded([&] {
    e4 = refine([](int n) { return e4_scenario(0.25, n); }, 2048);
    return blowup_outcome(e4, 300.0);
  });
  report(6, guarded([&] { return criterion6(e4); }), all);
  report(7, c7, all);
  const double t_b = e4.fine.t_blowup_estimate.value_or(NAN);
  report(8, guarded([&] {
           if (!std::isfinite(t_b)) return Outcome{false, "no blowup estimate from criterion 7"};
           return criterion8(t_b);
         }),
         all);
  report(9, guarded([] { return blowup_outcome(refine(e5_scenario, 2048), 600.0); }), all);
  std::printf("acceptance: %s\n", all ? "all criteria passed" : "FAILURES");
  return all ? 0 : 1;
}
