#include "ruggeri/sim1d.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "ruggeri/errors.hpp"
#include "ruggeri/parallel.hpp"
#include "ruggeri/physics.hpp"

namespace ruggeri {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr int kMaxSnapshots = 64;

double minmod(double a, double b) {
  if (a * b <= 0.0) return 0.0;
  return a > 0.0 ? std::min(a, b) : std::max(a, b);
}

double limited_slope(Limiter limiter, double left, double right) {
  switch (limiter) {
    case Limiter::Minmod: return minmod(left, right);
    case Limiter::MonotonizedCentral: return minmod(0.5 * (left + right), minmod(2.0 * left, 2.0 * right));
    case Limiter::None: return 0.5 * (left + right);
  }
  return 0.0;
}

/// MUSCL + Rusanov + SSP-RK2 on a periodic grid for one physics kernel.
template <class P>
class Scheme {
 public:
  static constexpr int N = P::n;
  using State = physics::Array<N>;

  Scheme(const FluidParams& params, const Grid1D& grid, Limiter limiter)
      : params_(params), n_(grid.n_cells), dx_(grid.dx()), limiter_(limiter) {
    prim_.resize(n_);
    slope_.resize(n_);
    speed_.resize(n_);
    hint_.assign(n_, {kNaN, kNaN});
    flux_.resize(n_);
    stage_.resize(n_);
    rate_.resize(n_);
  }

  /// Primitive states of `u` into prim_; throws AdmissibilityViolation.
  void decode(const std::vector<State>& u, double t) {
    for (int i = 0; i < n_; ++i) {
      try {
        prim_[i] = P::primitive(params_, u[i]);
      } catch (const ReconstructionError& e) {
        throw AdmissibilityViolation(std::string(e.what()) + " in cell " + std::to_string(i), i, t);
      }
    }
  }

  const std::vector<State>& prim() const { return prim_; }

  double max_speed() {
    double s = 0.0;
    for (int i = 0; i < n_; ++i) {
      if constexpr (requires { P::spectral_radius(params_, prim_[i], &hint_[i]); }) {
        speed_[i] = P::spectral_radius(params_, prim_[i], &hint_[i]);
      } else {
        speed_[i] = P::spectral_radius(params_, prim_[i]);
      }
      s = std::max(s, speed_[i]);
    }
    return s;
  }

  double min_relaxation_time() const {
    double r = std::numeric_limits<double>::infinity();
    for (const auto& v : prim_) r = std::min(r, P::relaxation_time(params_, v));
    return r;
  }

  /// L(u) = -(F_{i+1/2} - F_{i-1/2}) / dx + G(V_i).
  /// With `fresh`, prim_ and speed_ already describe `u`.
  void rhs(const std::vector<State>& u, std::vector<State>& out, double t, bool fresh = false) {
    if (!fresh) {
      decode(u, t);
      max_speed();
    }
    for (int i = 0; i < n_; ++i) {
      const State& vm = prim_[(i + n_ - 1) % n_];
      const State& v0 = prim_[i];
      const State& vp = prim_[(i + 1) % n_];
      for (int k = 0; k < N; ++k) slope_[i][k] = limited_slope(limiter_, v0[k] - vm[k], vp[k] - v0[k]);
    }
    for (int i = 0; i < n_; ++i) {
      const int j = (i + 1) % n_;
      State vl;
      State vr;
      for (int k = 0; k < N; ++k) {
        vl[k] = prim_[i][k] + 0.5 * slope_[i][k];
        vr[k] = prim_[j][k] - 0.5 * slope_[j][k];
      }
      if (!P::admissible(vl)) throw AdmissibilityViolation(face_message(i, t), i, t);
      if (!P::admissible(vr)) throw AdmissibilityViolation(face_message(j, t), j, t);
      const State fl = P::flux(params_, vl);
      const State fr = P::flux(params_, vr);
      const State ul = P::conserved(params_, vl);
      const State ur = P::conserved(params_, vr);
      const double a = std::max(speed_[i], speed_[j]);
      for (int k = 0; k < N; ++k) flux_[i][k] = 0.5 * (fl[k] + fr[k]) - 0.5 * a * (ur[k] - ul[k]);
    }
    const double inv_dx = 1.0 / dx_;
    for (int i = 0; i < n_; ++i) {
      const State g = P::source(params_, prim_[i]);
      const State& fp = flux_[i];
      const State& fm = flux_[(i + n_ - 1) % n_];
      for (int k = 0; k < N; ++k) out[i][k] = -(fp[k] - fm[k]) * inv_dx + g[k];
    }
  }

  /// Two-stage strong-stability-preserving Runge-Kutta step of `u` in place.
  /// Expects decode(u) and max_speed() to have been called on `u`.
  void advance(std::vector<State>& u, double dt, double t) {
    rhs(u, rate_, t, true);
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < N; ++k) stage_[i][k] = u[i][k] + dt * rate_[i][k];
    rhs(stage_, rate_, t + dt);
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < N; ++k) u[i][k] = 0.5 * u[i][k] + 0.5 * (stage_[i][k] + dt * rate_[i][k]);
  }

  std::vector<State> encode(const std::vector<double>& prim) const {
    std::vector<State> u(n_);
    for (int i = 0; i < n_; ++i) {
      State v;
      for (int k = 0; k < N; ++k) v[k] = prim[static_cast<std::size_t>(i) * N + k];
      u[i] = P::conserved(params_, v);
    }
    return u;
  }

  void write_prim(std::vector<double>& out) const {
    out.resize(static_cast<std::size_t>(n_) * N);
    for (int i = 0; i < n_; ++i)
      for (int k = 0; k < N; ++k) out[static_cast<std::size_t>(i) * N + k] = prim_[i][k];
  }

 private:
  static std::string face_message(int cell, double t) {
    std::ostringstream os;
    os << "inadmissible reconstructed state next to cell " << cell << " at t=" << t;
    return os.str();
  }

  FluidParams params_;
  int n_;
  double dx_;
  Limiter limiter_;
  std::vector<State> prim_;
  std::vector<State> slope_;
  std::vector<double> speed_;
  std::vector<State> flux_;
  std::vector<State> stage_;
  std::vector<State> rate_;
  std::vector<std::array<double, 2>> hint_;
};

template <class F>
decltype(auto) dispatch_eulerian(SystemKind kind, F&& f) {
  switch (kind) {
    case SystemKind::E3: return f(physics::Isothermal3{});
    case SystemKind::E4: return f(physics::Eulerian4{});
    case SystemKind::E5: return f(physics::Eulerian5{});
    case SystemKind::L5: break;
  }
  throw ConfigError("the simulator integrates Eulerian systems only (e3, e4, e5)");
}

template <int N>
std::array<double, 3> totals_of(const std::vector<physics::Array<N>>& u, double dx, bool has_energy) {
  std::array<double, 3> s{0.0, 0.0, 0.0};
  for (const auto& w : u) {
    s[0] += w[0];
    s[1] += w[1];
    s[2] += w[2];
  }
  for (auto& x : s) x *= dx;
  if (!has_energy) s[2] = kNaN;
  return s;
}

template <int N>
std::array<double, 3> scale_of(const std::vector<physics::Array<N>>& u, double dx) {
  std::array<double, 3> s{0.0, 0.0, 0.0};
  for (const auto& w : u)
    for (int k = 0; k < 3; ++k) s[k] += std::abs(w[k]);
  for (auto& x : s) x *= dx;
  return s;
}

template <int N>
std::array<double, 2> slopes_of(const std::vector<physics::Array<N>>& v, double dx) {
  const int n = static_cast<int>(v.size());
  double su = 0.0;
  double sa = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto& a = v[(i + n - 1) % n];
    const auto& b = v[(i + 1) % n];
    for (int k = 0; k < N; ++k) {
      const double s = std::abs(b[k] - a[k]) / (2.0 * dx);
      sa = std::max(sa, s);
      if (k == 1) su = std::max(su, s);
    }
  }
  return {su, sa};
}

template <int N>
double ball_distance(const std::vector<physics::Array<N>>& v, const Vec& ref) {
  double d = 0.0;
  for (const auto& w : v)
    for (int k = 0; k < N; ++k) d = std::max(d, std::abs(w[k] - ref(k)));
  return d;
}

void validate_run(const RunConfig& c) {
  c.grid.validate();
  validate(c.params, c.kind);
  if (!is_eulerian(c.kind)) throw ConfigError("the simulator integrates Eulerian systems only (e3, e4, e5)");
  const QuasilinearSystem sys(c.kind, c.params);
  if (c.reference.size() != sys.n()) throw ConfigError("reference state has the wrong number of components");
  sys.check_admissible(c.reference);
  if (!sys.is_equilibrium(c.reference)) throw ConfigError("reference state must be an equilibrium (sigma = q = 0)");
  if (!(c.ball_radius > 0.0)) throw ConfigError("ball_radius must be positive");
  if (!(c.perturbation.amplitude >= 0.0)) throw ConfigError("perturbation amplitude must be nonnegative");
  if (!(c.perturbation.width > 0.0)) throw ConfigError("perturbation width must be positive");
  if (!(c.cfl > 0.0 && c.cfl <= 1.0)) throw ConfigError("cfl must lie in (0, 1]");
  if (!(c.t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (!(c.blowup_slope_factor > 1.0)) throw ConfigError("blowup_slope_factor must exceed 1");
  if (c.output_stride < 1) throw ConfigError("output_stride must be at least 1");
  if (c.snapshot_count < 0 || c.snapshot_count > kMaxSnapshots)
    throw ConfigError("snapshot_count must lie in [0, 64]");
}

/// Least-squares line y = slope * t + intercept.
std::pair<double, double> fit_line(std::span<const double> t, std::span<const double> y) {
  const double n = static_cast<double>(t.size());
  double st = 0.0, sy = 0.0, stt = 0.0, sty = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    st += t[i];
    sy += y[i];
    stt += t[i] * t[i];
    sty += t[i] * y[i];
  }
  const double den = n * stt - st * st;
  if (den == 0.0) return {0.0, sy / n};
  const double m = (n * sty - st * sy) / den;
  return {m, (sy - m * st) / n};
}

/// Linear fit of 1/slope over samples with t in [t_lo, t_hi]; needs 4 samples.
std::optional<std::pair<double, double>> reciprocal_fit(const std::vector<double>& t, const std::vector<double>& slope,
                                                        double t_lo, double t_hi) {
  std::vector<double> tw;
  std::vector<double> yw;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] >= t_lo && t[i] <= t_hi && slope[i] > 0.0) {
      tw.push_back(t[i]);
      yw.push_back(1.0 / slope[i]);
    }
  }
  if (tw.size() < 4) return std::nullopt;
  return fit_line(tw, yw);
}

template <class P>
RunResult run_impl(const RunConfig& cfg) {
  using State = physics::Array<P::n>;
  const FieldSet init = initial_data(cfg);
  const double dx = cfg.grid.dx();
  const bool has_energy = cfg.kind != SystemKind::E3;

  Scheme<P> scheme(cfg.params, cfg.grid, cfg.limiter);
  std::vector<State> u = scheme.encode(init.prim);
  scheme.decode(u, 0.0);

  RunResult res;
  res.n_cells = cfg.grid.n_cells;
  const auto totals0 = totals_of<P::n>(u, dx, has_energy);
  const auto scale = scale_of<P::n>(u, dx);
  const auto slopes0 = slopes_of<P::n>(scheme.prim(), dx);
  res.initial_slope_u = slopes0[0];
  res.peak_slope_u = slopes0[0];

  std::vector<double> hist_t{0.0};
  std::vector<double> hist_s{slopes0[0]};

  auto record = [&](double t, const std::array<double, 2>& sl, double bd) {
    const auto tot = totals_of<P::n>(u, dx, has_energy);
    res.series.push_back({t, sl[0], sl[1], tot[0], tot[1], tot[2], bd});
    for (int k = 0; k < 3; ++k) {
      if (k == 2 && !has_energy) {
        res.conservation_drift[2] = kNaN;
        continue;
      }
      const double denom = std::max(std::abs(totals0[k]), scale[k]);
      const double d = denom > 0.0 ? std::abs(tot[k] - totals0[k]) / denom : std::abs(tot[k] - totals0[k]);
      res.conservation_drift[k] = std::max(res.conservation_drift[k], d);
    }
  };

  const double snap_dt = cfg.snapshot_count > 1 ? cfg.t_end / (cfg.snapshot_count - 1) : 0.0;
  double next_snap = 0.0;
  auto snapshot = [&](double t) {
    if (static_cast<int>(res.snapshots.size()) >= kMaxSnapshots) return;
    Snapshot s{t, {}};
    scheme.write_prim(s.prim);
    res.snapshots.push_back(std::move(s));
  };

  record(0.0, slopes0, ball_distance<P::n>(scheme.prim(), cfg.reference));
  res.max_ball_dist = res.series.back().ball_dist;
  if (cfg.snapshot_count > 0) {
    snapshot(0.0);
    next_snap = snap_dt > 0.0 ? snap_dt : std::numeric_limits<double>::infinity();
  }

  const double onset_factor = std::sqrt(cfg.blowup_slope_factor);
  double onset = -1.0;
  double t = 0.0;
  long since_record = 0;
  bool done = false;
  try {
    while (!done && t < cfg.t_end) {
      const double speed = scheme.max_speed();
      double dt = cfg.cfl * dx / speed;
      dt = std::min(dt, 0.5 * scheme.min_relaxation_time());
      if (t + dt >= cfg.t_end) dt = cfg.t_end - t;
      scheme.advance(u, dt, t);
      t = (t + dt >= cfg.t_end) ? cfg.t_end : t + dt;
      ++res.steps;
      ++since_record;
      scheme.decode(u, t);

      const auto sl = slopes_of<P::n>(scheme.prim(), dx);
      const double bd = ball_distance<P::n>(scheme.prim(), cfg.reference);
      res.max_ball_dist = std::max(res.max_ball_dist, bd);
      res.peak_slope_u = std::max(res.peak_slope_u, sl[0]);
      hist_t.push_back(t);
      hist_s.push_back(sl[0]);

      bool force_record = t >= cfg.t_end;
      if (bd > cfg.ball_radius && cfg.stop_on_ball_exit) {
        res.status = RunStatus::BallExit;
        std::ostringstream os;
        os << "solution left the ball of radius " << cfg.ball_radius << " (distance " << bd << ") at t=" << t;
        res.message = os.str();
        done = true;
        force_record = true;
      }

      // The reciprocal slope is fitted on the last quarter (in time) of the
      // series up to the onset time, when growth first reaches sqrt(factor);
      // beyond that the discrete slope is grid-limited.
      if (onset < 0.0 && res.initial_slope_u > 0.0 && sl[0] >= onset_factor * res.initial_slope_u) onset = t;
      if (!done && onset >= 0.0 && sl[0] >= cfg.blowup_slope_factor * res.initial_slope_u) {
        const auto fit = reciprocal_fit(hist_t, hist_s, 0.75 * onset, onset);
        if (fit && fit->first < 0.0) {
          res.status = RunStatus::BlowupDetected;
          res.t_blowup_estimate = -fit->second / fit->first;
          std::ostringstream os;
          os << "max |u_x| grew by " << sl[0] / res.initial_slope_u << "x; reciprocal-slope fit extrapolates to t="
             << *res.t_blowup_estimate;
          res.message = os.str();
          done = true;
          force_record = true;
        }
      }

      if (force_record || since_record >= cfg.output_stride) {
        record(t, sl, bd);
        since_record = 0;
      }
      if (cfg.snapshot_count > 0 && (t >= next_snap - 1e-12 * cfg.t_end || done || t >= cfg.t_end)) {
        snapshot(t);
        while (next_snap <= t + 1e-12 * cfg.t_end) next_snap += snap_dt > 0.0 ? snap_dt : cfg.t_end;
      }
    }
  } catch (const AdmissibilityViolation& e) {
    res.status = RunStatus::AdmissibilityViolation;
    res.message = e.what();
  }
  res.t_end_reached = t;
  return res;
}

}  // namespace

void Grid1D::validate() const {
  if (n_cells < 16) throw ConfigError("n_cells must be at least 16");
  if (!(x_max > x_min)) throw ConfigError("x_max must exceed x_min");
}

std::string_view to_string(Limiter limiter) {
  switch (limiter) {
    case Limiter::Minmod: return "minmod";
    case Limiter::MonotonizedCentral: return "mc";
    case Limiter::None: return "none";
  }
  return "?";
}

Limiter parse_limiter(std::string_view name) {
  if (name == "minmod") return Limiter::Minmod;
  if (name == "mc") return Limiter::MonotonizedCentral;
  if (name == "none") return Limiter::None;
  throw ConfigError("unknown limiter '" + std::string(name) + "' (expected minmod, mc or none)");
}

std::string_view to_string(RunStatus status) {
  switch (status) {
    case RunStatus::BlowupDetected: return "blowup_detected";
    case RunStatus::SmoothUntilTEnd: return "smooth_until_t_end";
    case RunStatus::AdmissibilityViolation: return "admissibility_violation";
    case RunStatus::BallExit: return "ball_exit";
  }
  return "?";
}

double bump(double xi) {
  if (std::abs(xi) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - xi * xi));
}

Vec seed_eigenvector(const RunConfig& config) {
  return equilibrium_mode(config.kind, config.params, config.reference, config.mode_branch).r;
}

FieldSet initial_data(const RunConfig& config) {
  validate_run(config);
  const Vec r = seed_eigenvector(config);
  const double a = config.perturbation.amplitude;
  if (a * r.cwiseAbs().maxCoeff() > config.ball_radius) {
    std::ostringstream os;
    os << "perturbation exceeds ball radius: amplitude " << a << " * |r|_inf " << r.cwiseAbs().maxCoeff() << " > "
       << config.ball_radius;
    throw ConfigError(os.str());
  }
  FieldSet f;
  f.kind = config.kind;
  f.grid = config.grid;
  const int n = f.n_vars();
  f.prim.resize(static_cast<std::size_t>(config.grid.n_cells) * n);
  const double xc = config.perturbation.center.value_or(0.5 * (config.grid.x_min + config.grid.x_max));
  for (int i = 0; i < config.grid.n_cells; ++i) {
    const double w = bump((config.grid.center(i) - xc) / config.perturbation.width);
    auto cell = f.cell(i);
    for (int k = 0; k < n; ++k) cell[k] = config.reference(k) + a * w * r(k);
  }
  return f;
}

double stable_dt(const FieldSet& state, const QuasilinearSystem& sys, double cfl) {
  return dispatch_eulerian(sys.kind(), [&](auto phys) {
    using P = decltype(phys);
    Scheme<P> scheme(sys.params(), state.grid, Limiter::Minmod);
    scheme.decode(scheme.encode(state.prim), state.t);
    const double dt = cfl * state.grid.dx() / scheme.max_speed();
    return std::min(dt, 0.5 * scheme.min_relaxation_time());
  });
}

FieldSet step(const FieldSet& state, const QuasilinearSystem& sys, double dt, Limiter limiter) {
  if (state.kind != sys.kind()) throw PreconditionError("field set and system kind differ");
  return dispatch_eulerian(sys.kind(), [&](auto phys) {
    using P = decltype(phys);
    Scheme<P> scheme(sys.params(), state.grid, limiter);
    auto u = scheme.encode(state.prim);
    scheme.decode(u, state.t);
    scheme.max_speed();
    scheme.advance(u, dt, state.t);
    scheme.decode(u, state.t + dt);
    FieldSet out = state;
    out.t = state.t + dt;
    scheme.write_prim(out.prim);
    return out;
  });
}

std::array<double, 3> conserved_totals(const FieldSet& state, const QuasilinearSystem& sys) {
  return dispatch_eulerian(sys.kind(), [&](auto phys) {
    using P = decltype(phys);
    Scheme<P> scheme(sys.params(), state.grid, Limiter::Minmod);
    return totals_of<P::n>(scheme.encode(state.prim), state.grid.dx(), sys.kind() != SystemKind::E3);
  });
}

std::array<double, 2> max_slopes(const FieldSet& state) {
  const int n = state.grid.n_cells;
  const int nv = state.n_vars();
  const double dx = state.grid.dx();
  double su = 0.0;
  double sa = 0.0;
  for (int i = 0; i < n; ++i) {
    const auto a = state.cell((i + n - 1) % n);
    const auto b = state.cell((i + 1) % n);
    for (int k = 0; k < nv; ++k) {
      const double s = std::abs(b[k] - a[k]) / (2.0 * dx);
      sa = std::max(sa, s);
      if (k == 1) su = std::max(su, s);
    }
  }
  return {su, sa};
}

RunResult run(const RunConfig& config) {
  validate_run(config);
  return dispatch_eulerian(config.kind, [&](auto phys) {
    using P = decltype(phys);
    return run_impl<P>(config);
  });
}

SweepReport amplitude_sweep(const RunConfig& base, std::span<const double> amplitudes, int threads) {
  validate_run(base);
  const double rmax = seed_eigenvector(base).cwiseAbs().maxCoeff();
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    if (i > 0 && amplitudes[i] < amplitudes[i - 1]) throw ConfigError("sweep amplitudes must be sorted ascending");
    if (amplitudes[i] * rmax > base.ball_radius) throw ConfigError("perturbation exceeds ball radius in sweep");
  }

  SweepReport rep;
  rep.entries.resize(amplitudes.size());
  parallel_for(
      amplitudes.size(),
      [&](std::size_t i) {
        RunConfig cfg = base;
        cfg.perturbation.amplitude = amplitudes[i];
        cfg.snapshot_count = 0;
        const RunResult r = run(cfg);
        rep.entries[i] = {amplitudes[i], r.status, r.t_blowup_estimate};
      },
      threads);

  // smooth* blowup*
  std::size_t i = 0;
  while (i < rep.entries.size() && rep.entries[i].status == RunStatus::SmoothUntilTEnd) ++i;
  const std::size_t n_smooth = i;
  while (i < rep.entries.size() && rep.entries[i].status == RunStatus::BlowupDetected) ++i;
  rep.monotone = i == rep.entries.size();
  if (rep.monotone && n_smooth > 0 && n_smooth < rep.entries.size()) {
    rep.bracket = std::make_pair(rep.entries[n_smooth - 1].amplitude, rep.entries[n_smooth].amplitude);
  }
  return rep;
}

}  // namespace ruggeri
