#pragma once

#include <array>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ruggeri/models.hpp"
#include "ruggeri/modes.hpp"

namespace ruggeri {

/// Uniform periodic grid.
struct Grid1D {
  int n_cells{1024};
  double x_min{0.0};
  double x_max{1.0};

  double dx() const { return (x_max - x_min) / n_cells; }
  double center(int i) const { return x_min + (i + 0.5) * dx(); }
  /// Throws ConfigError unless n_cells >= 16 and x_max > x_min.
  void validate() const;
};

/// Primitive fields on a grid, row-major: prim[i * n_vars + k].
struct FieldSet {
  SystemKind kind{SystemKind::E4};
  Grid1D grid;
  double t{0.0};
  std::vector<double> prim;

  int n_vars() const { return dimension(kind); }
  std::span<const double> cell(int i) const {
    return {prim.data() + static_cast<std::size_t>(i) * n_vars(), static_cast<std::size_t>(n_vars())};
  }
  std::span<double> cell(int i) {
    return {prim.data() + static_cast<std::size_t>(i) * n_vars(), static_cast<std::size_t>(n_vars())};
  }
};

enum class Limiter { Minmod, MonotonizedCentral, None };

std::string_view to_string(Limiter limiter);
Limiter parse_limiter(std::string_view name);

enum class RunStatus { BlowupDetected, SmoothUntilTEnd, AdmissibilityViolation, BallExit };

std::string_view to_string(RunStatus status);

/// V0(x) = V_* + amplitude * w((x - center) / width) * r, with the C-infinity
/// bump w(xi) = exp(1 - 1/(1 - xi^2)) for |xi| < 1 and 0 otherwise (w(0) = 1).
struct Perturbation {
  double amplitude{0.0};
  double width{1.0};
  std::optional<double> center;  ///< defaults to the middle of the domain
};

struct RunConfig {
  SystemKind kind{SystemKind::E4};
  FluidParams params;
  Vec reference;  ///< equilibrium V_*; relaxation variables must vanish
  double ball_radius{0.5};
  Perturbation perturbation;
  ModeLabel mode_branch{ModeLabel::FastPlus};
  double cfl{0.4};
  double t_end{1.0};
  double blowup_slope_factor{50.0};
  int output_stride{10};
  Grid1D grid;
  Limiter limiter{Limiter::Minmod};
  int snapshot_count{16};  ///< at most 64
  bool stop_on_ball_exit{true};
};

struct SeriesRow {
  double t;
  double max_slope_u;
  double max_slope_all;
  double mass;
  double momentum;
  double energy;  ///< NaN for the isothermal system
  double ball_dist;
};

struct Snapshot {
  double t;
  std::vector<double> prim;
};

struct RunResult {
  RunStatus status{RunStatus::SmoothUntilTEnd};
  std::optional<double> t_blowup_estimate;
  std::vector<SeriesRow> series;
  /// Relative drift of mass, momentum, energy (energy NaN for E3).
  std::array<double, 3> conservation_drift{};
  std::vector<Snapshot> snapshots;
  double t_end_reached{0.0};
  double max_ball_dist{0.0};
  int n_cells{0};
  long steps{0};
  double initial_slope_u{0.0};
  double peak_slope_u{0.0};
  std::string message;
};

/// Bump profile w(xi).
double bump(double xi);

/// Closed-form eigenvector that seeds the perturbation (kind, reference, mode_branch).
Vec seed_eigenvector(const RunConfig& config);

/// Smooth near-equilibrium data. Throws ConfigError when
/// amplitude * |r|_inf exceeds the ball radius ("perturbation exceeds ball radius").
FieldSet initial_data(const RunConfig& config);

/// Largest stable step: cfl * dx / max wave speed, capped at half the
/// smallest relaxation time.
double stable_dt(const FieldSet& state, const QuasilinearSystem& sys, double cfl);

/// One SSP-RK2 step of the MUSCL / Rusanov finite-volume scheme.
/// Throws AdmissibilityViolation when a reconstructed state is inadmissible.
FieldSet step(const FieldSet& state, const QuasilinearSystem& sys, double dt, Limiter limiter = Limiter::Minmod);

/// Totals sum(U_k) * dx of mass, momentum and energy (energy NaN for E3).
std::array<double, 3> conserved_totals(const FieldSet& state, const QuasilinearSystem& sys);

/// Max over cells of |V_{i+1} - V_{i-1}| / (2 dx): first the velocity, then every component.
std::array<double, 2> max_slopes(const FieldSet& state);

RunResult run(const RunConfig& config);

struct SweepEntry {
  double amplitude;
  RunStatus status;
  std::optional<double> t_blowup_estimate;
};

struct SweepReport {
  std::vector<SweepEntry> entries;
  /// Statuses switch once from smooth to blowup along the ascending amplitudes.
  bool monotone{false};
  /// (largest smooth amplitude, smallest blowup amplitude), when monotone and both exist.
  std::optional<std::pair<double, double>> bracket;
};

/// Runs `base` at each amplitude (ascending, each within the ball) concurrently.
SweepReport amplitude_sweep(const RunConfig& base, std::span<const double> amplitudes, int threads = 0);

}  // namespace ruggeri
