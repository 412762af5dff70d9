#include "xcli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "ruggeri/errors.hpp"
#include "ruggeri/modes.hpp"
#include "ruggeri/oracles.hpp"
#include "ruggeri/sim1d.hpp"
#include "xcli/format.hpp"

namespace xcli {

namespace fs = std::filesystem;
using namespace ruggeri;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Row {
  ModeLabel label;
  double lambda;
  std::optional<double> mu;
  Vec r;                      // empty when unavailable
  std::optional<double> gnl;  // closed form
  bool closed_speed;          // lambda comes from a closed form
};

struct Checked {
  double speed_err{kNaN};
  double residual{kNaN};
  double gnl_fd{kNaN};
  double gnl_err{kNaN};
  bool ok{true};
};

double rel_diff(double a, double b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

/// Unused generic eigenpair whose eigenvalue is nearest to `lambda`.
const EigenPair* take_nearest(const std::vector<EigenPair>& pairs, std::vector<bool>& used, double lambda) {
  const EigenPair* best = nullptr;
  std::size_t best_i = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    if (used[i]) continue;
    if (!best || std::abs(pairs[i].lambda - lambda) < std::abs(best->lambda - lambda)) {
      best = &pairs[i];
      best_i = i;
    }
  }
  if (best) used[best_i] = true;
  return best;
}

double contact_speed(SystemKind kind, const Vec& v) { return kind == SystemKind::L5 ? 0.0 : v(1); }

std::vector<Row> closed_rows(SystemKind kind, const FluidParams& params, const Vec& v, bool equilibrium) {
  std::vector<Row> rows;
  auto mode = [&](ModeLabel label) {
    const ModeReport m = equilibrium_mode(kind, params, v, label);
    rows.push_back({label, m.lambda, m.mu, m.r, m.gnl, true});
  };
  auto contact = [&] { rows.push_back({ModeLabel::Contact, contact_speed(kind, v), 0.0, {}, 0.0, true}); };
  switch (kind) {
    case SystemKind::E3: {
      if (equilibrium) {
        mode(ModeLabel::FastMinus);
        contact();
        mode(ModeLabel::FastPlus);
      } else {
        const double mu = std::sqrt(params.R + 1.0 / (params.eps * v(0) * v(0)));
        rows.push_back({ModeLabel::FastMinus, v(1) - mu, mu, {}, std::nullopt, true});
        contact();
        rows.push_back({ModeLabel::FastPlus, v(1) + mu, -mu, {}, std::nullopt, true});
      }
      break;
    }
    case SystemKind::E4: {
      if (equilibrium) {
        mode(ModeLabel::FastMinus);
        contact();
        contact();
        mode(ModeLabel::FastPlus);
      } else {
        const auto sp = speeds_E4(params, {v(0), v(1), v(2), v(3)});
        rows.push_back({ModeLabel::FastMinus, sp[0].lambda, sp[0].mu, {}, std::nullopt, true});
        contact();
        contact();
        rows.push_back({ModeLabel::FastPlus, sp[3].lambda, sp[3].mu, {}, std::nullopt, true});
      }
      break;
    }
    case SystemKind::E5:
    case SystemKind::L5: {
      if (!equilibrium) return rows;
      mode(ModeLabel::FastMinus);
      mode(ModeLabel::SlowMinus);
      contact();
      mode(ModeLabel::SlowPlus);
      mode(ModeLabel::FastPlus);
      break;
    }
  }
  return rows;
}

/// Rows from the generic eigensolver, labeled by ascending eigenvalue.
std::vector<Row> generic_rows(SystemKind kind, const std::vector<EigenPair>& pairs) {
  static constexpr ModeLabel k3[] = {ModeLabel::FastMinus, ModeLabel::Contact, ModeLabel::FastPlus};
  static constexpr ModeLabel k4[] = {ModeLabel::FastMinus, ModeLabel::Contact, ModeLabel::Contact,
                                     ModeLabel::FastPlus};
  static constexpr ModeLabel k5[] = {ModeLabel::FastMinus, ModeLabel::SlowMinus, ModeLabel::Contact,
                                     ModeLabel::SlowPlus, ModeLabel::FastPlus};
  const ModeLabel* labels = kind == SystemKind::E3 ? k3 : kind == SystemKind::E4 ? k4 : k5;
  std::vector<Row> rows;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    rows.push_back({labels[i], pairs[i].lambda, std::nullopt, pairs[i].r, std::nullopt, false});
  }
  return rows;
}

Checked check_row(const QuasilinearSystem& sys, const Vec& v, Row& row, const OracleTolerances& tol) {
  Checked c;
  if (row.closed_speed) {
    const double numeric = oracle::tracked_eigenvalue(sys, v, row.lambda);
    c.speed_err = std::abs(numeric - row.lambda) / std::max(1.0, std::abs(row.lambda));
    if (!(c.speed_err <= tol.speed)) c.ok = false;
  }
  if (row.r.size() > 0) {
    c.residual = oracle::pencil_residual(sys, v, row.lambda, row.r);
    if (!(c.residual <= tol.residual)) c.ok = false;
    c.gnl_fd = oracle::gnl_finite_difference(sys, v, row.r, row.lambda);
    if (row.gnl) {
      if (row.label == ModeLabel::Contact) {
        c.gnl_err = std::abs(c.gnl_fd - *row.gnl);
      } else {
        c.gnl_err = rel_diff(*row.gnl, c.gnl_fd);
      }
      if (!(c.gnl_err <= tol.gnl)) c.ok = false;
    }
  }
  return c;
}

std::string state_text(SystemKind kind, const Vec& v) {
  std::string s;
  const auto names = variable_names(kind);
  for (int k = 0; k < v.size(); ++k) {
    if (k) s += ' ';
    s += std::string(names[k]) + "=" + fmt(v(k));
  }
  return s;
}

void write_pi0_lines(std::ostream& out, const Pi0Report& rep) {
  const bool ok = rep.ordering_holds;
  out << "# pi0: lam_slow_sq=" << fmt(rep.root_slow) << " lam_star_sq=" << fmt(rep.lam_star_sq)
      << " lam_2star_sq=" << fmt(rep.lam_2star_sq) << " lam_fast_sq=" << fmt(rep.root_fast) << '\n';
  out << "# nonlinearity: lam_tau_sq=" << fmt(rep.lam_tau_sq) << " lam_theta_sq=" << fmt(rep.lam_theta_sq)
      << " alpha_tau=" << fmt(rep.alpha.tau) << " alpha_theta=" << fmt(rep.alpha.theta)
      << " alpha_sigma=" << fmt(rep.alpha.sigma) << " alpha_q=" << fmt(rep.alpha.q) << " N_fast=" << fmt(rep.N_fast)
      << " N_slow=" << fmt(rep.N_slow) << " fast_certified=" << (rep.fast_certified ? "yes" : "no") << '\n';
  out << "ordering: 0 < " << fmt_compact(rep.root_slow, 4) << " < " << fmt_compact(rep.lam_star_sq, 4) << " < "
      << fmt_compact(rep.lam_2star_sq, 4) << " < " << fmt_compact(rep.root_fast, 4) << (ok ? " OK" : " FAIL")
      << '\n';
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot open '" + path.string() + "' for writing");
  f << content;
  f.close();
  if (!f) throw std::runtime_error("failed writing '" + path.string() + "'");
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) {
    throw std::runtime_error("cannot create output directory '" + dir.string() + "': " + ec.message());
  }
}

std::string optional_text(const std::optional<double>& v) { return v ? fmt(*v) : std::string("none"); }

}  // namespace

int cmd_analyze(const AnalyzeRequest& req, std::ostream& out) {
  const QuasilinearSystem sys = build_system(req.kind, req.params);
  const Vec& v = req.state;
  sys.check_admissible(v);
  const bool eq = sys.is_equilibrium(v);

  const auto pairs = speeds_generic(sys, v, req.tol.imag);
  std::vector<Row> rows = closed_rows(req.kind, req.params, v, eq);
  if (rows.empty()) {
    rows = generic_rows(req.kind, pairs);
  } else {
    // Rows lacking a closed-form eigenvector borrow the numeric one.
    std::vector<bool> used(pairs.size(), false);
    for (auto& row : rows) {
      if (row.r.size() > 0) take_nearest(pairs, used, row.lambda);
    }
    for (auto& row : rows) {
      if (row.r.size() > 0) continue;
      if (const auto* p = take_nearest(pairs, used, row.lambda)) row.r = p->r;
    }
  }

  out << "# kind=" << to_string(req.kind) << " R=" << fmt(req.params.R) << " c=" << fmt(req.params.c)
      << " eta=" << fmt(req.params.eta) << " eps=" << fmt(req.params.eps);
  if (req.kind == SystemKind::E5 || req.kind == SystemKind::L5) {
    out << " delta=" << fmt(req.params.delta) << " chi=" << fmt(req.params.chi);
  }
  out << '\n' << "# state: " << state_text(req.kind, v) << " equilibrium=" << (eq ? "yes" : "no") << '\n';

  std::vector<std::string> header{"mode", "lambda", "mu"};
  for (auto name : variable_names(req.kind)) header.push_back("r_" + std::string(name));
  for (auto h : {"gnl", "speed_err", "residual", "gnl_fd", "gnl_err", "check"}) header.emplace_back(h);
  write_csv_row(out, header);

  bool all_ok = true;
  for (auto& row : rows) {
    const Checked c = check_row(sys, v, row, req.tol);
    all_ok = all_ok && c.ok;
    std::vector<std::string> f{std::string(to_string(row.label)), fmt(row.lambda),
                               row.mu && is_eulerian(req.kind) ? fmt(*row.mu) : std::string("nan")};
    for (int k = 0; k < sys.n(); ++k) f.push_back(row.r.size() > 0 ? fmt(row.r(k)) : std::string("nan"));
    f.push_back(row.gnl ? fmt(*row.gnl) : std::string("nan"));
    for (double x : {c.speed_err, c.residual, c.gnl_fd, c.gnl_err}) f.push_back(fmt(x));
    f.emplace_back(c.ok ? "ok" : "FAIL");
    write_csv_row(out, f);
  }

  if (eq && req.kind == SystemKind::E4) {
    const GnlE4 g = gnl_E4(req.params, {v(0), v(1), v(2), v(3)}, Branch::Plus);
    const bool chain = g.scaled > g.lower_bound && g.lower_bound > 0.0;
    out << "bound: -2mu(r.grad lambda)=" << fmt(g.scaled) << " > " << fmt(g.lower_bound) << " > 0 "
        << (chain ? "OK" : "FAIL") << '\n';
    all_ok = all_ok && chain;
  }
  if (eq && (req.kind == SystemKind::E5 || req.kind == SystemKind::L5)) {
    const double tau = req.kind == SystemKind::L5 ? v(0) : 1.0 / v(0);
    const Pi0Report rep = pi0_report(req.params, tau, v(2));
    write_pi0_lines(out, rep);
    all_ok = all_ok && rep.ordering_holds;
  }
  out << "result: " << (all_ok ? "all oracle checks passed" : "oracle disagreement") << '\n';
  return all_ok ? kExitOk : kExitOracle;
}

int cmd_simulate(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& log) {
  (void)initial_data(cfg.run);  // validates, including the ball-radius check
  ensure_dir(dir);
  const RunResult res = run(cfg.run);
  const auto names = variable_names(cfg.kind);
  const int nv = dimension(cfg.kind);

  std::ostringstream series;
  write_csv_row(series, {"t", "max_slope_u", "max_slope_all", "mass", "momentum", "energy", "ball_dist"});
  for (const auto& row : res.series) {
    write_csv_row(series, {fmt(row.t), fmt(row.max_slope_u), fmt(row.max_slope_all), fmt(row.mass),
                           fmt(row.momentum), fmt(row.energy), fmt(row.ball_dist)});
  }
  write_file(dir / "series.csv", series.str());

  for (const auto& snap : res.snapshots) {
    std::ostringstream os;
    std::vector<std::string> header{"x"};
    for (auto n : names) header.emplace_back(n);
    write_csv_row(os, header);
    for (int i = 0; i < cfg.run.grid.n_cells; ++i) {
      std::vector<std::string> f{fmt(cfg.run.grid.center(i))};
      for (int k = 0; k < nv; ++k) f.push_back(fmt(snap.prim[static_cast<std::size_t>(i) * nv + k]));
      write_csv_row(os, f);
    }
    write_file(dir / ("snapshot_" + fmt(snap.t) + ".csv"), os.str());
  }

  std::ostringstream summary;
  summary << "status=" << to_string(res.status) << '\n'
          << "t_blowup_estimate=" << optional_text(res.t_blowup_estimate) << '\n'
          << "max_ball_dist=" << fmt(res.max_ball_dist) << '\n'
          << "n_cells=" << res.n_cells << '\n'
          << "t_end_reached=" << fmt(res.t_end_reached) << '\n';
  write_file(dir / "summary", summary.str());

  log << summary.str();
  log << "# steps=" << res.steps << " initial_slope_u=" << fmt(res.initial_slope_u)
      << " peak_slope_u=" << fmt(res.peak_slope_u) << " drift=" << fmt(res.conservation_drift[0]) << ','
      << fmt(res.conservation_drift[1]) << ',' << fmt(res.conservation_drift[2]) << '\n';
  if (!res.message.empty()) log << "# " << res.message << '\n';
  return kExitOk;
}

int cmd_scan(const ExperimentConfig& cfg, std::ostream& csv) {
  if (cfg.kind != SystemKind::L5 && cfg.kind != SystemKind::E5) {
    throw ConfigError("scan works on the heat-conducting system; set system.kind to l5 or e5");
  }
  const ScanConfig& sc = cfg.scan;
  const auto thetas = linspace(sc.theta_min, sc.theta_max, sc.n_theta);
  if (sc.type == ScanType::Threshold) {
    write_csv_row(csv, {"theta", "tau_max_closed", "tau_max_bisect", "abs_diff"});
    bool agree = true;
    for (double theta : thetas) {
      const double closed = find_tau_threshold(cfg.params, theta);
      const double bisect = find_tau_threshold_bisect(cfg.params, theta);
      const double diff = (std::isinf(closed) && std::isinf(bisect)) ? 0.0 : std::abs(closed - bisect);
      agree = agree && diff <= sc.tol;
      write_csv_row(csv, {fmt(theta), fmt(closed), fmt(bisect), fmt(diff)});
    }
    return agree ? kExitOk : kExitOracle;
  }
  const auto taus = linspace(sc.tau_min, sc.tau_max, sc.n_tau);
  const auto plus = degeneracy_scan(cfg.params, taus, thetas, sc.mode, Branch::Plus, cfg.threads, sc.tol);
  const auto minus = degeneracy_scan(cfg.params, taus, thetas, sc.mode, Branch::Minus, cfg.threads, sc.tol);
  write_csv_row(csv, {"tau", "theta", "lambda", "N_plus", "N_minus", "sign"});
  for (std::size_t i = 0; i < plus.points.size(); ++i) {
    const auto& p = plus.points[i];
    write_csv_row(csv, {fmt(p.tau), fmt(p.theta), fmt(p.lambda), fmt(p.N), fmt(minus.points[i].N),
                        std::to_string(p.sign)});
  }
  return kExitOk;
}

int cmd_sweep(const ExperimentConfig& cfg, const fs::path& dir, std::ostream& out) {
  if (cfg.sweep.amplitudes.empty()) throw ConfigError("sweep.amplitudes is empty");
  const SweepReport rep = amplitude_sweep(cfg.run, cfg.sweep.amplitudes, cfg.threads);
  std::ostringstream csv;
  write_csv_row(csv, {"amplitude", "status", "t_blowup_estimate"});
  for (const auto& e : rep.entries) {
    write_csv_row(csv, {fmt(e.amplitude), std::string(to_string(e.status)), optional_text(e.t_blowup_estimate)});
  }
  std::ostringstream summary;
  summary << "monotone=" << (rep.monotone ? "yes" : "no") << '\n';
  summary << "bracket_smooth=" << (rep.bracket ? fmt(rep.bracket->first) : std::string("none")) << '\n';
  summary << "bracket_blowup=" << (rep.bracket ? fmt(rep.bracket->second) : std::string("none")) << '\n';
  ensure_dir(dir);
  write_file(dir / "sweep.csv", csv.str());
  write_file(dir / "sweep_summary", summary.str());
  out << csv.str() << summary.str();
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Characteristic analysis and blowup experiments for relaxation gas dynamics", "ruggeri"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "ruggeri 0.1.0");

  // analyze
  auto* analyze = app.add_subcommand("analyze", "Characteristic speeds, eigenvectors and nonlinearity at one state");
  std::string kind_name;
  AnalyzeRequest req;
  std::optional<double> rho;
  std::optional<double> tau;
  double u = 0.0;
  double theta = 1.0;
  double sigma = 0.0;
  double q = 0.0;
  analyze->add_option("--kind", kind_name, "e3, e4, e5 or l5")->required();
  analyze->add_option("--R", req.params.R, "gas constant")->capture_default_str();
  analyze->add_option("--c", req.params.c, "specific heat, e = c theta")->capture_default_str();
  analyze->add_option("--eta", req.params.eta, "viscous relaxation coefficient")->capture_default_str();
  analyze->add_option("--eps", req.params.eps, "stress retardation epsilon")->capture_default_str();
  analyze->add_option("--delta", req.params.delta, "heat-flux retardation delta")->capture_default_str();
  analyze->add_option("--chi", req.params.chi, "heat-flux relaxation coefficient")->capture_default_str();
  analyze->add_option("--rho", rho, "density (default 1)");
  analyze->add_option("--tau", tau, "specific volume 1/rho");
  analyze->add_option("--u", u, "velocity")->capture_default_str();
  analyze->add_option("--theta", theta, "temperature")->capture_default_str();
  analyze->add_option("--sigma", sigma, "viscous stress")->capture_default_str();
  analyze->add_option("--q", q, "heat flux")->capture_default_str();
  analyze->add_option("--speed-tol", req.tol.speed, "closed-form vs numeric speed tolerance")->capture_default_str();
  analyze->add_option("--residual-tol", req.tol.residual, "pencil residual tolerance")->capture_default_str();
  analyze->add_option("--gnl-tol", req.tol.gnl, "finite-difference nonlinearity tolerance")->capture_default_str();
  analyze->add_option("--imag-tol", req.tol.imag, "accepted imaginary part of eigenvalues")->capture_default_str();

  // config-driven commands
  std::string config_path;
  std::vector<std::string> overrides;
  std::string out_path;
  auto add_config = [&](CLI::App* sub, const std::string& out_help) {
    sub->add_option("--config", config_path, "experiment file ([section] key = value)")->required();
    sub->add_option("--set", overrides, "override one field, section.key=value (repeatable)");
    sub->add_option("--out", out_path, out_help);
  };
  auto* simulate = app.add_subcommand("simulate", "Integrate a near-equilibrium bump and watch for gradient blowup");
  add_config(simulate, "output directory (default: output.dir)");
  auto* scan = app.add_subcommand("scan", "Nonlinearity sign grid or small-tau threshold table");
  add_config(scan, "CSV file (default: standard output)");
  auto* sweep = app.add_subcommand("sweep", "Run one scenario at several amplitudes");
  add_config(sweep, "output directory (default: output.dir)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    app.exit(e, out, err);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  try {
    if (analyze->parsed()) {
      req.kind = parse_kind(kind_name);
      if (rho && tau) throw ConfigError("give either --rho or --tau, not both");
      if (req.kind == SystemKind::E3 && (theta != 1.0 || q != 0.0)) {
        throw ConfigError("the isothermal system takes --rho, --u and --sigma only");
      }
      if (req.kind == SystemKind::E4 && q != 0.0) throw ConfigError("e4 has no heat flux");
      double r = 1.0;
      if (rho) r = *rho;
      if (tau) r = 1.0 / *tau;
      switch (req.kind) {
        case SystemKind::E3: req.state = to_vector(StateE3{r, u, sigma}); break;
        case SystemKind::E4: req.state = to_vector(StateE4{r, u, theta, sigma}); break;
        case SystemKind::E5: req.state = to_vector(StateE5{r, u, theta, sigma, q}); break;
        case SystemKind::L5: req.state = to_vector(StateL5{tau ? *tau : 1.0 / r, u, theta, sigma, q}); break;
      }
      return cmd_analyze(req, out);
    }
    IniDocument doc = IniDocument::load(config_path);
    for (const auto& o : overrides) doc.set(o);
    const ExperimentConfig cfg = parse_experiment(doc);
    if (simulate->parsed()) return cmd_simulate(cfg, out_path.empty() ? cfg.output_dir : out_path, out);
    if (sweep->parsed()) return cmd_sweep(cfg, out_path.empty() ? cfg.output_dir : out_path, out);
    if (scan->parsed()) {
      if (out_path.empty()) return cmd_scan(cfg, out);
      std::ostringstream csv;
      const int code = cmd_scan(cfg, csv);
      write_file(out_path, csv.str());
      out << "wrote " << out_path << '\n';
      return code;
    }
  } catch (const InternalInconsistency& e) {
    err << "error: " << e.what() << '\n';
    return kExitOracle;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  }
  return kExitUsage;
}

}  // namespace xcli
