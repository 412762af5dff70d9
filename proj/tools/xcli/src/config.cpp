#include "xcli/config.hpp"

#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include "ruggeri/errors.hpp"
#include "xcli/format.hpp"

namespace xcli {

using ruggeri::ConfigError;
using ruggeri::SystemKind;

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string lower(std::string_view s) {
  std::string out(s);
  for (auto& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

/// Typed access to one document that remembers which keys were read, so
/// leftovers can be reported as unknown.
class Reader {
 public:
  explicit Reader(const IniDocument& doc) : doc_(doc) {}

  const IniDocument::Entry* get(const std::string& section, const std::string& key) {
    used_.insert(section + "." + key);
    return doc_.find(section, key);
  }

  std::optional<std::string> text(const std::string& section, const std::string& key) {
    const auto* e = get(section, key);
    if (!e) return std::nullopt;
    return e->value;
  }

  std::optional<double> number(const std::string& section, const std::string& key) {
    const auto* e = get(section, key);
    if (!e) return std::nullopt;
    double v = 0.0;
    if (!parse_double(e->value, v)) fail(section, key, *e, "expected a number");
    return v;
  }

  std::optional<long> integer(const std::string& section, const std::string& key) {
    const auto* e = get(section, key);
    if (!e) return std::nullopt;
    long v = 0;
    if (!parse_int(e->value, v)) fail(section, key, *e, "expected an integer");
    return v;
  }

  std::optional<bool> boolean(const std::string& section, const std::string& key) {
    const auto* e = get(section, key);
    if (!e) return std::nullopt;
    const std::string v = lower(e->value);
    if (v == "true" || v == "yes" || v == "on" || v == "1") return true;
    if (v == "false" || v == "no" || v == "off" || v == "0") return false;
    fail(section, key, *e, "expected true or false");
  }

  std::optional<std::vector<double>> numbers(const std::string& section, const std::string& key) {
    const auto* e = get(section, key);
    if (!e) return std::nullopt;
    std::vector<double> out;
    std::string_view rest = e->value;
    while (true) {
      const auto comma = rest.find(',');
      const auto item = trim(rest.substr(0, comma));
      double v = 0.0;
      if (!parse_double(item, v)) fail(section, key, *e, "expected a comma-separated list of numbers");
      out.push_back(v);
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    return out;
  }

  double require(const std::string& section, const std::string& key) {
    const auto v = number(section, key);
    if (!v) throw ConfigError(doc_.source() + ": missing required key '" + section + "." + key + "'");
    return *v;
  }

  /// Marks a key as consumed but reports it as inapplicable if present.
  void forbid(const std::string& section, const std::string& key, const std::string& why) {
    if (const auto* e = get(section, key)) fail(section, key, *e, why);
  }

  [[noreturn]] void fail(const std::string& section, const std::string& key, const IniDocument::Entry& e,
                         const std::string& why) const {
    std::ostringstream os;
    os << doc_.source();
    if (e.line > 0) os << ":" << e.line;
    os << ": " << section << "." << key << " = '" << e.value << "': " << why;
    throw ConfigError(os.str());
  }

  void reject_unused() const {
    static const std::set<std::string> known{"system", "params", "reference", "perturbation", "grid",
                                             "run",    "scan",   "sweep",     "output"};
    for (const auto& [section, entries] : doc_.sections()) {
      if (!known.count(section)) throw ConfigError(doc_.source() + ": unknown section [" + section + "]");
      for (const auto& [key, entry] : entries) {
        if (used_.count(section + "." + key)) continue;
        std::ostringstream os;
        os << doc_.source();
        if (entry.line > 0) os << ":" << entry.line;
        os << ": unknown key '" << section << "." << key << "'";
        throw ConfigError(os.str());
      }
    }
  }

 private:
  const IniDocument& doc_;
  std::set<std::string> used_;
};

template <class T>
void assign(T& field, const std::optional<T>& value) {
  if (value) field = *value;
}

int to_int(long v, const std::string& what) {
  if (v < -2147483647L || v > 2147483647L) throw ConfigError(what + " out of range");
  return static_cast<int>(v);
}

void read_params(Reader& rd, SystemKind kind, ruggeri::FluidParams& p) {
  const bool heat = kind == SystemKind::E5 || kind == SystemKind::L5;
  p.R = rd.require("params", "R");
  p.eps = rd.require("params", "eps");
  p.eta = rd.require("params", "eta");
  if (kind == SystemKind::E3) {
    assign(p.c, rd.number("params", "c"));
  } else {
    p.c = rd.require("params", "c");
  }
  if (heat) {
    p.delta = rd.require("params", "delta");
    p.chi = rd.require("params", "chi");
  } else {
    rd.forbid("params", "delta", "heat-flux parameters apply only to e5 and l5");
    rd.forbid("params", "chi", "heat-flux parameters apply only to e5 and l5");
  }
  ruggeri::validate(p, kind);
}

ruggeri::Vec read_reference(Reader& rd, SystemKind kind) {
  double rho = 1.0;
  const auto r = rd.number("reference", "rho");
  const auto t = rd.number("reference", "tau");
  if (r && t) rd.fail("reference", "tau", *rd.get("reference", "tau"), "give either rho or tau, not both");
  if (kind == SystemKind::E3 && t) rd.fail("reference", "tau", *rd.get("reference", "tau"), "use rho for e3");
  if (r) rho = *r;
  if (t) rho = 1.0 / *t;
  double tau = 1.0 / rho;
  const double u = rd.number("reference", "u").value_or(0.0);
  const double sigma = rd.number("reference", "sigma").value_or(0.0);
  switch (kind) {
    case SystemKind::E3: {
      rd.forbid("reference", "theta", "the isothermal system has no temperature field");
      rd.forbid("reference", "q", "e3 has no heat flux");
      return ruggeri::to_vector(ruggeri::StateE3{rho, u, sigma});
    }
    case SystemKind::E4: {
      const double theta = rd.number("reference", "theta").value_or(1.0);
      rd.forbid("reference", "q", "e4 has no heat flux");
      return ruggeri::to_vector(ruggeri::StateE4{rho, u, theta, sigma});
    }
    case SystemKind::E5: {
      const double theta = rd.number("reference", "theta").value_or(1.0);
      const double q = rd.number("reference", "q").value_or(0.0);
      return ruggeri::to_vector(ruggeri::StateE5{rho, u, theta, sigma, q});
    }
    case SystemKind::L5: {
      const double theta = rd.number("reference", "theta").value_or(1.0);
      const double q = rd.number("reference", "q").value_or(0.0);
      return ruggeri::to_vector(ruggeri::StateL5{tau, u, theta, sigma, q});
    }
  }
  throw ConfigError("unknown system kind");
}

void read_run(Reader& rd, ruggeri::RunConfig& run) {
  auto& pert = run.perturbation;
  assign(pert.amplitude, rd.number("perturbation", "amplitude"));
  assign(pert.width, rd.number("perturbation", "width"));
  if (const auto c = rd.number("perturbation", "center")) pert.center = *c;
  if (const auto m = rd.text("perturbation", "mode")) run.mode_branch = ruggeri::parse_mode_label(*m);

  assign(run.grid.x_min, rd.number("grid", "x_min"));
  assign(run.grid.x_max, rd.number("grid", "x_max"));
  if (const auto n = rd.integer("grid", "n_cells")) run.grid.n_cells = to_int(*n, "grid.n_cells");
  run.grid.validate();

  assign(run.ball_radius, rd.number("run", "ball_radius"));
  assign(run.cfl, rd.number("run", "cfl"));
  assign(run.t_end, rd.number("run", "t_end"));
  assign(run.blowup_slope_factor, rd.number("run", "blowup_slope_factor"));
  if (const auto s = rd.integer("run", "output_stride")) run.output_stride = to_int(*s, "run.output_stride");
  if (const auto s = rd.integer("run", "snapshot_count")) run.snapshot_count = to_int(*s, "run.snapshot_count");
  if (const auto l = rd.text("run", "limiter")) run.limiter = ruggeri::parse_limiter(*l);
  assign(run.stop_on_ball_exit, rd.boolean("run", "stop_on_ball_exit"));
}

void read_scan(Reader& rd, ScanConfig& scan) {
  if (const auto t = rd.text("scan", "type")) {
    const std::string v = lower(*t);
    if (v == "gnl") {
      scan.type = ScanType::Gnl;
    } else if (v == "threshold") {
      scan.type = ScanType::Threshold;
    } else {
      rd.fail("scan", "type", *rd.get("scan", "type"), "expected gnl or threshold");
    }
  }
  assign(scan.tau_min, rd.number("scan", "tau_min"));
  assign(scan.tau_max, rd.number("scan", "tau_max"));
  if (const auto n = rd.integer("scan", "n_tau")) scan.n_tau = to_int(*n, "scan.n_tau");
  assign(scan.theta_min, rd.number("scan", "theta_min"));
  assign(scan.theta_max, rd.number("scan", "theta_max"));
  if (const auto n = rd.integer("scan", "n_theta")) scan.n_theta = to_int(*n, "scan.n_theta");
  if (const auto m = rd.text("scan", "mode")) {
    const std::string v = lower(*m);
    if (v == "fast") {
      scan.mode = ruggeri::LagrangianMode::Fast;
    } else if (v == "slow") {
      scan.mode = ruggeri::LagrangianMode::Slow;
    } else {
      rd.fail("scan", "mode", *rd.get("scan", "mode"), "expected fast or slow");
    }
  }
  assign(scan.tol, rd.number("scan", "tol"));
  if (scan.n_tau < 1 || scan.n_theta < 1) throw ConfigError("scan grids need at least one point per axis");
  if (!(scan.tau_min > 0.0) || !(scan.tau_max >= scan.tau_min)) {
    throw ConfigError("scan requires 0 < tau_min <= tau_max");
  }
  if (!(scan.theta_min > 0.0) || !(scan.theta_max >= scan.theta_min)) {
    throw ConfigError("scan requires 0 < theta_min <= theta_max");
  }
  if (!(scan.tol > 0.0)) throw ConfigError("scan.tol must be positive");
}

}  // namespace

IniDocument IniDocument::parse(std::string_view text, std::string source) {
  IniDocument doc;
  doc.source_ = std::move(source);
  std::string section;
  int line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    std::string_view line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    ++line_no;
    const auto hash = line.find_first_of("#;");
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    auto where = [&] { return doc.source_ + ":" + std::to_string(line_no) + ": "; };
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where() + "unterminated section header");
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (section.empty()) throw ConfigError(where() + "empty section name");
      doc.sections_[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ConfigError(where() + "expected key = value");
    if (section.empty()) throw ConfigError(where() + "key outside of any [section]");
    const std::string key(trim(line.substr(0, eq)));
    if (key.empty()) throw ConfigError(where() + "empty key");
    auto& entries = doc.sections_[section];
    if (entries.count(key)) throw ConfigError(where() + "duplicate key '" + section + "." + key + "'");
    entries[key] = Entry{std::string(trim(line.substr(eq + 1))), line_no};
  }
  return doc;
}

IniDocument IniDocument::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), path.string());
}

void IniDocument::set(std::string_view assignment) {
  const auto eq = assignment.find('=');
  const auto dot = assignment.substr(0, eq).find('.');
  if (eq == std::string_view::npos || dot == std::string_view::npos) {
    throw ConfigError("override '" + std::string(assignment) + "' must look like section.key=value");
  }
  const std::string section(trim(assignment.substr(0, dot)));
  const std::string key(trim(assignment.substr(dot + 1, eq - dot - 1)));
  if (section.empty() || key.empty()) {
    throw ConfigError("override '" + std::string(assignment) + "' must look like section.key=value");
  }
  set(section, key, std::string(trim(assignment.substr(eq + 1))));
}

void IniDocument::set(const std::string& section, const std::string& key, std::string value) {
  sections_[section][key] = Entry{std::move(value), 0};
}

bool IniDocument::has(const std::string& section, const std::string& key) const {
  return find(section, key) != nullptr;
}

const IniDocument::Entry* IniDocument::find(const std::string& section, const std::string& key) const {
  const auto s = sections_.find(section);
  if (s == sections_.end()) return nullptr;
  const auto k = s->second.find(key);
  return k == s->second.end() ? nullptr : &k->second;
}

ExperimentConfig parse_experiment(const IniDocument& doc) {
  Reader rd(doc);
  ExperimentConfig cfg;
  const auto kind = rd.text("system", "kind");
  if (!kind) throw ConfigError(doc.source() + ": missing required key 'system.kind'");
  cfg.kind = ruggeri::parse_kind(*kind);
  read_params(rd, cfg.kind, cfg.params);

  cfg.run.kind = cfg.kind;
  cfg.run.params = cfg.params;
  cfg.run.reference = read_reference(rd, cfg.kind);
  read_run(rd, cfg.run);
  read_scan(rd, cfg.scan);
  if (auto a = rd.numbers("sweep", "amplitudes")) cfg.sweep.amplitudes = std::move(*a);
  if (const auto d = rd.text("output", "dir")) cfg.output_dir = *d;
  if (const auto t = rd.integer("run", "threads")) {
    if (*t < 0) throw ConfigError("run.threads must be nonnegative");
    cfg.threads = to_int(*t, "run.threads");
  }
  rd.reject_unused();
  return cfg;
}

std::vector<double> linspace(double lo, double hi, int n) {
  std::vector<double> out;
  if (n <= 0) return out;
  if (n == 1) return {lo};
  out.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out.push_back(lo + (hi - lo) * i / (n - 1));
  out.back() = hi;
  return out;
}

}  // namespace xcli
