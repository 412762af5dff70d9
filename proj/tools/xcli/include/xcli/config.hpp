#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "ruggeri/models.hpp"
#include "ruggeri/modes.hpp"
#include "ruggeri/sim1d.hpp"

namespace xcli {

/// Flat key=value text with [section] headers. '#' and ';' start comments.
class IniDocument {
 public:
  struct Entry {
    std::string value;
    int line{0};  ///< 0 for command-line overrides
  };

  static IniDocument parse(std::string_view text, std::string source = "<config>");
  static IniDocument load(const std::filesystem::path& path);

  /// Applies "section.key=value"; throws ConfigError when malformed.
  void set(std::string_view assignment);
  void set(const std::string& section, const std::string& key, std::string value);

  bool has(const std::string& section, const std::string& key) const;
  const Entry* find(const std::string& section, const std::string& key) const;
  const std::map<std::string, std::map<std::string, Entry>>& sections() const { return sections_; }
  const std::string& source() const { return source_; }

 private:
  std::map<std::string, std::map<std::string, Entry>> sections_;
  std::string source_{"<config>"};
};

enum class ScanType { Gnl, Threshold };

struct ScanConfig {
  ScanType type{ScanType::Gnl};
  double tau_min{0.2};
  double tau_max{1.2};
  int n_tau{11};
  double theta_min{1.0};
  double theta_max{1.0};
  int n_theta{1};
  ruggeri::LagrangianMode mode{ruggeri::LagrangianMode::Fast};
  double tol{1e-8};
};

struct SweepConfig {
  std::vector<double> amplitudes;
};

/// Everything a subcommand may need. Only [system] kind and the fluid
/// parameters the kind uses are mandatory; the rest falls back to defaults.
struct ExperimentConfig {
  ruggeri::SystemKind kind{ruggeri::SystemKind::E4};
  ruggeri::FluidParams params;
  ruggeri::RunConfig run;
  ScanConfig scan;
  SweepConfig sweep;
  std::string output_dir{"."};
  int threads{0};  ///< 0 = RUGGERI_THREADS or hardware concurrency
};

/// Builds and validates the experiment. Unknown sections or keys, keys that
/// do not apply to the kind, and unparsable values throw ConfigError.
ExperimentConfig parse_experiment(const IniDocument& doc);

/// Evenly spaced values, inclusive; a single point when n == 1.
std::vector<double> linspace(double lo, double hi, int n);

}  // namespace xcli
