#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "ruggeri/models.hpp"
#include "xcli/config.hpp"

namespace xcli {

enum ExitCode : int { kExitOk = 0, kExitDomain = 1, kExitOracle = 2, kExitUsage = 64 };

/// Tolerances of the analyze cross-checks.
struct OracleTolerances {
  double speed{1e-9};     ///< closed-form vs numeric eigenvalue, relative to max(1, |lambda|)
  double residual{1e-9};  ///< ||(-lambda A0 + A1) r|| / ||r||
  double gnl{1e-5};       ///< closed-form vs finite-difference r . grad(lambda), relative
  double imag{1e-9};      ///< imaginary part accepted by the generic eigensolver
};

struct AnalyzeRequest {
  ruggeri::SystemKind kind{ruggeri::SystemKind::E4};
  ruggeri::FluidParams params;
  ruggeri::Vec state;
  OracleTolerances tol;
};

/// Per-mode table with oracle residuals. Returns kExitOracle when any check
/// fails; throws ruggeri::Error for inadmissible input.
int cmd_analyze(const AnalyzeRequest& req, std::ostream& out);

/// Writes series.csv, snapshot_<t>.csv and summary into `dir`.
int cmd_simulate(const ExperimentConfig& cfg, const std::filesystem::path& dir, std::ostream& log);

/// GNL sign grid or small-tau threshold table as CSV.
int cmd_scan(const ExperimentConfig& cfg, std::ostream& csv);

/// Amplitude sweep: CSV rows plus a bracket line, also written to `dir`.
int cmd_sweep(const ExperimentConfig& cfg, const std::filesystem::path& dir, std::ostream& out);

/// Full command-line entry point; maps errors to exit codes.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace xcli
