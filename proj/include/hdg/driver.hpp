#pragma once

#include "hdg/analysis.hpp"
#include "hdg/solver.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace hdg {

enum class Command { converge, solve, verify };
enum class Material { constant, c1, c2 };
enum class Excitation { planewave, gaussian };

/// Exit codes of the command-line driver.
enum ExitCode : int { exit_ok = 0, exit_verification_failed = 1, exit_not_converged = 2, exit_bad_config = 3 };

struct RunConfig {
  Command command = Command::converge;
  double kappa = 5.0;
  double theta = 0.0;  // set to pi/6 by default_config()
  int degree = 1;
  std::vector<std::size_t> levels{4, 8, 16, 32};
  double alpha = 1.0;
  double beta = 1.0;
  SolverKind solver = SolverKind::direct;
  double tol = default_iterative_tolerance;
  int max_iter = 5000;
  Material material = Material::constant;
  double c_min = 0.02;
  double c_max = 50.0;
  Excitation excitation = Excitation::planewave;
  std::string out;       // empty: stdout
  std::size_t samples = 101;
  std::size_t mesh_n = 0;  // solve: cells per side, 0 derives it from h = 2 pi / (8 kappa)
  bool timing = false;     // write wall times into the CSV (breaks byte stability)
  bool flip_beta_sign = false;

  /// Throws std::invalid_argument on kappa <= 0, unsorted levels, or an unsupported degree.
  void validate() const;
};

RunConfig default_config(Command command);

/// Parses argv (argv[1] is the subcommand). Throws std::invalid_argument on bad input;
/// returns std::nullopt after printing help.
std::optional<RunConfig> parse_command_line(int argc, const char* const* argv, std::ostream& help_out);

/// One "# key = value" line per setting.
void write_config_header(std::ostream& os, const RunConfig& config);

/// Material profiles on the (-1,1)^2 domain with the obstacle of radius 1/2 at the origin.
double material_c1(const Point& x, double c_min, double c_max);
double material_c2(const Point& x, double c_min, double c_max);

/// Gaussian peak -10 j kappa exp(-20 (y + 1/10)^2) on the left edge, zero elsewhere.
Complex gaussian_excitation(const Point& x, const Point& n, double kappa);

struct LevelRecord {
  LevelErrors errors;
  IdentityResiduals identities;
  StabilityCheck stability;
  SolverStats stats;
};

struct ConvergenceReport {
  std::vector<LevelRecord> levels;
  RateFit u, sigma, projected_u, trace, flux_trace;
};

/// Plane-wave rate study; writes the CSV to `os`.
ConvergenceReport run_converge(const RunConfig& config, std::ostream& os);

struct SolveReport {
  std::size_t n = 0;
  SolverStats stats;
  IdentityResiduals identities;
  std::size_t samples_written = 0;
  std::size_t samples_skipped = 0;
  std::optional<LevelErrors> errors;  // plane-wave runs only
  double max_sample_error = 0.0;      // plane-wave runs only
};

/// Single solve; writes Re/Im/|u_h| on a samples x samples grid to `os`.
SolveReport run_solve(const RunConfig& config, std::ostream& os);

struct VerifyItem {
  std::string name;
  bool passed = false;
  double observed = 0.0;
  double threshold = 0.0;
};

/// Invariant and identity suite; one line per check written to `os`.
std::vector<VerifyItem> run_verify(const RunConfig& config, std::ostream& os);

/// Full CLI entry point returning an ExitCode.
int run_main(int argc, const char* const* argv);

}  // namespace hdg
