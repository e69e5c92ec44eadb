#ifndef FIXENRICH_HARNESS_HPP
#define FIXENRICH_HARNESS_HPP

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <variant>

#include "fixenrich/json_io.hpp"

namespace fixenrich {

// Process exit codes shared by the CLI subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitAudit = 2;     // audit failure or no convergence
inline constexpr int kExitDiverged = 3;

/// check_tol, overridable through the FIXENRICH_TOL environment variable.
double resolve_check_tol();

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

/// Writes through a temp file in the same directory, then renames.
void write_file_atomic(const std::filesystem::path& path,
                       const std::string& content);

// ---------------------------------------------------------------------------
// Experiments

enum class EnrichmentMode { Manual, Oracle, Estimate };

struct ExperimentConfig {
  std::string name;
  OperatorSpec op;
  EnrichmentMode mode = EnrichmentMode::Manual;
  double b = 0.0;
  double k = 0.0;  // Manual only
  std::variant<KrasnoselskijScheme, MannScheme> scheme;
  Vec x0;
  std::size_t max_iter = 10000;
  double tol_residual = 1e-10;
  std::optional<double> divergence_bound;
  std::uint64_t seed = 0;
  std::size_t sample_count = 2000;
  bool record_iterates = false;
  bool csv_coordinates = false;
};

ExperimentConfig parse_experiment(const Json& j);
ExperimentConfig load_experiment(const std::filesystem::path& path);

/// Builds the concrete certificate for the configured enrichment mode.
/// Oracle resolution falls back to the nonexpansiveness certificate (k = 0)
/// for operators without a closed-form minimal k.
Certificate resolve_certificate(const ExperimentConfig& config);

struct RunOutcome {
  int exit_code = kExitOk;
  Trace trace;
  Certificate certificate;
  Json summary;  // includes wall_time_ms
};

RunOutcome run_experiment(const ExperimentConfig& config, double check_tol);

/// Trace CSV: columns n,beta,step,dist_to_p,alpha,fejer_gap,delta (plus a
/// bracketed coordinate column when requested); absent optionals are empty
/// cells; newline-only line endings.
std::string render_trace_csv(const Trace& trace, bool coordinates);

// ---------------------------------------------------------------------------
// Subcommands

/// Runs one experiment config and writes <name>.trace.csv and
/// <name>.summary.json under out_dir.
int cmd_run(const std::filesystem::path& config_path,
            const std::filesystem::path& out_dir, double check_tol);

struct CheckOptions {
  OperatorSpec op;
  double b = 0.0;
  std::optional<double> k;  // absent => estimate from samples
  std::size_t samples = 2000;
  std::uint64_t seed = 0;
};

/// Runs the enrichment inequality, its averaged form, residual cocoercivity
/// and relaxed-map nonexpansiveness on one sampled pair set and prints the
/// reports as JSON.
int cmd_check(const CheckOptions& options, double check_tol);

/// Replays the bundled acceptance experiments and property checks; prints a
/// pass/fail table ordered by criterion.
int cmd_suite(const std::filesystem::path& suite_dir,
              const std::filesystem::path& out_dir, double check_tol);

/// Flag mini-grammar: scalar:<a> | rotation:<theta> | reflection:<c,...> |
/// identity | matrix:<path-to-json> | saturation[:<dim>].
OperatorSpec parse_operator_flag(const std::string& text);

}  // namespace fixenrich

#endif  // FIXENRICH_HARNESS_HPP
