#ifndef FIXENRICH_ITERATION_HPP
#define FIXENRICH_ITERATION_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "fixenrich/enrichment.hpp"
#include "fixenrich/operators.hpp"
#include "fixenrich/space.hpp"

namespace fixenrich {

// ---------------------------------------------------------------------------
// Control sequences

struct ConstantSchedule {
  double alpha;
};

/// alpha_n = k + (1-k) * c_n with c_n = 1 - c * (n+2)^(-p), clamped to (0,1).
/// Stays in (k, 1) for c in (0,1), p > 0; the summability behaviour of the
/// step weights is governed by p.
struct PowerDecaySchedule {
  double k;
  double c;  // in (0, 1)
  double p;  // > 0
};

struct ExplicitSchedule {
  std::vector<double> alphas;
};

struct Schedule {
  std::variant<ConstantSchedule, PowerDecaySchedule, ExplicitSchedule> rule;
};

Schedule constant_schedule(double alpha);
Schedule power_decay_schedule(double k, double c, double p);
Schedule explicit_schedule(std::vector<double> alphas);

/// alpha_n; throws when an Explicit schedule is exhausted.
double schedule_alpha(const Schedule& schedule, std::size_t n);

struct ScheduleReport {
  bool alphas_in_range = true;
  std::optional<std::size_t> first_bad_index;
  double partial_sum_early = 0.0;  // over n < horizon/10
  double partial_sum_full = 0.0;   // over n < horizon
  /// Heuristic: the partial sums of (alpha_n - k)(1 - alpha_n) still grow
  /// noticeably between horizon/10 and horizon. Not a proof of divergence.
  bool flagged_divergent = false;
};

/// Verifies k < alpha_n < 1 for n < horizon and applies the growth heuristic
/// to the partial sums of (alpha_n - k)(1 - alpha_n).
ScheduleReport validate_schedule(const Schedule& schedule, double k,
                                 std::size_t horizon);

// ---------------------------------------------------------------------------
// Relaxation parameter helpers

struct GammaRange {
  double lo = 0.0;  // exclusive
  double hi = 0.0;  // exclusive, lambda * (1 - k)
};

/// The step range backed by the decomposition gamma = lambda * mu * t with
/// t in (0, 1-k) and mu in (0, 1).
GammaRange safe_gamma_range(double b, double k);

struct GammaDecomposition {
  double t;   // in (0, 1-k)
  double mu;  // in (0, 1)
};

/// Canonical (t, mu) with lambda * mu * t = gamma: t = 0.75 * (1-k) when the
/// implied mu stays below 1, otherwise mu is placed halfway between
/// gamma / (lambda (1-k)) and 1 and t follows.
GammaDecomposition decompose_gamma(double gamma, double b, double k);

// ---------------------------------------------------------------------------
// Iteration drivers

struct KrasnoselskijScheme {
  double gamma;  // > 0
};

struct MannScheme {
  Schedule schedule;
  /// When set, alpha_n is interpreted as the weight on T in
  ///   x_{n+1} = (1 - lambda alpha_n) x_n + lambda alpha_n T x_n
  /// and is remapped to 1 - alpha_n before driving the recursion
  ///   x_{n+1} = alpha_n x_n + (1 - alpha_n) T_l x_n,
  /// which is the form every audit below is stated for. Records always carry
  /// the remapped value.
  bool statement_form = false;
};

struct IterationConfig {
  OperatorSpec op;
  Certificate certificate;
  std::variant<KrasnoselskijScheme, MannScheme> scheme;
  Vec x0;
  std::size_t max_iter = 10000;
  double tol_residual = 1e-10;
  /// Defaults to 1e12 * (1 + ||x0||).
  std::optional<double> divergence_bound;
  /// Reference fixed point for distance/Fejer records; resolved from the
  /// certificate or the operator oracle when absent.
  std::optional<Vec> reference_p;
  bool record_iterates = false;
};

struct IterationRecord {
  std::size_t n = 0;
  double beta = 0.0;  // ||x_n - T_l x_n||
  double step = 0.0;  // ||x_{n+1} - x_n||; 0 on the stopping record
  std::optional<double> dist_to_p;
  std::optional<double> alpha;      // Mann only
  std::optional<double> fejer_gap;  // Mann with known p:
                                    //   d_n^2 - (a_n-k)(1-a_n) beta_n^2
                                    //   - d_{n+1}^2
  std::optional<double> delta;      // beta_{n+1} / beta_n when beta_n > 1e-13
};

enum class TraceStatus { Converged, MaxIterReached, Diverged };

std::string to_string(TraceStatus status);

struct Trace {
  std::vector<IterationRecord> records;
  TraceStatus status = TraceStatus::MaxIterReached;
  std::size_t stop_index = 0;
  Vec final_x;
  std::vector<Vec> iterates;  // filled when record_iterates is set
  bool gamma_warning = false;  // Krasnoselskij gamma outside the safe range
  std::optional<Vec> reference_p;
  bool is_mann = false;
};

/// x_{n+1} = (1 - gamma) x_n + gamma T x_n with constant gamma.
Trace krasnoselskij(const IterationConfig& config);

/// x_{n+1} = alpha_n x_n + (1 - alpha_n) T_l x_n. The schedule must keep
/// alpha_n in (k, 1) for the certificate's k.
Trace mann(const IterationConfig& config);

/// Resolution order: config.reference_p, certificate.fixed_point, operator
/// oracle.
std::optional<Vec> resolve_reference_point(const IterationConfig& config);

// ---------------------------------------------------------------------------
// Trace audits

/// Max over steps of d_{n+1}^2 - [d_n^2 - (alpha_n - k)(1 - alpha_n)
/// beta_n^2]; nonpositive up to rounding for a valid Mann run.
double fejer_audit(const Trace& trace, const Vec& p, double k);

/// Sum of (alpha_n - k)(1 - alpha_n) beta_n^2 over recorded steps; bounded by
/// ||x_0 - p||^2 for a valid Mann run.
double summability_lhs(const Trace& trace, double k);

/// Max of beta_{n+1} / beta_n over steps with beta_n > 1e-13; empty when no
/// such step exists. At most 1 up to rounding for a valid Mann run.
std::optional<double> residual_monotonicity_audit(const Trace& trace);

/// ||x_{n+1} - x_n|| per recorded step.
std::vector<double> asymptotic_regularity_audit(const Trace& trace);

struct ClusterCheck {
  bool passed = false;
  double residual_at_final = 0.0;
  bool dist_nonincreasing = true;
};

/// Re-evaluates the averaged-map residual at the final iterate (must stay
/// within 10x the stopping tolerance) and, when a reference point is present,
/// confirms the recorded distances never increased.
ClusterCheck cluster_fixed_point_check(const Trace& trace,
                                       const OperatorSpec& spec, double lambda,
                                       double tol_residual);

}  // namespace fixenrich

#endif  // FIXENRICH_ITERATION_HPP
