#include "fixenrich/iteration.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace fixenrich {

// ---------------------------------------------------------------------------
// Schedules

Schedule constant_schedule(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0))
    throw std::invalid_argument("schedule: constant alpha must lie in (0, 1)");
  return {ConstantSchedule{alpha}};
}

Schedule power_decay_schedule(double k, double c, double p) {
  if (!(k >= 0.0 && k < 1.0))
    throw std::invalid_argument("schedule: k must lie in [0, 1)");
  if (!(c > 0.0 && c < 1.0))
    throw std::invalid_argument("schedule: c must lie in (0, 1)");
  if (!(p > 0.0)) throw std::invalid_argument("schedule: p must be > 0");
  return {PowerDecaySchedule{k, c, p}};
}

Schedule explicit_schedule(std::vector<double> alphas) {
  if (alphas.empty())
    throw std::invalid_argument("schedule: explicit list must be nonempty");
  return {ExplicitSchedule{std::move(alphas)}};
}

double schedule_alpha(const Schedule& schedule, std::size_t n) {
  if (const auto* s = std::get_if<ConstantSchedule>(&schedule.rule))
    return s->alpha;
  if (const auto* s = std::get_if<PowerDecaySchedule>(&schedule.rule)) {
    double cn = 1.0 - s->c * std::pow(static_cast<double>(n) + 2.0, -s->p);
    cn = std::clamp(cn, 1e-12, 1.0 - 1e-12);
    return s->k + (1.0 - s->k) * cn;
  }
  const auto& s = std::get<ExplicitSchedule>(schedule.rule);
  if (n >= s.alphas.size())
    throw std::out_of_range("schedule: explicit list exhausted at index " +
                            std::to_string(n));
  return s.alphas[n];
}

ScheduleReport validate_schedule(const Schedule& schedule, double k,
                                 std::size_t horizon) {
  if (horizon < 1)
    throw std::invalid_argument("validate_schedule: horizon must be >= 1");
  ScheduleReport report;
  const std::size_t early_cut = std::max<std::size_t>(1, horizon / 10);
  double sum = 0.0;
  for (std::size_t n = 0; n < horizon; ++n) {
    double a;
    try {
      a = schedule_alpha(schedule, n);
    } catch (const std::out_of_range&) {
      report.alphas_in_range = false;
      report.first_bad_index = n;
      break;
    }
    if (!(a > k && a < 1.0)) {
      report.alphas_in_range = false;
      report.first_bad_index = n;
      break;
    }
    sum += (a - k) * (1.0 - a);
    if (n + 1 == early_cut) report.partial_sum_early = sum;
  }
  report.partial_sum_full = sum;
  // Divergence heuristic: the tail beyond horizon/10 still contributes at
  // least 5% of the early mass.
  report.flagged_divergent =
      report.partial_sum_full >= 1.05 * report.partial_sum_early &&
      report.partial_sum_full > 0.0;
  return report;
}

// ---------------------------------------------------------------------------
// Relaxation parameter helpers

namespace {

void check_bk(double b, double k) {
  if (b < 0.0) throw std::invalid_argument("b must be >= 0");
  if (!(k >= 0.0 && k < 1.0))
    throw std::invalid_argument("k must lie in [0, 1)");
}

}  // namespace

GammaRange safe_gamma_range(double b, double k) {
  check_bk(b, k);
  return {0.0, lambda_of_b(b) * (1.0 - k)};
}

GammaDecomposition decompose_gamma(double gamma, double b, double k) {
  check_bk(b, k);
  const double lambda = lambda_of_b(b);
  const double hi = lambda * (1.0 - k);
  if (!(gamma > 0.0 && gamma < hi))
    throw std::invalid_argument(
        "decompose_gamma: gamma outside the safe range (0, lambda(1-k))");
  const double r = gamma / hi;  // in (0, 1)
  if (r < 0.75) {
    const double t = 0.75 * (1.0 - k);
    return {t, gamma / (lambda * t)};
  }
  const double mu = 0.5 * (1.0 + r);
  return {gamma / (lambda * mu), mu};
}

// ---------------------------------------------------------------------------
// Drivers

std::optional<Vec> resolve_reference_point(const IterationConfig& config) {
  if (config.reference_p) return config.reference_p;
  if (config.certificate.fixed_point) return config.certificate.fixed_point;
  return known_fixed_points(config.op);
}

std::string to_string(TraceStatus status) {
  switch (status) {
    case TraceStatus::Converged:
      return "converged";
    case TraceStatus::MaxIterReached:
      return "max_iter";
    case TraceStatus::Diverged:
      return "diverged";
  }
  return "unknown";
}

namespace {

void validate_config(const IterationConfig& config) {
  if (config.x0.empty() || !all_finite(config.x0))
    throw std::invalid_argument("iteration: x0 must be nonempty and finite");
  if (config.x0.size() != config.op.dimension())
    throw std::invalid_argument("iteration: x0 dimension mismatch");
  if (!(config.tol_residual > 0.0))
    throw std::invalid_argument("iteration: tol_residual must be > 0");
  const Certificate& c = config.certificate;
  check_bk(c.b, c.k);
  if (std::abs(c.lambda * (c.b + 1.0) - 1.0) > 1e-15 * (c.b + 1.0))
    throw std::invalid_argument(
        "iteration: certificate lambda inconsistent with b");
}

Vec averaged_point(double lambda, const Vec& x, const Vec& tx) {
  if (lambda == 1.0) return tx;
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    r[i] = (1.0 - lambda) * x[i] + lambda * tx[i];
  return r;
}

Trace run_iteration(const IterationConfig& config, bool is_mann) {
  validate_config(config);
  const double lambda = config.certificate.lambda;
  const double k = config.certificate.k;

  double gamma = 0.0;
  const Schedule* schedule = nullptr;
  bool statement_form = false;
  if (is_mann) {
    const auto& scheme = std::get<MannScheme>(config.scheme);
    schedule = &scheme.schedule;
    statement_form = scheme.statement_form;
  } else {
    gamma = std::get<KrasnoselskijScheme>(config.scheme).gamma;
    if (!(gamma > 0.0))
      throw std::invalid_argument("krasnoselskij: gamma must be > 0");
  }

  const auto p = resolve_reference_point(config);
  if (p && p->size() != config.x0.size())
    throw std::invalid_argument("iteration: reference point dimension mismatch");

  const double div_bound =
      config.divergence_bound.value_or(1e12 * (1.0 + norm(config.x0)));
  if (!(div_bound > norm(config.x0)))
    throw std::invalid_argument(
        "iteration: divergence_bound must exceed ||x0||");

  Trace trace;
  trace.is_mann = is_mann;
  trace.reference_p = p;
  trace.gamma_warning =
      !is_mann && gamma >= safe_gamma_range(config.certificate.b, k).hi;

  Vec x = config.x0;
  double prev_beta = -1.0;
  for (std::size_t n = 0;; ++n) {
    const Vec tx = evaluate(config.op, x);
    const Vec tlx = averaged_point(lambda, x, tx);
    const double beta = dist(x, tlx);

    if (!trace.records.empty() && prev_beta > 1e-13)
      trace.records.back().delta = beta / prev_beta;
    if (config.record_iterates) trace.iterates.push_back(x);

    IterationRecord rec;
    rec.n = n;
    rec.beta = beta;
    if (p) rec.dist_to_p = dist(x, *p);

    const bool converged = beta <= config.tol_residual;
    const bool diverged = !converged && norm(x) > div_bound;
    if (converged || diverged || n >= config.max_iter) {
      trace.records.push_back(std::move(rec));
      trace.status = converged  ? TraceStatus::Converged
                     : diverged ? TraceStatus::Diverged
                                : TraceStatus::MaxIterReached;
      trace.stop_index = n;
      trace.final_x = std::move(x);
      return trace;
    }

    Vec x_next(x.size());
    if (is_mann) {
      double a = schedule_alpha(*schedule, n);
      if (statement_form) a = 1.0 - a;
      if (!(a > k && a < 1.0))
        throw std::invalid_argument(
            "mann: alpha_" + std::to_string(n) + " = " + std::to_string(a) +
            " outside (k, 1)");
      rec.alpha = a;
      for (std::size_t i = 0; i < x.size(); ++i)
        x_next[i] = a * x[i] + (1.0 - a) * tlx[i];
      if (p) {
        const double dn = *rec.dist_to_p;
        const double dn1 = dist(x_next, *p);
        rec.fejer_gap =
            dn * dn - (a - k) * (1.0 - a) * beta * beta - dn1 * dn1;
      }
    } else {
      for (std::size_t i = 0; i < x.size(); ++i)
        x_next[i] = (1.0 - gamma) * x[i] + gamma * tx[i];
    }
    rec.step = dist(x_next, x);
    trace.records.push_back(std::move(rec));
    prev_beta = beta;
    x = std::move(x_next);
  }
}

}  // namespace

Trace krasnoselskij(const IterationConfig& config) {
  if (!std::holds_alternative<KrasnoselskijScheme>(config.scheme))
    throw std::invalid_argument("krasnoselskij: config carries another scheme");
  return run_iteration(config, false);
}

Trace mann(const IterationConfig& config) {
  if (!std::holds_alternative<MannScheme>(config.scheme))
    throw std::invalid_argument("mann: config carries another scheme");
  return run_iteration(config, true);
}

// ---------------------------------------------------------------------------
// Audits

namespace {

bool same_point(const Vec& a, const Vec& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != b[i]) return false;
  return true;
}

}  // namespace

double fejer_audit(const Trace& trace, const Vec& p, double k) {
  if (!trace.is_mann)
    throw std::invalid_argument("fejer_audit: requires a Mann trace");
  const bool recorded_p =
      trace.reference_p && same_point(*trace.reference_p, p);
  if (!recorded_p && trace.iterates.empty())
    throw std::invalid_argument(
        "fejer_audit: reference point was not tracked and no iterates were "
        "recorded");

  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < trace.records.size(); ++i) {
    const auto& rec = trace.records[i];
    if (!rec.alpha) continue;
    const double a = *rec.alpha;
    double dn, dn1;
    if (recorded_p) {
      dn = *rec.dist_to_p;
      dn1 = *trace.records[i + 1].dist_to_p;
    } else {
      dn = dist(trace.iterates[i], p);
      dn1 = dist(trace.iterates[i + 1], p);
    }
    const double deficit =
        dn1 * dn1 - (dn * dn - (a - k) * (1.0 - a) * rec.beta * rec.beta);
    worst = std::max(worst, deficit);
  }
  return worst;
}

double summability_lhs(const Trace& trace, double k) {
  double sum = 0.0;
  for (const auto& rec : trace.records) {
    if (!rec.alpha) continue;
    const double a = *rec.alpha;
    sum += (a - k) * (1.0 - a) * rec.beta * rec.beta;
  }
  return sum;
}

std::optional<double> residual_monotonicity_audit(const Trace& trace) {
  std::optional<double> worst;
  for (const auto& rec : trace.records) {
    if (!rec.delta) continue;
    if (!worst || *rec.delta > *worst) worst = rec.delta;
  }
  return worst;
}

std::vector<double> asymptotic_regularity_audit(const Trace& trace) {
  std::vector<double> steps;
  if (trace.records.size() < 2) return steps;
  steps.reserve(trace.records.size() - 1);
  for (std::size_t i = 0; i + 1 < trace.records.size(); ++i)
    steps.push_back(trace.records[i].step);
  return steps;
}

ClusterCheck cluster_fixed_point_check(const Trace& trace,
                                       const OperatorSpec& spec, double lambda,
                                       double tol_residual) {
  if (trace.status != TraceStatus::Converged)
    throw std::invalid_argument(
        "cluster_fixed_point_check: trace did not converge");
  ClusterCheck result;
  const Vec tx = evaluate(spec, trace.final_x);
  Vec tlx(tx.size());
  for (std::size_t i = 0; i < tx.size(); ++i)
    tlx[i] = (1.0 - lambda) * trace.final_x[i] + lambda * tx[i];
  result.residual_at_final = dist(trace.final_x, tlx);

  result.dist_nonincreasing = true;
  for (std::size_t i = 0; i + 1 < trace.records.size(); ++i) {
    const auto& a = trace.records[i].dist_to_p;
    const auto& b = trace.records[i + 1].dist_to_p;
    if (!a || !b) continue;
    if (*b > *a + 1e-9) {
      result.dist_nonincreasing = false;
      break;
    }
  }
  result.passed = result.residual_at_final <= 10.0 * tol_residual &&
                  result.dist_nonincreasing;
  return result;
}

}  // namespace fixenrich
