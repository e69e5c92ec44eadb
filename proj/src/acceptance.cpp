#include "fixenrich/acceptance.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "fixenrich/harness.hpp"
#include "fixenrich/rng.hpp"

namespace fixenrich {

namespace fs = std::filesystem;

namespace {

/// Collects expectations; the first failure freezes the detail message.
class Expect {
 public:
  void that(bool cond, const std::string& msg) {
    if (!cond && ok_) {
      ok_ = false;
      detail_ = msg;
    }
  }
  bool ok() const { return ok_; }
  std::string detail() const { return detail_; }

 private:
  bool ok_ = true;
  std::string detail_;
};

std::string fmt(double v) { return format_double(v); }

RunOutcome run_and_write(const ExperimentConfig& config,
                         const fs::path& out_dir, double check_tol) {
  RunOutcome out = run_experiment(config, check_tol);
  fs::create_directories(out_dir);
  write_file_atomic(out_dir / (config.name + ".trace.csv"),
                    render_trace_csv(out.trace, config.csv_coordinates));
  write_file_atomic(out_dir / (config.name + ".summary.json"),
                    out.summary.dump(2) + "\n");
  return out;
}

// --- criterion 1 -----------------------------------------------------------

std::pair<bool, std::string> exact_identities() {
  Rng rng(101);
  double worst = 0.0;
  for (std::size_t dim : {1u, 2u, 10u, 50u}) {
    const Vec lo(dim, -10.0), hi(dim, 10.0);
    for (int i = 0; i < 2500; ++i) {
      const double t = rng.uniform01();
      const Vec x = rng.in_box(lo, hi);
      const Vec y = rng.in_box(lo, hi);
      const double scale = 1.0 + inner(x, x) + inner(y, y);
      for (double gap : {identity_gap_ii(t, x, y),
                         identity_gap_i(x, y, Sign::plus),
                         identity_gap_i(x, y, Sign::minus)}) {
        worst = std::max(worst, std::abs(gap) / scale);
      }
    }
  }
  return {worst <= 1e-12, "max scaled gap " + fmt(worst)};
}

// --- criterion 2 -----------------------------------------------------------

std::pair<bool, std::string> scalar_oracle_sharpness() {
  Expect e;
  const OperatorSpec op = make_scalar_linear(-3.0);
  const PairList pairs = sample_pairs_for(op, 2000, 202);

  const CheckReport at_min = check_enriched_spc(op, 0.0, 0.5, pairs);
  e.that(at_min.passed && at_min.max_violation <= 1e-12,
         "k=0.5 should be exact: max_violation " +
             fmt(at_min.max_violation));

  const CheckReport below = check_enriched_spc(op, 0.0, 0.45, pairs);
  e.that(!below.passed && below.witness.has_value(),
         "k=0.45 should fail with a witness");
  if (below.witness) {
    const double re = enriched_spc_violation(
        op, 0.0, 0.45, below.witness->first, below.witness->second);
    e.that(std::abs(re - below.max_violation) <= 1e-12,
           "witness does not reproduce the violation");
  }
  return {e.ok(), e.ok() ? "max_violation " + fmt(at_min.max_violation)
                         : e.detail()};
}

// --- criterion 3 -----------------------------------------------------------

std::pair<bool, std::string> enriched_nonexpansive_instance() {
  Expect e;
  const OperatorSpec op = make_scalar_linear(-3.0);
  const PairList pairs = sample_pairs_for(op, 2000, 303);

  const CheckReport ne = check_enriched_nonexpansive(op, 1.0, pairs);
  e.that(ne.passed && std::abs(ne.max_violation) <= 1e-12,
         "expected equality at b=1: max_violation " + fmt(ne.max_violation));
  const CheckReport spc = check_enriched_spc(op, 1.0, 0.0, pairs);
  e.that(spc.passed, "enriched inequality should hold at (b=1, k=0)");
  return {e.ok(), e.detail()};
}

// --- criterion 4 -----------------------------------------------------------

std::pair<bool, std::string> proof_chain() {
  Expect e;
  int audited = 0;
  std::uint64_t seed = 404;
  for (const CatalogEntry& entry : standard_catalog()) {
    for (double b : {0.0, 0.5, 1.0, 2.0}) {
      const auto k = oracle_min_k(entry.spec, b);
      if (!k) continue;  // no closed-form certificate at this b
      const double lambda = lambda_of_b(b);
      const PairList pairs = sample_pairs_for(entry.spec, 2000, seed++);
      const std::string tag = entry.name + " b=" + fmt(b);

      e.that(check_enriched_spc(entry.spec, b, *k, pairs).passed,
             tag + ": enrichment inequality failed at oracle k");
      e.that(check_spc(averaged(entry.spec, lambda), *k, pairs).passed,
             tag + ": averaged map not strictly pseudocontractive");
      e.that(check_cocoercive(residual(entry.spec, lambda), *k, pairs).passed,
             tag + ": residual not cocoercive");
      for (double f : {0.25, 0.5, 0.75, 0.99}) {
        const double t = f * (1.0 - *k);
        e.that(check_nonexpansive(relaxed(entry.spec, lambda, t), pairs)
                   .passed,
               tag + ": relaxed map expansive at t=" + fmt(t));
      }
      ++audited;
    }
  }
  e.that(audited >= 20, "catalog with oracle certificates is too small");
  return {e.ok(),
          e.ok() ? std::to_string(audited) + " operator/b combinations"
                 : e.detail()};
}

// --- criterion 5 -----------------------------------------------------------

std::pair<bool, std::string> relaxation_threshold() {
  Expect e;
  const OperatorSpec op = make_scalar_linear(-3.0);
  const PairList pairs = sample_pairs_for(op, 2000, 505);
  const double lambda = 1.0;

  e.that(check_nonexpansive(relaxed(op, lambda, 0.49), pairs).passed,
         "t=0.49 should be nonexpansive");
  const CheckReport above = check_nonexpansive(relaxed(op, lambda, 0.51), pairs);
  e.that(!above.passed && above.witness.has_value(),
         "t=0.51 should fail with a witness");
  if (above.witness) {
    const auto& [wx, wy] = *above.witness;
    const TransformedOperator ut = relaxed(op, lambda, 0.51);
    const double factor =
        dist(apply(ut, wx), apply(ut, wy)) / dist(wx, wy);
    e.that(std::abs(factor - 1.04) <= 1e-12,
           "witness factor " + fmt(factor) + " != 1.04");
  }
  return {e.ok(), e.detail()};
}

// --- criterion 6 -----------------------------------------------------------

std::pair<bool, std::string> krasnoselskij_rate(const AcceptanceOptions& opt) {
  Expect e;
  const ExperimentConfig good =
      load_experiment(opt.suite_dir / "scalar_kras_g04.json");
  const RunOutcome out = run_and_write(good, opt.out_dir, opt.check_tol);
  e.that(out.exit_code == kExitOk, "gamma=0.4 run exited " +
                                       std::to_string(out.exit_code));
  e.that(out.trace.status == TraceStatus::Converged,
         "gamma=0.4 run did not converge");
  const std::size_t upto =
      std::min<std::size_t>(60, out.trace.records.size() - 1);
  for (std::size_t n = 0; n <= upto; ++n) {
    const double d = out.trace.records[n].dist_to_p.value_or(-1.0);
    const double expected = std::pow(0.6, static_cast<double>(n));
    e.that(std::abs(d - expected) <= 1e-12 * expected,
           "|x_" + std::to_string(n) + "| = " + fmt(d) + " != 0.6^n");
  }
  e.that(upto == 60, "trace shorter than 60 iterations");

  const ExperimentConfig bad =
      load_experiment(opt.suite_dir / "scalar_kras_g06_diverge.json");
  const RunOutcome div = run_and_write(bad, opt.out_dir, opt.check_tol);
  e.that(div.exit_code == kExitDiverged &&
             div.trace.status == TraceStatus::Diverged,
         "gamma=0.6 run should diverge");
  e.that(div.trace.gamma_warning, "gamma=0.6 should raise the range warning");
  return {e.ok(), e.detail()};
}

// --- criterion 7 -----------------------------------------------------------

std::pair<bool, std::string> enriched_one_step_collapse(
    const AcceptanceOptions& opt) {
  Expect e;
  const ExperimentConfig config =
      load_experiment(opt.suite_dir / "scalar_enriched_mann.json");
  const RunOutcome out = run_and_write(config, opt.out_dir, opt.check_tol);
  e.that(out.exit_code == kExitOk, "run exited " +
                                       std::to_string(out.exit_code));
  e.that(out.trace.status == TraceStatus::Converged &&
             out.trace.stop_index == 1,
         "expected convergence at n=1, got n=" +
             std::to_string(out.trace.stop_index));
  e.that(out.trace.final_x.size() == 1 && out.trace.final_x[0] == 0.0,
         "x_1 should be exactly 0");
  e.that(out.trace.records.back().beta == 0.0,
         "final residual should be exactly 0");
  return {e.ok(), e.detail()};
}

// --- criteria 8, 9, 12 -----------------------------------------------------

const char* kFejerConfigs[] = {"fejer_scalar.json", "fejer_rotation.json",
                               "fejer_affine_powerdecay.json"};

std::pair<bool, std::string> fejer_inequality(const AcceptanceOptions& opt) {
  Expect e;
  for (const char* file : kFejerConfigs) {
    const ExperimentConfig config = load_experiment(opt.suite_dir / file);
    const RunOutcome out = run_and_write(config, opt.out_dir, opt.check_tol);
    e.that(out.exit_code == kExitOk,
           config.name + " exited " + std::to_string(out.exit_code));
    e.that(out.trace.reference_p.has_value(),
           config.name + ": no reference fixed point");
    if (!out.trace.reference_p) continue;
    const Vec& p = *out.trace.reference_p;
    const double d0 = dist(config.x0, p);

    const double deficit = fejer_audit(out.trace, p, out.certificate.k);
    e.that(deficit <= 1e-9 * (1.0 + d0 * d0),
           config.name + ": max deficit " + fmt(deficit));

    const double lhs = summability_lhs(out.trace, out.certificate.k);
    e.that(lhs <= d0 * d0 + 1e-6,
           config.name + ": summability " + fmt(lhs) + " > " +
               fmt(d0 * d0 + 1e-6));
  }
  return {e.ok(), e.detail()};
}

std::pair<bool, std::string> residual_monotonicity(
    const AcceptanceOptions& opt) {
  Expect e;
  for (const char* file : kFejerConfigs) {
    const ExperimentConfig config = load_experiment(opt.suite_dir / file);
    const RunOutcome out = run_experiment(config, opt.check_tol);
    const auto ratio = residual_monotonicity_audit(out.trace);
    if (ratio)
      e.that(*ratio <= 1.0 + 1e-9,
             config.name + ": max residual ratio " + fmt(*ratio));
    const auto steps = asymptotic_regularity_audit(out.trace);
    for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
      e.that(steps[i + 1] <= steps[i] + 1e-9,
             config.name + ": step norms increase at n=" + std::to_string(i));
      if (!e.ok()) break;
    }
  }
  return {e.ok(), e.detail()};
}

std::pair<bool, std::string> rotation_convergence(
    const AcceptanceOptions& opt) {
  Expect e;
  const ExperimentConfig config =
      load_experiment(opt.suite_dir / "fejer_rotation.json");
  const RunOutcome out = run_experiment(config, opt.check_tol);
  e.that(out.trace.status == TraceStatus::Converged &&
             out.trace.stop_index <= 200,
         "rotation run should converge within 200 iterations");
  e.that(out.trace.records.back().beta <= 1e-10,
         "final residual " + fmt(out.trace.records.back().beta));
  const double target = std::sqrt(3.0) / 2.0;
  for (std::size_t i = 0; i + 1 < out.trace.records.size(); ++i) {
    const double dn = out.trace.records[i].dist_to_p.value_or(0.0);
    const double dn1 = out.trace.records[i + 1].dist_to_p.value_or(0.0);
    if (dn <= 0.0) continue;
    e.that(std::abs(dn1 / dn - target) <= 1e-12,
           "norm ratio " + fmt(dn1 / dn) + " at n=" + std::to_string(i));
    if (!e.ok()) break;
  }
  return {e.ok(), e.detail()};
}

// --- criterion 10 ----------------------------------------------------------

SymMatrix random_symmetric(Rng& rng, const Vec& eigenvalues) {
  const std::size_t n = eigenvalues.size();
  // Random orthonormal frame by modified Gram-Schmidt on Gaussian columns.
  std::vector<Vec> frame;
  while (frame.size() < n) {
    Vec v = rng.normal_vec(n);
    for (const Vec& u : frame) {
      const double w = inner(u, v);
      for (std::size_t i = 0; i < n; ++i) v[i] -= w * u[i];
    }
    const double len = norm(v);
    if (len < 1e-8) continue;  // redraw a degenerate direction
    for (auto& c : v) c /= len;
    frame.push_back(std::move(v));
  }
  SymMatrix a = SymMatrix::diag(Vec(n, 0.0));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      double s = 0.0;
      for (std::size_t m = 0; m < n; ++m)
        s += eigenvalues[m] * frame[m][i] * frame[m][j];
      a(i, j) = s;
    }
  return a;
}

std::pair<bool, std::string> estimator_vs_oracle() {
  Expect e;
  double worst = 0.0;
  const std::vector<double> b_grid{0.0, 0.5, 1.0, 2.0};
  for (int trial = 0; trial < 20; ++trial) {
    Rng rng(1000 + trial);
    Vec eigenvalues(5);
    for (auto& v : eigenvalues) v = rng.uniform(-4.0, 1.0);
    const SymMatrix q = random_symmetric(rng, eigenvalues);
    const OperatorSpec spec =
        make_affine_symmetric(q, rng.normal_vec(5), whole_space());
    const PairList pairs =
        sample_pairs_for(spec, 200, 7000 + static_cast<std::uint64_t>(trial));

    for (double b : b_grid) {
      const auto oracle = symmetric_min_k(q, b);
      e.that(oracle.has_value(),
             "trial " + std::to_string(trial) + ": oracle infeasible");
      if (!oracle) continue;
      const double est = estimate_min_k(spec, b, pairs);
      worst = std::max(worst, std::abs(est - *oracle));
      e.that(std::abs(est - *oracle) <= 1e-6,
             "trial " + std::to_string(trial) + " b=" + fmt(b) +
                 ": |est-oracle| = " + fmt(std::abs(est - *oracle)));
    }
    const auto frontier = estimate_frontier(spec, b_grid, pairs);
    for (std::size_t i = 1; i < frontier.size(); ++i)
      e.that(frontier[i].second <= frontier[i - 1].second + 1e-12,
             "trial " + std::to_string(trial) + ": frontier not nonincreasing");
  }
  return {e.ok(), e.ok() ? "max |est-oracle| " + fmt(worst) : e.detail()};
}

// --- criterion 11 ----------------------------------------------------------

std::pair<bool, std::string> scheme_equivalence() {
  Expect e;
  struct Setup {
    OperatorSpec op;
    double b, k, alpha;
    Vec x0;
  };
  const std::vector<Setup> setups = {
      {make_scalar_linear(-3.0), 0.0, 0.5, 0.75, {1.0}},
      {make_scalar_linear(-3.0), 1.0, 0.0, 0.6, {5.0}},
      {make_rotation2d(std::numbers::pi / 3.0, ball({0.0, 0.0}, 2.0)), 0.0,
       0.0, 0.7, {1.0, 0.5}},
      {make_affine_symmetric(SymMatrix::diag({-3.0, 0.5}), {1.0, 1.0}), 0.0,
       0.5, 0.8, {2.0, 2.0}},
      {make_reflection({4.0}, ball({2.0}, 3.0)), 0.0, 0.0, 0.55, {0.0}},
  };

  int idx = 0;
  for (const Setup& setup : setups) {
    const std::string tag = "setup " + std::to_string(idx++);
    Certificate cert = make_certificate(setup.b, setup.k, Provenance::Manual);
    cert.fixed_point = known_fixed_points(setup.op);

    IterationConfig base;
    base.op = setup.op;
    base.certificate = cert;
    base.x0 = setup.x0;
    base.max_iter = 400;
    base.tol_residual = 1e-10;
    base.record_iterates = true;

    IterationConfig mc = base;
    mc.scheme = MannScheme{constant_schedule(setup.alpha)};
    const Trace tm = mann(mc);

    const double gamma = cert.lambda * (1.0 - setup.alpha);
    IterationConfig kc = base;
    kc.scheme = KrasnoselskijScheme{gamma};
    const Trace tk = krasnoselskij(kc);

    e.that(tm.status == tk.status && tm.records.size() == tk.records.size(),
           tag + ": trace shapes differ");
    if (tm.records.size() == tk.records.size()) {
      for (std::size_t i = 0; i < tm.records.size(); ++i) {
        const auto& a = tm.records[i];
        const auto& b2 = tk.records[i];
        e.that(a.n == b2.n &&
                   std::abs(a.beta - b2.beta) <= 1e-12 * (1.0 + a.beta) &&
                   std::abs(a.step - b2.step) <= 1e-12 * (1.0 + a.step),
               tag + ": records differ at n=" + std::to_string(i));
        if (a.dist_to_p && b2.dist_to_p)
          e.that(std::abs(*a.dist_to_p - *b2.dist_to_p) <=
                     1e-12 * (1.0 + *a.dist_to_p),
                 tag + ": distances differ at n=" + std::to_string(i));
        if (!e.ok()) break;
      }
    }
    for (std::size_t i = 0; i < tm.final_x.size(); ++i)
      e.that(std::abs(tm.final_x[i] - tk.final_x[i]) <=
                 1e-12 * (1.0 + std::abs(tm.final_x[i])),
             tag + ": final points differ");

    // The relaxed-map decomposition reproduces the same recursion.
    const auto dec = decompose_gamma(gamma, setup.b, setup.k);
    e.that(std::abs(cert.lambda * dec.mu * dec.t - gamma) <= 1e-14,
           tag + ": decomposition product mismatch");
    const TransformedOperator ut = relaxed(setup.op, cert.lambda, dec.t);
    for (std::size_t i = 0; i + 1 < tk.iterates.size(); ++i) {
      const Vec& x = tk.iterates[i];
      const Vec utx = apply(ut, x);
      double err = 0.0;
      for (std::size_t j = 0; j < x.size(); ++j) {
        const double via_vmu = (1.0 - dec.mu) * x[j] + dec.mu * utx[j];
        err = std::max(err, std::abs(via_vmu - tk.iterates[i + 1][j]));
      }
      e.that(err <= 1e-12 * (1.0 + norm(x)),
             tag + ": relaxed-map identity fails at n=" + std::to_string(i));
      if (!e.ok()) break;
    }
  }
  return {e.ok(), e.detail()};
}

// --- criterion 13 ----------------------------------------------------------

std::pair<bool, std::string> determinism(const AcceptanceOptions& opt) {
  Expect e;
  const char* files[] = {"scalar_kras_g04.json", "scalar_kras_g06_diverge.json",
                         "scalar_enriched_mann.json", "fejer_scalar.json",
                         "fejer_rotation.json", "fejer_affine_powerdecay.json"};
  for (const char* file : files) {
    const ExperimentConfig config = load_experiment(opt.suite_dir / file);
    const RunOutcome a = run_and_write(config, opt.out_dir / "run_a",
                                       opt.check_tol);
    const RunOutcome b = run_and_write(config, opt.out_dir / "run_b",
                                       opt.check_tol);
    e.that(render_trace_csv(a.trace, config.csv_coordinates) ==
               render_trace_csv(b.trace, config.csv_coordinates),
           config.name + ": trace CSVs differ between runs");
    Json sa = a.summary, sb = b.summary;
    sa.erase("wall_time_ms");
    sb.erase("wall_time_ms");
    e.that(sa.dump() == sb.dump(),
           config.name + ": summaries differ between runs");
  }
  return {e.ok(), e.detail()};
}

}  // namespace

std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& options) {
  std::vector<CriterionResult> results;
  const auto add = [&](int id, const std::string& name,
                       const std::function<std::pair<bool, std::string>()>&
                           fn) {
    CriterionResult r;
    r.id = id;
    r.name = name;
    try {
      const auto [ok, detail] = fn();
      r.passed = ok;
      r.detail = detail;
    } catch (const std::exception& ex) {
      r.passed = false;
      r.detail = std::string("exception: ") + ex.what();
    }
    results.push_back(std::move(r));
  };

  add(1, "exact-identities", exact_identities);
  add(2, "scalar-oracle-sharpness", scalar_oracle_sharpness);
  add(3, "enriched-nonexpansive-instance", enriched_nonexpansive_instance);
  add(4, "proof-chain", proof_chain);
  add(5, "relaxation-threshold", relaxation_threshold);
  add(6, "krasnoselskij-rate",
      [&] { return krasnoselskij_rate(options); });
  add(7, "enriched-one-step-collapse",
      [&] { return enriched_one_step_collapse(options); });
  add(8, "fejer-audit", [&] { return fejer_inequality(options); });
  add(9, "residual-monotonicity",
      [&] { return residual_monotonicity(options); });
  add(10, "estimator-vs-oracle", estimator_vs_oracle);
  add(11, "scheme-equivalence", scheme_equivalence);
  add(12, "rotation-convergence",
      [&] { return rotation_convergence(options); });
  add(13, "determinism", [&] { return determinism(options); });
  return results;
}

}  // namespace fixenrich
