#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fixenrich/iteration.hpp"

using namespace fixenrich;

namespace {

IterationConfig base_config(OperatorSpec op, double b, double k, Vec x0) {
  IterationConfig config;
  config.op = std::move(op);
  config.certificate = make_certificate(b, k, Provenance::Manual);
  config.certificate.fixed_point = known_fixed_points(config.op);
  config.x0 = std::move(x0);
  config.max_iter = 500;
  config.tol_residual = 1e-10;
  return config;
}

}  // namespace

TEST_CASE("schedule evaluation") {
  const Schedule c = constant_schedule(0.75);
  CHECK(schedule_alpha(c, 0) == 0.75);
  CHECK(schedule_alpha(c, 1000) == 0.75);

  const Schedule pd = power_decay_schedule(0.5, 0.5, 1.0);
  CHECK(schedule_alpha(pd, 0) == doctest::Approx(0.875).epsilon(1e-15));

  const Schedule ex = explicit_schedule({0.6, 0.7});
  CHECK(schedule_alpha(ex, 1) == 0.7);
  CHECK_THROWS_AS(schedule_alpha(ex, 2), std::out_of_range);

  CHECK_THROWS_AS(constant_schedule(0.0), std::invalid_argument);
  CHECK_THROWS_AS(constant_schedule(1.0), std::invalid_argument);
  CHECK_THROWS_AS(power_decay_schedule(0.5, 1.5, 1.0), std::invalid_argument);
  CHECK_THROWS_AS(power_decay_schedule(0.5, 0.5, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(explicit_schedule({}), std::invalid_argument);
}

TEST_CASE("schedule validation and the divergence heuristic") {
  const ScheduleReport constant =
      validate_schedule(constant_schedule(0.75), 0.5, 1000);
  CHECK(constant.alphas_in_range);
  CHECK(constant.flagged_divergent);

  const ScheduleReport harmonic =
      validate_schedule(power_decay_schedule(0.5, 0.5, 1.0), 0.5, 100000);
  CHECK(harmonic.alphas_in_range);
  CHECK(harmonic.flagged_divergent);

  const ScheduleReport summable =
      validate_schedule(power_decay_schedule(0.5, 0.5, 2.0), 0.5, 100000);
  CHECK(summable.alphas_in_range);
  CHECK_FALSE(summable.flagged_divergent);

  const ScheduleReport bad =
      validate_schedule(constant_schedule(0.4), 0.5, 100);
  CHECK_FALSE(bad.alphas_in_range);
  CHECK(bad.first_bad_index == 0);

  const ScheduleReport exhausted =
      validate_schedule(explicit_schedule({0.6, 0.7}), 0.5, 10);
  CHECK_FALSE(exhausted.alphas_in_range);
  CHECK(exhausted.first_bad_index == 2);

  CHECK_THROWS_AS(validate_schedule(constant_schedule(0.75), 0.5, 0),
                  std::invalid_argument);
}

TEST_CASE("safe gamma range") {
  CHECK(safe_gamma_range(0.0, 0.5).hi == 0.5);
  CHECK(safe_gamma_range(1.0, 0.0).hi == 0.5);
  CHECK(safe_gamma_range(0.0, 0.0).hi == 1.0);
  CHECK(safe_gamma_range(0.0, 0.5).lo == 0.0);
}

TEST_CASE("gamma decomposition") {
  const auto d = decompose_gamma(0.25, 0.0, 0.5);
  CHECK(d.t == 0.375);
  CHECK(d.mu == doctest::Approx(2.0 / 3.0).epsilon(1e-15));

  // Small gamma keeps the canonical t and shrinks mu.
  const auto tiny = decompose_gamma(1e-6, 0.0, 0.5);
  CHECK(tiny.t == 0.375);
  CHECK(tiny.mu < 1e-5);

  // Near the top of the range t is raised so mu stays below 1.
  const auto top = decompose_gamma(0.49, 0.0, 0.5);
  CHECK(top.t > 0.375);
  CHECK(top.t < 0.5);
  CHECK(top.mu < 1.0);

  for (double b : {0.0, 0.5, 2.0}) {
    for (double k : {0.0, 0.3, 0.9}) {
      const double hi = safe_gamma_range(b, k).hi;
      for (double f : {0.01, 0.3, 0.74, 0.76, 0.95, 0.999}) {
        const double gamma = f * hi;
        const auto dec = decompose_gamma(gamma, b, k);
        CHECK(dec.t > 0.0);
        CHECK(dec.t < 1.0 - k);
        CHECK(dec.mu > 0.0);
        CHECK(dec.mu < 1.0);
        CHECK(std::abs(lambda_of_b(b) * dec.mu * dec.t - gamma) <= 1e-14);
      }
    }
  }
  CHECK_THROWS_AS(decompose_gamma(0.5, 0.0, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(decompose_gamma(0.0, 0.0, 0.5), std::invalid_argument);
}

TEST_CASE("krasnoselskij on the identity stops immediately") {
  auto config = base_config(make_scalar_linear(1.0), 0.0, 0.0, {3.0});
  config.scheme = KrasnoselskijScheme{0.5};
  const Trace trace = krasnoselskij(config);
  CHECK(trace.status == TraceStatus::Converged);
  CHECK(trace.stop_index == 0);
  CHECK(trace.records.size() == 1);
  CHECK(trace.records[0].beta == 0.0);
}

TEST_CASE("krasnoselskij one-step kill at gamma 0.25") {
  auto config = base_config(make_scalar_linear(-3.0), 0.0, 0.5, {1.0});
  config.scheme = KrasnoselskijScheme{0.25};
  const Trace trace = krasnoselskij(config);
  CHECK(trace.status == TraceStatus::Converged);
  CHECK(trace.stop_index == 1);
  CHECK(trace.final_x[0] == 0.0);
  CHECK(trace.records[0].beta == 4.0);
  CHECK(trace.records[0].step == 1.0);
  CHECK(trace.records[1].beta == 0.0);
  CHECK_FALSE(trace.gamma_warning);
}

TEST_CASE("krasnoselskij geometric rate at gamma 0.4") {
  auto config = base_config(make_scalar_linear(-3.0), 0.0, 0.5, {1.0});
  config.scheme = KrasnoselskijScheme{0.4};
  const Trace trace = krasnoselskij(config);
  CHECK(trace.status == TraceStatus::Converged);
  for (std::size_t n = 0; n < std::min<std::size_t>(trace.records.size(), 40);
       ++n) {
    const double expected = std::pow(0.6, static_cast<double>(n));
    CHECK(std::abs(*trace.records[n].dist_to_p - expected) <=
          1e-12 * expected);
  }
}

TEST_CASE("krasnoselskij outside the safe range diverges with a warning") {
  auto config = base_config(make_scalar_linear(-3.0), 0.0, 0.5, {1.0});
  config.scheme = KrasnoselskijScheme{0.6};
  config.max_iter = 10000;
  const Trace trace = krasnoselskij(config);
  CHECK(trace.status == TraceStatus::Diverged);
  CHECK(trace.gamma_warning);

  config.scheme = KrasnoselskijScheme{0.0};
  CHECK_THROWS_AS(krasnoselskij(config), std::invalid_argument);
}

TEST_CASE("iteration config validation") {
  auto config = base_config(make_scalar_linear(-3.0), 0.0, 0.5, {1.0});
  config.scheme = KrasnoselskijScheme{0.25};

  auto bad = config;
  bad.x0 = {};
  CHECK_THROWS_AS(krasnoselskij(bad), std::invalid_argument);

  bad = config;
  bad.tol_residual = 0.0;
  CHECK_THROWS_AS(krasnoselskij(bad), std::invalid_argument);

  bad = config;
  bad.divergence_bound = 0.5;  // not above ||x0||
  CHECK_THROWS_AS(krasnoselskij(bad), std::invalid_argument);

  bad = config;
  bad.certificate.lambda = 0.7;  // inconsistent with b = 0
  CHECK_THROWS_AS(krasnoselskij(bad), std::invalid_argument);

  bad = config;
  CHECK_THROWS_AS(mann(bad), std::invalid_argument);  // wrong scheme
}

TEST_CASE("mann collapse for the enriched scalar instance") {
  auto config = base_config(make_scalar_linear(-3.0), 1.0, 0.0, {5.0});
  config.scheme = MannScheme{constant_schedule(0.5)};
  const Trace trace = mann(config);
  CHECK(trace.status == TraceStatus::Converged);
  CHECK(trace.stop_index == 1);
  CHECK(trace.final_x[0] == 0.0);
  CHECK(trace.records[0].alpha == 0.5);
  CHECK(trace.records[0].beta == 10.0);
}

TEST_CASE("mann on the identity stops immediately") {
  auto config = base_config(make_scalar_linear(1.0), 0.0, 0.0, {2.0});
  config.scheme = MannScheme{constant_schedule(0.3)};
  const Trace trace = mann(config);
  CHECK(trace.status == TraceStatus::Converged);
  CHECK(trace.stop_index == 0);
}

TEST_CASE("mann rotation contracts by the averaged modulus") {
  auto config = base_config(make_rotation2d(std::numbers::pi / 3.0), 0.0, 0.0,
                            {1.0, 0.0});
  config.scheme = MannScheme{constant_schedule(0.5)};
  const Trace trace = mann(config);
  CHECK(trace.status == TraceStatus::Converged);
  const double target = std::sqrt(3.0) / 2.0;
  for (std::size_t i = 0; i + 1 < trace.records.size(); ++i) {
    const double dn = *trace.records[i].dist_to_p;
    const double dn1 = *trace.records[i + 1].dist_to_p;
    if (dn == 0.0) continue;
    CHECK(std::abs(dn1 / dn - target) <= 1e-12);
  }
}

TEST_CASE("mann rejects schedules leaving (k, 1)") {
  auto config = base_config(make_scalar_linear(-3.0), 0.0, 0.5, {1.0});
  config.scheme = MannScheme{constant_schedule(0.4)};  // below k
  CHECK_THROWS_AS(mann(config), std::invalid_argument);

  // alpha_0 = 0.6 does not reach the fixed point, so n=1 needs an entry.
  config.scheme = MannScheme{explicit_schedule({0.6})};
  CHECK_THROWS_AS(mann(config), std::out_of_range);
}

TEST_CASE("statement-form schedules remap to the proof-form weight") {
  auto proof = base_config(make_scalar_linear(-3.0), 0.0, 0.5, {1.0});
  proof.scheme = MannScheme{constant_schedule(0.75)};
  const Trace a = mann(proof);

  auto statement = proof;
  statement.scheme = MannScheme{constant_schedule(0.25), true};
  const Trace b = mann(statement);

  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CHECK(a.records[i].beta == b.records[i].beta);
    CHECK(a.records[i].alpha == b.records[i].alpha);
  }
  CHECK(a.final_x == b.final_x);
}

TEST_CASE("fejer audit") {
  auto config = base_config(make_scalar_linear(-3.0), 0.0, 0.5, {1.0});
  config.scheme = MannScheme{constant_schedule(0.75)};
  const Trace trace = mann(config);
  CHECK(fejer_audit(trace, {0.0}, 0.5) == 0.0);

  // Per-record gap obeys the same bound.
  for (const auto& rec : trace.records)
    if (rec.fejer_gap) {
      const double d = *rec.dist_to_p;
      CHECK(*rec.fejer_gap >= -1e-9 * (1.0 + d * d));
    }

  auto rot = base_config(make_rotation2d(std::numbers::pi / 3.0), 0.0, 0.0,
                         {1.0, 0.0});
  rot.scheme = MannScheme{constant_schedule(0.5)};
  const Trace rt = mann(rot);
  CHECK(fejer_audit(rt, {0.0, 0.0}, 0.0) <= 1e-9 * 2.0);
  CHECK(summability_lhs(rt, 0.0) <= 1.0 + 1e-6);

  CHECK_THROWS_AS(fejer_audit(rt, {1.0, 1.0}, 0.0), std::invalid_argument);

  auto kras = base_config(make_scalar_linear(-3.0), 0.0, 0.5, {1.0});
  kras.scheme = KrasnoselskijScheme{0.25};
  CHECK_THROWS_AS(fejer_audit(krasnoselskij(kras), {0.0}, 0.5),
                  std::invalid_argument);
}

TEST_CASE("residual monotonicity audit") {
  auto id = base_config(make_scalar_linear(1.0), 0.0, 0.0, {2.0});
  id.scheme = MannScheme{constant_schedule(0.3)};
  CHECK_FALSE(residual_monotonicity_audit(mann(id)).has_value());

  auto scalar = base_config(make_scalar_linear(-3.0), 0.0, 0.5, {1.0});
  scalar.scheme = MannScheme{constant_schedule(0.75)};
  const auto single = residual_monotonicity_audit(mann(scalar));
  REQUIRE(single.has_value());
  CHECK(*single == 0.0);

  auto rot = base_config(make_rotation2d(std::numbers::pi / 3.0), 0.0, 0.0,
                         {1.0, 0.0});
  rot.scheme = MannScheme{constant_schedule(0.5)};
  rot.max_iter = 50;
  rot.tol_residual = 1e-30;  // force the full horizon
  const auto ratio = residual_monotonicity_audit(mann(rot));
  REQUIRE(ratio.has_value());
  CHECK(*ratio <= 1.0 + 1e-9);
  CHECK(*ratio == doctest::Approx(std::sqrt(3.0) / 2.0).epsilon(1e-12));
}

TEST_CASE("asymptotic regularity audit") {
  auto id = base_config(make_scalar_linear(1.0), 0.0, 0.0, {2.0});
  id.scheme = KrasnoselskijScheme{0.5};
  CHECK(asymptotic_regularity_audit(krasnoselskij(id)).empty());

  auto scalar = base_config(make_scalar_linear(-3.0), 0.0, 0.5, {1.0});
  scalar.scheme = KrasnoselskijScheme{0.4};
  const auto steps = asymptotic_regularity_audit(krasnoselskij(scalar));
  REQUIRE(steps.size() > 10);
  CHECK(steps[0] == doctest::Approx(1.6).epsilon(1e-14));
  for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
    CHECK(steps[i + 1] <= steps[i]);
    if (steps[i + 1] > 0.0)
      CHECK(steps[i + 1] / steps[i] ==
            doctest::Approx(0.6).epsilon(1e-12));
  }
}

TEST_CASE("cluster fixed point check") {
  auto config = base_config(make_reflection({4.0}, ball({2.0}, 3.0)), 0.0,
                            0.0, {0.0});
  config.scheme = KrasnoselskijScheme{0.5};
  const Trace trace = krasnoselskij(config);
  CHECK(trace.status == TraceStatus::Converged);
  CHECK(trace.final_x[0] == 2.0);

  const auto check = cluster_fixed_point_check(trace, config.op, 1.0,
                                               config.tol_residual);
  CHECK(check.passed);
  CHECK(check.residual_at_final <= 10.0 * config.tol_residual);
  CHECK(check.dist_nonincreasing);

  auto short_run = base_config(make_rotation2d(std::numbers::pi / 3.0), 0.0,
                               0.0, {1.0, 0.0});
  short_run.scheme = KrasnoselskijScheme{0.5};
  short_run.max_iter = 3;
  const Trace unfinished = krasnoselskij(short_run);
  CHECK(unfinished.status == TraceStatus::MaxIterReached);
  CHECK_THROWS_AS(cluster_fixed_point_check(unfinished, short_run.op, 1.0,
                                            short_run.tol_residual),
                  std::invalid_argument);
}

TEST_CASE("mann with a constant schedule matches krasnoselskij") {
  auto mc = base_config(make_scalar_linear(-3.0), 1.0, 0.0, {2.0});
  mc.scheme = MannScheme{constant_schedule(0.6)};
  mc.record_iterates = true;
  const Trace tm = mann(mc);

  const double gamma = mc.certificate.lambda * (1.0 - 0.6);
  auto kc = mc;
  kc.scheme = KrasnoselskijScheme{gamma};
  const Trace tk = krasnoselskij(kc);

  REQUIRE(tm.records.size() == tk.records.size());
  CHECK(tm.status == tk.status);
  for (std::size_t i = 0; i < tm.records.size(); ++i) {
    CHECK(std::abs(tm.records[i].beta - tk.records[i].beta) <=
          1e-12 * (1.0 + tm.records[i].beta));
    CHECK(std::abs(tm.records[i].step - tk.records[i].step) <=
          1e-12 * (1.0 + tm.records[i].step));
  }

  // The decomposition gamma = lambda mu t reproduces the same step.
  const auto dec = decompose_gamma(gamma, 1.0, 0.0);
  const TransformedOperator ut = relaxed(kc.op, kc.certificate.lambda, dec.t);
  for (std::size_t i = 0; i + 1 < tk.iterates.size(); ++i) {
    const Vec utx = apply(ut, tk.iterates[i]);
    for (std::size_t j = 0; j < utx.size(); ++j) {
      const double via_vmu =
          (1.0 - dec.mu) * tk.iterates[i][j] + dec.mu * utx[j];
      CHECK(std::abs(via_vmu - tk.iterates[i + 1][j]) <=
            1e-12 * (1.0 + std::abs(tk.iterates[i][j])));
    }
  }
}

TEST_CASE("trace statuses are mutually consistent") {
  auto config = base_config(make_scalar_linear(-3.0), 0.0, 0.5, {1.0});
  config.scheme = KrasnoselskijScheme{0.4};
  config.max_iter = 5;  // too few to converge
  const Trace trace = krasnoselskij(config);
  CHECK(trace.status == TraceStatus::MaxIterReached);
  CHECK(trace.records.size() == 6);
  CHECK(trace.records.back().beta > config.tol_residual);
  CHECK(to_string(trace.status) == "max_iter");
}
