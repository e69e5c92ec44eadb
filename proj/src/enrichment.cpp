#include "fixenrich/enrichment.hpp"

#include <cmath>
#include <limits>

namespace fixenrich {

double lambda_of_b(double b) {
  if (b < 0.0) throw std::invalid_argument("lambda_of_b: b must be >= 0");
  return 1.0 / (b + 1.0);
}

namespace {

void check_lambda(double lambda) {
  if (!(lambda > 0.0 && lambda <= 1.0))
    throw std::invalid_argument("transform: lambda must lie in (0, 1]");
}

}  // namespace

TransformedOperator averaged(OperatorSpec base, double lambda) {
  check_lambda(lambda);
  return {std::move(base), TransformedOperator::Kind::Averaged, lambda, 0.0};
}

TransformedOperator residual(OperatorSpec base, double lambda) {
  check_lambda(lambda);
  return {std::move(base), TransformedOperator::Kind::Residual, lambda, 0.0};
}

TransformedOperator relaxed(OperatorSpec base, double lambda, double t) {
  check_lambda(lambda);
  if (!(t > 0.0)) throw std::invalid_argument("relaxed: t must be > 0");
  return {std::move(base), TransformedOperator::Kind::Relaxed, lambda, t};
}

Vec apply(const TransformedOperator& op, const Vec& x) {
  const Vec tx = evaluate(op.base, x);
  switch (op.kind) {
    case TransformedOperator::Kind::Averaged:
      return add(scale(1.0 - op.lambda, x), scale(op.lambda, tx));
    case TransformedOperator::Kind::Residual:
      // x - T_l x = lambda (x - T x)
      return scale(op.lambda, sub(x, tx));
    case TransformedOperator::Kind::Relaxed: {
      const double w = op.lambda * op.t;
      return add(scale(1.0 - w, x), scale(w, tx));
    }
  }
  throw std::logic_error("apply: unknown transform kind");
}

MapFn map_of(const OperatorSpec& spec) {
  return [spec](const Vec& x) { return evaluate(spec, x); };
}

MapFn map_of(const TransformedOperator& op) {
  return [op](const Vec& x) { return apply(op, x); };
}

// ---------------------------------------------------------------------------
// Per-pair violations

double enriched_spc_violation(const OperatorSpec& spec, double b, double k,
                              const Vec& x, const Vec& y) {
  const Vec z = sub(x, y);
  const Vec d = sub(evaluate(spec, x), evaluate(spec, y));
  const Vec bzd = add(scale(b, z), d);
  const Vec zd = sub(z, d);
  const double v = inner(bzd, bzd) - (b + 1.0) * (b + 1.0) * inner(z, z) -
                   k * inner(zd, zd);
  return v / (1.0 + inner(z, z));
}

double spc_violation(const MapFn& map, double k, const Vec& x, const Vec& y) {
  const Vec z = sub(x, y);
  const Vec d = sub(map(x), map(y));
  const Vec zd = sub(z, d);
  const double v = inner(d, d) - inner(z, z) - k * inner(zd, zd);
  return v / (1.0 + inner(z, z));
}

double cocoercive_violation(const MapFn& residual_map, double k, const Vec& x,
                            const Vec& y) {
  const Vec z = sub(x, y);
  const Vec du = sub(residual_map(x), residual_map(y));
  const double v = 0.5 * (1.0 - k) * inner(du, du) - inner(du, z);
  return v / (1.0 + inner(z, z));
}

double nonexpansive_violation(const MapFn& map, const Vec& x, const Vec& y) {
  const Vec z = sub(x, y);
  const Vec d = sub(map(x), map(y));
  return (norm(d) - norm(z)) / (1.0 + inner(z, z));
}

double enriched_nonexpansive_violation(const OperatorSpec& spec, double b,
                                       const Vec& x, const Vec& y) {
  const Vec z = sub(x, y);
  const Vec d = sub(evaluate(spec, x), evaluate(spec, y));
  const Vec bzd = add(scale(b, z), d);
  return (norm(bzd) - (b + 1.0) * norm(z)) / (1.0 + inner(z, z));
}

// ---------------------------------------------------------------------------
// Check driver

namespace {

template <class ViolationFn>
CheckReport run_pair_check(const PairList& pairs, double tol,
                           ViolationFn&& violation) {
  if (pairs.empty())
    throw std::invalid_argument("check: empty pair list");
  CheckReport report;
  report.samples = pairs.size();
  double worst = -std::numeric_limits<double>::infinity();
  std::size_t worst_idx = 0;
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const double v = violation(pairs[i].first, pairs[i].second);
    if (v > worst) {  // strict: ties keep the lowest index
      worst = v;
      worst_idx = i;
    }
  }
  report.max_violation = worst;
  report.passed = worst <= tol;
  if (!report.passed) report.witness = pairs[worst_idx];
  return report;
}

void check_b(double b) {
  if (b < 0.0) throw std::invalid_argument("check: b must be >= 0");
}

void check_k(double k) {
  if (!(k >= 0.0 && k < 1.0))
    throw std::invalid_argument("check: k must lie in [0, 1)");
}

}  // namespace

CheckReport check_enriched_spc(const OperatorSpec& spec, double b, double k,
                               const PairList& pairs, double tol) {
  check_b(b);
  check_k(k);
  return run_pair_check(pairs, tol, [&](const Vec& x, const Vec& y) {
    return enriched_spc_violation(spec, b, k, x, y);
  });
}

CheckReport check_spc(const OperatorSpec& spec, double k,
                      const PairList& pairs, double tol) {
  check_k(k);
  const MapFn map = map_of(spec);
  return run_pair_check(pairs, tol, [&](const Vec& x, const Vec& y) {
    return spc_violation(map, k, x, y);
  });
}

CheckReport check_spc(const TransformedOperator& op, double k,
                      const PairList& pairs, double tol) {
  check_k(k);
  const MapFn map = map_of(op);
  return run_pair_check(pairs, tol, [&](const Vec& x, const Vec& y) {
    return spc_violation(map, k, x, y);
  });
}

CheckReport check_cocoercive(const TransformedOperator& op, double k,
                             const PairList& pairs, double tol) {
  if (op.kind != TransformedOperator::Kind::Residual)
    throw std::invalid_argument("check_cocoercive: expects a Residual");
  check_k(k);
  const MapFn map = map_of(op);
  return run_pair_check(pairs, tol, [&](const Vec& x, const Vec& y) {
    return cocoercive_violation(map, k, x, y);
  });
}

CheckReport check_nonexpansive(const OperatorSpec& spec, const PairList& pairs,
                               double tol) {
  const MapFn map = map_of(spec);
  return run_pair_check(pairs, tol, [&](const Vec& x, const Vec& y) {
    return nonexpansive_violation(map, x, y);
  });
}

CheckReport check_nonexpansive(const TransformedOperator& op,
                               const PairList& pairs, double tol) {
  const MapFn map = map_of(op);
  return run_pair_check(pairs, tol, [&](const Vec& x, const Vec& y) {
    return nonexpansive_violation(map, x, y);
  });
}

CheckReport check_enriched_nonexpansive(const OperatorSpec& spec, double b,
                                        const PairList& pairs, double tol) {
  check_b(b);
  return run_pair_check(pairs, tol, [&](const Vec& x, const Vec& y) {
    return enriched_nonexpansive_violation(spec, b, x, y);
  });
}

// ---------------------------------------------------------------------------
// Empirical estimator

double estimate_min_k(const OperatorSpec& spec, double b,
                      const PairList& pairs, double tol) {
  check_b(b);
  if (pairs.empty())
    throw std::invalid_argument("estimate_min_k: empty pair list");

  double khat = 0.0;
  for (const auto& [x, y] : pairs) {
    const Vec z = sub(x, y);
    const Vec d = sub(evaluate(spec, x), evaluate(spec, y));
    const Vec bzd = add(scale(b, z), d);
    const Vec zd = sub(z, d);
    const double zz = inner(z, z);
    const double numerator =
        inner(bzd, bzd) - (b + 1.0) * (b + 1.0) * zz;
    const double denominator = inner(zd, zd);
    if (denominator > 1e-14 * (1.0 + zz)) {
      khat = std::max(khat, numerator / denominator);
    } else if (numerator > tol * (1.0 + zz)) {
      // The k-term vanishes here, so the inequality fails for every k.
      throw NotEnrichedSpcError(
          "operator violates the enrichment inequality on a pair with "
          "vanishing displacement term (b = " +
              std::to_string(b) + ")",
          x, y);
    }
  }
  return khat;
}

std::vector<std::pair<double, double>> estimate_frontier(
    const OperatorSpec& spec, const std::vector<double>& b_grid,
    const PairList& pairs, double tol) {
  if (b_grid.empty())
    throw std::invalid_argument("estimate_frontier: empty b grid");
  for (std::size_t i = 1; i < b_grid.size(); ++i)
    if (!(b_grid[i - 1] < b_grid[i]))
      throw std::invalid_argument("estimate_frontier: b grid must ascend");
  std::vector<std::pair<double, double>> out;
  out.reserve(b_grid.size());
  for (double b : b_grid)
    out.emplace_back(b, estimate_min_k(spec, b, pairs, tol));
  return out;
}

}  // namespace fixenrich
