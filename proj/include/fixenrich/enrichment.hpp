#ifndef FIXENRICH_ENRICHMENT_HPP
#define FIXENRICH_ENRICHMENT_HPP

#include <functional>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fixenrich/operators.hpp"
#include "fixenrich/space.hpp"

namespace fixenrich {

/// lambda = 1 / (b + 1), the averaging weight matching enrichment b.
double lambda_of_b(double b);

// ---------------------------------------------------------------------------
// Operators derived from a base map T by averaging:
//   Averaged  T_l x = (1 - lambda) x + lambda T x
//   Residual  U x   = x - T_l x
//   Relaxed   U_t x = (1 - lambda t) x + lambda t T x  (= x - t U x)

struct TransformedOperator {
  enum class Kind { Averaged, Residual, Relaxed };

  OperatorSpec base;
  Kind kind = Kind::Averaged;
  double lambda = 1.0;  // in (0, 1]
  double t = 0.0;       // Relaxed only, > 0
};

TransformedOperator averaged(OperatorSpec base, double lambda);
TransformedOperator residual(OperatorSpec base, double lambda);
TransformedOperator relaxed(OperatorSpec base, double lambda, double t);

Vec apply(const TransformedOperator& op, const Vec& x);

/// Type-erased self-map accepted by the generic checkers.
using MapFn = std::function<Vec(const Vec&)>;

MapFn map_of(const OperatorSpec& spec);
MapFn map_of(const TransformedOperator& op);

// ---------------------------------------------------------------------------
// Sampled inequality checks.
//
// Every violation is scaled by 1 / (1 + ||x - y||^2) so that one tolerance
// works for large-norm samples and near-coincident pairs alike. A report
// passes when the scaled max violation stays at or below tol.

struct CheckReport {
  std::size_t samples = 0;
  double max_violation = 0.0;  // scaled; see above
  bool passed = true;
  std::optional<std::pair<Vec, Vec>> witness;  // present iff !passed
};

// Scaled per-pair violations. Re-evaluating one of these at a report's
// witness reproduces the report's max_violation.

/// ||b(x-y) + Tx - Ty||^2 - (b+1)^2 ||x-y||^2 - k ||x-y - (Tx-Ty)||^2
double enriched_spc_violation(const OperatorSpec& spec, double b, double k,
                              const Vec& x, const Vec& y);

/// ||Sx - Sy||^2 - ||x-y||^2 - k ||x-y - (Sx-Sy)||^2
double spc_violation(const MapFn& map, double k, const Vec& x, const Vec& y);

/// (1-k)/2 ||Ux - Uy||^2 - <Ux - Uy, x - y>
double cocoercive_violation(const MapFn& residual_map, double k, const Vec& x,
                            const Vec& y);

/// ||Sx - Sy|| - ||x - y||
double nonexpansive_violation(const MapFn& map, const Vec& x, const Vec& y);

/// ||b(x-y) + Tx - Ty|| - (b+1) ||x-y||
double enriched_nonexpansive_violation(const OperatorSpec& spec, double b,
                                       const Vec& x, const Vec& y);

CheckReport check_enriched_spc(const OperatorSpec& spec, double b, double k,
                               const PairList& pairs,
                               double tol = kDefaultCheckTol);

CheckReport check_spc(const OperatorSpec& spec, double k,
                      const PairList& pairs, double tol = kDefaultCheckTol);
CheckReport check_spc(const TransformedOperator& op, double k,
                      const PairList& pairs, double tol = kDefaultCheckTol);

/// Requires a Residual transform.
CheckReport check_cocoercive(const TransformedOperator& op, double k,
                             const PairList& pairs,
                             double tol = kDefaultCheckTol);

CheckReport check_nonexpansive(const OperatorSpec& spec, const PairList& pairs,
                               double tol = kDefaultCheckTol);
CheckReport check_nonexpansive(const TransformedOperator& op,
                               const PairList& pairs,
                               double tol = kDefaultCheckTol);

CheckReport check_enriched_nonexpansive(const OperatorSpec& spec, double b,
                                        const PairList& pairs,
                                        double tol = kDefaultCheckTol);

// ---------------------------------------------------------------------------
// Empirical minimal-k estimation

/// Thrown when a pair with vanishing k-term still violates the enrichment
/// inequality, so no k < 1 can repair it at this b.
class NotEnrichedSpcError : public std::runtime_error {
 public:
  NotEnrichedSpcError(std::string msg, Vec x, Vec y)
      : std::runtime_error(std::move(msg)),
        witness_x(std::move(x)),
        witness_y(std::move(y)) {}
  Vec witness_x, witness_y;
};

/// Largest violation ratio over the sampled pairs, clamped to >= 0. A lower
/// bound for the true minimal k restricted to the sample; tight when the
/// pairs probe extreme directions.
double estimate_min_k(const OperatorSpec& spec, double b,
                      const PairList& pairs, double tol = kDefaultCheckTol);

/// estimate_min_k along an ascending b grid.
std::vector<std::pair<double, double>> estimate_frontier(
    const OperatorSpec& spec, const std::vector<double>& b_grid,
    const PairList& pairs, double tol = kDefaultCheckTol);

}  // namespace fixenrich

#endif  // FIXENRICH_ENRICHMENT_HPP
