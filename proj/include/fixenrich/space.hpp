#ifndef FIXENRICH_SPACE_HPP
#define FIXENRICH_SPACE_HPP

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace fixenrich {

/// A point of a finite-dimensional real inner-product space. Dimension is a
/// runtime property; all vectors taking part in one computation must share it.
using Vec = std::vector<double>;

/// Tolerance for algebraic identities evaluated as a single expression.
inline constexpr double kIdentityTol = 1e-12;

/// Tolerance for inequality checks that accumulate rounding across terms.
inline constexpr double kDefaultCheckTol = 1e-9;

// ---------------------------------------------------------------------------
// Convex domains

struct WholeSpace {};

struct Ball {
  Vec center;
  double radius;  // > 0
};

struct Box {
  Vec lo;  // lo[i] <= hi[i] for all i
  Vec hi;
};

/// A closed convex subset of R^n. Ball and Box are bounded; WholeSpace is the
/// unbounded fallback for maps that leave no bounded set invariant.
struct DomainC {
  std::variant<WholeSpace, Ball, Box> shape = WholeSpace{};

  /// Dimension implied by the shape, or 0 for WholeSpace (any dimension).
  std::size_t dimension() const;
  bool bounded() const;
};

DomainC whole_space();
DomainC ball(Vec center, double radius);
DomainC box(Vec lo, Vec hi);

// ---------------------------------------------------------------------------
// Inner-product space primitives

double inner(const Vec& x, const Vec& y);
double norm(const Vec& x);

Vec add(const Vec& x, const Vec& y);
Vec sub(const Vec& x, const Vec& y);
Vec scale(double a, const Vec& x);

/// t*x + (1-t)*y, componentwise.
Vec convex_combination(double t, const Vec& x, const Vec& y);

double dist(const Vec& x, const Vec& y);

enum class Sign { plus, minus };

/// Defect of the polarization identity
///   ||x +- y||^2 = ||x||^2 +- 2<x,y> + ||y||^2,
/// i.e. lhs - rhs. Exactly zero in real arithmetic; bounded by
/// kIdentityTol * (1 + ||x||^2 + ||y||^2) in floating point.
double identity_gap_i(const Vec& x, const Vec& y, Sign sign);

/// Defect of the convex-combination identity
///   ||t x + (1-t) y||^2
///     = t ||x||^2 + (1-t) ||y||^2 - t (1-t) ||x - y||^2,  t in [0,1].
double identity_gap_ii(double t, const Vec& x, const Vec& y);

/// Metric projection onto the domain. Identity on WholeSpace, componentwise
/// clamp on Box, radial scaling toward the center on Ball.
Vec project(const DomainC& domain, const Vec& x);

bool contains(const DomainC& domain, const Vec& x, double tol = kIdentityTol);

bool all_finite(const Vec& x);

/// Throws std::invalid_argument when dimensions differ.
void require_same_dim(const Vec& x, const Vec& y, const char* what);

}  // namespace fixenrich

#endif  // FIXENRICH_SPACE_HPP
