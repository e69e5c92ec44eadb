#ifndef FIXENRICH_OPERATORS_HPP
#define FIXENRICH_OPERATORS_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "fixenrich/space.hpp"

namespace fixenrich {

// ---------------------------------------------------------------------------
// Dense symmetric matrix, row-major, desk scale (n <= 100 or so).

class SymMatrix {
 public:
  SymMatrix() = default;
  SymMatrix(std::size_t n, std::vector<double> entries);

  static SymMatrix diag(const Vec& d);
  static SymMatrix identity(std::size_t n);

  std::size_t size() const { return n_; }
  double operator()(std::size_t i, std::size_t j) const {
    return a_[i * n_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) { return a_[i * n_ + j]; }
  const std::vector<double>& entries() const { return a_; }

  /// max_ij |A - A^T|; must stay below kIdentityTol for catalog matrices.
  double asymmetry() const;

  Vec apply(const Vec& x) const;

 private:
  std::size_t n_ = 0;
  std::vector<double> a_;
};

/// Eigenvalues (ascending) and matching unit eigenvectors, computed by cyclic
/// Jacobi rotations. off_tol bounds the final off-diagonal Frobenius mass
/// relative to the matrix scale.
struct EigenDecomposition {
  Vec values;
  std::vector<Vec> vectors;
};

EigenDecomposition jacobi_eigen(const SymMatrix& m, double off_tol = 1e-10);

// ---------------------------------------------------------------------------
// Operator catalog: concrete self-maps T of a convex set.

struct ScalarLinear {
  double a;
  std::size_t dim = 1;  // applied to each coordinate
};

struct AffineSymmetric {
  SymMatrix q;
  Vec c;
};

struct Rotation2D {
  double theta;
};

struct Reflection {
  Vec c;  // T x = c - x
};

struct Saturation {
  std::size_t dim = 1;  // T x = x - tanh(x), componentwise
};

struct OperatorSpec {
  std::variant<ScalarLinear, AffineSymmetric, Rotation2D, Reflection,
               Saturation>
      op;
  DomainC domain = whole_space();

  std::size_t dimension() const;
  std::string label() const;
};

OperatorSpec make_scalar_linear(double a, std::size_t dim = 1,
                                DomainC domain = whole_space());
OperatorSpec make_affine_symmetric(SymMatrix q, Vec c,
                                   DomainC domain = whole_space());
OperatorSpec make_rotation2d(double theta, DomainC domain = whole_space());
OperatorSpec make_reflection(Vec c, DomainC domain = whole_space());
OperatorSpec make_saturation(std::size_t dim = 1,
                             DomainC domain = whole_space());

Vec evaluate(const OperatorSpec& spec, const Vec& x);

/// The unique fixed point when analytically known: 0 for ScalarLinear(a != 1)
/// and Saturation, c/2 for Reflection, the origin for Rotation2D(theta != 0),
/// (I - Q)^{-1} c for AffineSymmetric with I - Q invertible. Absent otherwise
/// (identity-like maps fix everything).
std::optional<Vec> known_fixed_points(const OperatorSpec& spec);

// ---------------------------------------------------------------------------
// Exact minimal-k oracles. nullopt means no k < 1 works at this b.

/// Minimal admissible k for T x = a x at enrichment b:
///   max(0, ((b+a)^2 - (b+1)^2) / (1-a)^2),  and 0 for a = 1.
std::optional<double> scalar_min_k(double a, double b);

/// Max of scalar_min_k over the eigenvalues of Q. The affine offset plays no
/// role (differences cancel it).
std::optional<double> symmetric_min_k(const SymMatrix& q, double b);

/// Plane rotations satisfy the enrichment inequality with k = 0 for every
/// b >= 0.
double rotation_min_k(double theta, double b);

/// Dispatch over the catalog. Saturation has no closed-form minimal k and
/// returns nullopt; it carries a nonexpansiveness certificate instead.
std::optional<double> oracle_min_k(const OperatorSpec& spec, double b);

/// True when nonexpansiveness is provable from the variant alone (derivative
/// bounds, isometry); implies the enrichment inequality holds with k = 0.
bool analytic_nonexpansive(const OperatorSpec& spec);

// ---------------------------------------------------------------------------
// Certificates

enum class Provenance { Analytic, Empirical, Manual };

struct Certificate {
  double b = 0.0;
  double k = 0.0;
  double lambda = 1.0;  // 1 / (b + 1)
  Provenance provenance = Provenance::Manual;
  std::optional<std::size_t> sample_count;  // Empirical only
  std::optional<std::uint64_t> seed;        // Empirical only
  std::optional<Vec> fixed_point;
};

/// Validates b >= 0, 0 <= k < 1 and derives lambda.
Certificate make_certificate(double b, double k, Provenance provenance);

// ---------------------------------------------------------------------------
// Deterministic pair sampling

using PairList = std::vector<std::pair<Vec, Vec>>;

/// count independent (x, y) pairs inside the domain; identical output for
/// identical (domain, dim, count, seed).
PairList sample_pairs(const DomainC& domain, std::size_t dim,
                      std::size_t count, std::uint64_t seed);

/// sample_pairs on the operator's own domain, augmented for AffineSymmetric
/// with pairs directed along each eigenvector of Q so extreme directions are
/// always probed.
PairList sample_pairs_for(const OperatorSpec& spec, std::size_t count,
                          std::uint64_t seed);

// ---------------------------------------------------------------------------
// Standard catalog used by the bundled experiment suite.

struct CatalogEntry {
  std::string name;
  OperatorSpec spec;
};

std::vector<CatalogEntry> standard_catalog();

}  // namespace fixenrich

#endif  // FIXENRICH_OPERATORS_HPP
