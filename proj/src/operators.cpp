#include "fixenrich/operators.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <numeric>
#include <stdexcept>

#include "fixenrich/rng.hpp"

namespace fixenrich {

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// SymMatrix

SymMatrix::SymMatrix(std::size_t n, std::vector<double> entries)
    : n_(n), a_(std::move(entries)) {
  if (a_.size() != n_ * n_)
    throw std::invalid_argument("SymMatrix: entry count does not match n*n");
  if (asymmetry() > kIdentityTol)
    throw std::invalid_argument("SymMatrix: matrix is not symmetric");
}

SymMatrix SymMatrix::diag(const Vec& d) {
  SymMatrix m;
  m.n_ = d.size();
  m.a_.assign(m.n_ * m.n_, 0.0);
  for (std::size_t i = 0; i < m.n_; ++i) m(i, i) = d[i];
  return m;
}

SymMatrix SymMatrix::identity(std::size_t n) {
  return diag(Vec(n, 1.0));
}

double SymMatrix::asymmetry() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      worst = std::max(worst, std::abs((*this)(i, j) - (*this)(j, i)));
  return worst;
}

Vec SymMatrix::apply(const Vec& x) const {
  if (x.size() != n_)
    throw std::invalid_argument("SymMatrix::apply: dimension mismatch");
  Vec r(n_, 0.0);
  for (std::size_t i = 0; i < n_; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < n_; ++j) s += (*this)(i, j) * x[j];
    r[i] = s;
  }
  return r;
}

// ---------------------------------------------------------------------------
// Cyclic Jacobi eigensolver

EigenDecomposition jacobi_eigen(const SymMatrix& m, double off_tol) {
  const std::size_t n = m.size();
  if (n == 0) throw std::invalid_argument("jacobi_eigen: empty matrix");

  std::vector<double> a = m.entries();
  auto at = [&](std::size_t i, std::size_t j) -> double& {
    return a[i * n + j];
  };
  // V accumulates rotations; columns end up as eigenvectors.
  std::vector<double> v(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  double fro = 0.0;
  for (double e : a) fro += e * e;
  fro = std::sqrt(fro);
  const double stop = off_tol * std::max(1.0, fro);

  auto off_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) s += at(i, j) * at(i, j);
    return std::sqrt(2.0 * s);
  };

  const int max_sweeps = 64;
  for (int sweep = 0; sweep < max_sweeps && off_norm() > stop; ++sweep) {
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t =
            (theta >= 0.0 ? 1.0 : -1.0) /
            (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        for (std::size_t i = 0; i < n; ++i) {
          const double aip = at(i, p), aiq = at(i, q);
          at(i, p) = c * aip - s * aiq;
          at(i, q) = s * aip + c * aiq;
        }
        for (std::size_t j = 0; j < n; ++j) {
          const double apj = at(p, j), aqj = at(q, j);
          at(p, j) = c * apj - s * aqj;
          at(q, j) = s * apj + c * aqj;
        }
        for (std::size_t i = 0; i < n; ++i) {
          const double vip = v[i * n + p], viq = v[i * n + q];
          v[i * n + p] = c * vip - s * viq;
          v[i * n + q] = s * vip + c * viq;
        }
      }
    }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t i, std::size_t j) { return at(i, i) < at(j, j); });

  EigenDecomposition d;
  d.values.resize(n);
  d.vectors.assign(n, Vec(n));
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t col = order[k];
    d.values[k] = at(col, col);
    for (std::size_t i = 0; i < n; ++i) d.vectors[k][i] = v[i * n + col];
  }
  return d;
}

// ---------------------------------------------------------------------------
// OperatorSpec

std::size_t OperatorSpec::dimension() const {
  if (const auto* s = std::get_if<ScalarLinear>(&op)) {
    const std::size_t d = domain.dimension();
    return d != 0 ? d : s->dim;
  }
  if (const auto* s = std::get_if<AffineSymmetric>(&op)) return s->q.size();
  if (std::holds_alternative<Rotation2D>(op)) return 2;
  if (const auto* s = std::get_if<Reflection>(&op)) return s->c.size();
  const auto& s = std::get<Saturation>(op);
  const std::size_t d = domain.dimension();
  return d != 0 ? d : s.dim;
}

std::string OperatorSpec::label() const {
  if (const auto* s = std::get_if<ScalarLinear>(&op))
    return "scalar_linear(a=" + num(s->a) + ")";
  if (const auto* s = std::get_if<AffineSymmetric>(&op))
    return "affine_symmetric(n=" + std::to_string(s->q.size()) + ")";
  if (const auto* s = std::get_if<Rotation2D>(&op))
    return "rotation_2d(theta=" + num(s->theta) + ")";
  if (std::holds_alternative<Reflection>(op)) return "reflection";
  return "saturation";
}

namespace {

void check_operator_domain(const OperatorSpec& spec) {
  const std::size_t dd = spec.domain.dimension();
  if (dd != 0 && dd != spec.dimension())
    throw std::invalid_argument(
        "operator: domain dimension does not match operator dimension");
}

}  // namespace

OperatorSpec make_scalar_linear(double a, std::size_t dim, DomainC domain) {
  OperatorSpec s{ScalarLinear{a, dim}, std::move(domain)};
  check_operator_domain(s);
  return s;
}

OperatorSpec make_affine_symmetric(SymMatrix q, Vec c, DomainC domain) {
  if (c.size() != q.size())
    throw std::invalid_argument(
        "affine_symmetric: offset dimension does not match matrix");
  OperatorSpec s{AffineSymmetric{std::move(q), std::move(c)},
                 std::move(domain)};
  check_operator_domain(s);
  return s;
}

OperatorSpec make_rotation2d(double theta, DomainC domain) {
  OperatorSpec s{Rotation2D{theta}, std::move(domain)};
  check_operator_domain(s);
  return s;
}

OperatorSpec make_reflection(Vec c, DomainC domain) {
  OperatorSpec s{Reflection{std::move(c)}, std::move(domain)};
  check_operator_domain(s);
  return s;
}

OperatorSpec make_saturation(std::size_t dim, DomainC domain) {
  OperatorSpec s{Saturation{dim}, std::move(domain)};
  check_operator_domain(s);
  return s;
}

Vec evaluate(const OperatorSpec& spec, const Vec& x) {
  if (x.size() != spec.dimension())
    throw std::invalid_argument("evaluate: dimension mismatch");
  if (const auto* s = std::get_if<ScalarLinear>(&spec.op))
    return scale(s->a, x);
  if (const auto* s = std::get_if<AffineSymmetric>(&spec.op))
    return add(s->q.apply(x), s->c);
  if (const auto* s = std::get_if<Rotation2D>(&spec.op)) {
    const double c = std::cos(s->theta), sn = std::sin(s->theta);
    return Vec{c * x[0] - sn * x[1], sn * x[0] + c * x[1]};
  }
  if (const auto* s = std::get_if<Reflection>(&spec.op)) return sub(s->c, x);
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - std::tanh(x[i]);
  return r;
}

std::optional<Vec> known_fixed_points(const OperatorSpec& spec) {
  if (const auto* s = std::get_if<ScalarLinear>(&spec.op)) {
    if (s->a == 1.0) return std::nullopt;  // every point fixed
    return Vec(spec.dimension(), 0.0);
  }
  if (const auto* s = std::get_if<AffineSymmetric>(&spec.op)) {
    const auto eig = jacobi_eigen(s->q);
    double scale_ = 1.0;
    for (double v : eig.values) scale_ = std::max(scale_, std::abs(v));
    for (double v : eig.values)
      if (std::abs(1.0 - v) <= 1e-12 * scale_) return std::nullopt;
    // (I - Q)^{-1} c through the eigenbasis.
    Vec x(spec.dimension(), 0.0);
    for (std::size_t i = 0; i < eig.values.size(); ++i) {
      const double w = inner(eig.vectors[i], s->c) / (1.0 - eig.values[i]);
      for (std::size_t j = 0; j < x.size(); ++j)
        x[j] += w * eig.vectors[i][j];
    }
    return x;
  }
  if (const auto* s = std::get_if<Rotation2D>(&spec.op)) {
    if (std::cos(s->theta) == 1.0) return std::nullopt;  // identity rotation
    return Vec{0.0, 0.0};
  }
  if (const auto* s = std::get_if<Reflection>(&spec.op))
    return scale(0.5, s->c);
  return Vec(spec.dimension(), 0.0);  // saturation fixes only the origin
}

// ---------------------------------------------------------------------------
// Minimal-k oracles

std::optional<double> scalar_min_k(double a, double b) {
  if (b < 0.0) throw std::invalid_argument("scalar_min_k: b must be >= 0");
  if (a == 1.0) return 0.0;
  const double num_ = (b + a) * (b + a) - (b + 1.0) * (b + 1.0);
  const double den = (1.0 - a) * (1.0 - a);
  const double k = std::max(0.0, num_ / den);
  if (k >= 1.0) return std::nullopt;
  return k;
}

std::optional<double> symmetric_min_k(const SymMatrix& q, double b) {
  if (q.asymmetry() > kIdentityTol)
    throw std::invalid_argument("symmetric_min_k: matrix is not symmetric");
  const auto eig = jacobi_eigen(q);
  double worst = 0.0;
  for (double a : eig.values) {
    const auto k = scalar_min_k(a, b);
    if (!k) return std::nullopt;
    worst = std::max(worst, *k);
  }
  return worst;
}

double rotation_min_k(double theta, double b) {
  (void)theta;
  if (b < 0.0) throw std::invalid_argument("rotation_min_k: b must be >= 0");
  return 0.0;
}

std::optional<double> oracle_min_k(const OperatorSpec& spec, double b) {
  if (const auto* s = std::get_if<ScalarLinear>(&spec.op))
    return scalar_min_k(s->a, b);
  if (const auto* s = std::get_if<AffineSymmetric>(&spec.op))
    return symmetric_min_k(s->q, b);
  if (const auto* s = std::get_if<Rotation2D>(&spec.op))
    return rotation_min_k(s->theta, b);
  if (std::holds_alternative<Reflection>(spec.op))
    return scalar_min_k(-1.0, b);  // c - x acts as -1 on differences
  return std::nullopt;  // saturation: no closed form
}

bool analytic_nonexpansive(const OperatorSpec& spec) {
  if (const auto* s = std::get_if<ScalarLinear>(&spec.op))
    return std::abs(s->a) <= 1.0;
  if (const auto* s = std::get_if<AffineSymmetric>(&spec.op)) {
    const auto eig = jacobi_eigen(s->q);
    for (double v : eig.values)
      if (std::abs(v) > 1.0) return false;
    return true;
  }
  if (std::holds_alternative<Rotation2D>(spec.op)) return true;
  if (std::holds_alternative<Reflection>(spec.op)) return true;
  return true;  // saturation: derivative tanh^2 in [0, 1)
}

// ---------------------------------------------------------------------------
// Certificates

Certificate make_certificate(double b, double k, Provenance provenance) {
  if (b < 0.0) throw std::invalid_argument("certificate: b must be >= 0");
  if (!(k >= 0.0 && k < 1.0))
    throw std::invalid_argument("certificate: k must lie in [0, 1)");
  Certificate c;
  c.b = b;
  c.k = k;
  c.lambda = 1.0 / (b + 1.0);
  c.provenance = provenance;
  return c;
}

// ---------------------------------------------------------------------------
// Pair sampling

PairList sample_pairs(const DomainC& domain, std::size_t dim,
                      std::size_t count, std::uint64_t seed) {
  if (count < 1) throw std::invalid_argument("sample_pairs: count must be >= 1");
  const std::size_t dd = domain.dimension();
  if (dd != 0) dim = dd;
  if (dim == 0) throw std::invalid_argument("sample_pairs: dimension is zero");
  Rng rng(seed);
  PairList out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    Vec x = rng.in_domain(domain, dim);
    Vec y = rng.in_domain(domain, dim);
    out.emplace_back(std::move(x), std::move(y));
  }
  return out;
}

namespace {

Vec domain_anchor(const DomainC& domain, std::size_t dim) {
  if (const auto* b = std::get_if<Ball>(&domain.shape)) return b->center;
  if (const auto* b = std::get_if<Box>(&domain.shape)) {
    Vec m(b->lo.size());
    for (std::size_t i = 0; i < m.size(); ++i)
      m[i] = 0.5 * (b->lo[i] + b->hi[i]);
    return m;
  }
  return Vec(dim, 0.0);
}

/// Largest step along +dir keeping anchor + step*dir inside, halved for
/// strict interiority. dir is assumed unit-norm.
double safe_step(const DomainC& domain, const Vec& anchor, const Vec& dir) {
  if (const auto* b = std::get_if<Ball>(&domain.shape)) {
    const double room = b->radius - dist(anchor, b->center);
    return std::max(0.0, 0.5 * room);
  }
  if (const auto* b = std::get_if<Box>(&domain.shape)) {
    double step = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < dir.size(); ++i) {
      if (std::abs(dir[i]) < 1e-15) continue;
      const double room =
          dir[i] > 0.0 ? b->hi[i] - anchor[i] : anchor[i] - b->lo[i];
      step = std::min(step, room / std::abs(dir[i]));
    }
    if (!std::isfinite(step)) return 0.0;
    return std::max(0.0, 0.5 * step);
  }
  return 1.0;
}

}  // namespace

PairList sample_pairs_for(const OperatorSpec& spec, std::size_t count,
                          std::uint64_t seed) {
  const std::size_t dim = spec.dimension();
  PairList pairs = sample_pairs(spec.domain, dim, count, seed);

  if (const auto* s = std::get_if<AffineSymmetric>(&spec.op)) {
    Vec anchor = domain_anchor(spec.domain, dim);
    if (auto fp = known_fixed_points(spec);
        fp && contains(spec.domain, *fp)) {
      anchor = *fp;
    }
    const auto eig = jacobi_eigen(s->q);
    for (const Vec& v : eig.vectors) {
      const double eps = safe_step(spec.domain, anchor, v);
      if (eps <= 0.0) continue;
      for (double e : {eps, 1e-3 * eps})
        pairs.emplace_back(add(anchor, scale(e, v)), anchor);
    }
  }
  return pairs;
}

// ---------------------------------------------------------------------------
// Catalog

std::vector<CatalogEntry> standard_catalog() {
  std::vector<CatalogEntry> cat;
  cat.push_back({"affine-mixed",
                 make_affine_symmetric(SymMatrix::diag({-3.0, 0.5}),
                                       {1.0, 1.0})});
  cat.push_back({"identity", make_scalar_linear(1.0, 1)});
  cat.push_back(
      {"reflection", make_reflection({4.0}, ball({2.0}, 3.0))});
  cat.push_back({"rotation-60",
                 make_rotation2d(std::numbers::pi / 3.0,
                                 ball({0.0, 0.0}, 2.0))});
  cat.push_back({"saturation",
                 make_saturation(2, box({-3.0, -3.0}, {3.0, 3.0}))});
  cat.push_back({"scalar-contractive", make_scalar_linear(-3.0, 1)});
  cat.push_back({"scalar-mild", make_scalar_linear(0.5, 1)});
  return cat;
}

}  // namespace fixenrich
