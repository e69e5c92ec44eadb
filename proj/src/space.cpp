#include "fixenrich/space.hpp"

#include <cmath>
#include <stdexcept>

namespace fixenrich {

std::size_t DomainC::dimension() const {
  if (const auto* b = std::get_if<Ball>(&shape)) return b->center.size();
  if (const auto* b = std::get_if<Box>(&shape)) return b->lo.size();
  return 0;
}

bool DomainC::bounded() const {
  return !std::holds_alternative<WholeSpace>(shape);
}

DomainC whole_space() { return DomainC{WholeSpace{}}; }

DomainC ball(Vec center, double radius) {
  if (!(radius > 0.0)) throw std::invalid_argument("ball: radius must be > 0");
  if (center.empty()) throw std::invalid_argument("ball: empty center");
  return DomainC{Ball{std::move(center), radius}};
}

DomainC box(Vec lo, Vec hi) {
  require_same_dim(lo, hi, "box");
  if (lo.empty()) throw std::invalid_argument("box: empty bounds");
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(lo[i] <= hi[i]))
      throw std::invalid_argument("box: lo[i] <= hi[i] violated");
  }
  return DomainC{Box{std::move(lo), std::move(hi)}};
}

void require_same_dim(const Vec& x, const Vec& y, const char* what) {
  if (x.size() != y.size())
    throw std::invalid_argument(std::string(what) + ": dimension mismatch (" +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(y.size()) + ")");
}

double inner(const Vec& x, const Vec& y) {
  require_same_dim(x, y, "inner");
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm(const Vec& x) { return std::sqrt(inner(x, x)); }

Vec add(const Vec& x, const Vec& y) {
  require_same_dim(x, y, "add");
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] + y[i];
  return r;
}

Vec sub(const Vec& x, const Vec& y) {
  require_same_dim(x, y, "sub");
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] - y[i];
  return r;
}

Vec scale(double a, const Vec& x) {
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) r[i] = a * x[i];
  return r;
}

Vec convex_combination(double t, const Vec& x, const Vec& y) {
  require_same_dim(x, y, "convex_combination");
  Vec r(x.size());
  for (std::size_t i = 0; i < x.size(); ++i)
    r[i] = t * x[i] + (1.0 - t) * y[i];
  return r;
}

double dist(const Vec& x, const Vec& y) { return norm(sub(x, y)); }

double identity_gap_i(const Vec& x, const Vec& y, Sign sign) {
  require_same_dim(x, y, "identity_gap_i");
  const double s = sign == Sign::plus ? 1.0 : -1.0;
  Vec xy(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) xy[i] = x[i] + s * y[i];
  const double lhs = inner(xy, xy);
  const double rhs = inner(x, x) + s * 2.0 * inner(x, y) + inner(y, y);
  return lhs - rhs;
}

double identity_gap_ii(double t, const Vec& x, const Vec& y) {
  if (!(t >= 0.0 && t <= 1.0))
    throw std::invalid_argument("identity_gap_ii: t must lie in [0,1]");
  require_same_dim(x, y, "identity_gap_ii");
  const Vec comb = convex_combination(t, x, y);
  const double lhs = inner(comb, comb);
  const Vec d = sub(x, y);
  const double rhs =
      t * inner(x, x) + (1.0 - t) * inner(y, y) - t * (1.0 - t) * inner(d, d);
  return lhs - rhs;
}

Vec project(const DomainC& domain, const Vec& x) {
  if (const auto* b = std::get_if<Ball>(&domain.shape)) {
    require_same_dim(b->center, x, "project(ball)");
    const Vec d = sub(x, b->center);
    const double r = norm(d);
    if (r <= b->radius) return x;
    return add(b->center, scale(b->radius / r, d));
  }
  if (const auto* b = std::get_if<Box>(&domain.shape)) {
    require_same_dim(b->lo, x, "project(box)");
    Vec r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i)
      r[i] = std::min(std::max(x[i], b->lo[i]), b->hi[i]);
    return r;
  }
  return x;
}

bool contains(const DomainC& domain, const Vec& x, double tol) {
  if (const auto* b = std::get_if<Ball>(&domain.shape)) {
    if (b->center.size() != x.size()) return false;
    return dist(x, b->center) <= b->radius * (1.0 + tol) + tol;
  }
  if (const auto* b = std::get_if<Box>(&domain.shape)) {
    if (b->lo.size() != x.size()) return false;
    for (std::size_t i = 0; i < x.size(); ++i) {
      if (x[i] < b->lo[i] - tol || x[i] > b->hi[i] + tol) return false;
    }
    return true;
  }
  return true;
}

bool all_finite(const Vec& x) {
  for (double v : x)
    if (!std::isfinite(v)) return false;
  return true;
}

}  // namespace fixenrich
