#include "fixenrich/rng.hpp"

#include <cmath>
#include <numbers>

namespace fixenrich {

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // Box-Muller; u1 bounded away from 0 so log stays finite.
  double u1 = uniform01();
  if (u1 < 1e-300) u1 = 1e-300;
  const double u2 = uniform01();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double a = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

Vec Rng::normal_vec(std::size_t dim, double sigma) {
  Vec v(dim);
  for (auto& c : v) c = sigma * normal();
  return v;
}

Vec Rng::in_ball(const Vec& center, double radius) {
  const std::size_t dim = center.size();
  Vec dir = normal_vec(dim);
  double n = norm(dir);
  if (n == 0.0) {
    dir[0] = 1.0;
    n = 1.0;
  }
  const double u = uniform01();
  const double r = radius * std::pow(u, 1.0 / static_cast<double>(dim));
  Vec p(dim);
  for (std::size_t i = 0; i < dim; ++i) p[i] = center[i] + r * dir[i] / n;
  return p;
}

Vec Rng::in_box(const Vec& lo, const Vec& hi) {
  Vec p(lo.size());
  for (std::size_t i = 0; i < lo.size(); ++i) p[i] = uniform(lo[i], hi[i]);
  return p;
}

Vec Rng::in_domain(const DomainC& domain, std::size_t dim) {
  if (const auto* b = std::get_if<Ball>(&domain.shape))
    return in_ball(b->center, b->radius);
  if (const auto* b = std::get_if<Box>(&domain.shape))
    return in_box(b->lo, b->hi);
  return normal_vec(dim, 2.0);
}

}  // namespace fixenrich
