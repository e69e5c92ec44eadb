#ifndef FIXENRICH_RNG_HPP
#define FIXENRICH_RNG_HPP

#include <cstdint>
#include <random>

#include "fixenrich/space.hpp"

namespace fixenrich {

/// Seeded generator with hand-rolled variate transforms so that a given seed
/// produces the same stream on every platform (std distributions are
/// implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : eng_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(eng_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) {
    return lo + (hi - lo) * uniform01();
  }

  /// Standard normal via Box-Muller; caches the spare variate.
  double normal();

  Vec normal_vec(std::size_t dim, double sigma = 1.0);

  /// Uniform over the ball (radius scaled by u^(1/dim)).
  Vec in_ball(const Vec& center, double radius);

  Vec in_box(const Vec& lo, const Vec& hi);

  /// Sample a point of the domain; WholeSpace draws centered Gaussians.
  Vec in_domain(const DomainC& domain, std::size_t dim);

 private:
  std::mt19937_64 eng_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace fixenrich

#endif  // FIXENRICH_RNG_HPP
