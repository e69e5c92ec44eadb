#include <doctest.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "fixenrich/operators.hpp"
#include "fixenrich/rng.hpp"

using namespace fixenrich;

TEST_CASE("evaluate catalog variants") {
  CHECK(evaluate(make_scalar_linear(-3.0), {2.0}) == Vec{-6.0});
  CHECK(evaluate(make_reflection({4.0}), {1.0}) == Vec{3.0});

  const Vec q = evaluate(make_rotation2d(std::numbers::pi / 2.0), {1.0, 0.0});
  CHECK(std::abs(q[0] - 0.0) <= 1e-15);
  CHECK(std::abs(q[1] - 1.0) <= 1e-15);

  const Vec s = evaluate(make_saturation(2), {0.0, 1.0});
  CHECK(s[0] == 0.0);
  CHECK(s[1] == doctest::Approx(1.0 - std::tanh(1.0)).epsilon(1e-15));

  CHECK_THROWS_AS(evaluate(make_scalar_linear(2.0, 2), {1.0}),
                  std::invalid_argument);
}

TEST_CASE("known fixed points") {
  CHECK(known_fixed_points(make_scalar_linear(-3.0)) == Vec{0.0});
  CHECK(known_fixed_points(make_reflection({4.0})) == Vec{2.0});
  CHECK_FALSE(known_fixed_points(make_scalar_linear(1.0)).has_value());
  CHECK_FALSE(known_fixed_points(make_rotation2d(0.0)).has_value());
  CHECK(known_fixed_points(make_saturation(2)) == Vec{0.0, 0.0});

  const auto affine =
      make_affine_symmetric(SymMatrix::diag({0.5}), {1.0});
  const auto p = known_fixed_points(affine);
  REQUIRE(p.has_value());
  CHECK((*p)[0] == doctest::Approx(2.0).epsilon(1e-14));

  // Eigenvalue 1 makes I - Q singular.
  CHECK_FALSE(known_fixed_points(
                  make_affine_symmetric(SymMatrix::diag({1.0, 0.5}),
                                        {1.0, 1.0}))
                  .has_value());
}

TEST_CASE("scalar minimal k") {
  CHECK(*scalar_min_k(-3.0, 0.0) == 0.5);
  CHECK(*scalar_min_k(-3.0, 1.0) == 0.0);
  CHECK(*scalar_min_k(1.0, 0.0) == 0.0);
  CHECK(*scalar_min_k(1.0, 7.0) == 0.0);
  CHECK_FALSE(scalar_min_k(3.0, 0.0).has_value());
  CHECK_THROWS_AS(scalar_min_k(0.5, -1.0), std::invalid_argument);

  // Spot-check the defining inequality per difference z on a grid.
  const double a = -3.0, b = 0.0, k = *scalar_min_k(a, b);
  for (double z : {0.1, 1.0, 5.0, -2.0}) {
    const double lhs = (b + a) * (b + a) * z * z;
    const double rhs =
        (b + 1.0) * (b + 1.0) * z * z + k * (1.0 - a) * (1.0 - a) * z * z;
    CHECK(lhs <= rhs + 1e-12 * (1.0 + z * z));
    const double rhs_low = (b + 1.0) * (b + 1.0) * z * z +
                           (k - 0.05) * (1.0 - a) * (1.0 - a) * z * z;
    CHECK(lhs > rhs_low);
  }
}

TEST_CASE("scalar minimal k vanishes on the enriched nonexpansive range") {
  for (double b : {0.0, 0.5, 1.0, 2.0}) {
    const double lo = -(1.0 + 2.0 * b);
    for (int i = 0; i <= 20; ++i) {
      const double a = lo + (1.0 - lo) * i / 20.0;
      CHECK(*scalar_min_k(a, b) == 0.0);
      CHECK(std::abs(b + a) <= b + 1.0 + 1e-12);
    }
    CHECK(*scalar_min_k(lo - 0.1, b) > 0.0);
  }
}

TEST_CASE("symmetric minimal k") {
  CHECK(*symmetric_min_k(SymMatrix::diag({-3.0, 0.5}), 0.0) ==
        doctest::Approx(0.5).epsilon(1e-12));
  for (double b : {0.0, 1.0, 3.0})
    CHECK(*symmetric_min_k(SymMatrix::identity(3), b) == 0.0);
  CHECK_FALSE(symmetric_min_k(SymMatrix::diag({2.0}), 0.0).has_value());
  CHECK_THROWS_AS(SymMatrix(2, {0.0, 1.0, 0.0, 0.0}), std::invalid_argument);
}

TEST_CASE("symmetric minimal k feasible iff eigenvalues at most 1") {
  Rng rng(41);
  for (int trial = 0; trial < 20; ++trial) {
    const std::size_t n = 4;
    Vec evals(n);
    for (auto& v : evals) v = rng.uniform(-4.0, 2.0);
    SymMatrix m = SymMatrix::diag(evals);
    // Conjugate by one plane rotation to leave the diagonal basis.
    const double c = std::cos(0.7), s = std::sin(0.7);
    SymMatrix r = SymMatrix::diag(Vec(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double sum = 0.0;
        for (std::size_t l = 0; l < n; ++l) {
          auto rot = [&](std::size_t row, std::size_t col) {
            if (row == 0 && col == 0) return c;
            if (row == 0 && col == 1) return -s;
            if (row == 1 && col == 0) return s;
            if (row == 1 && col == 1) return c;
            return row == col ? 1.0 : 0.0;
          };
          sum += rot(i, l) * m(l, l) * rot(j, l);
        }
        r(i, j) = sum;
      }
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) {
        const double avg = 0.5 * (r(i, j) + r(j, i));
        r(i, j) = avg;
        r(j, i) = avg;
      }

    bool all_le_one = true;
    for (double v : evals) all_le_one &= v <= 1.0 + 1e-12;
    for (double b : {0.0, 0.5, 1.0}) {
      const auto k = symmetric_min_k(r, b);
      CHECK(k.has_value() == all_le_one);
    }
  }
}

TEST_CASE("symmetric minimal k is nonincreasing in b") {
  const SymMatrix q = SymMatrix::diag({-3.0, -1.0, 0.25, 0.9});
  double prev = 1.0;
  for (double b : {0.0, 0.25, 0.5, 1.0, 2.0, 4.0}) {
    const auto k = symmetric_min_k(q, b);
    REQUIRE(k.has_value());
    CHECK(*k <= prev + 1e-12);
    prev = *k;
  }
}

TEST_CASE("rotations need no strictness budget") {
  CHECK(rotation_min_k(std::numbers::pi / 3.0, 0.0) == 0.0);
  CHECK(rotation_min_k(0.0, 5.0) == 0.0);
  CHECK(rotation_min_k(std::numbers::pi, 2.0) == 0.0);
}

TEST_CASE("jacobi eigendecomposition") {
  // Known spectrum conjugated by a rotation: [[2.5,-1.5],[-1.5,2.5]]
  // has eigenvalues 1 and 4 with eigenvectors (1,1)/sqrt2, (1,-1)/sqrt2.
  const SymMatrix m(2, {2.5, -1.5, -1.5, 2.5});
  const auto eig = jacobi_eigen(m);
  CHECK(eig.values[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(eig.values[1] == doctest::Approx(4.0).epsilon(1e-12));
  for (std::size_t i = 0; i < 2; ++i) {
    const Vec mv = m.apply(eig.vectors[i]);
    for (std::size_t j = 0; j < 2; ++j)
      CHECK(mv[j] ==
            doctest::Approx(eig.values[i] * eig.vectors[i][j]).epsilon(1e-10));
    CHECK(norm(eig.vectors[i]) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("pair sampling is deterministic and respects the domain") {
  const DomainC unit_ball = ball({0.0, 0.0, 0.0}, 1.0);
  CHECK_THROWS_AS(sample_pairs(unit_ball, 3, 0, 1), std::invalid_argument);

  const PairList a = sample_pairs(unit_ball, 3, 100, 11);
  const PairList b = sample_pairs(unit_ball, 3, 100, 11);
  CHECK(a == b);
  CHECK(a.size() == 100);
  for (const auto& [x, y] : a) {
    CHECK(norm(x) <= 1.0 + 1e-12);
    CHECK(norm(y) <= 1.0 + 1e-12);
  }

  const PairList c = sample_pairs(unit_ball, 3, 100, 12);
  CHECK(a != c);
}

TEST_CASE("affine sampling probes eigenvector directions") {
  const auto spec = make_affine_symmetric(SymMatrix::diag({-3.0, 0.5}),
                                          {1.0, 1.0});
  const PairList pairs = sample_pairs_for(spec, 50, 3);
  CHECK(pairs.size() == 54);  // 50 sampled + 2 per eigenvector
  // The directed pairs sit at the tail and differ along one eigenvector.
  const auto& [x, y] = pairs.back();
  const Vec d = sub(x, y);
  CHECK(norm(d) > 0.0);
}

TEST_CASE("catalog operators map their domains into themselves") {
  Rng rng(23);
  for (const auto& entry : standard_catalog()) {
    const std::size_t dim = entry.spec.dimension();
    for (int i = 0; i < 100; ++i) {
      const Vec x = rng.in_domain(entry.spec.domain, dim);
      CHECK(contains(entry.spec.domain, evaluate(entry.spec, x), 1e-9));
    }
  }
}

TEST_CASE("certificates validate their parameters") {
  const Certificate c = make_certificate(3.0, 0.25, Provenance::Analytic);
  CHECK(c.lambda == doctest::Approx(0.25).epsilon(1e-15));
  CHECK(std::abs(c.lambda * (c.b + 1.0) - 1.0) <= 1e-15);
  CHECK_THROWS_AS(make_certificate(-0.5, 0.0, Provenance::Manual),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_certificate(0.0, 1.0, Provenance::Manual),
                  std::invalid_argument);
  CHECK_THROWS_AS(make_certificate(0.0, -0.1, Provenance::Manual),
                  std::invalid_argument);
}
