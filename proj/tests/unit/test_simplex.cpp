#include "oracles.hpp"

#include "paretofair/errors.hpp"
#include "paretofair/simplex.hpp"

#include <doctest.h>

using namespace pfair;

namespace {

Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

GradientMatrix cols(const Matrix& m) { return GradientMatrix{m, false}; }

/// Brute-force projection: nearest point of a simplex grid.
Vector grid_projection(const Vector& v, double res) {
  const int steps = static_cast<int>(std::lround(1.0 / res));
  Vector best;
  double best_d = 1e300;
  for (int a = 0; a <= steps; ++a)
    for (int b = 0; a + b <= steps; ++b) {
      Vector x(3);
      x << a * res, b * res, 1.0 - (a + b) * res;
      const double d = (x - v).squaredNorm();
      if (d < best_d) best_d = d, best = x;
    }
  return best;
}

}  // namespace

TEST_CASE("projection examples") {
  CHECK(project_simplex(vec({0.3, 0.7})).values().isApprox(vec({0.3, 0.7}), 1e-15));
  CHECK(project_simplex(vec({0.6, 0.6})).values().isApprox(vec({0.5, 0.5}), 1e-15));
  const Vector p = project_simplex(vec({2.0, 0.0, 0.0})).values();
  CHECK(p.isApprox(vec({1.0, 0.0, 0.0}), 1e-15));
  CHECK((p - grid_projection(vec({2.0, 0.0, 0.0}), 1e-3)).norm() <= 2e-3);
  CHECK_THROWS_AS(project_simplex(Vector(0)), UsageError);
}

TEST_CASE("projection matches a grid oracle in three dimensions") {
  std::mt19937_64 rng(1);
  for (int k = 0; k < 20; ++k) {
    const Vector v = oracle::random_vector(rng, 3, -1, 2);
    const Vector p = project_simplex(v).values();
    const Vector g = grid_projection(v, 1e-3);
    CHECK((p - v).norm() <= (g - v).norm() + 1e-12);
    CHECK((p - g).norm() <= 3e-3);
  }
}

TEST_CASE("projection invariants, idempotence and optimality") {
  std::mt19937_64 rng(2);
  for (int k = 0; k < 200; ++k) {
    const Eigen::Index m = 1 + k % 8;
    const Vector v = oracle::random_vector(rng, m, -2, 2);
    const SimplexWeights p = project_simplex(v);
    CHECK(p.values().minCoeff() >= 0.0);
    CHECK(std::abs(p.values().sum() - 1.0) <= 1e-9);
    const Vector again = project_simplex(p.values()).values();
    CHECK((again.array() == p.values().array()).all());
    const double dist = (p.values() - v).norm();
    for (int j = 0; j < 200; ++j) {
      CHECK((oracle::random_simplex_point(rng, m) - v).norm() >= dist - 1e-9);
    }
  }
}

TEST_CASE("simplex weights validation") {
  CHECK_THROWS_AS(SimplexWeights::from(vec({0.5, 0.6})), UsageError);
  CHECK_THROWS_AS(SimplexWeights::from(vec({1.5, -0.5})), UsageError);
  CHECK(SimplexWeights::from(vec({1.0 + 1e-13, -1e-13})).values().minCoeff() == 0.0);
  CHECK_THROWS_AS(SimplexWeights::uniform(0), UsageError);
}

TEST_CASE("phi examples") {
  Matrix I = Matrix::Identity(2, 2);
  CHECK(phi(cols(I), SimplexWeights::uniform(2)) == doctest::Approx(0.5).epsilon(1e-15));
  Matrix anti(2, 2);
  anti << 1, -1, 2, -2;
  CHECK(phi(cols(anti), SimplexWeights::uniform(2)) == 0.0);
  Matrix one(2, 1);
  one << 3, 4;
  CHECK(phi(cols(one), SimplexWeights::uniform(1)) == doctest::Approx(25.0));
}

TEST_CASE("inner solve examples") {
  SUBCASE("orthogonal unit gradients") {
    const auto r = solve_inner(cols(Matrix::Identity(2, 2)), SimplexWeights::one_hot(2, 0), 0.25, 200);
    CHECK((r.weights.values() - vec({0.5, 0.5})).norm() <= 1e-6);
    CHECK(r.iterations_run == 200);
  }
  SUBCASE("antiparallel gradients stay at the uniform weights") {
    Matrix G(3, 2);
    G << 1, -1, -2, 2, 0.5, -0.5;
    const auto r = solve_inner(cols(G), SimplexWeights::uniform(2), 0.1, 50);
    CHECK(r.weights.values().isApprox(vec({0.5, 0.5}), 1e-15));
    CHECK(r.phi_value == 0.0);
  }
  SUBCASE("parallel gradients select the shorter one") {
    Matrix G(2, 2);
    G << 1, 2, 1, 4;
    G.col(1) = 2 * G.col(0);
    InnerSolveOptions opt;
    opt.max_iterations = 2000;
    const auto r = solve_inner(cols(G), SimplexWeights::uniform(2), opt);
    CHECK(r.weights[0] == doctest::Approx(1.0).epsilon(1e-9));
  }
  SUBCASE("rejects K < 1") {
    CHECK_THROWS_AS(solve_inner(cols(Matrix::Identity(2, 2)), SimplexWeights::uniform(2), 0.1, 0), UsageError);
  }
  SUBCASE("a huge step that diverges is reported") {
    Matrix G(1, 2);
    G << 1e200, -1e200;
    CHECK_THROWS_AS(solve_inner(cols(G), SimplexWeights::one_hot(2, 0), 1e10, 5), NumericError);
  }
}

TEST_CASE("inner solve matches a grid oracle and decreases monotonically") {
  std::mt19937_64 rng(4);
  for (int k = 0; k < 30; ++k) {
    const Eigen::Index m = 1 + k % 3;
    const Eigen::Index d = 1 + k % 6;
    const Matrix G = oracle::random_matrix(rng, d, m);
    const Matrix gram = G.transpose() * G;
    const double rho = default_inner_step(gram);
    const auto r = solve_inner(cols(G), SimplexWeights::uniform(static_cast<std::size_t>(m)), rho, 2000);
    CHECK(r.phi_value <= oracle::grid_min_phi(G, 1e-3) + 1e-4);
    double prev = phi(cols(G), SimplexWeights::uniform(static_cast<std::size_t>(m)));
    for (double x : r.phi_trace) {
      CHECK(x <= prev + 1e-12);
      prev = x;
    }
  }
}
