#pragma once

#include "paretofair/objective.hpp"

#include <optional>
#include <vector>

namespace pfair {

/// A point alpha of the probability simplex: alpha_i >= 0, sum alpha_i = 1.
class SimplexWeights {
 public:
  static SimplexWeights uniform(std::size_t m);
  static SimplexWeights one_hot(std::size_t m, std::size_t i);
  /// Validates v against the simplex (entries >= -1e-12, sum within 1e-9 of 1)
  /// and clamps tiny negatives to zero. Throws UsageError otherwise.
  static SimplexWeights from(const Vector& v);

  const Vector& values() const { return alpha_; }
  std::size_t size() const { return static_cast<std::size_t>(alpha_.size()); }
  double operator[](std::size_t i) const { return alpha_[static_cast<Eigen::Index>(i)]; }

 private:
  explicit SimplexWeights(Vector v) : alpha_(std::move(v)) {}
  friend SimplexWeights project_simplex(const Vector& v);
  Vector alpha_;
};

/// Euclidean projection onto the simplex (sort-then-threshold, O(m log m)).
SimplexWeights project_simplex(const Vector& v);

/// Phi(alpha) = |G alpha|^2.
double phi(const GradientMatrix& G, const SimplexWeights& alpha);

struct InnerSolveOptions {
  /// Step size; empty selects 1 / (2 lambda_max(G^T G) + 1e-12).
  std::optional<double> rho;
  int max_iterations = 100;
  /// Stop once Phi <= phi_tol or a step improves Phi by less than min_improvement.
  bool early_exit = true;
  double phi_tol = 1e-12;
  double min_improvement = 1e-14;
  bool record_trace = true;
  // After the projected-gradient steps, solve the equality-constrained problem
  // on the support of alpha exactly; kept only if feasible and lower.
  bool polish = true;
};

struct InnerSolveReport {
  SimplexWeights weights;
  double phi_value = 0.0;
  int iterations_run = 0;
  double rho = 0.0;
  std::vector<double> phi_trace;
};

double default_inner_step(const Matrix& gram);

/// Projected gradient descent on Phi over the simplex:
/// alpha <- Pi(alpha - rho * 2 G^T G alpha), at most max_iterations times.
InnerSolveReport solve_inner(const GradientMatrix& G, const SimplexWeights& alpha0,
                             const InnerSolveOptions& options);

/// Exactly K steps with a fixed step, no early exit.
InnerSolveReport solve_inner(const GradientMatrix& G, const SimplexWeights& alpha0, double rho,
                             int K);

}  // namespace pfair
