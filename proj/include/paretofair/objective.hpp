#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <utility>
#include <vector>

namespace pfair {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Model weights w. Any finite vector of length d >= 1.
using ParameterVector = Vector;

/// A single differentiable scalar objective.
struct ScalarObjective {
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> gradient;
  std::string name;
};

/// An ordered vector objective h(w) = [h_1(w), ..., h_m(w)] over R^d.
///
/// Implementations are immutable after construction; every method is const
/// and may be called concurrently from several optimizer runs.
class ObjectiveBundle {
 public:
  virtual ~ObjectiveBundle() = default;

  virtual std::size_t size() const = 0;
  virtual std::size_t dim() const = 0;
  virtual std::string name(std::size_t i) const { return "h_" + std::to_string(i); }

  virtual Vector values(const Vector& w) const = 0;
  /// d x m matrix whose column i is the gradient of objective i.
  virtual Matrix jacobian(const Vector& w) const = 0;
  virtual std::pair<Vector, Matrix> values_and_jacobian(const Vector& w) const {
    return {values(w), jacobian(w)};
  }
};

using BundlePtr = std::shared_ptr<const ObjectiveBundle>;

/// Bundle assembled from independent closures, one per objective.
class FunctionBundle final : public ObjectiveBundle {
 public:
  FunctionBundle(std::size_t dim, std::vector<ScalarObjective> objectives);

  std::size_t size() const override { return objectives_.size(); }
  std::size_t dim() const override { return dim_; }
  std::string name(std::size_t i) const override;
  Vector values(const Vector& w) const override;
  Matrix jacobian(const Vector& w) const override;

 private:
  std::size_t dim_;
  std::vector<ScalarObjective> objectives_;
};

struct GradientMatrix {
  Matrix columns;  // d x m
  bool normalized = false;

  std::size_t dim() const { return static_cast<std::size_t>(columns.rows()); }
  std::size_t size() const { return static_cast<std::size_t>(columns.cols()); }
};

/// Rescales every nonzero column to unit Euclidean norm; zero columns stay zero.
GradientMatrix normalize_columns(const Matrix& raw);

/// Objective values h(w). Throws UsageError on dimension mismatch and
/// NumericError naming the first non-finite objective.
Vector evaluate(const ObjectiveBundle& bundle, const ParameterVector& w);

GradientMatrix gradient_matrix(const ObjectiveBundle& bundle, const ParameterVector& w,
                               bool normalize);

/// Values plus raw (unnormalized) gradient columns from a single bundle call,
/// validated the same way as evaluate/gradient_matrix.
struct BundleSample {
  Vector values;
  Matrix raw;
};
BundleSample sample_bundle(const ObjectiveBundle& bundle, const ParameterVector& w);

/// View of objective i of a bundle as a standalone scalar objective.
ScalarObjective component(BundlePtr bundle, std::size_t i);

/// Max over coordinates of |central difference - analytic| / max(1, |analytic|).
double finite_difference_check(const ScalarObjective& objective, const ParameterVector& w,
                               double step = 1e-6);

struct GaussianPairParams {
  Vector nu;
  double s = 1.5;
};

/// h_1(w) = 1 - exp(-|w - nu|^2 / s^2), h_2(w) = 1 - exp(-|w + nu|^2 / s^2).
/// Its Pareto set is the segment {t * nu : t in [-1, 1]}.
BundlePtr make_gaussian_pair(const GaussianPairParams& params);

}  // namespace pfair
