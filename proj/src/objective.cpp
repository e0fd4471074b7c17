#include "paretofair/objective.hpp"

#include "paretofair/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pfair {

FunctionBundle::FunctionBundle(std::size_t dim, std::vector<ScalarObjective> objectives)
    : dim_(dim), objectives_(std::move(objectives)) {
  if (dim_ == 0) throw UsageError("objective bundle needs dimension d >= 1");
  if (objectives_.empty()) throw UsageError("objective bundle needs at least one objective");
  for (const auto& obj : objectives_) {
    if (!obj.value || !obj.gradient) throw UsageError("objective is missing value or gradient");
  }
}

std::string FunctionBundle::name(std::size_t i) const {
  const auto& n = objectives_.at(i).name;
  return n.empty() ? ObjectiveBundle::name(i) : n;
}

Vector FunctionBundle::values(const Vector& w) const {
  Vector out(objectives_.size());
  for (std::size_t i = 0; i < objectives_.size(); ++i) out[static_cast<Eigen::Index>(i)] = objectives_[i].value(w);
  return out;
}

Matrix FunctionBundle::jacobian(const Vector& w) const {
  Matrix out(static_cast<Eigen::Index>(dim_), static_cast<Eigen::Index>(objectives_.size()));
  for (std::size_t i = 0; i < objectives_.size(); ++i) {
    Vector g = objectives_[i].gradient(w);
    if (static_cast<std::size_t>(g.size()) != dim_) {
      throw UsageError("objective " + std::to_string(i) + " returned a gradient of length " +
                       std::to_string(g.size()) + ", expected " + std::to_string(dim_));
    }
    out.col(static_cast<Eigen::Index>(i)) = g;
  }
  return out;
}

namespace {

void check_input(const ObjectiveBundle& bundle, const ParameterVector& w) {
  if (static_cast<std::size_t>(w.size()) != bundle.dim()) {
    throw UsageError("parameter vector has length " + std::to_string(w.size()) +
                     " but the bundle expects " + std::to_string(bundle.dim()));
  }
  if (!w.allFinite()) throw NumericError("parameter vector contains non-finite entries");
}

void check_values(const Vector& values) {
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    if (!std::isfinite(values[i])) {
      throw NumericError("objective " + std::to_string(i) + " returned a non-finite value");
    }
  }
}

void check_jacobian(const Matrix& raw) {
  for (Eigen::Index i = 0; i < raw.cols(); ++i) {
    if (!raw.col(i).allFinite()) {
      throw NumericError("objective " + std::to_string(i) + " returned a non-finite gradient");
    }
  }
}

}  // namespace

GradientMatrix normalize_columns(const Matrix& raw) {
  GradientMatrix out{raw, true};
  for (Eigen::Index i = 0; i < out.columns.cols(); ++i) {
    const double n = out.columns.col(i).norm();
    if (n > 0.0) out.columns.col(i) /= n;
  }
  return out;
}

Vector evaluate(const ObjectiveBundle& bundle, const ParameterVector& w) {
  check_input(bundle, w);
  Vector v = bundle.values(w);
  check_values(v);
  return v;
}

GradientMatrix gradient_matrix(const ObjectiveBundle& bundle, const ParameterVector& w,
                               bool normalize) {
  check_input(bundle, w);
  Matrix raw = bundle.jacobian(w);
  check_jacobian(raw);
  if (normalize) return normalize_columns(raw);
  return GradientMatrix{std::move(raw), false};
}

BundleSample sample_bundle(const ObjectiveBundle& bundle, const ParameterVector& w) {
  check_input(bundle, w);
  auto [values, raw] = bundle.values_and_jacobian(w);
  check_values(values);
  check_jacobian(raw);
  return BundleSample{std::move(values), std::move(raw)};
}

ScalarObjective component(BundlePtr bundle, std::size_t i) {
  if (i >= bundle->size()) throw UsageError("objective index out of range");
  const auto idx = static_cast<Eigen::Index>(i);
  return ScalarObjective{
      [bundle, idx](const Vector& w) { return bundle->values(w)[idx]; },
      [bundle, idx](const Vector& w) -> Vector { return bundle->jacobian(w).col(idx); },
      bundle->name(i)};
}

double finite_difference_check(const ScalarObjective& objective, const ParameterVector& w,
                               double step) {
  if (!(step > 0.0)) throw UsageError("finite-difference step must be positive");
  const Vector g = objective.gradient(w);
  if (g.size() != w.size()) throw UsageError("gradient length does not match parameter length");
  double worst = 0.0;
  Vector probe = w;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    probe[j] = w[j] + step;
    const double up = objective.value(probe);
    probe[j] = w[j] - step;
    const double down = objective.value(probe);
    probe[j] = w[j];
    const double fd = (up - down) / (2.0 * step);
    worst = std::max(worst, std::abs(fd - g[j]) / std::max(1.0, std::abs(g[j])));
  }
  return worst;
}

BundlePtr make_gaussian_pair(const GaussianPairParams& params) {
  if (params.nu.size() == 0) throw UsageError("gaussian pair needs a non-empty nu");
  if (!(params.s > 0.0) || !std::isfinite(params.s)) throw UsageError("gaussian pair needs s > 0");
  if (!params.nu.allFinite()) throw UsageError("gaussian pair needs a finite nu");

  const double inv_s2 = 1.0 / (params.s * params.s);
  auto make = [inv_s2](Vector center, std::string name) {
    return ScalarObjective{
        [center, inv_s2](const Vector& w) {
          return 1.0 - std::exp(-(w - center).squaredNorm() * inv_s2);
        },
        [center, inv_s2](const Vector& w) -> Vector {
          const Vector diff = w - center;
          return (2.0 * inv_s2 * std::exp(-diff.squaredNorm() * inv_s2)) * diff;
        },
        std::move(name)};
  };
  std::vector<ScalarObjective> objs;
  objs.push_back(make(params.nu, "h_1"));
  objs.push_back(make(-params.nu, "h_2"));
  return std::make_shared<FunctionBundle>(static_cast<std::size_t>(params.nu.size()),
                                          std::move(objs));
}

}  // namespace pfair
