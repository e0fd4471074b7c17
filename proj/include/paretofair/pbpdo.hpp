#pragma once

#include "paretofair/objective.hpp"
#include "paretofair/pdo.hpp"

namespace pfair {

/// Strictly positive preferences pi. The target point satisfies
/// pi_1 h_1 = ... = pi_m h_m, i.e. it lies on the ray through p = 1/pi.
class PreferenceVector {
 public:
  explicit PreferenceVector(Vector pi);

  const Vector& pi() const { return pi_; }
  const Vector& reciprocals() const { return p_; }
  std::size_t size() const { return static_cast<std::size_t>(pi_.size()); }

 private:
  Vector pi_;
  Vector p_;
};

struct PreferenceState {
  Vector sigma;       // softmax of pi .* h
  double kl_value = 0.0;
  Vector lambda;      // per-objective chain-rule coefficients
  Vector kl_gradient; // sum_i lambda_i g_i over raw gradients
};

/// sigma_i = exp(pi_i h_i) / sum_j exp(pi_j h_j), with max-subtraction.
Vector softmax_scores(const Vector& values, const PreferenceVector& pref);

/// KL(sigma || uniform) = sum_i sigma_i log(m sigma_i). Zero iff all pi_i h_i agree.
double kl_objective(const Vector& values, const PreferenceVector& pref);

/// Gradient of kl_objective o h:
///   lambda_i = pi_i sigma_i (log(m sigma_i) - KL),  g_KL = sum_i lambda_i g_i.
/// `raw` must hold unnormalized gradients of the same objectives as `values`.
PreferenceState kl_gradient(const Vector& values, const GradientMatrix& raw,
                            const PreferenceVector& pref);

/// The bundle [h_1, ..., h_m, h_KL] with the KL gradient supplied by kl_gradient.
BundlePtr augmented_bundle(BundlePtr bundle, const PreferenceVector& pref);

struct PbpdoConfig : PdoConfig {
  double eps1 = 1e-2;  // |g_KL| <= eps1: near the preference line, descend h alone
  double eps2 = 1e-2;  // |d| / |g_KL| <= eps2: on the frontier, step along g_KL only
  double kl_tol = 1e-6;
  /// When the augmented direction vanishes but h itself still has a common
  /// descent direction, take that direction instead of a KL-only step.
  bool main_fallback = true;

  void validate() const;
};

/// Preference-based Pareto descent. Every recorded point is tagged with the
/// source of its step: main (h), preference (h plus KL) or kl-only.
RunResult run_pbpdo(const ObjectiveBundle& bundle, const PreferenceVector& pref,
                    const ParameterVector& w0, const PbpdoConfig& config);

}  // namespace pfair
