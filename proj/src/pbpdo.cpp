#include "paretofair/pbpdo.hpp"

#include "paretofair/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pfair {

PreferenceVector::PreferenceVector(Vector pi) : pi_(std::move(pi)) {
  if (pi_.size() == 0) throw UsageError("preference vector must not be empty");
  for (Eigen::Index i = 0; i < pi_.size(); ++i) {
    if (!(pi_[i] > 0.0) || !std::isfinite(pi_[i])) {
      throw UsageError("preference entries must be finite and strictly positive (entry " +
                       std::to_string(i) + ")");
    }
  }
  p_ = pi_.cwiseInverse();
}

namespace {

void check_sizes(const Vector& values, const PreferenceVector& pref) {
  if (static_cast<std::size_t>(values.size()) != pref.size()) {
    throw UsageError("preference vector has length " + std::to_string(pref.size()) +
                     " but there are " + std::to_string(values.size()) + " objectives");
  }
}

double kl_from_sigma(const Vector& sigma) {
  const double m = static_cast<double>(sigma.size());
  double kl = 0.0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > 0.0) kl += sigma[i] * std::log(m * sigma[i]);
  }
  return std::max(0.0, kl);
}

}  // namespace

Vector softmax_scores(const Vector& values, const PreferenceVector& pref) {
  check_sizes(values, pref);
  const Vector logits = pref.pi().cwiseProduct(values);
  const Vector e = (logits.array() - logits.maxCoeff()).exp().matrix();
  return e / e.sum();
}

double kl_objective(const Vector& values, const PreferenceVector& pref) {
  return kl_from_sigma(softmax_scores(values, pref));
}

PreferenceState kl_gradient(const Vector& values, const GradientMatrix& raw,
                            const PreferenceVector& pref) {
  check_sizes(values, pref);
  if (raw.size() != pref.size()) throw UsageError("gradient matrix and preferences disagree on m");
  if (raw.normalized) throw UsageError("the KL gradient needs raw, unnormalized gradient columns");

  PreferenceState state;
  state.sigma = softmax_scores(values, pref);
  state.kl_value = kl_from_sigma(state.sigma);
  const double m = static_cast<double>(state.sigma.size());
  state.lambda.resize(state.sigma.size());
  for (Eigen::Index i = 0; i < state.sigma.size(); ++i) {
    const double s = state.sigma[i];
    state.lambda[i] = s > 0.0 ? pref.pi()[i] * s * (std::log(m * s) - state.kl_value) : 0.0;
  }
  state.kl_gradient = raw.columns * state.lambda;
  return state;
}

namespace {

class AugmentedBundle final : public ObjectiveBundle {
 public:
  AugmentedBundle(BundlePtr base, PreferenceVector pref) : base_(std::move(base)), pref_(std::move(pref)) {
    if (base_->size() != pref_.size()) {
      throw UsageError("preference vector has length " + std::to_string(pref_.size()) +
                       " but the bundle has " + std::to_string(base_->size()) + " objectives");
    }
  }

  std::size_t size() const override { return base_->size() + 1; }
  std::size_t dim() const override { return base_->dim(); }
  std::string name(std::size_t i) const override {
    return i == base_->size() ? std::string("kl") : base_->name(i);
  }

  Vector values(const Vector& w) const override {
    const Vector base = base_->values(w);
    Vector out(base.size() + 1);
    out << base, kl_objective(base, pref_);
    return out;
  }

  Matrix jacobian(const Vector& w) const override { return values_and_jacobian(w).second; }

  std::pair<Vector, Matrix> values_and_jacobian(const Vector& w) const override {
    auto [base_values, base_raw] = base_->values_and_jacobian(w);
    const auto state = kl_gradient(base_values, GradientMatrix{base_raw, false}, pref_);
    Vector values(base_values.size() + 1);
    values << base_values, state.kl_value;
    Matrix raw(base_raw.rows(), base_raw.cols() + 1);
    raw << base_raw, state.kl_gradient;
    return {std::move(values), std::move(raw)};
  }

 private:
  BundlePtr base_;
  PreferenceVector pref_;
};

}  // namespace

BundlePtr augmented_bundle(BundlePtr bundle, const PreferenceVector& pref) {
  return std::make_shared<AugmentedBundle>(std::move(bundle), pref);
}

void PbpdoConfig::validate() const {
  PdoConfig::validate();
  if (!(eps1 > 0.0)) throw UsageError("eps1 must be positive");
  if (!(eps2 > 0.0)) throw UsageError("eps2 must be positive");
  if (!(kl_tol >= 0.0)) throw UsageError("kl_tol must be >= 0");
}

RunResult run_pbpdo(const ObjectiveBundle& bundle, const PreferenceVector& pref,
                    const ParameterVector& w0, const PbpdoConfig& config) {
  config.validate();
  if (static_cast<std::size_t>(w0.size()) != bundle.dim()) {
    throw UsageError("initial point has length " + std::to_string(w0.size()) +
                     " but the bundle expects " + std::to_string(bundle.dim()));
  }
  if (pref.size() != bundle.size()) {
    throw UsageError("preference vector has length " + std::to_string(pref.size()) +
                     " but the bundle has " + std::to_string(bundle.size()) + " objectives");
  }

  const BundlePtr base(&bundle, [](const ObjectiveBundle*) {});
  const BundlePtr augmented = augmented_bundle(base, pref);
  const std::size_t m = bundle.size();

  auto prepare = [&](const Matrix& raw) {
    return config.normalize_gradients ? normalize_columns(raw) : GradientMatrix{raw, false};
  };

  RunResult result;
  Vector w = w0;
  std::optional<SimplexWeights> last_alpha;
  // Warm start only while the bundle dimension stays the same.
  auto start_for = [&](std::size_t size) {
    if (config.warm_start_alpha && last_alpha && last_alpha->size() == size) return *last_alpha;
    return SimplexWeights::uniform(size);
  };

  for (int t = 0;; ++t) {
    BundleSample sample;
    try {
      sample = sample_bundle(bundle, w);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " at iteration " + std::to_string(t));
    }
    const PreferenceState state = kl_gradient(sample.values, GradientMatrix{sample.raw, false}, pref);
    const double kl_norm = state.kl_gradient.norm();
    const GradientMatrix G = prepare(sample.raw);
    // Case II compares |d| with the raw KL gradient. Near the target g_KL
    // vanishes, so the ratio grows and the main descent is left alone.
    const double kl_scale = kl_norm;
    auto stalled = [&](const Vector& dir) { return dir.norm() <= config.eps2 * kl_scale; };

    StepMode mode;
    SimplexWeights alpha = SimplexWeights::uniform(1);
    Vector d;
    const ObjectiveBundle* step_bundle = &bundle;
    Vector step_values = sample.values;

    auto solve_main = [&] {
      alpha = detail::inner_solve(G, start_for(m), config).weights;
      d = descent_direction(G, alpha);
      mode = StepMode::Main;
      step_bundle = &bundle;
      step_values = sample.values;
    };

    if (kl_norm <= config.eps1) {
      // Case I: close to the preference line.
      solve_main();
    } else {
      Matrix raw_pb(sample.raw.rows(), sample.raw.cols() + 1);
      raw_pb << sample.raw, state.kl_gradient;
      const GradientMatrix G_pb = prepare(raw_pb);
      alpha = detail::inner_solve(G_pb, start_for(m + 1), config).weights;
      d = descent_direction(G_pb, alpha);
      mode = StepMode::Preference;
      step_bundle = augmented.get();
      step_values.resize(static_cast<Eigen::Index>(m) + 1);
      step_values << sample.values, state.kl_value;

      if (config.main_fallback && stalled(d)) {
        // Off the frontier h can still descend even though h_PB cannot.
        const SimplexWeights alpha_pb = alpha;
        const Vector d_pb = d;
        solve_main();
        if (stalled(d)) {
          alpha = alpha_pb;
          d = d_pb;
          mode = StepMode::Preference;
          step_bundle = augmented.get();
          step_values.resize(static_cast<Eigen::Index>(m) + 1);
          step_values << sample.values, state.kl_value;
        }
      }
    }
    last_alpha = alpha;

    // Case II: stalled on the frontier before the target; trace along g_KL.
    // It is checked after Case I too, otherwise a run that enters the
    // eps1 ball on the frontier stops short of the preference line.
    if (kl_norm > 0.0 && stalled(d)) {
      d = state.kl_gradient;
      mode = StepMode::KlOnly;
    }

    const double norm = d.norm();
    const bool done =
        (norm <= config.stationarity_tol && state.kl_value <= config.kl_tol) || t == config.iterations;
    if (t % config.record_every == 0 || done) {
      TrajectoryPoint point{t, w, sample.values, std::nullopt, norm, mode};
      if (mode != StepMode::KlOnly) point.alpha = alpha;
      result.trajectory.push_back(std::move(point));
    }
    if (done) {
      result.converged = t < config.iterations || (norm <= config.stationarity_tol &&
                                                   state.kl_value <= config.kl_tol);
      break;
    }

    if (mode == StepMode::KlOnly) {
      w = w - config.eta * d;
    } else {
      w = detail::take_step(*step_bundle, w, step_values, d, config, t);
    }
    ++result.iterations_run;
  }
  result.w = w;
  return result;
}

}  // namespace pfair
