#include "paretofair/pdo.hpp"

#include "paretofair/errors.hpp"

#include <cmath>
#include <limits>

namespace pfair {

void PdoConfig::validate() const {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw UsageError("eta must be positive");
  if (rho && !(*rho > 0.0)) throw UsageError("rho must be positive");
  if (inner_steps < 1) throw UsageError("inner steps K must be >= 1");
  if (iterations < 1) throw UsageError("iterations T must be >= 1");
  if (!(stationarity_tol >= 0.0)) throw UsageError("stationarity tolerance must be >= 0");
  if (record_every < 1) throw UsageError("record_every must be >= 1");
  if (max_halvings < 0) throw UsageError("max_halvings must be >= 0");
}

const char* to_string(StepMode mode) {
  switch (mode) {
    case StepMode::Main:
      return "main";
    case StepMode::Preference:
      return "preference";
    case StepMode::KlOnly:
      return "kl-only";
  }
  return "main";
}

StepMode step_mode_from_string(const std::string& s) {
  if (s == "main") return StepMode::Main;
  if (s == "preference") return StepMode::Preference;
  if (s == "kl-only") return StepMode::KlOnly;
  throw UsageError("unknown step mode '" + s + "'");
}

double psi(const Vector& values, const SimplexWeights& alpha) {
  if (static_cast<std::size_t>(values.size()) != alpha.size()) {
    throw UsageError("objective values and weights disagree on m");
  }
  return values.dot(alpha.values());
}

Vector descent_direction(const GradientMatrix& G, const SimplexWeights& alpha) {
  if (G.size() != alpha.size()) throw UsageError("gradient matrix and weights disagree on m");
  Vector d = G.columns * alpha.values();
  // Below the rounding error of the weighted sum the sign of d is noise.
  double bound = 0.0;
  for (Eigen::Index i = 0; i < G.columns.cols(); ++i) bound += alpha.values()[i] * G.columns.col(i).norm();
  bound *= static_cast<double>(G.columns.cols() + 1) * std::numeric_limits<double>::epsilon();
  if (d.norm() <= bound) d.setZero();
  return d;
}

StationarityReport is_pareto_stationary(const GradientMatrix& G, double tol, int budget) {
  if (!(tol >= 0.0)) throw UsageError("stationarity tolerance must be >= 0");
  InnerSolveOptions options;
  options.max_iterations = budget;
  options.record_trace = false;
  const auto report = solve_inner(G, SimplexWeights::uniform(G.size()), options);
  const double norm = descent_direction(G, report.weights).norm();
  return StationarityReport{norm <= tol, norm, report.weights};
}

namespace detail {

InnerSolveReport inner_solve(const GradientMatrix& G, const SimplexWeights& alpha0,
                             const PdoConfig& config) {
  InnerSolveOptions options;
  options.rho = config.rho;
  options.max_iterations = config.inner_steps;
  options.record_trace = false;
  return solve_inner(G, alpha0, options);
}

Vector take_step(const ObjectiveBundle& bundle, const Vector& w, const Vector& values,
                 const Vector& direction, const PdoConfig& config, int iteration) {
  double step = config.eta;
  Vector next = w - step * direction;
  if (!config.backtracking) return next;
  for (int h = 0; h < config.max_halvings; ++h) {
    const Vector trial = bundle.values(next);
    if (!trial.allFinite()) {
      throw NumericError("non-finite objective value at iteration " + std::to_string(iteration));
    }
    bool increased = false;
    for (Eigen::Index i = 0; i < values.size(); ++i) {
      if (trial[i] > values[i] + 1e-12 * std::max(1.0, std::abs(values[i]))) {
        increased = true;
        break;
      }
    }
    if (!increased) break;
    step *= 0.5;
    next = w - step * direction;
  }
  return next;
}

}  // namespace detail

RunResult run_pdo(const ObjectiveBundle& bundle, const ParameterVector& w0, const PdoConfig& config) {
  config.validate();
  if (static_cast<std::size_t>(w0.size()) != bundle.dim()) {
    throw UsageError("initial point has length " + std::to_string(w0.size()) +
                     " but the bundle expects " + std::to_string(bundle.dim()));
  }

  RunResult result;
  Vector w = w0;
  SimplexWeights alpha = SimplexWeights::uniform(bundle.size());

  for (int t = 0;; ++t) {
    BundleSample sample;
    try {
      sample = sample_bundle(bundle, w);
    } catch (const NumericError& e) {
      throw NumericError(std::string(e.what()) + " at iteration " + std::to_string(t));
    }
    const GradientMatrix G = config.normalize_gradients
                                 ? normalize_columns(sample.raw)
                                 : GradientMatrix{std::move(sample.raw), false};
    const SimplexWeights start = config.warm_start_alpha ? alpha : SimplexWeights::uniform(bundle.size());
    alpha = detail::inner_solve(G, start, config).weights;
    const Vector d = descent_direction(G, alpha);
    const double norm = d.norm();

    const bool done = norm <= config.stationarity_tol || t == config.iterations;
    if (t % config.record_every == 0 || done) {
      result.trajectory.push_back(TrajectoryPoint{t, w, sample.values, alpha, norm, StepMode::Main});
    }
    if (done) {
      result.converged = norm <= config.stationarity_tol;
      break;
    }
    w = detail::take_step(bundle, w, sample.values, d, config, t);
    ++result.iterations_run;
  }
  result.w = w;
  return result;
}

}  // namespace pfair
