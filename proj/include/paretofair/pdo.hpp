#pragma once

#include "paretofair/objective.hpp"
#include "paretofair/simplex.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pfair {

struct PdoConfig {
  double eta = 0.1;               // outer step size
  std::optional<double> rho;      // inner step size; empty = automatic per outer step
  int inner_steps = 100;          // K
  int iterations = 1000;          // T
  double stationarity_tol = 1e-6; // stop once |d| <= tol
  bool normalize_gradients = true;
  bool warm_start_alpha = true;
  int record_every = 1;
  /// Halve the step (up to max_halvings times) while any objective increases.
  bool backtracking = false;
  int max_halvings = 30;

  void validate() const;
};

enum class StepMode { Main, Preference, KlOnly };
const char* to_string(StepMode mode);
StepMode step_mode_from_string(const std::string& s);

struct TrajectoryPoint {
  int iteration = 0;
  Vector w;
  Vector objective_values;           // h(w) of the original bundle
  std::optional<SimplexWeights> alpha; // absent for kl-only steps
  double direction_norm = 0.0;
  StepMode mode = StepMode::Main;
};

struct RunResult {
  Vector w;
  std::vector<TrajectoryPoint> trajectory;
  int iterations_run = 0;  // number of parameter updates taken
  bool converged = false;  // stopped on the stationarity test rather than T
};

/// Psi(h, alpha) = sum_i alpha_i h_i.
double psi(const Vector& values, const SimplexWeights& alpha);

/// d = G alpha. With alpha optimal for Phi, <d, g_i> >= |d|^2 >= 0 for every i.
Vector descent_direction(const GradientMatrix& G, const SimplexWeights& alpha);

struct StationarityReport {
  bool stationary = false;
  double min_norm = 0.0;
  SimplexWeights alpha = SimplexWeights::uniform(1);
};

/// Approximates min over the simplex of |G alpha| with `budget` inner steps.
StationarityReport is_pareto_stationary(const GradientMatrix& G, double tol, int budget = 2000);

/// Bilevel Pareto descent: each outer step solves the simplex QP for alpha,
/// then moves w <- w - eta * G alpha.
RunResult run_pdo(const ObjectiveBundle& bundle, const ParameterVector& w0, const PdoConfig& config);

namespace detail {

/// Shared by PDO and PB-PDO: inner solve with the configured budget and step.
InnerSolveReport inner_solve(const GradientMatrix& G, const SimplexWeights& alpha0,
                             const PdoConfig& config);

/// Takes w - step * d, halving the step while any objective increases when
/// backtracking is on. Returns the new point.
Vector take_step(const ObjectiveBundle& bundle, const Vector& w, const Vector& values,
                 const Vector& direction, const PdoConfig& config, int iteration);

}  // namespace detail

}  // namespace pfair
