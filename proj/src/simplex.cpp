#include "paretofair/simplex.hpp"

#include "paretofair/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <optional>

namespace pfair {

SimplexWeights SimplexWeights::uniform(std::size_t m) {
  if (m == 0) throw UsageError("simplex dimension must be >= 1");
  return SimplexWeights(Vector::Constant(static_cast<Eigen::Index>(m), 1.0 / static_cast<double>(m)));
}

SimplexWeights SimplexWeights::one_hot(std::size_t m, std::size_t i) {
  if (i >= m) throw UsageError("one-hot index out of range");
  Vector v = Vector::Zero(static_cast<Eigen::Index>(m));
  v[static_cast<Eigen::Index>(i)] = 1.0;
  return SimplexWeights(std::move(v));
}

SimplexWeights SimplexWeights::from(const Vector& v) {
  if (v.size() == 0) throw UsageError("simplex dimension must be >= 1");
  if (!v.allFinite()) throw UsageError("simplex weights must be finite");
  if (v.minCoeff() < -1e-12) throw UsageError("simplex weights must be nonnegative");
  if (std::abs(v.sum() - 1.0) > 1e-9) throw UsageError("simplex weights must sum to 1");
  return SimplexWeights(v.cwiseMax(0.0));
}

SimplexWeights project_simplex(const Vector& v) {
  const Eigen::Index m = v.size();
  if (m == 0) throw UsageError("cannot project onto a 0-dimensional simplex");
  if (!v.allFinite()) throw NumericError("cannot project a non-finite vector onto the simplex");
  // Feasible up to rounding: the projection is the point itself.
  if (v.minCoeff() >= 0.0 && std::abs(v.sum() - 1.0) <= 1e-12) return SimplexWeights(v);

  std::vector<double> sorted(v.data(), v.data() + m);
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  double cumulative = 0.0;
  double tau = 0.0;
  for (Eigen::Index k = 0; k < m; ++k) {
    cumulative += sorted[static_cast<std::size_t>(k)];
    const double candidate = (cumulative - 1.0) / static_cast<double>(k + 1);
    if (sorted[static_cast<std::size_t>(k)] - candidate > 0.0) tau = candidate;
  }
  Vector out = (v.array() - tau).cwiseMax(0.0);
  // Renormalize away rounding so the sum is 1 to machine precision.
  const double total = out.sum();
  if (total > 0.0) out /= total;
  return SimplexWeights(std::move(out));
}

double phi(const GradientMatrix& G, const SimplexWeights& alpha) {
  if (G.size() != alpha.size()) throw UsageError("gradient matrix and weights disagree on m");
  return (G.columns * alpha.values()).squaredNorm();
}

namespace {

/// Minimizes a' Q a subject to sum(a) = 1 over the support of alpha via the KKT
/// system; returns the point and its value when it is feasible.
std::optional<std::pair<Vector, double>> polish_on_support(const Matrix& gram, const Vector& alpha) {
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < alpha.size(); ++i) {
    if (alpha[i] > 0.0) support.push_back(i);
  }
  const auto s = static_cast<Eigen::Index>(support.size());
  if (s < 2) return std::nullopt;
  Matrix kkt = Matrix::Zero(s + 1, s + 1);
  for (Eigen::Index a = 0; a < s; ++a) {
    for (Eigen::Index b = 0; b < s; ++b) kkt(a, b) = 2.0 * gram(support[a], support[b]);
    kkt(a, s) = kkt(s, a) = 1.0;
  }
  Vector rhs = Vector::Zero(s + 1);
  rhs[s] = 1.0;
  const Vector x = kkt.completeOrthogonalDecomposition().solve(rhs);
  if (!x.allFinite() || x.head(s).minCoeff() < 0.0) return std::nullopt;
  Vector out = Vector::Zero(alpha.size());
  for (Eigen::Index a = 0; a < s; ++a) out[support[a]] = x[a];
  out = project_simplex(out).values();
  return std::make_pair(out, out.dot(gram * out));
}

}  // namespace

double default_inner_step(const Matrix& gram) {
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(gram, Eigen::EigenvaluesOnly);
  const double lambda_max = std::max(0.0, eig.eigenvalues().maxCoeff());
  return 1.0 / (2.0 * lambda_max + 1e-12);
}

InnerSolveReport solve_inner(const GradientMatrix& G, const SimplexWeights& alpha0,
                             const InnerSolveOptions& options) {
  if (G.size() != alpha0.size()) throw UsageError("gradient matrix and weights disagree on m");
  if (options.max_iterations < 1) throw UsageError("inner solve needs K >= 1");
  const Matrix gram = G.columns.transpose() * G.columns;
  const double rho = options.rho ? *options.rho : default_inner_step(gram);
  if (!(rho > 0.0)) throw UsageError("inner step size rho must be positive");

  InnerSolveReport report{alpha0, 0.0, 0, rho, {}};
  Vector alpha = alpha0.values();
  double current = alpha.dot(gram * alpha);
  if (options.record_trace) report.phi_trace.reserve(static_cast<std::size_t>(options.max_iterations));

  for (int k = 0; k < options.max_iterations; ++k) {
    if (options.early_exit && current <= options.phi_tol) break;
    const Vector grad = 2.0 * (gram * alpha);
    SimplexWeights next = project_simplex(alpha - rho * grad);
    const double next_phi = next.values().dot(gram * next.values());
    if (!std::isfinite(next_phi)) {
      throw NumericError("inner objective became non-finite; try a smaller rho");
    }
    const double improvement = current - next_phi;
    alpha = next.values();
    current = next_phi;
    ++report.iterations_run;
    if (options.record_trace) report.phi_trace.push_back(current);
    if (options.early_exit && improvement < options.min_improvement) break;
  }
  if (options.polish) {
    if (auto polished = polish_on_support(gram, alpha); polished && polished->second < current) {
      alpha = polished->first;
      current = polished->second;
      if (options.record_trace) report.phi_trace.push_back(current);
    }
  }
  report.weights = SimplexWeights::from(alpha);
  report.phi_value = std::max(0.0, current);
  return report;
}

InnerSolveReport solve_inner(const GradientMatrix& G, const SimplexWeights& alpha0, double rho,
                             int K) {
  InnerSolveOptions options;
  options.rho = rho;
  options.max_iterations = K;
  options.early_exit = false;
  return solve_inner(G, alpha0, options);
}

}  // namespace pfair
