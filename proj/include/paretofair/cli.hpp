#pragma once

#include "paretofair/data_io.hpp"
#include "paretofair/fairness.hpp"
#include "paretofair/frontier.hpp"
#include "paretofair/run_config.hpp"

#include <nlohmann/json.hpp>

#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace pfair {

/// The optimization problem a RunConfig describes, loaded once.
struct Workspace {
  BundlePtr bundle;
  std::shared_ptr<const GroupedDataset> train;  // null in synthetic mode
  std::shared_ptr<const GroupedDataset> test;   // null without test data
  std::optional<DatasetSchema> schema;
  std::optional<FeatureEncoder> encoder;
};

Workspace prepare_workspace(const RunConfig& config);

/// Explicit w0, else uniform in [-3, 3]^d (synthetic) or N(0, init_scale^2)
/// per coordinate, drawn from the config seed.
Vector initial_point(const RunConfig& config, std::size_t dim);

struct RunArtifacts {
  std::filesystem::path dir;
  RunResult result;
  nlohmann::json metrics;
};

/// Output directories are written only when config.out is non-empty.
RunArtifacts cmd_train(RunConfig config, const Workspace& ws);
RunArtifacts cmd_trace(RunConfig config, const Workspace& ws);

struct FrontierArtifacts {
  std::filesystem::path dir;
  FrontierSet frontier;
  std::vector<RunArtifacts> runs;  // canonical preference order
};
FrontierArtifacts cmd_frontier(RunConfig config, const Workspace& ws);

/// Metrics of a saved model on config.data.
nlohmann::json cmd_eval(const RunConfig& config);

/// Finite-difference check of every objective (and the KL objective when a
/// preference is given) at 100 seeded points.
nlohmann::json cmd_check_grads(const RunConfig& config, const Workspace& ws);

nlohmann::json metrics_to_json(const FairnessMetrics& m);

/// Error and DEO of each frontier point on `data`, filtered to the
/// non-dominated subset in that space. Rows: {point index, error, deo}.
struct MetricPoint {
  std::size_t point = 0;
  double error = 0.0;
  double deo = 0.0;
};
std::vector<MetricPoint> metric_frontier(const FrontierSet& frontier, const GroupedDataset& data);

/// |pi_i h_i - pi_j h_j| for every pair i < j.
std::vector<double> preference_residuals(const Vector& values, const Vector& pi);

/// Full command-line entry point; returns the process exit code.
int run_cli(int argc, char** argv);

}  // namespace pfair
