#pragma once

#include "paretofair/fairness.hpp"
#include "paretofair/pbpdo.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pfair {

/// Everything a command needs; round-trips through JSON without loss.
/// Optional fields left empty are resolved per experiment by resolve().
struct RunConfig {
  std::string command = "train";

  // Data source: either the synthetic Gaussian pair or a CSV + schema.
  bool synthetic = false;
  std::vector<double> nu{1.0, 1.0};
  double spread = 1.5;
  std::string data;
  std::string test;
  std::string schema;
  double test_fraction = 0.3;  // used when no test file is given; 0 disables
  std::optional<bool> include_sensitive;

  LinearModelSpec model;
  FairnessNotion notion = FairnessNotion::EO;
  Penalty penalty = Penalty::Squared;

  std::optional<double> eta;                  // synthetic 0.1, fairness 0.05
  std::optional<bool> normalize_gradients;    // on unless there is one objective
  PbpdoConfig optimizer;                      // eta/normalize mirrored from above

  std::vector<std::vector<double>> preferences;

  std::uint64_t seed = 0;
  double init_scale = 0.01;                  // std of the Gaussian start
  std::optional<std::vector<double>> w0;     // explicit start overrides the draw

  std::string model_path;                    // eval
  std::string out = "run";

  /// Fills eta and normalize_gradients and copies them into optimizer.
  /// `objectives` is the size of the bundle being optimized.
  void resolve(std::size_t objectives);

  nlohmann::json to_json() const;
  static RunConfig from_json(const nlohmann::json& j);
  static RunConfig load(const std::string& path);
};

}  // namespace pfair
