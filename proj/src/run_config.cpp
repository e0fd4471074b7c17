#include "paretofair/run_config.hpp"

#include "paretofair/errors.hpp"

#include <fstream>

namespace pfair {

using nlohmann::json;

namespace {

template <typename T>
void read_opt(const json& j, const char* key, std::optional<T>& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

template <typename T>
void read(const json& j, const char* key, T& out) {
  if (j.contains(key) && !j.at(key).is_null()) out = j.at(key).get<T>();
}

template <typename T>
json opt_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

}  // namespace

void RunConfig::resolve(std::size_t objectives) {
  if (!eta) eta = synthetic ? 0.1 : 0.05;
  if (!normalize_gradients) normalize_gradients = objectives > 1;
  optimizer.eta = *eta;
  optimizer.normalize_gradients = *normalize_gradients;
}

json RunConfig::to_json() const {
  json opt = {
      {"rho", opt_json(optimizer.rho)},
      {"inner_steps", optimizer.inner_steps},
      {"iterations", optimizer.iterations},
      {"stationarity_tol", optimizer.stationarity_tol},
      {"warm_start_alpha", optimizer.warm_start_alpha},
      {"record_every", optimizer.record_every},
      {"backtracking", optimizer.backtracking},
      {"max_halvings", optimizer.max_halvings},
      {"eps1", optimizer.eps1},
      {"eps2", optimizer.eps2},
      {"kl_tol", optimizer.kl_tol},
      {"main_fallback", optimizer.main_fallback},
  };
  return json{
      {"command", command},
      {"synthetic", synthetic},
      {"nu", nu},
      {"spread", spread},
      {"data", data},
      {"test", test},
      {"schema", schema},
      {"test_fraction", test_fraction},
      {"include_sensitive", opt_json(include_sensitive)},
      {"model",
       {{"kind", to_string(model.kind)},
        {"smoothing", model.smoothing},
        {"fit_intercept", model.fit_intercept},
        {"l2", model.l2}}},
      {"notion", to_string(notion)},
      {"penalty", to_string(penalty)},
      {"eta", opt_json(eta)},
      {"normalize_gradients", opt_json(normalize_gradients)},
      {"optimizer", opt},
      {"preferences", preferences},
      {"seed", seed},
      {"init_scale", init_scale},
      {"w0", opt_json(w0)},
      {"model_path", model_path},
      {"out", out},
  };
}

RunConfig RunConfig::from_json(const json& j) {
  RunConfig c;
  try {
    read(j, "command", c.command);
    read(j, "synthetic", c.synthetic);
    read(j, "nu", c.nu);
    read(j, "spread", c.spread);
    read(j, "data", c.data);
    read(j, "test", c.test);
    read(j, "schema", c.schema);
    read(j, "test_fraction", c.test_fraction);
    read_opt(j, "include_sensitive", c.include_sensitive);
    if (j.contains("model")) {
      const auto& m = j.at("model");
      if (m.contains("kind")) c.model.kind = loss_kind_from_string(m.at("kind").get<std::string>());
      read(m, "smoothing", c.model.smoothing);
      read(m, "fit_intercept", c.model.fit_intercept);
      read(m, "l2", c.model.l2);
    }
    if (j.contains("notion")) c.notion = notion_from_string(j.at("notion").get<std::string>());
    if (j.contains("penalty")) c.penalty = penalty_from_string(j.at("penalty").get<std::string>());
    read_opt(j, "eta", c.eta);
    read_opt(j, "normalize_gradients", c.normalize_gradients);
    if (j.contains("optimizer")) {
      const auto& o = j.at("optimizer");
      read_opt(o, "rho", c.optimizer.rho);
      read(o, "inner_steps", c.optimizer.inner_steps);
      read(o, "iterations", c.optimizer.iterations);
      read(o, "stationarity_tol", c.optimizer.stationarity_tol);
      read(o, "warm_start_alpha", c.optimizer.warm_start_alpha);
      read(o, "record_every", c.optimizer.record_every);
      read(o, "backtracking", c.optimizer.backtracking);
      read(o, "max_halvings", c.optimizer.max_halvings);
      read(o, "eps1", c.optimizer.eps1);
      read(o, "eps2", c.optimizer.eps2);
      read(o, "kl_tol", c.optimizer.kl_tol);
      read(o, "main_fallback", c.optimizer.main_fallback);
    }
    read(j, "preferences", c.preferences);
    read(j, "seed", c.seed);
    read(j, "init_scale", c.init_scale);
    read_opt(j, "w0", c.w0);
    read(j, "model_path", c.model_path);
    read(j, "out", c.out);
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid run configuration: ") + e.what());
  }
  if (c.eta) c.optimizer.eta = *c.eta;
  if (c.normalize_gradients) c.optimizer.normalize_gradients = *c.normalize_gradients;
  return c;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open config file '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("config file '" + path + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

}  // namespace pfair
