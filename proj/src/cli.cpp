#include "paretofair/cli.hpp"

#include "paretofair/errors.hpp"

#include <CLI11.hpp>
#include <boost/random/mersenne_twister.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/uniform_real_distribution.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace pfair {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string num17(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string num6(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

std::vector<double> to_std(const Vector& v) { return {v.data(), v.data() + v.size()}; }

Vector to_eigen(const std::vector<double>& v) {
  return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size()));
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  out << text;
}

void write_json(const fs::path& path, const json& j) { write_text(path, j.dump(2) + "\n"); }

/// iteration, mode, h_0..h_{m-1}, direction_norm, alpha_0..alpha_{k-1}
std::string trajectory_csv(const std::vector<TrajectoryPoint>& trajectory, std::size_t m,
                           std::size_t alpha_columns) {
  std::ostringstream os;
  os << "iteration,mode";
  for (std::size_t i = 0; i < m; ++i) os << ",h_" << i;
  os << ",direction_norm";
  for (std::size_t i = 0; i < alpha_columns; ++i) os << ",alpha_" << i;
  os << "\n";
  for (const auto& p : trajectory) {
    os << p.iteration << ',' << to_string(p.mode);
    for (Eigen::Index i = 0; i < p.objective_values.size(); ++i) os << ',' << num17(p.objective_values[i]);
    os << ',' << num17(p.direction_norm);
    for (std::size_t i = 0; i < alpha_columns; ++i) {
      os << ',';
      if (p.alpha && i < p.alpha->size()) os << num17(p.alpha->values()[static_cast<Eigen::Index>(i)]);
    }
    os << "\n";
  }
  return os.str();
}

json objective_json(const ObjectiveBundle& bundle, const Vector& values) {
  json j = json::object();
  for (std::size_t i = 0; i < bundle.size(); ++i) j[bundle.name(i)] = values[static_cast<Eigen::Index>(i)];
  return j;
}

json run_metrics(const RunConfig& config, const Workspace& ws, const RunResult& result) {
  const TrajectoryPoint& last = result.trajectory.back();
  json j = {
      {"iterations_run", result.iterations_run},
      {"converged", result.converged},
      {"direction_norm", last.direction_norm},
      {"objectives", objective_json(*ws.bundle, last.objective_values)},
  };
  const auto sample = sample_bundle(*ws.bundle, result.w);
  const GradientMatrix G = config.optimizer.normalize_gradients ? normalize_columns(sample.raw)
                                                               : GradientMatrix{sample.raw, false};
  j["min_common_gradient_norm"] = is_pareto_stationary(G, config.optimizer.stationarity_tol).min_norm;
  if (ws.train) j["train"] = metrics_to_json(evaluate_metrics(result.w, *ws.train));
  if (ws.test) j["test"] = metrics_to_json(evaluate_metrics(result.w, *ws.test));
  return j;
}

json model_json(const RunConfig& config, const Workspace& ws, const Vector& w) {
  json j = {
      {"version", PARETOFAIR_VERSION},
      {"weights", to_std(w)},
      {"model",
       {{"kind", to_string(config.model.kind)},
        {"smoothing", config.model.smoothing},
        {"fit_intercept", config.model.fit_intercept},
        {"l2", config.model.l2}}},
      {"notion", to_string(config.notion)},
  };
  if (ws.train) j["feature_names"] = ws.train->feature_names;
  if (ws.encoder) j["encoder"] = ws.encoder->to_json();
  if (ws.schema) j["schema"] = ws.schema->to_json();
  if (config.synthetic) j["synthetic"] = {{"nu", config.nu}, {"spread", config.spread}};
  return j;
}

void write_run(const RunConfig& config, const Workspace& ws, const RunArtifacts& run, std::size_t alpha_columns) {
  fs::create_directories(run.dir);
  write_json(run.dir / "config.json", config.to_json());
  write_text(run.dir / "trajectory.csv", trajectory_csv(run.result.trajectory, ws.bundle->size(), alpha_columns));
  write_json(run.dir / "model.json", model_json(config, ws, run.result.w));
  write_json(run.dir / "metrics.json", run.metrics);
}

}  // namespace

json metrics_to_json(const FairnessMetrics& m) {
  json groups = json::array();
  for (const auto& g : m.groups) {
    groups.push_back({{"name", g.name},
                      {"support", g.support},
                      {"positives", g.positives},
                      {"negatives", g.negatives},
                      {"accuracy", g.accuracy},
                      {"tpr", g.tpr ? json(*g.tpr) : json(nullptr)},
                      {"fpr", g.fpr ? json(*g.fpr) : json(nullptr)}});
  }
  return {{"size", m.size}, {"accuracy", m.accuracy}, {"error", 1.0 - m.accuracy}, {"deo", m.deo}, {"groups", groups}};
}

Workspace prepare_workspace(const RunConfig& config) {
  Workspace ws;
  if (config.synthetic) {
    if (config.nu.empty()) throw UsageError("synthetic mode needs a non-empty nu");
    ws.bundle = make_gaussian_pair(GaussianPairParams{to_eigen(config.nu), config.spread});
    return ws;
  }
  if (config.data.empty()) throw UsageError("no data file given (use --data or --synthetic)");
  if (config.schema.empty()) throw UsageError("no schema given (use --schema)");
  DatasetSchema schema = DatasetSchema::load(config.schema);
  if (config.include_sensitive) schema.include_sensitive = *config.include_sensitive;
  LoadedDataset loaded = load_csv(config.data, schema);
  if (!config.test.empty()) {
    ws.test = std::make_shared<GroupedDataset>(apply_schema_to_test(config.test, schema, loaded.encoder));
    ws.train = std::make_shared<GroupedDataset>(std::move(loaded.data));
  } else if (config.test_fraction > 0.0) {
    auto [train, test] = split(loaded.data, config.test_fraction, config.seed);
    ws.train = std::make_shared<GroupedDataset>(std::move(train));
    ws.test = std::make_shared<GroupedDataset>(std::move(test));
  } else {
    ws.train = std::make_shared<GroupedDataset>(std::move(loaded.data));
  }
  ws.bundle = build_objectives(config.notion, config.model, ws.train, config.penalty);
  ws.schema = std::move(schema);
  ws.encoder = std::move(loaded.encoder);
  return ws;
}

Vector initial_point(const RunConfig& config, std::size_t dim) {
  if (config.w0) {
    if (config.w0->size() != dim) {
      throw UsageError("w0 has length " + std::to_string(config.w0->size()) + " but the problem has " +
                       std::to_string(dim) + " parameters");
    }
    return to_eigen(*config.w0);
  }
  boost::random::mt19937_64 rng(config.seed);
  Vector w(static_cast<Eigen::Index>(dim));
  if (config.synthetic) {
    boost::random::uniform_real_distribution<double> u(-3.0, 3.0);
    for (auto& x : w) x = u(rng);
  } else {
    boost::random::normal_distribution<double> n(0.0, config.init_scale);
    for (auto& x : w) x = n(rng);
  }
  return w;
}

RunArtifacts cmd_train(RunConfig config, const Workspace& ws) {
  config.command = "train";
  config.resolve(ws.bundle->size());
  const PdoConfig& pdo = config.optimizer;
  RunArtifacts run;
  run.result = run_pdo(*ws.bundle, initial_point(config, ws.bundle->dim()), pdo);
  run.metrics = run_metrics(config, ws, run.result);
  if (!config.out.empty()) {
    run.dir = config.out;
    write_run(config, ws, run, ws.bundle->size());
  }
  return run;
}

std::vector<double> preference_residuals(const Vector& values, const Vector& pi) {
  std::vector<double> out;
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    for (Eigen::Index j = i + 1; j < values.size(); ++j) {
      out.push_back(std::abs(pi[i] * values[i] - pi[j] * values[j]));
    }
  }
  return out;
}

RunArtifacts cmd_trace(RunConfig config, const Workspace& ws) {
  config.command = "trace";
  if (config.preferences.size() != 1) {
    throw UsageError("trace takes exactly one preference vector (got " +
                     std::to_string(config.preferences.size()) + ")");
  }
  const std::size_t m = ws.bundle->size();
  if (config.preferences.front().size() != m) {
    throw UsageError("preference vector has length " + std::to_string(config.preferences.front().size()) +
                     " but the problem has " + std::to_string(m) + " objectives");
  }
  const PreferenceVector pref(to_eigen(config.preferences.front()));
  config.resolve(m);

  RunArtifacts run;
  run.result = run_pbpdo(*ws.bundle, pref, initial_point(config, ws.bundle->dim()), config.optimizer);
  run.metrics = run_metrics(config, ws, run.result);

  const Vector& final_values = run.result.trajectory.back().objective_values;
  json modes = {{"main", 0}, {"preference", 0}, {"kl-only", 0}};
  for (const auto& p : run.result.trajectory) modes[to_string(p.mode)] = modes[to_string(p.mode)].get<int>() + 1;
  const json report = {
      {"preference", config.preferences.front()},
      {"objectives", objective_json(*ws.bundle, final_values)},
      {"kl_value", kl_objective(final_values, pref)},
      {"residuals", preference_residuals(final_values, pref.pi())},
      {"max_residual", [&] {
         const auto r = preference_residuals(final_values, pref.pi());
         return r.empty() ? 0.0 : *std::max_element(r.begin(), r.end());
       }()},
      {"converged", run.result.converged},
      {"iterations_run", run.result.iterations_run},
      {"recorded_modes", modes},
  };
  run.metrics["report"] = report;
  if (!config.out.empty()) {
    run.dir = config.out;
    write_run(config, ws, run, m + 1);
    write_json(run.dir / "report.json", report);
  }
  return run;
}

std::vector<MetricPoint> metric_frontier(const FrontierSet& frontier, const GroupedDataset& data) {
  std::vector<MetricPoint> all;
  std::vector<Vector> coords;
  for (std::size_t k = 0; k < frontier.points.size(); ++k) {
    const auto m = evaluate_metrics(frontier.points[k].w, data);
    all.push_back(MetricPoint{k, 1.0 - m.accuracy, m.deo});
    Vector v(2);
    v << 1.0 - m.accuracy, m.deo;
    coords.push_back(v);
  }
  std::vector<MetricPoint> kept;
  for (std::size_t idx : non_dominated_filter(coords)) kept.push_back(all[idx]);
  std::stable_sort(kept.begin(), kept.end(), [](const MetricPoint& a, const MetricPoint& b) {
    return a.error < b.error || (a.error == b.error && a.deo < b.deo);
  });
  return kept;
}

FrontierArtifacts cmd_frontier(RunConfig config, const Workspace& ws) {
  config.command = "frontier";
  if (config.preferences.empty()) throw UsageError("frontier needs at least one preference vector");
  auto prefs = config.preferences;
  std::sort(prefs.begin(), prefs.end());  // run ids independent of input order
  config.preferences = prefs;
  config.resolve(ws.bundle->size());

  FrontierArtifacts out;
  out.dir = config.out;
  const bool write = !config.out.empty();
  if (write) {
    fs::create_directories(out.dir);
    write_json(out.dir / "config.json", config.to_json());
  }

  auto write_frontier = [&](bool complete, const std::string& failure) {
    std::vector<std::vector<TrajectoryPoint>> trajectories;
    for (const auto& r : out.runs) trajectories.push_back(r.result.trajectory);
    out.frontier = merge_runs(trajectories);
    if (!write) return;
    std::ostringstream loss;
    loss << "run_id,iteration,mode";
    for (std::size_t i = 0; i < ws.bundle->size(); ++i) loss << ",h_" << i;
    loss << "\n";
    for (const auto& p : out.frontier.points) {
      loss << p.run_id << ',' << p.iteration << ',' << to_string(p.mode);
      for (Eigen::Index i = 0; i < p.objective_values.size(); ++i) loss << ',' << num17(p.objective_values[i]);
      loss << "\n";
    }
    write_text(out.dir / "frontier_loss.csv", loss.str());

    std::ostringstream metrics;
    metrics << "split,run_id,iteration,error,deo\n";
    auto emit = [&](const char* split_name, const GroupedDataset& data) {
      for (const auto& mp : metric_frontier(out.frontier, data)) {
        const auto& p = out.frontier.points[mp.point];
        metrics << split_name << ',' << p.run_id << ',' << p.iteration << ',' << num6(mp.error) << ','
                << num6(mp.deo) << "\n";
      }
    };
    if (ws.train) emit("train", *ws.train);
    if (ws.test) emit("test", *ws.test);
    if (ws.train) write_text(out.dir / "frontier_metrics.csv", metrics.str());

    json status = {{"complete", complete},
                   {"runs_completed", out.runs.size()},
                   {"runs_requested", prefs.size()},
                   {"frontier_points", out.frontier.points.size()}};
    if (!complete) status["error"] = failure;
    write_json(out.dir / "status.json", status);
  };

  for (std::size_t k = 0; k < prefs.size(); ++k) {
    RunConfig sub = config;
    sub.preferences = {prefs[k]};
    char name[32];
    std::snprintf(name, sizeof name, "run_%02zu", k);
    sub.out = write ? (out.dir / name).string() : std::string();
    try {
      out.runs.push_back(cmd_trace(sub, ws));
    } catch (const std::exception& e) {
      write_frontier(false, "run " + std::to_string(k) + " failed: " + e.what());
      throw;
    }
  }
  write_frontier(true, "");
  return out;
}

json cmd_eval(const RunConfig& config) {
  if (config.model_path.empty()) throw UsageError("eval needs a model file (use --model-file)");
  if (config.data.empty()) throw UsageError("eval needs a data file (use --data)");
  std::ifstream in(config.model_path);
  if (!in) throw DataError("cannot open model file '" + config.model_path + "'");
  json model;
  try {
    in >> model;
  } catch (const json::exception& e) {
    throw DataError("model file '" + config.model_path + "' is not valid JSON: " + e.what());
  }
  if (!model.contains("weights") || !model.contains("encoder")) {
    throw UsageError("model file '" + config.model_path + "' has no weights or encoder");
  }
  DatasetSchema schema;
  if (!config.schema.empty()) {
    schema = DatasetSchema::load(config.schema);
    // The feature layout is fixed at training time.
    if (model.contains("schema")) {
      schema.include_sensitive = DatasetSchema::from_json(model.at("schema")).include_sensitive;
    }
  } else if (model.contains("schema")) {
    schema = DatasetSchema::from_json(model.at("schema"));
  } else {
    throw UsageError("no schema given and the model does not embed one");
  }
  if (config.include_sensitive) schema.include_sensitive = *config.include_sensitive;
  const FeatureEncoder encoder = FeatureEncoder::from_json(model.at("encoder"));
  const GroupedDataset data = apply_schema_to_test(config.data, schema, encoder);
  const Vector w = to_eigen(model.at("weights").get<std::vector<double>>());
  if (static_cast<std::size_t>(w.size()) != data.dim()) {
    throw UsageError("model has " + std::to_string(w.size()) + " weights but the data encodes to " +
                     std::to_string(data.dim()) + " features");
  }
  json metrics = metrics_to_json(evaluate_metrics(w, data));
  if (!config.out.empty()) {
    fs::create_directories(config.out);
    write_json(fs::path(config.out) / "metrics.json", metrics);
  }
  return metrics;
}

json cmd_check_grads(const RunConfig& config, const Workspace& ws) {
  constexpr int kDraws = 100;
  constexpr double kStep = 1e-6;
  constexpr double kTolerance = 1e-5;

  BundlePtr bundle = ws.bundle;
  if (!config.preferences.empty()) {
    bundle = augmented_bundle(ws.bundle, PreferenceVector(to_eigen(config.preferences.front())));
  }
  boost::random::mt19937_64 rng(config.seed);
  boost::random::uniform_real_distribution<double> uniform(-3.0, 3.0);
  boost::random::normal_distribution<double> normal(0.0, 0.5);
  std::vector<double> worst(bundle->size(), 0.0);
  for (int k = 0; k < kDraws; ++k) {
    Vector w(static_cast<Eigen::Index>(bundle->dim()));
    for (auto& x : w) x = config.synthetic ? uniform(rng) : normal(rng);
    for (std::size_t i = 0; i < bundle->size(); ++i) {
      worst[i] = std::max(worst[i], finite_difference_check(component(bundle, i), w, kStep));
    }
  }
  json objectives = json::array();
  bool pass = true;
  for (std::size_t i = 0; i < bundle->size(); ++i) {
    objectives.push_back({{"name", bundle->name(i)}, {"max_error", worst[i]}});
    pass = pass && worst[i] <= kTolerance;
  }
  return {{"draws", kDraws}, {"step", kStep}, {"tolerance", kTolerance}, {"objectives", objectives}, {"pass", pass}};
}

// ---------------------------------------------------------------------------
// Command line

namespace {

struct Flags {
  std::optional<std::string> config, data, test, schema, notion, model, out, normalize, model_file, penalty,
      include_sensitive, w0, pref_env;
  std::vector<std::string> prefs;
  std::optional<double> eta, rho, eps1, eps2, l2, test_fraction;
  std::optional<int> inner_steps, iters, record_every;
  std::optional<std::uint64_t> seed;
  bool synthetic = false;
  bool backtracking = false;
};

std::vector<double> parse_list(const std::string& text, const char* what) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (item.find_first_not_of(" \t", pos) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError(std::string("cannot parse ") + what + " '" + text + "'");
    }
  }
  if (out.empty()) throw UsageError(std::string("empty ") + what);
  return out;
}

void add_flags(CLI::App& sub, Flags& f) {
  auto env = [](CLI::Option* o, const char* name) { o->envname(std::string("PFAIR_") + name); };
  env(sub.add_option("--config", f.config, "JSON run configuration")->check(CLI::ExistingFile), "CONFIG");
  env(sub.add_option("--data", f.data, "training CSV"), "DATA");
  env(sub.add_option("--test", f.test, "held-out CSV encoded with the training encoder"), "TEST");
  env(sub.add_option("--test-fraction", f.test_fraction, "stratified split fraction when --test is absent"),
      "TEST_FRACTION");
  env(sub.add_option("--schema", f.schema, "dataset schema JSON"), "SCHEMA");
  env(sub.add_option("--notion", f.notion, "fairness notion")->check(CLI::IsMember({"eo", "eod", "dm", "none"})),
      "NOTION");
  env(sub.add_option("--model", f.model, "loss")->check(CLI::IsMember({"logistic", "svm"})), "MODEL");
  env(sub.add_option("--penalty", f.penalty, "pairwise gap penalty")->check(CLI::IsMember({"squared", "abs"})),
      "PENALTY");
  env(sub.add_option("--l2", f.l2, "ridge coefficient"), "L2");
  env(sub.add_option("--include-sensitive", f.include_sensitive, "use the sensitive column as a feature")
          ->check(CLI::IsMember({"on", "off"})),
      "INCLUDE_SENSITIVE");
  sub.add_option("--pref", f.prefs, "preference vector \"a,b,...\" (repeatable)");
  env(sub.add_option("--pref-env", f.pref_env)->group(""), "PREF");
  env(sub.add_option("--eta", f.eta, "outer step size"), "ETA");
  env(sub.add_option("--rho", f.rho, "inner step size (default automatic)"), "RHO");
  env(sub.add_option("--inner-steps", f.inner_steps, "inner iterations K"), "INNER_STEPS");
  env(sub.add_option("--iters", f.iters, "outer iterations T"), "ITERS");
  env(sub.add_option("--record-every", f.record_every, "trajectory recording cadence"), "RECORD_EVERY");
  env(sub.add_option("--eps1", f.eps1, "Case I threshold on |g_KL|"), "EPS1");
  env(sub.add_option("--eps2", f.eps2, "Case II threshold on |d| / |g_KL|"), "EPS2");
  env(sub.add_option("--seed", f.seed, "seed for the start point and splits"), "SEED");
  env(sub.add_option("--w0", f.w0, "explicit start point \"a,b,...\""), "W0");
  env(sub.add_option("--out", f.out, "output directory"), "OUT");
  env(sub.add_flag("--synthetic", f.synthetic, "optimize the two-objective Gaussian benchmark"), "SYNTHETIC");
  env(sub.add_flag("--backtracking", f.backtracking, "halve the step while any objective increases"),
      "BACKTRACKING");
  env(sub.add_option("--normalize-gradients", f.normalize, "unit-norm gradient columns")
          ->check(CLI::IsMember({"on", "off"})),
      "NORMALIZE_GRADIENTS");
  env(sub.add_option("--model-file", f.model_file, "saved model.json (eval)"), "MODEL_FILE");
}

RunConfig build_config(const Flags& f, const std::string& command) {
  RunConfig c = f.config ? RunConfig::load(*f.config) : RunConfig{};
  c.command = command;
  if (f.data) c.data = *f.data;
  if (f.test) c.test = *f.test;
  if (f.test_fraction) c.test_fraction = *f.test_fraction;
  if (f.schema) c.schema = *f.schema;
  if (f.notion) c.notion = notion_from_string(*f.notion);
  if (f.model) c.model.kind = loss_kind_from_string(*f.model);
  if (f.penalty) c.penalty = penalty_from_string(*f.penalty);
  if (f.l2) c.model.l2 = *f.l2;
  if (f.include_sensitive) c.include_sensitive = *f.include_sensitive == "on";
  if (!f.prefs.empty()) {
    c.preferences.clear();
    for (const auto& p : f.prefs) c.preferences.push_back(parse_list(p, "preference vector"));
  } else if (f.pref_env) {
    c.preferences = {parse_list(*f.pref_env, "preference vector")};
  }
  if (f.eta) c.eta = *f.eta;
  if (f.rho) c.optimizer.rho = *f.rho;
  if (f.inner_steps) c.optimizer.inner_steps = *f.inner_steps;
  if (f.iters) c.optimizer.iterations = *f.iters;
  if (f.record_every) c.optimizer.record_every = *f.record_every;
  if (f.eps1) c.optimizer.eps1 = *f.eps1;
  if (f.eps2) c.optimizer.eps2 = *f.eps2;
  if (f.seed) c.seed = *f.seed;
  if (f.w0) c.w0 = parse_list(*f.w0, "start point");
  if (f.out) c.out = *f.out;
  if (f.synthetic) c.synthetic = true;
  if (f.backtracking) c.optimizer.backtracking = true;
  if (f.normalize) c.normalize_gradients = *f.normalize == "on";
  if (f.model_file) c.model_path = *f.model_file;
  for (const auto& p : c.preferences) PreferenceVector(to_eigen(p));  // validates positivity
  if (c.eta) c.optimizer.eta = *c.eta;
  c.optimizer.validate();
  c.model.validate();
  return c;
}

void emit_error(ErrorKind kind, const std::string& message) {
  const json record = {{"error", {{"kind", to_string(kind)}, {"message", message}, {"exit_code", exit_code(kind)}}}};
  std::cerr << record.dump() << std::endl;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{"Pareto descent for accuracy/fairness trade-offs"};
  app.set_version_flag("--version", PARETOFAIR_VERSION);
  app.require_subcommand(1);

  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"train", "single Pareto-stationary model (PDO)"},
      {"trace", "steer to one preference vector (PB-PDO)"},
      {"frontier", "merge PB-PDO runs over several preferences"},
      {"eval", "metrics of a saved model on a CSV"},
      {"check-grads", "finite-difference check of every objective"},
  };
  for (const auto& [name, help] : commands) add_flags(*app.add_subcommand(name, help), flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    emit_error(ErrorKind::Usage, e.what());
    return exit_code(ErrorKind::Usage);
  }

  try {
    const std::string command = app.get_subcommands().front()->get_name();
    RunConfig config = build_config(flags, command);
    if (command == "eval") {
      std::cout << cmd_eval(config).dump(2) << std::endl;
      return 0;
    }
    const Workspace ws = prepare_workspace(config);
    if (command == "train") {
      const auto run = cmd_train(config, ws);
      std::cout << json{{"out", run.dir.string()}, {"converged", run.result.converged},
                        {"iterations_run", run.result.iterations_run}}
                       .dump()
                << std::endl;
    } else if (command == "trace") {
      const auto run = cmd_trace(config, ws);
      std::cout << run.metrics.at("report").dump(2) << std::endl;
    } else if (command == "frontier") {
      const auto front = cmd_frontier(config, ws);
      std::cout << json{{"out", front.dir.string()}, {"runs", front.runs.size()},
                        {"frontier_points", front.frontier.points.size()}}
                       .dump()
                << std::endl;
    } else {
      const json report = cmd_check_grads(config, ws);
      std::cout << report.dump(2) << std::endl;
      if (!report.at("pass").get<bool>()) return exit_code(ErrorKind::Numeric);
    }
    return 0;
  } catch (const Error& e) {
    emit_error(e.kind(), e.what());
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    emit_error(ErrorKind::Numeric, e.what());
    return exit_code(ErrorKind::Numeric);
  }
}

}  // namespace pfair
