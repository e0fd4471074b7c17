#include "oracles.hpp"

#include "paretofair/cli.hpp"
#include "paretofair/errors.hpp"

#include <doctest.h>

#include <cstdlib>
#include <sstream>

using namespace pfair;
using nlohmann::json;
namespace fs = std::filesystem;

namespace {

int run(std::vector<std::string> args) {
  args.insert(args.begin(), "paretofair");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return run_cli(static_cast<int>(argv.size()), argv.data());
}

json read_json(const fs::path& p) { return json::parse(oracle::read_file(p)); }

std::vector<std::vector<std::string>> read_rows(const fs::path& p) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(oracle::read_file(p));
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    rows.push_back(fields);
  }
  return rows;
}

/// Two-group toy classification data where group B has a shifted score.
struct ToyData {
  fs::path dir, schema, train, test;
};

ToyData toy_data() {
  ToyData t;
  t.dir = oracle::temp_dir("cli");
  t.schema = t.dir / "schema.json";
  t.train = t.dir / "train.csv";
  t.test = t.dir / "test.csv";
  oracle::write_file(t.schema, R"({
    "name": "toy", "continuous": ["x1", "x2"], "categorical": ["color"],
    "label": {"column": "y", "positive": ["1"], "negative": ["0"]},
    "sensitive": {"column": "group", "groups": [{"name": "A", "values": ["a"]}, {"name": "B", "values": ["b"]}]}
  })");
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  auto write = [&](const fs::path& p, int rows) {
    std::ostringstream os;
    os << "x1,x2,color,group,y\n";
    const char* colors[] = {"red", "green", "blue"};
    for (int i = 0; i < rows; ++i) {
      const bool b = i % 3 == 0;
      const double x1 = n(rng), x2 = n(rng);
      const double score = x1 + 0.5 * x2 + (b ? -0.8 : 0.3) + 0.7 * n(rng);
      os << x1 << ',' << x2 << ',' << colors[i % 3 == 1 ? 1 : (i % 5 == 0 ? 2 : 0)] << ',' << (b ? "b" : "a") << ','
         << (score > 0 ? 1 : 0) << '\n';
    }
    oracle::write_file(p, os.str());
  };
  write(t.train, 300);
  write(t.test, 120);
  return t;
}

}  // namespace

TEST_CASE("run config round-trips through json") {
  RunConfig c;
  c.command = "trace";
  c.synthetic = true;
  c.nu = {0.5, -1.0, 2.0};
  c.eta = 0.2;
  c.normalize_gradients = false;
  c.include_sensitive = true;
  c.model.kind = LossKind::Logistic;
  c.model.l2 = 0.3;
  c.notion = FairnessNotion::EOD;
  c.penalty = Penalty::Abs;
  c.optimizer.iterations = 77;
  c.optimizer.rho = 0.01;
  c.optimizer.eps1 = 0.5;
  c.preferences = {{1.0, 2.0}, {3.0, 1.0}};
  c.seed = 99;
  c.w0 = std::vector<double>{1.0, 2.0, 3.0};
  c.out = "somewhere";
  const json j = c.to_json();
  const RunConfig back = RunConfig::from_json(j);
  CHECK(back.to_json() == j);
  CHECK(back.optimizer.eta == 0.2);
  CHECK_FALSE(back.optimizer.normalize_gradients);
  CHECK_THROWS_AS(RunConfig::from_json(json{{"notion", "parity"}}), UsageError);
  CHECK_THROWS_AS(RunConfig::from_json(json{{"seed", "x"}}), UsageError);
}

TEST_CASE("resolve fills per-experiment defaults") {
  RunConfig c;
  c.synthetic = true;
  c.resolve(2);
  CHECK(*c.eta == 0.1);
  CHECK(c.optimizer.normalize_gradients);
  RunConfig f;
  f.resolve(1);
  CHECK(*f.eta == 0.05);
  CHECK_FALSE(f.optimizer.normalize_gradients);
}

TEST_CASE("synthetic train writes its artifacts deterministically") {
  const fs::path dir = oracle::temp_dir("train");
  REQUIRE(run({"train", "--synthetic", "--iters", "300", "--out", (dir / "a").string()}) == 0);
  REQUIRE(run({"train", "--synthetic", "--iters", "300", "--out", (dir / "b").string()}) == 0);
  for (const char* f : {"trajectory.csv", "model.json", "metrics.json", "config.json"}) CHECK(fs::exists(dir / "a" / f));
  CHECK(oracle::read_file(dir / "a/trajectory.csv") == oracle::read_file(dir / "b/trajectory.csv"));

  const auto rows = read_rows(dir / "a/trajectory.csv");
  CHECK(rows.front() == std::vector<std::string>{"iteration", "mode", "h_0", "h_1", "direction_norm", "alpha_0", "alpha_1"});
  CHECK(rows[1][1] == "main");

  // The saved config reproduces the run.
  const json cfg = read_json(dir / "a/config.json");
  CHECK(cfg.at("eta") == 0.1);
  REQUIRE(run({"train", "--config", (dir / "a/config.json").string(), "--out", (dir / "c").string()}) == 0);
  CHECK(oracle::read_file(dir / "a/trajectory.csv") == oracle::read_file(dir / "c/trajectory.csv"));

  const json metrics = read_json(dir / "a/metrics.json");
  CHECK(metrics.at("converged") == true);
}

TEST_CASE("synthetic trace meets the symmetric preference") {
  const fs::path dir = oracle::temp_dir("trace");
  REQUIRE(run({"trace", "--synthetic", "--pref", "1,1", "--iters", "5000", "--w0", "3,0", "--out", dir.string()}) == 0);
  const json report = read_json(dir / "report.json");
  CHECK(report.at("max_residual").get<double>() <= 1e-3);
  const auto rows = read_rows(dir / "trajectory.csv");
  REQUIRE(rows.front().size() == 8);  // alpha columns include the KL weight
  CHECK(rows.front().back() == "alpha_2");
  bool kl_row = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i][1] == "kl-only") {
      kl_row = true;
      CHECK(rows[i][5].empty());
      CHECK(rows[i][7].empty());
    }
  }
  CHECK(kl_row);
}

TEST_CASE("usage and data errors map to exit codes") {
  CHECK(run({"trace", "--synthetic", "--pref", "1,0", "--out", ""}) == 2);
  CHECK(run({"trace", "--synthetic", "--pref", "1,2,3", "--out", ""}) == 2);
  CHECK(run({"trace", "--synthetic", "--out", ""}) == 2);
  CHECK(run({"train", "--synthetic", "--eta", "-1", "--out", ""}) == 2);
  CHECK(run({"train", "--notion", "parity"}) == 2);
  CHECK(run({"bogus"}) == 2);
  const ToyData t = toy_data();
  CHECK(run({"train", "--data", (t.dir / "missing.csv").string(), "--schema", t.schema.string(), "--out", ""}) == 3);
  CHECK(run({"train", "--data", t.train.string(), "--schema", (t.dir / "missing.json").string(), "--out", ""}) == 2);
}

TEST_CASE("environment variables sit between the config file and flags") {
  const fs::path dir = oracle::temp_dir("env");
  ::setenv("PFAIR_ETA", "0.3", 1);
  REQUIRE(run({"train", "--synthetic", "--iters", "5", "--out", (dir / "a").string()}) == 0);
  CHECK(read_json(dir / "a/config.json").at("eta") == 0.3);
  REQUIRE(run({"train", "--synthetic", "--iters", "5", "--eta", "0.2", "--out", (dir / "b").string()}) == 0);
  CHECK(read_json(dir / "b/config.json").at("eta") == 0.2);
  ::unsetenv("PFAIR_ETA");
}

TEST_CASE("train and eval on a toy dataset") {
  const ToyData t = toy_data();
  const fs::path out = t.dir / "run";
  REQUIRE(run({"train", "--data", t.train.string(), "--test", t.test.string(), "--schema", t.schema.string(),
               "--iters", "200", "--out", out.string()}) == 0);
  const json metrics = read_json(out / "metrics.json");
  REQUIRE(metrics.contains("train"));
  REQUIRE(metrics.contains("test"));

  // Eval on the training file reproduces the training metrics exactly.
  RunConfig c;
  c.model_path = (out / "model.json").string();
  c.data = t.train.string();
  c.out = "";
  const json ev = cmd_eval(c);
  CHECK(ev.at("accuracy").get<double>() == metrics.at("train").at("accuracy").get<double>());
  CHECK(ev.at("deo").get<double>() == metrics.at("train").at("deo").get<double>());

  // A constant-zero model predicts +1 everywhere.
  json model = read_json(out / "model.json");
  std::vector<double> zeros(model.at("weights").size(), 0.0);
  model["weights"] = zeros;
  oracle::write_file(t.dir / "zero.json", model.dump());
  c.model_path = (t.dir / "zero.json").string();
  const json zero = cmd_eval(c);
  double positives = 0;
  for (const auto& g : zero.at("groups")) positives += g.at("positives").get<double>();
  CHECK(zero.at("accuracy").get<double>() == doctest::Approx(positives / zero.at("size").get<double>()));

  // Wrong weight count.
  model["weights"] = std::vector<double>{1.0, 2.0};
  oracle::write_file(t.dir / "short.json", model.dump());
  CHECK(run({"eval", "--model-file", (t.dir / "short.json").string(), "--data", t.train.string(), "--out", ""}) == 2);
  CHECK(run({"eval", "--model-file", (out / "model.json").string(), "--data", t.test.string(), "--out",
             (t.dir / "ev").string()}) == 0);
  CHECK(fs::exists(t.dir / "ev/metrics.json"));
}

TEST_CASE("eval with a schema file keeps the trained feature layout") {
  const ToyData t = toy_data();
  const fs::path out = t.dir / "sensitive";
  REQUIRE(run({"train", "--data", t.train.string(), "--test", t.test.string(), "--schema", t.schema.string(),
               "--include-sensitive", "on", "--iters", "50", "--out", out.string()}) == 0);
  RunConfig c;
  c.model_path = (out / "model.json").string();
  c.data = t.train.string();
  c.schema = t.schema.string();
  c.out = "";
  const json ev = cmd_eval(c);
  CHECK(ev.at("accuracy").get<double>() == read_json(out / "metrics.json").at("train").at("accuracy").get<double>());
  c.include_sensitive = false;
  CHECK_THROWS_AS(cmd_eval(c), UsageError);
}

TEST_CASE("frontier sweeps") {
  const fs::path dir = oracle::temp_dir("frontier");
  SUBCASE("one preference equals that run's non-dominated trajectory") {
    REQUIRE(run({"frontier", "--synthetic", "--pref", "1,2", "--iters", "400", "--w0", "2.5,-1", "--out",
                 (dir / "one").string()}) == 0);
    RunConfig c;
    c.synthetic = true;
    c.preferences = {{1.0, 2.0}};
    c.optimizer.iterations = 400;
    c.w0 = std::vector<double>{2.5, -1.0};
    c.out = "";
    const Workspace ws = prepare_workspace(c);
    const auto traced = cmd_trace(c, ws);
    const auto expected = merge_runs({traced.result.trajectory});
    const auto rows = read_rows(dir / "one/frontier_loss.csv");
    CHECK(rows.size() == expected.points.size() + 1);
    CHECK(fs::exists(dir / "one/run_00/trajectory.csv"));
    CHECK(read_json(dir / "one/status.json").at("complete") == true);

    // Re-filtering the exported frontier is a no-op.
    std::vector<Vector> pts;
    for (std::size_t i = 1; i < rows.size(); ++i) {
      Vector v(2);
      v << std::stod(rows[i][3]), std::stod(rows[i][4]);
      pts.push_back(v);
    }
    CHECK(non_dominated_filter(pts).size() == pts.size());
  }
  SUBCASE("preference order does not matter") {
    REQUIRE(run({"frontier", "--synthetic", "--pref", "1,3", "--pref", "2,1", "--iters", "300", "--out",
                 (dir / "p").string()}) == 0);
    REQUIRE(run({"frontier", "--synthetic", "--pref", "2,1", "--pref", "1,3", "--iters", "300", "--out",
                 (dir / "q").string()}) == 0);
    CHECK(oracle::read_file(dir / "p/frontier_loss.csv") == oracle::read_file(dir / "q/frontier_loss.csv"));
  }
  SUBCASE("a failing run keeps partial results") {
    CHECK(run({"frontier", "--synthetic", "--pref", "1,1", "--pref", "1,1,1", "--iters", "50", "--out",
               (dir / "bad").string()}) == 2);
    const json status = read_json(dir / "bad/status.json");
    CHECK(status.at("complete") == false);
    CHECK(status.at("runs_completed") == 1);
    CHECK(fs::exists(dir / "bad/frontier_loss.csv"));
  }
}

TEST_CASE("toy frontier writes metric-space rows per split") {
  const ToyData t = toy_data();
  const fs::path out = t.dir / "front";
  REQUIRE(run({"frontier", "--data", t.train.string(), "--test", t.test.string(), "--schema", t.schema.string(),
               "--model", "logistic", "--pref", "1,10", "--pref", "1,100", "--iters", "200", "--out", out.string()}) == 0);
  const auto rows = read_rows(out / "frontier_metrics.csv");
  CHECK(rows.front() == std::vector<std::string>{"split", "run_id", "iteration", "error", "deo"});
  bool train = false, test = false;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    train |= rows[i][0] == "train";
    test |= rows[i][0] == "test";
  }
  CHECK(train);
  CHECK(test);
}

TEST_CASE("gradient check command") {
  const ToyData t = toy_data();
  RunConfig c;
  c.data = t.train.string();
  c.schema = t.schema.string();
  c.notion = FairnessNotion::EOD;
  c.preferences = {{1.0, 2.0, 3.0}};
  const Workspace ws = prepare_workspace(c);
  const json report = cmd_check_grads(c, ws);
  CHECK(report.at("pass") == true);
  CHECK(report.at("objectives").size() == 4);
  CHECK(run({"check-grads", "--synthetic", "--out", ""}) == 0);
}

TEST_CASE("preference residuals") {
  Vector h(3), pi(3);
  h << 1.0, 2.0, 4.0;
  pi << 4.0, 2.0, 1.0;
  for (double r : preference_residuals(h, pi)) CHECK(r == 0.0);
  pi << 1.0, 1.0, 1.0;
  const auto r = preference_residuals(h, pi);
  CHECK(r == std::vector<double>{1.0, 3.0, 2.0});
}
