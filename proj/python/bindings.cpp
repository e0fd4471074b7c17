#include "paretofair/data_io.hpp"
#include "paretofair/errors.hpp"
#include "paretofair/fairness.hpp"
#include "paretofair/frontier.hpp"
#include "paretofair/pbpdo.hpp"
#include "paretofair/pdo.hpp"
#include "paretofair/simplex.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

namespace py = pybind11;
using namespace pfair;

namespace {

py::dict trajectory_dict(const RunResult& r) {
  const auto n = static_cast<Eigen::Index>(r.trajectory.size());
  const Eigen::Index m = n ? r.trajectory.front().objective_values.size() : 0;
  Matrix values(n, m);
  std::vector<int> iterations;
  std::vector<std::string> modes;
  std::vector<double> norms;
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = r.trajectory[static_cast<std::size_t>(i)];
    values.row(i) = p.objective_values.transpose();
    iterations.push_back(p.iteration);
    modes.emplace_back(to_string(p.mode));
    norms.push_back(p.direction_norm);
  }
  py::dict d;
  d["w"] = r.w;
  d["iterations_run"] = r.iterations_run;
  d["converged"] = r.converged;
  d["values"] = values;
  d["iterations"] = iterations;
  d["modes"] = modes;
  d["direction_norms"] = norms;
  return d;
}

template <class Config>
void apply_options(Config& c, double eta, int iterations, int inner_steps, bool normalize, bool backtracking,
                   int record_every) {
  c.eta = eta;
  c.iterations = iterations;
  c.inner_steps = inner_steps;
  c.normalize_gradients = normalize;
  c.backtracking = backtracking;
  c.record_every = record_every;
}

std::vector<Vector> rows_of(const Matrix& points) {
  std::vector<Vector> out;
  for (Eigen::Index i = 0; i < points.rows(); ++i) out.emplace_back(points.row(i).transpose());
  return out;
}

py::dict metrics_dict(const FairnessMetrics& m) {
  py::list groups;
  for (const auto& g : m.groups) {
    py::dict gd;
    gd["name"] = g.name;
    gd["support"] = g.support;
    gd["positives"] = g.positives;
    gd["negatives"] = g.negatives;
    gd["accuracy"] = g.accuracy;
    gd["tpr"] = g.tpr ? py::cast(*g.tpr) : py::none();
    gd["fpr"] = g.fpr ? py::cast(*g.fpr) : py::none();
    groups.append(gd);
  }
  py::dict d;
  d["size"] = m.size;
  d["accuracy"] = m.accuracy;
  d["deo"] = m.deo;
  d["groups"] = groups;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Pareto descent optimization for fairness-aware classification";
  mod.attr("__version__") = PARETOFAIR_VERSION;

  auto base = py::register_exception<Error>(mod, "Error", PyExc_RuntimeError);
  py::register_exception<UsageError>(mod, "UsageError", base.ptr());
  py::register_exception<ConfigError>(mod, "ConfigError", base.ptr());
  py::register_exception<DataError>(mod, "DataError", base.ptr());
  py::register_exception<NumericError>(mod, "NumericError", base.ptr());

  py::class_<ObjectiveBundle, std::shared_ptr<ObjectiveBundle>>(mod, "Bundle")
      .def_property_readonly("size", &ObjectiveBundle::size)
      .def_property_readonly("dim", &ObjectiveBundle::dim)
      .def("names", [](const ObjectiveBundle& b) {
        std::vector<std::string> out;
        for (std::size_t i = 0; i < b.size(); ++i) out.push_back(b.name(i));
        return out;
      })
      .def("evaluate", [](const ObjectiveBundle& b, const Vector& w) { return evaluate(b, w); }, py::arg("w"))
      .def(
          "gradients",
          [](const ObjectiveBundle& b, const Vector& w, bool normalize) {
            return gradient_matrix(b, w, normalize).columns;
          },
          py::arg("w"), py::arg("normalize") = false, "d x m matrix whose columns are the objective gradients");

  mod.def(
      "gaussian_pair",
      [](const Vector& nu, double s) {
        return std::const_pointer_cast<ObjectiveBundle>(make_gaussian_pair({nu, s}));
      },
      py::arg("nu"), py::arg("s") = 1.5);

  mod.def("project_simplex", [](const Vector& v) { return project_simplex(v).values(); }, py::arg("v"));
  mod.def(
      "solve_inner",
      [](const Matrix& G, int steps) {
        const auto r = solve_inner(GradientMatrix{G, false}, SimplexWeights::uniform(static_cast<std::size_t>(G.cols())),
                                   default_inner_step(G.transpose() * G), steps);
        return py::make_tuple(r.weights.values(), r.phi_value);
      },
      py::arg("G"), py::arg("steps") = 2000, "min-norm simplex weights of the columns of G and the attained Phi");

  mod.def(
      "run_pdo",
      [](const ObjectiveBundle& b, const Vector& w0, double eta, int iterations, int inner_steps, bool normalize,
         bool backtracking, int record_every) {
        PdoConfig c;
        apply_options(c, eta, iterations, inner_steps, normalize, backtracking, record_every);
        return trajectory_dict(run_pdo(b, w0, c));
      },
      py::arg("bundle"), py::arg("w0"), py::arg("eta") = 0.1, py::arg("iterations") = 1000,
      py::arg("inner_steps") = 100, py::arg("normalize") = true, py::arg("backtracking") = false,
      py::arg("record_every") = 1);

  mod.def(
      "run_pbpdo",
      [](const ObjectiveBundle& b, const Vector& pi, const Vector& w0, double eta, int iterations, int inner_steps,
         bool normalize, bool backtracking, int record_every, double eps1, double eps2) {
        PbpdoConfig c;
        apply_options(c, eta, iterations, inner_steps, normalize, backtracking, record_every);
        c.eps1 = eps1;
        c.eps2 = eps2;
        return trajectory_dict(run_pbpdo(b, PreferenceVector(pi), w0, c));
      },
      py::arg("bundle"), py::arg("preference"), py::arg("w0"), py::arg("eta") = 0.1, py::arg("iterations") = 1000,
      py::arg("inner_steps") = 100, py::arg("normalize") = true, py::arg("backtracking") = false,
      py::arg("record_every") = 1, py::arg("eps1") = 1e-2, py::arg("eps2") = 1e-2);

  mod.def(
      "kl_objective", [](const Vector& h, const Vector& pi) { return kl_objective(h, PreferenceVector(pi)); },
      py::arg("values"), py::arg("preference"));
  mod.def(
      "softmax_scores", [](const Vector& h, const Vector& pi) { return softmax_scores(h, PreferenceVector(pi)); },
      py::arg("values"), py::arg("preference"));

  mod.def("dominates", [](const Vector& a, const Vector& b) { return dominates(a, b); }, py::arg("a"), py::arg("b"));
  mod.def(
      "non_dominated", [](const Matrix& points) { return non_dominated_filter(rows_of(points)); }, py::arg("points"),
      "indices of the rows of an n x m array that no other row dominates");

  py::class_<GroupedDataset, std::shared_ptr<GroupedDataset>>(mod, "Dataset")
      .def_readonly("features", &GroupedDataset::features)
      .def_readonly("labels", &GroupedDataset::labels)
      .def_readonly("groups", &GroupedDataset::groups)
      .def_readonly("group_names", &GroupedDataset::group_names)
      .def_readonly("feature_names", &GroupedDataset::feature_names)
      .def("__len__", &GroupedDataset::size);

  mod.def(
      "load_dataset",
      [](const std::string& csv, const std::string& schema, std::optional<std::string> test) -> py::tuple {
        const DatasetSchema s = DatasetSchema::load(schema);
        LoadedDataset ld = load_csv(csv, s);
        auto train = std::make_shared<GroupedDataset>(std::move(ld.data));
        if (!test) return py::make_tuple(train, py::none());
        auto held = std::make_shared<GroupedDataset>(apply_schema_to_test(*test, s, ld.encoder));
        return py::make_tuple(train, held);
      },
      py::arg("csv"), py::arg("schema"), py::arg("test") = py::none(),
      "loads (train, test) datasets; test is None when no test file is given");

  mod.def(
      "fairness_bundle",
      [](std::shared_ptr<GroupedDataset> data, const std::string& notion, const std::string& model, double l2,
         const std::string& penalty) {
        LinearModelSpec spec;
        spec.kind = loss_kind_from_string(model);
        spec.l2 = l2;
        return std::const_pointer_cast<ObjectiveBundle>(
            build_objectives(notion_from_string(notion), spec, data, penalty_from_string(penalty)));
      },
      py::arg("data"), py::arg("notion") = "eo", py::arg("model") = "svm", py::arg("l2") = 1e-4,
      py::arg("penalty") = "squared");

  mod.def(
      "evaluate_metrics", [](const Vector& w, const GroupedDataset& d) { return metrics_dict(evaluate_metrics(w, d)); },
      py::arg("w"), py::arg("data"));
}
