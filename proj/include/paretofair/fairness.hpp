#pragma once

#include "paretofair/dataset.hpp"
#include "paretofair/objective.hpp"

#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace pfair {

enum class LossKind { Logistic, SmoothHinge };
const char* to_string(LossKind kind);
LossKind loss_kind_from_string(const std::string& s);  // "logistic" | "svm" | "smooth-hinge"

struct LinearModelSpec {
  LossKind kind = LossKind::SmoothHinge;
  double smoothing = 0.5;   // width of the quadratic zone below margin 1
  bool fit_intercept = true;
  double l2 = 1e-4;         // ridge on every weight except the intercept

  void validate() const;
};

/// eo: equal loss on positives; eod: on positives and on negatives;
/// dm: on all samples of each group. None is the plain risk (m = 1).
enum class FairnessNotion { None, EO, EOD, DM };
const char* to_string(FairnessNotion notion);
FairnessNotion notion_from_string(const std::string& s);

/// phi applied to each pairwise loss gap.
enum class Penalty { Squared, Abs };
const char* to_string(Penalty penalty);
Penalty penalty_from_string(const std::string& s);

struct GroupPartition {
  std::vector<std::vector<std::size_t>> groups;     // S_k
  std::vector<std::vector<std::size_t>> positives;  // S_k+
  std::vector<std::vector<std::size_t>> negatives;  // S_k-
};

/// Row indices per group, in ascending order.
GroupPartition partition_groups(const GroupedDataset& data);

/// Throws ConfigError naming the group and sign of the first empty subset the
/// notion needs.
void require_subsets(const GroupPartition& partition, FairnessNotion notion,
                     const std::vector<std::string>& group_names);

/// Per-sample loss l(z) and dl/dz of the margin z = y w.x.
std::pair<double, double> margin_loss(const LinearModelSpec& spec, double z);

/// Mean loss over `subset` plus (l2/2)|w|^2 and its gradient.
std::pair<double, Vector> model_loss_grad(const LinearModelSpec& spec, const ParameterVector& w,
                                          const GroupedDataset& data,
                                          const std::vector<std::size_t>& subset);

/// Objective 0 is the total regularized risk; then one phi(L_i - L_j) per
/// group pair i < j (per subset kind for eod: all positive pairs, then all
/// negative pairs).
BundlePtr build_objectives(FairnessNotion notion, const LinearModelSpec& spec,
                           std::shared_ptr<const GroupedDataset> data,
                           Penalty penalty = Penalty::Squared);

/// Number of objectives build_objectives produces for c groups.
std::size_t objective_count(FairnessNotion notion, std::size_t groups);

struct GroupMetrics {
  std::string name;
  std::size_t support = 0;
  std::size_t positives = 0;
  std::size_t negatives = 0;
  double accuracy = 0.0;
  std::optional<double> tpr;  // undefined without positives
  std::optional<double> fpr;  // undefined without negatives
};

struct FairnessMetrics {
  std::vector<GroupMetrics> groups;
  std::size_t size = 0;
  double accuracy = 0.0;
  /// Max pairwise |TPR_i - TPR_j| over groups with a defined TPR.
  double deo = 0.0;
};

/// Predictions sign(w.x) with sign(0) = +1.
FairnessMetrics evaluate_metrics(const ParameterVector& w, const GroupedDataset& data);

}  // namespace pfair
