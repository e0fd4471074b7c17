#include "paretofair/fairness.hpp"

#include "paretofair/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pfair {

const char* to_string(LossKind kind) {
  return kind == LossKind::Logistic ? "logistic" : "svm";
}

LossKind loss_kind_from_string(const std::string& s) {
  if (s == "logistic") return LossKind::Logistic;
  if (s == "svm" || s == "smooth-hinge") return LossKind::SmoothHinge;
  throw UsageError("unknown model '" + s + "' (expected logistic or svm)");
}

void LinearModelSpec::validate() const {
  if (kind == LossKind::SmoothHinge && !(smoothing > 0.0)) {
    throw UsageError("smooth-hinge smoothing must be positive");
  }
  if (!(l2 >= 0.0) || !std::isfinite(l2)) throw UsageError("l2 must be a nonnegative finite number");
}

const char* to_string(FairnessNotion notion) {
  switch (notion) {
    case FairnessNotion::None:
      return "none";
    case FairnessNotion::EO:
      return "eo";
    case FairnessNotion::EOD:
      return "eod";
    case FairnessNotion::DM:
      return "dm";
  }
  return "none";
}

FairnessNotion notion_from_string(const std::string& s) {
  if (s == "none") return FairnessNotion::None;
  if (s == "eo") return FairnessNotion::EO;
  if (s == "eod") return FairnessNotion::EOD;
  if (s == "dm") return FairnessNotion::DM;
  throw UsageError("unknown fairness notion '" + s + "' (expected eo, eod, dm or none)");
}

const char* to_string(Penalty penalty) { return penalty == Penalty::Squared ? "squared" : "abs"; }

Penalty penalty_from_string(const std::string& s) {
  if (s == "squared") return Penalty::Squared;
  if (s == "abs") return Penalty::Abs;
  throw UsageError("unknown penalty '" + s + "' (expected squared or abs)");
}

GroupPartition partition_groups(const GroupedDataset& data) {
  GroupPartition p;
  const std::size_t c = data.group_count();
  p.groups.resize(c);
  p.positives.resize(c);
  p.negatives.resize(c);
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto g = static_cast<std::size_t>(data.groups[i]);
    if (g >= c) throw DataError("group id of row " + std::to_string(i) + " is out of range");
    p.groups[g].push_back(i);
    (data.labels[static_cast<Eigen::Index>(i)] > 0 ? p.positives[g] : p.negatives[g]).push_back(i);
  }
  return p;
}

void require_subsets(const GroupPartition& partition, FairnessNotion notion,
                     const std::vector<std::string>& group_names) {
  auto name = [&](std::size_t k) { return k < group_names.size() ? group_names[k] : std::to_string(k); };
  for (std::size_t k = 0; k < partition.groups.size(); ++k) {
    if (notion == FairnessNotion::DM && partition.groups[k].empty()) {
      throw ConfigError("group '" + name(k) + "' has no samples, required by dm");
    }
    if ((notion == FairnessNotion::EO || notion == FairnessNotion::EOD) && partition.positives[k].empty()) {
      throw ConfigError("group '" + name(k) + "' has no positive samples, required by " +
                        std::string(to_string(notion)));
    }
    if (notion == FairnessNotion::EOD && partition.negatives[k].empty()) {
      throw ConfigError("group '" + name(k) + "' has no negative samples, required by eod");
    }
  }
}

std::pair<double, double> margin_loss(const LinearModelSpec& spec, double z) {
  if (spec.kind == LossKind::Logistic) {
    // log(1 + exp(-z)) and -1 / (1 + exp(z)), both overflow-safe.
    const double value = z > 0 ? std::log1p(std::exp(-z)) : -z + std::log1p(std::exp(z));
    const double deriv = z > 0 ? -std::exp(-z) / (1.0 + std::exp(-z)) : -1.0 / (1.0 + std::exp(z));
    return {value, deriv};
  }
  const double delta = spec.smoothing;
  if (z >= 1.0) return {0.0, 0.0};
  if (z > 1.0 - delta) return {(1.0 - z) * (1.0 - z) / (2.0 * delta), -(1.0 - z) / delta};
  return {1.0 - z - delta / 2.0, -1.0};
}

namespace {

// Weight vector as seen by the model: the intercept coordinate is ignored when
// the model does not fit one.
Vector effective_weights(const LinearModelSpec& spec, const GroupedDataset& data, const Vector& w) {
  Vector eff = w;
  if (data.has_intercept && !spec.fit_intercept) eff[eff.size() - 1] = 0.0;
  return eff;
}

void add_ridge(const LinearModelSpec& spec, const GroupedDataset& data, const Vector& w_eff, double& value,
               Vector& grad) {
  if (spec.l2 == 0.0) return;
  const Eigen::Index k = data.has_intercept ? w_eff.size() - 1 : w_eff.size();
  value += 0.5 * spec.l2 * w_eff.head(k).squaredNorm();
  grad.head(k) += spec.l2 * w_eff.head(k);
}

void mask_intercept(const LinearModelSpec& spec, const GroupedDataset& data, Vector& grad) {
  if (data.has_intercept && !spec.fit_intercept) grad[grad.size() - 1] = 0.0;
}

}  // namespace

std::pair<double, Vector> model_loss_grad(const LinearModelSpec& spec, const ParameterVector& w,
                                          const GroupedDataset& data,
                                          const std::vector<std::size_t>& subset) {
  if (subset.empty()) throw UsageError("loss over an empty subset");
  if (static_cast<std::size_t>(w.size()) != data.dim()) {
    throw UsageError("weight length " + std::to_string(w.size()) + " does not match feature width " +
                     std::to_string(data.dim()));
  }
  const Vector w_eff = effective_weights(spec, data, w);
  double value = 0.0;
  Vector grad = Vector::Zero(w.size());
  for (std::size_t i : subset) {
    const auto r = static_cast<Eigen::Index>(i);
    const double y = data.labels[r];
    const auto [l, dl] = margin_loss(spec, y * data.features.row(r).dot(w_eff));
    value += l;
    grad.noalias() += (dl * y) * data.features.row(r).transpose();
  }
  const double inv = 1.0 / static_cast<double>(subset.size());
  value *= inv;
  grad *= inv;
  mask_intercept(spec, data, grad);
  add_ridge(spec, data, w_eff, value, grad);
  return {value, grad};
}

std::size_t objective_count(FairnessNotion notion, std::size_t groups) {
  const std::size_t pairs = groups * (groups - 1) / 2;
  switch (notion) {
    case FairnessNotion::None:
      return 1;
    case FairnessNotion::EO:
    case FairnessNotion::DM:
      return 1 + pairs;
    case FairnessNotion::EOD:
      return 1 + 2 * pairs;
  }
  return 1;
}

namespace {

class FairnessBundle final : public ObjectiveBundle {
 public:
  FairnessBundle(FairnessNotion notion, LinearModelSpec spec, std::shared_ptr<const GroupedDataset> data,
                 Penalty penalty)
      : spec_(spec), data_(std::move(data)), penalty_(penalty) {
    const GroupPartition partition = partition_groups(*data_);
    require_subsets(partition, notion, data_->group_names);
    const std::size_t c = data_->group_count();

    // Subset 0 is the whole sample; pairwise objectives refer to later subsets.
    std::vector<std::size_t> all(data_->size());
    for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
    subsets_.push_back(std::move(all));
    names_.emplace_back("loss");

    auto add_pairs = [&](const std::vector<std::vector<std::size_t>>& parts, const std::string& tag) {
      const std::size_t base = subsets_.size();
      for (const auto& s : parts) subsets_.push_back(s);
      for (std::size_t i = 0; i < c; ++i) {
        for (std::size_t j = i + 1; j < c; ++j) {
          pairs_.emplace_back(base + i, base + j);
          names_.push_back(tag + "[" + data_->group_names[i] + "," + data_->group_names[j] + "]");
        }
      }
    };
    switch (notion) {
      case FairnessNotion::None:
        break;
      case FairnessNotion::EO:
        add_pairs(partition.positives, "eo");
        break;
      case FairnessNotion::EOD:
        add_pairs(partition.positives, "eod+");
        add_pairs(partition.negatives, "eod-");
        break;
      case FairnessNotion::DM:
        add_pairs(partition.groups, "dm");
        break;
    }

    // Row-to-subset weights 1/|S| so that subset means are a single product.
    const auto n = static_cast<Eigen::Index>(data_->size());
    weights_ = Matrix::Zero(n, static_cast<Eigen::Index>(subsets_.size()));
    for (std::size_t s = 0; s < subsets_.size(); ++s) {
      const double inv = 1.0 / static_cast<double>(subsets_[s].size());
      for (std::size_t i : subsets_[s]) weights_(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(s)) = inv;
    }
  }

  std::size_t size() const override { return 1 + pairs_.size(); }
  std::size_t dim() const override { return data_->dim(); }
  std::string name(std::size_t i) const override { return names_.at(i); }

  Vector values(const Vector& w) const override {
    const Vector w_eff = effective_weights(spec_, *data_, w);
    Vector losses;
    Vector dl;
    sample_losses(w_eff, losses, dl);
    const Vector subset_loss = weights_.transpose() * losses;
    Vector out(static_cast<Eigen::Index>(size()));
    double total = subset_loss[0];
    Vector unused = Vector::Zero(w.size());
    add_ridge(spec_, *data_, w_eff, total, unused);
    out[0] = total;
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const double gap = subset_loss[static_cast<Eigen::Index>(pairs_[k].first)] -
                         subset_loss[static_cast<Eigen::Index>(pairs_[k].second)];
      out[static_cast<Eigen::Index>(k + 1)] = penalty_value(gap);
    }
    return out;
  }

  Matrix jacobian(const Vector& w) const override { return values_and_jacobian(w).second; }

  std::pair<Vector, Matrix> values_and_jacobian(const Vector& w) const override {
    const Vector w_eff = effective_weights(spec_, *data_, w);
    Vector losses;
    Vector dl;
    sample_losses(w_eff, losses, dl);
    const Vector subset_loss = weights_.transpose() * losses;
    // d L_S / dw = X^T (weights_S .* dl .* y)
    const Matrix coeff = weights_.array().colwise() * (dl.array() * data_->labels.array());
    const Matrix subset_grad = data_->features.transpose() * coeff;

    Vector values(static_cast<Eigen::Index>(size()));
    Matrix jac(w.size(), static_cast<Eigen::Index>(size()));
    double total = subset_loss[0];
    Vector g0 = subset_grad.col(0);
    mask_intercept(spec_, *data_, g0);
    add_ridge(spec_, *data_, w_eff, total, g0);
    values[0] = total;
    jac.col(0) = g0;
    for (std::size_t k = 0; k < pairs_.size(); ++k) {
      const auto a = static_cast<Eigen::Index>(pairs_[k].first);
      const auto b = static_cast<Eigen::Index>(pairs_[k].second);
      const double gap = subset_loss[a] - subset_loss[b];
      const auto col = static_cast<Eigen::Index>(k + 1);
      values[col] = penalty_value(gap);
      Vector g = penalty_slope(gap) * (subset_grad.col(a) - subset_grad.col(b));
      mask_intercept(spec_, *data_, g);
      jac.col(col) = g;
    }
    return {values, jac};
  }

 private:
  void sample_losses(const Vector& w_eff, Vector& losses, Vector& dl) const {
    const Vector margins = (data_->features * w_eff).cwiseProduct(data_->labels);
    losses.resize(margins.size());
    dl.resize(margins.size());
    for (Eigen::Index i = 0; i < margins.size(); ++i) {
      const auto [l, d] = margin_loss(spec_, margins[i]);
      losses[i] = l;
      dl[i] = d;
    }
  }

  double penalty_value(double gap) const { return penalty_ == Penalty::Squared ? 0.5 * gap * gap : std::abs(gap); }
  double penalty_slope(double gap) const {
    if (penalty_ == Penalty::Squared) return gap;
    return gap > 0 ? 1.0 : (gap < 0 ? -1.0 : 0.0);
  }

  LinearModelSpec spec_;
  std::shared_ptr<const GroupedDataset> data_;
  Penalty penalty_;
  std::vector<std::vector<std::size_t>> subsets_;
  std::vector<std::pair<std::size_t, std::size_t>> pairs_;
  std::vector<std::string> names_;
  Matrix weights_;  // n x (number of subsets)
};

}  // namespace

BundlePtr build_objectives(FairnessNotion notion, const LinearModelSpec& spec,
                           std::shared_ptr<const GroupedDataset> data, Penalty penalty) {
  if (!data) throw UsageError("build_objectives needs a dataset");
  spec.validate();
  data->validate();
  return std::make_shared<FairnessBundle>(notion, spec, std::move(data), penalty);
}

FairnessMetrics evaluate_metrics(const ParameterVector& w, const GroupedDataset& data) {
  if (data.size() == 0) throw DataError("cannot evaluate metrics on an empty dataset");
  if (static_cast<std::size_t>(w.size()) != data.dim()) {
    throw UsageError("model has " + std::to_string(w.size()) + " weights but the data has " +
                     std::to_string(data.dim()) + " features");
  }
  const Vector scores = data.features * w;
  const std::size_t c = data.group_count();
  std::vector<std::size_t> support(c, 0), correct(c, 0), pos(c, 0), neg(c, 0), tp(c, 0), fp(c, 0);
  std::size_t total_correct = 0;
  for (std::size_t i = 0; i < data.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    const auto g = static_cast<std::size_t>(data.groups[i]);
    const bool predicted_positive = scores[r] >= 0.0;
    const bool positive = data.labels[r] > 0;
    ++support[g];
    if (predicted_positive == positive) {
      ++correct[g];
      ++total_correct;
    }
    if (positive) {
      ++pos[g];
      if (predicted_positive) ++tp[g];
    } else {
      ++neg[g];
      if (predicted_positive) ++fp[g];
    }
  }

  FairnessMetrics m;
  m.size = data.size();
  m.accuracy = static_cast<double>(total_correct) / static_cast<double>(data.size());
  for (std::size_t g = 0; g < c; ++g) {
    GroupMetrics gm;
    gm.name = data.group_names[g];
    gm.support = support[g];
    gm.positives = pos[g];
    gm.negatives = neg[g];
    gm.accuracy = support[g] ? static_cast<double>(correct[g]) / static_cast<double>(support[g]) : 0.0;
    if (pos[g]) gm.tpr = static_cast<double>(tp[g]) / static_cast<double>(pos[g]);
    if (neg[g]) gm.fpr = static_cast<double>(fp[g]) / static_cast<double>(neg[g]);
    m.groups.push_back(std::move(gm));
  }
  for (std::size_t i = 0; i < c; ++i) {
    for (std::size_t j = i + 1; j < c; ++j) {
      if (m.groups[i].tpr && m.groups[j].tpr) {
        m.deo = std::max(m.deo, std::abs(*m.groups[i].tpr - *m.groups[j].tpr));
      }
    }
  }
  return m;
}

}  // namespace pfair
