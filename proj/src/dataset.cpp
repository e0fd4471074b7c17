#include "paretofair/dataset.hpp"

#include "paretofair/errors.hpp"

namespace pfair {

void GroupedDataset::validate() const {
  const auto n = features.rows();
  if (n == 0) throw DataError("dataset is empty");
  if (labels.size() != n || static_cast<Eigen::Index>(groups.size()) != n) {
    throw DataError("dataset features, labels and groups disagree on the number of rows");
  }
  if (!feature_names.empty() && static_cast<Eigen::Index>(feature_names.size()) != features.cols()) {
    throw DataError("feature names do not match the feature matrix width");
  }
  if (!features.allFinite()) throw DataError("dataset features contain non-finite values");
  std::vector<std::size_t> seen(group_names.size(), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (labels[i] != 1.0 && labels[i] != -1.0) {
      throw DataError("label of row " + std::to_string(i) + " is not +1 or -1");
    }
    const int g = groups[static_cast<std::size_t>(i)];
    if (g < 0 || static_cast<std::size_t>(g) >= group_names.size()) {
      throw DataError("group id of row " + std::to_string(i) + " is out of range");
    }
    ++seen[static_cast<std::size_t>(g)];
  }
  for (std::size_t k = 0; k < seen.size(); ++k) {
    if (seen[k] == 0) throw DataError("group '" + group_names[k] + "' has no rows");
  }
}

GroupedDataset subset_rows(const GroupedDataset& data, const std::vector<std::size_t>& rows) {
  GroupedDataset out;
  out.features.resize(static_cast<Eigen::Index>(rows.size()), data.features.cols());
  out.labels.resize(static_cast<Eigen::Index>(rows.size()));
  out.groups.reserve(rows.size());
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto r = static_cast<Eigen::Index>(rows[k]);
    out.features.row(static_cast<Eigen::Index>(k)) = data.features.row(r);
    out.labels[static_cast<Eigen::Index>(k)] = data.labels[r];
    out.groups.push_back(data.groups[rows[k]]);
  }
  out.group_names = data.group_names;
  out.feature_names = data.feature_names;
  out.has_intercept = data.has_intercept;
  out.provenance = data.provenance;
  return out;
}

}  // namespace pfair
