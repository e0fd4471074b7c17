#pragma once

#include "paretofair/objective.hpp"

#include <string>
#include <vector>

namespace pfair {

struct Provenance {
  std::string source;
  std::string schema_hash;
  std::size_t rows_read = 0;
  std::size_t rows_dropped_missing = 0;
  std::size_t rows_filtered = 0;
};

/// Encoded binary-classification data with a sensitive attribute.
struct GroupedDataset {
  Matrix features;                     // n x d, intercept column last when has_intercept
  Vector labels;                       // +1 / -1
  std::vector<int> groups;             // group index in [0, c)
  std::vector<std::string> group_names;
  std::vector<std::string> feature_names;
  bool has_intercept = true;
  Provenance provenance;

  std::size_t size() const { return static_cast<std::size_t>(features.rows()); }
  std::size_t dim() const { return static_cast<std::size_t>(features.cols()); }
  std::size_t group_count() const { return group_names.size(); }

  /// Throws DataError when shapes disagree, labels are not +-1, a group id is
  /// out of range or unused, or a feature is non-finite.
  void validate() const;
};

/// Rows `rows` of `data`, in the given order.
GroupedDataset subset_rows(const GroupedDataset& data, const std::vector<std::size_t>& rows);

}  // namespace pfair
