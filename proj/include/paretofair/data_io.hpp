#pragma once

#include "paretofair/dataset.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace pfair {

struct GroupSpec {
  std::string name;
  std::vector<std::string> values;  // raw values mapped to this group
};

/// Row filter applied before encoding; rows failing it are skipped, not errors.
struct RowFilter {
  enum class Op { Between, Equal, NotEqual, In, NotIn };
  std::string column;
  Op op = Op::Equal;
  double min = 0.0;
  double max = 0.0;
  std::vector<std::string> values;
};

/// Column roles and value mappings for one CSV layout. Stored as JSON:
///
///   { "name": "adult-gender", "header": true,
///     "missing_tokens": ["?"],
///     "continuous": ["age", ...], "categorical": ["workclass", ...],
///     "label": {"column": "income", "positive": [">50K"], "negative": ["<=50K"]},
///     "sensitive": {"column": "sex", "groups": [{"name": "Female", "values": ["Female"]}, ...]},
///     "filters": [{"column": "x", "op": "between", "min": -30, "max": 30}],
///     "include_sensitive": false }
///
/// Headerless files list their "columns" explicitly.
struct DatasetSchema {
  std::string name;
  bool header = true;
  std::vector<std::string> columns;
  std::vector<std::string> missing_tokens;
  std::vector<std::string> continuous;
  std::vector<std::string> categorical;
  std::string label_column;
  std::vector<std::string> positive_values;
  std::vector<std::string> negative_values;
  std::string sensitive_column;
  std::vector<GroupSpec> groups;
  std::vector<RowFilter> filters;
  bool include_sensitive = false;

  void validate() const;
  nlohmann::json to_json() const;
  static DatasetSchema from_json(const nlohmann::json& j);
  static DatasetSchema load(const std::filesystem::path& path);
  /// FNV-1a over the canonical JSON dump, as 16 hex digits.
  std::string hash() const;
};

/// Fitted feature encoding: z-scoring for continuous columns, one-hot blocks
/// (first-appearance category order) for categorical ones, then an intercept.
struct FeatureEncoder {
  struct Column {
    std::string name;
    bool categorical = false;
    double mean = 0.0;
    double stddev = 1.0;
    std::vector<std::string> categories;
  };
  std::vector<Column> columns;

  std::size_t width() const;  // encoded width including the intercept
  std::vector<std::string> feature_names() const;
  nlohmann::json to_json() const;
  static FeatureEncoder from_json(const nlohmann::json& j);
};

struct LoadedDataset {
  GroupedDataset data;
  FeatureEncoder encoder;
};

/// Reads a training CSV, drops rows with missing values in used columns,
/// applies filters, fits the encoder and encodes.
LoadedDataset load_csv(const std::filesystem::path& path, const DatasetSchema& schema);

/// Encodes a held-out CSV with an already fitted encoder. Unseen categories
/// become an all-zero block and are reported on stderr.
GroupedDataset apply_schema_to_test(const std::filesystem::path& path, const DatasetSchema& schema,
                                    const FeatureEncoder& encoder);

/// Stratified by (label, group) split, deterministic in `seed`.
std::pair<GroupedDataset, GroupedDataset> split(const GroupedDataset& data, double test_fraction,
                                                std::uint64_t seed);

/// Raw parsed CSV, exposed for tooling and tests.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
  std::vector<std::size_t> line_numbers;  // 1-based source line of each row
};
CsvTable read_csv(const std::filesystem::path& path, bool has_header);

}  // namespace pfair
