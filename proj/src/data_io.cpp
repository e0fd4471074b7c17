#include "paretofair/data_io.hpp"

#include "paretofair/errors.hpp"

#include <boost/algorithm/string/trim.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <unordered_map>

namespace pfair {

using nlohmann::json;

// ---------------------------------------------------------------------------
// CSV

namespace {

/// Splits one CSV record. Quoted fields may contain commas and doubled quotes.
std::vector<std::string> split_record(const std::string& line, const std::filesystem::path& path,
                                      std::size_t line_no) {
  std::vector<std::string> fields;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c != '"') {
        field += c;
      } else if (i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else {
        quoted = false;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(boost::algorithm::trim_copy(field));
      field.clear();
    } else {
      field += c;
    }
  }
  if (quoted) throw DataError("malformed CSV at " + path.string() + ":" + std::to_string(line_no) + ": unterminated quote");
  fields.push_back(boost::algorithm::trim_copy(field));
  return fields;
}

}  // namespace

CsvTable read_csv(const std::filesystem::path& path, bool has_header) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open data file '" + path.string() + "'");

  CsvTable table;
  std::string line;
  std::size_t line_no = 0;
  bool header_pending = has_header;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (boost::algorithm::trim_copy(line).empty()) continue;
    std::vector<std::string> fields = split_record(line, path, line_no);
    if (header_pending) {
      table.header = std::move(fields);
      header_pending = false;
      continue;
    }
    table.rows.push_back(std::move(fields));
    table.line_numbers.push_back(line_no);
  }
  if (header_pending) throw DataError("data file '" + path.string() + "' has no header row");
  return table;
}

// ---------------------------------------------------------------------------
// Schema

namespace {

const std::map<std::string, RowFilter::Op> kFilterOps = {
    {"between", RowFilter::Op::Between}, {"equal", RowFilter::Op::Equal},
    {"not_equal", RowFilter::Op::NotEqual}, {"in", RowFilter::Op::In},
    {"not_in", RowFilter::Op::NotIn}};

std::string op_name(RowFilter::Op op) {
  for (const auto& [name, value] : kFilterOps) {
    if (value == op) return name;
  }
  return "equal";
}

template <typename T>
T get_or(const json& j, const char* key, T fallback) {
  return j.contains(key) ? j.at(key).get<T>() : fallback;
}

}  // namespace

void DatasetSchema::validate() const {
  if (label_column.empty()) throw UsageError("schema '" + name + "' has no label column");
  if (sensitive_column.empty()) throw UsageError("schema '" + name + "' has no sensitive column");
  if (positive_values.empty() || negative_values.empty()) {
    throw UsageError("schema '" + name + "' must map at least one raw value to each label");
  }
  if (groups.size() < 2) throw UsageError("schema '" + name + "' needs at least two sensitive groups");
  if (!header && columns.empty()) {
    throw UsageError("schema '" + name + "' describes a headerless file but lists no columns");
  }
  for (const auto& c : continuous) {
    if (c == label_column || c == sensitive_column) {
      throw UsageError("column '" + c + "' cannot be both a feature and the label/sensitive column");
    }
  }
  for (const auto& c : categorical) {
    if (c == label_column || c == sensitive_column) {
      throw UsageError("column '" + c + "' cannot be both a feature and the label/sensitive column");
    }
  }
}

json DatasetSchema::to_json() const {
  json j;
  j["name"] = name;
  j["header"] = header;
  if (!columns.empty()) j["columns"] = columns;
  j["missing_tokens"] = missing_tokens;
  j["continuous"] = continuous;
  j["categorical"] = categorical;
  j["label"] = {{"column", label_column}, {"positive", positive_values}, {"negative", negative_values}};
  json groups_json = json::array();
  for (const auto& g : groups) groups_json.push_back({{"name", g.name}, {"values", g.values}});
  j["sensitive"] = {{"column", sensitive_column}, {"groups", groups_json}};
  json filters_json = json::array();
  for (const auto& f : filters) {
    json fj = {{"column", f.column}, {"op", op_name(f.op)}};
    if (f.op == RowFilter::Op::Between) {
      fj["min"] = f.min;
      fj["max"] = f.max;
    } else {
      fj["values"] = f.values;
    }
    filters_json.push_back(fj);
  }
  j["filters"] = filters_json;
  j["include_sensitive"] = include_sensitive;
  return j;
}

DatasetSchema DatasetSchema::from_json(const json& j) {
  DatasetSchema s;
  try {
    s.name = get_or<std::string>(j, "name", "dataset");
    s.header = get_or<bool>(j, "header", true);
    s.columns = get_or<std::vector<std::string>>(j, "columns", {});
    s.missing_tokens = get_or<std::vector<std::string>>(j, "missing_tokens", {});
    s.continuous = get_or<std::vector<std::string>>(j, "continuous", {});
    s.categorical = get_or<std::vector<std::string>>(j, "categorical", {});
    const auto& label = j.at("label");
    s.label_column = label.at("column").get<std::string>();
    s.positive_values = label.at("positive").get<std::vector<std::string>>();
    s.negative_values = label.at("negative").get<std::vector<std::string>>();
    const auto& sensitive = j.at("sensitive");
    s.sensitive_column = sensitive.at("column").get<std::string>();
    for (const auto& g : sensitive.at("groups")) {
      s.groups.push_back(GroupSpec{g.at("name").get<std::string>(), g.at("values").get<std::vector<std::string>>()});
    }
    if (j.contains("filters")) {
      for (const auto& fj : j.at("filters")) {
        RowFilter f;
        f.column = fj.at("column").get<std::string>();
        const auto op = fj.at("op").get<std::string>();
        const auto it = kFilterOps.find(op);
        if (it == kFilterOps.end()) throw UsageError("unknown filter op '" + op + "'");
        f.op = it->second;
        if (f.op == RowFilter::Op::Between) {
          f.min = fj.at("min").get<double>();
          f.max = fj.at("max").get<double>();
        } else {
          f.values = fj.at("values").get<std::vector<std::string>>();
        }
        s.filters.push_back(std::move(f));
      }
    }
    s.include_sensitive = get_or<bool>(j, "include_sensitive", false);
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid schema: ") + e.what());
  }
  s.validate();
  return s;
}

DatasetSchema DatasetSchema::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot open schema file '" + path.string() + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw UsageError("schema file '" + path.string() + "' is not valid JSON: " + e.what());
  }
  return from_json(j);
}

std::string DatasetSchema::hash() const {
  const std::string text = to_json().dump();
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << std::setw(16) << std::setfill('0') << h;
  return os.str();
}

// ---------------------------------------------------------------------------
// Encoder

std::size_t FeatureEncoder::width() const {
  std::size_t w = 1;
  for (const auto& c : columns) w += c.categorical ? c.categories.size() : 1;
  return w;
}

std::vector<std::string> FeatureEncoder::feature_names() const {
  std::vector<std::string> names;
  for (const auto& c : columns) {
    if (c.categorical) {
      for (const auto& cat : c.categories) names.push_back(c.name + "=" + cat);
    } else {
      names.push_back(c.name);
    }
  }
  names.emplace_back("intercept");
  return names;
}

json FeatureEncoder::to_json() const {
  json arr = json::array();
  for (const auto& c : columns) {
    if (c.categorical) {
      arr.push_back({{"name", c.name}, {"kind", "categorical"}, {"categories", c.categories}});
    } else {
      arr.push_back({{"name", c.name}, {"kind", "continuous"}, {"mean", c.mean}, {"stddev", c.stddev}});
    }
  }
  return json{{"columns", arr}};
}

FeatureEncoder FeatureEncoder::from_json(const json& j) {
  FeatureEncoder enc;
  try {
    for (const auto& cj : j.at("columns")) {
      Column c;
      c.name = cj.at("name").get<std::string>();
      c.categorical = cj.at("kind").get<std::string>() == "categorical";
      if (c.categorical) {
        c.categories = cj.at("categories").get<std::vector<std::string>>();
      } else {
        c.mean = cj.at("mean").get<double>();
        c.stddev = cj.at("stddev").get<double>();
      }
      enc.columns.push_back(std::move(c));
    }
  } catch (const json::exception& e) {
    throw UsageError(std::string("invalid encoder description: ") + e.what());
  }
  return enc;
}

// ---------------------------------------------------------------------------
// Loading

namespace {

struct ParsedRows {
  // One entry per kept row, values in encoder column order.
  std::vector<std::vector<std::string>> raw_features;
  std::vector<double> labels;
  std::vector<int> groups;
  Provenance provenance;
};

std::vector<std::string> feature_columns(const DatasetSchema& schema) {
  std::vector<std::string> cols = schema.continuous;
  cols.insert(cols.end(), schema.categorical.begin(), schema.categorical.end());
  if (schema.include_sensitive) cols.push_back(schema.sensitive_column);
  return cols;
}

bool is_categorical(const DatasetSchema& schema, const std::string& col) {
  return std::find(schema.categorical.begin(), schema.categorical.end(), col) != schema.categorical.end() ||
         (schema.include_sensitive && col == schema.sensitive_column);
}

bool parse_double(const std::string& s, double& out) {
  try {
    std::size_t pos = 0;
    out = std::stod(s, &pos);
    return pos == s.size() && std::isfinite(out);
  } catch (const std::exception&) {
    return false;
  }
}

ParsedRows parse_rows(const std::filesystem::path& path, const DatasetSchema& schema) {
  schema.validate();
  CsvTable table = read_csv(path, schema.header);
  const auto& names = schema.header ? table.header : schema.columns;

  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < names.size(); ++i) index.emplace(names[i], i);
  auto column = [&](const std::string& name) {
    const auto it = index.find(name);
    if (it == index.end()) {
      throw DataError("column '" + name + "' required by schema '" + schema.name + "' is missing from " +
                      path.string());
    }
    return it->second;
  };

  const auto features = feature_columns(schema);
  std::vector<std::size_t> feature_idx;
  for (const auto& f : features) feature_idx.push_back(column(f));
  const std::size_t label_idx = column(schema.label_column);
  const std::size_t sensitive_idx = column(schema.sensitive_column);
  std::vector<std::size_t> filter_idx;
  for (const auto& f : schema.filters) filter_idx.push_back(column(f.column));

  std::vector<std::size_t> used = feature_idx;
  used.push_back(label_idx);
  used.push_back(sensitive_idx);
  used.insert(used.end(), filter_idx.begin(), filter_idx.end());
  const std::size_t min_width = *std::max_element(used.begin(), used.end()) + 1;

  auto is_missing = [&](const std::string& v) {
    return v.empty() ||
           std::find(schema.missing_tokens.begin(), schema.missing_tokens.end(), v) != schema.missing_tokens.end();
  };
  auto contains = [](const std::vector<std::string>& list, const std::string& v) {
    return std::find(list.begin(), list.end(), v) != list.end();
  };

  ParsedRows out;
  out.provenance.source = path.string();
  out.provenance.schema_hash = schema.hash();
  out.provenance.rows_read = table.rows.size();

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    const std::string where = path.string() + ":" + std::to_string(table.line_numbers[r]);
    if (row.size() < min_width) {
      throw DataError("row at " + where + " has " + std::to_string(row.size()) + " fields, expected at least " +
                      std::to_string(min_width));
    }
    if (std::any_of(used.begin(), used.end(), [&](std::size_t c) { return is_missing(row[c]); })) {
      ++out.provenance.rows_dropped_missing;
      continue;
    }

    bool keep = true;
    for (std::size_t f = 0; f < schema.filters.size() && keep; ++f) {
      const auto& filter = schema.filters[f];
      const std::string& v = row[filter_idx[f]];
      switch (filter.op) {
        case RowFilter::Op::Between: {
          double x = 0.0;
          if (!parse_double(v, x)) {
            throw DataError("non-numeric value '" + v + "' in filter column '" + filter.column + "' at " + where);
          }
          keep = x >= filter.min && x <= filter.max;
          break;
        }
        case RowFilter::Op::Equal:
        case RowFilter::Op::In:
          keep = contains(filter.values, v);
          break;
        case RowFilter::Op::NotEqual:
        case RowFilter::Op::NotIn:
          keep = !contains(filter.values, v);
          break;
      }
    }
    if (!keep) {
      ++out.provenance.rows_filtered;
      continue;
    }

    const std::string& label = row[label_idx];
    double y = 0.0;
    if (contains(schema.positive_values, label)) {
      y = 1.0;
    } else if (contains(schema.negative_values, label)) {
      y = -1.0;
    } else {
      throw DataError("unmapped label value '" + label + "' at " + where);
    }

    const std::string& sensitive = row[sensitive_idx];
    int group = -1;
    for (std::size_t g = 0; g < schema.groups.size(); ++g) {
      if (contains(schema.groups[g].values, sensitive)) {
        group = static_cast<int>(g);
        break;
      }
    }
    if (group < 0) throw DataError("unmapped sensitive value '" + sensitive + "' at " + where);

    std::vector<std::string> values;
    values.reserve(feature_idx.size());
    for (std::size_t k = 0; k < feature_idx.size(); ++k) {
      const std::string& v = row[feature_idx[k]];
      if (!is_categorical(schema, features[k])) {
        double x = 0.0;
        if (!parse_double(v, x)) {
          throw DataError("non-numeric value '" + v + "' in continuous column '" + features[k] + "' at " + where);
        }
      }
      values.push_back(v);
    }
    out.raw_features.push_back(std::move(values));
    out.labels.push_back(y);
    out.groups.push_back(group);
  }
  if (out.labels.empty()) throw DataError("no usable rows in " + path.string());
  return out;
}

GroupedDataset encode(const ParsedRows& parsed, const DatasetSchema& schema, const FeatureEncoder& encoder) {
  const auto n = static_cast<Eigen::Index>(parsed.labels.size());
  GroupedDataset data;
  data.features = Matrix::Zero(n, static_cast<Eigen::Index>(encoder.width()));
  data.labels.resize(n);
  data.groups = parsed.groups;
  for (const auto& g : schema.groups) data.group_names.push_back(g.name);
  data.feature_names = encoder.feature_names();
  data.has_intercept = true;
  data.provenance = parsed.provenance;

  std::vector<std::unordered_map<std::string, std::size_t>> lookup(encoder.columns.size());
  for (std::size_t c = 0; c < encoder.columns.size(); ++c) {
    for (std::size_t k = 0; k < encoder.columns[c].categories.size(); ++k) {
      lookup[c].emplace(encoder.columns[c].categories[k], k);
    }
  }
  std::vector<std::size_t> unseen(encoder.columns.size(), 0);

  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& raw = parsed.raw_features[static_cast<std::size_t>(i)];
    Eigen::Index offset = 0;
    for (std::size_t c = 0; c < encoder.columns.size(); ++c) {
      const auto& col = encoder.columns[c];
      if (col.categorical) {
        const auto it = lookup[c].find(raw[c]);
        if (it != lookup[c].end()) {
          data.features(i, offset + static_cast<Eigen::Index>(it->second)) = 1.0;
        } else {
          ++unseen[c];
        }
        offset += static_cast<Eigen::Index>(col.categories.size());
      } else {
        data.features(i, offset) = (std::stod(raw[c]) - col.mean) / col.stddev;
        ++offset;
      }
    }
    data.features(i, offset) = 1.0;
    data.labels[i] = parsed.labels[static_cast<std::size_t>(i)];
  }
  for (std::size_t c = 0; c < unseen.size(); ++c) {
    if (unseen[c] > 0) {
      std::cerr << "warning: " << unseen[c] << " rows of " << parsed.provenance.source
                << " have categories of '" << encoder.columns[c].name
                << "' unseen in training; encoded as all-zero\n";
    }
  }
  data.validate();
  return data;
}

}  // namespace

LoadedDataset load_csv(const std::filesystem::path& path, const DatasetSchema& schema) {
  const ParsedRows parsed = parse_rows(path, schema);
  const auto features = feature_columns(schema);

  FeatureEncoder encoder;
  const double n = static_cast<double>(parsed.labels.size());
  for (std::size_t c = 0; c < features.size(); ++c) {
    FeatureEncoder::Column col;
    col.name = features[c];
    col.categorical = is_categorical(schema, features[c]);
    if (col.categorical) {
      std::unordered_map<std::string, bool> seen;
      for (const auto& row : parsed.raw_features) {
        if (seen.emplace(row[c], true).second) col.categories.push_back(row[c]);
      }
    } else {
      double sum = 0.0;
      for (const auto& row : parsed.raw_features) sum += std::stod(row[c]);
      col.mean = sum / n;
      double sq = 0.0;
      for (const auto& row : parsed.raw_features) {
        const double dev = std::stod(row[c]) - col.mean;
        sq += dev * dev;
      }
      const double sd = std::sqrt(sq / n);
      col.stddev = sd > 0.0 ? sd : 1.0;
    }
    encoder.columns.push_back(std::move(col));
  }
  GroupedDataset data = encode(parsed, schema, encoder);
  return LoadedDataset{std::move(data), std::move(encoder)};
}

GroupedDataset apply_schema_to_test(const std::filesystem::path& path, const DatasetSchema& schema,
                                    const FeatureEncoder& encoder) {
  const ParsedRows parsed = parse_rows(path, schema);
  const auto features = feature_columns(schema);
  if (features.size() != encoder.columns.size()) {
    throw UsageError("encoder has " + std::to_string(encoder.columns.size()) + " columns but schema '" +
                     schema.name + "' selects " + std::to_string(features.size()));
  }
  for (std::size_t c = 0; c < features.size(); ++c) {
    if (features[c] != encoder.columns[c].name) {
      throw UsageError("encoder column '" + encoder.columns[c].name + "' does not match schema column '" +
                       features[c] + "'");
    }
  }
  return encode(parsed, schema, encoder);
}

std::pair<GroupedDataset, GroupedDataset> split(const GroupedDataset& data, double test_fraction,
                                                std::uint64_t seed) {
  if (!(test_fraction > 0.0 && test_fraction < 1.0)) {
    throw UsageError("test fraction must lie strictly between 0 and 1");
  }
  std::map<std::pair<int, int>, std::vector<std::size_t>> cells;
  for (std::size_t i = 0; i < data.size(); ++i) {
    cells[{data.labels[static_cast<Eigen::Index>(i)] > 0 ? 1 : -1, data.groups[i]}].push_back(i);
  }
  std::mt19937_64 rng(seed);
  std::vector<std::size_t> train, test;
  for (auto& [key, rows] : cells) {
    if (rows.size() == 1) {
      std::cerr << "warning: (label " << key.first << ", group '" << data.group_names[static_cast<std::size_t>(key.second)]
                << "') has a single row; assigned to train\n";
      train.push_back(rows.front());
      continue;
    }
    std::shuffle(rows.begin(), rows.end(), rng);
    auto n_test = static_cast<std::size_t>(std::llround(test_fraction * static_cast<double>(rows.size())));
    n_test = std::clamp<std::size_t>(n_test, 1, rows.size() - 1);
    test.insert(test.end(), rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_test));
    train.insert(train.end(), rows.begin() + static_cast<std::ptrdiff_t>(n_test), rows.end());
  }
  std::sort(train.begin(), train.end());
  std::sort(test.begin(), test.end());
  return {subset_rows(data, train), subset_rows(data, test)};
}

}  // namespace pfair
