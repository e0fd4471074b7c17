#include "oracles.hpp"

#include "paretofair/data_io.hpp"
#include "paretofair/errors.hpp"
#include "paretofair/fairness.hpp"

#include <doctest.h>

#include <map>

using namespace pfair;
namespace fs = std::filesystem;

namespace {

const fs::path kSource = PARETOFAIR_SOURCE_DIR;
const fs::path kPrepared = PARETOFAIR_PREPARED_DIR;

const char* kSchema = R"({
  "name": "toy", "header": true, "missing_tokens": ["?"],
  "continuous": ["age", "hours"], "categorical": ["job"],
  "label": {"column": "income", "positive": [">50K"], "negative": ["<=50K"]},
  "sensitive": {"column": "sex", "groups": [{"name": "F", "values": ["Female"]}, {"name": "M", "values": ["Male"]}]},
  "filters": [{"column": "hours", "op": "between", "min": 0, "max": 80}],
  "include_sensitive": false
})";

const char* kCsv =
    "age,job,hours,sex,income\n"
    "30,clerk,40,Female,<=50K\n"
    "50,exec,60,Male,>50K\n"
    "40,clerk,?,Male,<=50K\n"
    "20,sales,20,Female,>50K\n"
    "60,exec,99,Male,>50K\n"
    "44,sales,45,Male,<=50K\n";

struct Toy {
  fs::path dir;
  DatasetSchema schema;
};

Toy toy() {
  Toy t{oracle::temp_dir("dataio"), {}};
  oracle::write_file(t.dir / "schema.json", kSchema);
  oracle::write_file(t.dir / "train.csv", kCsv);
  t.schema = DatasetSchema::load(t.dir / "schema.json");
  return t;
}

std::map<std::string, std::size_t> group_totals(const GroupedDataset& d, int label = 0) {
  std::map<std::string, std::size_t> out;
  for (std::size_t i = 0; i < d.size(); ++i) {
    if (label != 0 && d.labels[static_cast<Eigen::Index>(i)] != label) continue;
    ++out[d.group_names[static_cast<std::size_t>(d.groups[i])]];
  }
  return out;
}

}  // namespace

TEST_CASE("toy csv is parsed, filtered and encoded") {
  const Toy t = toy();
  const LoadedDataset ld = load_csv(t.dir / "train.csv", t.schema);
  const GroupedDataset& d = ld.data;
  // Row 3 has a missing value; row 5 fails the hours filter.
  CHECK(d.size() == 4);
  CHECK(d.provenance.rows_dropped_missing == 1);
  CHECK(d.provenance.rows_filtered == 1);
  CHECK(d.provenance.schema_hash == t.schema.hash());
  CHECK(d.feature_names ==
        std::vector<std::string>{"age", "hours", "job=clerk", "job=exec", "job=sales", "intercept"});
  CHECK(d.features.col(5).isOnes());
  // One-hot in first-appearance order.
  CHECK(d.features(0, 2) == 1.0);
  CHECK(d.features(1, 3) == 1.0);
  CHECK(d.features(2, 4) == 1.0);
  CHECK(d.labels[1] == 1.0);
  CHECK(d.labels[3] == -1.0);
  CHECK(d.groups == std::vector<int>{0, 1, 0, 1});
  for (Eigen::Index c : {0, 1}) {
    const double mean = d.features.col(c).mean();
    const double sd = std::sqrt((d.features.col(c).array() - mean).square().mean());
    CHECK(std::abs(mean) <= 1e-9);
    CHECK(std::abs(sd - 1.0) <= 1e-9);
  }
}

TEST_CASE("loading is deterministic and the test path reuses the encoder") {
  const Toy t = toy();
  const LoadedDataset a = load_csv(t.dir / "train.csv", t.schema);
  const LoadedDataset b = load_csv(t.dir / "train.csv", t.schema);
  CHECK((a.data.features.array() == b.data.features.array()).all());
  const GroupedDataset same = apply_schema_to_test(t.dir / "train.csv", t.schema, a.encoder);
  CHECK((same.features.array() == a.data.features.array()).all());

  oracle::write_file(t.dir / "test.csv", "age,job,hours,sex,income\n35,pilot,50,Male,>50K\n22,clerk,30,Female,<=50K\n");
  const GroupedDataset unseen = apply_schema_to_test(t.dir / "test.csv", t.schema, a.encoder);
  CHECK(unseen.features.block(0, 2, 1, 3).isZero());
  CHECK(unseen.features(0, 0) == doctest::Approx((35.0 - a.encoder.columns[0].mean) / a.encoder.columns[0].stddev));

  const FeatureEncoder round = FeatureEncoder::from_json(a.encoder.to_json());
  CHECK(round.feature_names() == a.encoder.feature_names());
  const DatasetSchema s2 = DatasetSchema::from_json(t.schema.to_json());
  CHECK(s2.hash() == t.schema.hash());
}

TEST_CASE("including the sensitive column adds its one-hot block") {
  Toy t = toy();
  t.schema.include_sensitive = true;
  const LoadedDataset ld = load_csv(t.dir / "train.csv", t.schema);
  CHECK(ld.data.dim() == 8);
}

TEST_CASE("ingestion errors") {
  const Toy t = toy();
  CHECK_THROWS_AS(load_csv(t.dir / "missing.csv", t.schema), DataError);

  oracle::write_file(t.dir / "badlabel.csv", "age,job,hours,sex,income\n30,clerk,40,Female,<=50K\n31,clerk,40,Male,maybe\n");
  try {
    load_csv(t.dir / "badlabel.csv", t.schema);
    FAIL("expected a data error");
  } catch (const DataError& e) {
    CHECK(std::string(e.what()).find("maybe") != std::string::npos);
    CHECK(std::string(e.what()).find(":3") != std::string::npos);
  }

  oracle::write_file(t.dir / "badgroup.csv", "age,job,hours,sex,income\n30,clerk,40,X,<=50K\n");
  CHECK_THROWS_AS(load_csv(t.dir / "badgroup.csv", t.schema), DataError);

  oracle::write_file(t.dir / "empty.csv", "age,job,hours,sex,income\n30,clerk,?,Female,<=50K\n");
  CHECK_THROWS_AS(load_csv(t.dir / "empty.csv", t.schema), DataError);

  oracle::write_file(t.dir / "nocol.csv", "age,job,sex,income\n30,clerk,Female,<=50K\n");
  CHECK_THROWS_AS(load_csv(t.dir / "nocol.csv", t.schema), DataError);

  CHECK_THROWS_AS(DatasetSchema::load(t.dir / "nope.json"), UsageError);
  oracle::write_file(t.dir / "bad.json", R"({"name": "x", "label": {"column": "y"}})");
  CHECK_THROWS_AS(DatasetSchema::load(t.dir / "bad.json"), UsageError);
}

TEST_CASE("csv reader handles quotes and reports lines") {
  const fs::path dir = oracle::temp_dir("csv");
  oracle::write_file(dir / "q.csv", "a,b\n\"x, y\",2\n\n3,\"he said \"\"hi\"\"\"\n");
  const CsvTable t = read_csv(dir / "q.csv", true);
  CHECK(t.header == std::vector<std::string>{"a", "b"});
  REQUIRE(t.rows.size() == 2);
  CHECK(t.rows[0][0] == "x, y");
  CHECK(t.rows[1][1] == "he said \"hi\"");
  CHECK(t.line_numbers == std::vector<std::size_t>{2, 4});
}

TEST_CASE("split is stratified, deterministic and validated") {
  const DatasetSchema schema = DatasetSchema::load(kSource / "data/schemas/compas_sex.json");
  const LoadedDataset ld = load_csv(kSource / "data/raw/compas-scores-two-years.csv", schema);
  const auto [tr1, te1] = split(ld.data, 0.3, 7);
  const auto [tr2, te2] = split(ld.data, 0.3, 7);
  CHECK((tr1.features.array() == tr2.features.array()).all());
  CHECK(tr1.size() + te1.size() == ld.data.size());
  CHECK(std::abs(static_cast<double>(te1.size()) / static_cast<double>(ld.data.size()) - 0.3) <= 0.01);

  const double n = static_cast<double>(ld.data.size());
  const double ntr = static_cast<double>(tr1.size());
  for (int label : {1, -1}) {
    const auto full = group_totals(ld.data, label);
    const auto part = group_totals(tr1, label);
    for (const auto& [g, count] : full) {
      CHECK(std::abs(static_cast<double>(count) / n - static_cast<double>(part.at(g)) / ntr) <= 0.02);
    }
  }
  CHECK_THROWS_AS(split(ld.data, 0.0, 1), UsageError);
  CHECK_THROWS_AS(split(ld.data, 1.0, 1), UsageError);

  const auto [tr3, te3] = split(ld.data, 0.3, 8);
  const bool same = (tr3.labels.array() == tr1.labels.array()).all() && tr3.groups == tr1.groups &&
                    (tr3.features.array() == tr1.features.array()).all();
  CHECK_FALSE(same);
}

TEST_CASE("single-member cells go to train") {
  const Toy t = toy();
  oracle::write_file(t.dir / "tiny.csv",
                     "age,job,hours,sex,income\n30,clerk,40,Female,<=50K\n31,clerk,41,Female,<=50K\n"
                     "32,exec,42,Male,>50K\n33,exec,43,Male,<=50K\n34,exec,44,Male,<=50K\n");
  const LoadedDataset ld = load_csv(t.dir / "tiny.csv", t.schema);
  const auto [tr, te] = split(ld.data, 0.5, 1);
  // (+1, M) has one row and must be in train.
  bool found = false;
  for (std::size_t i = 0; i < tr.size(); ++i) found |= tr.labels[static_cast<Eigen::Index>(i)] > 0;
  CHECK(found);
}

TEST_CASE("compas group tables") {
  const fs::path csv = kSource / "data/raw/compas-scores-two-years.csv";
  const LoadedDataset sex = load_csv(csv, DatasetSchema::load(kSource / "data/schemas/compas_sex.json"));
  CHECK(sex.data.size() == 5278);
  CHECK(group_totals(sex.data) == std::map<std::string, std::size_t>{{"Female", 1031}, {"Male", 4247}});
  const LoadedDataset race = load_csv(csv, DatasetSchema::load(kSource / "data/schemas/compas_race.json"));
  CHECK(group_totals(race.data) == std::map<std::string, std::size_t>{{"Caucasian", 2103}, {"Not Caucasian", 3175}});
  // Reloading gives a bit-identical dataset.
  const LoadedDataset again = load_csv(csv, DatasetSchema::load(kSource / "data/schemas/compas_sex.json"));
  CHECK((again.data.features.array() == sex.data.features.array()).all());
}

TEST_CASE("adult group tables") {
  const DatasetSchema gender = DatasetSchema::load(kSource / "data/schemas/adult_gender.json");
  const LoadedDataset train = load_csv(kPrepared / "adult_train.csv", gender);
  CHECK(train.data.size() == 32561);
  CHECK(group_totals(train.data) == std::map<std::string, std::size_t>{{"Female", 10548}, {"Male", 22013}});
  CHECK(group_totals(train.data, 1) == std::map<std::string, std::size_t>{{"Female", 1196}, {"Male", 6912}});
  const auto p = partition_groups(train.data);
  CHECK(p.positives[0].size() + p.positives[1].size() == 8108);

  const GroupedDataset test = apply_schema_to_test(kPrepared / "adult_test.csv", gender, train.encoder);
  CHECK(test.size() == 12661);
  CHECK(group_totals(test) == std::map<std::string, std::size_t>{{"Female", 4147}, {"Male", 8514}});

  const DatasetSchema race = DatasetSchema::load(kSource / "data/schemas/adult_race.json");
  const LoadedDataset rtrain = load_csv(kPrepared / "adult_train.csv", race);
  const GroupedDataset rtest = apply_schema_to_test(kPrepared / "adult_test.csv", race, rtrain.encoder);
  CHECK(rtest.group_names == std::vector<std::string>{"AIE", "API", "Black", "Other", "White"});
  CHECK(group_totals(rtest) ==
        std::map<std::string, std::size_t>{{"AIE", 123}, {"API", 341}, {"Black", 1181}, {"Other", 107}, {"White", 10909}});
}
