#include "ects/data.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "doctest.h"
#include "test_support.hpp"

using namespace ects;

namespace {

std::string write_file(const std::string& name, const std::string& content) {
  const std::string path = test::scratch_dir() + "/" + name;
  std::ofstream out(path);
  out << content;
  return path;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("checkpoint grids") {
  SUBCASE("length 20 at 5 percent covers every timestep") {
    const auto cks = make_checkpoints(20);
    REQUIRE(cks.size() == 20);
    for (int i = 0; i < 20; ++i) CHECK(cks[i] == i + 1);
  }
  SUBCASE("length 40 at 5 percent lands on even timesteps") {
    const auto cks = make_checkpoints(40);
    REQUIRE(cks.size() == 20);
    CHECK(cks.front() == 2);
    CHECK(cks.back() == 40);
    for (std::size_t i = 0; i < cks.size(); ++i) CHECK(cks[i] == 2 * static_cast<int>(i + 1));
  }
  SUBCASE("short series deduplicate and clip") {
    const auto cks = make_checkpoints(6);
    CHECK(cks == std::vector<int>{1, 2, 3, 4, 5, 6});
  }
  SUBCASE("coarse grids") {
    CHECK(make_checkpoints(8, 25) == std::vector<int>{2, 4, 6, 8});
    CHECK(make_checkpoints(10, 100) == std::vector<int>{10});
  }
  SUBCASE("grid invariants hold across lengths and steps") {
    for (int t_len : {1, 2, 3, 7, 19, 40, 100, 377}) {
      for (int step : {1, 3, 5, 10, 33, 100}) {
        const auto cks = make_checkpoints(t_len, step);
        REQUIRE_FALSE(cks.empty());
        CHECK(cks.back() == t_len);
        CHECK(cks.front() >= 1);
        for (std::size_t i = 1; i < cks.size(); ++i) CHECK(cks[i] > cks[i - 1]);
        if (step == 5) CHECK(cks.size() <= 20);
      }
    }
  }
  SUBCASE("invalid arguments") {
    CHECK_THROWS_AS(make_checkpoints(0), std::invalid_argument);
    CHECK_THROWS_AS(make_checkpoints(10, 0), std::invalid_argument);
    CHECK_THROWS_AS(make_checkpoints(10, 101), std::invalid_argument);
  }
}

TEST_CASE("loading accepts tabs, commas, and space runs equivalently") {
  const std::string tabbed = write_file("delim_tab.tsv", "a\t1\t2\t3\nb\t4\t5\t6\n");
  const std::string comma = write_file("delim_comma.csv", "a,1,2,3\nb,4,5,6\n");
  const std::string spaced = write_file("delim_space.txt", "a  1   2 3\nb 4 5  6\n");

  const Dataset d1 = load_dataset(tabbed);
  const Dataset d2 = load_dataset(comma);
  const Dataset d3 = load_dataset(spaced);

  for (const Dataset* d : {&d1, &d2, &d3}) {
    REQUIRE(d->size() == 2);
    CHECK(d->series_length == 3);
    CHECK(d->series[0].label == 0);
    CHECK(d->series[1].label == 1);
    CHECK(d->series[0].values == std::vector<double>{1, 2, 3});
    CHECK(d->series[1].values == std::vector<double>{4, 5, 6});
    CHECK(d->class_names == std::vector<std::string>{"a", "b"});
  }
  CHECK(d1.name == "delim_tab");
}

TEST_CASE("label tokens map by numeric order when all parse as numbers") {
  // Numerically 3 < 10; lexicographically "10" < "3".
  const std::string path = write_file("numlab.tsv", "10\t1\t2\n3\t3\t4\n10\t5\t6\n3\t7\t8\n");
  const Dataset d = load_dataset(path);
  CHECK(d.class_names == std::vector<std::string>{"3", "10"});
  CHECK(d.series[0].label == 1);
  CHECK(d.series[1].label == 0);

  // A non-numeric token anywhere forces lexicographic order.
  const std::string mixed = write_file("mixlab.tsv", "x\t1\t2\n2\t3\t4\n");
  const Dataset m = load_dataset(mixed);
  CHECK(m.class_names == std::vector<std::string>{"2", "x"});
}

TEST_CASE("unlabeled loading treats every token as a value") {
  const std::string path = write_file("unlab.tsv", "1\t2\t3\n4\t5\t6\n");
  const Dataset d = load_dataset(path, false);
  REQUIRE(d.size() == 2);
  CHECK(d.series_length == 3);
  CHECK(d.series[0].label == kUnlabeled);
  CHECK(d.class_names.empty());
}

TEST_CASE("loading failures name the offending row") {
  const std::string ragged = write_file("ragged.tsv", "a\t1\t2\nb\t3\n");
  CHECK_THROWS_WITH_AS(load_dataset(ragged), doctest::Contains("row 2"), std::runtime_error);

  const std::string bad_value = write_file("badval.tsv", "a\t1\t2\nb\t3\tx7\n");
  CHECK_THROWS_WITH_AS(load_dataset(bad_value), doctest::Contains("row 2"), std::runtime_error);

  const std::string one_class = write_file("oneclass.tsv", "a\t1\t2\na\t3\t4\n");
  CHECK_THROWS_WITH_AS(load_dataset(one_class), doctest::Contains("expected exactly 2 classes"),
                       std::runtime_error);

  const std::string three = write_file("threeclass.tsv", "a\t1\t2\nb\t3\t4\nc\t5\t6\na\t7\t8\n");
  CHECK_THROWS_WITH_AS(load_dataset(three), doctest::Contains("row 3"), std::runtime_error);

  const std::string empty = write_file("empty.tsv", "\n\n");
  CHECK_THROWS_AS(load_dataset(empty), std::runtime_error);

  CHECK_THROWS_AS(load_dataset(test::scratch_dir() + "/missing.tsv"), std::runtime_error);
}

TEST_CASE("save and reload round-trips bit for bit") {
  const Dataset original = test::tiny_corpus(20, 10, 1.7, 909);
  const std::string first_path = test::scratch_dir() + "/roundtrip1.tsv";
  save_dataset(original, first_path);

  const Dataset reloaded = load_dataset(first_path);
  REQUIRE(reloaded.size() == original.size());
  for (int i = 0; i < original.size(); ++i) {
    CHECK(reloaded.series[i].label == original.series[i].label);
    REQUIRE(reloaded.series[i].values.size() == original.series[i].values.size());
    for (std::size_t t = 0; t < original.series[i].values.size(); ++t) {
      CHECK(reloaded.series[i].values[t] == original.series[i].values[t]);
    }
  }

  const std::string second_path = test::scratch_dir() + "/roundtrip2.tsv";
  save_dataset(reloaded, second_path);
  CHECK(read_file(first_path) == read_file(second_path));
}

TEST_CASE("stratified splits have the documented sizes") {
  const Dataset data = test::tiny_corpus(100, 8, 1.0, 11);  // 50/50 classes
  const SplitPlan plan = make_splits(data, 42);

  CHECK(plan.train.size() == 70);
  CHECK(plan.test.size() == 30);
  CHECK(plan.classifier_split.size() == 28);
  CHECK(plan.estimation_split.size() == 28);
  CHECK(plan.validation_split.size() == 14);

  // Disjoint, sorted, and jointly covering.
  std::set<int> all;
  for (const auto* v : {&plan.test, &plan.classifier_split, &plan.estimation_split,
                        &plan.validation_split}) {
    CHECK(std::is_sorted(v->begin(), v->end()));
    for (int i : *v) {
      CHECK(all.insert(i).second);  // no duplicates across splits
      CHECK(i >= 0);
      CHECK(i < 100);
    }
  }
  CHECK(all.size() == 100);

  // Stratified: both classes in every split.
  for (const auto* v : {&plan.train, &plan.test, &plan.classifier_split, &plan.estimation_split,
                        &plan.validation_split}) {
    int counts[2] = {0, 0};
    for (int i : *v) ++counts[data.series[i].label];
    CHECK(counts[0] > 0);
    CHECK(counts[1] > 0);
    CHECK(counts[0] == counts[1]);  // the corpus is balanced
  }
}

TEST_CASE("splits are deterministic in the seed") {
  const Dataset data = test::tiny_corpus(60, 8, 1.0, 13);
  const SplitPlan a = make_splits(data, 7);
  const SplitPlan b = make_splits(data, 7);
  const SplitPlan c = make_splits(data, 8);
  CHECK(a.test == b.test);
  CHECK(a.classifier_split == b.classifier_split);
  CHECK(a.estimation_split == b.estimation_split);
  CHECK(a.validation_split == b.validation_split);
  CHECK(a.test != c.test);
}

TEST_CASE("splitting fails cleanly on tiny or unlabeled corpora") {
  Dataset tiny;
  tiny.series_length = 4;
  for (int i = 0; i < 4; ++i) {
    tiny.series.push_back(TimeSeries{{1.0, 2.0, 3.0, 4.0}, i == 0 ? 1 : 0});
  }
  // Class 1 has a single member: its test share rounds to zero.
  CHECK_THROWS_AS(make_splits(tiny, 1), std::runtime_error);

  Dataset unlabeled = tiny;
  unlabeled.series[2].label = kUnlabeled;
  CHECK_THROWS_AS(make_splits(unlabeled, 1), std::invalid_argument);

  Dataset single_class;
  single_class.series_length = 2;
  for (int i = 0; i < 10; ++i) single_class.series.push_back(TimeSeries{{0.0, 1.0}, 0});
  CHECK_THROWS_AS(make_splits(single_class, 1), std::runtime_error);
}

TEST_CASE("gather materializes indices and rejects bad ones") {
  const Dataset data = test::tiny_corpus(10, 6, 1.0, 17);
  const auto got = gather(data, {0, 3, 7});
  REQUIRE(got.size() == 3);
  CHECK(got[1].values == data.series[3].values);
  CHECK_THROWS_AS(gather(data, {10}), std::invalid_argument);
  CHECK_THROWS_AS(gather(data, {-1}), std::invalid_argument);
}

TEST_CASE("synthetic corpora are balanced, sized, and deterministic") {
  SyntheticSpec spec;
  spec.n_series = 30;
  spec.series_length = 12;
  const Dataset a = generate_synthetic(spec, 5);
  const Dataset b = generate_synthetic(spec, 5);
  const Dataset c = generate_synthetic(spec, 6);

  REQUIRE(a.size() == 30);
  CHECK(a.series_length == 12);
  int counts[2] = {0, 0};
  for (const auto& s : a.series) {
    REQUIRE(s.labeled());
    ++counts[s.label];
    CHECK(s.length() == 12);
  }
  CHECK(counts[0] == 15);
  CHECK(counts[1] == 15);

  bool identical = true, differs = false;
  for (int i = 0; i < 30; ++i) {
    for (int t = 0; t < 12; ++t) {
      identical = identical && a.series[i].values[t] == b.series[i].values[t];
      differs = differs || a.series[i].values[t] != c.series[i].values[t];
    }
  }
  CHECK(identical);
  CHECK(differs);
}

TEST_CASE("growing a synthetic corpus leaves earlier series untouched") {
  SyntheticSpec small, large;
  small.n_series = 10;
  large.n_series = 20;
  small.series_length = large.series_length = 8;
  const Dataset a = generate_synthetic(small, 21);
  const Dataset b = generate_synthetic(large, 21);
  for (int i = 0; i < 10; ++i) {
    CHECK(a.series[i].values == b.series[i].values);
  }
}

TEST_CASE("the class gap separates the corpus") {
  SyntheticSpec spec;
  spec.n_series = 60;
  spec.series_length = 16;
  spec.gap = 4.0;
  spec.noise = 0.5;
  const Dataset d = generate_synthetic(spec, 31);
  double mean[2] = {0.0, 0.0};
  int counts[2] = {0, 0};
  for (const auto& s : d.series) {
    double m = 0.0;
    for (double v : s.values) m += v;
    mean[s.label] += m / s.length();
    ++counts[s.label];
  }
  CHECK(mean[1] / counts[1] > 1.0);
  CHECK(mean[0] / counts[0] < -1.0);
}

TEST_CASE("polarity flips invert the early segment and recover") {
  SyntheticSpec spec;
  spec.n_series = 30;
  spec.series_length = 20;
  spec.gap = 3.0;
  spec.noise = 0.3;
  spec.ar_coeff = 0.2;
  spec.flip_frac = 0.5;
  spec.flip_prob = 1.0;  // every series starts inverted
  const Dataset d = generate_synthetic(spec, 77);

  for (const auto& s : d.series) {
    double early = 0.0, late = 0.0;
    for (int t = 0; t < 10; ++t) early += s.values[t];
    for (int t = 10; t < 20; ++t) late += s.values[t];
    // Early and late segments sit on opposite sides of zero.
    CHECK(early * late < 0.0);
    // The late segment is the truthful one.
    CHECK((s.label == 1 ? late > 0.0 : late < 0.0));
  }
}

TEST_CASE("synthetic parameter validation") {
  SyntheticSpec spec;
  spec.n_series = 1;
  CHECK_THROWS_AS(generate_synthetic(spec, 1), std::invalid_argument);
  spec.n_series = 10;
  spec.series_length = 0;
  CHECK_THROWS_AS(generate_synthetic(spec, 1), std::invalid_argument);
  spec.series_length = 10;
  spec.gap = -1.0;
  CHECK_THROWS_AS(generate_synthetic(spec, 1), std::invalid_argument);
  spec.gap = 1.0;
  spec.ar_coeff = 1.0;
  CHECK_THROWS_AS(generate_synthetic(spec, 1), std::invalid_argument);
  spec.ar_coeff = 0.5;
  spec.flip_prob = 1.5;
  CHECK_THROWS_AS(generate_synthetic(spec, 1), std::invalid_argument);
}

TEST_CASE("metadata sidecar captures the corpus and its generator") {
  SyntheticSpec spec;
  spec.name = "meta_corpus";
  spec.n_series = 10;
  spec.series_length = 8;
  const Dataset d = generate_synthetic(spec, 3);

  const std::string path = test::scratch_dir() + "/meta.json";
  write_dataset_metadata(d, path, &spec);

  const nlohmann::json j = nlohmann::json::parse(read_file(path));
  CHECK(j["name"] == "meta_corpus");
  CHECK(j["n_series"] == 10);
  CHECK(j["series_length"] == 8);
  CHECK(j["labeled"] == true);
  CHECK(j["class_counts"][0] == 5);
  CHECK(j["class_counts"][1] == 5);
  CHECK(j["generator"]["gap"] == spec.gap);
  CHECK(j["checkpoints"].size() == d.checkpoints.size());
}

TEST_CASE("split plans serialize to JSON") {
  const Dataset data = test::tiny_corpus(40, 8, 1.0, 2);
  const SplitPlan plan = make_splits(data, 99);
  const std::string path = test::scratch_dir() + "/splits.json";
  save_splits(plan, path);

  const nlohmann::json j = nlohmann::json::parse(read_file(path));
  CHECK(j["seed"] == 99);
  CHECK(j["train"].size() == plan.train.size());
  CHECK(j["test"].size() == plan.test.size());
  CHECK(j["classifier_split"].size() == plan.classifier_split.size());
  CHECK(j["test"][0] == plan.test[0]);
}
