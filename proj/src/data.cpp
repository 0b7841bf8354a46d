#include "ects/data.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "ects/rng.hpp"

namespace ects {
namespace {

std::runtime_error load_error(const std::string& path, int row, const std::string& what) {
  return std::runtime_error("load error in " + path + ", row " + std::to_string(row) + ": " + what);
}

// Splits a line on tabs, commas, or runs of spaces; empty tokens collapse.
std::vector<std::string> tokenize(const std::string& line) {
  std::string normalized = line;
  for (char& c : normalized) {
    if (c == '\t' || c == ',' || c == '\r') c = ' ';
  }
  std::vector<std::string> tokens;
  std::istringstream in(normalized);
  std::string tok;
  while (in >> tok) tokens.push_back(tok);
  return tokens;
}

bool parse_number(const std::string& token, double* out) {
  const char* begin = token.c_str();
  char* end = nullptr;
  const double v = std::strtod(begin, &end);
  if (end != begin + token.size() || token.empty()) return false;
  *out = v;
  return true;
}

}  // namespace

std::vector<int> make_checkpoints(int series_length, int step_percent) {
  if (series_length < 1) throw std::invalid_argument("series length must be >= 1");
  if (step_percent < 1 || step_percent > 100) {
    throw std::invalid_argument("checkpoint step must be a percentage in [1, 100]");
  }
  std::vector<int> checkpoints;
  for (int k = 1; k * step_percent <= 100; ++k) {
    const int t = static_cast<int>(static_cast<long long>(k) * step_percent * series_length / 100);
    if (t < 1) continue;
    if (checkpoints.empty() || t > checkpoints.back()) checkpoints.push_back(t);
  }
  if (checkpoints.empty() || checkpoints.back() != series_length) {
    checkpoints.push_back(series_length);
  }
  return checkpoints;
}

Dataset load_dataset(const std::string& path, bool labeled) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset file: " + path);

  Dataset ds;
  // Derive a display name of the file stem.
  {
    std::string stem = path;
    const auto slash = stem.find_last_of("/\\");
    if (slash != std::string::npos) stem = stem.substr(slash + 1);
    const auto dot = stem.find_last_of('.');
    if (dot != std::string::npos && dot > 0) stem = stem.substr(0, dot);
    ds.name = stem;
  }

  std::vector<std::string> raw_labels;
  std::string line;
  int row = 0;
  std::size_t expected_tokens = 0;
  while (std::getline(in, line)) {
    ++row;
    const std::vector<std::string> tokens = tokenize(line);
    if (tokens.empty()) continue;
    if (expected_tokens == 0) {
      expected_tokens = tokens.size();
      const std::size_t min_tokens = labeled ? 2 : 1;
      if (tokens.size() < min_tokens) throw load_error(path, row, "too few columns");
    } else if (tokens.size() != expected_tokens) {
      throw load_error(path, row,
                       "ragged row: expected " + std::to_string(expected_tokens) + " columns, got " +
                           std::to_string(tokens.size()));
    }
    TimeSeries s;
    const std::size_t first_value = labeled ? 1 : 0;
    if (labeled) raw_labels.push_back(tokens[0]);
    s.values.reserve(tokens.size() - first_value);
    for (std::size_t i = first_value; i < tokens.size(); ++i) {
      double v = 0.0;
      if (!parse_number(tokens[i], &v)) {
        throw load_error(path, row, "non-numeric value '" + tokens[i] + "'");
      }
      s.values.push_back(v);
    }
    ds.series.push_back(std::move(s));
  }
  if (ds.series.empty()) throw std::runtime_error("load error in " + path + ": no series");

  if (labeled) {
    // Map the distinct label tokens to {0, 1}: numeric order when every
    // token parses as a number, lexicographic otherwise.
    std::vector<std::string> distinct;
    for (const auto& l : raw_labels) {
      if (std::find(distinct.begin(), distinct.end(), l) == distinct.end()) distinct.push_back(l);
    }
    if (distinct.size() != 2) {
      // Name the row where the class count became wrong.
      if (distinct.size() > 2) {
        std::vector<std::string> seen;
        for (std::size_t i = 0; i < raw_labels.size(); ++i) {
          if (std::find(seen.begin(), seen.end(), raw_labels[i]) == seen.end()) {
            seen.push_back(raw_labels[i]);
            if (seen.size() == 3) {
              throw load_error(path, static_cast<int>(i) + 1,
                               "more than two classes (found '" + raw_labels[i] + "')");
            }
          }
        }
      }
      throw std::runtime_error("load error in " + path + ": expected exactly 2 classes, found " +
                               std::to_string(distinct.size()));
    }
    bool all_numeric = true;
    double numeric[2] = {0.0, 0.0};
    for (int i = 0; i < 2; ++i) {
      if (!parse_number(distinct[i], &numeric[i])) all_numeric = false;
    }
    const bool swap = all_numeric ? numeric[0] > numeric[1] : distinct[0] > distinct[1];
    if (swap) std::swap(distinct[0], distinct[1]);
    ds.class_names = distinct;
    for (std::size_t i = 0; i < ds.series.size(); ++i) {
      ds.series[i].label = raw_labels[i] == distinct[0] ? 0 : 1;
    }
  }

  ds.series_length = ds.series[0].length();
  for (std::size_t i = 1; i < ds.series.size(); ++i) {
    if (ds.series[i].length() != ds.series_length) {
      throw std::runtime_error("load error in " + path + ": series lengths differ");
    }
  }
  ds.checkpoints = make_checkpoints(ds.series_length);
  return ds;
}

void save_dataset(const Dataset& dataset, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset file: " + path);
  for (const auto& s : dataset.series) {
    if (s.labeled()) out << s.label;
    bool first = !s.labeled();
    for (double v : s.values) {
      if (!first) out << '\t';
      first = false;
      out << format_double(v);
    }
    out << '\n';
  }
  if (!out) throw std::runtime_error("failed writing dataset file: " + path);
}

SplitPlan make_splits(const Dataset& dataset, std::uint64_t seed) {
  std::vector<int> by_class[2];
  for (int i = 0; i < dataset.size(); ++i) {
    const Label y = dataset.series[i].label;
    if (y != 0 && y != 1) throw std::invalid_argument("splits require a fully labeled dataset");
    by_class[y].push_back(i);
  }
  if (by_class[0].empty() || by_class[1].empty()) {
    throw std::runtime_error("split error: dataset must contain both classes");
  }

  SplitPlan plan;
  plan.seed = seed;
  Rng rng(substream_seed(seed, 0));
  for (int c = 0; c < 2; ++c) {
    std::vector<int>& pool = by_class[c];
    rng.shuffle(pool);
    const int n = static_cast<int>(pool.size());
    const int n_train = static_cast<int>(std::llround(0.7 * n));
    const int n_classifier = static_cast<int>(std::llround(0.4 * n_train));
    const int n_estimation = static_cast<int>(std::llround(0.4 * n_train));
    const int n_validation = n_train - n_classifier - n_estimation;
    if (n_train < 1 || n - n_train < 1 || n_classifier < 1 || n_estimation < 1 ||
        n_validation < 1) {
      throw std::runtime_error("split error: class '" + std::to_string(c) +
                               "' is too small for stratified 70/30 and 40/40/20 splits");
    }
    int at = 0;
    for (int i = 0; i < n_classifier; ++i) plan.classifier_split.push_back(pool[at++]);
    for (int i = 0; i < n_estimation; ++i) plan.estimation_split.push_back(pool[at++]);
    for (int i = 0; i < n_validation; ++i) plan.validation_split.push_back(pool[at++]);
    for (int i = 0; i < n - n_train; ++i) plan.test.push_back(pool[at++]);
  }
  plan.train = plan.classifier_split;
  plan.train.insert(plan.train.end(), plan.estimation_split.begin(), plan.estimation_split.end());
  plan.train.insert(plan.train.end(), plan.validation_split.begin(), plan.validation_split.end());

  for (auto* v : {&plan.train, &plan.test, &plan.classifier_split, &plan.estimation_split,
                  &plan.validation_split}) {
    std::sort(v->begin(), v->end());
  }
  return plan;
}

std::vector<TimeSeries> gather(const Dataset& dataset, const std::vector<int>& indices) {
  std::vector<TimeSeries> out;
  out.reserve(indices.size());
  for (int i : indices) {
    if (i < 0 || i >= dataset.size()) throw std::invalid_argument("split index out of range");
    out.push_back(dataset.series[i]);
  }
  return out;
}

Dataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed) {
  if (spec.n_series < 2) throw std::invalid_argument("synthetic corpus needs >= 2 series");
  if (spec.series_length < 1) throw std::invalid_argument("series length must be >= 1");
  if (spec.gap < 0.0 || spec.noise < 0.0) {
    throw std::invalid_argument("gap and noise must be >= 0");
  }
  if (std::fabs(spec.ar_coeff) >= 1.0) {
    throw std::invalid_argument("AR coefficient must lie in (-1, 1)");
  }
  if (spec.flip_prob < 0.0 || spec.flip_prob > 1.0 || spec.flip_frac > 1.0) {
    throw std::invalid_argument("flip parameters out of range");
  }
  if (spec.onset_frac < 0.0 || spec.onset_frac > 1.0 || spec.rise_frac < 0.0) {
    throw std::invalid_argument("onset/rise fractions out of range");
  }

  const int T = spec.series_length;
  Dataset ds;
  ds.name = spec.name;
  ds.series_length = T;
  ds.checkpoints = make_checkpoints(T);
  ds.class_names = {"0", "1"};
  ds.series.reserve(spec.n_series);

  for (int e = 0; e < spec.n_series; ++e) {
    // Alternating labels keep every prefix of the corpus balanced; each
    // series owns an independent substream, so corpus size does not affect
    // earlier series.
    const Label y = e % 2;
    Rng rng(substream_seed(seed, static_cast<std::uint64_t>(e) + 1));
    const bool flipped = spec.flip_frac >= 0.0 && rng.uniform() < spec.flip_prob;
    const int flip_t = flipped ? static_cast<int>(std::llround(spec.flip_frac * T)) : 0;

    TimeSeries s;
    s.label = y;
    s.values.resize(T);
    double ar_state = 0.0;
    for (int t = 1; t <= T; ++t) {
      const double t_frac = static_cast<double>(t) / T;
      double strength = 0.0;
      if (t_frac > spec.onset_frac) {
        strength = spec.rise_frac <= 0.0
                       ? 1.0
                       : std::min(1.0, (t_frac - spec.onset_frac) / spec.rise_frac);
      }
      const double polarity = (flipped && t <= flip_t) ? -1.0 : 1.0;
      const double level = (y == 1 ? 0.5 : -0.5) * spec.gap * strength * polarity;
      ar_state = spec.ar_coeff * ar_state + rng.gaussian() * spec.noise;
      s.values[t - 1] = level + ar_state;
    }
    ds.series.push_back(std::move(s));
  }
  return ds;
}

void write_dataset_metadata(const Dataset& dataset, const std::string& path,
                            const SyntheticSpec* generator) {
  nlohmann::json j;
  j["name"] = dataset.name;
  j["n_series"] = dataset.size();
  j["series_length"] = dataset.series_length;
  j["checkpoints"] = dataset.checkpoints;
  j["class_names"] = dataset.class_names;
  int counts[2] = {0, 0};
  bool labeled = true;
  for (const auto& s : dataset.series) {
    if (s.labeled()) ++counts[s.label];
    else labeled = false;
  }
  j["labeled"] = labeled;
  if (labeled) j["class_counts"] = {counts[0], counts[1]};
  if (generator != nullptr) {
    j["generator"] = {{"name", generator->name},
                      {"n_series", generator->n_series},
                      {"series_length", generator->series_length},
                      {"gap", generator->gap},
                      {"onset_frac", generator->onset_frac},
                      {"rise_frac", generator->rise_frac},
                      {"flip_frac", generator->flip_frac},
                      {"flip_prob", generator->flip_prob},
                      {"noise", generator->noise},
                      {"ar_coeff", generator->ar_coeff}};
  }
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write metadata file: " + path);
  out << j.dump(2) << '\n';
}

void save_splits(const SplitPlan& plan, const std::string& path) {
  nlohmann::json j;
  j["seed"] = plan.seed;
  j["train"] = plan.train;
  j["test"] = plan.test;
  j["classifier_split"] = plan.classifier_split;
  j["estimation_split"] = plan.estimation_split;
  j["validation_split"] = plan.validation_split;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write splits file: " + path);
  out << j.dump(2) << '\n';
}

}  // namespace ects
