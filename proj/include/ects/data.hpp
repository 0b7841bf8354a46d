#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "ects/core.hpp"

namespace ects {

// A loaded corpus: equal-length series, binary labels (when labeled), the
// original class tokens in sorted order, and the checkpoint grid.
struct Dataset {
  std::string name;
  std::vector<TimeSeries> series;
  int series_length = 0;
  std::vector<int> checkpoints;
  std::vector<std::string> class_names;  // class_names[label] = original token

  int size() const { return static_cast<int>(series.size()); }
};

// Evenly spaced decision times floor(k * T * percent / 100) for k = 1..,
// clipped to [1, T], deduplicated, last always T. The default 5% grid yields
// at most 20 checkpoints.
std::vector<int> make_checkpoints(int series_length, int step_percent = 5);

// Loads a delimited text corpus: one series per line, label token first when
// `labeled`, then the measurements. Tabs, commas, and runs of spaces all
// delimit. Labels are mapped to {0, 1} by sorted order (numeric when every
// label parses as a number, lexicographic otherwise). Throws
// std::runtime_error naming the offending 1-based row for ragged rows,
// non-numeric values, or a class count other than 2.
Dataset load_dataset(const std::string& path, bool labeled = true);

// Canonical tab-separated dump (mapped labels, round-trip-exact values).
// Loading the dump reproduces the dataset bit for bit.
void save_dataset(const Dataset& dataset, const std::string& path);

// Index-based stratified splits: 70/30 train/test, then 40/40/20 of train
// into classifier / estimation / validation. Per-class rounding, so a
// balanced 100-series corpus yields 70/30 and 28/28/14. Indices within each
// split are sorted. Throws std::runtime_error when any split would miss a
// class.
struct SplitPlan {
  std::uint64_t seed = 0;
  std::vector<int> train, test;
  std::vector<int> classifier_split, estimation_split, validation_split;
};

SplitPlan make_splits(const Dataset& dataset, std::uint64_t seed);

// Materializes the series behind an index list.
std::vector<TimeSeries> gather(const Dataset& dataset, const std::vector<int>& indices);

// Synthetic binary corpus: class-conditional AR(1) noise around opposite
// mean levels. The gap ramps up linearly between onset_frac*T and
// (onset_frac+rise_frac)*T. With flip_frac >= 0, each series independently
// starts polarity-inverted with probability flip_prob and recovers at
// flip_frac*T — the early signal actively misleads, which is what creates
// revocation opportunities downstream.
struct SyntheticSpec {
  std::string name = "synthetic";
  int n_series = 200;
  int series_length = 40;
  double gap = 1.5;
  double onset_frac = 0.0;
  double rise_frac = 0.0;   // 0 = full strength immediately after onset
  double flip_frac = -1.0;  // < 0 disables flips
  double flip_prob = 0.0;
  double noise = 1.0;
  double ar_coeff = 0.5;
};

Dataset generate_synthetic(const SyntheticSpec& spec, std::uint64_t seed);

// JSON sidecar describing a dataset (size, length, checkpoints, class
// tokens, and the generator spec when one produced it).
void write_dataset_metadata(const Dataset& dataset, const std::string& path,
                            const SyntheticSpec* generator = nullptr);

// JSON dump of a split plan, for reproducibility audits.
void save_splits(const SplitPlan& plan, const std::string& path);

}  // namespace ects
