#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "ects/data.hpp"
#include "ects/metrics.hpp"

namespace ects {

// Cartesian grid of delay slopes (alpha) and change costs (beta).
struct CostGrid {
  std::vector<double> alphas;
  std::vector<double> betas;

  // The full 17x17 evaluation grid.
  static CostGrid full();
  // 3x3 subgrid for fast smoke runs: alphas {0.0025, 0.025, 0.5},
  // betas {0.005, 0.05, 0.5}.
  static CostGrid quick();
};

// 0/1 misclassification costs plus the given delay slope and change cost.
CostModel make_cost_model(double alpha, double beta);

struct SweepConfig {
  CostGrid grid = CostGrid::full();
  std::vector<StrategyKind> strategies = {StrategyKind::kIrrevocable,
                                          StrategyKind::kRevCostUnaware,
                                          StrategyKind::kRevCostAware};
  std::uint64_t seed = 1;
  int max_groups = 5;       // confidence-group counts 1..max_groups are tuned over
  double smoothing = 1.0;
  ClassifierConfig classifier;
  // Cell used to pick the group count on the validation split.
  double reference_alpha = 0.01;
  double reference_beta = 0.05;
  int jobs = 1;  // worker threads replaying grid cells
};

// Outcome of one (dataset, alpha, beta, strategy) cell. Failed cells carry a
// diagnostic and never abort the sweep.
struct CellResult {
  EvalSummary summary;
  bool ok = false;
  std::string diagnostic;
};

struct DatasetRun {
  std::string dataset;
  int n_test = 0;
  int series_length = 0;
  int chosen_groups = 1;
  // cells[alpha_idx][beta_idx][strategy_idx]
  std::vector<std::vector<std::vector<CellResult>>> cells;
  // Fraction of test series with a repairable irrevocable decision, per alpha.
  std::vector<double> useful_revocation;
  double fit_seconds = 0.0;
  double replay_seconds = 0.0;
};

struct SweepResult {
  CostGrid grid;
  std::vector<StrategyKind> strategies;
  std::vector<DatasetRun> runs;
};

// Fit stage shared by training and sweeping: stratified splits, chain fit on
// the classifier split, group-count tuning (1..max_groups) on the validation
// split at the reference cell, final fit on the estimation split. The chosen
// group count is model.group_count.
struct FittedPipeline {
  SplitPlan plan;
  GammaModel model;
};
FittedPipeline fit_pipeline(const Dataset& dataset, const SweepConfig& config);

// Full pipeline on one dataset: fit_pipeline, then a replay of every grid
// cell on the test split. Per-series classifier state is computed once and
// shared across cells.
DatasetRun run_pipeline(const Dataset& dataset, const SweepConfig& config);

SweepResult run_sweep(const std::vector<Dataset>& datasets, const SweepConfig& config);

// Paired Wilcoxon verdict of `first` vs `second` AvgCost across datasets,
// one entry per grid cell. Cells without comparable datasets degenerate to
// kCircle with a diagnostic.
std::vector<std::vector<TestVerdict>> verdict_matrix(const SweepResult& result,
                                                     StrategyKind first, StrategyKind second,
                                                     double significance = 0.05);

// Mean AvgCost ranks across datasets at one grid cell; skips datasets where
// any strategy failed. Throws when fewer than 2 datasets remain.
FriedmanResult friedman_cell(const SweepResult& result, int alpha_idx, int beta_idx);

// (earliness, kappa) frontier data at a fixed beta: per strategy, per alpha
// (ascending), averaged over datasets. `beta` must be a grid value.
struct ParetoRow {
  StrategyKind strategy = StrategyKind::kIrrevocable;
  double alpha = 0.0;
  double earliness = 0.0;
  double kappa = 0.0;
  int datasets = 0;
};
std::vector<ParetoRow> pareto_rows(const SweepResult& result, double beta);

// CSV writers. All floats go through format_double, so equal sweeps produce
// byte-identical files.
void write_summaries_csv(std::ostream& out, const SweepResult& result);
void write_verdicts_csv(std::ostream& out, const SweepResult& result, StrategyKind first,
                        StrategyKind second, double significance = 0.05);
void write_friedman_csv(std::ostream& out, const SweepResult& result);
void write_pareto_csv(std::ostream& out, const SweepResult& result, double beta);
void write_useful_revocations_csv(std::ostream& out, const SweepResult& result);

// Writes every export into `dir` (created if missing): summaries, pairwise
// verdicts, mean ranks, one Pareto file per beta, useful-revocation
// fractions, and manifest.json (config echo, chosen group counts, wall-clock
// numbers, failed cells). The manifest carries timings and is therefore the
// one non-reproducible file.
void export_sweep(const SweepResult& result, const SweepConfig& config, const std::string& dir,
                  double wall_seconds);

}  // namespace ects
