#pragma once

#include <string>
#include <vector>

#include "ects/trigger.hpp"

namespace ects {

// Aggregate quality of one strategy on one test split under one cost model.
struct EvalSummary {
  double avg_cost = 0.0;
  double earliness = 0.0;         // mean final-decision time / series length
  double kappa = 0.0;             // chance-corrected agreement of final labels
  double mean_revocations = 0.0;  // mean label changes per series
};

// Mean total cost of traces against ground truth. Throws when any trace
// carries no decision (replays always decide by the final checkpoint).
double avg_cost(const std::vector<RunTrace>& traces, const std::vector<Label>& truths,
                const CostModel& cost, int series_length);

double earliness(const std::vector<RunTrace>& traces, int series_length);

double mean_revocations(const std::vector<RunTrace>& traces);

// Cohen's kappa of final labels; 0 when chance agreement is exactly 1 (the
// statistic is undefined there and 0 is the conventional fallback).
double cohen_kappa(const std::vector<Label>& predictions, const std::vector<Label>& truths);

EvalSummary summarize(const std::vector<RunTrace>& traces, const std::vector<Label>& truths,
                      const CostModel& cost, int series_length);

// Outcome of a paired comparison where *smaller values are better*:
//   kPlus   — the first sample is significantly smaller,
//   kMinus  — the first sample is significantly larger,
//   kCircle — no significant difference (or the test could not run).
enum class Verdict { kPlus, kCircle, kMinus };
char verdict_symbol(Verdict v);

struct TestVerdict {
  double statistic = 0.0;  // min(W+, W-) over nonzero differences
  double p_value = 1.0;
  int n_effective = 0;     // pairs remaining after zero differences are dropped
  Verdict verdict = Verdict::kCircle;
  std::string diagnostic;  // non-empty when the test degenerated (e.g. all ties)
};

// Two-sided Wilcoxon signed-rank test on paired scores. Zero differences are
// dropped; tied magnitudes get mid-ranks. Exact distribution up to 25
// effective pairs, normal approximation with continuity and tie corrections
// beyond. Significance level defaults to 0.05.
TestVerdict wilcoxon_signed_rank(const std::vector<double>& first,
                                 const std::vector<double>& second,
                                 double significance = 0.05);

// Friedman mean ranks over blocks. scores[s][b] is strategy s's score on
// block b; smaller scores rank better and ties share mid-ranks. Requires at
// least 2 strategies and 2 blocks.
struct FriedmanResult {
  std::vector<double> mean_ranks;  // one per strategy
  double chi_square = 0.0;
};
FriedmanResult friedman_ranks(const std::vector<std::vector<double>>& scores);

}  // namespace ects
