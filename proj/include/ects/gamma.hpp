#pragma once

#include <array>
#include <memory>
#include <vector>

#include "ects/classifiers.hpp"
#include "ects/core.hpp"

namespace ects {

// Equal-frequency partition of the confidence range, one set of interior
// boundaries per checkpoint. Group j covers [b_j, b_{j+1}) with b_0 = -inf
// and b_last = +inf; duplicate quantile boundaries are collapsed, so a
// checkpoint may end up with fewer groups than requested.
struct GroupPartition {
  std::vector<std::vector<double>> boundaries;

  int group_count(int checkpoint_idx) const {
    return static_cast<int>(boundaries[checkpoint_idx].size()) + 1;
  }
  // Group index of a confidence value at a checkpoint (count of boundaries <= value).
  int group_of(int checkpoint_idx, double confidence) const;
};

// Row-stochastic transition matrices between consecutive checkpoints.
// matrices[i][g][h] = P(group h at checkpoint i+1 | group g at checkpoint i).
// Rectangular when the two checkpoints have different group counts.
struct TransitionModel {
  std::vector<std::vector<std::vector<double>>> matrices;
};

// Frequentist tables counted on the estimation split, additively smoothed.
struct GroupStatistics {
  // priors[i][g][y] = P(truth = y | group g at checkpoint i)
  std::vector<std::vector<std::array<double, 2>>> priors;
  // confusion[i][g][y][p] = P(prediction at i = p | truth = y, group g at i)
  std::vector<std::vector<std::array<std::array<double, 2>, 2>>> confusion;
  // change[i][d][g][a][b] = P(prediction at checkpoint i+1+d = b |
  //                           prediction at i = a, group g at i).
  // The table conditions on the *current* checkpoint's group and looks ahead
  // directly, so evaluating it needs no transition-chain propagation.
  std::vector<std::vector<std::vector<std::array<std::array<double, 2>, 2>>>> change;
};

// Classifier chain plus everything needed to estimate decision costs ahead
// of time: confidence groups, their Markov dynamics, and per-group outcome
// statistics. Fields are public so tests can assemble fixtures directly.
struct GammaModel {
  std::shared_ptr<const ClassifierChain> chain;
  int group_count = 1;    // requested groups per checkpoint (pre-collapse)
  double smoothing = 1.0; // additive smoothing constant used by every table
  GroupPartition partition;
  TransitionModel transitions;
  GroupStatistics stats;

  const std::vector<int>& checkpoints() const { return chain->checkpoints; }
  int checkpoint_count() const { return chain->checkpoint_count(); }
  int series_length() const { return chain->series_length; }
};

// Expected decision costs over the remaining checkpoints. values[tau] prices
// a decision at the tau-th next checkpoint; argmin is the smallest index
// attaining the minimum (ties go to the earliest horizon).
struct ExpectedCostCurve {
  std::vector<double> values;
  int argmin = 0;

  double min() const { return values[argmin]; }
};

// Fits partition, transitions, and statistics on a labeled estimation split
// whose series match the chain's length. Requires group_count >= 1,
// smoothing >= 0, and at least group_count series; throws
// std::invalid_argument / std::runtime_error otherwise.
GammaModel fit_gamma(std::shared_ptr<const ClassifierChain> chain,
                     const std::vector<TimeSeries>& estimation, int group_count,
                     double smoothing = 1.0);

// Confidence group of a prefix (must end on a checkpoint).
int group_at(const GammaModel& model, const Prefix& prefix);

// Distribution over groups at checkpoint `checkpoint_idx + tau`, starting
// one-hot at (checkpoint_idx, group) and advancing through the transition
// matrices. tau = 0 returns the one-hot vector itself.
std::vector<double> project_group(const GammaModel& model, int checkpoint_idx, int group,
                                  int tau);

// E_y[ misclassification(predicted | y) ] under the group's truth prior.
double expected_misclass_current(const GammaModel& model, int checkpoint_idx, int group,
                                 Label predicted, const CostModel& cost);

// E_y E_p[ misclassification(p | y) ] at a checkpoint, under the group's own
// prior and confusion tables (prices a not-yet-seen future prediction).
double expected_misclass_projected(const GammaModel& model, int checkpoint_idx, int group,
                                   const CostModel& cost);

// Cost curve of the one-decision rule: values[tau] = expected
// misclassification at the tau-th next checkpoint plus the delay of deciding
// there. tau = 0 prices the actual current prediction; tau > 0 prices the
// projected one.
ExpectedCostCurve expected_cost_curve(const GammaModel& model, const Prefix& prefix,
                                      const CostModel& cost);
ExpectedCostCurve expected_cost_curve_at(const GammaModel& model, int checkpoint_idx,
                                         int group, Label predicted, const CostModel& cost);

// Expected cost of label changes incurred by re-deciding tau checkpoints
// ahead while `last_label` stands: change_cost * P(prediction flips). Zero
// at tau = 0 by convention. Throws when tau < 0 or the horizon leaves the grid.
double expected_change_cost(const GammaModel& model, const Prefix& prefix, Label last_label,
                            int tau, const CostModel& cost);
double expected_change_cost_at(const GammaModel& model, int checkpoint_idx, int group,
                               Label last_label, int tau, const CostModel& cost);

// Cost curve of continuing a revocable run that already holds `sequence`:
// projected misclassification, the change costs already paid, the expected
// cost of future flips relative to the standing label, and the delay at each
// horizon. With an empty sequence nothing has been paid and the flip
// expectancy conditions on the current prediction; with change_cost = 0 the
// curve equals the one-decision curve pointwise.
ExpectedCostCurve revocable_cost_curve(const GammaModel& model, const Prefix& prefix,
                                       const DecisionSequence& sequence, const CostModel& cost);
ExpectedCostCurve revocable_cost_curve_at(const GammaModel& model, int checkpoint_idx,
                                          int group, Label candidate, Label last_label,
                                          double paid_change_cost, const CostModel& cost);

}  // namespace ects
