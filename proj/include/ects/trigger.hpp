#pragma once

#include <iosfwd>
#include <optional>
#include <string_view>
#include <vector>

#include "ects/gamma.hpp"

namespace ects {

// Decision strategies replayed over a series' checkpoints.
enum class StrategyKind {
  kIrrevocable,    // decide once when acting now minimizes the expected cost curve
  kRevCostUnaware, // revocable; the change criterion prices changes at 0
  kRevCostAware,   // revocable; the change criterion uses the true change cost
  kOracle,         // hindsight: the single decision minimizing the true cost
};

// Short stable names used in CLI flags, CSV columns, and file names.
std::string_view strategy_name(StrategyKind kind);
std::optional<StrategyKind> strategy_from_name(std::string_view name);

// One row per visited checkpoint. Fields that only exist in one phase keep
// their defaults elsewhere (cost_new/cost_prev are NaN outside the revision
// phase, clauses are false, tau_star is 0 at skipped rows).
struct TraceRow {
  int time = 0;
  double confidence = 0.0;
  Label predicted = 0;
  int group = 0;
  int tau_star = 0;
  double f_now = 0.0;   // curve value at horizon 0
  double f_best = 0.0;  // curve minimum
  double cost_new = std::numeric_limits<double>::quiet_NaN();   // revision clause: price of switching now
  double cost_prev = std::numeric_limits<double>::quiet_NaN();  // revision clause: price of standing pat
  bool clause_differs = false;  // prediction != standing label
  bool clause_now = false;      // revocable curve argmin == 0
  bool clause_cheaper = false;  // cost_new < cost_prev
  bool decided = false;         // a decision was appended at this row
};

struct RunTrace {
  DecisionSequence sequence;
  std::vector<TraceRow> rows;
};

// Cost-independent classifier state of one series at every checkpoint.
// Computing it once lets many cost models replay the same series cheaply.
struct SeriesPath {
  std::vector<double> confidence;
  std::vector<Label> predicted;
  std::vector<int> group;  // empty when built from a bare chain
};

SeriesPath compute_path(const ClassifierChain& chain, const TimeSeries& series);
SeriesPath compute_path(const GammaModel& model, const TimeSeries& series);

// One decision, taken at the first checkpoint where the expected cost curve
// is minimized by acting immediately. The last checkpoint's curve has a
// single entry, so a run always ends decided.
RunTrace run_irrevocable(const GammaModel& model, const CostModel& cost,
                         const SeriesPath& path);
RunTrace run_irrevocable(const GammaModel& model, const CostModel& cost,
                         const TimeSeries& series);

// First decision as above, then label revisions whenever all three hold at a
// checkpoint: the prediction differs from the standing label, the revocable
// curve says act now, and switching is priced below standing pat. The
// cost-unaware variant evaluates that criterion with the change cost zeroed
// (the realized run is still billed at the true cost by the caller).
RunTrace run_revocable(const GammaModel& model, const CostModel& cost, const SeriesPath& path,
                       bool cost_aware);
RunTrace run_revocable(const GammaModel& model, const CostModel& cost, const TimeSeries& series,
                       bool cost_aware);

// Hindsight benchmark: the single decision minimizing true misclassification
// plus delay, earliest checkpoint on ties. Requires the truth label.
RunTrace run_oracle(const ClassifierChain& chain, const CostModel& cost, const SeriesPath& path,
                    Label truth);
RunTrace run_oracle(const ClassifierChain& chain, const CostModel& cost,
                    const TimeSeries& series, Label truth);

// Dispatch by strategy kind; `truth` is only consulted by the oracle.
RunTrace run_strategy(const GammaModel& model, const CostModel& cost, const SeriesPath& path,
                      StrategyKind kind, Label truth = kUnlabeled);

// Fraction of labeled series whose irrevocable decision label disagrees with
// the hindsight oracle's label — the cases where a later revision could have
// repaired the outcome.
double useful_revocation_fraction(const GammaModel& model, const CostModel& cost,
                                  const std::vector<SeriesPath>& paths,
                                  const std::vector<Label>& truths);
double useful_revocation_fraction(const GammaModel& model, const CostModel& cost,
                                  const std::vector<TimeSeries>& series);

// CSV dump of traces (one row per checkpoint per series, `series` column
// first). NaN cells are left empty; booleans print as 0/1.
void write_trace_csv(std::ostream& out, const std::vector<RunTrace>& traces);

}  // namespace ects
