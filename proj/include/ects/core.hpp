#pragma once

#include <array>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

namespace ects {

// Class label of a binary problem. Valid decision labels are 0 and 1;
// kUnlabeled marks series whose ground truth is unknown (inference inputs).
using Label = int;
inline constexpr Label kUnlabeled = -1;

// A univariate series sampled at unit steps, optionally labeled.
struct TimeSeries {
  std::vector<double> values;
  Label label = kUnlabeled;

  int length() const { return static_cast<int>(values.size()); }
  bool labeled() const { return label == 0 || label == 1; }
};

// The first `t` measurements of a series (1-based count). Everything past
// `t` is invisible to any computation done on the prefix.
struct Prefix {
  const TimeSeries* parent = nullptr;
  int t = 0;

  std::span<const double> values() const {
    return {parent->values.data(), static_cast<std::size_t>(t)};
  }
};

// Cost model of a run: misclassification matrix, linear delay slope, and the
// flat per-revocation penalty.
struct CostModel {
  // misclassification[predicted][truth]; defaults to the 0/1 matrix.
  std::array<std::array<double, 2>, 2> misclassification = {{{0.0, 1.0}, {1.0, 0.0}}};
  double delay_slope = 0.0;   // cost of deciding at time t is delay_slope * t / T
  double change_cost = 0.0;   // cost of each label change after the first decision

  double misclass(Label predicted, Label truth) const {
    return misclassification[predicted][truth];
  }
  double change(Label next, Label previous) const {
    return next == previous ? 0.0 : change_cost;
  }
  double max_misclass() const;

  // Throws std::invalid_argument unless every entry is finite and >= 0.
  void validate() const;
};

// One (time, label) decision. Times are raw timesteps, 1-based.
struct Decision {
  int time = 0;
  Label label = 0;
};

// Ordered decisions taken on one series. Times increase strictly and
// consecutive labels always differ: appending the current label is a no-op
// (reported via the return value), appending at a non-increasing time is a
// logic error and throws.
class DecisionSequence {
 public:
  // Returns true when the decision was recorded, false when `label` equals
  // the standing label (nothing is recorded). Throws std::invalid_argument
  // when `time` does not exceed the last decision time or `label` is not a
  // valid class.
  bool append(int time, Label label);

  bool empty() const { return decisions_.empty(); }
  std::size_t size() const { return decisions_.size(); }
  const Decision& front() const { return decisions_.front(); }
  const Decision& back() const { return decisions_.back(); }
  const std::vector<Decision>& decisions() const { return decisions_; }
  int change_count() const {
    return decisions_.empty() ? 0 : static_cast<int>(decisions_.size()) - 1;
  }

 private:
  std::vector<Decision> decisions_;
};

// Cost assigned to a series that never received a decision. Kept out of all
// arithmetic; test with is_no_decision before aggregating.
inline constexpr double kNoDecisionCost = std::numeric_limits<double>::infinity();

inline bool is_no_decision(double cost) {
  return cost == std::numeric_limits<double>::infinity();
}

// Delay cost of deciding at timestep `t` of a series of length
// `series_length`: delay_slope * t / series_length. Requires 1 <= t <= T.
double delay_cost(const CostModel& cost, int t, int series_length);

// Shortest decimal rendering that parses back to the identical double.
// Every float the library writes (CSV, model files) goes through this so
// equal runs produce byte-identical output.
std::string format_double(double value);

// Total cost of a decision sequence against ground truth: misclassification
// of the final label, delay of the final decision time, plus one change cost
// per revision. An empty sequence costs kNoDecisionCost.
double total_cost(const DecisionSequence& sequence, Label truth, const CostModel& cost,
                  int series_length);

}  // namespace ects
