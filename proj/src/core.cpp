#include "ects/core.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace ects {

double CostModel::max_misclass() const {
  double m = 0.0;
  for (const auto& row : misclassification) {
    for (double v : row) m = std::max(m, v);
  }
  return m;
}

void CostModel::validate() const {
  for (const auto& row : misclassification) {
    for (double v : row) {
      if (!std::isfinite(v) || v < 0.0) {
        throw std::invalid_argument("cost model: misclassification entries must be finite and >= 0");
      }
    }
  }
  if (!std::isfinite(delay_slope) || delay_slope < 0.0) {
    throw std::invalid_argument("cost model: delay slope must be finite and >= 0");
  }
  if (!std::isfinite(change_cost) || change_cost < 0.0) {
    throw std::invalid_argument("cost model: change cost must be finite and >= 0");
  }
}

bool DecisionSequence::append(int time, Label label) {
  if (label != 0 && label != 1) {
    throw std::invalid_argument("decision label must be 0 or 1, got " + std::to_string(label));
  }
  if (!decisions_.empty()) {
    if (time <= decisions_.back().time) {
      throw std::invalid_argument("decision times must increase strictly: " +
                                  std::to_string(time) + " after " +
                                  std::to_string(decisions_.back().time));
    }
    if (label == decisions_.back().label) return false;
  }
  decisions_.push_back({time, label});
  return true;
}

std::string format_double(double value) {
  char buf[64];
  // Shortest precision whose parse recovers the identical double; 17
  // significant digits always do, so the fallthrough result is exact too.
  for (int precision = 15; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof(buf), "%.*g", precision, value);
    if (std::strtod(buf, nullptr) == value) break;
  }
  return buf;
}

double delay_cost(const CostModel& cost, int t, int series_length) {
  if (series_length < 1) {
    throw std::invalid_argument("series length must be >= 1");
  }
  if (t < 1 || t > series_length) {
    throw std::invalid_argument("decision time " + std::to_string(t) +
                                " outside [1, " + std::to_string(series_length) + "]");
  }
  return cost.delay_slope * static_cast<double>(t) / static_cast<double>(series_length);
}

double total_cost(const DecisionSequence& sequence, Label truth, const CostModel& cost,
                  int series_length) {
  if (truth != 0 && truth != 1) {
    throw std::invalid_argument("ground truth label must be 0 or 1");
  }
  if (sequence.empty()) return kNoDecisionCost;
  const auto& ds = sequence.decisions();
  double c = cost.misclass(ds.back().label, truth) + delay_cost(cost, ds.back().time, series_length);
  for (std::size_t i = 1; i < ds.size(); ++i) {
    c += cost.change(ds[i].label, ds[i - 1].label);
  }
  return c;
}

}  // namespace ects
