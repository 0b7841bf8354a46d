#include "ects/gamma.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ects {
namespace {

// (count + s) / (total + s * outcomes), with a uniform fallback when both the
// numerator path and smoothing vanish (s = 0 over an empty cell).
double smoothed(double count, double total, double s, int outcomes) {
  const double denom = total + s * outcomes;
  if (denom <= 0.0) return 1.0 / outcomes;
  return (count + s) / denom;
}

// Equal-frequency boundary at quantile q using midpoint interpolation
// between the straddling order statistics.
double quantile_mid(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  const double h = q * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = static_cast<std::size_t>(std::ceil(h));
  return 0.5 * (sorted[lo] + sorted[hi]);
}

void check_checkpoint_range(const GammaModel& model, int checkpoint_idx) {
  if (checkpoint_idx < 0 || checkpoint_idx >= model.checkpoint_count()) {
    throw std::invalid_argument("checkpoint index out of range");
  }
}

int require_valid_label(Label label) {
  if (label != 0 && label != 1) throw std::invalid_argument("label must be 0 or 1");
  return label;
}

}  // namespace

int GroupPartition::group_of(int checkpoint_idx, double confidence) const {
  const auto& b = boundaries[checkpoint_idx];
  return static_cast<int>(std::upper_bound(b.begin(), b.end(), confidence) - b.begin());
}

GammaModel fit_gamma(std::shared_ptr<const ClassifierChain> chain,
                     const std::vector<TimeSeries>& estimation, int group_count,
                     double smoothing) {
  if (!chain || chain->checkpoints.empty()) {
    throw std::invalid_argument("cost estimation requires a fitted classifier chain");
  }
  if (group_count < 1) throw std::invalid_argument("group count must be >= 1");
  if (smoothing < 0.0) throw std::invalid_argument("smoothing must be >= 0");
  if (static_cast<int>(estimation.size()) < group_count) {
    throw std::runtime_error("estimation split smaller than the requested group count");
  }
  for (const auto& s : estimation) {
    if (!s.labeled()) throw std::invalid_argument("estimation series must be labeled");
    if (s.length() != chain->series_length) {
      throw std::invalid_argument("estimation series length does not match the chain");
    }
  }

  const int n_ckpt = chain->checkpoint_count();
  const int n = static_cast<int>(estimation.size());

  // Classifier outputs of every estimation series at every checkpoint.
  std::vector<std::vector<double>> conf(n, std::vector<double>(n_ckpt));
  std::vector<std::vector<Label>> pred(n, std::vector<Label>(n_ckpt));
  for (int e = 0; e < n; ++e) {
    for (int i = 0; i < n_ckpt; ++i) {
      conf[e][i] = predict_confidence(*chain, Prefix{&estimation[e], chain->checkpoints[i]});
      pred[e][i] = predicted_label(conf[e][i]);
    }
  }

  GammaModel model;
  model.chain = std::move(chain);
  model.group_count = group_count;
  model.smoothing = smoothing;
  model.partition.boundaries.resize(n_ckpt);

  std::vector<double> sorted(n);
  for (int i = 0; i < n_ckpt; ++i) {
    for (int e = 0; e < n; ++e) sorted[e] = conf[e][i];
    std::sort(sorted.begin(), sorted.end());
    auto& bounds = model.partition.boundaries[i];
    for (int j = 1; j < group_count; ++j) {
      const double b = quantile_mid(sorted, static_cast<double>(j) / group_count);
      if (bounds.empty() || b != bounds.back()) bounds.push_back(b);
    }
  }

  std::vector<std::vector<int>> grp(n, std::vector<int>(n_ckpt));
  for (int e = 0; e < n; ++e) {
    for (int i = 0; i < n_ckpt; ++i) grp[e][i] = model.partition.group_of(i, conf[e][i]);
  }

  const double s = smoothing;

  model.transitions.matrices.resize(n_ckpt - 1);
  for (int i = 0; i + 1 < n_ckpt; ++i) {
    const int k_from = model.partition.group_count(i);
    const int k_to = model.partition.group_count(i + 1);
    std::vector<std::vector<double>> counts(k_from, std::vector<double>(k_to, 0.0));
    std::vector<double> totals(k_from, 0.0);
    for (int e = 0; e < n; ++e) {
      counts[grp[e][i]][grp[e][i + 1]] += 1.0;
      totals[grp[e][i]] += 1.0;
    }
    auto& m = model.transitions.matrices[i];
    m.assign(k_from, std::vector<double>(k_to, 0.0));
    for (int g = 0; g < k_from; ++g) {
      for (int h = 0; h < k_to; ++h) m[g][h] = smoothed(counts[g][h], totals[g], s, k_to);
    }
  }

  model.stats.priors.resize(n_ckpt);
  model.stats.confusion.resize(n_ckpt);
  for (int i = 0; i < n_ckpt; ++i) {
    const int k = model.partition.group_count(i);
    model.stats.priors[i].assign(k, {0.0, 0.0});
    model.stats.confusion[i].assign(k, {{{0.0, 0.0}, {0.0, 0.0}}});
    for (int g = 0; g < k; ++g) {
      double label_counts[2] = {0.0, 0.0};
      double pred_counts[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
      for (int e = 0; e < n; ++e) {
        if (grp[e][i] != g) continue;
        label_counts[estimation[e].label] += 1.0;
        pred_counts[estimation[e].label][pred[e][i]] += 1.0;
      }
      const double total = label_counts[0] + label_counts[1];
      for (int y = 0; y < 2; ++y) {
        model.stats.priors[i][g][y] = smoothed(label_counts[y], total, s, 2);
        for (int p = 0; p < 2; ++p) {
          model.stats.confusion[i][g][y][p] = smoothed(pred_counts[y][p], label_counts[y], s, 2);
        }
      }
    }
  }

  model.stats.change.resize(n_ckpt);
  for (int i = 0; i < n_ckpt; ++i) {
    const int k = model.partition.group_count(i);
    model.stats.change[i].resize(n_ckpt - 1 - i);
    for (int d = 0; d < n_ckpt - 1 - i; ++d) {
      const int j = i + 1 + d;
      auto& table = model.stats.change[i][d];
      table.assign(k, {{{0.0, 0.0}, {0.0, 0.0}}});
      for (int g = 0; g < k; ++g) {
        double counts[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
        double totals[2] = {0.0, 0.0};
        for (int e = 0; e < n; ++e) {
          if (grp[e][i] != g) continue;
          counts[pred[e][i]][pred[e][j]] += 1.0;
          totals[pred[e][i]] += 1.0;
        }
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) table[g][a][b] = smoothed(counts[a][b], totals[a], s, 2);
        }
      }
    }
  }

  return model;
}

int group_at(const GammaModel& model, const Prefix& prefix) {
  const int idx = model.chain->checkpoint_index(prefix.t);
  return model.partition.group_of(idx, predict_confidence(*model.chain, prefix));
}

std::vector<double> project_group(const GammaModel& model, int checkpoint_idx, int group,
                                  int tau) {
  check_checkpoint_range(model, checkpoint_idx);
  if (tau < 0 || checkpoint_idx + tau >= model.checkpoint_count()) {
    throw std::invalid_argument("projection horizon leaves the checkpoint grid");
  }
  if (group < 0 || group >= model.partition.group_count(checkpoint_idx)) {
    throw std::invalid_argument("group index out of range");
  }
  std::vector<double> pi(model.partition.group_count(checkpoint_idx), 0.0);
  pi[group] = 1.0;
  for (int step = 0; step < tau; ++step) {
    const auto& m = model.transitions.matrices[checkpoint_idx + step];
    std::vector<double> next(m[0].size(), 0.0);
    for (std::size_t g = 0; g < pi.size(); ++g) {
      if (pi[g] == 0.0) continue;
      for (std::size_t h = 0; h < next.size(); ++h) next[h] += pi[g] * m[g][h];
    }
    pi = std::move(next);
  }
  return pi;
}

double expected_misclass_current(const GammaModel& model, int checkpoint_idx, int group,
                                 Label predicted, const CostModel& cost) {
  check_checkpoint_range(model, checkpoint_idx);
  require_valid_label(predicted);
  const auto& prior = model.stats.priors[checkpoint_idx][group];
  return prior[0] * cost.misclass(predicted, 0) + prior[1] * cost.misclass(predicted, 1);
}

double expected_misclass_projected(const GammaModel& model, int checkpoint_idx, int group,
                                   const CostModel& cost) {
  check_checkpoint_range(model, checkpoint_idx);
  const auto& prior = model.stats.priors[checkpoint_idx][group];
  const auto& confusion = model.stats.confusion[checkpoint_idx][group];
  double e = 0.0;
  for (int y = 0; y < 2; ++y) {
    for (int p = 0; p < 2; ++p) e += prior[y] * confusion[y][p] * cost.misclass(p, y);
  }
  return e;
}

namespace {

// Shared curve assembly: values[tau] = misclassification expectation at
// checkpoint i+tau (+ extra terms provided by `extra`) + delay there.
template <typename ExtraFn>
ExpectedCostCurve assemble_curve(const GammaModel& model, int i, int group, Label candidate,
                                 const CostModel& cost, ExtraFn extra) {
  const auto& cks = model.checkpoints();
  const int n_ckpt = model.checkpoint_count();
  const int series_length = model.series_length();

  ExpectedCostCurve curve;
  curve.values.reserve(n_ckpt - i);
  curve.values.push_back(expected_misclass_current(model, i, group, candidate, cost) +
                         extra(0) + delay_cost(cost, cks[i], series_length));

  std::vector<double> pi(model.partition.group_count(i), 0.0);
  pi[group] = 1.0;
  for (int j = i + 1; j < n_ckpt; ++j) {
    const auto& m = model.transitions.matrices[j - 1];
    std::vector<double> next(m[0].size(), 0.0);
    for (std::size_t g = 0; g < pi.size(); ++g) {
      if (pi[g] == 0.0) continue;
      for (std::size_t h = 0; h < next.size(); ++h) next[h] += pi[g] * m[g][h];
    }
    pi = std::move(next);
    double mis = 0.0;
    for (std::size_t g = 0; g < pi.size(); ++g) {
      mis += pi[g] * expected_misclass_projected(model, j, static_cast<int>(g), cost);
    }
    curve.values.push_back(mis + extra(j - i) + delay_cost(cost, cks[j], series_length));
  }

  curve.argmin = 0;
  for (std::size_t t = 1; t < curve.values.size(); ++t) {
    if (curve.values[t] < curve.values[curve.argmin]) curve.argmin = static_cast<int>(t);
  }
  return curve;
}

}  // namespace

ExpectedCostCurve expected_cost_curve_at(const GammaModel& model, int checkpoint_idx, int group,
                                         Label predicted, const CostModel& cost) {
  check_checkpoint_range(model, checkpoint_idx);
  return assemble_curve(model, checkpoint_idx, group, predicted, cost, [](int) { return 0.0; });
}

ExpectedCostCurve expected_cost_curve(const GammaModel& model, const Prefix& prefix,
                                      const CostModel& cost) {
  const int idx = model.chain->checkpoint_index(prefix.t);
  const double confidence = predict_confidence(*model.chain, prefix);
  const int group = model.partition.group_of(idx, confidence);
  return expected_cost_curve_at(model, idx, group, predicted_label(confidence), cost);
}

double expected_change_cost_at(const GammaModel& model, int checkpoint_idx, int group,
                               Label last_label, int tau, const CostModel& cost) {
  check_checkpoint_range(model, checkpoint_idx);
  require_valid_label(last_label);
  if (tau < 0 || checkpoint_idx + tau >= model.checkpoint_count()) {
    throw std::invalid_argument("change-cost horizon leaves the checkpoint grid");
  }
  if (tau == 0) return 0.0;
  const auto& table = model.stats.change[checkpoint_idx][tau - 1][group];
  return cost.change_cost * table[last_label][1 - last_label];
}

double expected_change_cost(const GammaModel& model, const Prefix& prefix, Label last_label,
                            int tau, const CostModel& cost) {
  const int idx = model.chain->checkpoint_index(prefix.t);
  const int group = model.partition.group_of(idx, predict_confidence(*model.chain, prefix));
  return expected_change_cost_at(model, idx, group, last_label, tau, cost);
}

ExpectedCostCurve revocable_cost_curve_at(const GammaModel& model, int checkpoint_idx,
                                          int group, Label candidate, Label last_label,
                                          double paid_change_cost, const CostModel& cost) {
  check_checkpoint_range(model, checkpoint_idx);
  require_valid_label(candidate);
  return assemble_curve(model, checkpoint_idx, group, candidate, cost, [&](int tau) {
    return paid_change_cost +
           expected_change_cost_at(model, checkpoint_idx, group, last_label, tau, cost);
  });
}

ExpectedCostCurve revocable_cost_curve(const GammaModel& model, const Prefix& prefix,
                                       const DecisionSequence& sequence, const CostModel& cost) {
  const int idx = model.chain->checkpoint_index(prefix.t);
  const double confidence = predict_confidence(*model.chain, prefix);
  const int group = model.partition.group_of(idx, confidence);
  const Label candidate = predicted_label(confidence);
  const Label last = sequence.empty() ? candidate : sequence.back().label;
  const double paid = cost.change_cost * sequence.change_count();
  return revocable_cost_curve_at(model, idx, group, candidate, last, paid, cost);
}

}  // namespace ects
