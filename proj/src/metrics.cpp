#include "ects/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ects {
namespace {

void check_traces(const std::vector<RunTrace>& traces) {
  if (traces.empty()) throw std::invalid_argument("no traces to aggregate");
  for (const auto& t : traces) {
    if (t.sequence.empty()) {
      throw std::invalid_argument("a trace carries no decision; replays must always decide");
    }
  }
}

// Mid-ranks of |values|, ties averaged.
std::vector<double> midranks(const std::vector<double>& magnitudes) {
  const std::size_t n = magnitudes.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(),
            [&](std::size_t a, std::size_t b) { return magnitudes[a] < magnitudes[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && magnitudes[order[j + 1]] == magnitudes[order[i]]) ++j;
    const double shared = (static_cast<double>(i + 1) + static_cast<double>(j + 1)) / 2.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = shared;
    i = j + 1;
  }
  return ranks;
}

// Exact two-sided p-value of W+ = `w_plus` given the rank multiset, by
// dynamic programming over doubled ranks (mid-ranks are multiples of 1/2, so
// doubling makes every rank integral). Counts fit doubles exactly up to the
// 25-pair limit (2^25 subsets).
double exact_wilcoxon_p(const std::vector<double>& ranks, double w_plus) {
  long long total2 = 0;
  std::vector<long long> r2(ranks.size());
  for (std::size_t i = 0; i < ranks.size(); ++i) {
    r2[i] = std::llround(2.0 * ranks[i]);
    total2 += r2[i];
  }
  std::vector<double> count(static_cast<std::size_t>(total2) + 1, 0.0);
  count[0] = 1.0;
  for (long long r : r2) {
    for (long long w = total2; w >= r; --w) {
      count[static_cast<std::size_t>(w)] += count[static_cast<std::size_t>(w - r)];
    }
  }
  const double denom = std::pow(2.0, static_cast<double>(ranks.size()));
  const long long w2 = std::llround(2.0 * w_plus);
  double below = 0.0, above = 0.0;
  for (long long w = 0; w <= total2; ++w) {
    if (w <= w2) below += count[static_cast<std::size_t>(w)];
    if (w >= w2) above += count[static_cast<std::size_t>(w)];
  }
  return std::min(1.0, 2.0 * std::min(below, above) / denom);
}

double normal_two_sided_p(double z) { return std::erfc(std::fabs(z) / std::sqrt(2.0)); }

}  // namespace

double avg_cost(const std::vector<RunTrace>& traces, const std::vector<Label>& truths,
                const CostModel& cost, int series_length) {
  check_traces(traces);
  if (truths.size() != traces.size()) {
    throw std::invalid_argument("traces and truths must be aligned");
  }
  double sum = 0.0;
  for (std::size_t e = 0; e < traces.size(); ++e) {
    sum += total_cost(traces[e].sequence, truths[e], cost, series_length);
  }
  return sum / static_cast<double>(traces.size());
}

double earliness(const std::vector<RunTrace>& traces, int series_length) {
  check_traces(traces);
  if (series_length < 1) throw std::invalid_argument("series length must be >= 1");
  double sum = 0.0;
  for (const auto& t : traces) {
    sum += static_cast<double>(t.sequence.back().time) / static_cast<double>(series_length);
  }
  return sum / static_cast<double>(traces.size());
}

double mean_revocations(const std::vector<RunTrace>& traces) {
  check_traces(traces);
  double sum = 0.0;
  for (const auto& t : traces) sum += t.sequence.change_count();
  return sum / static_cast<double>(traces.size());
}

double cohen_kappa(const std::vector<Label>& predictions, const std::vector<Label>& truths) {
  if (predictions.empty() || predictions.size() != truths.size()) {
    throw std::invalid_argument("predictions and truths must be non-empty and aligned");
  }
  const double n = static_cast<double>(predictions.size());
  double table[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if ((predictions[i] != 0 && predictions[i] != 1) || (truths[i] != 0 && truths[i] != 1)) {
      throw std::invalid_argument("labels must be 0 or 1");
    }
    table[predictions[i]][truths[i]] += 1.0;
  }
  const double p_observed = (table[0][0] + table[1][1]) / n;
  const double pred_marginal[2] = {(table[0][0] + table[0][1]) / n, (table[1][0] + table[1][1]) / n};
  const double true_marginal[2] = {(table[0][0] + table[1][0]) / n, (table[0][1] + table[1][1]) / n};
  const double p_expected = pred_marginal[0] * true_marginal[0] + pred_marginal[1] * true_marginal[1];
  if (p_expected >= 1.0) return 0.0;
  return (p_observed - p_expected) / (1.0 - p_expected);
}

EvalSummary summarize(const std::vector<RunTrace>& traces, const std::vector<Label>& truths,
                      const CostModel& cost, int series_length) {
  EvalSummary s;
  s.avg_cost = avg_cost(traces, truths, cost, series_length);
  s.earliness = earliness(traces, series_length);
  s.mean_revocations = mean_revocations(traces);
  std::vector<Label> finals;
  finals.reserve(traces.size());
  for (const auto& t : traces) finals.push_back(t.sequence.back().label);
  s.kappa = cohen_kappa(finals, truths);
  return s;
}

char verdict_symbol(Verdict v) {
  switch (v) {
    case Verdict::kPlus: return '+';
    case Verdict::kCircle: return 'o';
    case Verdict::kMinus: return '-';
  }
  return '?';
}

TestVerdict wilcoxon_signed_rank(const std::vector<double>& first,
                                 const std::vector<double>& second, double significance) {
  if (first.empty() || first.size() != second.size()) {
    throw std::invalid_argument("paired samples must be non-empty and aligned");
  }
  TestVerdict result;

  std::vector<double> diffs;
  diffs.reserve(first.size());
  for (std::size_t i = 0; i < first.size(); ++i) {
    const double d = first[i] - second[i];
    if (d != 0.0) diffs.push_back(d);
  }
  result.n_effective = static_cast<int>(diffs.size());
  if (diffs.empty()) {
    result.diagnostic = "all paired differences are zero";
    return result;
  }

  std::vector<double> magnitudes(diffs.size());
  for (std::size_t i = 0; i < diffs.size(); ++i) magnitudes[i] = std::fabs(diffs[i]);
  const std::vector<double> ranks = midranks(magnitudes);

  double w_plus = 0.0, w_minus = 0.0;
  for (std::size_t i = 0; i < diffs.size(); ++i) {
    (diffs[i] > 0.0 ? w_plus : w_minus) += ranks[i];
  }
  result.statistic = std::min(w_plus, w_minus);

  const std::size_t n = diffs.size();
  constexpr std::size_t kExactLimit = 25;
  if (n <= kExactLimit) {
    result.p_value = exact_wilcoxon_p(ranks, w_plus);
  } else {
    // Normal approximation with tie and continuity corrections.
    double tie_term = 0.0;
    {
      std::vector<double> sorted = magnitudes;
      std::sort(sorted.begin(), sorted.end());
      std::size_t i = 0;
      while (i < sorted.size()) {
        std::size_t j = i;
        while (j + 1 < sorted.size() && sorted[j + 1] == sorted[i]) ++j;
        const double t = static_cast<double>(j - i + 1);
        tie_term += t * t * t - t;
        i = j + 1;
      }
    }
    const double nd = static_cast<double>(n);
    const double mu = nd * (nd + 1.0) / 4.0;
    const double sigma2 = nd * (nd + 1.0) * (2.0 * nd + 1.0) / 24.0 - tie_term / 48.0;
    if (sigma2 <= 0.0) {
      result.diagnostic = "degenerate rank variance";
      return result;
    }
    double centered = w_plus - mu;
    if (centered > 0.5) centered -= 0.5;
    else if (centered < -0.5) centered += 0.5;
    else centered = 0.0;
    result.p_value = normal_two_sided_p(centered / std::sqrt(sigma2));
  }

  if (result.p_value < significance) {
    // Direction: median nonzero difference; exact-zero median falls back to
    // the rank sums. Antisymmetric under swapping the samples.
    std::vector<double> sorted_diffs = diffs;
    std::sort(sorted_diffs.begin(), sorted_diffs.end());
    const std::size_t half = sorted_diffs.size() / 2;
    const double median = sorted_diffs.size() % 2 == 1
                              ? sorted_diffs[half]
                              : 0.5 * (sorted_diffs[half - 1] + sorted_diffs[half]);
    double direction = median;
    if (direction == 0.0) direction = w_plus - w_minus;
    result.verdict = direction < 0.0 ? Verdict::kPlus : Verdict::kMinus;
  }
  return result;
}

FriedmanResult friedman_ranks(const std::vector<std::vector<double>>& scores) {
  const std::size_t k = scores.size();
  if (k < 2) throw std::invalid_argument("mean ranks need at least 2 strategies");
  const std::size_t blocks = scores[0].size();
  if (blocks < 2) throw std::invalid_argument("mean ranks need at least 2 blocks");
  for (const auto& row : scores) {
    if (row.size() != blocks) throw std::invalid_argument("ragged score matrix");
  }

  FriedmanResult result;
  result.mean_ranks.assign(k, 0.0);
  for (std::size_t b = 0; b < blocks; ++b) {
    std::vector<double> column(k);
    for (std::size_t s = 0; s < k; ++s) column[s] = scores[s][b];
    const std::vector<double> ranks = midranks(column);
    for (std::size_t s = 0; s < k; ++s) result.mean_ranks[s] += ranks[s];
  }
  for (double& r : result.mean_ranks) r /= static_cast<double>(blocks);

  const double nd = static_cast<double>(blocks);
  const double kd = static_cast<double>(k);
  double sum_sq = 0.0;
  for (double r : result.mean_ranks) sum_sq += r * r;
  result.chi_square = 12.0 * nd / (kd * (kd + 1.0)) * sum_sq - 3.0 * nd * (kd + 1.0);
  return result;
}

}  // namespace ects
