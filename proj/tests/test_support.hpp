#pragma once

// Shared fixtures and independent re-implementations ("oracles") used to
// cross-check the library. The oracles intentionally recompute everything
// with plain loops instead of calling into the production code paths.

#include <array>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "ects/classifiers.hpp"
#include "ects/data.hpp"
#include "ects/gamma.hpp"
#include "ects/rng.hpp"
#include "ects/trigger.hpp"

namespace ects::test {

// Scratch directory for file-based tests.
inline std::string scratch_dir() {
  static const std::string dir = [] {
    auto p = std::filesystem::temp_directory_path() / "ects_unit_scratch";
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p.string();
  }();
  return dir;
}

// Chain with checkpoints 1..n over series of length n whose classifiers are
// never invoked; usable by every path-based API.
inline std::shared_ptr<const ClassifierChain> dummy_chain(int n_checkpoints) {
  auto chain = std::make_shared<ClassifierChain>();
  chain->series_length = n_checkpoints;
  for (int i = 1; i <= n_checkpoints; ++i) chain->checkpoints.push_back(i);
  return chain;
}

// Hand-built model with two confidence groups (boundary 0.5): group 0
// believes label 0 and group 1 believes label 1 with probability
// `prior_strength`; per-checkpoint accuracy `acc[i]` symmetric across
// classes; identity group transitions; symmetric prediction-flip probability
// `flip_prob` at every horizon.
inline GammaModel two_group_model(double prior_strength, const std::vector<double>& acc,
                                  double flip_prob) {
  const int n = static_cast<int>(acc.size());
  GammaModel m;
  m.chain = dummy_chain(n);
  m.group_count = 2;
  m.smoothing = 0.0;
  m.partition.boundaries.assign(n, {0.5});
  m.transitions.matrices.assign(n - 1, {{1.0, 0.0}, {0.0, 1.0}});
  m.stats.priors.resize(n);
  m.stats.confusion.resize(n);
  m.stats.change.resize(n);
  for (int i = 0; i < n; ++i) {
    m.stats.priors[i] = {std::array<double, 2>{prior_strength, 1.0 - prior_strength},
                         std::array<double, 2>{1.0 - prior_strength, prior_strength}};
    const std::array<std::array<double, 2>, 2> conf = {{{acc[i], 1.0 - acc[i]},
                                                        {1.0 - acc[i], acc[i]}}};
    m.stats.confusion[i] = {conf, conf};
    m.stats.change[i].resize(n - 1 - i);
    const std::array<std::array<double, 2>, 2> flip = {{{1.0 - flip_prob, flip_prob},
                                                        {flip_prob, 1.0 - flip_prob}}};
    for (int d = 0; d < n - 1 - i; ++d) m.stats.change[i][d] = {flip, flip};
  }
  return m;
}

// Path fixture: per-checkpoint confidences; predictions and groups derived
// the same way the production path computation derives them.
inline SeriesPath path_from_confidences(const std::vector<double>& conf) {
  SeriesPath p;
  p.confidence = conf;
  for (double c : conf) {
    p.predicted.push_back(c >= 0.5 ? 1 : 0);
    p.group.push_back(c >= 0.5 ? 1 : 0);
  }
  return p;
}

// ---------------------------------------------------------------------------
// Independent frequency recount of every table a fitted model carries.
// ---------------------------------------------------------------------------

struct RecountedTables {
  std::vector<std::vector<double>> boundaries;
  std::vector<std::vector<std::vector<double>>> transitions;
  std::vector<std::vector<std::array<double, 2>>> priors;
  std::vector<std::vector<std::array<std::array<double, 2>, 2>>> confusion;
  std::vector<std::vector<std::vector<std::array<std::array<double, 2>, 2>>>> change;
};

inline RecountedTables brute_force_tables(const ClassifierChain& chain,
                                          const std::vector<TimeSeries>& estimation,
                                          int group_count, double smoothing) {
  const int n_ckpt = chain.checkpoint_count();
  const int n = static_cast<int>(estimation.size());

  std::vector<std::vector<double>> conf(n, std::vector<double>(n_ckpt));
  std::vector<std::vector<int>> pred(n, std::vector<int>(n_ckpt));
  for (int e = 0; e < n; ++e) {
    for (int i = 0; i < n_ckpt; ++i) {
      conf[e][i] = predict_confidence(chain, Prefix{&estimation[e], chain.checkpoints[i]});
      pred[e][i] = conf[e][i] >= 0.5 ? 1 : 0;
    }
  }

  RecountedTables out;
  out.boundaries.resize(n_ckpt);
  for (int i = 0; i < n_ckpt; ++i) {
    std::vector<double> sorted;
    for (int e = 0; e < n; ++e) sorted.push_back(conf[e][i]);
    // insertion sort: independent of std::sort
    for (std::size_t a = 1; a < sorted.size(); ++a) {
      const double v = sorted[a];
      std::size_t b = a;
      while (b > 0 && sorted[b - 1] > v) {
        sorted[b] = sorted[b - 1];
        --b;
      }
      sorted[b] = v;
    }
    for (int j = 1; j < group_count; ++j) {
      const double h = static_cast<double>(j) / group_count * (n - 1);
      const double lo = sorted[static_cast<int>(std::floor(h))];
      const double hi = sorted[static_cast<int>(std::ceil(h))];
      const double b = 0.5 * (lo + hi);
      if (out.boundaries[i].empty() || out.boundaries[i].back() != b) {
        out.boundaries[i].push_back(b);
      }
    }
  }

  const auto group_of = [&](int i, double c) {
    int g = 0;
    for (double b : out.boundaries[i]) {
      if (b <= c) ++g;
    }
    return g;
  };
  const auto k_of = [&](int i) { return static_cast<int>(out.boundaries[i].size()) + 1; };
  const auto smooth = [smoothing](double count, double total, int outcomes) {
    const double denom = total + smoothing * outcomes;
    if (denom <= 0.0) return 1.0 / outcomes;
    return (count + smoothing) / denom;
  };

  std::vector<std::vector<int>> grp(n, std::vector<int>(n_ckpt));
  for (int e = 0; e < n; ++e) {
    for (int i = 0; i < n_ckpt; ++i) grp[e][i] = group_of(i, conf[e][i]);
  }

  out.transitions.resize(n_ckpt - 1);
  for (int i = 0; i + 1 < n_ckpt; ++i) {
    out.transitions[i].assign(k_of(i), std::vector<double>(k_of(i + 1), 0.0));
    for (int g = 0; g < k_of(i); ++g) {
      for (int h = 0; h < k_of(i + 1); ++h) {
        double count = 0.0, total = 0.0;
        for (int e = 0; e < n; ++e) {
          if (grp[e][i] != g) continue;
          total += 1.0;
          if (grp[e][i + 1] == h) count += 1.0;
        }
        out.transitions[i][g][h] = smooth(count, total, k_of(i + 1));
      }
    }
  }

  out.priors.resize(n_ckpt);
  out.confusion.resize(n_ckpt);
  for (int i = 0; i < n_ckpt; ++i) {
    out.priors[i].assign(k_of(i), {0.0, 0.0});
    out.confusion[i].assign(k_of(i), {{{0.0, 0.0}, {0.0, 0.0}}});
    for (int g = 0; g < k_of(i); ++g) {
      for (int y = 0; y < 2; ++y) {
        double count = 0.0, total = 0.0;
        for (int e = 0; e < n; ++e) {
          if (grp[e][i] != g) continue;
          total += 1.0;
          if (estimation[e].label == y) count += 1.0;
        }
        out.priors[i][g][y] = smooth(count, total, 2);
        for (int p = 0; p < 2; ++p) {
          double pc = 0.0, pt = 0.0;
          for (int e = 0; e < n; ++e) {
            if (grp[e][i] != g || estimation[e].label != y) continue;
            pt += 1.0;
            if (pred[e][i] == p) pc += 1.0;
          }
          out.confusion[i][g][y][p] = smooth(pc, pt, 2);
        }
      }
    }
  }

  out.change.resize(n_ckpt);
  for (int i = 0; i < n_ckpt; ++i) {
    out.change[i].resize(n_ckpt - 1 - i);
    for (int d = 0; d + i + 1 < n_ckpt; ++d) {
      const int j = i + 1 + d;
      out.change[i][d].assign(k_of(i), {{{0.0, 0.0}, {0.0, 0.0}}});
      for (int g = 0; g < k_of(i); ++g) {
        for (int a = 0; a < 2; ++a) {
          for (int b = 0; b < 2; ++b) {
            double count = 0.0, total = 0.0;
            for (int e = 0; e < n; ++e) {
              if (grp[e][i] != g || pred[e][i] != a) continue;
              total += 1.0;
              if (pred[e][j] == b) count += 1.0;
            }
            out.change[i][d][g][a][b] = smooth(count, total, 2);
          }
        }
      }
    }
  }
  return out;
}

// Largest absolute difference between the recounted tables and a model's.
inline double max_table_difference(const RecountedTables& a, const GammaModel& m) {
  double worst = 0.0;
  const auto track = [&worst](double x, double y) {
    const double d = std::fabs(x - y);
    if (d > worst) worst = d;
  };
  const int n_ckpt = m.checkpoint_count();
  for (int i = 0; i < n_ckpt; ++i) {
    if (a.boundaries[i].size() != m.partition.boundaries[i].size()) return 1.0;
    for (std::size_t j = 0; j < a.boundaries[i].size(); ++j) {
      track(a.boundaries[i][j], m.partition.boundaries[i][j]);
    }
  }
  for (int i = 0; i + 1 < n_ckpt; ++i) {
    for (std::size_t g = 0; g < a.transitions[i].size(); ++g) {
      for (std::size_t h = 0; h < a.transitions[i][g].size(); ++h) {
        track(a.transitions[i][g][h], m.transitions.matrices[i][g][h]);
      }
    }
  }
  for (int i = 0; i < n_ckpt; ++i) {
    for (std::size_t g = 0; g < a.priors[i].size(); ++g) {
      for (int y = 0; y < 2; ++y) {
        track(a.priors[i][g][y], m.stats.priors[i][g][y]);
        for (int p = 0; p < 2; ++p) {
          track(a.confusion[i][g][y][p], m.stats.confusion[i][g][y][p]);
        }
      }
    }
    for (std::size_t d = 0; d < a.change[i].size(); ++d) {
      for (std::size_t g = 0; g < a.change[i][d].size(); ++g) {
        for (int x = 0; x < 2; ++x) {
          for (int y = 0; y < 2; ++y) {
            track(a.change[i][d][g][x][y], m.stats.change[i][d][g][x][y]);
          }
        }
      }
    }
  }
  return worst;
}

// ---------------------------------------------------------------------------
// Statistics oracles.
// ---------------------------------------------------------------------------

// Two-sided Wilcoxon signed-rank p-value by full enumeration of the 2^n sign
// assignments. Zero differences dropped, mid-ranks for ties.
inline double wilcoxon_enumeration_p(const std::vector<double>& first,
                                     const std::vector<double>& second) {
  std::vector<double> mags;
  std::vector<int> signs;
  for (std::size_t i = 0; i < first.size(); ++i) {
    const double d = first[i] - second[i];
    if (d == 0.0) continue;
    mags.push_back(std::fabs(d));
    signs.push_back(d > 0.0 ? 1 : -1);
  }
  const int n = static_cast<int>(mags.size());
  if (n == 0) return 1.0;
  std::vector<double> ranks(n);
  for (int i = 0; i < n; ++i) {
    int less = 0, equal = 0;
    for (int j = 0; j < n; ++j) {
      if (mags[j] < mags[i]) ++less;
      if (mags[j] == mags[i]) ++equal;
    }
    ranks[i] = less + (equal + 1) / 2.0;  // mid-rank
  }
  double w_obs = 0.0;
  for (int i = 0; i < n; ++i) {
    if (signs[i] > 0) w_obs += ranks[i];
  }
  long long below = 0, above = 0;
  const long long total = 1LL << n;
  for (long long mask = 0; mask < total; ++mask) {
    double w = 0.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1LL << i)) w += ranks[i];
    }
    if (w <= w_obs + 1e-12) ++below;
    if (w >= w_obs - 1e-12) ++above;
  }
  const double p = 2.0 * static_cast<double>(std::min(below, above)) / static_cast<double>(total);
  return p < 1.0 ? p : 1.0;
}

// Cohen's kappa from a 2x2 contingency table, closed form.
inline double kappa_closed_form(double n00, double n01, double n10, double n11) {
  const double n = n00 + n01 + n10 + n11;
  const double po = (n00 + n11) / n;
  const double pe = ((n00 + n01) * (n00 + n10) + (n10 + n11) * (n01 + n11)) / (n * n);
  if (pe >= 1.0) return 0.0;
  return (po - pe) / (1.0 - pe);
}

// Cheapest decision sequence a checkpoint-driven strategy could have
// emitted: labels are the chain's predictions, times any nonempty checkpoint
// subset. Exhaustive over all 2^m - 1 subsets.
inline double best_emittable_cost(const std::vector<int>& checkpoints,
                                  const std::vector<Label>& predicted, Label truth,
                                  const CostModel& cost, int series_length) {
  const int m = static_cast<int>(checkpoints.size());
  double best = kNoDecisionCost;
  for (unsigned mask = 1; mask < (1u << m); ++mask) {
    DecisionSequence seq;
    for (int i = 0; i < m; ++i) {
      if (mask & (1u << i)) seq.append(checkpoints[i], predicted[i]);
    }
    const double c = total_cost(seq, truth, cost, series_length);
    if (c < best) best = c;
  }
  return best;
}

// Small labeled corpus with a learnable signal, for fit-based tests.
inline Dataset tiny_corpus(int n_series, int length, double gap, std::uint64_t seed,
                           double flip_prob = 0.0) {
  SyntheticSpec spec;
  spec.name = "tiny";
  spec.n_series = n_series;
  spec.series_length = length;
  spec.gap = gap;
  spec.noise = 0.8;
  spec.ar_coeff = 0.3;
  if (flip_prob > 0.0) {
    spec.flip_frac = 0.35;
    spec.flip_prob = flip_prob;
  }
  return generate_synthetic(spec, seed);
}

}  // namespace ects::test
