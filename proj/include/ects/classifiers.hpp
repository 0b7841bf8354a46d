#pragma once

#include <vector>

#include "ects/core.hpp"
#include "ects/features.hpp"

namespace ects {

// Training knobs of the per-checkpoint probabilistic classifiers.
struct ClassifierConfig {
  double learning_rate = 0.1;
  int iterations = 300;
  double l2_penalty = 1e-3;  // not applied to the bias
};

// Anything that maps a feature vector to P(label == 1). The chain below uses
// logistic models; alternative learners only need this surface.
class ProbabilisticClassifier {
 public:
  virtual ~ProbabilisticClassifier() = default;
  virtual double predict_proba(const FeatureVector& features) const = 0;
};

// L2-regularized logistic regression trained by full-batch gradient descent
// from zero-initialized weights. Deterministic: no sampling anywhere.
class LogisticModel final : public ProbabilisticClassifier {
 public:
  LogisticModel() = default;
  LogisticModel(std::vector<double> weights, double bias);

  void fit(const std::vector<FeatureVector>& features, const std::vector<Label>& labels,
           const ClassifierConfig& config);
  double predict_proba(const FeatureVector& features) const override;

  const std::vector<double>& weights() const { return weights_; }
  double bias() const { return bias_; }

 private:
  std::vector<double> weights_;
  double bias_ = 0.0;
};

// Per-feature affine normalization fitted on training data. Constant
// features keep scale 1 so transforming never divides by zero.
struct Standardizer {
  std::vector<double> means;
  std::vector<double> scales;

  void fit(const std::vector<FeatureVector>& features);
  FeatureVector transform(const FeatureVector& features) const;
};

// One classifier per checkpoint, each trained only on prefixes truncated to
// its own checkpoint, so no model ever sees past its timestep.
struct ClassifierChain {
  std::vector<int> checkpoints;  // strictly increasing timesteps; last == series_length
  int series_length = 0;
  std::vector<Standardizer> standardizers;  // one per checkpoint
  std::vector<LogisticModel> models;        // one per checkpoint

  int checkpoint_count() const { return static_cast<int>(checkpoints.size()); }
  // Index of the checkpoint at timestep t; throws std::invalid_argument when
  // t is not a checkpoint.
  int checkpoint_index(int t) const;
};

// Trains the chain on labeled series of a common length. Throws
// std::invalid_argument on malformed inputs (unlabeled series, mixed lengths,
// bad checkpoint grid) and std::runtime_error when either class has fewer
// than 2 examples.
ClassifierChain fit_chain(const std::vector<TimeSeries>& train,
                          const std::vector<int>& checkpoints,
                          const ClassifierConfig& config = {});

// P(label == 1) for a prefix whose length is one of the chain's checkpoints;
// throws std::invalid_argument otherwise.
double predict_confidence(const ClassifierChain& chain, const Prefix& prefix);

// Confidence >= 0.5 maps to class 1 (the exact tie goes to 1).
inline Label predicted_label(double confidence) { return confidence >= 0.5 ? 1 : 0; }

}  // namespace ects
