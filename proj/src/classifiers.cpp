#include "ects/classifiers.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace ects {
namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

void check_checkpoints(const std::vector<int>& checkpoints, int series_length) {
  if (checkpoints.empty()) throw std::invalid_argument("checkpoint grid is empty");
  int prev = 0;
  for (int c : checkpoints) {
    if (c <= prev) throw std::invalid_argument("checkpoints must be strictly increasing and >= 1");
    prev = c;
  }
  if (checkpoints.back() != series_length) {
    throw std::invalid_argument("last checkpoint must equal the series length");
  }
}

}  // namespace

LogisticModel::LogisticModel(std::vector<double> weights, double bias)
    : weights_(std::move(weights)), bias_(bias) {}

void LogisticModel::fit(const std::vector<FeatureVector>& features,
                        const std::vector<Label>& labels, const ClassifierConfig& config) {
  if (features.empty() || features.size() != labels.size()) {
    throw std::invalid_argument("feature/label sizes mismatch or empty training set");
  }
  const std::size_t n = features.size();
  const std::size_t dim = features[0].size();
  weights_.assign(dim, 0.0);
  bias_ = 0.0;

  std::vector<double> grad(dim);
  for (int it = 0; it < config.iterations; ++it) {
    std::fill(grad.begin(), grad.end(), 0.0);
    double grad_bias = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double z = bias_;
      for (std::size_t d = 0; d < dim; ++d) z += weights_[d] * features[i][d];
      const double err = sigmoid(z) - static_cast<double>(labels[i]);
      for (std::size_t d = 0; d < dim; ++d) grad[d] += err * features[i][d];
      grad_bias += err;
    }
    for (std::size_t d = 0; d < dim; ++d) {
      grad[d] = grad[d] / n + config.l2_penalty * weights_[d];
      weights_[d] -= config.learning_rate * grad[d];
    }
    bias_ -= config.learning_rate * grad_bias / n;
  }
}

double LogisticModel::predict_proba(const FeatureVector& features) const {
  if (features.size() != weights_.size()) {
    throw std::invalid_argument("feature vector length does not match the model");
  }
  double z = bias_;
  for (std::size_t d = 0; d < features.size(); ++d) z += weights_[d] * features[d];
  return sigmoid(z);
}

void Standardizer::fit(const std::vector<FeatureVector>& features) {
  if (features.empty()) throw std::invalid_argument("cannot standardize an empty set");
  const std::size_t dim = features[0].size();
  means.assign(dim, 0.0);
  scales.assign(dim, 1.0);
  for (const auto& f : features) {
    for (std::size_t d = 0; d < dim; ++d) means[d] += f[d];
  }
  for (std::size_t d = 0; d < dim; ++d) means[d] /= features.size();
  for (std::size_t d = 0; d < dim; ++d) {
    double s = 0.0;
    for (const auto& f : features) {
      const double diff = f[d] - means[d];
      s += diff * diff;
    }
    const double sd = std::sqrt(s / features.size());
    scales[d] = sd > 1e-12 ? sd : 1.0;
  }
}

FeatureVector Standardizer::transform(const FeatureVector& features) const {
  if (features.size() != means.size()) {
    throw std::invalid_argument("feature vector length does not match the standardizer");
  }
  FeatureVector out(features.size());
  for (std::size_t d = 0; d < features.size(); ++d) {
    out[d] = (features[d] - means[d]) / scales[d];
  }
  return out;
}

int ClassifierChain::checkpoint_index(int t) const {
  const auto it = std::lower_bound(checkpoints.begin(), checkpoints.end(), t);
  if (it == checkpoints.end() || *it != t) {
    throw std::invalid_argument("timestep " + std::to_string(t) + " is not a chain checkpoint");
  }
  return static_cast<int>(it - checkpoints.begin());
}

ClassifierChain fit_chain(const std::vector<TimeSeries>& train,
                          const std::vector<int>& checkpoints, const ClassifierConfig& config) {
  if (train.empty()) throw std::invalid_argument("empty training set");
  const int series_length = train[0].length();
  int class_counts[2] = {0, 0};
  for (const auto& s : train) {
    if (!s.labeled()) throw std::invalid_argument("training series must be labeled");
    if (s.length() != series_length) {
      throw std::invalid_argument("training series must share a common length");
    }
    ++class_counts[s.label];
  }
  if (class_counts[0] < 2 || class_counts[1] < 2) {
    throw std::runtime_error("training requires at least 2 examples of each class");
  }
  check_checkpoints(checkpoints, series_length);

  ClassifierChain chain;
  chain.checkpoints = checkpoints;
  chain.series_length = series_length;
  chain.standardizers.resize(checkpoints.size());
  chain.models.resize(checkpoints.size());

  std::vector<Label> labels;
  labels.reserve(train.size());
  for (const auto& s : train) labels.push_back(s.label);

  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    std::vector<FeatureVector> feats;
    feats.reserve(train.size());
    for (const auto& s : train) {
      feats.push_back(extract_features(
          std::span<const double>(s.values.data(), static_cast<std::size_t>(checkpoints[i]))));
    }
    chain.standardizers[i].fit(feats);
    for (auto& f : feats) f = chain.standardizers[i].transform(f);
    chain.models[i].fit(feats, labels, config);
  }
  return chain;
}

double predict_confidence(const ClassifierChain& chain, const Prefix& prefix) {
  const int idx = chain.checkpoint_index(prefix.t);
  const FeatureVector raw = extract_features(prefix);
  return chain.models[idx].predict_proba(chain.standardizers[idx].transform(raw));
}

}  // namespace ects
