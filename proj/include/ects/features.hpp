#pragma once

#include <span>
#include <vector>

#include "ects/core.hpp"

namespace ects {

// Fixed-length summary of a series prefix, consumed by the per-checkpoint
// classifiers.
using FeatureVector = std::vector<double>;

// Indices into a FeatureVector. The layout is part of the model format, so
// reorder only with a format version bump.
enum FeatureIndex : int {
  kFeatMean = 0,
  kFeatStd,             // population standard deviation
  kFeatMin,
  kFeatMax,
  kFeatMedian,
  kFeatSkewness,
  kFeatKurtosis,        // excess kurtosis
  kFeatIqr,             // interquartile range (linear-interpolation quartiles)
  kFeatFirst,
  kFeatLast,
  kFeatTrendSlope,      // least-squares line over x = 0..n-1
  kFeatTrendIntercept,
  kFeatMeanAbsDiff,     // mean |x[i+1] - x[i]|
  kFeatZeroCrossings,   // sign changes of the mean-centered series
  kFeatAutocorrLag1,
  kFeatAutocorrLag2,
  kFeatSpectralEnergy,  // above-DC spectrum energy, sum |X_k|^2 / n for k >= 1
  kFeatDominantFreq,    // index k of the largest |X_k| (0 when the spectrum is flat zero)
  kFeatDominantMag,     // |X_k| at that index
  kFeatSpectralCentroid,
  kFeatureCount
};

// Extracts the feature vector of `values`. Every feature has a defined
// finite fallback (0 unless noted above) when its denominator degenerates:
// constant series, short series, zero spectrum. Throws std::invalid_argument
// on an empty input.
FeatureVector extract_features(std::span<const double> values);

// Convenience overload over a prefix; uses exactly the first `t` samples.
FeatureVector extract_features(const Prefix& prefix);

}  // namespace ects
