#include "ects/features.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ects {
namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kTiny = 1e-12;

// Quantile with linear interpolation between order statistics.
double quantile(const std::vector<double>& sorted, double q) {
  const std::size_t n = sorted.size();
  if (n == 1) return sorted[0];
  const double h = q * static_cast<double>(n - 1);
  const std::size_t lo = static_cast<std::size_t>(h);
  const std::size_t hi = std::min(lo + 1, n - 1);
  const double frac = h - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

double autocorrelation(std::span<const double> x, double mean, double var_sum, int lag) {
  const int n = static_cast<int>(x.size());
  if (n <= lag || var_sum <= kTiny) return 0.0;
  double s = 0.0;
  for (int i = 0; i + lag < n; ++i) {
    s += (x[i] - mean) * (x[i + lag] - mean);
  }
  return s / var_sum;
}

}  // namespace

FeatureVector extract_features(std::span<const double> values) {
  const int n = static_cast<int>(values.size());
  if (n == 0) throw std::invalid_argument("cannot extract features of an empty prefix");

  FeatureVector f(kFeatureCount, 0.0);

  double sum = 0.0, mn = values[0], mx = values[0];
  for (double v : values) {
    sum += v;
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  const double mean = sum / n;

  double m2 = 0.0, m3 = 0.0, m4 = 0.0;
  for (double v : values) {
    const double d = v - mean;
    m2 += d * d;
    m3 += d * d * d;
    m4 += d * d * d * d;
  }
  const double var_sum = m2;  // sum of squared deviations, reused by autocorrelation
  m2 /= n;
  m3 /= n;
  m4 /= n;
  const double sd = std::sqrt(m2);

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());

  f[kFeatMean] = mean;
  f[kFeatStd] = sd;
  f[kFeatMin] = mn;
  f[kFeatMax] = mx;
  f[kFeatMedian] = quantile(sorted, 0.5);
  f[kFeatSkewness] = sd > kTiny ? m3 / (sd * sd * sd) : 0.0;
  f[kFeatKurtosis] = sd > kTiny ? m4 / (m2 * m2) - 3.0 : 0.0;
  f[kFeatIqr] = quantile(sorted, 0.75) - quantile(sorted, 0.25);
  f[kFeatFirst] = values.front();
  f[kFeatLast] = values.back();

  // Least-squares line over x = 0..n-1. With a single point the slope
  // denominator is 0; fall back to slope 0, intercept = the point.
  if (n >= 2) {
    const double x_mean = static_cast<double>(n - 1) / 2.0;
    double sxy = 0.0, sxx = 0.0;
    for (int i = 0; i < n; ++i) {
      sxy += (i - x_mean) * (values[i] - mean);
      sxx += (i - x_mean) * (i - x_mean);
    }
    f[kFeatTrendSlope] = sxy / sxx;
    f[kFeatTrendIntercept] = mean - f[kFeatTrendSlope] * x_mean;
  } else {
    f[kFeatTrendIntercept] = mean;
  }

  if (n >= 2) {
    double mad = 0.0;
    for (int i = 0; i + 1 < n; ++i) mad += std::fabs(values[i + 1] - values[i]);
    f[kFeatMeanAbsDiff] = mad / (n - 1);

    int crossings = 0;
    for (int i = 0; i + 1 < n; ++i) {
      if ((values[i] - mean) * (values[i + 1] - mean) < 0.0) ++crossings;
    }
    f[kFeatZeroCrossings] = crossings;
  }

  f[kFeatAutocorrLag1] = autocorrelation(values, mean, var_sum, 1);
  f[kFeatAutocorrLag2] = autocorrelation(values, mean, var_sum, 2);

  // Naive DFT over the above-DC bins k = 1..n/2. Quadratic in the prefix
  // length, which is fine at the series lengths this library targets.
  const int k_max = n / 2;
  double energy = 0.0, mag_sum = 0.0, weighted = 0.0, best_mag = 0.0;
  int best_k = 0;
  for (int k = 1; k <= k_max; ++k) {
    double re = 0.0, im = 0.0;
    for (int j = 0; j < n; ++j) {
      const double ang = -2.0 * kPi * k * j / n;
      re += values[j] * std::cos(ang);
      im += values[j] * std::sin(ang);
    }
    const double mag = std::hypot(re, im);
    energy += mag * mag / n;
    mag_sum += mag;
    weighted += k * mag;
    if (mag > best_mag + kTiny) {
      best_mag = mag;
      best_k = k;
    }
  }
  f[kFeatSpectralEnergy] = energy;
  f[kFeatDominantFreq] = best_mag > kTiny ? best_k : 0;
  f[kFeatDominantMag] = best_mag > kTiny ? best_mag : 0.0;
  f[kFeatSpectralCentroid] = mag_sum > kTiny ? weighted / mag_sum : 0.0;

  return f;
}

FeatureVector extract_features(const Prefix& prefix) {
  if (prefix.parent == nullptr || prefix.t < 1 || prefix.t > prefix.parent->length()) {
    throw std::invalid_argument("prefix does not reference a valid series range");
  }
  return extract_features(prefix.values());
}

}  // namespace ects
