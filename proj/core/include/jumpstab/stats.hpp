#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace jumpstab {

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x) noexcept;
  double value() const noexcept { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

/// A Monte Carlo estimate and its standard error.
struct Estimate {
  double value = 0.0;
  double std_error = 0.0;
};

/// Arithmetic mean. Deviations are accumulated around the first element so a
/// constant input returns that constant exactly.
double mean(std::span<const double> values);

/// Weighted mean with the same anchoring as `mean`. Weights need not be
/// normalized but must have a positive sum.
double weighted_mean(std::span<const double> values,
                     std::span<const double> weights);

/// Unbiased sample variance; 0 for fewer than two values.
double sample_variance(std::span<const double> values);

/// Mean and standard error of i.i.d. values.
Estimate iid_estimate(std::span<const double> values);

/// Batch-means estimate for correlated (time-ordered) samples: the series is
/// cut into floor(sqrt(n)) contiguous batches and the spread of the batch
/// means gives the standard error.
Estimate batch_means(std::span<const double> values,
                     std::span<const double> weights);

/// Ordinary least-squares slope of y against t. Requires two distinct t.
double least_squares_slope(std::span<const double> t,
                           std::span<const double> y);

/// Combined one-sigma error of a difference of independent estimates.
double combined_stderr(const Estimate& a, const Estimate& b);

}  // namespace jumpstab
