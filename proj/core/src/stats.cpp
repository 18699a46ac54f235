#include "jumpstab/stats.hpp"

#include <cmath>

#include "jumpstab/error.hpp"

namespace jumpstab {

void CompensatedSum::add(double x) noexcept {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

double mean(std::span<const double> values) {
  if (values.empty()) throw ValidationError("mean of an empty sample");
  const double anchor = values.front();
  CompensatedSum dev;
  for (double v : values) dev.add(v - anchor);
  return anchor + dev.value() / static_cast<double>(values.size());
}

double weighted_mean(std::span<const double> values,
                     std::span<const double> weights) {
  if (values.empty() || values.size() != weights.size()) {
    throw ValidationError("weighted_mean: empty sample or size mismatch");
  }
  const double anchor = values.front();
  CompensatedSum dev;
  CompensatedSum total;
  for (std::size_t i = 0; i < values.size(); ++i) {
    dev.add(weights[i] * (values[i] - anchor));
    total.add(weights[i]);
  }
  if (!(total.value() > 0.0)) {
    throw ValidationError("weighted_mean: weights sum to zero");
  }
  return anchor + dev.value() / total.value();
}

double sample_variance(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  CompensatedSum ss;
  for (double v : values) ss.add((v - m) * (v - m));
  return ss.value() / static_cast<double>(values.size() - 1);
}

Estimate iid_estimate(std::span<const double> values) {
  Estimate e;
  e.value = mean(values);
  e.std_error = std::sqrt(sample_variance(values) /
                       static_cast<double>(values.size()));
  return e;
}

Estimate batch_means(std::span<const double> values,
                     std::span<const double> weights) {
  if (values.empty() || values.size() != weights.size()) {
    throw ValidationError("batch_means: empty sample or size mismatch");
  }
  Estimate e;
  e.value = weighted_mean(values, weights);
  const std::size_t n = values.size();
  const auto batches = static_cast<std::size_t>(std::floor(std::sqrt(static_cast<double>(n))));
  if (batches < 2) return e;

  std::vector<double> batch_value;
  std::vector<double> batch_weight;
  batch_value.reserve(batches);
  batch_weight.reserve(batches);
  for (std::size_t b = 0; b < batches; ++b) {
    const std::size_t lo = b * n / batches;
    const std::size_t hi = (b + 1) * n / batches;
    CompensatedSum w;
    for (std::size_t i = lo; i < hi; ++i) w.add(weights[i]);
    if (!(w.value() > 0.0)) continue;
    batch_value.push_back(weighted_mean(values.subspan(lo, hi - lo),
                                        weights.subspan(lo, hi - lo)));
    batch_weight.push_back(w.value());
  }
  if (batch_value.size() < 2) return e;

  // Weighted spread of batch means; with equal weights this is the textbook
  // batch-means variance s_b^2 / B.
  CompensatedSum wsum;
  CompensatedSum w2sum;
  CompensatedSum ss;
  for (std::size_t b = 0; b < batch_value.size(); ++b) {
    wsum.add(batch_weight[b]);
    w2sum.add(batch_weight[b] * batch_weight[b]);
  }
  for (std::size_t b = 0; b < batch_value.size(); ++b) {
    const double d = batch_value[b] - e.value;
    ss.add(batch_weight[b] * d * d);
  }
  const double W = wsum.value();
  const double eff = W * W / w2sum.value();
  const double var_between = ss.value() / W * eff / (eff - 1.0);
  e.std_error = std::sqrt(var_between / eff);
  return e;
}

double least_squares_slope(std::span<const double> t,
                           std::span<const double> y) {
  if (t.size() != y.size() || t.size() < 2) {
    throw ValidationError("least_squares_slope: need two or more points");
  }
  const double tm = mean(t);
  const double ym = mean(y);
  CompensatedSum sty;
  CompensatedSum stt;
  for (std::size_t i = 0; i < t.size(); ++i) {
    sty.add((t[i] - tm) * (y[i] - ym));
    stt.add((t[i] - tm) * (t[i] - tm));
  }
  if (!(stt.value() > 0.0)) {
    throw ValidationError("least_squares_slope: abscissae coincide");
  }
  return sty.value() / stt.value();
}

double combined_stderr(const Estimate& a, const Estimate& b) {
  return std::sqrt(a.std_error * a.std_error + b.std_error * b.std_error);
}

}  // namespace jumpstab
