// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0

#include "fpgacost/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace fpgacost::metrics {

namespace {

void check_pair(std::span<const double> y, std::span<const double> yhat, std::size_t min_len,
                const char* fn) {
  if (y.size() != yhat.size()) {
    throw std::invalid_argument(std::string(fn) + ": length mismatch");
  }
  if (y.size() < min_len) {
    throw std::invalid_argument(std::string(fn) + ": need at least " + std::to_string(min_len) +
                                " values");
  }
}

}  // namespace

double r2(std::span<const double> y, std::span<const double> yhat) {
  check_pair(y, yhat, 2, "r2");
  double mean = 0;
  for (double v : y) mean += v;
  mean /= static_cast<double>(y.size());
  double ss_res = 0, ss_tot = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    ss_res += (y[i] - yhat[i]) * (y[i] - yhat[i]);
    ss_tot += (y[i] - mean) * (y[i] - mean);
  }
  if (ss_tot == 0) throw std::invalid_argument("r2: undefined for constant ground truth");
  return 1.0 - ss_res / ss_tot;
}

double smape(std::span<const double> y, std::span<const double> yhat) {
  check_pair(y, yhat, 1, "smape");
  double sum = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    const double denom = std::abs(y[i]) + std::abs(yhat[i]);
    if (denom > 0) sum += 2.0 * std::abs(y[i] - yhat[i]) / denom;
  }
  return 100.0 * sum / static_cast<double>(y.size());
}

double mae(std::span<const double> y, std::span<const double> yhat) {
  check_pair(y, yhat, 1, "mae");
  double sum = 0;
  for (std::size_t i = 0; i < y.size(); ++i) sum += std::abs(y[i] - yhat[i]);
  return sum / static_cast<double>(y.size());
}

double quantile(std::span<const double> values, double q) {
  if (values.empty()) throw std::invalid_argument("quantile: empty input");
  if (!(q >= 0 && q <= 1)) throw std::invalid_argument("quantile: q outside [0, 1]");
  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  const double pos = q * static_cast<double>(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return sorted[lo] + frac * (sorted[hi] - sorted[lo]);
}

ErrorDistribution error_distribution(std::span<const double> errors) {
  if (errors.empty()) throw std::invalid_argument("error_distribution: empty input");
  ErrorDistribution d;
  d.q1 = quantile(errors, 0.25);
  d.median = quantile(errors, 0.5);
  d.q3 = quantile(errors, 0.75);
  d.iqr = d.q3 - d.q1;
  double sum = 0;
  d.max_error = errors.front();
  for (double e : errors) {
    sum += e;
    d.max_error = std::max(d.max_error, e);
  }
  d.mean = sum / static_cast<double>(errors.size());
  const double lo = d.q1 - 1.5 * d.iqr;
  const double hi = d.q3 + 1.5 * d.iqr;
  for (double e : errors) {
    if (e < lo || e > hi) d.outliers.push_back(e);
  }
  return d;
}

double within_threshold_fraction(std::span<const double> errors, double threshold) {
  if (errors.empty()) throw std::invalid_argument("within_threshold_fraction: empty input");
  if (!(threshold > 0)) throw std::invalid_argument("within_threshold_fraction: threshold must be > 0");
  std::size_t n = 0;
  for (double e : errors) {
    if (std::abs(e) < threshold) ++n;
  }
  return static_cast<double>(n) / static_cast<double>(errors.size());
}

}  // namespace fpgacost::metrics
