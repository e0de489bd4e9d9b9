// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0
//
// Evaluation statistics. All functions throw std::invalid_argument on
// violated preconditions (length mismatch, empty input, constant truth for r2).

#pragma once

#include <span>
#include <vector>

namespace fpgacost::metrics {

/// Coefficient of determination: 1 - SSres / SStot.
double r2(std::span<const double> y, std::span<const double> yhat);

/// Symmetric MAPE in percent; terms with |y| + |yhat| == 0 contribute 0.
double smape(std::span<const double> y, std::span<const double> yhat);

double mae(std::span<const double> y, std::span<const double> yhat);

/// Quantile by linear interpolation between order statistics
/// (position q * (n - 1) in the sorted sample).
double quantile(std::span<const double> values, double q);

struct ErrorDistribution {
  double median = 0;
  double mean = 0;
  double q1 = 0;
  double q3 = 0;
  double iqr = 0;
  double max_error = 0;
  std::vector<double> outliers;  // outside [q1 - 1.5 iqr, q3 + 1.5 iqr], input order
};

ErrorDistribution error_distribution(std::span<const double> errors);

/// Fraction of entries with |error| < threshold.
double within_threshold_fraction(std::span<const double> errors, double threshold);

/// Threshold used for resource (percentage-point) errors.
inline constexpr double kResourceErrorThreshold = 10.0;
/// Threshold used for latency errors, in clock cycles.
inline constexpr double kCycleErrorThreshold = 100.0;

}  // namespace fpgacost::metrics
