// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0
//
// Network-level engineered features: layer counts, dense-layer statistics
// and precision-scaled fixed-point operation totals.

#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fpgacost/netir.hpp"

namespace fpgacost {

/// Bumped whenever the feature set, order or counting rules change.
inline constexpr std::uint32_t kFeatureSchemaVersion = 1;

struct FixedPointOpCounts {
  std::uint64_t add = 0;
  std::uint64_t mult = 0;
  std::uint64_t logical = 0;
  std::uint64_t lookup = 0;

  FixedPointOpCounts& operator+=(const FixedPointOpCounts& o) {
    add += o.add;
    mult += o.mult;
    logical += o.logical;
    lookup += o.lookup;
    return *this;
  }
  bool operator==(const FixedPointOpCounts&) const = default;
};

/// Counting rules, all in terms of the layer width w (or n_in, n_out):
///   Dense      mult = add = n_in * n_out (bias folded into the MAC adds)
///   BatchNorm  mult = add = w
///   SkipAdd    add = w
///   Dropout    nothing (identity at inference)
///   ReLU       logical = w
///   Tanh, Sigmoid  lookup = w
///   Softmax    lookup = 2w (exp and reciprocal tables), add = w - 1
FixedPointOpCounts count_fixed_point_ops(const LayerSpec& layer);

struct EngineeredFeatures {
  double dense_count = 0;
  double batchnorm_count = 0;
  double skip_count = 0;
  double dropout_count = 0;
  double act_relu_count = 0;
  double act_tanh_count = 0;
  double act_sigmoid_count = 0;
  double act_softmax_count = 0;
  double avg_dense_params = 0;
  double avg_dense_inputs = 0;
  double avg_dense_outputs = 0;
  double avg_dense_reuse = 0;
  double scaled_add = 0;
  double scaled_mult = 0;
  double scaled_logical = 0;
  double scaled_lookup = 0;
  double precision_bits = 0;
  double global_reuse = 0;
  int board_index = 0;
  int strategy_index = 0;

  bool operator==(const EngineeredFeatures&) const = default;
};

inline constexpr std::size_t kNumericFeatureCount = 18;
inline constexpr std::size_t kFeatureCount = kNumericFeatureCount + 2;

/// Canonical column order: the 18 numeric features followed by
/// board_index and strategy_index.
const std::array<std::string_view, kFeatureCount>& feature_names();

/// Numeric features in canonical order (the regressors' dense input).
std::array<double, kNumericFeatureCount> numeric_features(const EngineeredFeatures& f);

/// All features in canonical order, categoricals cast to double.
std::array<double, kFeatureCount> feature_vector(const EngineeredFeatures& f);

/// Inverse of feature_vector(). Throws DataError on non-integral categoricals.
EngineeredFeatures features_from_vector(std::span<const double> values);

struct CategoricalCodes {
  int board_index = 0;
  int strategy_index = 0;
  bool operator==(const CategoricalCodes&) const = default;
};

/// Board index is the registry declaration order; Latency = 0, Resource = 1.
CategoricalCodes encode_categoricals(const SynthesisConfig& cfg, const BoardRegistry& boards);

/// Dense layers whose reuse is not pinned take effective_reuse(layer,
/// cfg.global_reuse). Throws ConfigError for unknown boards.
EngineeredFeatures extract_features(const NetworkArchitecture& net, const SynthesisConfig& cfg,
                                    const BoardRegistry& boards = default_board_registry());

struct CorrelationMatrix {
  std::vector<std::string> names;
  std::vector<std::vector<double>> values;
  // Columns with zero rank variance; their off-diagonal entries are 0.
  std::vector<std::string> constant_columns;
};

/// Average ranks (1-based) with ties sharing the mean rank.
std::vector<double> average_ranks(std::span<const double> x);

/// Spearman rank correlation. Returns 0 when either column is constant.
double spearman(std::span<const double> x, std::span<const double> y);

CorrelationMatrix spearman_matrix(const std::vector<std::vector<double>>& columns,
                                  std::vector<std::string> names);

}  // namespace fpgacost
