// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0

#include "fpgacost/features.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fpgacost/error.hpp"

namespace fpgacost {

FixedPointOpCounts count_fixed_point_ops(const LayerSpec& layer) {
  FixedPointOpCounts c;
  const std::uint64_t w = layer.output_size;
  switch (layer.kind) {
    case LayerKind::Dense: {
      const std::uint64_t macs = static_cast<std::uint64_t>(layer.input_size) * layer.output_size;
      c.mult = macs;
      c.add = macs;
      break;
    }
    case LayerKind::BatchNorm:
      c.mult = w;
      c.add = w;
      break;
    case LayerKind::SkipAdd:
      c.add = w;
      break;
    case LayerKind::Dropout:
      break;
    case LayerKind::Activation:
      switch (*layer.activation) {
        case ActKind::ReLU:
          c.logical = w;
          break;
        case ActKind::Tanh:
        case ActKind::Sigmoid:
          c.lookup = w;
          break;
        case ActKind::Softmax:
          c.lookup = 2 * w;
          c.add = w - 1;
          break;
      }
      break;
  }
  return c;
}

const std::array<std::string_view, kFeatureCount>& feature_names() {
  static const std::array<std::string_view, kFeatureCount> names{
      "dense_count",      "batchnorm_count",   "skip_count",        "dropout_count",
      "act_relu_count",   "act_tanh_count",    "act_sigmoid_count", "act_softmax_count",
      "avg_dense_params", "avg_dense_inputs",  "avg_dense_outputs", "avg_dense_reuse",
      "scaled_add",       "scaled_mult",       "scaled_logical",    "scaled_lookup",
      "precision_bits",   "global_reuse",      "board_index",       "strategy_index"};
  return names;
}

std::array<double, kNumericFeatureCount> numeric_features(const EngineeredFeatures& f) {
  return {f.dense_count,      f.batchnorm_count,  f.skip_count,        f.dropout_count,
          f.act_relu_count,   f.act_tanh_count,   f.act_sigmoid_count, f.act_softmax_count,
          f.avg_dense_params, f.avg_dense_inputs, f.avg_dense_outputs, f.avg_dense_reuse,
          f.scaled_add,       f.scaled_mult,      f.scaled_logical,    f.scaled_lookup,
          f.precision_bits,   f.global_reuse};
}

std::array<double, kFeatureCount> feature_vector(const EngineeredFeatures& f) {
  std::array<double, kFeatureCount> out{};
  const auto num = numeric_features(f);
  std::copy(num.begin(), num.end(), out.begin());
  out[kNumericFeatureCount] = f.board_index;
  out[kNumericFeatureCount + 1] = f.strategy_index;
  return out;
}

EngineeredFeatures features_from_vector(std::span<const double> v) {
  if (v.size() != kFeatureCount) {
    throw DataError("feature vector has " + std::to_string(v.size()) + " entries, expected " +
                    std::to_string(kFeatureCount));
  }
  auto as_index = [](double x, const char* what) {
    if (!(x >= 0) || x != std::floor(x) || x > 1e6) {
      throw DataError(std::string(what) + " must be a nonnegative integer");
    }
    return static_cast<int>(x);
  };
  EngineeredFeatures f;
  double* fields[] = {&f.dense_count,      &f.batchnorm_count,  &f.skip_count,
                      &f.dropout_count,    &f.act_relu_count,   &f.act_tanh_count,
                      &f.act_sigmoid_count, &f.act_softmax_count, &f.avg_dense_params,
                      &f.avg_dense_inputs, &f.avg_dense_outputs, &f.avg_dense_reuse,
                      &f.scaled_add,       &f.scaled_mult,      &f.scaled_logical,
                      &f.scaled_lookup,    &f.precision_bits,   &f.global_reuse};
  for (std::size_t i = 0; i < kNumericFeatureCount; ++i) *fields[i] = v[i];
  f.board_index = as_index(v[kNumericFeatureCount], "board_index");
  f.strategy_index = as_index(v[kNumericFeatureCount + 1], "strategy_index");
  return f;
}

CategoricalCodes encode_categoricals(const SynthesisConfig& cfg, const BoardRegistry& boards) {
  CategoricalCodes codes;
  codes.board_index = static_cast<int>(boards.index_of(cfg.board_id));
  switch (cfg.strategy) {
    case Strategy::Latency: codes.strategy_index = 0; break;
    case Strategy::Resource: codes.strategy_index = 1; break;
    default: throw ConfigError("unknown strategy");
  }
  return codes;
}

EngineeredFeatures extract_features(const NetworkArchitecture& net, const SynthesisConfig& cfg,
                                    const BoardRegistry& boards) {
  validate(cfg);
  const CategoricalCodes codes = encode_categoricals(cfg, boards);

  EngineeredFeatures f;
  FixedPointOpCounts ops;
  double dense_params = 0, dense_in = 0, dense_out = 0, dense_reuse = 0;
  for (const LayerSpec& l : net.layers) {
    ops += count_fixed_point_ops(l);
    switch (l.kind) {
      case LayerKind::Dense: {
        f.dense_count += 1;
        dense_params += static_cast<double>(layer_params(l));
        dense_in += static_cast<double>(l.input_size);
        dense_out += static_cast<double>(l.output_size);
        const std::size_t reuse =
            l.reuse_pinned ? l.reuse_factor
                           : effective_reuse(l, static_cast<std::size_t>(cfg.global_reuse));
        dense_reuse += static_cast<double>(reuse);
        break;
      }
      case LayerKind::BatchNorm: f.batchnorm_count += 1; break;
      case LayerKind::SkipAdd: f.skip_count += 1; break;
      case LayerKind::Dropout: f.dropout_count += 1; break;
      case LayerKind::Activation:
        switch (*l.activation) {
          case ActKind::ReLU: f.act_relu_count += 1; break;
          case ActKind::Tanh: f.act_tanh_count += 1; break;
          case ActKind::Sigmoid: f.act_sigmoid_count += 1; break;
          case ActKind::Softmax: f.act_softmax_count += 1; break;
        }
        break;
    }
  }
  if (f.dense_count > 0) {
    f.avg_dense_params = dense_params / f.dense_count;
    f.avg_dense_inputs = dense_in / f.dense_count;
    f.avg_dense_outputs = dense_out / f.dense_count;
    f.avg_dense_reuse = dense_reuse / f.dense_count;
  }
  const double p = cfg.precision_bits;
  f.scaled_add = static_cast<double>(ops.add) * p;
  f.scaled_mult = static_cast<double>(ops.mult) * p;
  f.scaled_logical = static_cast<double>(ops.logical) * p;
  f.scaled_lookup = static_cast<double>(ops.lookup) * p;
  f.precision_bits = p;
  f.global_reuse = cfg.global_reuse;
  f.board_index = codes.board_index;
  f.strategy_index = codes.strategy_index;
  return f;
}

std::vector<double> average_ranks(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(n);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n && x[order[j + 1]] == x[order[i]]) ++j;
    // Positions i..j share the mean of ranks i+1..j+1.
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

namespace {

// Pearson correlation; NaN when either side has zero variance.
double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double da = a[i] - ma, db = b[i] - mb;
    sab += da * db;
    saa += da * da;
    sbb += db * db;
  }
  if (saa == 0 || sbb == 0) return std::nan("");
  return sab / std::sqrt(saa * sbb);
}

}  // namespace

double spearman(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DataError("spearman: columns differ in length");
  if (x.empty()) throw DataError("spearman: empty columns");
  const double r = pearson(average_ranks(x), average_ranks(y));
  return std::isnan(r) ? 0.0 : r;
}

CorrelationMatrix spearman_matrix(const std::vector<std::vector<double>>& columns,
                                  std::vector<std::string> names) {
  if (columns.empty() || columns.front().empty()) throw DataError("spearman_matrix: empty dataset");
  if (names.size() != columns.size()) throw DataError("spearman_matrix: name/column count mismatch");
  const std::size_t k = columns.size();
  std::vector<std::vector<double>> ranks;
  ranks.reserve(k);
  for (const auto& c : columns) {
    if (c.size() != columns.front().size()) throw DataError("spearman_matrix: ragged columns");
    ranks.push_back(average_ranks(c));
  }
  CorrelationMatrix out;
  out.values.assign(k, std::vector<double>(k, 0.0));
  std::vector<bool> constant(k, false);
  for (std::size_t i = 0; i < k; ++i) {
    constant[i] = std::all_of(columns[i].begin(), columns[i].end(),
                              [&](double v) { return v == columns[i].front(); });
    if (constant[i]) out.constant_columns.push_back(names[i]);
  }
  for (std::size_t i = 0; i < k; ++i) {
    out.values[i][i] = 1.0;
    for (std::size_t j = i + 1; j < k; ++j) {
      double r = 0.0;
      if (!constant[i] && !constant[j]) r = pearson(ranks[i], ranks[j]);
      out.values[i][j] = out.values[j][i] = r;
    }
  }
  out.names = std::move(names);
  return out;
}

}  // namespace fpgacost
