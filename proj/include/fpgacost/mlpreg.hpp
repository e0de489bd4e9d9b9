// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0
//
// Per-target MLP regressors: numeric features pass through dense block 1,
// are concatenated with board and strategy embeddings, then pass through
// dense block 2 and a linear head. ReLU follows every dense layer except the
// head. Training is mini-batch ADAM on the mean absolute error.

#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "fpgacost/datagen.hpp"
#include "fpgacost/features.hpp"

namespace fpgacost {

enum class Target { BRAM, DSP, FF, LUT, Cycles };

inline constexpr std::array<Target, 5> kAllTargets{Target::BRAM, Target::DSP, Target::FF,
                                                    Target::LUT, Target::Cycles};

std::string_view to_string(Target t);  // "bram", "dsp", "ff", "lut", "cycles"
Target parse_target(std::string_view name);  // throws ConfigError

/// Target value of a record.
double target_value(const Targets& t, Target target);

struct ModelShape {
  std::size_t numeric_dim = kNumericFeatureCount;
  std::vector<std::size_t> block1;
  std::vector<std::size_t> block2;
  std::size_t board_cardinality = 3;
  std::size_t strategy_cardinality = 2;
  std::size_t embedding_dim = 4;

  bool operator==(const ModelShape&) const = default;
};

/// Fine-tuned layer widths per target.
ModelShape tuned_shape(Target target, std::size_t board_cardinality = 3);

struct TrainConfig {
  std::size_t batch_size = 64;
  double learning_rate = 1e-4;
  std::size_t epochs = 50;
  std::uint64_t seed = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  // Stop after the first epoch whose validation loss is at or below this.
  double stop_at_val_loss = -std::numeric_limits<double>::infinity();
};

/// Batch size and learning rate from the fine-tuned configuration table.
TrainConfig default_train_config(Target target);

struct EpochStats {
  double train_loss = 0;
  double val_loss = 0;
  double val_smape = 0;
  double val_r2 = 0;  // 0 when validation targets are constant

  bool operator==(const EpochStats&) const = default;
};

struct TrainHistory {
  std::vector<EpochStats> epochs;
  std::size_t best_epoch = 0;  // 0-based

  bool operator==(const TrainHistory&) const = default;
};

struct ModelInput {
  std::vector<double> numeric;
  int board_index = 0;
  int strategy_index = 0;
};

ModelInput model_input(const EngineeredFeatures& f);

/// Named contiguous range of the flat parameter vector.
struct ParamBlock {
  std::string name;
  std::size_t offset = 0;
  std::size_t size = 0;
};

class MlpRegressor {
 public:
  /// Weights are drawn from `seed`: He-uniform dense weights, zero biases,
  /// embeddings uniform in [-0.05, 0.05].
  MlpRegressor(Target target, ModelShape shape, std::uint64_t seed = 0);

  Target target() const { return target_; }
  const ModelShape& shape() const { return shape_; }
  std::uint32_t feature_schema_version() const { return feature_schema_version_; }

  std::span<double> parameters() { return params_; }
  std::span<const double> parameters() const { return params_; }
  const std::vector<ParamBlock>& param_blocks() const { return blocks_; }

  /// Input standardization: x' = (x - mean) / scale.
  const std::vector<double>& feature_mean() const { return feature_mean_; }
  const std::vector<double>& feature_scale() const { return feature_scale_; }
  void set_feature_scaler(std::vector<double> mean, std::vector<double> scale);

  /// Output de-standardization: y = offset + scale * head.
  double target_offset() const { return target_offset_; }
  double target_scale() const { return target_scale_; }
  void set_target_scaler(double offset, double scale);

  /// Fits both scalers on a dataset (population mean/std; unit scale when
  /// a column is constant).
  void fit_scalers(const Dataset& ds);

  /// Throws std::invalid_argument on dimension mismatch or out-of-range
  /// categorical index.
  double predict(const ModelInput& x) const;
  long double predict_wide(const ModelInput& x) const;

  /// Batched prediction.
  std::vector<double> predict(const Dataset& ds) const;

  /// |predict(x) - y| and its gradient with respect to every parameter.
  double loss_and_gradient(const ModelInput& x, double y, std::span<double> grad) const;

  /// Loss at an arbitrary parameter vector, evaluated in long double.
  long double loss_wide(std::span<const long double> params, const ModelInput& x, double y) const;

  /// Smallest |pre-activation| over all ReLU units, and |prediction - y|.
  double smoothness_margin(const ModelInput& x, double y) const;

  /// Hash of the architecture, scalers and weights.
  std::uint64_t fingerprint() const;

 private:
  friend class MlpTrainer;
  friend MlpRegressor load_model_bytes(std::span<const std::uint8_t> bytes);
  friend std::pair<MlpRegressor, TrainHistory> train(MlpRegressor model, const Dataset& train_set,
                                                     const Dataset& val_set, const TrainConfig& cfg);

  struct DenseSlot {
    std::size_t in = 0, out = 0;
    std::size_t w = 0, b = 0;  // offsets into params_
  };

  void layout();
  void check_input(const ModelInput& x) const;

  template <typename Scalar>
  Scalar forward(const Scalar* params, const ModelInput& x, double* min_preact) const;

  Target target_;
  ModelShape shape_;
  std::uint32_t feature_schema_version_ = kFeatureSchemaVersion;
  std::vector<double> params_;
  std::vector<ParamBlock> blocks_;
  std::vector<DenseSlot> block1_, block2_;
  DenseSlot head_;
  std::size_t board_table_ = 0, strategy_table_ = 0;
  std::vector<double> feature_mean_, feature_scale_;
  double target_offset_ = 0.0;
  double target_scale_ = 1.0;
};

/// Fine-tuned architecture for the target, seeded initialization.
MlpRegressor build_model(Target target, std::uint64_t seed = 0, std::size_t board_cardinality = 3);

/// Fits the scalers on `train`, runs cfg.epochs epochs of mini-batch ADAM on
/// the MAE and returns the weights of the epoch with the lowest validation
/// loss (earliest on ties). Throws TrainingError on non-finite loss and
/// DataError on empty or incompatible datasets.
std::pair<MlpRegressor, TrainHistory> train(MlpRegressor model, const Dataset& train_set,
                                            const Dataset& val_set, const TrainConfig& cfg);

struct GradCheckOptions {
  double h = 1e-5;
  // Check only this many coordinates, spread over every parameter block.
  // nullopt checks every weight, bias and embedding entry.
  std::optional<std::size_t> max_coordinates;
  std::uint64_t seed = 0;
};

struct GradCheckResult {
  double max_relative_error = 0;
  std::size_t worst_index = 0;
  std::size_t coordinates_checked = 0;
  double analytic_at_worst = 0;
  double numeric_at_worst = 0;
};

/// Compares the analytic MAE gradient with central differences computed in
/// long double. The sample should be a smooth point (see smoothness_margin).
GradCheckResult grad_check(const MlpRegressor& model, const ModelInput& x, double y,
                           const GradCheckOptions& opts = {});

// Versioned binary model container:
//   "FPGACOST" | u32 format_version | u32 header_len | header JSON |
//   u64 weight_count | weight_count x f64 | u64 FNV-1a of all prior bytes
// All integers and floats little-endian.
inline constexpr std::uint32_t kModelFormatVersion = 1;

std::vector<std::uint8_t> save_model_bytes(const MlpRegressor& model);
MlpRegressor load_model_bytes(std::span<const std::uint8_t> bytes);
void save_model(const MlpRegressor& model, const std::string& path);
MlpRegressor load_model(const std::string& path);

/// The feature schema version stored in model files.
inline constexpr std::uint32_t model_feature_schema_version() { return kFeatureSchemaVersion; }

}  // namespace fpgacost
