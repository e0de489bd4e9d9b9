// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0
//
// Model sets, end-to-end prediction reports and held-out evaluation.

#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fpgacost/datagen.hpp"
#include "fpgacost/metrics.hpp"
#include "fpgacost/mlpreg.hpp"

namespace fpgacost {

/// The five per-target regressors, indexed in kAllTargets order.
class ModelSet {
 public:
  /// Throws ModelError unless there is exactly one model per target and all
  /// share the library's feature schema version.
  explicit ModelSet(std::vector<MlpRegressor> models);

  const MlpRegressor& at(Target t) const { return models_[static_cast<std::size_t>(t)]; }
  const std::vector<MlpRegressor>& models() const { return models_; }

  /// "<target>-v<format>-s<schema>-<fingerprint hex>".
  std::string version_id(Target t) const;

 private:
  std::vector<MlpRegressor> models_;
};

/// File name used for a target's model inside a model directory.
std::string model_file_name(Target t);

/// Loads <dir>/{bram,dsp,ff,lut,cycles}.model. Throws ModelError when a file
/// is missing, corrupt or schema-incompatible.
ModelSet load_model_set(const std::string& dir);

struct ResourcePrediction {
  double predicted_pct = 0;
  bool fits_100 = true;
  bool fits_200 = true;
};

struct PredictionReport {
  std::string network;
  SynthesisConfig config;
  ResourcePrediction bram, dsp, ff, lut;
  std::int64_t cycles = 0;
  double latency_ns = 0;  // cycles * clock_period_ns
  EngineeredFeatures features;
  std::array<std::string, 5> model_versions;  // kAllTargets order
};

/// Applies the output contract to raw regressor outputs (kAllTargets order):
/// resources clamped to [0, 200], cycles clamped at 0 and rounded.
/// Throws ModelError on non-finite outputs.
PredictionReport build_report(const std::array<double, 5>& raw, const NetworkArchitecture& net,
                              const SynthesisConfig& cfg, const EngineeredFeatures& features);

/// Throws ConfigError on an invalid config or a board outside the models'
/// embedding table.
PredictionReport predict_all(const ModelSet& models, const NetworkArchitecture& net,
                             const SynthesisConfig& cfg,
                             const BoardRegistry& boards = default_board_registry());

std::string report_json(const PredictionReport& r);
std::string report_text(const PredictionReport& r);

struct TargetEvaluation {
  Target target = Target::BRAM;
  std::size_t n = 0;
  std::optional<double> r2;  // empty when the truth column is constant
  double smape = 0;
  double mae = 0;
  metrics::ErrorDistribution errors;
  double threshold = 0;
  double within_threshold = 0;
};

/// Scores every model on `ds`. Predictions are clamped exactly as in
/// predict_all. Throws DataError on an empty dataset.
std::vector<TargetEvaluation> evaluate_models(const ModelSet& models, const Dataset& ds);

std::string evaluation_json(const std::vector<TargetEvaluation>& ev);
std::string evaluation_text(const std::vector<TargetEvaluation>& ev);

}  // namespace fpgacost
