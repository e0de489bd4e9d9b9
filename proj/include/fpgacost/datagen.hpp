// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0
//
// Synthetic architecture generation, target normalization, dataset
// ingestion/serialization and train/validation/test splitting.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fpgacost/csv.hpp"
#include "fpgacost/features.hpp"
#include "fpgacost/netir.hpp"

namespace fpgacost {

/// p(depth) = clamp(base + slope * depth / 20, 0, 1), depth = dense layer count.
struct DepthProbability {
  double base = 0;
  double slope = 0;
  double at(int depth) const;
};

struct GeneratorSpec {
  std::vector<int> input_sizes;    // powers of 2 in [16, 1024]
  int min_layers = 2;              // dense layers, including the output layer
  int max_layers = 20;
  std::vector<int> neuron_counts;  // hidden widths: powers of 2 in [2, 4096]
  int min_output = 1;
  int max_output = 200;
  std::vector<ActKind> hidden_activations;
  std::vector<ActKind> output_activations;
  // Probability of a softmax head when the output is wider than one unit.
  double p_softmax_output = 0.5;
  std::vector<int> precisions;
  std::vector<int> reuse_factors;
  std::vector<std::string> boards;
  std::vector<Strategy> strategies;
  DepthProbability p_batchnorm{0.1, 0.4};
  DepthProbability p_skip{0.05, 0.35};
  DepthProbability p_dropout{0.05, 0.15};

  /// Throws ConfigError when any range is empty or leaves the documented bounds.
  void validate() const;
};

GeneratorSpec default_generator_spec();

/// Applies a JSON overrides document (same field names as GeneratorSpec;
/// probabilities as {"base": b, "slope": s}) on top of `base`.
GeneratorSpec apply_generator_overrides(GeneratorSpec base, std::string_view document);

struct GeneratedSample {
  NetworkArchitecture network;
  SynthesisConfig config;
  std::uint64_t seed = 0;
};

/// Deterministic in (seed, spec). Dense reuse is clamped per layer.
GeneratedSample generate_architecture(std::uint64_t seed, const GeneratorSpec& spec);

/// Sample i uses derive_seed(master_seed, i); output is in index order for
/// any worker count.
std::vector<GeneratedSample> generate_batch(std::uint64_t master_seed, std::size_t count,
                                            const GeneratorSpec& spec, unsigned workers = 1);

struct RawTargets {
  double bram = 0;
  double dsp = 0;
  double ff = 0;
  double lut = 0;
  double cycles = 0;
};

struct Targets {
  double bram_pct = 0;
  double dsp_pct = 0;
  double ff_pct = 0;
  double lut_pct = 0;
  double cycles = 0;

  bool operator==(const Targets&) const = default;
};

inline constexpr double kUtilizationCap = 200.0;

/// Clamp to [0, 200].
double clamp_utilization(double pct);

/// 100 * raw / capacity, clamped; cycles pass through. Throws DataError on
/// negative raw counts.
Targets normalize_targets(const RawTargets& raw, const BoardSpec& board);

enum class RecordSource { Synthetic, Ingested };

struct RecordMeta {
  RecordSource source = RecordSource::Ingested;
  std::string name;
  std::string architecture;  // serialized network document, may be empty

  bool operator==(const RecordMeta&) const = default;
};

struct TrainingRecord {
  EngineeredFeatures features;
  Targets targets;
  RecordMeta meta;

  bool operator==(const TrainingRecord&) const = default;
};

struct Dataset {
  std::uint32_t schema_version = kFeatureSchemaVersion;
  std::vector<TrainingRecord> records;

  std::size_t size() const { return records.size(); }
  bool empty() const { return records.empty(); }
};

inline constexpr std::array<std::string_view, 5> kTargetColumns{"bram_pct", "dsp_pct", "ff_pct",
                                                                "lut_pct", "cycles"};

/// Canonical delimited layout: name, source, architecture, the feature
/// columns, then the target columns. Numbers use round-trip formatting.
/// Without targets the target cells are left empty (not yet synthesized).
void write_dataset(std::ostream& out, const Dataset& ds, bool with_targets = true);
void write_dataset_file(const std::string& path, const Dataset& ds, bool with_targets = true);

struct IngestReport {
  std::size_t rows_read = 0;
  std::size_t rows_kept = 0;
  std::size_t rows_skipped = 0;
  std::size_t values_clamped = 0;
  std::vector<std::string> skip_reasons;  // first 20 reasons
};

struct IngestResult {
  Dataset dataset;
  IngestReport report;
};

/// Column mapping for foreign schemas:
///   {"columns": {"<canonical>": "<foreign>", ...},
///    "target_units": "percent" | "absolute"}
/// With absolute units the raw bram/dsp/ff/lut/cycles columns are normalized
/// against the row's board. Features come from the feature columns when all
/// are present, otherwise from an `architecture` column plus board,
/// strategy, precision_bits and global_reuse.
IngestResult ingest_table(const csv::Table& table, std::optional<std::string_view> mapping,
                          const BoardRegistry& boards = default_board_registry());

IngestResult ingest_dataset(const std::string& path, std::optional<std::string_view> mapping,
                            const BoardRegistry& boards = default_board_registry());

/// Fractions must be positive and sum to 1. Sizes use largest remainder
/// rounding; rows are shuffled with `seed` first.
std::array<Dataset, 3> split_dataset(const Dataset& ds, std::array<double, 3> fractions,
                                     std::uint64_t seed);

/// Features, categoricals and targets as columns, with names.
std::pair<std::vector<std::vector<double>>, std::vector<std::string>> dataset_columns(
    const Dataset& ds);

CorrelationMatrix spearman_matrix(const Dataset& ds);

/// Builds records from generated samples. Targets are zero until assigned.
Dataset make_dataset(const std::vector<GeneratedSample>& samples,
                     const BoardRegistry& boards = default_board_registry());

/// Overwrites targets with a seeded linear function of the features and
/// categorical codes, rescaled so resources span [0, 150] percent and
/// cycles span [10, 5000]. Used as a learnable stand-in when no synthesized
/// dataset is available.
void assign_pseudo_targets(Dataset& ds, std::uint64_t seed);

}  // namespace fpgacost
