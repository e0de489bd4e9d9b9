// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0
//
// Benchmark fixtures, the prediction sweep over HLS parameter combinations,
// and the ground-truth comparison harness.

#pragma once

#include <array>
#include <compare>
#include <optional>
#include <string>
#include <vector>

#include "fpgacost/csv.hpp"
#include "fpgacost/netir.hpp"
#include "fpgacost/report.hpp"

namespace fpgacost {

struct BenchmarkFixture {
  std::string name;
  NetworkArchitecture network;
  std::uint64_t expected_params = 0;  // published size
  std::string note;                   // non-empty when the drawn layers differ from the encoding
};

/// The eleven benchmark networks in publication order.
std::vector<BenchmarkFixture> builtin_benchmarks();

struct SweepGrid {
  std::vector<std::string> boards{"zcu102", "pynq-z2"};
  std::vector<Strategy> strategies{Strategy::Latency, Strategy::Resource};
  std::vector<int> precisions{2, 8, 16};
  std::vector<int> reuse_factors{1, 2, 4, 8, 16, 32, 64};

  std::size_t combinations() const;
  /// Throws ConfigError on empty or duplicated axes and non-positive values.
  void validate(const BoardRegistry& boards = default_board_registry()) const;
};

/// Latency strategy fully unrolls each dense layer; HLS refuses layers above this size.
inline constexpr std::uint64_t kLatencyUnrollLimit = 4096;

bool is_unsynthesizable(const NetworkArchitecture& net, Strategy strategy);

struct SweepKey {
  std::string benchmark;
  std::string board;
  Strategy strategy = Strategy::Latency;
  int precision = 0;
  int reuse = 0;

  auto operator<=>(const SweepKey&) const = default;
};

std::string to_string(const SweepKey& k);

struct SweepRow {
  SweepKey key;
  PredictionReport report;
  bool unsynthesizable = false;
};

/// One row per (fixture, board, strategy, precision, reuse), ordered by
/// fixture order then grid order. Output is independent of `workers`.
std::vector<SweepRow> run_sweep(const ModelSet& models, const std::vector<BenchmarkFixture>& fixtures,
                                const SweepGrid& grid,
                                const BoardRegistry& boards = default_board_registry(),
                                unsigned workers = 1);

/// Sweep rows as a delimited table.
void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows);

/// Ground-truth value: empty when not applicable; "+" means above the 200% cap.
struct TruthCell {
  std::optional<double> value;
  bool above_cap = false;
};

struct TruthRow {
  SweepKey key;
  std::array<TruthCell, 5> cells;  // kAllTargets order
};

/// Columns benchmark, board, strategy, precision, reuse plus any of
/// bram_pct, dsp_pct, ff_pct, lut_pct, cycles. "+" is read as 200 with the
/// above-cap marker; "", "NA" and "-" as not applicable. Throws DataError.
std::vector<TruthRow> parse_truth(const csv::Table& table);
std::vector<TruthRow> read_truth_file(const std::string& path);

struct ComparedRow {
  SweepKey key;
  std::array<TruthCell, 5> truth;
  std::array<double, 5> predicted{};
  std::array<std::optional<double>, 5> abs_error;
  bool unsynthesizable = false;
};

struct TargetErrorStats {
  std::size_t n = 0;
  double mae = 0;
  metrics::ErrorDistribution distribution;
  double threshold = 0;
  double within_threshold = 0;
};

/// Mean truth and prediction over matched rows sharing (board, strategy, value).
struct TrendPoint {
  std::string board;
  Strategy strategy = Strategy::Latency;
  int value = 0;
  std::size_t rows = 0;
  std::array<std::optional<double>, 5> mean_truth;
  std::array<std::optional<double>, 5> mean_predicted;
};

struct UnmatchedTruth {
  SweepKey key;
  std::string reason;
};

struct ComparisonReport {
  std::vector<ComparedRow> rows;
  std::array<TargetErrorStats, 5> stats;
  std::vector<TrendPoint> by_precision;
  std::vector<TrendPoint> by_reuse;
  std::vector<UnmatchedTruth> unmatched;
};

/// Every truth row ends up either in `rows` or in `unmatched`.
ComparisonReport compare_with_ground_truth(const std::vector<SweepRow>& sweep,
                                           const std::vector<TruthRow>& truth);

/// G/P side-by-side tables, trend tables and the unmatched list.
std::string comparison_text(const ComparisonReport& report);

}  // namespace fpgacost
