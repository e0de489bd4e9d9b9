// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0

#include "fpgacost/datagen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numeric>
#include <ostream>
#include <set>
#include <thread>

#include <json.hpp>

#include "fpgacost/error.hpp"
#include "fpgacost/rng.hpp"

namespace fpgacost {

using json = nlohmann::json;

namespace {

bool is_pow2(int v) { return v > 0 && (v & (v - 1)) == 0; }

std::vector<int> powers_of_two(int lo, int hi) {
  std::vector<int> out;
  for (int v = lo; v <= hi; v *= 2) out.push_back(v);
  return out;
}

template <typename T>
void check_subset(const std::vector<T>& values, const char* name, auto pred, const char* rule) {
  if (values.empty()) throw ConfigError(std::string("generator spec: '") + name + "' is empty");
  for (const T& v : values) {
    if (!pred(v)) throw ConfigError(std::string("generator spec: '") + name + "' values must be " + rule);
  }
}

}  // namespace

double DepthProbability::at(int depth) const {
  return std::clamp(base + slope * static_cast<double>(depth) / 20.0, 0.0, 1.0);
}

GeneratorSpec default_generator_spec() {
  GeneratorSpec s;
  s.input_sizes = powers_of_two(16, 1024);
  s.neuron_counts = powers_of_two(2, 4096);
  s.hidden_activations = {ActKind::ReLU, ActKind::Tanh, ActKind::Sigmoid};
  s.output_activations = {ActKind::ReLU, ActKind::Tanh, ActKind::Sigmoid, ActKind::Softmax};
  s.precisions = {2, 8, 16};
  s.reuse_factors = powers_of_two(1, 64);
  s.boards = {"pynq-z2", "zcu102", "alveo-u200"};
  s.strategies = {Strategy::Latency, Strategy::Resource};
  return s;
}

void GeneratorSpec::validate() const {
  check_subset(input_sizes, "input_sizes", [](int v) { return is_pow2(v) && v >= 16 && v <= 1024; },
               "powers of 2 in [16, 1024]");
  check_subset(neuron_counts, "neuron_counts", [](int v) { return is_pow2(v) && v >= 2 && v <= 4096; },
               "powers of 2 in [2, 4096]");
  check_subset(precisions, "precisions", [](int v) { return v == 2 || v == 8 || v == 16; },
               "one of 2, 8, 16");
  check_subset(reuse_factors, "reuse_factors", [](int v) { return is_pow2(v) && v <= 64; },
               "powers of 2 in [1, 64]");
  check_subset(boards, "boards", [](const std::string& b) { return !b.empty(); }, "non-empty");
  check_subset(strategies, "strategies", [](Strategy) { return true; }, "valid");
  check_subset(hidden_activations, "hidden_activations", [](ActKind) { return true; }, "valid");
  check_subset(output_activations, "output_activations", [](ActKind) { return true; }, "valid");
  if (min_layers < 2 || max_layers > 20 || min_layers > max_layers) {
    throw ConfigError("generator spec: layer counts must satisfy 2 <= min <= max <= 20");
  }
  if (min_output < 1 || max_output > 200 || min_output > max_output) {
    throw ConfigError("generator spec: output sizes must satisfy 1 <= min <= max <= 200");
  }
  if (!(p_softmax_output >= 0 && p_softmax_output <= 1)) {
    throw ConfigError("generator spec: p_softmax_output must lie in [0, 1]");
  }
}

GeneratorSpec apply_generator_overrides(GeneratorSpec s, std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("generator overrides are not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("generator overrides must be an object");
  auto acts = [](const json& arr) {
    std::vector<ActKind> out;
    for (const json& a : arr) out.push_back(parse_act_kind(a.get<std::string>()));
    return out;
  };
  auto prob = [](const json& o) {
    return DepthProbability{o.at("base").get<double>(), o.at("slope").get<double>()};
  };
  try {
    for (const auto& [key, v] : doc.items()) {
      if (key == "input_sizes") s.input_sizes = v.get<std::vector<int>>();
      else if (key == "min_layers") s.min_layers = v.get<int>();
      else if (key == "max_layers") s.max_layers = v.get<int>();
      else if (key == "neuron_counts") s.neuron_counts = v.get<std::vector<int>>();
      else if (key == "min_output") s.min_output = v.get<int>();
      else if (key == "max_output") s.max_output = v.get<int>();
      else if (key == "hidden_activations") s.hidden_activations = acts(v);
      else if (key == "output_activations") s.output_activations = acts(v);
      else if (key == "p_softmax_output") s.p_softmax_output = v.get<double>();
      else if (key == "precisions") s.precisions = v.get<std::vector<int>>();
      else if (key == "reuse_factors") s.reuse_factors = v.get<std::vector<int>>();
      else if (key == "boards") s.boards = v.get<std::vector<std::string>>();
      else if (key == "strategies") {
        s.strategies.clear();
        for (const json& x : v) s.strategies.push_back(parse_strategy(x.get<std::string>()));
      } else if (key == "p_batchnorm") s.p_batchnorm = prob(v);
      else if (key == "p_skip") s.p_skip = prob(v);
      else if (key == "p_dropout") s.p_dropout = prob(v);
      else throw ConfigError("generator overrides: unknown field '" + key + "'");
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("generator overrides: ") + e.what());
  } catch (const NetworkError& e) {
    throw ConfigError(std::string("generator overrides: ") + e.what());
  }
  s.validate();
  return s;
}

GeneratedSample generate_architecture(std::uint64_t seed, const GeneratorSpec& spec) {
  Rng rng(seed);
  const int input = rng.pick(spec.input_sizes);
  const int depth = static_cast<int>(rng.uniform_int(spec.min_layers, spec.max_layers));
  const double p_bn = spec.p_batchnorm.at(depth);
  const double p_skip = spec.p_skip.at(depth);
  const double p_drop = spec.p_dropout.at(depth);

  std::vector<LayerSpec> layers;
  std::size_t width = static_cast<std::size_t>(input);
  for (int k = 0; k + 1 < depth; ++k) {
    // Residual block: keep the width so the block input can be added back.
    const bool skip = k >= 1 && rng.bernoulli(p_skip);
    const std::size_t block_input = layers.size() - (layers.empty() ? 0 : 1);
    const std::size_t units = skip ? width : static_cast<std::size_t>(rng.pick(spec.neuron_counts));
    layers.push_back(dense(units));
    if (rng.bernoulli(p_bn)) layers.push_back(batch_norm());
    layers.push_back(activation(rng.pick(spec.hidden_activations)));
    if (skip) layers.push_back(skip_add(block_input));
    if (rng.bernoulli(p_drop)) layers.push_back(dropout());
    width = units;
  }
  const auto out = static_cast<std::size_t>(rng.uniform_int(spec.min_output, spec.max_output));
  layers.push_back(dense(out));
  ActKind head;
  if (out > 1 && rng.bernoulli(spec.p_softmax_output)) {
    head = ActKind::Softmax;
  } else {
    std::vector<ActKind> choices;
    for (ActKind a : spec.output_activations) {
      if (out > 1 || a != ActKind::Softmax) choices.push_back(a);
    }
    if (choices.empty()) choices = spec.hidden_activations;
    head = rng.pick(choices);
  }
  layers.push_back(activation(head));

  SynthesisConfig cfg;
  cfg.precision_bits = rng.pick(spec.precisions);
  cfg.global_reuse = rng.pick(spec.reuse_factors);
  cfg.board_id = rng.pick(spec.boards);
  cfg.strategy = rng.pick(spec.strategies);

  char name[32];
  std::snprintf(name, sizeof(name), "synth-%016llx", static_cast<unsigned long long>(seed));
  NetworkArchitecture net = make_network(name, static_cast<std::size_t>(input), std::move(layers));
  net = apply_reuse(net, static_cast<std::size_t>(cfg.global_reuse));
  return {std::move(net), std::move(cfg), seed};
}

std::vector<GeneratedSample> generate_batch(std::uint64_t master_seed, std::size_t count,
                                            const GeneratorSpec& spec, unsigned workers) {
  spec.validate();
  std::vector<GeneratedSample> out(count);
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(count, 1))));
  auto run = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) out[i] = generate_architecture(derive_seed(master_seed, i), spec);
  };
  if (workers == 1) {
    run(0, count);
    return out;
  }
  std::vector<std::thread> threads;
  const std::size_t chunk = (count + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    const std::size_t begin = std::min(count, w * chunk);
    const std::size_t end = std::min(count, begin + chunk);
    threads.emplace_back(run, begin, end);
  }
  for (auto& t : threads) t.join();
  return out;
}

double clamp_utilization(double pct) { return std::clamp(pct, 0.0, kUtilizationCap); }

Targets normalize_targets(const RawTargets& raw, const BoardSpec& board) {
  if (board.bram_capacity <= 0 || board.dsp_capacity <= 0 || board.ff_capacity <= 0 ||
      board.lut_capacity <= 0) {
    throw ConfigError("board '" + board.id + "' has a nonpositive capacity");
  }
  if (raw.bram < 0 || raw.dsp < 0 || raw.ff < 0 || raw.lut < 0 || raw.cycles < 0) {
    throw DataError("negative raw resource or cycle count");
  }
  auto pct = [](double count, std::int64_t cap) {
    return clamp_utilization(100.0 * count / static_cast<double>(cap));
  };
  return {pct(raw.bram, board.bram_capacity), pct(raw.dsp, board.dsp_capacity),
          pct(raw.ff, board.ff_capacity), pct(raw.lut, board.lut_capacity), raw.cycles};
}

namespace {

std::string_view source_name(RecordSource s) {
  return s == RecordSource::Synthetic ? "synthetic" : "ingested";
}

std::array<double, 5> target_array(const Targets& t) {
  return {t.bram_pct, t.dsp_pct, t.ff_pct, t.lut_pct, t.cycles};
}

}  // namespace

void write_dataset(std::ostream& out, const Dataset& ds, bool with_targets) {
  std::vector<std::string> header{"name", "source", "architecture"};
  for (auto n : feature_names()) header.emplace_back(n);
  for (auto n : kTargetColumns) header.emplace_back(n);
  csv::write_row(out, header);
  for (const TrainingRecord& r : ds.records) {
    std::vector<std::string> row{r.meta.name, std::string(source_name(r.meta.source)),
                                 r.meta.architecture};
    for (double v : feature_vector(r.features)) row.push_back(csv::format_double(v));
    for (double v : target_array(r.targets)) row.push_back(with_targets ? csv::format_double(v) : "");
    csv::write_row(out, row);
  }
}

void write_dataset_file(const std::string& path, const Dataset& ds, bool with_targets) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write '" + path + "'");
  write_dataset(out, ds, with_targets);
  if (!out) throw DataError("write failed for '" + path + "'");
}

namespace {

struct Mapping {
  std::map<std::string, std::string> columns;  // canonical -> foreign
  bool absolute_units = false;

  std::string foreign(std::string_view canonical) const {
    auto it = columns.find(std::string(canonical));
    return it == columns.end() ? std::string(canonical) : it->second;
  }
};

Mapping parse_mapping(std::optional<std::string_view> text) {
  Mapping m;
  if (!text) return m;
  json doc;
  try {
    doc = json::parse(*text);
  } catch (const json::parse_error& e) {
    throw DataError(std::string("column mapping is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw DataError("column mapping must be an object");
  for (const auto& [key, v] : doc.items()) {
    if (key == "columns") {
      if (!v.is_object()) throw DataError("mapping 'columns' must be an object");
      for (const auto& [canon, foreign] : v.items()) {
        if (!foreign.is_string()) throw DataError("mapping for '" + canon + "' must be a string");
        m.columns[canon] = foreign.get<std::string>();
      }
    } else if (key == "target_units") {
      const std::string u = v.get<std::string>();
      if (u == "absolute") m.absolute_units = true;
      else if (u != "percent") throw DataError("target_units must be 'percent' or 'absolute'");
    } else {
      throw DataError("column mapping: unknown field '" + key + "'");
    }
  }
  return m;
}

}  // namespace

IngestResult ingest_table(const csv::Table& table, std::optional<std::string_view> mapping_text,
                          const BoardRegistry& boards) {
  const Mapping mapping = parse_mapping(mapping_text);

  // Mapped names must exist; unmapped canonical names are optional here and
  // checked below against the feature/target requirements.
  for (const auto& [canon, foreign] : mapping.columns) {
    if (!table.column(foreign)) {
      throw DataError("mapping references absent column '" + foreign + "' (for '" + canon + "')");
    }
  }
  auto col = [&](std::string_view canonical) { return table.column(mapping.foreign(canonical)); };
  auto need = [&](std::string_view canonical) {
    auto c = col(canonical);
    if (!c) throw DataError("required column '" + mapping.foreign(canonical) + "' is absent");
    return *c;
  };

  const std::array<std::string_view, 5> abs_targets{"bram", "dsp", "ff", "lut", "cycles"};
  std::array<std::size_t, 5> target_cols{};
  for (std::size_t t = 0; t < 5; ++t) {
    target_cols[t] = need(mapping.absolute_units ? abs_targets[t] : kTargetColumns[t]);
  }

  std::array<std::optional<std::size_t>, kFeatureCount> feature_cols;
  bool all_features = true;
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    feature_cols[i] = col(feature_names()[i]);
    all_features = all_features && feature_cols[i].has_value();
  }
  const auto arch_col = col("architecture");
  const auto board_col = col("board");
  const auto strategy_col = col("strategy");
  const auto precision_col = col("precision_bits");
  const auto reuse_col = col("global_reuse");
  const auto name_col = col("name");
  const auto source_col = col("source");
  if (!all_features) {
    if (!arch_col || !board_col || !strategy_col || !precision_col || !reuse_col) {
      throw DataError(
          "dataset needs either every feature column or architecture, board, strategy, "
          "precision_bits and global_reuse columns");
    }
  }
  if (mapping.absolute_units && !board_col) {
    throw DataError("absolute target units require a board column");
  }

  IngestResult result;
  IngestReport& rep = result.report;
  auto skip = [&](std::size_t row, const std::string& why) {
    ++rep.rows_skipped;
    if (rep.skip_reasons.size() < 20) rep.skip_reasons.push_back("row " + std::to_string(row + 1) + ": " + why);
  };

  for (std::size_t r = 0; r < table.rows.size(); ++r) {
    const auto& row = table.rows[r];
    ++rep.rows_read;
    try {
      std::array<double, 5> tv{};
      bool ok = true;
      for (std::size_t t = 0; t < 5 && ok; ++t) {
        auto v = csv::parse_double(row[target_cols[t]]);
        if (!v) {
          skip(r, "non-numeric or missing value in '" + table.header[target_cols[t]] + "'");
          ok = false;
        } else if (*v < 0) {
          skip(r, "negative value in '" + table.header[target_cols[t]] + "'");
          ok = false;
        } else {
          tv[t] = *v;
        }
      }
      if (!ok) continue;

      TrainingRecord rec;
      rec.meta.source = RecordSource::Ingested;
      if (source_col && row[*source_col] == "synthetic") rec.meta.source = RecordSource::Synthetic;
      if (name_col) rec.meta.name = row[*name_col];
      if (arch_col) rec.meta.architecture = row[*arch_col];

      if (all_features) {
        std::array<double, kFeatureCount> fv{};
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
          auto v = csv::parse_double(row[*feature_cols[i]]);
          if (!v) throw DataError("non-numeric value in '" + table.header[*feature_cols[i]] + "'");
          fv[i] = *v;
        }
        rec.features = features_from_vector(fv);
        if (rec.features.board_index >= static_cast<int>(boards.size())) {
          throw DataError("board_index outside the board registry");
        }
        if (rec.features.strategy_index > 1) throw DataError("strategy_index must be 0 or 1");
      } else {
        SynthesisConfig cfg;
        cfg.board_id = row[*board_col];
        cfg.strategy = parse_strategy(row[*strategy_col]);
        auto p = csv::parse_double(row[*precision_col]);
        auto g = csv::parse_double(row[*reuse_col]);
        if (!p || !g || *p != std::floor(*p) || *g != std::floor(*g)) {
          throw DataError("precision_bits and global_reuse must be integers");
        }
        cfg.precision_bits = static_cast<int>(*p);
        cfg.global_reuse = static_cast<int>(*g);
        rec.features = extract_features(parse_network(row[*arch_col]), cfg, boards);
      }

      if (mapping.absolute_units) {
        const BoardSpec& board = boards.at(row[*board_col]);
        RawTargets raw{tv[0], tv[1], tv[2], tv[3], tv[4]};
        const std::array<std::pair<double, std::int64_t>, 4> usage{
            {{raw.bram, board.bram_capacity}, {raw.dsp, board.dsp_capacity},
             {raw.ff, board.ff_capacity}, {raw.lut, board.lut_capacity}}};
        for (const auto& [count, cap] : usage) {
          if (100.0 * count / static_cast<double>(cap) > kUtilizationCap) ++rep.values_clamped;
        }
        rec.targets = normalize_targets(raw, board);
      } else {
        for (std::size_t t = 0; t < 4; ++t) {
          if (tv[t] > kUtilizationCap) ++rep.values_clamped;
        }
        rec.targets = {clamp_utilization(tv[0]), clamp_utilization(tv[1]), clamp_utilization(tv[2]),
                       clamp_utilization(tv[3]), tv[4]};
      }
      result.dataset.records.push_back(std::move(rec));
      ++rep.rows_kept;
    } catch (const Error& e) {
      skip(r, e.what());
    }
  }
  if (result.dataset.empty()) throw DataError("dataset has no valid rows");
  return result;
}

IngestResult ingest_dataset(const std::string& path, std::optional<std::string_view> mapping,
                            const BoardRegistry& boards) {
  return ingest_table(csv::read_file(path), mapping, boards);
}

std::array<Dataset, 3> split_dataset(const Dataset& ds, std::array<double, 3> fractions,
                                     std::uint64_t seed) {
  if (ds.size() < 3) throw DataError("split_dataset: need at least 3 rows");
  double sum = 0;
  for (double f : fractions) {
    if (!(f > 0)) throw DataError("split_dataset: fractions must be positive");
    sum += f;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw DataError("split_dataset: fractions must sum to 1");

  const std::size_t n = ds.size();
  std::array<std::size_t, 3> sizes{};
  std::array<double, 3> rem{};
  std::size_t assigned = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    const double exact = fractions[k] * static_cast<double>(n);
    sizes[k] = static_cast<std::size_t>(std::floor(exact));
    rem[k] = exact - static_cast<double>(sizes[k]);
    assigned += sizes[k];
  }
  std::array<std::size_t, 3> order{0, 1, 2};
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rem[a] > rem[b]; });
  for (std::size_t i = 0; assigned < n; ++i, ++assigned) ++sizes[order[i % 3]];

  std::vector<std::size_t> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  Rng rng(seed);
  rng.shuffle(idx);

  std::array<Dataset, 3> out;
  std::size_t pos = 0;
  for (std::size_t k = 0; k < 3; ++k) {
    out[k].schema_version = ds.schema_version;
    out[k].records.reserve(sizes[k]);
    for (std::size_t i = 0; i < sizes[k]; ++i) out[k].records.push_back(ds.records[idx[pos++]]);
  }
  return out;
}

std::pair<std::vector<std::vector<double>>, std::vector<std::string>> dataset_columns(
    const Dataset& ds) {
  std::vector<std::string> names;
  for (auto n : feature_names()) names.emplace_back(n);
  for (auto n : kTargetColumns) names.emplace_back(n);
  std::vector<std::vector<double>> cols(names.size());
  for (auto& c : cols) c.reserve(ds.size());
  for (const TrainingRecord& r : ds.records) {
    const auto fv = feature_vector(r.features);
    const auto tv = target_array(r.targets);
    for (std::size_t i = 0; i < kFeatureCount; ++i) cols[i].push_back(fv[i]);
    for (std::size_t t = 0; t < 5; ++t) cols[kFeatureCount + t].push_back(tv[t]);
  }
  return {std::move(cols), std::move(names)};
}

CorrelationMatrix spearman_matrix(const Dataset& ds) {
  if (ds.empty()) throw DataError("spearman_matrix: empty dataset");
  auto [cols, names] = dataset_columns(ds);
  return spearman_matrix(cols, std::move(names));
}

Dataset make_dataset(const std::vector<GeneratedSample>& samples, const BoardRegistry& boards) {
  Dataset ds;
  ds.records.reserve(samples.size());
  for (const GeneratedSample& s : samples) {
    TrainingRecord r;
    r.features = extract_features(s.network, s.config, boards);
    r.meta.source = RecordSource::Synthetic;
    r.meta.name = s.network.name;
    r.meta.architecture = serialize_network(s.network);
    ds.records.push_back(std::move(r));
  }
  return ds;
}

void assign_pseudo_targets(Dataset& ds, std::uint64_t seed) {
  if (ds.empty()) return;
  Rng rng(seed);
  constexpr std::size_t kNum = kNumericFeatureCount;

  // Column spread so each feature contributes on a comparable scale.
  std::array<double, kNum> mean{}, sd{};
  for (const auto& r : ds.records) {
    const auto f = numeric_features(r.features);
    for (std::size_t j = 0; j < kNum; ++j) mean[j] += f[j];
  }
  for (double& m : mean) m /= static_cast<double>(ds.size());
  for (const auto& r : ds.records) {
    const auto f = numeric_features(r.features);
    for (std::size_t j = 0; j < kNum; ++j) sd[j] += (f[j] - mean[j]) * (f[j] - mean[j]);
  }
  for (double& s : sd) s = std::sqrt(s / static_cast<double>(ds.size()));

  const std::array<std::pair<double, double>, 5> ranges{
      {{0, 150}, {0, 150}, {0, 150}, {0, 150}, {10, 5000}}};
  std::array<std::vector<double>, 5> scores;
  for (std::size_t t = 0; t < 5; ++t) {
    std::array<double, kNum> coef{};
    for (double& c : coef) c = rng.uniform(-1.0, 1.0);
    std::array<double, 8> board_shift{};
    for (double& b : board_shift) b = rng.uniform(-1.0, 1.0);
    const double strategy_shift = rng.uniform(-1.0, 1.0);
    scores[t].reserve(ds.size());
    for (const auto& r : ds.records) {
      const auto f = numeric_features(r.features);
      double s = 0;
      for (std::size_t j = 0; j < kNum; ++j) {
        if (sd[j] > 0) s += coef[j] * f[j] / sd[j];
      }
      s += board_shift[static_cast<std::size_t>(r.features.board_index) % board_shift.size()];
      s += strategy_shift * r.features.strategy_index;
      scores[t].push_back(s);
    }
  }
  for (std::size_t t = 0; t < 5; ++t) {
    const auto [lo_it, hi_it] = std::minmax_element(scores[t].begin(), scores[t].end());
    const double lo = *lo_it, hi = *hi_it;
    const double scale = hi > lo ? (ranges[t].second - ranges[t].first) / (hi - lo) : 0.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const double v = ranges[t].first + (scores[t][i] - lo) * scale;
      Targets& tg = ds.records[i].targets;
      switch (t) {
        case 0: tg.bram_pct = v; break;
        case 1: tg.dsp_pct = v; break;
        case 2: tg.ff_pct = v; break;
        case 3: tg.lut_pct = v; break;
        case 4: tg.cycles = v; break;
      }
    }
  }
}

}  // namespace fpgacost
