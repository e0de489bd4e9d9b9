// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0

#include "fpgacost/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "fpgacost/bench.hpp"
#include "fpgacost/error.hpp"
#include "fpgacost/report.hpp"
#include "fpgacost/rng.hpp"

namespace fpgacost {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

constexpr std::array<double, 3> kSplit{0.8, 0.1, 0.1};

std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::ostringstream s;
  s << in.rdbuf();
  if (in.bad()) throw IoError("read failed for '" + path + "'");
  return s.str();
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

struct ConfigFlags {
  std::string board;
  std::string strategy;
  int precision = 0;
  int reuse = 0;
  double clock = 10.0;

  void add_to(CLI::App* app) {
    app->add_option("--board", board, "Board id from the registry")->required();
    app->add_option("--strategy", strategy, "Latency or Resource")->required();
    app->add_option("--precision", precision, "Fixed-point width in bits")->required();
    app->add_option("--reuse", reuse, "Global reuse factor")->required();
    app->add_option("--clock", clock, "Clock period in ns (reported only)");
  }

  SynthesisConfig config() const {
    SynthesisConfig c;
    c.board_id = board;
    c.strategy = parse_strategy(strategy);
    c.precision_bits = precision;
    c.global_reuse = reuse;
    c.clock_period_ns = clock;
    validate(c);
    return c;
  }
};

Dataset load_dataset(const std::string& path, const std::string& mapping_path,
                     const BoardRegistry& boards, std::ostream& err) {
  std::optional<std::string> mapping;
  if (!mapping_path.empty()) mapping = read_text(mapping_path);
  if (!fs::exists(path)) throw IoError("cannot open '" + path + "'");
  IngestResult res = ingest_dataset(path, mapping, boards);
  const IngestReport& r = res.report;
  err << "ingested " << r.rows_kept << " of " << r.rows_read << " rows (" << r.rows_skipped
      << " skipped, " << r.values_clamped << " values clamped)\n";
  for (const std::string& why : r.skip_reasons) err << "  skipped: " << why << "\n";
  return std::move(res.dataset);
}

std::vector<Target> targets_from_flag(const std::string& flag) {
  if (flag == "all") return {kAllTargets.begin(), kAllTargets.end()};
  return {parse_target(flag)};
}

json history_json(const TrainHistory& h) {
  json j;
  j["best_epoch"] = h.best_epoch + 1;
  json epochs = json::array();
  for (const EpochStats& e : h.epochs) {
    epochs.push_back({{"train_loss", e.train_loss},
                      {"val_loss", e.val_loss},
                      {"val_smape", e.val_smape},
                      {"val_r2", e.val_r2}});
  }
  j["epochs"] = epochs;
  return j;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Pre-synthesis FPGA resource and latency estimator for fully connected networks",
               "fpgacost"};
  app.require_subcommand(1);
  std::string boards_path;
  app.add_option("--boards", boards_path, "Board registry file (defaults to the built-in registry)");

  // predict
  auto* predict = app.add_subcommand("predict", "Predict utilization and latency for one network");
  std::string network_path, models_dir;
  bool as_json = false;
  ConfigFlags pflags;
  predict->add_option("--network", network_path, "Network document (JSON)")->required();
  predict->add_option("--models", models_dir, "Directory with the five model files")->required();
  predict->add_flag("--json", as_json, "Structured output");
  pflags.add_to(predict);

  // features
  auto* features = app.add_subcommand("features", "Print the engineered feature vector");
  ConfigFlags fflags;
  features->add_option("--network", network_path, "Network document (JSON)")->required();
  features->add_flag("--json", as_json, "Structured output");
  fflags.add_to(features);

  // generate
  auto* generate = app.add_subcommand("generate", "Generate random architectures as dataset rows");
  std::uint64_t seed = 0;
  std::size_t count = 0;
  std::string out_path, overrides_path;
  unsigned workers = 1;
  bool pseudo = false;
  generate->add_option("--seed", seed, "Master seed")->required();
  generate->add_option("--count", count, "Number of architectures")->required();
  generate->add_option("--out", out_path, "Output dataset file")->required();
  generate->add_option("--overrides", overrides_path, "Generator overrides (JSON)");
  generate->add_option("--workers", workers, "Worker threads; output does not depend on it");
  generate->add_flag("--pseudo-targets", pseudo,
                     "Fill targets with a seeded linear function of the features instead of "
                     "leaving them empty");

  // train
  auto* train_cmd = app.add_subcommand("train", "Train regressors on a dataset");
  std::string data_path, mapping_path, target_flag = "all";
  std::optional<std::size_t> epochs, batch;
  std::optional<double> lr;
  train_cmd->add_option("--data", data_path, "Dataset file")->required();
  train_cmd->add_option("--mapping", mapping_path, "Column mapping (JSON) for foreign schemas");
  train_cmd->add_option("--target", target_flag, "bram, dsp, ff, lut, cycles or all");
  train_cmd->add_option("--out", out_path, "Output model directory")->required();
  train_cmd->add_option("--seed", seed, "Seed for splitting, initialization and shuffling")->required();
  train_cmd->add_option("--epochs", epochs, "Override the epoch count (default 50)");
  train_cmd->add_option("--batch-size", batch, "Override the per-target batch size");
  train_cmd->add_option("--lr", lr, "Override the per-target learning rate");

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Score a model set on the held-out split");
  std::string split = "test";
  evaluate->add_option("--models", models_dir, "Model directory")->required();
  evaluate->add_option("--data", data_path, "Dataset file")->required();
  evaluate->add_option("--mapping", mapping_path, "Column mapping (JSON) for foreign schemas");
  evaluate->add_option("--seed", seed, "Split seed used at training time")->required();
  evaluate->add_option("--split", split, "test, val, train or all")
      ->check(CLI::IsMember({"test", "val", "train", "all"}));
  evaluate->add_flag("--json", as_json, "Structured output");

  // bench
  auto* bench = app.add_subcommand("bench", "Run the benchmark sweep, optionally against ground truth");
  std::string truth_path;
  std::vector<std::string> extra_boards;
  bench->add_option("--models", models_dir, "Model directory")->required();
  bench->add_option("--truth", truth_path, "Ground-truth file");
  bench->add_option("--board", extra_boards, "Add a board to the default zcu102/pynq-z2 grid");
  bench->add_option("--out", out_path, "Write the sweep table here instead of standard output");
  bench->add_option("--workers", workers, "Worker threads; output does not depend on it");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    const BoardRegistry boards =
        boards_path.empty() ? default_board_registry() : load_board_registry(read_text(boards_path));

    if (*predict) {
      const NetworkArchitecture net = parse_network(read_text(network_path));
      const SynthesisConfig cfg = pflags.config();
      boards.at(cfg.board_id);
      const ModelSet models = load_model_set(models_dir);
      const PredictionReport r = predict_all(models, net, cfg, boards);
      out << (as_json ? report_json(r) : report_text(r));
    } else if (*features) {
      const NetworkArchitecture net = parse_network(read_text(network_path));
      const EngineeredFeatures f = extract_features(net, fflags.config(), boards);
      const auto values = feature_vector(f);
      if (as_json) {
        json j;
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
          j[std::string(feature_names()[i])] = json::parse(csv::format_double(values[i]));
        }
        out << j.dump(2) << "\n";
      } else {
        for (std::size_t i = 0; i < kFeatureCount; ++i) {
          out << feature_names()[i] << ": " << csv::format_double(values[i]) << "\n";
        }
      }
    } else if (*generate) {
      GeneratorSpec spec = default_generator_spec();
      if (!overrides_path.empty()) spec = apply_generator_overrides(spec, read_text(overrides_path));
      Dataset ds = make_dataset(generate_batch(seed, count, spec, workers), boards);
      if (pseudo) assign_pseudo_targets(ds, seed);
      std::ofstream f(out_path, std::ios::binary);
      if (!f) throw IoError("cannot write '" + out_path + "'");
      write_dataset(f, ds, pseudo);
      if (!f) throw IoError("write failed for '" + out_path + "'");
      out << "wrote " << ds.size() << " records to " << out_path << "\n";
    } else if (*train_cmd) {
      const std::vector<Target> targets = targets_from_flag(target_flag);
      const Dataset ds = load_dataset(data_path, mapping_path, boards, err);
      const auto parts = split_dataset(ds, kSplit, seed);
      std::error_code ec;
      fs::create_directories(out_path, ec);
      if (ec) throw IoError("cannot create '" + out_path + "': " + ec.message());
      for (Target t : targets) {
        const auto ti = static_cast<std::uint64_t>(t);
        TrainConfig cfg = default_train_config(t);
        cfg.seed = derive_seed(seed, 100 + ti);
        if (epochs) cfg.epochs = *epochs;
        if (batch) cfg.batch_size = *batch;
        if (lr) cfg.learning_rate = *lr;
        auto [model, history] =
            train(build_model(t, derive_seed(seed, 1 + ti), boards.size()), parts[0], parts[1], cfg);
        const fs::path dir(out_path);
        save_model(model, (dir / model_file_name(t)).string());
        write_text((dir / (std::string(to_string(t)) + ".history.json")).string(),
                   history_json(history).dump(2) + "\n");
        const EpochStats& best = history.epochs[history.best_epoch];
        out << to_string(t) << ": " << history.epochs.size() << " epochs, best epoch "
            << history.best_epoch + 1 << ", val mae " << best.val_loss << ", val smape "
            << best.val_smape << ", val r2 " << best.val_r2 << "\n";
      }
    } else if (*evaluate) {
      const ModelSet models = load_model_set(models_dir);
      const Dataset ds = load_dataset(data_path, mapping_path, boards, err);
      Dataset part;
      if (split == "all") {
        part = ds;
      } else {
        const auto parts = split_dataset(ds, kSplit, seed);
        part = parts[split == "train" ? 0 : split == "val" ? 1 : 2];
      }
      if (part.empty()) throw DataError("the " + split + " split is empty");
      const auto ev = evaluate_models(models, part);
      out << (as_json ? evaluation_json(ev) : evaluation_text(ev));
    } else if (*bench) {
      SweepGrid grid;
      for (const std::string& b : extra_boards) {
        boards.at(b);
        if (std::find(grid.boards.begin(), grid.boards.end(), b) == grid.boards.end()) grid.boards.push_back(b);
      }
      const ModelSet models = load_model_set(models_dir);
      const auto rows = run_sweep(models, builtin_benchmarks(), grid, boards, workers);
      if (out_path.empty()) {
        write_sweep(out, rows);
      } else {
        std::ofstream f(out_path, std::ios::binary);
        if (!f) throw IoError("cannot write '" + out_path + "'");
        write_sweep(f, rows);
        out << "wrote " << rows.size() << " sweep rows to " << out_path << "\n";
      }
      if (!truth_path.empty()) {
        if (!fs::exists(truth_path)) throw IoError("cannot open '" + truth_path + "'");
        out << "\n" << comparison_text(compare_with_ground_truth(rows, read_truth_file(truth_path)));
      }
    }
    return kExitOk;
  } catch (const NetworkError& e) {
    err << "network error: " << e.what() << "\n";
    return kExitNetwork;
  } catch (const ModelError& e) {
    err << "model error: " << e.what() << "\n";
    return kExitModel;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DataError& e) {
    err << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const TrainingError& e) {
    err << "training error: " << e.what() << "\n";
    return kExitTraining;
  } catch (const IoError& e) {
    err << "i/o error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

}  // namespace fpgacost
