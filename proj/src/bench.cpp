// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0

#include "fpgacost/bench.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <thread>

#include "fpgacost/error.hpp"

namespace fpgacost {

namespace {

using Widths = std::vector<std::pair<std::size_t, ActKind>>;

NetworkArchitecture mlp(const std::string& name, std::size_t input, const Widths& widths,
                        bool use_bias = true) {
  std::vector<LayerSpec> layers;
  for (const auto& [units, act] : widths) {
    layers.push_back(dense(units, use_bias));
    layers.push_back(activation(act));
  }
  return make_network(name, input, std::move(layers));
}

// Five Dense(32) blocks: Dense, BN, ReLU, [SkipAdd to previous block], BN.
NetworkArchitecture custom3() {
  std::vector<LayerSpec> layers;
  std::optional<std::size_t> previous_block_end;
  for (int block = 0; block < 5; ++block) {
    layers.push_back(dense(32));
    layers.push_back(batch_norm());
    layers.push_back(activation(ActKind::ReLU));
    if (previous_block_end) layers.push_back(skip_add(*previous_block_end));
    layers.push_back(batch_norm());
    previous_block_end = layers.size() - 1;
  }
  layers.push_back(dense(10));
  layers.push_back(activation(ActKind::Softmax));
  return make_network("Custom 3", 64, std::move(layers));
}

}  // namespace

std::vector<BenchmarkFixture> builtin_benchmarks() {
  constexpr ActKind R = ActKind::ReLU;
  constexpr ActKind S = ActKind::Softmax;
  std::vector<BenchmarkFixture> f;
  f.push_back({"JET", mlp("JET", 16, {{32, R}, {32, R}, {32, R}, {5, S}}), 2821,
               "drawn with four hidden layers; encoded with the three that give the published size"});
  f.push_back({"Top Quarks", mlp("Top Quarks", 10, {{32, R}, {1, ActKind::Sigmoid}}), 385, ""});
  f.push_back({"Anomaly", mlp("Anomaly", 128, {{8, R}, {4, R}, {128, R}, {4, R}, {128, S}}), 2864, ""});
  f.push_back({"BiPC", mlp("BiPC", 36, {{36, R}, {36, R}, {36, R}, {36, R}, {36, R}, {36, R}}, false),
               7776, "drawn with five biased layers; encoded as six bias-free layers"});
  f.push_back({"CookieBox", mlp("CookieBox", 512, {{4, R}, {32, R}, {32, R}, {5, S}}), 3433, ""});
  f.push_back({"MNIST", mlp("MNIST", 784, {{16, R}, {10, S}}), 12730, ""});
  f.push_back({"Automlp", mlp("Automlp", 7, {{12, R}, {16, R}, {12, R}, {2, S}}), 534, ""});
  f.push_back({"Particle Tracking", mlp("Particle Tracking", 14, {{32, R}, {32, R}, {32, R}, {3, S}}),
               2691, ""});
  f.push_back({"Custom 1", mlp("Custom 1", 16, {{64, R}, {32, R}, {32, R}, {32, R}, {10, S}}), 5610, ""});
  f.push_back({"Custom 2", mlp("Custom 2", 128, {{16, R}, {64, R}, {32, R}, {64, R}, {32, R}, {50, S}}),
               11074, ""});
  f.push_back({"Custom 3", custom3(), 7274,
               "drawn with four dense layers; encoded with batch-norm residual blocks that give the "
               "published size"});
  return f;
}

std::size_t SweepGrid::combinations() const {
  return boards.size() * strategies.size() * precisions.size() * reuse_factors.size();
}

void SweepGrid::validate(const BoardRegistry& registry) const {
  auto unique = [](auto v) {
    std::sort(v.begin(), v.end());
    return std::adjacent_find(v.begin(), v.end()) == v.end();
  };
  if (boards.empty() || strategies.empty() || precisions.empty() || reuse_factors.empty()) {
    throw ConfigError("sweep grid has an empty axis");
  }
  if (!unique(boards) || !unique(strategies) || !unique(precisions) || !unique(reuse_factors)) {
    throw ConfigError("sweep grid axis contains duplicates");
  }
  for (const std::string& b : boards) registry.at(b);
  for (int p : precisions) {
    if (p <= 0) throw ConfigError("sweep precision must be positive");
  }
  for (int r : reuse_factors) {
    if (r <= 0) throw ConfigError("sweep reuse factor must be positive");
  }
}

bool is_unsynthesizable(const NetworkArchitecture& net, Strategy strategy) {
  if (strategy != Strategy::Latency) return false;
  return std::any_of(net.layers.begin(), net.layers.end(), [](const LayerSpec& l) {
    return l.kind == LayerKind::Dense && layer_params(l) > kLatencyUnrollLimit;
  });
}

std::string to_string(const SweepKey& k) {
  return k.benchmark + "/" + k.board + "/" + std::string(to_string(k.strategy)) + "/" +
         std::to_string(k.precision) + "b/r" + std::to_string(k.reuse);
}

std::vector<SweepRow> run_sweep(const ModelSet& models, const std::vector<BenchmarkFixture>& fixtures,
                                const SweepGrid& grid, const BoardRegistry& boards, unsigned workers) {
  grid.validate(boards);
  std::vector<SweepRow> rows;
  rows.reserve(fixtures.size() * grid.combinations());
  for (const BenchmarkFixture& fx : fixtures) {
    for (const std::string& b : grid.boards) {
      for (Strategy s : grid.strategies) {
        for (int p : grid.precisions) {
          for (int r : grid.reuse_factors) {
            SweepRow row;
            row.key = {fx.name, b, s, p, r};
            row.unsynthesizable = is_unsynthesizable(fx.network, s);
            rows.push_back(std::move(row));
          }
        }
      }
    }
  }
  std::map<std::string, const NetworkArchitecture*> nets;
  for (const BenchmarkFixture& fx : fixtures) nets[fx.name] = &fx.network;

  auto work = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      SweepRow& row = rows[i];
      SynthesisConfig cfg;
      cfg.board_id = row.key.board;
      cfg.strategy = row.key.strategy;
      cfg.precision_bits = row.key.precision;
      cfg.global_reuse = row.key.reuse;
      row.report = predict_all(models, *nets.at(row.key.benchmark), cfg, boards);
    }
  };
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(rows.size())));
  if (workers == 1) {
    work(0, rows.size());
    return rows;
  }
  std::vector<std::thread> pool;
  std::vector<std::exception_ptr> errors(workers);
  const std::size_t chunk = (rows.size() + workers - 1) / workers;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      try {
        work(std::min(rows.size(), w * chunk), std::min(rows.size(), (w + 1) * chunk));
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return rows;
}

void write_sweep(std::ostream& out, const std::vector<SweepRow>& rows) {
  csv::write_row(out, {"benchmark", "board", "strategy", "precision", "reuse", "bram_pct", "dsp_pct",
                       "ff_pct", "lut_pct", "cycles", "latency_ns", "unsynthesizable"});
  for (const SweepRow& r : rows) {
    const PredictionReport& p = r.report;
    csv::write_row(out, {r.key.benchmark, r.key.board, std::string(to_string(r.key.strategy)),
                         std::to_string(r.key.precision), std::to_string(r.key.reuse),
                         csv::format_double(p.bram.predicted_pct), csv::format_double(p.dsp.predicted_pct),
                         csv::format_double(p.ff.predicted_pct), csv::format_double(p.lut.predicted_pct),
                         std::to_string(p.cycles), csv::format_double(p.latency_ns),
                         r.unsynthesizable ? "1" : "0"});
  }
}

namespace {

int parse_int_field(const std::string& s, const std::string& what, std::size_t line) {
  const auto v = csv::parse_double(s);
  if (!v || *v != std::floor(*v) || *v < 1 || *v > 1e9) {
    throw DataError("truth row " + std::to_string(line) + ": bad " + what + " '" + s + "'");
  }
  return static_cast<int>(*v);
}

std::array<double, 5> predicted_values(const PredictionReport& r) {
  return {r.bram.predicted_pct, r.dsp.predicted_pct, r.ff.predicted_pct, r.lut.predicted_pct,
          static_cast<double>(r.cycles)};
}

}  // namespace

std::vector<TruthRow> parse_truth(const csv::Table& table) {
  auto need = [&](std::string_view name) {
    const auto c = table.column(name);
    if (!c) throw DataError("truth file lacks the '" + std::string(name) + "' column");
    return *c;
  };
  const std::size_t bench_c = need("benchmark"), board_c = need("board"), strat_c = need("strategy"),
                    prec_c = need("precision"), reuse_c = need("reuse");
  std::array<std::optional<std::size_t>, 5> target_c;
  for (std::size_t t = 0; t < 5; ++t) target_c[t] = table.column(kTargetColumns[t]);

  std::vector<TruthRow> out;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const auto& row = table.rows[i];
    const std::size_t line = i + 2;
    TruthRow tr;
    tr.key.benchmark = row[bench_c];
    tr.key.board = row[board_c];
    try {
      tr.key.strategy = parse_strategy(row[strat_c]);
    } catch (const ConfigError& e) {
      throw DataError("truth row " + std::to_string(line) + ": " + e.what());
    }
    tr.key.precision = parse_int_field(row[prec_c], "precision", line);
    tr.key.reuse = parse_int_field(row[reuse_c], "reuse", line);
    for (std::size_t t = 0; t < 5; ++t) {
      if (!target_c[t]) continue;
      const std::string& cell = row[*target_c[t]];
      if (cell.empty() || cell == "NA" || cell == "-") continue;
      if (cell == "+") {
        if (kAllTargets[t] == Target::Cycles) {
          throw DataError("truth row " + std::to_string(line) + ": '+' is only valid for utilization");
        }
        tr.cells[t] = {kUtilizationCap, true};
        continue;
      }
      const auto v = csv::parse_double(cell);
      if (!v || *v < 0) {
        throw DataError("truth row " + std::to_string(line) + ": bad " +
                        std::string(kTargetColumns[t]) + " value '" + cell + "'");
      }
      // Values above the cap compare as the cap, like training targets.
      tr.cells[t] = {kAllTargets[t] == Target::Cycles ? *v : clamp_utilization(*v), false};
    }
    out.push_back(std::move(tr));
  }
  return out;
}

std::vector<TruthRow> read_truth_file(const std::string& path) { return parse_truth(csv::read_file(path)); }

namespace {

std::vector<TrendPoint> trend(const std::vector<ComparedRow>& rows, bool by_precision) {
  struct Acc {
    std::size_t rows = 0;
    std::array<double, 5> truth_sum{}, pred_sum{};
    std::array<std::size_t, 5> n{};
  };
  std::map<std::tuple<std::string, Strategy, int>, Acc> groups;
  for (const ComparedRow& r : rows) {
    Acc& a = groups[{r.key.board, r.key.strategy, by_precision ? r.key.precision : r.key.reuse}];
    ++a.rows;
    for (std::size_t t = 0; t < 5; ++t) {
      if (!r.truth[t].value) continue;
      a.truth_sum[t] += *r.truth[t].value;
      a.pred_sum[t] += r.predicted[t];
      ++a.n[t];
    }
  }
  std::vector<TrendPoint> out;
  for (const auto& [key, a] : groups) {
    TrendPoint p;
    std::tie(p.board, p.strategy, p.value) = key;
    p.rows = a.rows;
    for (std::size_t t = 0; t < 5; ++t) {
      if (a.n[t] == 0) continue;
      p.mean_truth[t] = a.truth_sum[t] / static_cast<double>(a.n[t]);
      p.mean_predicted[t] = a.pred_sum[t] / static_cast<double>(a.n[t]);
    }
    out.push_back(std::move(p));
  }
  return out;
}

}  // namespace

ComparisonReport compare_with_ground_truth(const std::vector<SweepRow>& sweep,
                                           const std::vector<TruthRow>& truth) {
  std::map<SweepKey, const SweepRow*> index;
  for (const SweepRow& r : sweep) index.emplace(r.key, &r);

  ComparisonReport rep;
  std::set<SweepKey> seen;
  for (const TruthRow& t : truth) {
    const auto it = index.find(t.key);
    if (it == index.end()) {
      rep.unmatched.push_back({t.key, "no sweep row with this key"});
      continue;
    }
    if (!seen.insert(t.key).second) {
      rep.unmatched.push_back({t.key, "duplicate truth row"});
      continue;
    }
    ComparedRow c;
    c.key = t.key;
    c.truth = t.cells;
    c.predicted = predicted_values(it->second->report);
    c.unsynthesizable = it->second->unsynthesizable;
    for (std::size_t k = 0; k < 5; ++k) {
      if (c.truth[k].value) c.abs_error[k] = std::abs(*c.truth[k].value - c.predicted[k]);
    }
    rep.rows.push_back(std::move(c));
  }
  std::sort(rep.rows.begin(), rep.rows.end(),
            [](const ComparedRow& a, const ComparedRow& b) { return a.key < b.key; });

  for (std::size_t k = 0; k < 5; ++k) {
    std::vector<double> errs;
    for (const ComparedRow& r : rep.rows) {
      if (r.abs_error[k]) errs.push_back(*r.abs_error[k]);
    }
    TargetErrorStats& s = rep.stats[k];
    s.threshold = kAllTargets[k] == Target::Cycles ? metrics::kCycleErrorThreshold
                                                   : metrics::kResourceErrorThreshold;
    s.n = errs.size();
    if (errs.empty()) continue;
    std::vector<double> zeros(errs.size(), 0.0);
    s.mae = metrics::mae(zeros, errs);
    s.distribution = metrics::error_distribution(errs);
    s.within_threshold = metrics::within_threshold_fraction(errs, s.threshold);
  }
  rep.by_precision = trend(rep.rows, true);
  rep.by_reuse = trend(rep.rows, false);
  return rep;
}

namespace {

std::string cell_text(const TruthCell& c) {
  if (c.above_cap) return "+";
  if (!c.value) return "NA";
  char b[32];
  std::snprintf(b, sizeof b, "%.0f", *c.value);
  return b;
}

std::string opt_text(const std::optional<double>& v) {
  if (!v) return "NA";
  char b[32];
  std::snprintf(b, sizeof b, "%.1f", *v);
  return b;
}

void trend_table(std::ostringstream& o, const char* title, const std::vector<TrendPoint>& pts) {
  o << "\n" << title << "\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-10s %-9s %6s %5s", "board", "strategy", "value", "rows");
  o << line;
  for (auto n : kTargetColumns) {
    std::snprintf(line, sizeof line, " %9s %9s", (std::string(n) + ":G").c_str(), (std::string(n) + ":P").c_str());
    o << line;
  }
  o << "\n";
  for (const TrendPoint& p : pts) {
    std::snprintf(line, sizeof line, "%-10s %-9s %6d %5zu", p.board.c_str(),
                  std::string(to_string(p.strategy)).c_str(), p.value, p.rows);
    o << line;
    for (std::size_t t = 0; t < 5; ++t) {
      std::snprintf(line, sizeof line, " %9s %9s", opt_text(p.mean_truth[t]).c_str(),
                    opt_text(p.mean_predicted[t]).c_str());
      o << line;
    }
    o << "\n";
  }
}

}  // namespace

std::string comparison_text(const ComparisonReport& rep) {
  std::ostringstream o;
  char line[256];
  o << "ground truth (G) vs prediction (P); + marks truth above 200%, * marks unsynthesizable\n";
  std::snprintf(line, sizeof line, "%-18s %-8s %-9s %4s %5s  %5s %5s  %5s %5s  %5s %5s  %5s %5s  %7s %7s\n",
                "benchmark", "board", "strategy", "prec", "reuse", "BRAM:G", "P", "DSP:G", "P", "FF:G", "P",
                "LUT:G", "P", "CYC:G", "P");
  o << line;
  for (const ComparedRow& r : rep.rows) {
    std::array<std::string, 5> g, p;
    for (std::size_t t = 0; t < 5; ++t) {
      g[t] = cell_text(r.truth[t]);
      char b[32];
      std::snprintf(b, sizeof b, "%.0f", r.predicted[t]);
      p[t] = b;
    }
    const std::string name = r.key.benchmark + (r.unsynthesizable ? "*" : "");
    std::snprintf(line, sizeof line,
                  "%-18s %-8s %-9s %4d %5d  %5s %5s  %5s %5s  %5s %5s  %5s %5s  %7s %7s\n", name.c_str(),
                  r.key.board.c_str(), std::string(to_string(r.key.strategy)).c_str(), r.key.precision,
                  r.key.reuse, g[0].c_str(), p[0].c_str(), g[1].c_str(), p[1].c_str(), g[2].c_str(),
                  p[2].c_str(), g[3].c_str(), p[3].c_str(), g[4].c_str(), p[4].c_str());
    o << line;
  }

  o << "\nper-target absolute error\n";
  std::snprintf(line, sizeof line, "%-9s %5s %9s %9s %9s %9s %9s %9s %9s\n", "target", "n", "mae", "median",
                "q1", "q3", "max", "threshold", "within");
  o << line;
  for (std::size_t t = 0; t < 5; ++t) {
    const TargetErrorStats& s = rep.stats[t];
    std::snprintf(line, sizeof line, "%-9s %5zu %9.3f %9.3f %9.3f %9.3f %9.3f %9.0f %9.3f\n",
                  std::string(kTargetColumns[t]).c_str(), s.n, s.mae, s.distribution.median,
                  s.distribution.q1, s.distribution.q3, s.distribution.max_error, s.threshold,
                  s.within_threshold);
    o << line;
  }
  trend_table(o, "trend by precision (mean over matched rows)", rep.by_precision);
  trend_table(o, "trend by reuse factor (mean over matched rows)", rep.by_reuse);

  o << "\nunmatched truth rows: " << rep.unmatched.size() << "\n";
  for (const UnmatchedTruth& u : rep.unmatched) o << "  " << to_string(u.key) << "  (" << u.reason << ")\n";
  return o.str();
}

}  // namespace fpgacost
