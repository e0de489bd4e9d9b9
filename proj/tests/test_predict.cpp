// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include <json.hpp>

#include "fpgacost/error.hpp"
#include "fpgacost/report.hpp"

using namespace fpgacost;
namespace fs = std::filesystem;

namespace {

NetworkArchitecture jet() {
  return make_network("JET", 16,
                      {dense(32), activation(ActKind::ReLU), dense(32), activation(ActKind::ReLU), dense(32),
                       activation(ActKind::ReLU), dense(5), activation(ActKind::Softmax)});
}

SynthesisConfig zcu(int reuse = 4) {
  SynthesisConfig c;
  c.board_id = "zcu102";
  c.strategy = Strategy::Resource;
  c.precision_bits = 8;
  c.global_reuse = reuse;
  c.clock_period_ns = 5.0;
  return c;
}

std::vector<MlpRegressor> untrained_models(std::uint64_t seed) {
  std::vector<MlpRegressor> v;
  for (Target t : kAllTargets) v.push_back(build_model(t, seed));
  return v;
}

fs::path temp_dir(const std::string& tag) {
  const auto p = fs::temp_directory_path() / ("fpgacost_predict_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

// FNV-1a 64, written out independently of the library.
std::uint64_t fnv(const std::vector<std::uint8_t>& bytes, std::size_t n) {
  std::uint64_t h = 14695981039346656037ull;
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

TEST_CASE("output contract") {
  const auto net = jet();
  const auto cfg = zcu();
  const auto f = extract_features(net, cfg);

  const auto r = build_report({-5.0, 250.0, 100.0, 100.5, 12.5}, net, cfg, f);
  CHECK(r.bram.predicted_pct == 0.0);
  CHECK(r.bram.fits_100);
  CHECK(r.dsp.predicted_pct == 200.0);
  CHECK(!r.dsp.fits_100);
  CHECK(r.dsp.fits_200);
  CHECK(r.ff.predicted_pct == 100.0);
  CHECK(r.ff.fits_100);
  CHECK(!r.lut.fits_100);
  CHECK(r.lut.fits_200);
  CHECK(r.cycles == 13);
  CHECK(r.latency_ns == 65.0);
  CHECK(r.network == "JET");

  CHECK(build_report({0, 0, 0, 0, -40.0}, net, cfg, f).cycles == 0);
  CHECK(build_report({0, 0, 0, 0, 7.49}, net, cfg, f).cycles == 7);
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(build_report({0, nan, 0, 0, 0}, net, cfg, f), ModelError);
  CHECK_THROWS_AS(build_report({0, 0, 0, 0, std::numeric_limits<double>::infinity()}, net, cfg, f), ModelError);
}

TEST_CASE("predictions stay inside the contract for any weights") {
  const ModelSet models(untrained_models(3));
  auto boosted = untrained_models(4);
  for (auto& m : boosted) m.set_target_scaler(100, 1000);  // push raw outputs far outside the range
  const ModelSet wild(std::move(boosted));
  for (const ModelSet* s : {&models, &wild}) {
    for (int reuse : {1, 2, 8, 64}) {
      for (Strategy st : {Strategy::Latency, Strategy::Resource}) {
        auto cfg = zcu(reuse);
        cfg.strategy = st;
        const auto r = predict_all(*s, jet(), cfg);
        for (const auto* p : {&r.bram, &r.dsp, &r.ff, &r.lut}) {
          CHECK(p->predicted_pct >= 0.0);
          CHECK(p->predicted_pct <= 200.0);
          CHECK(p->fits_100 == (p->predicted_pct <= 100.0));
          CHECK(p->fits_200);
        }
        CHECK(r.cycles >= 0);
        CHECK(r.latency_ns == static_cast<double>(r.cycles) * 5.0);
        CHECK(r.model_versions[4].starts_with("cycles-v1-s1-"));
        CHECK(r.model_versions[4].size() == std::string("cycles-v1-s1-").size() + 16);
      }
    }
  }
  auto bad = zcu();
  bad.board_id = "alveo-u200";
  ModelSet two_boards([] {
    std::vector<MlpRegressor> v;
    for (Target t : kAllTargets) v.push_back(build_model(t, 0, 2));
    return v;
  }());
  CHECK_THROWS_AS(predict_all(two_boards, jet(), bad), ConfigError);
  bad.board_id = "virtex";
  CHECK_THROWS_AS(predict_all(models, jet(), bad), ConfigError);
  bad = zcu(0);
  CHECK_THROWS_AS(predict_all(models, jet(), bad), ConfigError);
}

TEST_CASE("text and json agree") {
  const ModelSet models(untrained_models(5));
  const auto r = predict_all(models, jet(), zcu());
  const auto j = nlohmann::json::parse(report_json(r));
  const std::string text = report_text(r);

  CHECK(j["network"] == "JET");
  CHECK(j["board"] == "zcu102");
  CHECK(j["cycles"].get<std::int64_t>() == r.cycles);
  // Every number in the text report equals its JSON counterpart.
  std::istringstream in(text);
  std::string line;
  int resource_rows = 0, feature_rows = 0;
  bool in_features = false;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::string key, value;
    ls >> key >> value;
    for (const char* name : {"bram", "dsp", "ff", "lut"}) {
      if (key == name) {
        CHECK(std::stod(value) == j["resources"][name]["predicted_pct"].get<double>());
        ++resource_rows;
      }
    }
    if (key == "latency_ns") CHECK(std::stod(value) == j["latency_ns"].get<double>());
    if (line == "features used") {
      in_features = true;
      continue;
    }
    if (line.empty()) in_features = false;
    if (in_features) {
      CHECK(std::stod(value) == j["features_used"][key].get<double>());
      ++feature_rows;
    }
  }
  CHECK(resource_rows == 4);
  CHECK(feature_rows == static_cast<int>(kFeatureCount));
  for (std::size_t i = 0; i < kAllTargets.size(); ++i) {
    CHECK(text.find(r.model_versions[i]) != std::string::npos);
    CHECK(j["model_versions"][std::string(to_string(kAllTargets[i]))] == r.model_versions[i]);
  }
}

TEST_CASE("model sets") {
  const auto dir = temp_dir("set");
  for (const auto& m : untrained_models(6)) save_model(m, (dir / model_file_name(m.target())).string());

  const ModelSet loaded = load_model_set(dir.string());
  const ModelSet direct(untrained_models(6));
  for (Target t : kAllTargets) CHECK(loaded.version_id(t) == direct.version_id(t));

  SUBCASE("missing model") {
    fs::remove(dir / "cycles.model");
    CHECK_THROWS_WITH_AS(load_model_set(dir.string()), doctest::Contains("cycles"), ModelError);
  }
  SUBCASE("model in the wrong slot") {
    fs::copy_file(dir / "dsp.model", dir / "lut.model", fs::copy_options::overwrite_existing);
    CHECK_THROWS_AS(load_model_set(dir.string()), ModelError);
  }
  SUBCASE("feature schema mismatch") {
    auto bytes = save_model_bytes(build_model(Target::FF, 6));
    const std::string key = "\"feature_schema_version\":";
    const std::string as_text(bytes.begin(), bytes.end());
    const auto pos = as_text.find(key);
    REQUIRE(pos != std::string::npos);
    REQUIRE(bytes[pos + key.size()] == '1');
    bytes[pos + key.size()] = '9';
    const std::size_t body = bytes.size() - 8;
    const std::uint64_t h = fnv(bytes, body);
    for (int i = 0; i < 8; ++i) bytes[body + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(h >> (8 * i));
    std::ofstream(dir / "ff.model", std::ios::binary)
        .write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    CHECK_THROWS_WITH_AS(load_model_set(dir.string()), doctest::Contains("schema"), ModelError);
  }
  SUBCASE("wrong count") {
    auto v = untrained_models(1);
    v.pop_back();
    CHECK_THROWS_AS(ModelSet(std::move(v)), ModelError);
  }
  fs::remove_all(dir);
}

TEST_CASE("evaluation") {
  const ModelSet models(untrained_models(7));
  CHECK_THROWS_AS(evaluate_models(models, Dataset{}), DataError);

  Dataset ds = make_dataset(generate_batch(7, 120, default_generator_spec()));
  assign_pseudo_targets(ds, 7);
  const auto ev = evaluate_models(models, ds);
  REQUIRE(ev.size() == 5);
  for (const auto& e : ev) {
    CHECK(e.n == 120);
    CHECK(e.smape >= 0);
    CHECK(e.smape <= 200);
    CHECK(e.errors.q1 <= e.errors.median);
    CHECK(e.within_threshold >= 0);
    CHECK(e.within_threshold <= 1);
  }
  CHECK(ev[4].threshold == 100.0);
  CHECK(ev[0].threshold == 10.0);
  const auto j = nlohmann::json::parse(evaluation_json(ev));
  CHECK(j["cycles"]["n"] == 120);
  CHECK(j["lut"]["mae"].get<double>() == ev[3].mae);
  CHECK(evaluation_text(ev).find("cycles") != std::string::npos);
}
