// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <sstream>

#include <json.hpp>

#include "fpgacost/csv.hpp"
#include "fpgacost/error.hpp"
#include "fpgacost/report.hpp"

namespace fpgacost {

using json = nlohmann::ordered_json;

ModelSet::ModelSet(std::vector<MlpRegressor> models) : models_(std::move(models)) {
  if (models_.size() != kAllTargets.size()) {
    throw ModelError("a model set needs exactly " + std::to_string(kAllTargets.size()) + " models");
  }
  for (std::size_t i = 0; i < kAllTargets.size(); ++i) {
    if (models_[i].target() != kAllTargets[i]) {
      throw ModelError("model slot " + std::string(to_string(kAllTargets[i])) + " holds a " +
                       std::string(to_string(models_[i].target())) + " model");
    }
    if (models_[i].feature_schema_version() != kFeatureSchemaVersion) {
      throw ModelError("feature schema mismatch: " + std::string(to_string(kAllTargets[i])) +
                       " model uses v" + std::to_string(models_[i].feature_schema_version()) +
                       ", this build extracts v" + std::to_string(kFeatureSchemaVersion));
    }
  }
}

std::string ModelSet::version_id(Target t) const {
  const MlpRegressor& m = at(t);
  char hex[17];
  std::snprintf(hex, sizeof hex, "%016llx", static_cast<unsigned long long>(m.fingerprint()));
  return std::string(to_string(t)) + "-v" + std::to_string(kModelFormatVersion) + "-s" +
         std::to_string(m.feature_schema_version()) + "-" + hex;
}

std::string model_file_name(Target t) { return std::string(to_string(t)) + ".model"; }

ModelSet load_model_set(const std::string& dir) {
  std::vector<MlpRegressor> models;
  for (Target t : kAllTargets) {
    const auto path = (std::filesystem::path(dir) / model_file_name(t)).string();
    if (!std::filesystem::exists(path)) {
      throw ModelError("missing " + std::string(to_string(t)) + " model: '" + path + "' not found");
    }
    MlpRegressor m = load_model(path);
    if (m.target() != t) {
      throw ModelError("'" + path + "' holds a " + std::string(to_string(m.target())) + " model");
    }
    models.push_back(std::move(m));
  }
  return ModelSet(std::move(models));
}

namespace {

ResourcePrediction resource(double raw) {
  ResourcePrediction r;
  r.predicted_pct = clamp_utilization(raw);
  r.fits_100 = r.predicted_pct <= 100.0;
  r.fits_200 = r.predicted_pct <= kUtilizationCap;
  return r;
}

std::int64_t clamp_cycles(double raw) { return std::llround(std::max(0.0, raw)); }

}  // namespace

PredictionReport build_report(const std::array<double, 5>& raw, const NetworkArchitecture& net,
                              const SynthesisConfig& cfg, const EngineeredFeatures& features) {
  for (std::size_t i = 0; i < raw.size(); ++i) {
    if (!std::isfinite(raw[i])) {
      throw ModelError("non-finite " + std::string(to_string(kAllTargets[i])) + " prediction");
    }
  }
  PredictionReport r;
  r.network = net.name;
  r.config = cfg;
  r.bram = resource(raw[0]);
  r.dsp = resource(raw[1]);
  r.ff = resource(raw[2]);
  r.lut = resource(raw[3]);
  r.cycles = clamp_cycles(raw[4]);
  r.latency_ns = static_cast<double>(r.cycles) * cfg.clock_period_ns;
  r.features = features;
  return r;
}

PredictionReport predict_all(const ModelSet& models, const NetworkArchitecture& net,
                             const SynthesisConfig& cfg, const BoardRegistry& boards) {
  validate(cfg);
  const EngineeredFeatures f = extract_features(net, cfg, boards);
  const ModelInput x = model_input(f);
  std::array<double, 5> raw{};
  for (std::size_t i = 0; i < kAllTargets.size(); ++i) {
    try {
      raw[i] = models.at(kAllTargets[i]).predict(x);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("configuration not covered by the models: ") + e.what());
    }
  }
  PredictionReport r = build_report(raw, net, cfg, f);
  for (std::size_t i = 0; i < kAllTargets.size(); ++i) r.model_versions[i] = models.version_id(kAllTargets[i]);
  return r;
}

namespace {

// Both renderers print numbers through this, so text and JSON agree digit for digit.
std::string num(double v) { return csv::format_double(v); }

json resource_json(const ResourcePrediction& p) {
  json j;
  j["predicted_pct"] = json::parse(num(p.predicted_pct));
  j["fits_100"] = p.fits_100;
  j["fits_200"] = p.fits_200;
  return j;
}

std::array<std::pair<const char*, const ResourcePrediction*>, 4> resources(const PredictionReport& r) {
  return {{{"bram", &r.bram}, {"dsp", &r.dsp}, {"ff", &r.ff}, {"lut", &r.lut}}};
}

}  // namespace

std::string report_json(const PredictionReport& r) {
  json j;
  j["network"] = r.network;
  j["board"] = r.config.board_id;
  j["strategy"] = std::string(to_string(r.config.strategy));
  j["precision_bits"] = r.config.precision_bits;
  j["reuse"] = r.config.global_reuse;
  j["clock_period_ns"] = json::parse(num(r.config.clock_period_ns));
  json res;
  for (const auto& [name, p] : resources(r)) res[name] = resource_json(*p);
  j["resources"] = res;
  j["cycles"] = r.cycles;
  j["latency_ns"] = json::parse(num(r.latency_ns));
  json feats;
  const auto values = feature_vector(r.features);
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    feats[std::string(feature_names()[i])] = json::parse(num(values[i]));
  }
  j["features_used"] = feats;
  json versions;
  for (std::size_t i = 0; i < kAllTargets.size(); ++i) {
    versions[std::string(to_string(kAllTargets[i]))] = r.model_versions[i];
  }
  j["model_versions"] = versions;
  return j.dump(2) + "\n";
}

std::string report_text(const PredictionReport& r) {
  std::ostringstream o;
  o << "network     " << r.network << "\n"
    << "board       " << r.config.board_id << "\n"
    << "strategy    " << to_string(r.config.strategy) << "\n"
    << "precision   " << r.config.precision_bits << "\n"
    << "reuse       " << r.config.global_reuse << "\n\n"
    << "resource  predicted_pct  fits_100  fits_200\n";
  for (const auto& [name, p] : resources(r)) {
    char line[96];
    std::snprintf(line, sizeof line, "%-8s  %13s  %8s  %8s\n", name, num(p->predicted_pct).c_str(),
                  p->fits_100 ? "yes" : "no", p->fits_200 ? "yes" : "no");
    o << line;
  }
  o << "\ncycles      " << r.cycles << "\n"
    << "latency_ns  " << num(r.latency_ns) << "  (clock " << num(r.config.clock_period_ns) << " ns)\n\n"
    << "features used\n";
  const auto values = feature_vector(r.features);
  for (std::size_t i = 0; i < kFeatureCount; ++i) {
    char line[96];
    std::snprintf(line, sizeof line, "  %-18s %s\n", std::string(feature_names()[i]).c_str(),
                  num(values[i]).c_str());
    o << line;
  }
  o << "\nmodels\n";
  for (const std::string& v : r.model_versions) o << "  " << v << "\n";
  return o.str();
}

std::vector<TargetEvaluation> evaluate_models(const ModelSet& models, const Dataset& ds) {
  if (ds.empty()) throw DataError("evaluation set is empty");
  if (ds.schema_version != kFeatureSchemaVersion) throw DataError("dataset feature schema mismatch");
  std::vector<TargetEvaluation> out;
  for (Target t : kAllTargets) {
    const MlpRegressor& m = models.at(t);
    std::vector<double> y, yhat, err;
    for (const TrainingRecord& rec : ds.records) {
      double p = 0;
      try {
        p = m.predict(model_input(rec.features));
      } catch (const std::invalid_argument& e) {
        throw DataError(std::string("record incompatible with model: ") + e.what());
      }
      p = t == Target::Cycles ? static_cast<double>(clamp_cycles(p)) : clamp_utilization(p);
      y.push_back(target_value(rec.targets, t));
      yhat.push_back(p);
      err.push_back(std::abs(p - y.back()));
    }
    TargetEvaluation e;
    e.target = t;
    e.n = y.size();
    const bool constant = std::all_of(y.begin(), y.end(), [&](double v) { return v == y.front(); });
    if (!constant) e.r2 = metrics::r2(y, yhat);
    e.smape = metrics::smape(y, yhat);
    e.mae = metrics::mae(y, yhat);
    e.errors = metrics::error_distribution(err);
    e.threshold = t == Target::Cycles ? metrics::kCycleErrorThreshold : metrics::kResourceErrorThreshold;
    e.within_threshold = metrics::within_threshold_fraction(err, e.threshold);
    out.push_back(std::move(e));
  }
  return out;
}

std::string evaluation_json(const std::vector<TargetEvaluation>& ev) {
  json j = json::object();
  for (const TargetEvaluation& e : ev) {
    json t;
    t["n"] = e.n;
    t["r2"] = e.r2 ? json::parse(num(*e.r2)) : json(nullptr);
    t["smape"] = json::parse(num(e.smape));
    t["mae"] = json::parse(num(e.mae));
    json d;
    d["median"] = json::parse(num(e.errors.median));
    d["mean"] = json::parse(num(e.errors.mean));
    d["q1"] = json::parse(num(e.errors.q1));
    d["q3"] = json::parse(num(e.errors.q3));
    d["iqr"] = json::parse(num(e.errors.iqr));
    d["max"] = json::parse(num(e.errors.max_error));
    d["outliers"] = e.errors.outliers.size();
    t["error_distribution"] = d;
    t["threshold"] = json::parse(num(e.threshold));
    t["within_threshold_fraction"] = json::parse(num(e.within_threshold));
    j[std::string(to_string(e.target))] = t;
  }
  return j.dump(2) + "\n";
}

std::string evaluation_text(const std::vector<TargetEvaluation>& ev) {
  std::ostringstream o;
  o << "target       n        r2     smape       mae    median        q1        q3       max  "
       "threshold  within\n";
  auto f = [](double v) {
    char b[32];
    std::snprintf(b, sizeof b, "%9.4f", v);
    return std::string(b);
  };
  for (const TargetEvaluation& e : ev) {
    char head[32];
    std::snprintf(head, sizeof head, "%-7s %6zu ", std::string(to_string(e.target)).c_str(), e.n);
    o << head << (e.r2 ? f(*e.r2) : std::string("       NA")) << " " << f(e.smape) << " "
      << f(e.mae) << " " << f(e.errors.median) << " " << f(e.errors.q1) << " " << f(e.errors.q3)
      << " " << f(e.errors.max_error) << "  " << f(e.threshold) << " " << f(e.within_threshold) << "\n";
  }
  return o.str();
}

}  // namespace fpgacost
