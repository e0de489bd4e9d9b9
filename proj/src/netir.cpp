// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0

#include "fpgacost/netir.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "default_boards.hpp"
#include "fpgacost/error.hpp"

namespace fpgacost {

using json = nlohmann::json;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string where(std::size_t index) { return "layer " + std::to_string(index); }

void check_layer(const NetworkArchitecture& net, std::size_t i) {
  const LayerSpec& l = net.layers[i];
  if (l.input_size == 0 || l.output_size == 0) {
    throw NetworkError(where(i) + ": sizes must be positive");
  }
  if (l.activation.has_value() != (l.kind == LayerKind::Activation)) {
    throw NetworkError(where(i) + ": activation function is only valid on activation layers");
  }
  if (l.skip_source.has_value() != (l.kind == LayerKind::SkipAdd)) {
    throw NetworkError(where(i) + ": skip_source is only valid on skip_add layers");
  }
  switch (l.kind) {
    case LayerKind::Dense:
      if (l.units == 0) throw NetworkError(where(i) + ": dense units must be >= 1");
      if (l.output_size != l.units) {
        throw NetworkError(where(i) + ": dense output_size must equal units");
      }
      if (l.reuse_factor == 0 || l.reuse_factor > l.input_size * l.output_size) {
        throw NetworkError(where(i) + ": reuse_factor " + std::to_string(l.reuse_factor) +
                           " outside [1, " + std::to_string(l.input_size * l.output_size) + "]");
      }
      break;
    case LayerKind::Activation:
    case LayerKind::BatchNorm:
    case LayerKind::Dropout:
      if (l.output_size != l.input_size) {
        throw NetworkError(where(i) + ": output_size must equal input_size");
      }
      break;
    case LayerKind::SkipAdd: {
      const std::size_t src = *l.skip_source;
      if (src >= i) {
        throw NetworkError(where(i) + ": invalid skip_source " + std::to_string(src) +
                           " (must reference an earlier layer)");
      }
      if (net.layers[src].output_size != l.input_size) {
        throw NetworkError(where(i) + ": invalid skip_source " + std::to_string(src) +
                           ": width " + std::to_string(net.layers[src].output_size) +
                           " does not match " + std::to_string(l.input_size));
      }
      if (l.output_size != l.input_size) {
        throw NetworkError(where(i) + ": output_size must equal input_size");
      }
      break;
    }
  }
  if (l.kind != LayerKind::Dense && (l.units != 0 || l.use_bias || l.reuse_factor != 1 || l.reuse_pinned)) {
    throw NetworkError(where(i) + ": dense-only fields set on a " +
                       std::string(to_string(l.kind)) + " layer");
  }
}

}  // namespace

std::string_view to_string(LayerKind kind) {
  switch (kind) {
    case LayerKind::Dense: return "dense";
    case LayerKind::Activation: return "activation";
    case LayerKind::BatchNorm: return "batchnorm";
    case LayerKind::SkipAdd: return "skip_add";
    case LayerKind::Dropout: return "dropout";
  }
  return "?";
}

std::string_view to_string(ActKind act) {
  switch (act) {
    case ActKind::ReLU: return "relu";
    case ActKind::Tanh: return "tanh";
    case ActKind::Sigmoid: return "sigmoid";
    case ActKind::Softmax: return "softmax";
  }
  return "?";
}

std::string_view to_string(Strategy strategy) {
  return strategy == Strategy::Latency ? "Latency" : "Resource";
}

ActKind parse_act_kind(std::string_view name) {
  const std::string n = lower(name);
  if (n == "relu") return ActKind::ReLU;
  if (n == "tanh") return ActKind::Tanh;
  if (n == "sigmoid") return ActKind::Sigmoid;
  if (n == "softmax") return ActKind::Softmax;
  throw NetworkError("unknown activation '" + std::string(name) + "'");
}

Strategy parse_strategy(std::string_view name) {
  const std::string n = lower(name);
  if (n == "latency") return Strategy::Latency;
  if (n == "resource") return Strategy::Resource;
  throw ConfigError("unknown strategy '" + std::string(name) + "'");
}

LayerSpec dense(std::size_t units, bool use_bias) {
  LayerSpec l;
  l.kind = LayerKind::Dense;
  l.units = units;
  l.use_bias = use_bias;
  return l;
}

LayerSpec activation(ActKind act) {
  LayerSpec l;
  l.kind = LayerKind::Activation;
  l.activation = act;
  return l;
}

LayerSpec batch_norm() {
  LayerSpec l;
  l.kind = LayerKind::BatchNorm;
  return l;
}

LayerSpec skip_add(std::size_t source) {
  LayerSpec l;
  l.kind = LayerKind::SkipAdd;
  l.skip_source = source;
  return l;
}

LayerSpec dropout() {
  LayerSpec l;
  l.kind = LayerKind::Dropout;
  return l;
}

NetworkArchitecture make_network(std::string name, std::size_t input_size,
                                 std::vector<LayerSpec> layers) {
  if (input_size == 0) throw NetworkError("input_size must be positive");
  if (layers.empty()) throw NetworkError("network has no layers");
  std::size_t width = input_size;
  for (std::size_t i = 0; i < layers.size(); ++i) {
    LayerSpec& l = layers[i];
    if (l.input_size != 0 && l.input_size != width) {
      throw NetworkError(where(i) + ": shape mismatch: declared input " +
                         std::to_string(l.input_size) + " but previous output is " +
                         std::to_string(width));
    }
    l.input_size = width;
    l.output_size = l.kind == LayerKind::Dense ? l.units : width;
    width = l.output_size;
  }
  NetworkArchitecture net{std::move(name), input_size, std::move(layers)};
  validate(net);
  return net;
}

void validate(const NetworkArchitecture& net) {
  if (net.input_size == 0) throw NetworkError("input_size must be positive");
  if (net.layers.empty()) throw NetworkError("network has no layers");
  if (net.layers.front().input_size != net.input_size) {
    throw NetworkError("shape mismatch: first layer input does not match network input");
  }
  for (std::size_t i = 0; i < net.layers.size(); ++i) {
    if (i > 0 && net.layers[i].input_size != net.layers[i - 1].output_size) {
      throw NetworkError(where(i) + ": shape mismatch with previous layer");
    }
    check_layer(net, i);
  }
}

NetworkArchitecture parse_network(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw NetworkError(std::string("network document is not valid JSON: ") + e.what());
  }
  auto require = [](const json& obj, const char* key, auto pred, const char* type,
                    const std::string& ctx) -> const json& {
    auto it = obj.find(key);
    if (it == obj.end()) throw NetworkError(ctx + ": missing field '" + key + "'");
    if (!pred(*it)) throw NetworkError(ctx + ": field '" + key + "' must be " + type);
    return *it;
  };
  const auto is_count = [](const json& v) {
    return v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0);
  };
  const auto is_string = [](const json& v) { return v.is_string(); };
  const auto is_array = [](const json& v) { return v.is_array(); };
  const auto is_bool = [](const json& v) { return v.is_boolean(); };

  if (!doc.is_object()) throw NetworkError("network document must be an object");
  for (const auto& [key, _] : doc.items()) {
    if (key != "name" && key != "input_size" && key != "layers") {
      throw NetworkError("unknown top-level field '" + key + "'");
    }
  }
  const std::string name = require(doc, "name", is_string, "a string", "network").get<std::string>();
  const auto input_size = require(doc, "input_size", is_count, "a nonnegative integer", "network")
                              .get<std::size_t>();
  const json& jl = require(doc, "layers", is_array, "an array", "network");

  std::vector<LayerSpec> layers;
  layers.reserve(jl.size());
  for (std::size_t i = 0; i < jl.size(); ++i) {
    const json& o = jl[i];
    const std::string ctx = where(i);
    if (!o.is_object()) throw NetworkError(ctx + ": must be an object");
    const std::string kind = require(o, "kind", is_string, "a string", ctx).get<std::string>();
    std::set<std::string> allowed{"kind", "input_size"};
    LayerSpec l;
    if (kind == "dense") {
      l = dense(require(o, "units", is_count, "a nonnegative integer", ctx).get<std::size_t>(),
                o.contains("use_bias") ? require(o, "use_bias", is_bool, "a boolean", ctx).get<bool>()
                                       : true);
      if (o.contains("reuse_factor")) {
        l.reuse_factor = require(o, "reuse_factor", is_count, "a nonnegative integer", ctx)
                             .get<std::size_t>();
        l.reuse_pinned = true;
      }
      allowed.insert({"units", "use_bias", "reuse_factor"});
    } else if (kind == "activation") {
      l = activation(parse_act_kind(
          require(o, "activation", is_string, "a string", ctx).get<std::string>()));
      allowed.insert("activation");
    } else if (kind == "batchnorm") {
      l = batch_norm();
    } else if (kind == "skip_add") {
      l = skip_add(require(o, "skip_source", is_count, "a nonnegative integer", ctx)
                       .get<std::size_t>());
      allowed.insert("skip_source");
    } else if (kind == "dropout") {
      l = dropout();
    } else {
      throw NetworkError(ctx + ": unknown layer kind '" + kind + "'");
    }
    for (const auto& [key, _] : o.items()) {
      if (!allowed.count(key)) {
        throw NetworkError(ctx + ": field '" + key + "' is not valid for kind '" + kind + "'");
      }
    }
    if (o.contains("input_size")) {
      l.input_size = require(o, "input_size", is_count, "a nonnegative integer", ctx)
                         .get<std::size_t>();
      if (l.input_size == 0) throw NetworkError(ctx + ": input_size must be positive");
    }
    layers.push_back(std::move(l));
  }
  return make_network(name, input_size, std::move(layers));
}

std::string serialize_network(const NetworkArchitecture& net) {
  json layers = json::array();
  for (const LayerSpec& l : net.layers) {
    json o;
    o["kind"] = to_string(l.kind);
    o["input_size"] = l.input_size;
    switch (l.kind) {
      case LayerKind::Dense:
        o["units"] = l.units;
        o["use_bias"] = l.use_bias;
        if (l.reuse_pinned) o["reuse_factor"] = l.reuse_factor;
        break;
      case LayerKind::Activation:
        o["activation"] = to_string(*l.activation);
        break;
      case LayerKind::SkipAdd:
        o["skip_source"] = *l.skip_source;
        break;
      default:
        break;
    }
    layers.push_back(std::move(o));
  }
  json doc;
  doc["name"] = net.name;
  doc["input_size"] = net.input_size;
  doc["layers"] = std::move(layers);
  return doc.dump();
}

std::uint64_t layer_params(const LayerSpec& l) {
  switch (l.kind) {
    case LayerKind::Dense:
      return static_cast<std::uint64_t>(l.input_size) * l.units + (l.use_bias ? l.units : 0);
    case LayerKind::BatchNorm:
      return 2 * static_cast<std::uint64_t>(l.output_size);
    default:
      return 0;
  }
}

std::uint64_t param_count(const NetworkArchitecture& net) {
  std::uint64_t total = 0;
  for (const LayerSpec& l : net.layers) total += layer_params(l);
  return total;
}

std::size_t effective_reuse(const LayerSpec& layer, std::size_t requested) {
  if (layer.kind != LayerKind::Dense) {
    throw NetworkError("effective_reuse: reuse only applies to dense layers, got " +
                       std::string(to_string(layer.kind)));
  }
  if (requested == 0) throw ConfigError("reuse factor must be >= 1");
  return std::min(requested, layer.input_size * layer.output_size);
}

NetworkArchitecture apply_reuse(const NetworkArchitecture& net, std::size_t requested) {
  NetworkArchitecture out = net;
  for (LayerSpec& l : out.layers) {
    if (l.kind == LayerKind::Dense && !l.reuse_pinned) l.reuse_factor = effective_reuse(l, requested);
  }
  return out;
}

void validate(const SynthesisConfig& cfg) {
  if (cfg.precision_bits <= 0) throw ConfigError("precision_bits must be positive");
  if (cfg.global_reuse <= 0) throw ConfigError("global_reuse must be positive");
  if (!(cfg.clock_period_ns > 0)) throw ConfigError("clock_period_ns must be positive");
}

BoardRegistry::BoardRegistry(std::vector<BoardSpec> boards) : boards_(std::move(boards)) {
  std::set<std::string> seen;
  for (const BoardSpec& b : boards_) {
    if (b.id.empty()) throw ConfigError("board id must be non-empty");
    if (!seen.insert(b.id).second) throw ConfigError("duplicate board id '" + b.id + "'");
    if (b.bram_capacity <= 0 || b.dsp_capacity <= 0 || b.ff_capacity <= 0 || b.lut_capacity <= 0) {
      throw ConfigError("board '" + b.id + "': all capacities must be positive");
    }
  }
}

bool BoardRegistry::contains(std::string_view id) const {
  return std::any_of(boards_.begin(), boards_.end(), [&](const BoardSpec& b) { return b.id == id; });
}

std::size_t BoardRegistry::index_of(std::string_view id) const {
  for (std::size_t i = 0; i < boards_.size(); ++i) {
    if (boards_[i].id == id) return i;
  }
  throw ConfigError("unknown board '" + std::string(id) + "'");
}

const BoardSpec& BoardRegistry::at(std::string_view id) const { return boards_[index_of(id)]; }

BoardRegistry load_board_registry(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("board registry is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("boards") || !doc["boards"].is_array()) {
    throw ConfigError("board registry must be an object with a 'boards' array");
  }
  std::vector<BoardSpec> boards;
  for (const json& o : doc["boards"]) {
    try {
      BoardSpec b;
      b.id = o.at("id").get<std::string>();
      b.bram_capacity = o.at("bram_capacity").get<std::int64_t>();
      b.dsp_capacity = o.at("dsp_capacity").get<std::int64_t>();
      b.ff_capacity = o.at("ff_capacity").get<std::int64_t>();
      b.lut_capacity = o.at("lut_capacity").get<std::int64_t>();
      boards.push_back(std::move(b));
    } catch (const json::exception& e) {
      throw ConfigError(std::string("board registry entry invalid: ") + e.what());
    }
  }
  return BoardRegistry(std::move(boards));
}

BoardRegistry load_board_registry_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open board registry '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return load_board_registry(ss.str());
}

std::string_view default_board_registry_document() { return detail::kDefaultBoardsJson; }

const BoardRegistry& default_board_registry() {
  static const BoardRegistry registry = load_board_registry(default_board_registry_document());
  return registry;
}

}  // namespace fpgacost
