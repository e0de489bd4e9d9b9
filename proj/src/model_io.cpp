// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0

#include <bit>
#include <cstring>
#include <fstream>
#include <iterator>

#include <json.hpp>

#include "fpgacost/error.hpp"
#include "fpgacost/mlpreg.hpp"

namespace fpgacost {

using json = nlohmann::json;

namespace {

constexpr char kMagic[8] = {'F', 'P', 'G', 'A', 'C', 'O', 'S', 'T'};

std::uint64_t fnv1a(std::span<const std::uint8_t> bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (std::uint8_t b : bytes) {
    h ^= b;
    h *= 0x100000001b3ULL;
  }
  return h;
}

template <typename T>
void put_le(std::vector<std::uint8_t>& out, T v) {
  for (std::size_t i = 0; i < sizeof(T); ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

template <typename T>
T get_le(std::span<const std::uint8_t> in, std::size_t pos) {
  T v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<T>(in[pos + i]) << (8 * i);
  return v;
}

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> b) : b_(b) {}
  void need(std::size_t n) const {
    if (pos_ + n > b_.size()) throw ModelError("model file is truncated");
  }
  template <typename T>
  T le() {
    need(sizeof(T));
    T v = get_le<T>(b_, pos_);
    pos_ += sizeof(T);
    return v;
  }
  std::span<const std::uint8_t> bytes(std::size_t n) {
    need(n);
    auto s = b_.subspan(pos_, n);
    pos_ += n;
    return s;
  }
  std::size_t pos() const { return pos_; }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t pos_ = 0;
};

}  // namespace

std::vector<std::uint8_t> save_model_bytes(const MlpRegressor& m) {
  const ModelShape& s = m.shape();
  json h;
  h["format_version"] = kModelFormatVersion;
  h["feature_schema_version"] = m.feature_schema_version();
  h["target"] = to_string(m.target());
  h["numeric_dim"] = s.numeric_dim;
  h["block1"] = s.block1;
  h["block2"] = s.block2;
  h["board_cardinality"] = s.board_cardinality;
  h["strategy_cardinality"] = s.strategy_cardinality;
  h["embedding_dim"] = s.embedding_dim;
  h["param_count"] = m.parameters().size();
  // Scalers travel as raw bit patterns so they survive exactly.
  auto bits = [](const std::vector<double>& v) {
    std::vector<std::uint64_t> out;
    for (double x : v) out.push_back(std::bit_cast<std::uint64_t>(x));
    return out;
  };
  h["feature_mean_bits"] = bits(m.feature_mean());
  h["feature_scale_bits"] = bits(m.feature_scale());
  h["target_offset_bits"] = std::bit_cast<std::uint64_t>(m.target_offset());
  h["target_scale_bits"] = std::bit_cast<std::uint64_t>(m.target_scale());
  const std::string header = h.dump();

  std::vector<std::uint8_t> out(std::begin(kMagic), std::end(kMagic));
  put_le<std::uint32_t>(out, kModelFormatVersion);
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(header.size()));
  out.insert(out.end(), header.begin(), header.end());
  const auto params = m.parameters();
  put_le<std::uint64_t>(out, params.size());
  for (double p : params) put_le<std::uint64_t>(out, std::bit_cast<std::uint64_t>(p));
  put_le<std::uint64_t>(out, fnv1a(out));
  return out;
}

MlpRegressor load_model_bytes(std::span<const std::uint8_t> bytes) {
  Reader r(bytes);
  const auto magic = r.bytes(sizeof(kMagic));
  if (std::memcmp(magic.data(), kMagic, sizeof(kMagic)) != 0) throw ModelError("not a model file (bad magic)");
  const auto version = r.le<std::uint32_t>();
  if (version != kModelFormatVersion) {
    throw ModelError("model format version mismatch: file has v" + std::to_string(version) +
                     ", this build reads v" + std::to_string(kModelFormatVersion));
  }
  if (bytes.size() < sizeof(std::uint64_t) + r.pos()) throw ModelError("model file is truncated");
  const std::size_t body = bytes.size() - sizeof(std::uint64_t);
  const auto header_len = r.le<std::uint32_t>();
  if (r.pos() + header_len + sizeof(std::uint64_t) > body) throw ModelError("model file is truncated");
  const auto header_bytes = r.bytes(header_len);
  const auto count = r.le<std::uint64_t>();
  if (count > (body - r.pos()) / sizeof(double) || r.pos() + count * sizeof(double) != body) {
    throw ModelError("model file is truncated or has trailing bytes");
  }
  if (get_le<std::uint64_t>(bytes, body) != fnv1a(bytes.first(body))) {
    throw ModelError("model file checksum mismatch (corrupted payload)");
  }

  json h;
  try {
    h = json::parse(header_bytes.begin(), header_bytes.end());
  } catch (const json::parse_error& e) {
    throw ModelError(std::string("model header is not valid JSON: ") + e.what());
  }
  try {
    if (h.at("format_version").get<std::uint32_t>() != version) {
      throw ModelError("model header version disagrees with container version");
    }
    ModelShape s;
    s.numeric_dim = h.at("numeric_dim").get<std::size_t>();
    s.block1 = h.at("block1").get<std::vector<std::size_t>>();
    s.block2 = h.at("block2").get<std::vector<std::size_t>>();
    s.board_cardinality = h.at("board_cardinality").get<std::size_t>();
    s.strategy_cardinality = h.at("strategy_cardinality").get<std::size_t>();
    s.embedding_dim = h.at("embedding_dim").get<std::size_t>();
    MlpRegressor m(parse_target(h.at("target").get<std::string>()), s, 0);
    m.feature_schema_version_ = h.at("feature_schema_version").get<std::uint32_t>();
    if (m.params_.size() != count || h.at("param_count").get<std::uint64_t>() != count) {
      throw ModelError("model parameter count does not match its architecture");
    }
    for (std::size_t i = 0; i < count; ++i) {
      m.params_[i] = std::bit_cast<double>(r.le<std::uint64_t>());
    }
    auto unbits = [](const json& j) {
      std::vector<double> out;
      for (std::uint64_t b : j.get<std::vector<std::uint64_t>>()) out.push_back(std::bit_cast<double>(b));
      return out;
    };
    m.set_feature_scaler(unbits(h.at("feature_mean_bits")), unbits(h.at("feature_scale_bits")));
    m.set_target_scaler(std::bit_cast<double>(h.at("target_offset_bits").get<std::uint64_t>()),
                        std::bit_cast<double>(h.at("target_scale_bits").get<std::uint64_t>()));
    return m;
  } catch (const json::exception& e) {
    throw ModelError(std::string("model header invalid: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw ModelError(std::string("model header invalid: ") + e.what());
  } catch (const ConfigError& e) {
    throw ModelError(std::string("model header invalid: ") + e.what());
  }
}

void save_model(const MlpRegressor& model, const std::string& path) {
  const auto bytes = save_model_bytes(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ModelError("cannot write model file '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw ModelError("write failed for model file '" + path + "'");
}

MlpRegressor load_model(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ModelError("missing model file '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  return load_model_bytes(bytes);
}

std::uint64_t MlpRegressor::fingerprint() const {
  const auto bytes = save_model_bytes(*this);
  return get_le<std::uint64_t>(bytes, bytes.size() - sizeof(std::uint64_t));
}

}  // namespace fpgacost
