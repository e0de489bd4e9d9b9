// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <sstream>

#include "fpgacost/datagen.hpp"
#include "fpgacost/error.hpp"
#include "fpgacost/netir.hpp"

using namespace fpgacost;

namespace {

std::string slurp(const std::string& rel) {
  std::ifstream in(std::string(FPGACOST_SOURCE_DIR) + "/" + rel);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

const char* kTopQuarks = R"({
  "name": "Top Quarks", "input_size": 10,
  "layers": [
    {"kind": "dense", "units": 32}, {"kind": "activation", "activation": "relu"},
    {"kind": "dense", "units": 1}, {"kind": "activation", "activation": "sigmoid"}]})";

}  // namespace

TEST_CASE("top quarks parses into a four layer network") {
  const auto net = parse_network(kTopQuarks);
  REQUIRE(net.layers.size() == 4);
  const std::vector<std::pair<std::size_t, std::size_t>> shapes{{10, 32}, {32, 32}, {32, 1}, {1, 1}};
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(net.layers[i].input_size == shapes[i].first);
    CHECK(net.layers[i].output_size == shapes[i].second);
  }
  CHECK(param_count(net) == 385);
  CHECK(net.layers[3].activation == ActKind::Sigmoid);
}

TEST_CASE("parse errors") {
  SUBCASE("declared input disagrees with previous output") {
    const char* doc = R"({"name": "x", "input_size": 4, "layers": [
      {"kind": "dense", "units": 4}, {"kind": "dense", "units": 2, "input_size": 8}]})";
    CHECK_THROWS_WITH_AS(parse_network(doc), doctest::Contains("shape mismatch"), NetworkError);
  }
  SUBCASE("skip from a layer of another width") {
    const char* doc = R"({"name": "x", "input_size": 4, "layers": [
      {"kind": "dense", "units": 8}, {"kind": "dense", "units": 4}, {"kind": "skip_add", "skip_source": 0}]})";
    CHECK_THROWS_WITH_AS(parse_network(doc), doctest::Contains("skip_source"), NetworkError);
  }
  SUBCASE("skip from itself or later") {
    const char* doc = R"({"name": "x", "input_size": 4, "layers": [
      {"kind": "dense", "units": 4}, {"kind": "skip_add", "skip_source": 1}]})";
    CHECK_THROWS_AS(parse_network(doc), NetworkError);
  }
  SUBCASE("unknown kind") {
    const char* doc = R"({"name": "x", "input_size": 4, "layers": [{"kind": "conv2d"}]})";
    CHECK_THROWS_WITH_AS(parse_network(doc), doctest::Contains("unknown layer kind"), NetworkError);
  }
  SUBCASE("missing field") {
    CHECK_THROWS_AS(parse_network(R"({"name": "x", "layers": []})"), NetworkError);
    CHECK_THROWS_AS(parse_network(R"({"name": "x", "input_size": 4, "layers": [{"kind": "dense"}]})"),
                    NetworkError);
  }
  SUBCASE("wrong types and stray fields") {
    CHECK_THROWS_AS(parse_network(R"({"name": 3, "input_size": 4, "layers": []})"), NetworkError);
    CHECK_THROWS_AS(
        parse_network(R"({"name": "x", "input_size": 4, "layers": [{"kind": "dense", "units": -2}]})"),
        NetworkError);
    CHECK_THROWS_AS(parse_network(R"({"name": "x", "input_size": 4, "layers": [
      {"kind": "activation", "activation": "relu", "units": 3}]})"),
                    NetworkError);
    CHECK_THROWS_AS(parse_network(R"({"name": "x", "input_size": 4, "layers": [
      {"kind": "activation", "activation": "gelu"}]})"),
                    NetworkError);
  }
  SUBCASE("empty and invalid documents") {
    CHECK_THROWS_AS(parse_network(R"({"name": "x", "input_size": 4, "layers": []})"), NetworkError);
    CHECK_THROWS_AS(parse_network("{"), NetworkError);
    CHECK_THROWS_AS(parse_network(R"({"name": "x", "input_size": 0, "layers": [{"kind": "dropout"}]})"),
                    NetworkError);
  }
  SUBCASE("pinned reuse beyond the layer size") {
    const char* doc = R"({"name": "x", "input_size": 2, "layers": [{"kind": "dense", "units": 2, "reuse_factor": 5}]})";
    CHECK_THROWS_AS(parse_network(doc), NetworkError);
  }
}

TEST_CASE("param_count") {
  CHECK(param_count(make_network("mnist", 784, {dense(16), activation(ActKind::ReLU), dense(10),
                                                activation(ActKind::Softmax)})) == 12730);
  CHECK(param_count(make_network("acts", 5, {activation(ActKind::ReLU), activation(ActKind::Tanh)})) == 0);
  CHECK(param_count(make_network("nobias", 3, {dense(4, false)})) == 12);
  CHECK(param_count(make_network("bn", 3, {dense(4), batch_norm()})) == 16 + 8);
}

TEST_CASE("param_count ignores activation and dropout insertion") {
  const GeneratorSpec spec = default_generator_spec();
  const ActKind acts[] = {ActKind::ReLU, ActKind::Tanh, ActKind::Sigmoid, ActKind::Softmax};
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    const auto s = generate_architecture(seed, spec);
    const auto before = param_count(s.network);
    std::vector<LayerSpec> layers;
    for (LayerSpec l : s.network.layers) {
      if (l.kind == LayerKind::SkipAdd) {
        // Every source index shifts by the number of layers inserted before it.
        l.skip_source = *l.skip_source * 2 + 1;
      }
      l.input_size = 0;
      l.output_size = 0;
      layers.push_back(l);
      layers.push_back(seed % 2 ? dropout() : activation(acts[seed % 4]));
    }
    const auto widened = make_network("w", s.network.input_size, layers);
    CHECK(param_count(widened) == before);
  }
}

TEST_CASE("effective_reuse") {
  const auto net = make_network("x", 2, {dense(2), dense(32), activation(ActKind::ReLU)});
  CHECK(effective_reuse(net.layers[0], 64) == 4);
  const auto wide = make_network("y", 16, {dense(32)});
  CHECK(effective_reuse(wide.layers[0], 32) == 32);
  const auto unit = make_network("z", 1, {dense(1)});
  CHECK(effective_reuse(unit.layers[0], 1) == 1);
  CHECK_THROWS_AS(effective_reuse(net.layers[2], 4), NetworkError);
  CHECK_THROWS_AS(effective_reuse(net.layers[0], 0), ConfigError);
  for (std::size_t r = 1; r < 5000; r += 37) {
    CHECK(effective_reuse(net.layers[1], r) <= 2 * 32);
    CHECK(effective_reuse(net.layers[1], r) >= 1);
  }
}

TEST_CASE("apply_reuse keeps pinned layers") {
  const auto net = parse_network(slurp("data/networks/residual.json"));
  const auto applied = apply_reuse(net, 64);
  CHECK(applied.layers[0].reuse_factor == 4);
  CHECK(applied.layers[3].reuse_factor == 64);
  CHECK(applied.layers[8].reuse_factor == 64);
  CHECK(apply_reuse(net, 2048).layers[3].reuse_factor == 1024);
}

TEST_CASE("serialize then parse round-trips") {
  for (const char* f : {"data/networks/jet.json", "data/networks/top_quarks.json", "data/networks/residual.json"}) {
    const auto net = parse_network(slurp(f));
    CHECK(parse_network(serialize_network(net)) == net);
  }
  const GeneratorSpec spec = default_generator_spec();
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    // Unpinned reuse is a synthesis setting, not part of the document.
    const auto g = generate_architecture(seed, spec);
    const auto back = parse_network(serialize_network(g.network));
    CHECK(apply_reuse(back, static_cast<std::size_t>(g.config.global_reuse)) == g.network);
  }
}

TEST_CASE("generated networks chain shapes") {
  const GeneratorSpec spec = default_generator_spec();
  for (std::uint64_t seed = 0; seed < 500; ++seed) {
    const auto net = generate_architecture(seed, spec).network;
    REQUIRE(net.layers.front().input_size == net.input_size);
    for (std::size_t i = 0; i + 1 < net.layers.size(); ++i) {
      CHECK(net.layers[i].output_size == net.layers[i + 1].input_size);
    }
    CHECK_NOTHROW(validate(net));
  }
}

TEST_CASE("board registry") {
  const auto& reg = default_board_registry();
  REQUIRE(reg.size() == 3);
  CHECK(reg.contains("pynq-z2"));
  CHECK(reg.contains("zcu102"));
  CHECK(reg.contains("alveo-u200"));
  CHECK(reg.index_of("zcu102") == 1);
  CHECK(reg.at("zcu102").dsp_capacity == 2520);
  CHECK_THROWS_AS(reg.at("virtex"), ConfigError);

  // The compiled-in copy matches the shipped file.
  const auto from_file = load_board_registry_file(std::string(FPGACOST_SOURCE_DIR) + "/data/boards.json");
  CHECK(from_file.boards() == reg.boards());

  CHECK_THROWS_WITH_AS(load_board_registry(R"({"boards": [
      {"id": "a", "bram_capacity": 1, "dsp_capacity": 1, "ff_capacity": 1, "lut_capacity": 0}]})"),
                       doctest::Contains("positive"), ConfigError);
  CHECK_THROWS_WITH_AS(load_board_registry(R"({"boards": [
      {"id": "pynq-z2", "bram_capacity": 1, "dsp_capacity": 1, "ff_capacity": 1, "lut_capacity": 1},
      {"id": "pynq-z2", "bram_capacity": 2, "dsp_capacity": 2, "ff_capacity": 2, "lut_capacity": 2}]})"),
                       doctest::Contains("duplicate"), ConfigError);
  CHECK_THROWS_AS(load_board_registry("[]"), ConfigError);
}

TEST_CASE("synthesis config validation") {
  SynthesisConfig c;
  c.board_id = "zcu102";
  c.precision_bits = 7;
  c.global_reuse = 3;
  CHECK_NOTHROW(validate(c));
  c.precision_bits = 0;
  CHECK_THROWS_AS(validate(c), ConfigError);
  c.precision_bits = 8;
  c.global_reuse = -1;
  CHECK_THROWS_AS(validate(c), ConfigError);
  CHECK(parse_strategy("latency") == Strategy::Latency);
  CHECK(parse_strategy("Resource") == Strategy::Resource);
  CHECK_THROWS_AS(parse_strategy("fast"), ConfigError);
}
