// Copyright (c) 2026, fpgacost authors
// SPDX-License-Identifier: Apache-2.0
//
// Network intermediate representation: layer specs, shape inference,
// synthesis configuration and the board registry.

#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace fpgacost {

enum class LayerKind { Dense, Activation, BatchNorm, SkipAdd, Dropout };
enum class ActKind { ReLU, Tanh, Sigmoid, Softmax };
enum class Strategy { Latency, Resource };

std::string_view to_string(LayerKind kind);
std::string_view to_string(ActKind act);
std::string_view to_string(Strategy strategy);

// Case-insensitive; throw on unknown names.
ActKind parse_act_kind(std::string_view name);
Strategy parse_strategy(std::string_view name);

struct LayerSpec {
  LayerKind kind = LayerKind::Dense;
  std::optional<ActKind> activation;  // Activation only
  std::size_t input_size = 0;
  std::size_t output_size = 0;
  std::size_t units = 0;  // Dense only
  bool use_bias = false;  // Dense only
  std::size_t reuse_factor = 1;  // Dense only
  // True when the reuse factor came from the document rather than from a
  // global request; pinned values survive apply_reuse().
  bool reuse_pinned = false;
  std::optional<std::size_t> skip_source;  // SkipAdd only

  bool operator==(const LayerSpec&) const = default;
};

// Unshaped layer constructors; sizes are filled in by make_network().
LayerSpec dense(std::size_t units, bool use_bias = true);
LayerSpec activation(ActKind act);
LayerSpec batch_norm();
LayerSpec skip_add(std::size_t source);
LayerSpec dropout();

struct NetworkArchitecture {
  std::string name;
  std::size_t input_size = 0;
  std::vector<LayerSpec> layers;

  bool operator==(const NetworkArchitecture&) const = default;
};

/// Runs shape inference over `layers` and validates every layer invariant.
/// A layer whose input_size is already nonzero must agree with the inferred
/// size. Throws NetworkError.
NetworkArchitecture make_network(std::string name, std::size_t input_size,
                                 std::vector<LayerSpec> layers);

/// Re-checks a network that was built by hand. Throws NetworkError.
void validate(const NetworkArchitecture& net);

NetworkArchitecture parse_network(std::string_view document);
std::string serialize_network(const NetworkArchitecture& net);

/// Trainable parameters: dense weights and biases, two per batch-norm channel.
std::uint64_t param_count(const NetworkArchitecture& net);

/// Parameters of one layer under the same accounting as param_count().
std::uint64_t layer_params(const LayerSpec& layer);

/// min(requested, input_size * output_size). Dense layers only.
std::size_t effective_reuse(const LayerSpec& layer, std::size_t requested);

/// Copy of `net` with every unpinned Dense layer's reuse set to
/// effective_reuse(layer, requested).
NetworkArchitecture apply_reuse(const NetworkArchitecture& net, std::size_t requested);

struct SynthesisConfig {
  int precision_bits = 8;
  int global_reuse = 1;
  Strategy strategy = Strategy::Latency;
  std::string board_id;
  // Metadata only; the predictors were trained at a single clock.
  double clock_period_ns = 10.0;

  bool operator==(const SynthesisConfig&) const = default;
};

/// Accepts any positive precision/reuse. Throws ConfigError.
void validate(const SynthesisConfig& cfg);

struct BoardSpec {
  std::string id;
  std::int64_t bram_capacity = 0;
  std::int64_t dsp_capacity = 0;
  std::int64_t ff_capacity = 0;
  std::int64_t lut_capacity = 0;

  bool operator==(const BoardSpec&) const = default;
};

/// Boards in declaration order. The order defines the categorical encoding.
class BoardRegistry {
 public:
  BoardRegistry() = default;
  explicit BoardRegistry(std::vector<BoardSpec> boards);

  const std::vector<BoardSpec>& boards() const { return boards_; }
  std::size_t size() const { return boards_.size(); }
  bool contains(std::string_view id) const;
  std::size_t index_of(std::string_view id) const;  // throws ConfigError
  const BoardSpec& at(std::string_view id) const;   // throws ConfigError

 private:
  std::vector<BoardSpec> boards_;
};

BoardRegistry load_board_registry(std::string_view document);
BoardRegistry load_board_registry_file(const std::string& path);

/// Registry text compiled into the library; identical to data/boards.json.
std::string_view default_board_registry_document();
const BoardRegistry& default_board_registry();

}  // namespace fpgacost
