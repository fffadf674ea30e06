/*
 * Copyright 2026 The scsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */


#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scsim/actsi.hpp"
#include "scsim/bitstream.hpp"
#include "scsim/cost.hpp"
#include "scsim/scarith.hpp"

namespace scsim::net {

struct Shape {
  std::size_t h = 1;
  std::size_t w = 1;
  std::size_t c = 1;

  std::size_t size() const { return h * w * c; }
  bool operator==(const Shape&) const = default;
};

std::string to_string(const Shape& s);

enum class LayerKind { conv2d, dense, avgpool, flatten };
enum class ActKind { bn_relu, clip, identity };

/// Per-output-channel activation. bn_relu is the BN-fused ReLU, clip is the
/// BN affine map saturated by the output range, identity ignores gamma/beta.
struct Activation {
  ActKind kind = ActKind::identity;
  std::vector<double> gamma;
  std::vector<double> beta;

  double eval(std::size_t channel, double x) const;
};

struct LayerSpec {
  std::string id;
  LayerKind kind = LayerKind::dense;
  Shape in_shape;
  Shape out_shape;
  std::size_t kernel_h = 1;
  std::size_t kernel_w = 1;
  std::size_t stride = 1;
  std::size_t pad = 0;
  /// Row-major [out_ch][kh][kw][in_ch], entries in {-1, 0, +1}.
  std::vector<int> weights;
  double alpha_w = 1.0;
  Activation act;
  std::size_t act_bsl = 2;
  double alpha_act = 1.0;
  std::optional<std::string> residual_from;
  std::size_t residual_bsl = 0;
  int rescale_log2 = 0;

  // Filled in by validate().
  std::size_t in_bsl = 0;
  double alpha_in = 1.0;
  int residual_index = -1;

  bool has_weights() const { return kind == LayerKind::conv2d || kind == LayerKind::dense; }
  /// Products per output element.
  std::size_t fan_in() const { return kernel_h * kernel_w * in_shape.c; }
  /// Product bits entering the accumulator.
  std::size_t accumulation_width() const { return fan_in() * in_bsl; }
  /// Scale of every product: alpha_w * alpha_in.
  double product_alpha() const { return alpha_w * alpha_in; }
};

struct InputQuant {
  Shape shape;
  std::size_t bsl = 2;
  double alpha = 1.0;
};

struct ModelGraph {
  std::string name;
  InputQuant input;
  std::vector<LayerSpec> layers;

  std::size_t output_bsl() const { return layers.empty() ? input.bsl : layers.back().act_bsl; }
  double output_alpha() const { return layers.empty() ? input.alpha : layers.back().alpha_act; }
  Shape output_shape() const { return layers.empty() ? input.shape : layers.back().out_shape; }
};

/// Checks every invariant and fills the derived fields (in_bsl, alpha_in,
/// residual_index, pass-through BSLs). Diagnostics name the layer and field.
/// Throws ValidationError (ScaleError for alpha ratios).
void validate(ModelGraph& model);

/// Quantized tensor in [H][W][C] row-major order.
struct Tensor {
  Shape shape;
  std::size_t bsl = 2;
  double alpha = 1.0;
  std::vector<std::int64_t> data;

  bool operator==(const Tensor&) const = default;
};

struct RunConfig {
  cost::DatapathConfig datapath;
  std::optional<arith::FaultConfig> fault;
  /// Replaces act_bsl of the named layers before running.
  std::map<std::string, std::size_t> act_bsl_overrides;
};

/// Copy of the model with act_bsl overrides applied and re-validated.
ModelGraph apply_overrides(const ModelGraph& model, const RunConfig& cfg);

struct LayerTrace {
  std::string id;
  /// Decoded value at the SI input (the accumulated sum) per output element,
  /// in units of the SI input alpha. Empty for flatten.
  std::vector<std::int64_t> accum_q;
  std::vector<std::size_t> accum_popcount;
  std::size_t accum_width = 0;
  double accum_alpha = 0.0;
  /// Per-channel SI taps used by the layer.
  std::vector<si::TapVector> taps;
};

struct RunResult {
  Tensor output;
  std::vector<LayerTrace> trace;
};

/// Checks shape, BSL and value range of an input tensor against the model.
void check_input(const ModelGraph& model, const Tensor& input);

/// Bit-level execution on the SC datapath. Throws ConfigError when an
/// approximate or temporal configuration is missing for some width.
RunResult run_sc(const ModelGraph& model, const Tensor& input, const RunConfig& cfg = {});

/// Integer reference: plain ternary dot products, ceil-rounded residual
/// division, activation quantized to the largest output level not above f.
Tensor run_oracle(const ModelGraph& model, const Tensor& input);

/// Reference run where every stored activation passes through a
/// two's-complement register of binary_width(bsl) bits (saturating on
/// encode) and is hit by independent bit flips.
Tensor run_oracle_binary_faults(const ModelGraph& model, const Tensor& input,
                                const arith::FaultConfig& fault);

/// Radix width matched to a BSL: log2(L) bits (L=16 -> 4 bits), 2 bits at L=2.
int binary_width(std::size_t bsl);

/// Index of the largest element; ties resolve to the lowest index.
std::size_t argmax(const Tensor& t);

struct Sample {
  Tensor input;
  std::size_t label = 0;
};

struct Dataset {
  std::string model_name;
  std::vector<Sample> samples;
};

struct FaultRow {
  double ber = 0.0;
  std::size_t repetition = 0;
  std::uint64_t seed = 0;
  double accuracy_loss_sc = 0.0;
  double accuracy_loss_binary = 0.0;
};

/// Per-sample seeds are derived from (seed, repetition, sample index), so the
/// result does not depend on `threads`.
std::vector<FaultRow> evaluate_fault_tolerance(const ModelGraph& model, const Dataset& data,
                                               const std::vector<double>& bers,
                                               std::size_t repetitions, std::uint64_t seed,
                                               std::size_t threads = 1);

double accuracy(const ModelGraph& model, const Dataset& data);

/// Datapath geometry of one layer (conv/dense only).
cost::LayerShape layer_shape(const LayerSpec& layer);

/// Per-layer costs of every conv/dense layer, in model order. When
/// act_bsl_override is set, every multiplier input uses that BSL.
std::vector<cost::CostReport> cost_model(const ModelGraph& model, const cost::DatapathConfig& dp,
                                         std::optional<std::size_t> act_bsl_override = {});

/// 64-bit mix used to derive independent seeds.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0);

}  // namespace scsim::net
