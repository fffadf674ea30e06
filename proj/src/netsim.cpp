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


#include "scsim/netsim.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <thread>

#include "scsim/actsi.hpp"
#include "scsim/approxbsn.hpp"
#include "scsim/bsn.hpp"
#include "scsim/errors.hpp"
#include "scsim/residual.hpp"

namespace scsim::net {

std::string to_string(const Shape& s) {
  return "[" + std::to_string(s.h) + "," + std::to_string(s.w) + "," + std::to_string(s.c) + "]";
}

double Activation::eval(std::size_t channel, double x) const {
  switch (kind) {
    case ActKind::bn_relu:
      return si::fused_bn_relu(gamma[channel], beta[channel], x);
    case ActKind::clip:
      return gamma[channel] * (x - beta[channel]);
    case ActKind::identity:
      return x;
  }
  return x;
}

namespace {

std::string where(std::size_t i, const LayerSpec& l, const std::string& field) {
  return "layers[" + std::to_string(i) + "] (" + l.id + ")." + field;
}

void check_bsl(std::size_t bsl, const std::string& field) {
  if (bsl < 2 || bsl % 2 != 0) {
    throw ValidationError(field + ": BSL " + std::to_string(bsl) + " must be even and >= 2");
  }
}

void check_alpha(double a, const std::string& field) {
  if (!(a > 0.0) || !std::isfinite(a)) {
    throw ScaleError(field + ": alpha must be positive and finite");
  }
}

Shape conv_out(const LayerSpec& l) {
  if (l.in_shape.h + 2 * l.pad < l.kernel_h || l.in_shape.w + 2 * l.pad < l.kernel_w) return {0, 0, 0};
  return {(l.in_shape.h + 2 * l.pad - l.kernel_h) / l.stride + 1,
          (l.in_shape.w + 2 * l.pad - l.kernel_w) / l.stride + 1, l.out_shape.c};
}

void validate_layer(std::size_t i, LayerSpec& l) {
  if (l.id.empty()) throw ValidationError("layers[" + std::to_string(i) + "].id: empty");
  const auto shape_error = [&](const std::string& field, const Shape& expected) {
    throw SizeError(where(i, l, field) + ": expected " + to_string(expected) + ", got " +
                    to_string(field == "in_shape" ? l.in_shape : l.out_shape));
  };
  switch (l.kind) {
    case LayerKind::flatten: {
      const Shape expect{1, 1, l.in_shape.size()};
      if (l.out_shape != expect) shape_error("out_shape", expect);
      l.act_bsl = l.in_bsl;
      l.alpha_act = l.alpha_in;
      return;
    }
    case LayerKind::avgpool: {
      const std::size_t k = l.kernel_h;
      if (k < 2 || l.kernel_w != k || !std::has_single_bit(k * k)) {
        throw ValidationError(where(i, l, "kernel") +
                              ": avgpool needs a square kernel with a power-of-two area");
      }
      if (l.stride != k || l.pad != 0) {
        throw ValidationError(where(i, l, "stride") + ": avgpool windows must tile (stride = kernel, pad = 0)");
      }
      if (l.in_shape.h % k != 0 || l.in_shape.w % k != 0) {
        throw SizeError(where(i, l, "in_shape") + ": not divisible by the pooling kernel");
      }
      const Shape expect{l.in_shape.h / k, l.in_shape.w / k, l.in_shape.c};
      if (l.out_shape != expect) shape_error("out_shape", expect);
      l.act_bsl = l.in_bsl * k * k;
      l.alpha_act = l.alpha_in;
      return;
    }
    case LayerKind::dense:
      if (l.in_shape.h != 1 || l.in_shape.w != 1) {
        throw SizeError(where(i, l, "in_shape") + ": dense input must be [1,1,N], got " +
                        to_string(l.in_shape));
      }
      if (l.out_shape.h != 1 || l.out_shape.w != 1) {
        throw SizeError(where(i, l, "out_shape") + ": dense output must be [1,1,N]");
      }
      l.kernel_h = l.kernel_w = l.stride = 1;
      l.pad = 0;
      break;
    case LayerKind::conv2d:
      if (l.kernel_h == 0 || l.kernel_w == 0 || l.stride == 0) {
        throw ValidationError(where(i, l, "kernel") + ": kernel and stride must be positive");
      }
      break;
  }

  const Shape expect = conv_out(l);
  if (l.out_shape != expect || expect.size() == 0) shape_error("out_shape", expect);
  const std::size_t n_weights = l.out_shape.c * l.fan_in();
  if (l.weights.size() != n_weights) {
    throw SizeError(where(i, l, "weights") + ": expected " + std::to_string(n_weights) +
                    " entries, got " + std::to_string(l.weights.size()));
  }
  for (std::size_t k = 0; k < l.weights.size(); ++k) {
    if (l.weights[k] < -1 || l.weights[k] > 1) {
      throw RangeError(where(i, l, "weights[" + std::to_string(k) + "]") + ": value " +
                       std::to_string(l.weights[k]) + " is not ternary");
    }
  }
  check_alpha(l.alpha_w, where(i, l, "alpha_w"));
  check_alpha(l.alpha_act, where(i, l, "alpha_act"));
  check_bsl(l.act_bsl, where(i, l, "act_bsl"));
  if (l.act.kind != ActKind::identity) {
    if (l.act.gamma.size() != l.out_shape.c || l.act.beta.size() != l.out_shape.c) {
      throw SizeError(where(i, l, "act") + ": gamma and beta need " +
                      std::to_string(l.out_shape.c) + " entries");
    }
    for (std::size_t c = 0; c < l.act.gamma.size(); ++c) {
      if (!(l.act.gamma[c] > 0.0) || !std::isfinite(l.act.gamma[c]) || !std::isfinite(l.act.beta[c])) {
        throw ValidationError(where(i, l, "act.gamma[" + std::to_string(c) + "]") +
                              ": gamma must be positive and beta finite");
      }
    }
  }
}

void validate_residual(std::size_t i, LayerSpec& l, const std::vector<LayerSpec>& layers) {
  l.residual_index = -1;
  if (!l.residual_from) return;
  if (!l.has_weights()) {
    throw ValidationError(where(i, l, "residual_from") + ": only conv2d/dense layers take a residual");
  }
  std::size_t src = 0;
  while (src < i && layers[src].id != *l.residual_from) ++src;
  if (src == i) {
    throw ValidationError(where(i, l, "residual_from") + ": '" + *l.residual_from +
                          "' is not an earlier layer");
  }
  const LayerSpec& s = layers[src];
  if (!s.has_weights()) {
    throw ValidationError(where(i, l, "residual_from") + ": source must be a conv2d/dense layer");
  }
  if (s.out_shape != l.out_shape) {
    throw SizeError(where(i, l, "residual_from") + ": source shape " + to_string(s.out_shape) +
                    " differs from " + to_string(l.out_shape));
  }
  if (l.residual_bsl != s.act_bsl) {
    throw SizeError(where(i, l, "residual_bsl") + ": " + std::to_string(l.residual_bsl) +
                    " but source produces " + std::to_string(s.act_bsl));
  }
  const double ratio = s.alpha_act / l.product_alpha();
  const auto log2 = residual::exact_log2(ratio);
  if (!log2) {
    throw ScaleError(where(i, l, "rescale_log2") + ": residual alpha ratio " + format_real(ratio) +
                     " is not a power of two");
  }
  if (*log2 != l.rescale_log2) {
    throw ScaleError(where(i, l, "rescale_log2") + ": residual alpha ratio is 2^" +
                     std::to_string(*log2) + ", field says " + std::to_string(l.rescale_log2));
  }
  if (l.rescale_log2 < 0 && l.residual_bsl % 4 != 0) {
    throw ConfigError(where(i, l, "residual_bsl") + ": division needs a multiple of 4");
  }
  l.residual_index = static_cast<int>(src);
}

}  // namespace

void validate(ModelGraph& model) {
  if (model.input.shape.size() == 0) throw SizeError("input.shape: empty");
  check_bsl(model.input.bsl, "input.bsl");
  check_alpha(model.input.alpha, "input.alpha");
  if (model.layers.empty()) throw ValidationError("layers: model has no layers");
  Shape shape = model.input.shape;
  std::size_t bsl = model.input.bsl;
  double alpha = model.input.alpha;
  for (std::size_t i = 0; i < model.layers.size(); ++i) {
    LayerSpec& l = model.layers[i];
    for (std::size_t j = 0; j < i; ++j) {
      if (model.layers[j].id == l.id) {
        throw ValidationError(where(i, l, "id") + ": duplicate layer id");
      }
    }
    if (l.in_shape != shape) {
      throw SizeError(where(i, l, "in_shape") + ": expected " + to_string(shape) + ", got " +
                      to_string(l.in_shape));
    }
    l.in_bsl = bsl;
    l.alpha_in = alpha;
    validate_layer(i, l);
    validate_residual(i, l, model.layers);
    shape = l.out_shape;
    bsl = l.act_bsl;
    alpha = l.alpha_act;
  }
}

ModelGraph apply_overrides(const ModelGraph& model, const RunConfig& cfg) {
  if (cfg.act_bsl_overrides.empty()) return model;
  ModelGraph out = model;
  for (const auto& [id, bsl] : cfg.act_bsl_overrides) {
    auto it = std::find_if(out.layers.begin(), out.layers.end(),
                           [&](const LayerSpec& l) { return l.id == id; });
    if (it == out.layers.end()) throw ConfigError("act_bsl override: unknown layer '" + id + "'");
    if (!it->has_weights()) throw ConfigError("act_bsl override: layer '" + id + "' has no SI");
    it->act_bsl = bsl;
    for (auto& l : out.layers) {
      if (l.residual_from == id) l.residual_bsl = bsl;
    }
  }
  validate(out);
  return out;
}

void check_input(const ModelGraph& model, const Tensor& input) {
  if (input.shape != model.input.shape) {
    throw SizeError("input shape " + to_string(input.shape) + " does not match model input " +
                    to_string(model.input.shape));
  }
  if (input.bsl != model.input.bsl) {
    throw SizeError("input BSL " + std::to_string(input.bsl) + " does not match model input BSL " +
                    std::to_string(model.input.bsl));
  }
  if (input.alpha != model.input.alpha) {
    throw ScaleError("input alpha " + format_real(input.alpha) + " does not match model alpha " +
                     format_real(model.input.alpha));
  }
  if (input.data.size() != input.shape.size()) {
    throw SizeError("input data has " + std::to_string(input.data.size()) + " values, shape needs " +
                    std::to_string(input.shape.size()));
  }
  const auto half = static_cast<std::int64_t>(input.bsl / 2);
  for (std::size_t k = 0; k < input.data.size(); ++k) {
    if (input.data[k] < -half || input.data[k] > half) {
      throw RangeError("input data[" + std::to_string(k) + "] = " + std::to_string(input.data[k]) +
                       " outside [-" + std::to_string(half) + ", " + std::to_string(half) + "]");
    }
  }
}

namespace {

std::size_t flat_index(const Shape& s, std::size_t h, std::size_t w, std::size_t c) {
  return (h * s.w + w) * s.c + c;
}

int weight_at(const LayerSpec& l, std::size_t o, std::size_t kh, std::size_t kw, std::size_t ci) {
  return l.weights[((o * l.kernel_h + kh) * l.kernel_w + kw) * l.in_shape.c + ci];
}

/// Visits the input index of every kernel tap for output position (oh, ow);
/// taps in the zero padding report nullopt.
template <typename Fn>
void for_each_tap(const LayerSpec& l, std::size_t oh, std::size_t ow, Fn&& fn) {
  for (std::size_t kh = 0; kh < l.kernel_h; ++kh) {
    for (std::size_t kw = 0; kw < l.kernel_w; ++kw) {
      const auto ih = static_cast<std::int64_t>(oh * l.stride + kh) - static_cast<std::int64_t>(l.pad);
      const auto iw = static_cast<std::int64_t>(ow * l.stride + kw) - static_cast<std::int64_t>(l.pad);
      const bool inside = ih >= 0 && iw >= 0 && ih < static_cast<std::int64_t>(l.in_shape.h) &&
                          iw < static_cast<std::int64_t>(l.in_shape.w);
      for (std::size_t ci = 0; ci < l.in_shape.c; ++ci) {
        std::optional<std::size_t> idx;
        if (inside) {
          idx = flat_index(l.in_shape, static_cast<std::size_t>(ih), static_cast<std::size_t>(iw), ci);
        }
        fn(kh, kw, ci, idx);
      }
    }
  }
}

using Streams = std::vector<Bitstream>;

Bitstream accumulate_products(const BitVector& products, double alpha, const LayerSpec& l,
                              const cost::DatapathConfig& dp) {
  const std::size_t m = products.size();
  switch (dp.mode) {
    case cost::Mode::exact:
      return Bitstream(bsn::evaluate(bsn::bitonic(m), products), alpha);
    case cost::Mode::approx: {
      auto it = dp.approx.find(m);
      if (it == dp.approx.end()) {
        throw ConfigError("no approx config for accumulation width " + std::to_string(m) +
                          " (layer " + l.id + ")");
      }
      return approx::eval_approx_bsn(it->second, Bitstream(products, alpha));
    }
    case cost::Mode::temporal: {
      auto it = dp.temporal.find(m);
      if (it == dp.temporal.end()) {
        throw ConfigError("no temporal config for accumulation width " + std::to_string(m) +
                          " (layer " + l.id + ")");
      }
      const auto& plan = it->second;
      if (plan.schedule.total_width() < m) {
        throw ConfigError("temporal schedule for width " + std::to_string(m) + " covers only " +
                          std::to_string(plan.schedule.total_width()) + " bits");
      }
      const Bitstream padded = approx::pad_with_zeros(Bitstream(products, alpha), plan.schedule.total_width());
      return approx::eval_temporal(plan.schedule, plan.inner, padded);
    }
  }
  throw ConfigError("unknown datapath mode");
}

Streams run_weighted_sc(const LayerSpec& l, const Streams& in, const Streams* residual,
                        const cost::DatapathConfig& dp, bool faulty, LayerTrace& trace) {
  const Shape& os = l.out_shape;
  Streams out;
  out.reserve(os.size());
  const Bitstream zero = zero_stream(l.in_bsl, l.alpha_in);
  const double alpha_prod = l.product_alpha();
  std::vector<si::TapVector> taps;
  BitVector products;
  products.reserve(l.accumulation_width());
  for (std::size_t oh = 0; oh < os.h; ++oh) {
    for (std::size_t ow = 0; ow < os.w; ++ow) {
      for (std::size_t o = 0; o < os.c; ++o) {
        products.clear();
        for_each_tap(l, oh, ow, [&](std::size_t kh, std::size_t kw, std::size_t ci, std::optional<std::size_t> idx) {
          const arith::TernaryCode w = arith::TernaryCode::from_value(weight_at(l, o, kh, kw, ci), l.alpha_w);
          const Bitstream p = arith::sign_gated_multiply(w, idx ? in[*idx] : zero);
          products.insert(products.end(), p.bits().begin(), p.bits().end());
        });
        Bitstream sum = accumulate_products(products, alpha_prod, l, dp);
        if (residual) {
          const Bitstream& r = (*residual)[flat_index(os, oh, ow, o)];
          const auto ratio = residual::exact_log2(r.alpha() / sum.alpha());
          if (!ratio) {
            throw ConfigError("layer " + l.id + ": accumulator stride makes the residual ratio " +
                              format_real(r.alpha() / sum.alpha()) + " not a power of two");
          }
          sum = residual::align_and_accumulate(faulty ? canonicalize(r) : r, sum, *ratio);
        }
        if (taps.size() <= o) {
          // Every output element of a layer sees the same SI input width and alpha.
          for (std::size_t c = 0; c < os.c; ++c) {
            const auto f = [&l, c](double x) { return l.act.eval(c, x); };
            taps.push_back(si::compute_taps(f, sum.bsl(), l.act_bsl, sum.alpha(), l.alpha_act));
          }
          trace.taps = taps;
        }
        trace.accum_width = sum.bsl();
        trace.accum_alpha = sum.alpha();
        trace.accum_q.push_back(sum.q());
        trace.accum_popcount.push_back(sum.popcount());
        out.push_back(si::apply_taps(taps[o], sum));
      }
    }
  }
  return out;
}

Streams run_avgpool_sc(const LayerSpec& l, const Streams& in, LayerTrace& trace) {
  const Shape& os = l.out_shape;
  const std::size_t k = l.kernel_h;
  const int shift = std::countr_zero(k * k);
  Streams out;
  out.reserve(os.size());
  Streams window;
  for (std::size_t oh = 0; oh < os.h; ++oh) {
    for (std::size_t ow = 0; ow < os.w; ++ow) {
      for (std::size_t c = 0; c < os.c; ++c) {
        window.clear();
        for (std::size_t dh = 0; dh < k; ++dh) {
          for (std::size_t dw = 0; dw < k; ++dw) {
            window.push_back(in[flat_index(l.in_shape, oh * k + dh, ow * k + dw, c)]);
          }
        }
        const Bitstream sum = bsn::accumulate(window);
        trace.accum_width = sum.bsl();
        trace.accum_alpha = sum.alpha();
        trace.accum_q.push_back(sum.q());
        trace.accum_popcount.push_back(sum.popcount());
        out.push_back(residual::rescale_div(sum, shift));
      }
    }
  }
  return out;
}

}  // namespace

RunResult run_sc(const ModelGraph& model, const Tensor& input, const RunConfig& cfg) {
  check_input(model, input);
  std::optional<arith::Rng> rng;
  if (cfg.fault) {
    arith::validate(*cfg.fault);
    rng.emplace(cfg.fault->seed);
  }
  const bool faulty = cfg.fault && cfg.fault->ber > 0.0;

  Streams current;
  current.reserve(input.data.size());
  for (std::int64_t q : input.data) current.push_back(encode(q, input.bsl, input.alpha));

  RunResult result;
  std::vector<Streams> outputs;
  outputs.reserve(model.layers.size());
  for (const LayerSpec& l : model.layers) {
    if (rng) {
      for (auto& s : current) s = arith::inject_faults(s, *cfg.fault, *rng);
      // Residual consumers read the same faulty stored tensor.
      if (!outputs.empty()) outputs.back() = current;
    }
    LayerTrace trace;
    trace.id = l.id;
    Streams next;
    switch (l.kind) {
      case LayerKind::flatten:
        next = current;
        break;
      case LayerKind::avgpool:
        next = run_avgpool_sc(l, current, trace);
        break;
      case LayerKind::conv2d:
      case LayerKind::dense: {
        const Streams* res = l.residual_index >= 0 ? &outputs[static_cast<std::size_t>(l.residual_index)] : nullptr;
        next = run_weighted_sc(l, current, res, cfg.datapath, faulty, trace);
        break;
      }
    }
    result.trace.push_back(std::move(trace));
    outputs.push_back(next);
    current = std::move(next);
  }

  result.output.shape = model.output_shape();
  result.output.bsl = model.output_bsl();
  result.output.alpha = model.output_alpha();
  result.output.data.reserve(current.size());
  for (const auto& s : current) result.output.data.push_back(s.q());
  return result;
}

namespace {

std::int64_t ceil_shift(std::int64_t v, int n) {
  // ceil(v / 2^n) for either sign.
  return -((-v) >> n);
}

std::int64_t quantize_level(double y, std::size_t bsl, double alpha_out) {
  const auto half = static_cast<std::int64_t>(bsl / 2);
  for (std::int64_t level = half; level > -half; --level) {
    if (y >= alpha_out * static_cast<double>(level)) return level;
  }
  return -half;
}

using Values = std::vector<std::int64_t>;

Values oracle_weighted(const LayerSpec& l, const Values& in, const Values* residual) {
  const Shape& os = l.out_shape;
  Values out;
  out.reserve(os.size());
  for (std::size_t oh = 0; oh < os.h; ++oh) {
    for (std::size_t ow = 0; ow < os.w; ++ow) {
      for (std::size_t o = 0; o < os.c; ++o) {
        std::int64_t acc = 0;
        for_each_tap(l, oh, ow, [&](std::size_t kh, std::size_t kw, std::size_t ci, std::optional<std::size_t> idx) {
          if (idx) acc += weight_at(l, o, kh, kw, ci) * in[*idx];
        });
        if (residual) {
          const std::int64_t r = (*residual)[flat_index(os, oh, ow, o)];
          acc += l.rescale_log2 >= 0 ? r * (std::int64_t{1} << l.rescale_log2) : ceil_shift(r, -l.rescale_log2);
        }
        const double u = l.product_alpha() * static_cast<double>(acc);
        out.push_back(quantize_level(l.act.eval(o, u), l.act_bsl, l.alpha_act));
      }
    }
  }
  return out;
}

Values oracle_avgpool(const LayerSpec& l, const Values& in) {
  const Shape& os = l.out_shape;
  const std::size_t k = l.kernel_h;
  const int shift = std::countr_zero(k * k);
  Values out;
  out.reserve(os.size());
  for (std::size_t oh = 0; oh < os.h; ++oh) {
    for (std::size_t ow = 0; ow < os.w; ++ow) {
      for (std::size_t c = 0; c < os.c; ++c) {
        std::int64_t acc = 0;
        for (std::size_t dh = 0; dh < k; ++dh) {
          for (std::size_t dw = 0; dw < k; ++dw) acc += in[flat_index(l.in_shape, oh * k + dh, ow * k + dw, c)];
        }
        out.push_back(ceil_shift(acc, shift));
      }
    }
  }
  return out;
}

/// Shared layer loop; `perturb` sees each stored tensor before it is consumed.
template <typename Perturb>
Tensor oracle_run(const ModelGraph& model, const Tensor& input, Perturb&& perturb) {
  check_input(model, input);
  Values current = input.data;
  std::size_t bsl = input.bsl;
  std::vector<Values> outputs;
  outputs.reserve(model.layers.size());
  for (const LayerSpec& l : model.layers) {
    if (perturb(current, bsl) && !outputs.empty()) outputs.back() = current;
    Values next;
    switch (l.kind) {
      case LayerKind::flatten:
        next = current;
        break;
      case LayerKind::avgpool:
        next = oracle_avgpool(l, current);
        break;
      case LayerKind::conv2d:
      case LayerKind::dense: {
        const Values* res = l.residual_index >= 0 ? &outputs[static_cast<std::size_t>(l.residual_index)] : nullptr;
        next = oracle_weighted(l, current, res);
        break;
      }
    }
    outputs.push_back(next);
    current = std::move(next);
    bsl = l.act_bsl;
  }
  return Tensor{model.output_shape(), model.output_bsl(), model.output_alpha(), std::move(current)};
}

}  // namespace

Tensor run_oracle(const ModelGraph& model, const Tensor& input) {
  return oracle_run(model, input, [](Values&, std::size_t) { return false; });
}

int binary_width(std::size_t bsl) {
  if (bsl == 2) return 2;
  const auto bits = bsl_to_binary_precision(bsl);
  return bits ? *bits : 2;
}

Tensor run_oracle_binary_faults(const ModelGraph& model, const Tensor& input,
                                const arith::FaultConfig& fault) {
  arith::validate(fault);
  arith::Rng rng(fault.seed);
  return oracle_run(model, input, [&](Values& values, std::size_t bsl) {
    const int width = binary_width(bsl);
    const std::int64_t hi = (std::int64_t{1} << (width - 1)) - 1;
    const std::int64_t lo = -hi - 1;
    for (auto& v : values) {
      BitVector word = arith::encode_twos_complement(std::clamp(v, lo, hi), width);
      arith::flip_bits(word, fault.ber, rng);
      v = arith::decode_twos_complement(word);
    }
    return true;
  });
}

std::size_t argmax(const Tensor& t) {
  if (t.data.empty()) throw SizeError("argmax of an empty tensor");
  return static_cast<std::size_t>(std::max_element(t.data.begin(), t.data.end()) - t.data.begin());
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  // splitmix64 finalizer over a simple combination.
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (a + 1) + 0xBF58476D1CE4E5B9ULL * (b + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double accuracy(const ModelGraph& model, const Dataset& data) {
  if (data.samples.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& s : data.samples) hits += argmax(run_oracle(model, s.input)) == s.label;
  return static_cast<double>(hits) / static_cast<double>(data.samples.size());
}

namespace {

template <typename Fn>
void parallel_for(std::size_t n, std::size_t threads, Fn&& fn) {
  threads = std::max<std::size_t>(1, std::min(threads, n));
  if (threads == 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::vector<std::jthread> pool;
  for (std::size_t t = 0; t < threads; ++t) {
    pool.emplace_back([&, t] {
      for (std::size_t i = t; i < n; i += threads) fn(i);
    });
  }
}

}  // namespace

std::vector<FaultRow> evaluate_fault_tolerance(const ModelGraph& model, const Dataset& data,
                                               const std::vector<double>& bers,
                                               std::size_t repetitions, std::uint64_t seed,
                                               std::size_t threads) {
  for (double ber : bers) arith::validate(arith::FaultConfig{ber, 0});
  const std::size_t n = data.samples.size();
  std::vector<FaultRow> rows;
  if (n == 0) return rows;

  // Clean references: the SC path is bit-exact to the oracle, the binary path
  // is its own saturating register model without flips.
  std::vector<std::uint8_t> clean_sc(n), clean_bin(n);
  parallel_for(n, threads, [&](std::size_t i) {
    clean_sc[i] = argmax(run_oracle(model, data.samples[i].input)) == data.samples[i].label;
    clean_bin[i] = argmax(run_oracle_binary_faults(model, data.samples[i].input, {0.0, 0})) ==
                   data.samples[i].label;
  });
  const auto count = [](const std::vector<std::uint8_t>& v) {
    return static_cast<double>(std::count(v.begin(), v.end(), 1));
  };
  const double base_sc = count(clean_sc), base_bin = count(clean_bin);

  for (double ber : bers) {
    for (std::size_t r = 0; r < repetitions; ++r) {
      const std::uint64_t rep_seed = seed + r;
      std::vector<std::uint8_t> hit_sc(n), hit_bin(n);
      parallel_for(n, threads, [&](std::size_t i) {
        const Sample& s = data.samples[i];
        const arith::FaultConfig f{ber, derive_seed(rep_seed, i)};
        RunConfig cfg;
        cfg.fault = f;
        hit_sc[i] = argmax(run_sc(model, s.input, cfg).output) == s.label;
        hit_bin[i] = argmax(run_oracle_binary_faults(model, s.input, f)) == s.label;
      });
      rows.push_back({ber, r, rep_seed, (base_sc - count(hit_sc)) / static_cast<double>(n),
                      (base_bin - count(hit_bin)) / static_cast<double>(n)});
    }
  }
  return rows;
}

cost::LayerShape layer_shape(const LayerSpec& l) {
  if (!l.has_weights()) throw ConfigError("layer " + l.id + " has no accumulator");
  cost::LayerShape s;
  s.fan_in = l.fan_in();
  s.in_bsl = l.in_bsl;
  s.out_bsl = l.act_bsl;
  if (l.residual_from) {
    s.residual_bsl = l.residual_bsl;
    s.rescale_log2 = l.rescale_log2;
  }
  return s;
}

std::vector<cost::CostReport> cost_model(const ModelGraph& model, const cost::DatapathConfig& dp,
                                         std::optional<std::size_t> act_bsl_override) {
  std::vector<cost::CostReport> out;
  for (const auto& l : model.layers) {
    if (!l.has_weights()) continue;
    cost::LayerShape s = layer_shape(l);
    if (act_bsl_override) {
      s.in_bsl = s.out_bsl = *act_bsl_override;
      if (s.residual_bsl != 0) s.residual_bsl = std::max(s.residual_bsl, *act_bsl_override);
    }
    out.push_back(cost::cost_layer(s, dp));
  }
  return out;
}

}  // namespace scsim::net
