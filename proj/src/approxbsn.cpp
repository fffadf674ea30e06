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


#include "scsim/approxbsn.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scsim/bsn.hpp"
#include "scsim/errors.hpp"

namespace scsim::approx {
namespace {

std::string describe(const StageConfig& s) {
  return "(m=" + std::to_string(s.m) + ", l=" + std::to_string(s.l) + ", c=" + std::to_string(s.c) +
         ", s=" + std::to_string(s.s) + ")";
}

// Sorts each of the stage's sub-BSNs in place and writes the sampled bits.
BitVector run_stage(const StageConfig& stage, std::span<std::uint8_t> wires) {
  const auto& net = bsn::bitonic(stage.l);
  BitVector out;
  out.reserve(stage.m * stage.out_width());
  for (std::size_t g = 0; g < stage.m; ++g) {
    auto group = wires.subspan(g * stage.l, stage.l);
    bsn::evaluate_in_place(net, group);
    for (std::size_t pos = stage.c; pos < stage.l - stage.c; pos += stage.s) out.push_back(group[pos]);
  }
  return out;
}

}  // namespace

void validate(const StageConfig& stage) {
  if (stage.m == 0 || stage.l == 0 || stage.s == 0 || 2 * stage.c >= stage.l ||
      (stage.l - 2 * stage.c) % stage.s != 0) {
    throw ConfigError("invalid sub-BSN stage " + describe(stage));
  }
}

ApproxConfig::ApproxConfig(std::vector<StageConfig> stages) : stages_(std::move(stages)) {
  if (stages_.empty()) throw ConfigError("approximate BSN needs at least one stage");
  for (std::size_t i = 0; i < stages_.size(); ++i) {
    validate(stages_[i]);
    if (i > 0) {
      const auto produced = stages_[i - 1].m * stages_[i - 1].out_width();
      const auto consumed = stages_[i].m * stages_[i].l;
      if (produced != consumed) {
        throw ConfigError("stage " + std::to_string(i) + " " + describe(stages_[i]) + " consumes " +
                          std::to_string(consumed) + " bits but the previous stage produces " +
                          std::to_string(produced));
      }
    }
  }
  if (stages_.back().m != 1) throw ConfigError("last approximate BSN stage must have m = 1");
  if (output_width() % 2 != 0) {
    throw ConfigError("approximate BSN output width " + std::to_string(output_width()) + " is odd");
  }
  if (input_width() % 2 != 0) throw ConfigError("approximate BSN input width must be even");
}

ApproxConfig ApproxConfig::exact(std::size_t width) { return ApproxConfig({{1, width, 0, 1}}); }

ApproxConfig ApproxConfig::clip(std::size_t width, std::size_t c) {
  return ApproxConfig({{1, width, c, 1}});
}

std::size_t ApproxConfig::stride_product() const {
  std::size_t p = 1;
  for (const auto& s : stages_) p *= s.s;
  return p;
}

bool ApproxConfig::is_exact() const {
  return std::all_of(stages_.begin(), stages_.end(),
                     [](const StageConfig& s) { return s.c == 0 && s.s == 1; });
}

void validate(const TemporalSchedule& sched, const ApproxConfig& inner) {
  if (sched.cycles == 0) throw ConfigError("temporal schedule needs at least one cycle");
  if (sched.partial_bsl == 0 || sched.partial_bsl >= sched.bsn_width) {
    throw ConfigError("partial-sum BSL must lie in (0, P)");
  }
  if (sched.partial_bsl % 2 != 0 || sched.new_bits_per_cycle() % 2 != 0) {
    throw ConfigError("partial-sum BSL and new bits per cycle must be even");
  }
  if (inner.input_width() != sched.bsn_width || inner.output_width() != sched.partial_bsl) {
    throw ConfigError("inner BSN maps " + std::to_string(inner.input_width()) + " -> " +
                      std::to_string(inner.output_width()) + " bits, schedule needs " +
                      std::to_string(sched.bsn_width) + " -> " + std::to_string(sched.partial_bsl));
  }
  if (inner.stride_product() != 1) {
    throw ConfigError("strided sub-sampling cannot sit in the temporal feedback path");
  }
}

TemporalSchedule schedule_for(std::size_t width, std::size_t bsn_width, std::size_t partial_bsl) {
  if (partial_bsl >= bsn_width) throw ConfigError("partial-sum BSL must be below the BSN width");
  const auto step = bsn_width - partial_bsl;
  return {bsn_width, partial_bsl, std::max<std::size_t>(1, (width + step - 1) / step)};
}

Bitstream pad_with_zeros(const Bitstream& products, std::size_t width) {
  if (width < products.bsl() || (width - products.bsl()) % 2 != 0) {
    throw SizeError("cannot pad " + std::to_string(products.bsl()) + " bits to " +
                    std::to_string(width));
  }
  BitVector bits(products.bits().begin(), products.bits().end());
  while (bits.size() < width) {
    bits.push_back(1);
    bits.push_back(0);
  }
  return Bitstream(std::move(bits), products.alpha());
}

BitVector subsample_bits(BitSpan sorted, std::size_t c, std::size_t s) {
  validate(StageConfig{1, sorted.size(), c, s});
  if (!is_sorted_descending(sorted)) throw CanonicalError("sub-sampling needs a sorted stream");
  BitVector out;
  out.reserve((sorted.size() - 2 * c) / s);
  for (std::size_t pos = c; pos < sorted.size() - c; pos += s) out.push_back(sorted[pos]);
  return out;
}

Bitstream subsample(const Bitstream& sorted, std::size_t c, std::size_t s) {
  auto out = subsample_bits(sorted.bits(), c, s);
  if (out.size() % 2 != 0) {
    throw ConfigError("sub-sampled width " + std::to_string(out.size()) + " is odd");
  }
  return Bitstream(std::move(out), sorted.alpha() * static_cast<double>(s));
}

Bitstream eval_approx_bsn(const ApproxConfig& cfg, const Bitstream& products) {
  if (products.bsl() != cfg.input_width()) {
    throw SizeError("approximate BSN expects " + std::to_string(cfg.input_width()) +
                    " bits, got " + std::to_string(products.bsl()));
  }
  BitVector wires(products.bits().begin(), products.bits().end());
  for (const auto& stage : cfg.stages()) wires = run_stage(stage, wires);
  return Bitstream(std::move(wires), products.alpha() * static_cast<double>(cfg.stride_product()));
}

Bitstream eval_temporal(const TemporalSchedule& sched, const ApproxConfig& inner,
                        const Bitstream& products, TemporalTrace* trace) {
  validate(sched, inner);
  if (products.bsl() != sched.total_width()) {
    throw SizeError("temporal schedule accumulates " + std::to_string(sched.total_width()) +
                    " bits, got " + std::to_string(products.bsl()));
  }
  const auto step = sched.new_bits_per_cycle();
  auto partial = zero_stream(sched.partial_bsl, products.alpha());
  if (trace) trace->cycle_input_q.clear();
  for (std::size_t t = 0; t < sched.cycles; ++t) {
    BitVector wires(partial.bits().begin(), partial.bits().end());
    const auto chunk = products.bits().subspan(t * step, step);
    wires.insert(wires.end(), chunk.begin(), chunk.end());
    const Bitstream cycle_input(std::move(wires), products.alpha());
    if (trace) trace->cycle_input_q.push_back(cycle_input.q());
    partial = eval_approx_bsn(inner, cycle_input);
  }
  return partial;
}

BitVector draw_products(std::size_t count, const InputDistribution& dist, arith::Rng& rng,
                        std::int64_t& exact_sum) {
  BitVector bits(2 * count);
  exact_sum = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const double u = arith::uniform01(rng);
    const int v = u < dist.p ? 1 : (u < 2 * dist.p ? -1 : 0);
    bits[2 * i] = v >= 0;
    bits[2 * i + 1] = v > 0;
    exact_sum += v;
  }
  return bits;
}

namespace {

template <typename Eval>
MseReport monte_carlo(std::size_t width, std::size_t scale, const InputDistribution& dist,
                      std::size_t trials, arith::Rng& rng, Eval&& eval) {
  if (trials == 0) throw ConfigError("MSE measurement needs at least one trial");
  if (!(dist.p >= 0.0 && dist.p <= 0.5)) throw ConfigError("product probability must lie in [0, 0.5]");
  MseReport r;
  r.trials = trials;
  r.products = width / 2;
  double sq = 0.0;
  double sum = 0.0;
  for (std::size_t t = 0; t < trials; ++t) {
    std::int64_t exact = 0;
    auto bits = draw_products(r.products, dist, rng, exact);
    const auto out = eval(Bitstream(std::move(bits), 1.0));
    const std::int64_t err = out.q() * static_cast<std::int64_t>(scale) - exact;
    sq += static_cast<double>(err) * static_cast<double>(err);
    sum += static_cast<double>(err);
    r.max_abs_error = std::max(r.max_abs_error, err < 0 ? -err : err);
  }
  r.mse_raw = sq / static_cast<double>(trials);
  r.mean_error = sum / static_cast<double>(trials);
  const double half = static_cast<double>(r.products);
  r.mse_normalized = r.mse_raw / (half * half);
  return r;
}

}  // namespace

MseReport measure_mse(const ApproxConfig& cfg, const InputDistribution& dist, std::size_t trials,
                      arith::Rng& rng) {
  return monte_carlo(cfg.input_width(), cfg.stride_product(), dist, trials, rng,
                     [&](const Bitstream& p) { return eval_approx_bsn(cfg, p); });
}

MseReport measure_mse(const TemporalSchedule& sched, const ApproxConfig& inner,
                      const InputDistribution& dist, std::size_t trials, arith::Rng& rng) {
  validate(sched, inner);
  return monte_carlo(sched.total_width(), 1, dist, trials, rng,
                     [&](const Bitstream& p) { return eval_temporal(sched, inner, p); });
}

}  // namespace scsim::approx
