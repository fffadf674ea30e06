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
#include <vector>

#include "scsim/bitstream.hpp"
#include "scsim/scarith.hpp"

namespace scsim::approx {

/// One stage of the parameterized BSN: m sub-BSNs, each sorting l wires,
/// dropping c bits at each end and keeping every s-th remaining bit.
struct StageConfig {
  std::size_t m = 1;
  std::size_t l = 2;
  std::size_t c = 0;
  std::size_t s = 1;

  std::size_t out_width() const { return (l - 2 * c) / s; }
  bool operator==(const StageConfig&) const = default;
};

/// Throws ConfigError unless l - 2c > 0, s >= 1 and s divides l - 2c.
void validate(const StageConfig& stage);

class ApproxConfig {
 public:
  /// Throws ConfigError when stage widths do not chain
  /// (m[i+1] l[i+1] = m[i] out[i]), the last stage has more than one
  /// sub-BSN, or the final width is odd.
  explicit ApproxConfig(std::vector<StageConfig> stages);

  /// Single full-width sorter without clipping.
  static ApproxConfig exact(std::size_t width);
  /// Single sorter clipping c bits per end, no stride.
  static ApproxConfig clip(std::size_t width, std::size_t c);

  const std::vector<StageConfig>& stages() const { return stages_; }
  std::size_t input_width() const { return stages_.front().m * stages_.front().l; }
  std::size_t output_width() const { return stages_.back().out_width(); }
  /// Product of strides: the factor applied to the output alpha.
  std::size_t stride_product() const;
  bool is_exact() const;

  bool operator==(const ApproxConfig&) const = default;

 private:
  std::vector<StageConfig> stages_;
};

/// A P-wide approximate BSN reused over `cycles` cycles. Each cycle sorts the
/// B-bit partial sum together with P - B new product bits.
struct TemporalSchedule {
  std::size_t bsn_width = 0;    // P
  std::size_t partial_bsl = 0;  // B
  std::size_t cycles = 1;

  std::size_t new_bits_per_cycle() const { return bsn_width - partial_bsl; }
  std::size_t total_width() const { return cycles * new_bits_per_cycle(); }
  bool operator==(const TemporalSchedule&) const = default;
};

/// Throws ConfigError for B >= P, odd B or P - B, zero cycles, or an inner
/// config that is not P -> B with unit stride product.
void validate(const TemporalSchedule& sched, const ApproxConfig& inner);

/// Fewest cycles covering `width` product bits with a P-wide sorter and a
/// B-bit partial.
TemporalSchedule schedule_for(std::size_t width, std::size_t bsn_width, std::size_t partial_bsl);

/// Appends zero-valued "10" pairs until the stream is `width` bits long.
Bitstream pad_with_zeros(const Bitstream& products, std::size_t width);

/// Truncated quantization of a sorted stream: output bit j (0-indexed) is
/// sorted[c + j s]. The output has (l - 2c)/s bits, popcount
/// ceil(clamp(k - c, 0, l - 2c) / s) and alpha scaled by s.
/// Throws CanonicalError for unsorted input, ConfigError for bad geometry
/// or an odd output width.
Bitstream subsample(const Bitstream& sorted, std::size_t c, std::size_t s);

/// Raw sampling on a sorted bit vector; the output width may be odd.
BitVector subsample_bits(BitSpan sorted, std::size_t c, std::size_t s);

/// Stage-by-stage evaluation; output alpha = input alpha * stride_product().
/// Throws SizeError when the input width is not cfg.input_width().
Bitstream eval_approx_bsn(const ApproxConfig& cfg, const Bitstream& products);

struct TemporalTrace {
  /// Decoded value of the P-wide input seen in each cycle, before clipping.
  std::vector<std::int64_t> cycle_input_q;
};

/// Folded accumulation. The partial starts as the B-bit zero pattern.
Bitstream eval_temporal(const TemporalSchedule& sched, const ApproxConfig& inner,
                        const Bitstream& products, TemporalTrace* trace = nullptr);

/// i.i.d. ternary products with P(+1) = P(-1) = p and P(0) = 1 - 2p.
struct InputDistribution {
  double p = 0.25;
};

struct MseReport {
  std::size_t trials = 0;
  std::size_t products = 0;      // M / 2
  double mse_raw = 0.0;          // quantized units of the exact sum
  double mse_normalized = 0.0;   // mse_raw / (M/2)^2
  double mean_error = 0.0;
  std::int64_t max_abs_error = 0;
};

/// Draws `count` ternary products as 2-bit thermometer pairs; also returns
/// their exact sum.
BitVector draw_products(std::size_t count, const InputDistribution& dist, arith::Rng& rng,
                        std::int64_t& exact_sum);

MseReport measure_mse(const ApproxConfig& cfg, const InputDistribution& dist,
                      std::size_t trials, arith::Rng& rng);
MseReport measure_mse(const TemporalSchedule& sched, const ApproxConfig& inner,
                      const InputDistribution& dist, std::size_t trials, arith::Rng& rng);

}  // namespace scsim::approx
