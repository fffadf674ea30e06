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
#include <optional>

#include "scsim/bitstream.hpp"

namespace scsim::residual {

enum class Direction { multiply, divide };

struct RescaleOp {
  Direction direction = Direction::multiply;
  int n_steps = 0;
};

/// Replicates the stream 2^N times: BSL becomes L 2^N and q becomes q 2^N.
Bitstream rescale_mul(const Bitstream& b, int n_steps);

/// N division cycles at constant BSL. Each cycle keeps the bits at even
/// indices (ceil(k/2) ones of a sorted stream) and appends L/4 ones then
/// L/4 zeros, so q becomes ceil(q/2). The buffer is held in thermometer
/// order between cycles. Throws CanonicalError for unsorted input and
/// ConfigError unless L is a multiple of 4.
Bitstream rescale_div(const Bitstream& b, int n_steps);

Bitstream apply(const RescaleOp& op, const Bitstream& b);

/// The constant pad appended per division cycle ("11110000" at L = 16).
BitVector division_pad(std::size_t bsl);

/// log2(ratio) when ratio is a power of two (relative tolerance 1e-9).
std::optional<int> exact_log2(double ratio);

/// Scales the residual onto the convolution sum's alpha, then accumulates
/// both on one BSN. ratio_log2 = log2(residual.alpha / conv_sum.alpha);
/// positive values replicate, negative values divide. Throws ScaleError
/// when the alphas do not have that ratio.
Bitstream align_and_accumulate(const Bitstream& residual, const Bitstream& conv_sum,
                               int ratio_log2);

}  // namespace scsim::residual
