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


#include "scsim/residual.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

#include "scsim/bsn.hpp"
#include "scsim/errors.hpp"

namespace scsim::residual {

Bitstream rescale_mul(const Bitstream& b, int n_steps) {
  if (n_steps < 0) throw ConfigError("rescale step count must be non-negative");
  if (n_steps > 20) throw ConfigError("rescale step count too large");
  const std::size_t copies = std::size_t{1} << n_steps;
  BitVector bits;
  bits.reserve(b.bsl() * copies);
  for (std::size_t c = 0; c < copies; ++c) bits.insert(bits.end(), b.bits().begin(), b.bits().end());
  return Bitstream(std::move(bits), b.alpha());
}

BitVector division_pad(std::size_t bsl) {
  if (bsl % 4 != 0) {
    throw ConfigError("division needs a BSL divisible by 4, got " + std::to_string(bsl));
  }
  BitVector pad(bsl / 2, 0);
  std::fill_n(pad.begin(), bsl / 4, std::uint8_t{1});
  return pad;
}

Bitstream rescale_div(const Bitstream& b, int n_steps) {
  if (n_steps < 0) throw ConfigError("rescale step count must be non-negative");
  if (!b.canonical()) throw CanonicalError("residual division needs a sorted stream");
  if (n_steps == 0) return b;
  const auto pad = division_pad(b.bsl());

  BitVector buffer(b.bits().begin(), b.bits().end());
  for (int cycle = 0; cycle < n_steps; ++cycle) {
    if (cycle > 0) std::sort(buffer.begin(), buffer.end(), std::greater<>{});
    BitVector next;
    next.reserve(buffer.size());
    for (std::size_t i = 0; i < buffer.size(); i += 2) next.push_back(buffer[i]);
    next.insert(next.end(), pad.begin(), pad.end());
    buffer = std::move(next);
  }
  return Bitstream(std::move(buffer), b.alpha());
}

Bitstream apply(const RescaleOp& op, const Bitstream& b) {
  return op.direction == Direction::multiply ? rescale_mul(b, op.n_steps)
                                             : rescale_div(b, op.n_steps);
}

std::optional<int> exact_log2(double ratio) {
  if (!(ratio > 0.0) || !std::isfinite(ratio)) return std::nullopt;
  const double n = std::round(std::log2(ratio));
  if (std::abs(ratio - std::ldexp(1.0, static_cast<int>(n))) > 1e-9 * ratio) return std::nullopt;
  return static_cast<int>(n);
}

Bitstream align_and_accumulate(const Bitstream& residual, const Bitstream& conv_sum,
                               int ratio_log2) {
  const auto actual = exact_log2(residual.alpha() / conv_sum.alpha());
  if (!actual) {
    throw ScaleError("residual/convolution alpha ratio " +
                     format_real(residual.alpha() / conv_sum.alpha()) + " is not a power of two");
  }
  if (*actual != ratio_log2) {
    throw ScaleError("residual alpha ratio is 2^" + std::to_string(*actual) + ", expected 2^" +
                     std::to_string(ratio_log2));
  }
  if (!residual.canonical()) throw CanonicalError("residual stream is not sorted");
  const Bitstream aligned =
      ratio_log2 >= 0 ? rescale_mul(residual, ratio_log2) : rescale_div(residual, -ratio_log2);
  const std::array<Bitstream, 2> inputs{conv_sum, aligned.with_alpha(conv_sum.alpha())};
  return bsn::accumulate(inputs);
}

}  // namespace scsim::residual
