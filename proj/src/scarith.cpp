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


#include "scsim/scarith.hpp"

#include <string>

#include "scsim/errors.hpp"

namespace scsim::arith {

TernaryCode::TernaryCode(std::uint8_t lead, std::uint8_t trail, double alpha)
    : lead_(lead), trail_(trail), alpha_(alpha) {
  if (lead > 1 || trail > 1 || (lead == 0 && trail == 1)) {
    throw EncodingError("invalid ternary thermometer code " + std::to_string(lead) +
                        std::to_string(trail));
  }
}

TernaryCode TernaryCode::from_value(int value, double alpha) {
  if (value < -1 || value > 1) {
    throw RangeError("ternary value out of range: " + std::to_string(value));
  }
  return TernaryCode(value >= 0 ? 1 : 0, value > 0 ? 1 : 0, alpha);
}

TernaryCode TernaryCode::from_stream(const Bitstream& b) {
  if (b.bsl() != 2) throw SizeError("ternary code needs BSL 2, got " + std::to_string(b.bsl()));
  return TernaryCode(b[0], b[1], b.alpha());
}

void validate(const FaultConfig& f) {
  if (!(f.ber >= 0.0 && f.ber <= 1.0)) {
    throw ValidationError("bit error rate must lie in [0, 1]");
  }
}

TernaryCode ternary_multiply(const TernaryCode& w, const TernaryCode& x) {
  const bool w_nonneg = w.lead();
  const bool w_pos = w.trail();
  const bool x_nonneg = x.lead();
  const bool x_pos = x.trail();
  // Product is negative exactly when one operand is +1 and the other -1.
  const bool negative = (w_pos && !x_nonneg) || (x_pos && !w_nonneg);
  const bool positive = (w_pos && x_pos) || (!w_nonneg && !x_nonneg);
  return TernaryCode(!negative, positive, w.alpha() * x.alpha());
}

Bitstream sign_gated_multiply(const TernaryCode& w, const Bitstream& x) {
  const double alpha = w.alpha() * x.alpha();
  switch (w.value()) {
    case 1:
      return x.with_alpha(alpha);
    case 0:
      return zero_stream(x.bsl(), alpha);
    default: {
      BitVector bits(x.bits().begin(), x.bits().end());
      for (auto& bit : bits) bit ^= 1;
      return Bitstream(std::move(bits), alpha);
    }
  }
}

std::size_t flip_bits(std::span<std::uint8_t> bits, double ber, Rng& rng) {
  std::size_t flips = 0;
  for (auto& bit : bits) {
    if (uniform01(rng) < ber) {
      bit ^= 1;
      ++flips;
    }
  }
  return flips;
}

Bitstream inject_faults(const Bitstream& b, const FaultConfig& f, Rng& rng) {
  validate(f);
  BitVector bits(b.bits().begin(), b.bits().end());
  flip_bits(bits, f.ber, rng);
  return Bitstream(std::move(bits), b.alpha());
}

BitVector encode_twos_complement(std::int64_t value, int width) {
  if (width < 1 || width > 62) throw ConfigError("unsupported radix width");
  const std::int64_t lo = -(std::int64_t{1} << (width - 1));
  const std::int64_t hi = (std::int64_t{1} << (width - 1)) - 1;
  if (value < lo || value > hi) {
    throw RangeError("value " + std::to_string(value) + " does not fit in " +
                     std::to_string(width) + "-bit two's complement");
  }
  const auto raw = static_cast<std::uint64_t>(value);
  BitVector word(static_cast<std::size_t>(width));
  for (int i = 0; i < width; ++i) word[i] = static_cast<std::uint8_t>((raw >> i) & 1u);
  return word;
}

std::int64_t decode_twos_complement(BitSpan word) {
  std::int64_t v = 0;
  const auto width = word.size();
  for (std::size_t i = 0; i + 1 < width; ++i) v += static_cast<std::int64_t>(word[i]) << i;
  if (width > 0 && word[width - 1]) v -= std::int64_t{1} << (width - 1);
  return v;
}

}  // namespace scsim::arith
