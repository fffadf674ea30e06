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
#include <random>
#include <utility>

#include "scsim/bitstream.hpp"

namespace scsim::arith {

/// 2-bit thermometer operand: "00" = -1, "10" = 0, "11" = +1.
class TernaryCode {
 public:
  /// Throws EncodingError for the non-thermometer pair "01".
  TernaryCode(std::uint8_t lead, std::uint8_t trail, double alpha = 1.0);

  /// Throws RangeError outside {-1, 0, +1}.
  static TernaryCode from_value(int value, double alpha = 1.0);
  /// Throws SizeError unless b has BSL 2.
  static TernaryCode from_stream(const Bitstream& b);

  std::uint8_t lead() const { return lead_; }
  std::uint8_t trail() const { return trail_; }
  double alpha() const { return alpha_; }
  int value() const { return lead_ + trail_ - 1; }
  Bitstream to_stream() const { return Bitstream({lead_, trail_}, alpha_); }

  bool operator==(const TernaryCode&) const = default;

 private:
  std::uint8_t lead_;
  std::uint8_t trail_;
  double alpha_;
};

struct FaultConfig {
  double ber = 0.0;
  std::uint64_t seed = 0;
};

/// Throws ValidationError unless 0 <= ber <= 1.
void validate(const FaultConfig& f);

using Rng = std::mt19937_64;

/// Uniform double in [0, 1) built from the top 53 bits of one draw, so
/// results are identical on every platform.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

struct ComparatorOut {
  std::uint8_t hi;
  std::uint8_t lo;
};

/// OR gate feeds the high output, AND gate the low one.
inline ComparatorOut comparator(std::uint8_t a, std::uint8_t b) {
  return {static_cast<std::uint8_t>(a | b), static_cast<std::uint8_t>(a & b)};
}

/// Gate-level ternary multiplier. Output is canonical and its alpha is the
/// product of the operand alphas.
TernaryCode ternary_multiply(const TernaryCode& w, const TernaryCode& x);

/// Generalization to an activation stream of any BSL: +1 passes x through,
/// -1 inverts every bit, 0 emits the zero pattern "1..10..0".
Bitstream sign_gated_multiply(const TernaryCode& w, const Bitstream& x);

/// Flips each bit independently with probability f.ber.
Bitstream inject_faults(const Bitstream& b, const FaultConfig& f, Rng& rng);

/// In-place variant over a raw bit buffer; returns the number of flips.
std::size_t flip_bits(std::span<std::uint8_t> bits, double ber, Rng& rng);

/// Two's-complement radix word of `width` bits, index 0 = LSB.
/// Throws RangeError when value does not fit.
BitVector encode_twos_complement(std::int64_t value, int width);
std::int64_t decode_twos_complement(BitSpan word);

}  // namespace scsim::arith
