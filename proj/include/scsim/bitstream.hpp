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
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace scsim {

/// One bit per element, values 0 or 1. Index 0 is the first (leading) bit.
using BitVector = std::vector<std::uint8_t>;
using BitSpan = std::span<const std::uint8_t>;

/// A decoded thermometer value: real value = alpha * q.
struct QuantizedValue {
  std::int64_t q = 0;
  double alpha = 1.0;

  double real() const { return alpha * static_cast<double>(q); }
  bool operator==(const QuantizedValue&) const = default;
};

/// Thermometer-coded bitstream of even length L with scale factor alpha.
///
/// The encoded value is alpha * (popcount - L/2). Streams need not be
/// sorted; `canonical()` reports whether all 1s precede all 0s. The
/// object is immutable once built.
class Bitstream {
 public:
  /// Throws ConfigError for odd or empty length, EncodingError for bits
  /// other than 0/1 and ScaleError for non-positive or non-finite alpha.
  Bitstream(BitVector bits, double alpha);

  std::size_t bsl() const { return bits_.size(); }
  double alpha() const { return alpha_; }
  BitSpan bits() const { return bits_; }
  std::uint8_t operator[](std::size_t i) const { return bits_[i]; }
  std::size_t popcount() const { return popcount_; }
  bool canonical() const { return canonical_; }
  std::int64_t q() const {
    return static_cast<std::int64_t>(popcount_) - static_cast<std::int64_t>(bsl() / 2);
  }

  /// Same bits with a different scale factor.
  Bitstream with_alpha(double alpha) const { return Bitstream(bits_, alpha); }

  bool operator==(const Bitstream& other) const {
    return alpha_ == other.alpha_ && bits_ == other.bits_;
  }

 private:
  BitVector bits_;
  double alpha_;
  std::size_t popcount_ = 0;
  bool canonical_ = true;
};

std::size_t popcount(BitSpan bits);
bool is_sorted_descending(BitSpan bits);

/// Canonical stream with popcount q + bsl/2.
Bitstream encode(std::int64_t q, std::size_t bsl, double alpha = 1.0);

/// Popcount semantics; valid for non-canonical streams.
QuantizedValue decode(const Bitstream& b);

Bitstream canonicalize(const Bitstream& b);

/// Zero-valued pattern: bsl/2 ones followed by bsl/2 zeros.
Bitstream zero_stream(std::size_t bsl, double alpha = 1.0);

/// Binary precision that matches a thermometer BSL (4 -> 2, 8 -> 3,
/// 16 -> 4). BSL 2 has no binary counterpart and yields nullopt.
/// Throws ConfigError when bsl is not a power of two.
std::optional<int> bsl_to_binary_precision(std::size_t bsl);

/// "1100@0.5" literal form.
std::string to_literal(const Bitstream& b);
Bitstream parse_literal(std::string_view text);

/// Shortest decimal text that reads back to the same double.
std::string format_real(double v);

}  // namespace scsim
