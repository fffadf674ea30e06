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


#include "scsim/bitstream.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <system_error>

#include "scsim/errors.hpp"

namespace scsim {

Bitstream::Bitstream(BitVector bits, double alpha) : bits_(std::move(bits)), alpha_(alpha) {
  if (bits_.empty() || bits_.size() % 2 != 0) {
    throw ConfigError("bitstream length must be a positive even number, got " +
                      std::to_string(bits_.size()));
  }
  if (!(alpha_ > 0.0) || !std::isfinite(alpha_)) {
    throw ScaleError("bitstream alpha must be positive and finite");
  }
  bool seen_zero = false;
  for (std::uint8_t bit : bits_) {
    if (bit > 1) throw EncodingError("bitstream element is not a binary digit");
    popcount_ += bit;
    if (bit == 0) {
      seen_zero = true;
    } else if (seen_zero) {
      canonical_ = false;
    }
  }
}

std::size_t popcount(BitSpan bits) {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

bool is_sorted_descending(BitSpan bits) {
  return std::is_sorted(bits.begin(), bits.end(), std::greater<>{});
}

Bitstream encode(std::int64_t q, std::size_t bsl, double alpha) {
  if (bsl < 2 || bsl % 2 != 0) {
    throw ConfigError("BSL must be even and at least 2, got " + std::to_string(bsl));
  }
  const auto half = static_cast<std::int64_t>(bsl / 2);
  if (q < -half || q > half) {
    throw RangeError("value " + std::to_string(q) + " outside [-" + std::to_string(half) +
                     ", " + std::to_string(half) + "] for BSL " + std::to_string(bsl));
  }
  BitVector bits(bsl, 0);
  std::fill_n(bits.begin(), static_cast<std::size_t>(q + half), std::uint8_t{1});
  return Bitstream(std::move(bits), alpha);
}

QuantizedValue decode(const Bitstream& b) { return {b.q(), b.alpha()}; }

Bitstream canonicalize(const Bitstream& b) {
  if (b.canonical()) return b;
  BitVector bits(b.bsl(), 0);
  std::fill_n(bits.begin(), b.popcount(), std::uint8_t{1});
  return Bitstream(std::move(bits), b.alpha());
}

Bitstream zero_stream(std::size_t bsl, double alpha) { return encode(0, bsl, alpha); }

std::optional<int> bsl_to_binary_precision(std::size_t bsl) {
  if (bsl < 2 || !std::has_single_bit(bsl)) {
    throw ConfigError("BSL " + std::to_string(bsl) + " is not a power of two");
  }
  if (bsl == 2) return std::nullopt;
  return std::countr_zero(bsl);
}

std::string format_real(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string to_literal(const Bitstream& b) {
  std::string out;
  out.reserve(b.bsl() + 8);
  for (std::uint8_t bit : b.bits()) out.push_back(bit ? '1' : '0');
  out.push_back('@');
  out += format_real(b.alpha());
  return out;
}

Bitstream parse_literal(std::string_view text) {
  const auto at = text.find('@');
  const std::string_view digits = text.substr(0, at);
  double alpha = 1.0;
  if (at != std::string_view::npos) {
    const std::string_view scale = text.substr(at + 1);
    auto [ptr, ec] = std::from_chars(scale.data(), scale.data() + scale.size(), alpha);
    if (ec != std::errc{} || ptr != scale.data() + scale.size()) {
      throw ParseError("bad alpha in bitstream literal '" + std::string(text) + "'");
    }
  }
  BitVector bits;
  bits.reserve(digits.size());
  for (char c : digits) {
    if (c != '0' && c != '1') {
      throw ParseError("bad digit '" + std::string(1, c) + "' in bitstream literal '" +
                       std::string(text) + "'");
    }
    bits.push_back(static_cast<std::uint8_t>(c - '0'));
  }
  return Bitstream(std::move(bits), alpha);
}

}  // namespace scsim
