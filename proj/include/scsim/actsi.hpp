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
#include <functional>
#include <vector>

#include "scsim/bitstream.hpp"

namespace scsim::si {

/// Monotone non-decreasing real activation.
using StepFunction = std::function<double(double)>;

struct BNParams {
  double gamma = 1.0;
  double beta = 0.0;
};

/// Batch norm folded into ReLU: gamma (x - beta) for x >= beta, else 0.
/// Throws ConfigError for gamma <= 0.
double fused_bn_relu(double gamma, double beta, double x);
StepFunction bn_relu(BNParams bn);

/// Selection positions on a sorted M-bit stream. Position p in [1, M] picks
/// sorted bit p (1-indexed), 0 is a constant 1 and M + 1 a constant 0.
class TapVector {
 public:
  /// Throws ConfigError unless taps are non-decreasing, inside [0, M + 1]
  /// and out_bsl = taps.size() is even.
  TapVector(std::vector<std::uint32_t> taps, std::size_t in_width, double alpha_out);

  const std::vector<std::uint32_t>& taps() const { return taps_; }
  std::size_t in_width() const { return in_width_; }
  std::size_t out_bsl() const { return taps_.size(); }
  double alpha_out() const { return alpha_out_; }

  /// Output popcount for a sorted input holding `ones` 1s.
  std::size_t output_popcount(std::size_t ones) const;

  bool operator==(const TapVector&) const = default;

 private:
  std::vector<std::uint32_t> taps_;
  std::size_t in_width_;
  double alpha_out_;
};

/// taps[j] = min { p in [0, M] : f(alpha_in (p - M/2)) >= alpha_out (j - L_out/2) },
/// j = 1..L_out, or M + 1 when no p qualifies. The resulting output level is
/// the largest level not above f, saturated to the output range.
/// Throws MonotonicityError if f decreases on the sampled popcounts and
/// ConfigError for odd widths.
TapVector compute_taps(const StepFunction& f, std::size_t in_width, std::size_t out_bsl,
                       double alpha_in, double alpha_out);

/// Throws SizeError on width mismatch and CanonicalError for unsorted input.
Bitstream apply_taps(const TapVector& t, const Bitstream& sorted);

}  // namespace scsim::si
