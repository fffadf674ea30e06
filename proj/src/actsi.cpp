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


#include "scsim/actsi.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "scsim/errors.hpp"

namespace scsim::si {

double fused_bn_relu(double gamma, double beta, double x) {
  if (!(gamma > 0.0)) throw ConfigError("BN gamma must be positive");
  return x >= beta ? gamma * (x - beta) : 0.0;
}

StepFunction bn_relu(BNParams bn) {
  if (!(bn.gamma > 0.0)) throw ConfigError("BN gamma must be positive");
  return [bn](double x) { return fused_bn_relu(bn.gamma, bn.beta, x); };
}

TapVector::TapVector(std::vector<std::uint32_t> taps, std::size_t in_width, double alpha_out)
    : taps_(std::move(taps)), in_width_(in_width), alpha_out_(alpha_out) {
  if (taps_.empty() || taps_.size() % 2 != 0) {
    throw ConfigError("SI output BSL must be positive and even");
  }
  if (!std::is_sorted(taps_.begin(), taps_.end())) {
    throw ConfigError("SI taps must be non-decreasing");
  }
  if (taps_.back() > in_width_ + 1) {
    throw ConfigError("SI tap " + std::to_string(taps_.back()) + " beyond input width " +
                      std::to_string(in_width_));
  }
}

std::size_t TapVector::output_popcount(std::size_t ones) const {
  return static_cast<std::size_t>(
      std::upper_bound(taps_.begin(), taps_.end(), static_cast<std::uint32_t>(ones)) -
      taps_.begin());
}

TapVector compute_taps(const StepFunction& f, std::size_t in_width, std::size_t out_bsl,
                       double alpha_in, double alpha_out) {
  if (in_width == 0 || in_width % 2 != 0) throw ConfigError("SI input width must be even");
  if (out_bsl == 0 || out_bsl % 2 != 0) throw ConfigError("SI output BSL must be even");

  const auto half_in = static_cast<std::int64_t>(in_width / 2);
  std::vector<double> level(in_width + 1);
  for (std::size_t p = 0; p <= in_width; ++p) {
    level[p] = f(alpha_in * static_cast<double>(static_cast<std::int64_t>(p) - half_in));
    if (std::isnan(level[p]) || (p > 0 && level[p] < level[p - 1])) {
      throw MonotonicityError("activation decreases at popcount " + std::to_string(p));
    }
  }

  const auto half_out = static_cast<std::int64_t>(out_bsl / 2);
  std::vector<std::uint32_t> taps(out_bsl);
  std::size_t p = 0;
  for (std::size_t j = 1; j <= out_bsl; ++j) {
    const double threshold = alpha_out * static_cast<double>(static_cast<std::int64_t>(j) - half_out);
    while (p <= in_width && level[p] < threshold) ++p;
    taps[j - 1] = static_cast<std::uint32_t>(p);
  }
  return TapVector(std::move(taps), in_width, alpha_out);
}

Bitstream apply_taps(const TapVector& t, const Bitstream& sorted) {
  if (sorted.bsl() != t.in_width()) {
    throw SizeError("SI expects " + std::to_string(t.in_width()) + " input bits, got " +
                    std::to_string(sorted.bsl()));
  }
  if (!sorted.canonical()) throw CanonicalError("SI input is not sorted");
  BitVector out(t.out_bsl());
  const auto m = t.in_width();
  for (std::size_t j = 0; j < out.size(); ++j) {
    const auto tap = t.taps()[j];
    out[j] = tap == 0 ? 1 : (tap > m ? 0 : sorted[tap - 1]);
  }
  return Bitstream(std::move(out), t.alpha_out());
}

}  // namespace scsim::si
