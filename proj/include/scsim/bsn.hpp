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
#include <span>
#include <string>
#include <vector>

#include "scsim/bitstream.hpp"

namespace scsim::bsn {

/// Compare-exchange between wires i < j. Wire i receives the OR (max) and
/// wire j the AND (min), so a network of these sorts 1s to the front.
struct Comparator {
  std::uint32_t i;
  std::uint32_t j;
  bool operator==(const Comparator&) const = default;
};

using Stage = std::vector<Comparator>;

class SortNetwork {
 public:
  SortNetwork(std::size_t width, std::vector<Stage> stages);

  std::size_t width() const { return width_; }
  const std::vector<Stage>& stages() const { return stages_; }
  std::size_t depth() const { return stages_.size(); }
  std::size_t comparator_count() const { return comparator_count_; }

 private:
  std::size_t width_;
  std::vector<Stage> stages_;
  std::size_t comparator_count_ = 0;
};

/// Batcher bitonic sorter for any n >= 1. Non-power-of-two widths use the
/// arbitrary-size recursion (split n/2 and n - n/2, merge with the largest
/// power of two below n); the network is then relabelled so every
/// comparator is standard (i < j, max to i) without changing its size or
/// depth.
SortNetwork build_bitonic(std::size_t n);

/// Shared, lazily built network for width n. Thread safe.
const SortNetwork& bitonic(std::size_t n);

/// n k (k + 1) / 4 and k (k + 1) / 2 with k = log2 n; n must be a power of two.
std::size_t closed_form_comparators(std::size_t n);
std::size_t closed_form_depth(std::size_t n);

/// Throws SizeError when input.size() != net.width().
BitVector evaluate(const SortNetwork& net, BitSpan input);
void evaluate_in_place(const SortNetwork& net, std::span<std::uint8_t> wires);

/// Bit-sliced evaluation: every wire word carries 64 independent inputs.
void evaluate_packed(const SortNetwork& net, std::span<std::uint64_t> wires);

/// Concatenates all product streams onto one BSN and sorts them. The output
/// has BSL sum(bsl_i) and decodes to sum(q_i). Throws ScaleError when alphas
/// differ and SizeError on an empty list.
Bitstream accumulate(std::span<const Bitstream> products);

/// Sorter for an input that is a concatenation of runs, each already sorted
/// (1s first). Runs are merged pairwise in a balanced tree of Batcher
/// odd-even mergers of arbitrary length. Each comparator is an OR gate (max)
/// and an AND gate (min).
class RunMerger {
 public:
  struct Usage {
    std::size_t gates = 0;
    std::size_t depth = 0;
  };

  /// Zero-length runs are ignored. Throws ConfigError if the total is 0.
  explicit RunMerger(const std::vector<std::size_t>& run_lengths);

  std::size_t width() const { return width_; }

  /// Throws SizeError on width mismatch and CanonicalError when a run is
  /// not sorted.
  BitVector evaluate(BitSpan input) const;

  /// Gates feeding the marked output positions, and their longest path.
  Usage usage(const std::vector<bool>& used_outputs) const;

 private:
  struct Gate {
    std::uint32_t a;
    std::uint32_t b;
    bool is_or;
  };

  std::uint32_t gate(std::uint32_t a, std::uint32_t b, bool is_or);
  std::vector<std::uint32_t> merge(const std::vector<std::uint32_t>& a, const std::vector<std::uint32_t>& b);

  std::size_t width_ = 0;
  std::vector<std::size_t> runs_;
  std::vector<Gate> gates_;             // node id = width_ + index
  std::vector<std::uint32_t> outputs_;  // node id per sorted position
};

/// "stage s: (i,j) (i,j) ..." one line per stage.
std::string dump_netlist(const SortNetwork& net);

}  // namespace scsim::bsn
