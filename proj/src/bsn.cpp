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


#include "scsim/bsn.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <sstream>

#include "scsim/errors.hpp"

namespace scsim::bsn {
namespace {

// Comparator as emitted by the directional recursion: `to_max` receives the
// larger bit, `to_min` the smaller one.
struct Directed {
  std::uint32_t to_max;
  std::uint32_t to_min;
};

class BitonicBuilder {
 public:
  std::vector<Directed> ops;

  void sort(std::size_t lo, std::size_t n, bool descending) {
    if (n < 2) return;
    const std::size_t m = n / 2;
    sort(lo, m, !descending);
    sort(lo + m, n - m, descending);
    merge(lo, n, descending);
  }

 private:
  void merge(std::size_t lo, std::size_t n, bool descending) {
    if (n < 2) return;
    const std::size_t m = std::bit_floor(n - 1);
    for (std::size_t i = lo; i < lo + n - m; ++i) {
      const auto a = static_cast<std::uint32_t>(i);
      const auto b = static_cast<std::uint32_t>(i + m);
      ops.push_back(descending ? Directed{a, b} : Directed{b, a});
    }
    merge(lo, m, descending);
    merge(lo + m, n - m, descending);
  }
};

}  // namespace

SortNetwork::SortNetwork(std::size_t width, std::vector<Stage> stages)
    : width_(width), stages_(std::move(stages)) {
  std::vector<std::size_t> last_use(width_, SIZE_MAX);
  for (std::size_t s = 0; s < stages_.size(); ++s) {
    for (const auto& c : stages_[s]) {
      if (c.i >= c.j || c.j >= width_) {
        throw ConfigError("comparator (" + std::to_string(c.i) + "," + std::to_string(c.j) +
                          ") is not a standard pair inside width " + std::to_string(width_));
      }
      if (last_use[c.i] == s || last_use[c.j] == s) {
        throw ConfigError("wire reused within stage " + std::to_string(s));
      }
      last_use[c.i] = last_use[c.j] = s;
    }
    comparator_count_ += stages_[s].size();
  }
}

SortNetwork build_bitonic(std::size_t n) {
  if (n == 0) throw ConfigError("sorting network width must be at least 1");
  BitonicBuilder builder;
  builder.sort(0, n, true);

  // Relabel reversed comparators into standard ones. A standard network
  // leaves sorted inputs untouched, so the final relabelling is the
  // identity and the result still sorts.
  std::vector<std::uint32_t> wire_of(n);
  std::iota(wire_of.begin(), wire_of.end(), 0u);
  std::vector<std::size_t> ready(n, 0);
  std::vector<Stage> stages;
  for (const auto& op : builder.ops) {
    std::uint32_t p = wire_of[op.to_max];
    std::uint32_t q = wire_of[op.to_min];
    if (p > q) {
      std::swap(wire_of[op.to_max], wire_of[op.to_min]);
      std::swap(p, q);
    }
    const std::size_t stage = std::max(ready[p], ready[q]);
    if (stage == stages.size()) stages.emplace_back();
    stages[stage].push_back({p, q});
    ready[p] = ready[q] = stage + 1;
  }
  return SortNetwork(n, std::move(stages));
}

const SortNetwork& bitonic(std::size_t n) {
  static std::mutex mu;
  static std::map<std::size_t, std::unique_ptr<SortNetwork>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<SortNetwork>(build_bitonic(n));
  return *slot;
}

std::size_t closed_form_comparators(std::size_t n) {
  const auto k = static_cast<std::size_t>(std::countr_zero(n));
  return n * k * (k + 1) / 4;
}

std::size_t closed_form_depth(std::size_t n) {
  const auto k = static_cast<std::size_t>(std::countr_zero(n));
  return k * (k + 1) / 2;
}

void evaluate_in_place(const SortNetwork& net, std::span<std::uint8_t> wires) {
  if (wires.size() != net.width()) {
    throw SizeError("network width " + std::to_string(net.width()) + " but input has " +
                    std::to_string(wires.size()) + " bits");
  }
  for (const auto& stage : net.stages()) {
    for (const auto& c : stage) {
      const std::uint8_t a = wires[c.i];
      const std::uint8_t b = wires[c.j];
      wires[c.i] = a | b;
      wires[c.j] = a & b;
    }
  }
}

BitVector evaluate(const SortNetwork& net, BitSpan input) {
  BitVector wires(input.begin(), input.end());
  evaluate_in_place(net, wires);
  return wires;
}

void evaluate_packed(const SortNetwork& net, std::span<std::uint64_t> wires) {
  if (wires.size() != net.width()) throw SizeError("packed input width mismatch");
  for (const auto& stage : net.stages()) {
    for (const auto& c : stage) {
      const std::uint64_t a = wires[c.i];
      const std::uint64_t b = wires[c.j];
      wires[c.i] = a | b;
      wires[c.j] = a & b;
    }
  }
}

Bitstream accumulate(std::span<const Bitstream> products) {
  if (products.empty()) throw SizeError("nothing to accumulate");
  const double alpha = products.front().alpha();
  std::size_t total = 0;
  for (const auto& p : products) {
    if (p.alpha() != alpha) {
      throw ScaleError("accumulate: alpha " + format_real(p.alpha()) + " differs from " +
                       format_real(alpha));
    }
    total += p.bsl();
  }
  BitVector wires;
  wires.reserve(total);
  for (const auto& p : products) wires.insert(wires.end(), p.bits().begin(), p.bits().end());
  evaluate_in_place(bitonic(total), wires);
  return Bitstream(std::move(wires), alpha);
}

std::string dump_netlist(const SortNetwork& net) {
  std::ostringstream out;
  for (std::size_t s = 0; s < net.stages().size(); ++s) {
    out << "stage " << s << ":";
    for (const auto& c : net.stages()[s]) out << " (" << c.i << "," << c.j << ")";
    out << '\n';
  }
  return out.str();
}

RunMerger::RunMerger(const std::vector<std::size_t>& run_lengths) {
  for (std::size_t r : run_lengths) {
    if (r == 0) continue;
    runs_.push_back(r);
    width_ += r;
  }
  if (width_ == 0) throw ConfigError("run merger needs at least one bit");
  std::vector<std::vector<std::uint32_t>> level;
  std::uint32_t next = 0;
  for (std::size_t r : runs_) {
    std::vector<std::uint32_t> run(r);
    for (auto& id : run) id = next++;
    level.push_back(std::move(run));
  }
  while (level.size() > 1) {
    std::vector<std::vector<std::uint32_t>> up;
    for (std::size_t k = 0; k + 1 < level.size(); k += 2) up.push_back(merge(level[k], level[k + 1]));
    if (level.size() % 2 != 0) up.push_back(std::move(level.back()));
    level = std::move(up);
  }
  outputs_ = std::move(level.front());
}

std::uint32_t RunMerger::gate(std::uint32_t a, std::uint32_t b, bool is_or) {
  gates_.push_back({a, b, is_or});
  return static_cast<std::uint32_t>(width_ + gates_.size() - 1);
}

std::vector<std::uint32_t> RunMerger::merge(const std::vector<std::uint32_t>& a,
                                            const std::vector<std::uint32_t>& b) {
  if (a.empty()) return b;
  if (b.empty()) return a;
  if (a.size() == 1 && b.size() == 1) return {gate(a[0], b[0], true), gate(a[0], b[0], false)};
  const auto take = [](const std::vector<std::uint32_t>& v, std::size_t from) {
    std::vector<std::uint32_t> out;
    for (std::size_t i = from; i < v.size(); i += 2) out.push_back(v[i]);
    return out;
  };
  const auto even = merge(take(a, 0), take(b, 0));
  const auto odd = merge(take(a, 1), take(b, 1));
  std::vector<std::uint32_t> out{even[0]};
  std::size_t k = 0;
  for (; k < odd.size() && k + 1 < even.size(); ++k) {
    out.push_back(gate(odd[k], even[k + 1], true));
    out.push_back(gate(odd[k], even[k + 1], false));
  }
  out.insert(out.end(), odd.begin() + static_cast<std::ptrdiff_t>(k), odd.end());
  out.insert(out.end(), even.begin() + static_cast<std::ptrdiff_t>(k + 1), even.end());
  return out;
}

BitVector RunMerger::evaluate(BitSpan input) const {
  if (input.size() != width_) {
    throw SizeError("run merger expects " + std::to_string(width_) + " bits, got " +
                    std::to_string(input.size()));
  }
  std::size_t offset = 0;
  for (std::size_t r : runs_) {
    if (!is_sorted_descending(input.subspan(offset, r))) throw CanonicalError("input run is not sorted");
    offset += r;
  }
  std::vector<std::uint8_t> value(width_ + gates_.size(), 0);
  std::copy(input.begin(), input.end(), value.begin());
  for (std::size_t k = 0; k < gates_.size(); ++k) {
    const Gate& g = gates_[k];
    value[width_ + k] = g.is_or ? (value[g.a] | value[g.b]) : (value[g.a] & value[g.b]);
  }
  BitVector out(width_);
  for (std::size_t p = 0; p < width_; ++p) out[p] = value[outputs_[p]];
  return out;
}

RunMerger::Usage RunMerger::usage(const std::vector<bool>& used_outputs) const {
  if (used_outputs.size() != width_) throw SizeError("used-output mask width mismatch");
  const std::size_t nodes = width_ + gates_.size();
  std::vector<std::uint8_t> live(nodes, 0);
  std::vector<std::uint32_t> level(nodes, 0);
  for (std::size_t k = 0; k < gates_.size(); ++k) {
    level[width_ + k] = std::max(level[gates_[k].a], level[gates_[k].b]) + 1;
  }
  Usage u;
  for (std::size_t p = 0; p < width_; ++p) {
    if (!used_outputs[p]) continue;
    live[outputs_[p]] = 1;
    u.depth = std::max<std::size_t>(u.depth, level[outputs_[p]]);
  }
  for (std::size_t k = gates_.size(); k-- > 0;) {
    if (!live[width_ + k]) continue;
    ++u.gates;
    live[gates_[k].a] = live[gates_[k].b] = 1;
  }
  return u;
}

}  // namespace scsim::bsn
