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
#include <map>
#include <optional>
#include <vector>

#include "scsim/approxbsn.hpp"
#include "scsim/bsn.hpp"

/// Analytic unit-gate area/delay model. Areas are in gate-units and delays
/// in comparator-stage units: ratios and trends are meaningful, absolute
/// values are not silicon numbers.
namespace scsim::cost {

struct GateCosts {
  double area_per_gate = 1.0;
  double delay_per_comparator_stage = 1.0;
  int multiplier_gates = 5;
  double si_selector_gates_per_tap = 1.0;
};

/// Throws ConfigError unless every field is positive.
void validate(const GateCosts& g);

struct CostReport {
  double area = 0.0;
  double delay = 0.0;             // per_cycle_delay * cycles
  double adp = 0.0;               // area * delay
  std::size_t cycles = 1;
  double per_cycle_delay = 0.0;
  double adp_iso_throughput = 0.0;  // area * per_cycle_delay * cycles^2

  static CostReport make(double area, double per_cycle_delay, std::size_t cycles = 1);
};

/// Gates and logic depth still needed when only some sorter outputs are used.
/// A comparator costs one gate per used output (OR for wire i, AND for wire j).
struct GateUsage {
  std::size_t gates = 0;
  std::size_t depth = 0;
};
GateUsage pruned_usage(const bsn::SortNetwork& net, const std::vector<bool>& used_outputs);

/// Full bitonic sorter: 2 gates per comparator, one delay unit per stage.
CostReport cost_bsn(std::size_t n, const GateCosts& g = {});

/// Sum over stages of m_i pruned sub-BSNs; delay adds the stage depths.
/// The first stage sorts arbitrary bits; later stages receive sorted runs
/// and are costed as run mergers.
/// Sub-sampling itself is wiring and costs nothing.
CostReport cost_approx(const approx::ApproxConfig& cfg, const GateCosts& g = {});

/// One inner BSN reused `cycles` times.
CostReport cost_temporal(const approx::TemporalSchedule& sched, const approx::ApproxConfig& inner,
                         const GateCosts& g = {});

struct TemporalPlan {
  approx::TemporalSchedule schedule;
  approx::ApproxConfig inner;
};

enum class Mode { exact, approx, temporal };

/// How each accumulation width is realized.
struct DatapathConfig {
  Mode mode = Mode::exact;
  GateCosts gates;
  std::map<std::size_t, approx::ApproxConfig> approx;
  std::map<std::size_t, TemporalPlan> temporal;
};

/// Geometry of one output neuron's datapath.
struct LayerShape {
  std::size_t fan_in = 0;        // products per output
  std::size_t in_bsl = 2;        // activation BSL entering the multipliers
  std::size_t out_bsl = 2;       // SI output BSL
  std::size_t residual_bsl = 0;  // 0 when the layer has no residual input
  int rescale_log2 = 0;
};

/// Multipliers (multiplier_gates per 2-bit slice of the activation) feeding
/// the accumulator chosen by the datapath, plus the SI selectors. Throws
/// ConfigError for zero fan-in or a missing approximate configuration.
CostReport cost_layer(const LayerShape& layer, const DatapathConfig& dp);

/// Sums layer areas and delays; the model ADP is total area x total delay.
CostReport cost_total(const std::vector<CostReport>& layers);

}  // namespace scsim::cost
