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


#include "scsim/cost.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <string>

#include "scsim/errors.hpp"

namespace scsim::cost {

void validate(const GateCosts& g) {
  if (!(g.area_per_gate > 0) || !(g.delay_per_comparator_stage > 0) || g.multiplier_gates <= 0 ||
      !(g.si_selector_gates_per_tap > 0)) {
    throw ConfigError("gate costs must all be positive");
  }
}

CostReport CostReport::make(double area, double per_cycle_delay, std::size_t cycles) {
  CostReport r;
  r.area = area;
  r.per_cycle_delay = per_cycle_delay;
  r.cycles = cycles;
  r.delay = per_cycle_delay * static_cast<double>(cycles);
  r.adp = r.area * r.delay;
  r.adp_iso_throughput = r.adp * static_cast<double>(cycles);
  return r;
}

GateUsage pruned_usage(const bsn::SortNetwork& net, const std::vector<bool>& used_outputs) {
  if (used_outputs.size() != net.width()) throw SizeError("used-output mask width mismatch");
  const auto& stages = net.stages();
  std::vector<bool> live = used_outputs;
  std::vector<std::vector<bool>> kept(stages.size());
  GateUsage usage;
  for (std::size_t s = stages.size(); s-- > 0;) {
    kept[s].resize(stages[s].size());
    for (std::size_t k = 0; k < stages[s].size(); ++k) {
      const auto& c = stages[s][k];
      const bool need = live[c.i] || live[c.j];
      usage.gates += static_cast<std::size_t>(live[c.i]) + static_cast<std::size_t>(live[c.j]);
      kept[s][k] = need;
      live[c.i] = live[c.j] = need;
    }
  }
  std::vector<std::size_t> arrival(net.width(), 0);
  for (std::size_t s = 0; s < stages.size(); ++s) {
    for (std::size_t k = 0; k < stages[s].size(); ++k) {
      if (!kept[s][k]) continue;
      const auto& c = stages[s][k];
      arrival[c.i] = arrival[c.j] = std::max(arrival[c.i], arrival[c.j]) + 1;
    }
  }
  for (std::size_t w = 0; w < net.width(); ++w) {
    if (used_outputs[w]) usage.depth = std::max(usage.depth, arrival[w]);
  }
  return usage;
}

CostReport cost_bsn(std::size_t n, const GateCosts& g) {
  validate(g);
  if (n < 2) throw ConfigError("BSN width must be at least 2");
  const auto& net = bsn::bitonic(n);
  return CostReport::make(static_cast<double>(2 * net.comparator_count()) * g.area_per_gate,
                          static_cast<double>(net.depth()) * g.delay_per_comparator_stage);
}

namespace {

std::vector<bool> kept_positions(const approx::StageConfig& stage) {
  std::vector<bool> used(stage.l, false);
  for (std::size_t pos = stage.c; pos < stage.l - stage.c; pos += stage.s) used[pos] = true;
  return used;
}

/// Run lengths seen by sub-BSN j when the previous stage emits sorted runs
/// of `run` bits back to back.
std::vector<std::size_t> runs_of(std::size_t j, std::size_t l, std::size_t run) {
  std::vector<std::size_t> out;
  std::size_t pos = j * l;
  const std::size_t end = pos + l;
  while (pos < end) {
    const std::size_t next = std::min(end, (pos / run + 1) * run);
    out.push_back(next - pos);
    pos = next;
  }
  return out;
}

}  // namespace

CostReport cost_approx(const approx::ApproxConfig& cfg, const GateCosts& g) {
  validate(g);
  double area = 0.0;
  double delay = 0.0;
  const auto& stages = cfg.stages();
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& stage = stages[i];
    if (stage.l < 2) continue;
    const auto used = kept_positions(stage);
    if (i == 0) {
      const auto usage = pruned_usage(bsn::bitonic(stage.l), used);
      area += static_cast<double>(stage.m * usage.gates) * g.area_per_gate;
      delay += static_cast<double>(usage.depth) * g.delay_per_comparator_stage;
      continue;
    }
    // Later stages see sorted runs from the previous sub-BSNs and only merge.
    std::map<std::vector<std::size_t>, bsn::RunMerger::Usage> seen;
    std::size_t gates = 0, depth = 0;
    for (std::size_t j = 0; j < stage.m; ++j) {
      const auto runs = runs_of(j, stage.l, stages[i - 1].out_width());
      auto it = seen.find(runs);
      if (it == seen.end()) it = seen.emplace(runs, bsn::RunMerger(runs).usage(used)).first;
      gates += it->second.gates;
      depth = std::max(depth, it->second.depth);
    }
    area += static_cast<double>(gates) * g.area_per_gate;
    delay += static_cast<double>(depth) * g.delay_per_comparator_stage;
  }
  return CostReport::make(area, delay);
}

CostReport cost_temporal(const approx::TemporalSchedule& sched, const approx::ApproxConfig& inner,
                         const GateCosts& g) {
  approx::validate(sched, inner);
  const auto per_cycle = cost_approx(inner, g);
  return CostReport::make(per_cycle.area, per_cycle.delay, sched.cycles);
}

namespace {

std::size_t ceil_log2(std::size_t n) { return n <= 1 ? 0 : std::bit_width(n - 1); }

}  // namespace

CostReport cost_layer(const LayerShape& layer, const DatapathConfig& dp) {
  validate(dp.gates);
  if (layer.fan_in == 0) throw ConfigError("layer has zero fan-in");
  if (layer.in_bsl < 2 || layer.in_bsl % 2 != 0) throw ConfigError("activation BSL must be even");
  const auto& g = dp.gates;

  const double mult_area = static_cast<double>(layer.fan_in * (layer.in_bsl / 2)) *
                           static_cast<double>(g.multiplier_gates) * g.area_per_gate;
  const double mult_delay = g.delay_per_comparator_stage;

  const std::size_t width = layer.fan_in * layer.in_bsl;
  const std::size_t residual_width =
      layer.residual_bsl == 0
          ? 0
          : layer.residual_bsl << static_cast<std::size_t>(std::max(0, layer.rescale_log2));

  CostReport acc;
  std::size_t si_width = 0;
  switch (dp.mode) {
    case Mode::exact:
      si_width = width + residual_width;
      acc = cost_bsn(si_width, g);
      break;
    case Mode::approx: {
      const auto it = dp.approx.find(width);
      if (it == dp.approx.end()) {
        throw ConfigError("no approximate configuration for accumulation width " +
                          std::to_string(width));
      }
      acc = cost_approx(it->second, g);
      si_width = it->second.output_width();
      break;
    }
    case Mode::temporal: {
      const auto it = dp.temporal.find(width);
      if (it == dp.temporal.end()) {
        throw ConfigError("no temporal configuration for accumulation width " +
                          std::to_string(width));
      }
      acc = cost_temporal(it->second.schedule, it->second.inner, g);
      si_width = it->second.schedule.partial_bsl;
      break;
    }
  }
  double acc_area = acc.area;
  double acc_delay = acc.delay;
  if (dp.mode != Mode::exact && residual_width > 0) {
    // The aligned residual joins the compressed sum on a separate merge BSN.
    si_width += residual_width;
    const auto merge = cost_bsn(si_width, g);
    acc_area += merge.area;
    acc_delay += merge.delay;
  }

  const double si_area = static_cast<double>(layer.out_bsl) *
                         static_cast<double>(si_width - 1) * g.si_selector_gates_per_tap *
                         g.area_per_gate;
  const double si_delay = static_cast<double>(ceil_log2(si_width)) * g.delay_per_comparator_stage;

  CostReport r;
  r.cycles = acc.cycles;
  r.area = mult_area + acc_area + si_area;
  r.delay = mult_delay + acc_delay + si_delay;
  r.per_cycle_delay = r.delay / static_cast<double>(r.cycles);
  r.adp = r.area * r.delay;
  r.adp_iso_throughput = r.adp * static_cast<double>(r.cycles);
  return r;
}

CostReport cost_total(const std::vector<CostReport>& layers) {
  CostReport total;
  total.cycles = 0;
  for (const auto& l : layers) {
    total.area += l.area;
    total.delay += l.delay;
    total.cycles += l.cycles;
  }
  total.per_cycle_delay = total.cycles ? total.delay / static_cast<double>(total.cycles) : 0.0;
  total.adp = total.area * total.delay;
  total.adp_iso_throughput = total.adp;
  return total;
}

}  // namespace scsim::cost
