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


#include "scsim/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <charconv>
#include <iostream>
#include <optional>
#include <sstream>

#include "scsim/errors.hpp"
#include "scsim/io.hpp"

namespace scsim::cli {

namespace {

using io::json;

struct Options {
  std::string model, input, config, dataset, out, trace;
  std::optional<std::uint64_t> seed;
  std::optional<double> ber;
  std::string mode;
  std::size_t threads = 1;

  // sweep
  std::string param;
  std::vector<std::string> value_text;
  std::vector<double> values;
  std::size_t reps = 1;
  std::size_t width = 4608;
  std::size_t clip = 0;
  std::size_t bsn_width = 576;
  std::size_t partial_bsl = 64;
  std::size_t trials = 200;
  double p = 0.25;

  // cost
  std::vector<std::size_t> widths;
  bool with_mse = false;

  // codec
  std::int64_t value = 0;
  std::size_t bsl = 2;
  double alpha = 1.0;
  std::string literal;
};

json load_config_json(const Options& o) {
  if (o.config.empty()) return json::object();
  return io::parse_json(io::read_file(o.config), o.config);
}

cost::Mode parse_mode(const std::string& m) {
  if (m == "exact") return cost::Mode::exact;
  if (m == "approx") return cost::Mode::approx;
  if (m == "temporal") return cost::Mode::temporal;
  throw ConfigError("unknown mode '" + m + "'");
}

/// Config file first, then command-line overrides.
net::RunConfig run_config(const Options& o, const json& j) {
  net::RunConfig cfg = io::parse_run_config(j);
  if (!o.mode.empty()) cfg.datapath.mode = parse_mode(o.mode);
  if (o.ber || o.seed) {
    arith::FaultConfig f = cfg.fault.value_or(arith::FaultConfig{0.0, 0});
    if (o.ber) f.ber = *o.ber;
    if (o.seed) f.seed = *o.seed;
    arith::validate(f);
    cfg.fault = f;
  }
  return cfg;
}

std::uint64_t seed_of(const Options& o, const json& j) {
  if (o.seed) return *o.seed;
  if (j.contains("fault") && j["fault"].contains("seed")) {
    const auto cfg = io::parse_run_config(j);
    return cfg.fault->seed;
  }
  return 1;
}

std::string num(double v) { return format_real(v); }

void emit(const Options& o, std::ostream& out, const std::string& text) {
  if (o.out.empty()) {
    out << text;
  } else {
    io::write_file(o.out, text);
  }
}

int cmd_simulate(const Options& o, std::ostream& out) {
  const net::ModelGraph base = io::load_model(o.model);
  net::Tensor input = io::load_tensor(o.input);
  if (input.bsl == 0) input.bsl = base.input.bsl;
  const net::RunConfig cfg = run_config(o, load_config_json(o));
  const net::ModelGraph model = net::apply_overrides(base, cfg);
  const net::RunResult r = net::run_sc(model, input, cfg);
  emit(o, out, io::tensor_to_json(r.output).dump(1) + "\n");
  if (!o.trace.empty()) io::write_file(o.trace, io::trace_to_json(r.trace).dump(1) + "\n");
  return kOk;
}

approx::InputDistribution distribution(const Options& o) {
  if (!(o.p >= 0.0 && o.p <= 0.5)) throw ValidationError("--p must lie in [0, 0.5]");
  return {o.p};
}

std::string approx_row_values(const approx::ApproxConfig& a, const Options& o, std::uint64_t seed) {
  const auto c = cost::cost_approx(a);
  arith::Rng rng(seed);
  const auto m = approx::measure_mse(a, distribution(o), o.trials, rng);
  return num(c.area) + "," + num(c.delay) + "," + num(c.adp) + "," + num(m.mse_normalized);
}

std::size_t as_count(double v, const char* what) {
  if (!(v >= 0.0) || v != std::floor(v)) {
    throw ValidationError(std::string(what) + " values must be non-negative integers, got " + num(v));
  }
  return static_cast<std::size_t>(v);
}

int cmd_sweep(Options o, std::ostream& out, std::ostream& err) {
  std::vector<double> values;
  for (const auto& t : o.value_text) {
    double v = 0.0;
    const auto [end, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (t.empty() || ec != std::errc{} || end != t.data() + t.size()) {
      err << "sweep: bad value '" << t << "' in --values\n";
      return kUsage;
    }
    values.push_back(v);
  }
  if (values.empty()) {
    err << "sweep: --values must not be empty\n";
    return kUsage;
  }
  o.values = std::move(values);
  if (o.reps == 0) {
    err << "sweep: --reps must be >= 1\n";
    return kUsage;
  }
  const json j = load_config_json(o);
  const std::uint64_t seed = seed_of(o, j);
  std::ostringstream csv;

  if (o.param == "ber") {
    if (o.model.empty() || o.dataset.empty()) {
      err << "sweep ber: --model and --dataset are required\n";
      return kUsage;
    }
    const auto model = io::load_model(o.model);
    const auto data = io::load_dataset(o.dataset, model);
    const auto rows = net::evaluate_fault_tolerance(model, data, o.values, o.reps, seed, o.threads);
    csv << "value,repetition,seed,accuracy_loss_sc,accuracy_loss_binary\n";
    for (const auto& r : rows) {
      csv << num(r.ber) << "," << r.repetition << "," << r.seed << "," << num(r.accuracy_loss_sc) << ","
          << num(r.accuracy_loss_binary) << "\n";
    }
  } else if (o.param == "act_bsl") {
    if (o.model.empty()) {
      err << "sweep act_bsl: --model is required\n";
      return kUsage;
    }
    const auto model = io::load_model(o.model);
    const auto dp = run_config(o, j).datapath;
    csv << "value,repetition,seed,area,delay,adp\n";
    for (double v : o.values) {
      const std::size_t bsl = as_count(v, "act_bsl");
      if (bsl < 2 || bsl % 2 != 0) throw ValidationError("act_bsl values must be even and >= 2");
      const auto total = cost::cost_total(net::cost_model(model, dp, bsl));
      for (std::size_t r = 0; r < o.reps; ++r) {
        csv << bsl << "," << r << "," << seed + r << "," << num(total.area) << "," << num(total.delay)
            << "," << num(total.adp) << "\n";
      }
    }
  } else if (o.param == "clip_c" || o.param == "stride_s") {
    csv << "value,repetition,seed,area,delay,adp,mse_normalized\n";
    for (double v : o.values) {
      const std::size_t x = as_count(v, o.param.c_str());
      const approx::StageConfig st = o.param == "clip_c" ? approx::StageConfig{1, o.width, x, 1}
                                                         : approx::StageConfig{1, o.width, o.clip, x};
      const approx::ApproxConfig a({st});
      for (std::size_t r = 0; r < o.reps; ++r) {
        csv << x << "," << r << "," << seed + r << "," << approx_row_values(a, o, seed + r) << "\n";
      }
    }
  } else if (o.param == "layer_width") {
    const auto inner = approx::ApproxConfig::clip(o.bsn_width, (o.bsn_width - o.partial_bsl) / 2);
    csv << "value,repetition,seed,area,delay,adp,cycles,baseline_adp\n";
    for (double v : o.values) {
      const std::size_t w = as_count(v, "layer_width");
      const auto sched = approx::schedule_for(w, o.bsn_width, o.partial_bsl);
      const auto t = cost::cost_temporal(sched, inner);
      const auto base = cost::cost_bsn(w);
      for (std::size_t r = 0; r < o.reps; ++r) {
        csv << w << "," << r << "," << seed + r << "," << num(t.area) << "," << num(t.delay) << ","
            << num(t.adp) << "," << t.cycles << "," << num(base.adp) << "\n";
      }
    }
  } else {
    err << "sweep: unknown parameter '" << o.param << "'\n";
    return kUsage;
  }
  emit(o, out, csv.str());
  return kOk;
}

struct Design {
  std::string name;
  std::size_t width;
  cost::Mode mode;
};

std::vector<Design> designs_of(const json& j) {
  std::vector<Design> out;
  if (!j.contains("designs")) return out;
  const json& d = j["designs"];
  if (!d.is_array()) throw ParseError("config.designs: expected an array");
  for (std::size_t i = 0; i < d.size(); ++i) {
    const std::string p = "config.designs[" + std::to_string(i) + "]";
    if (!d[i].is_object() || !d[i].contains("name") || !d[i].contains("width") || !d[i]["name"].is_string() ||
        !d[i]["width"].is_number_unsigned()) {
      throw ParseError(p + ": needs string \"name\" and integer \"width\"");
    }
    const std::string mode = d[i].value("mode", std::string("exact"));
    out.push_back({d[i]["name"].get<std::string>(), d[i]["width"].get<std::size_t>(), parse_mode(mode)});
  }
  return out;
}

int cmd_cost(const Options& o, std::ostream& out, std::ostream& err) {
  const json j = load_config_json(o);
  const net::RunConfig cfg = run_config(o, j);
  const auto& dp = cfg.datapath;
  const std::uint64_t seed = seed_of(o, j);
  std::ostringstream csv;
  csv << "design,width,area,delay,adp,cycles,mse\n";

  const auto mse_of = [&](const std::function<approx::MseReport(arith::Rng&)>& f) -> std::string {
    if (!o.with_mse) return "";
    arith::Rng rng(seed);
    return num(f(rng).mse_normalized);
  };
  const auto row = [&](const std::string& name, std::optional<std::size_t> width,
                       const cost::CostReport& c, const std::string& mse) {
    csv << name << "," << (width ? std::to_string(*width) : "") << "," << num(c.area) << "," << num(c.delay) << "," << num(c.adp) << ","
        << c.cycles << "," << mse << "\n";
  };

  if (!o.model.empty()) {
    const auto model = net::apply_overrides(io::load_model(o.model), cfg);
    const auto costs = net::cost_model(model, dp);
    std::size_t k = 0;
    for (const auto& l : model.layers) {
      if (!l.has_weights()) continue;
      row(l.id, l.accumulation_width(), costs[k++], "");
    }
    row("total", std::nullopt, cost::cost_total(costs), "");
  } else if (!o.widths.empty()) {
    for (std::size_t w : o.widths) row("bsn", w, cost::cost_bsn(w, dp.gates), "");
  } else {
    const auto designs = designs_of(j);
    if (designs.empty()) {
      err << "cost: give --model, --widths or a config with \"designs\"\n";
      return kUsage;
    }
    const approx::InputDistribution dist = distribution(o);
    for (const auto& d : designs) {
      switch (d.mode) {
        case cost::Mode::exact: {
          const auto a = approx::ApproxConfig::exact(d.width);
          row(d.name, d.width, cost::cost_bsn(d.width, dp.gates),
              mse_of([&](arith::Rng& rng) { return approx::measure_mse(a, dist, o.trials, rng); }));
          break;
        }
        case cost::Mode::approx: {
          const auto it = dp.approx.find(d.width);
          if (it == dp.approx.end()) {
            throw ConfigError("design " + d.name + ": no approx config for width " + std::to_string(d.width));
          }
          row(d.name, d.width, cost::cost_approx(it->second, dp.gates),
              mse_of([&](arith::Rng& rng) { return approx::measure_mse(it->second, dist, o.trials, rng); }));
          break;
        }
        case cost::Mode::temporal: {
          const auto it = dp.temporal.find(d.width);
          if (it == dp.temporal.end()) {
            throw ConfigError("design " + d.name + ": no temporal config for width " + std::to_string(d.width));
          }
          const auto& plan = it->second;
          row(d.name, d.width, cost::cost_temporal(plan.schedule, plan.inner, dp.gates),
              mse_of([&](arith::Rng& rng) {
                return approx::measure_mse(plan.schedule, plan.inner, dist, o.trials, rng);
              }));
          break;
        }
      }
    }
  }
  emit(o, out, csv.str());
  return kOk;
}

int cmd_mse(const Options& o, std::ostream& out) {
  const json j = load_config_json(o);
  const net::RunConfig cfg = run_config(o, j);
  const std::uint64_t seed = seed_of(o, j);
  arith::Rng rng(seed);
  approx::MseReport m;
  std::string design;
  switch (cfg.datapath.mode) {
    case cost::Mode::exact:
      design = "exact";
      m = approx::measure_mse(approx::ApproxConfig::exact(o.width), distribution(o), o.trials, rng);
      break;
    case cost::Mode::approx: {
      const auto it = cfg.datapath.approx.find(o.width);
      if (it == cfg.datapath.approx.end()) {
        throw ConfigError("no approx config for width " + std::to_string(o.width));
      }
      design = "approx";
      m = approx::measure_mse(it->second, distribution(o), o.trials, rng);
      break;
    }
    case cost::Mode::temporal: {
      const auto it = cfg.datapath.temporal.find(o.width);
      if (it == cfg.datapath.temporal.end()) {
        throw ConfigError("no temporal config for width " + std::to_string(o.width));
      }
      design = "temporal";
      m = approx::measure_mse(it->second.schedule, it->second.inner, distribution(o), o.trials, rng);
      break;
    }
  }
  std::ostringstream csv;
  csv << "design,width,trials,p,seed,mse_raw,mse_normalized,mean_error,max_abs_error\n";
  csv << design << "," << o.width << "," << m.trials << "," << num(o.p) << "," << seed << ","
      << num(m.mse_raw) << "," << num(m.mse_normalized) << "," << num(m.mean_error) << ","
      << m.max_abs_error << "\n";
  emit(o, out, csv.str());
  return kOk;
}

int cmd_encode(const Options& o, std::ostream& out) {
  out << to_literal(encode(o.value, o.bsl, o.alpha)) << "\n";
  return kOk;
}

int cmd_decode(const Options& o, std::ostream& out) {
  const Bitstream b = parse_literal(o.literal);
  out << b.q() << "," << format_real(decode(b).real()) << "\n";
  return kOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Stochastic-computing accelerator simulator"};
  app.name("scsim");
  app.require_subcommand(1);
  Options o;

  const auto common = [&](CLI::App* sub) {
    sub->add_option("--config", o.config, "Config file (JSON)");
    sub->add_option("--seed", o.seed, "RNG seed");
    sub->add_option("--out", o.out, "Output file (default: stdout)");
    sub->add_option("--mode", o.mode, "Datapath mode")->check(CLI::IsMember({"exact", "approx", "temporal"}));
  };

  auto* simulate = app.add_subcommand("simulate", "Run a model on one input tensor");
  common(simulate);
  simulate->add_option("--model", o.model, "Model file")->required();
  simulate->add_option("--input", o.input, "Input tensor file")->required();
  simulate->add_option("--trace", o.trace, "Write per-layer trace here");
  simulate->add_option("--ber", o.ber, "Bit error rate on inter-layer streams");

  auto* sweep = app.add_subcommand("sweep", "Sweep one parameter and emit CSV");
  common(sweep);
  sweep->add_option("--param", o.param, "ber | act_bsl | clip_c | stride_s | layer_width")->required();
  sweep->add_option("--values", o.value_text, "Comma-separated values")->delimiter(',')->required();
  sweep->add_option("--reps", o.reps, "Repetitions per value");
  sweep->add_option("--model", o.model, "Model file");
  sweep->add_option("--dataset", o.dataset, "Labeled dataset (ber sweep)");
  sweep->add_option("--width", o.width, "Accumulation width (clip_c, stride_s)");
  sweep->add_option("--clip", o.clip, "Clip per end for stride_s");
  sweep->add_option("--bsn-width", o.bsn_width, "Temporal BSN width P (layer_width)");
  sweep->add_option("--partial-bsl", o.partial_bsl, "Temporal partial sum BSL B (layer_width)");
  sweep->add_option("--trials", o.trials, "Monte Carlo trials");
  sweep->add_option("--p", o.p, "P(+1) = P(-1) of the product distribution");
  sweep->add_option("--threads", o.threads, "Worker threads");

  auto* cost_cmd = app.add_subcommand("cost", "Area/delay/ADP report");
  common(cost_cmd);
  cost_cmd->add_option("--model", o.model, "Per-layer costs of a model");
  cost_cmd->add_option("--widths", o.widths, "Exact BSN widths")->delimiter(',');
  cost_cmd->add_flag("--mse", o.with_mse, "Add Monte Carlo MSE per design");
  cost_cmd->add_option("--trials", o.trials, "Monte Carlo trials");
  cost_cmd->add_option("--p", o.p, "P(+1) = P(-1) of the product distribution");

  auto* mse = app.add_subcommand("mse", "Monte Carlo accumulation error");
  common(mse);
  mse->add_option("--width", o.width, "Accumulation width");
  mse->add_option("--trials", o.trials, "Monte Carlo trials");
  mse->add_option("--p", o.p, "P(+1) = P(-1) of the product distribution");

  auto* enc = app.add_subcommand("encode", "Quantized value to bits@alpha");
  enc->add_option("--value", o.value, "Quantized value q")->required();
  enc->add_option("--bsl", o.bsl, "Bitstream length")->required();
  enc->add_option("--alpha", o.alpha, "Scale");

  auto* dec = app.add_subcommand("decode", "bits@alpha to q,value");
  dec->add_option("literal", o.literal, "Bitstream literal")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "scsim: " << e.what() << "\n";
    return kUsage;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out, err);
    if (cost_cmd->parsed()) return cmd_cost(o, out, err);
    if (mse->parsed()) return cmd_mse(o, out);
    if (enc->parsed()) return cmd_encode(o, out);
    if (dec->parsed()) return cmd_decode(o, out);
  } catch (const ConfigError& e) {
    err << "scsim: configuration error: " << e.what() << "\n";
    return kConfig;
  } catch (const Error& e) {
    err << "scsim: " << e.what() << "\n";
    return kValidation;
  }
  return kUsage;
}

}  // namespace scsim::cli
