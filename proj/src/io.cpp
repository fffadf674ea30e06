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


#include "scsim/io.hpp"

#include <fstream>
#include <sstream>

#include "scsim/errors.hpp"

namespace scsim::io {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ParseError(path + ": " + msg);
}

const json& field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(path + "." + key, "missing field");
  return *it;
}

const json* optional_field(const json& j, const std::string& key, const std::string& path) {
  if (!j.is_object()) fail(path, "expected an object");
  auto it = j.find(key);
  return it == j.end() ? nullptr : &*it;
}

std::int64_t as_int(const json& v, const std::string& path) {
  if (!v.is_number_integer()) fail(path, "expected an integer");
  return v.get<std::int64_t>();
}

std::size_t as_size(const json& v, const std::string& path) {
  const std::int64_t x = as_int(v, path);
  if (x < 0) fail(path, "expected a non-negative integer");
  return static_cast<std::size_t>(x);
}

double as_real(const json& v, const std::string& path) {
  if (!v.is_number()) fail(path, "expected a number");
  return v.get<double>();
}

std::string as_string(const json& v, const std::string& path) {
  if (!v.is_string()) fail(path, "expected a string");
  return v.get<std::string>();
}

const json& as_array(const json& v, const std::string& path) {
  if (!v.is_array()) fail(path, "expected an array");
  return v;
}

std::string at(const std::string& path, std::size_t i) { return path + "[" + std::to_string(i) + "]"; }

void check_version(const json& j, const std::string& path) {
  const std::int64_t v = as_int(field(j, "format_version", path), path + ".format_version");
  if (v != kFormatVersion) {
    fail(path + ".format_version", "unsupported version " + std::to_string(v));
  }
}

net::Shape parse_shape(const json& v, const std::string& path) {
  const json& a = as_array(v, path);
  if (a.size() != 3) fail(path, "expected [H, W, C]");
  return {as_size(a[0], at(path, 0)), as_size(a[1], at(path, 1)), as_size(a[2], at(path, 2))};
}

json shape_to_json(const net::Shape& s) { return json::array({s.h, s.w, s.c}); }

std::vector<double> parse_reals(const json& v, const std::string& path) {
  std::vector<double> out;
  const json& a = as_array(v, path);
  for (std::size_t i = 0; i < a.size(); ++i) out.push_back(as_real(a[i], at(path, i)));
  return out;
}

const char* kind_name(net::LayerKind k) {
  switch (k) {
    case net::LayerKind::conv2d: return "conv2d";
    case net::LayerKind::dense: return "dense";
    case net::LayerKind::avgpool: return "avgpool";
    case net::LayerKind::flatten: return "flatten";
  }
  return "?";
}

const char* act_name(net::ActKind k) {
  switch (k) {
    case net::ActKind::bn_relu: return "bn_relu";
    case net::ActKind::clip: return "clip";
    case net::ActKind::identity: return "identity";
  }
  return "?";
}

net::LayerSpec parse_layer(const json& j, const std::string& path) {
  net::LayerSpec l;
  l.id = as_string(field(j, "id", path), path + ".id");
  const std::string kind = as_string(field(j, "kind", path), path + ".kind");
  if (kind == "conv2d") l.kind = net::LayerKind::conv2d;
  else if (kind == "dense") l.kind = net::LayerKind::dense;
  else if (kind == "avgpool") l.kind = net::LayerKind::avgpool;
  else if (kind == "flatten") l.kind = net::LayerKind::flatten;
  else fail(path + ".kind", "unknown layer kind '" + kind + "'");
  l.in_shape = parse_shape(field(j, "in_shape", path), path + ".in_shape");
  l.out_shape = parse_shape(field(j, "out_shape", path), path + ".out_shape");

  if (l.kind == net::LayerKind::conv2d || l.kind == net::LayerKind::avgpool) {
    const json& k = as_array(field(j, "kernel", path), path + ".kernel");
    if (k.size() != 2) fail(path + ".kernel", "expected [KH, KW]");
    l.kernel_h = as_size(k[0], path + ".kernel[0]");
    l.kernel_w = as_size(k[1], path + ".kernel[1]");
    l.stride = l.kind == net::LayerKind::avgpool ? l.kernel_h : 1;
    if (const json* s = optional_field(j, "stride", path)) l.stride = as_size(*s, path + ".stride");
    if (const json* p = optional_field(j, "pad", path)) l.pad = as_size(*p, path + ".pad");
  }
  if (!l.has_weights()) return l;

  const json& w = as_array(field(j, "weights", path), path + ".weights");
  l.weights.reserve(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const std::int64_t v = as_int(w[i], at(path + ".weights", i));
    if (v < -1 || v > 1) {
      throw RangeError(at(path + ".weights", i) + " (" + l.id + "): value " + std::to_string(v) +
                       " is not ternary");
    }
    l.weights.push_back(static_cast<int>(v));
  }
  l.alpha_w = as_real(field(j, "alpha_w", path), path + ".alpha_w");

  const std::string ap = path + ".act";
  const json& act = field(j, "act", path);
  const std::string ak = as_string(field(act, "kind", ap), ap + ".kind");
  if (ak == "bn_relu") l.act.kind = net::ActKind::bn_relu;
  else if (ak == "clip") l.act.kind = net::ActKind::clip;
  else if (ak == "identity") l.act.kind = net::ActKind::identity;
  else fail(ap + ".kind", "unknown activation '" + ak + "'");
  if (l.act.kind != net::ActKind::identity) {
    l.act.gamma = parse_reals(field(act, "gamma", ap), ap + ".gamma");
    l.act.beta = parse_reals(field(act, "beta", ap), ap + ".beta");
  }
  l.act_bsl = as_size(field(j, "act_bsl", path), path + ".act_bsl");
  l.alpha_act = as_real(field(j, "alpha_act", path), path + ".alpha_act");

  if (const json* r = optional_field(j, "residual_from", path); r && !r->is_null()) {
    l.residual_from = as_string(*r, path + ".residual_from");
    l.residual_bsl = as_size(field(j, "residual_bsl", path), path + ".residual_bsl");
    l.rescale_log2 = static_cast<int>(as_int(field(j, "rescale_log2", path), path + ".rescale_log2"));
  }
  return l;
}

json layer_to_json(const net::LayerSpec& l) {
  json j;
  j["id"] = l.id;
  j["kind"] = kind_name(l.kind);
  j["in_shape"] = shape_to_json(l.in_shape);
  j["out_shape"] = shape_to_json(l.out_shape);
  if (l.kind == net::LayerKind::conv2d || l.kind == net::LayerKind::avgpool) {
    j["kernel"] = json::array({l.kernel_h, l.kernel_w});
    j["stride"] = l.stride;
    j["pad"] = l.pad;
  }
  if (!l.has_weights()) return j;
  j["weights"] = l.weights;
  j["alpha_w"] = l.alpha_w;
  json act{{"kind", act_name(l.act.kind)}};
  if (l.act.kind != net::ActKind::identity) {
    act["gamma"] = l.act.gamma;
    act["beta"] = l.act.beta;
  }
  j["act"] = act;
  j["act_bsl"] = l.act_bsl;
  j["alpha_act"] = l.alpha_act;
  if (l.residual_from) {
    j["residual_from"] = *l.residual_from;
    j["residual_bsl"] = l.residual_bsl;
    j["rescale_log2"] = l.rescale_log2;
  }
  return j;
}

}  // namespace

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write '" + path.string() + "'");
  out << text;
}

json parse_json(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(what + ": " + e.what());
  }
}

net::ModelGraph parse_model(const json& j) {
  check_version(j, "model");
  net::ModelGraph m;
  m.name = as_string(field(j, "name", "model"), "model.name");
  const json& in = field(j, "input", "model");
  m.input.shape = parse_shape(field(in, "shape", "input"), "input.shape");
  m.input.bsl = as_size(field(in, "bsl", "input"), "input.bsl");
  m.input.alpha = as_real(field(in, "alpha", "input"), "input.alpha");
  const json& layers = as_array(field(j, "layers", "model"), "layers");
  for (std::size_t i = 0; i < layers.size(); ++i) m.layers.push_back(parse_layer(layers[i], at("layers", i)));
  net::validate(m);
  return m;
}

net::ModelGraph load_model(const std::filesystem::path& path) {
  return parse_model(parse_json(read_file(path), path.string()));
}

json model_to_json(const net::ModelGraph& m) {
  json j;
  j["format_version"] = kFormatVersion;
  j["name"] = m.name;
  j["input"] = {{"shape", shape_to_json(m.input.shape)}, {"bsl", m.input.bsl}, {"alpha", m.input.alpha}};
  j["layers"] = json::array();
  for (const auto& l : m.layers) j["layers"].push_back(layer_to_json(l));
  return j;
}

net::Tensor parse_tensor(const json& j) {
  check_version(j, "tensor");
  net::Tensor t;
  t.shape = parse_shape(field(j, "shape", "tensor"), "tensor.shape");
  t.alpha = as_real(field(j, "alpha", "tensor"), "tensor.alpha");
  if (const json* b = optional_field(j, "bsl", "tensor")) t.bsl = as_size(*b, "tensor.bsl");
  else t.bsl = 0;
  const json& d = as_array(field(j, "data", "tensor"), "tensor.data");
  for (std::size_t i = 0; i < d.size(); ++i) t.data.push_back(as_int(d[i], at("tensor.data", i)));
  if (t.data.size() != t.shape.size()) {
    throw SizeError("tensor.data: " + std::to_string(t.data.size()) + " values for shape " +
                    net::to_string(t.shape));
  }
  return t;
}

net::Tensor load_tensor(const std::filesystem::path& path) {
  return parse_tensor(parse_json(read_file(path), path.string()));
}

json tensor_to_json(const net::Tensor& t) {
  return {{"format_version", kFormatVersion}, {"shape", shape_to_json(t.shape)}, {"bsl", t.bsl},
          {"alpha", t.alpha}, {"data", t.data}};
}

net::Dataset parse_dataset(const json& j, const net::ModelGraph& model) {
  check_version(j, "dataset");
  net::Dataset d;
  d.model_name = as_string(field(j, "model", "dataset"), "dataset.model");
  const json& samples = as_array(field(j, "samples", "dataset"), "dataset.samples");
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const std::string p = at("dataset.samples", i);
    net::Sample s;
    s.input.shape = model.input.shape;
    s.input.bsl = model.input.bsl;
    s.input.alpha = model.input.alpha;
    const json& data = as_array(field(samples[i], "data", p), p + ".data");
    for (std::size_t k = 0; k < data.size(); ++k) s.input.data.push_back(as_int(data[k], at(p + ".data", k)));
    s.label = as_size(field(samples[i], "label", p), p + ".label");
    net::check_input(model, s.input);
    d.samples.push_back(std::move(s));
  }
  return d;
}

net::Dataset load_dataset(const std::filesystem::path& path, const net::ModelGraph& model) {
  return parse_dataset(parse_json(read_file(path), path.string()), model);
}

json dataset_to_json(const net::Dataset& d) {
  json samples = json::array();
  for (const auto& s : d.samples) samples.push_back({{"data", s.input.data}, {"label", s.label}});
  return {{"format_version", kFormatVersion}, {"model", d.model_name}, {"samples", samples}};
}

approx::ApproxConfig parse_approx(const json& j, const std::string& path) {
  const json& a = as_array(j, path);
  std::vector<approx::StageConfig> stages;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::string p = at(path, i);
    const json& st = as_array(a[i], p);
    if (st.size() != 4) fail(p, "expected [m, l, c, s]");
    stages.push_back({as_size(st[0], at(p, 0)), as_size(st[1], at(p, 1)), as_size(st[2], at(p, 2)),
                      as_size(st[3], at(p, 3))});
  }
  try {
    return approx::ApproxConfig(std::move(stages));
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

json approx_to_json(const approx::ApproxConfig& cfg) {
  json a = json::array();
  for (const auto& s : cfg.stages()) a.push_back(json::array({s.m, s.l, s.c, s.s}));
  return a;
}

cost::TemporalPlan parse_temporal(const json& j, const std::string& path) {
  approx::TemporalSchedule sched{as_size(field(j, "bsn_width", path), path + ".bsn_width"),
                                 as_size(field(j, "partial_bsl", path), path + ".partial_bsl"),
                                 as_size(field(j, "cycles", path), path + ".cycles")};
  const json* inner = optional_field(j, "inner", path);
  approx::ApproxConfig cfg = inner ? parse_approx(*inner, path + ".inner")
                                   : approx::ApproxConfig::clip(sched.bsn_width, (sched.bsn_width - sched.partial_bsl) / 2);
  try {
    approx::validate(sched, cfg);
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
  return {sched, cfg};
}

json temporal_to_json(const cost::TemporalPlan& plan) {
  return {{"bsn_width", plan.schedule.bsn_width},
          {"partial_bsl", plan.schedule.partial_bsl},
          {"cycles", plan.schedule.cycles},
          {"inner", approx_to_json(plan.inner)}};
}

cost::GateCosts parse_gate_costs(const json& j) {
  cost::GateCosts g;
  const std::string p = "gate_costs";
  if (const json* v = optional_field(j, "area_per_gate", p)) g.area_per_gate = as_real(*v, p + ".area_per_gate");
  if (const json* v = optional_field(j, "delay_per_comparator_stage", p)) {
    g.delay_per_comparator_stage = as_real(*v, p + ".delay_per_comparator_stage");
  }
  if (const json* v = optional_field(j, "multiplier_gates", p)) {
    g.multiplier_gates = static_cast<int>(as_int(*v, p + ".multiplier_gates"));
  }
  if (const json* v = optional_field(j, "si_selector_gates_per_tap", p)) {
    g.si_selector_gates_per_tap = as_real(*v, p + ".si_selector_gates_per_tap");
  }
  cost::validate(g);
  return g;
}

namespace {

std::size_t width_key(const std::string& key, const std::string& path) {
  std::size_t pos = 0;
  unsigned long long w = 0;
  try {
    w = std::stoull(key, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos == 0 || pos != key.size()) fail(path + "." + key, "keys must be accumulation widths");
  return static_cast<std::size_t>(w);
}

}  // namespace

net::RunConfig parse_run_config(const json& j) {
  net::RunConfig cfg;
  if (!j.is_object()) fail("config", "expected an object");
  if (const json* v = optional_field(j, "format_version", "config")) {
    if (as_int(*v, "config.format_version") != kFormatVersion) fail("config.format_version", "unsupported version");
  }
  if (const json* v = optional_field(j, "mode", "config")) {
    const std::string m = as_string(*v, "config.mode");
    if (m == "exact") cfg.datapath.mode = cost::Mode::exact;
    else if (m == "approx") cfg.datapath.mode = cost::Mode::approx;
    else if (m == "temporal") cfg.datapath.mode = cost::Mode::temporal;
    else throw ConfigError("config.mode: unknown mode '" + m + "'");
  }
  if (const json* v = optional_field(j, "gate_costs", "config")) cfg.datapath.gates = parse_gate_costs(*v);
  if (const json* v = optional_field(j, "approx", "config")) {
    if (!v->is_object()) fail("config.approx", "expected an object keyed by width");
    for (const auto& [key, val] : v->items()) {
      const std::size_t w = width_key(key, "config.approx");
      approx::ApproxConfig a = parse_approx(val, "config.approx." + key);
      if (a.input_width() != w) {
        throw ConfigError("config.approx." + key + ": stages take " + std::to_string(a.input_width()) + " bits");
      }
      cfg.datapath.approx.emplace(w, std::move(a));
    }
  }
  if (const json* v = optional_field(j, "temporal", "config")) {
    if (!v->is_object()) fail("config.temporal", "expected an object keyed by width");
    for (const auto& [key, val] : v->items()) {
      cfg.datapath.temporal.emplace(width_key(key, "config.temporal"),
                                    parse_temporal(val, "config.temporal." + key));
    }
  }
  if (const json* v = optional_field(j, "fault", "config")) {
    arith::FaultConfig f;
    f.ber = as_real(field(*v, "ber", "config.fault"), "config.fault.ber");
    if (const json* s = optional_field(*v, "seed", "config.fault")) f.seed = as_size(*s, "config.fault.seed");
    arith::validate(f);
    cfg.fault = f;
  }
  if (const json* v = optional_field(j, "act_bsl_overrides", "config")) {
    if (!v->is_object()) fail("config.act_bsl_overrides", "expected an object keyed by layer id");
    for (const auto& [key, val] : v->items()) {
      cfg.act_bsl_overrides[key] = as_size(val, "config.act_bsl_overrides." + key);
    }
  }
  return cfg;
}

json taps_to_json(const si::TapVector& t) {
  return {{"in_width", t.in_width()}, {"alpha_out", t.alpha_out()}, {"taps", t.taps()}};
}

si::TapVector parse_taps(const json& j) {
  std::vector<std::uint32_t> taps;
  const json& a = as_array(field(j, "taps", "taps"), "taps.taps");
  for (std::size_t i = 0; i < a.size(); ++i) taps.push_back(static_cast<std::uint32_t>(as_size(a[i], at("taps.taps", i))));
  return si::TapVector(std::move(taps), as_size(field(j, "in_width", "taps"), "taps.in_width"),
                       as_real(field(j, "alpha_out", "taps"), "taps.alpha_out"));
}

json trace_to_json(const std::vector<net::LayerTrace>& trace) {
  json layers = json::array();
  for (const auto& t : trace) {
    json l{{"id", t.id}, {"accum_width", t.accum_width}, {"accum_alpha", t.accum_alpha},
           {"accum_q", t.accum_q}, {"accum_popcount", t.accum_popcount}};
    json taps = json::array();
    for (const auto& tv : t.taps) taps.push_back(taps_to_json(tv));
    l["taps"] = taps;
    layers.push_back(l);
  }
  return {{"format_version", kFormatVersion}, {"layers", layers}};
}

}  // namespace scsim::io
