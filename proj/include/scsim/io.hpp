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

#include <filesystem>
#include <string>

#include <json.hpp>

#include "scsim/actsi.hpp"
#include "scsim/approxbsn.hpp"
#include "scsim/netsim.hpp"

namespace scsim::io {

using nlohmann::json;

inline constexpr int kFormatVersion = 1;

/// Reads a whole file; throws ValidationError when it cannot be opened.
std::string read_file(const std::filesystem::path& path);
void write_file(const std::filesystem::path& path, const std::string& text);

/// Throws ParseError with line/column for malformed text.
json parse_json(const std::string& text, const std::string& what);

/// Parses and validates a model. ParseError for schema problems (missing or
/// mistyped fields, named by path), ValidationError for invariant failures.
net::ModelGraph parse_model(const json& j);
net::ModelGraph load_model(const std::filesystem::path& path);
json model_to_json(const net::ModelGraph& model);

/// "bsl" is optional in tensor files; missing means 0 (caller fills it in).
net::Tensor parse_tensor(const json& j);
net::Tensor load_tensor(const std::filesystem::path& path);
json tensor_to_json(const net::Tensor& t);

/// Samples inherit shape, BSL and alpha from the model input.
net::Dataset parse_dataset(const json& j, const net::ModelGraph& model);
net::Dataset load_dataset(const std::filesystem::path& path, const net::ModelGraph& model);
json dataset_to_json(const net::Dataset& d);

/// Stage list [[m, l, c, s], ...].
approx::ApproxConfig parse_approx(const json& j, const std::string& path);
json approx_to_json(const approx::ApproxConfig& cfg);

/// {"bsn_width": P, "partial_bsl": B, "cycles": n, "inner": [[m,l,c,s],...]};
/// "inner" defaults to a single exact stage.
cost::TemporalPlan parse_temporal(const json& j, const std::string& path);
json temporal_to_json(const cost::TemporalPlan& plan);

cost::GateCosts parse_gate_costs(const json& j);

/// Fields: mode, gate_costs, approx (keyed by width), temporal (keyed by
/// width), fault {ber, seed}, act_bsl_overrides. All optional.
net::RunConfig parse_run_config(const json& j);

json taps_to_json(const si::TapVector& t);
si::TapVector parse_taps(const json& j);

json trace_to_json(const std::vector<net::LayerTrace>& trace);

}  // namespace scsim::io
