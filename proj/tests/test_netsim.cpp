#include <algorithm>
#include <random>
#include <set>

#include "doctest.h"
#include "scsim/errors.hpp"
#include "scsim/io.hpp"
#include "scsim/netsim.hpp"

using namespace scsim;
using namespace scsim::net;

namespace {

const std::string kFixtures = SCSIM_FIXTURE_DIR;

ModelGraph fixture(const std::string& name) { return io::load_model(kFixtures + "/" + name + "/model.json"); }

io::json fixture_json(const std::string& name) {
  return io::parse_json(io::read_file(kFixtures + "/" + name + "/model.json"), name);
}

Tensor random_input(const ModelGraph& m, std::mt19937_64& rng) {
  Tensor t{m.input.shape, m.input.bsl, m.input.alpha, {}};
  const auto half = static_cast<std::int64_t>(m.input.bsl / 2);
  std::uniform_int_distribution<std::int64_t> d(-half, half);
  for (std::size_t i = 0; i < t.shape.size(); ++i) t.data.push_back(d(rng));
  return t;
}

LayerSpec dense(const std::string& id, std::size_t in, std::size_t out, std::vector<int> w) {
  LayerSpec l;
  l.id = id;
  l.kind = LayerKind::dense;
  l.in_shape = {1, 1, in};
  l.out_shape = {1, 1, out};
  l.weights = std::move(w);
  return l;
}

std::vector<int> identity_weights(std::size_t n) {
  std::vector<int> w(n * n, 0);
  for (std::size_t i = 0; i < n; ++i) w[i * n + i] = 1;
  return w;
}

cost::TemporalPlan single_cycle(std::size_t w) {
  return {{2 * w, w, 1}, approx::ApproxConfig::clip(2 * w, w / 2)};
}

}  // namespace

TEST_SUITE("netsim") {
  TEST_CASE("bundled models load") {
    const auto mlp = fixture("tiny-mlp");
    CHECK(mlp.name == "tiny-mlp");
    CHECK(mlp.layers.size() == 2);
    CHECK(mlp.layers[0].accumulation_width() == 32);
    CHECK(mlp.layers[1].accumulation_width() == 16);

    const auto cnn = fixture("tiny-cnn");
    CHECK(cnn.layers.size() == 5);
    CHECK(cnn.layers[1].residual_index == 0);
    CHECK(cnn.layers[1].accumulation_width() == 576);
    CHECK(cnn.layers[2].act_bsl == 8);
    CHECK(cnn.output_shape() == Shape{1, 1, 4});
  }

  TEST_CASE("golden vectors") {
    for (const std::string name : {"tiny-mlp", "tiny-cnn"}) {
      const auto m = fixture(name);
      const auto j = io::parse_json(io::read_file(kFixtures + "/" + name + "/vectors.json"), name);
      REQUIRE(j["inputs"].size() == 32);
      for (std::size_t i = 0; i < 32; ++i) {
        const Tensor in = io::parse_tensor(j["inputs"][i]);
        const Tensor golden = io::parse_tensor(j["goldens"][i]);
        CAPTURE(name);
        CAPTURE(i);
        CHECK(run_sc(m, in).output == golden);
        CHECK(run_oracle(m, in) == golden);
      }
    }
  }

  TEST_CASE("SC matches the integer reference on random inputs") {
    std::mt19937_64 rng(99);
    for (const std::string name : {"tiny-mlp", "tiny-cnn"}) {
      const auto m = fixture(name);
      for (int t = 0; t < 300; ++t) {
        const Tensor in = random_input(m, rng);
        REQUIRE(run_sc(m, in).output == run_oracle(m, in));
      }
    }
  }

  TEST_CASE("non-ternary weight is rejected") {
    auto j = fixture_json("tiny-mlp");
    j["layers"][0]["weights"][5] = 2;
    try {
      io::parse_model(j);
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("weights[5]") != std::string::npos);
    }
  }

  TEST_CASE("residual alpha ratio must be a power of two") {
    auto j = fixture_json("tiny-cnn");
    j["layers"][1]["alpha_w"] = 1.0 / 3.0;
    CHECK_THROWS_AS(io::parse_model(j), ScaleError);

    auto k = fixture_json("tiny-cnn");
    k["layers"][1]["rescale_log2"] = 1;
    CHECK_THROWS_AS(io::parse_model(k), ScaleError);
  }

  TEST_CASE("schema and shape diagnostics") {
    auto j = fixture_json("tiny-mlp");
    j["layers"][1]["in_shape"] = {1, 1, 9};
    CHECK_THROWS_AS(io::parse_model(j), SizeError);

    auto k = fixture_json("tiny-mlp");
    k["layers"][0].erase("alpha_w");
    try {
      io::parse_model(k);
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("layers[0].alpha_w") != std::string::npos);
    }

    auto r = fixture_json("tiny-cnn");
    r["layers"][1]["residual_from"] = "fc";
    CHECK_THROWS_AS(io::parse_model(r), ValidationError);

    auto v = fixture_json("tiny-mlp");
    v["format_version"] = 2;
    CHECK_THROWS_AS(io::parse_model(v), ParseError);

    try {
      io::parse_json("{\n\"name\": \"x\",\n  oops\n}", "model.json");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK_THROWS_AS(io::load_model(kFixtures + "/missing.json"), ValidationError);
  }

  TEST_CASE("input checks") {
    const auto m = fixture("tiny-mlp");
    Tensor in{m.input.shape, 2, 1.0, std::vector<std::int64_t>(16, 0)};
    in.data[3] = 2;
    CHECK_THROWS_AS(run_sc(m, in), RangeError);
    in.data[3] = 0;
    in.shape = {1, 1, 15};
    CHECK_THROWS_AS(run_oracle(m, in), SizeError);
  }

  TEST_CASE("zero input below the ReLU threshold gives zero outputs") {
    ModelGraph m;
    m.name = "relu";
    m.input = {{1, 1, 6}, 4, 1.0};
    auto l = dense("fc", 6, 3, {1, -1, 0, 1, 1, -1, 0, 0, 1, -1, 1, 1, -1, -1, 1, 0, 0, 1});
    l.act = {ActKind::bn_relu, {1.0, 0.5, 2.0}, {0.5, 1.0, 3.0}};
    l.act_bsl = 8;
    l.alpha_act = 0.5;
    m.layers = {l};
    validate(m);
    const Tensor zero{m.input.shape, 4, 1.0, std::vector<std::int64_t>(6, 0)};
    const auto r = run_sc(m, zero);
    CHECK(r.output.data == std::vector<std::int64_t>(3, 0));
    CHECK(run_oracle(m, zero) == r.output);
  }

  TEST_CASE("identity layer passes the input through") {
    ModelGraph m;
    m.name = "id";
    m.input = {{1, 1, 5}, 8, 0.25};
    auto l = dense("fc", 5, 5, identity_weights(5));
    l.act_bsl = 8;
    l.alpha_act = 0.25;
    m.layers = {l};
    validate(m);
    const Tensor in{m.input.shape, 8, 0.25, {-4, -1, 0, 3, 4}};
    CHECK(run_oracle(m, in).data == in.data);
    CHECK(run_sc(m, in).output.data == in.data);
  }

  TEST_CASE("hand-computed 3x3 convolution") {
    ModelGraph m;
    m.name = "conv";
    m.input = {{4, 4, 1}, 2, 1.0};
    LayerSpec l;
    l.id = "conv";
    l.kind = LayerKind::conv2d;
    l.in_shape = {4, 4, 1};
    l.out_shape = {2, 2, 1};
    l.kernel_h = l.kernel_w = 3;
    l.weights = {1, 1, 1, 1, -1, 1, 1, 1, 1};
    l.act_bsl = 32;
    m.layers = {l};
    validate(m);
    const Tensor img{{4, 4, 1}, 2, 1.0, {1, 0, -1, 1, 0, 1, 1, 0, -1, 1, 0, 0, 1, -1, 1, 1}};
    const std::vector<std::int64_t> expected{0, 1, 1, 4};
    CHECK(run_oracle(m, img).data == expected);
    CHECK(run_sc(m, img).output.data == expected);
  }

  TEST_CASE("padding and stride") {
    ModelGraph m;
    m.name = "conv";
    m.input = {{5, 5, 2}, 4, 1.0};
    LayerSpec l;
    l.id = "conv";
    l.kind = LayerKind::conv2d;
    l.in_shape = {5, 5, 2};
    l.out_shape = {3, 3, 3};
    l.kernel_h = l.kernel_w = 3;
    l.stride = 2;
    l.pad = 1;
    std::mt19937_64 rng(5);
    for (int i = 0; i < 3 * 9 * 2; ++i) l.weights.push_back(static_cast<int>(rng() % 3) - 1);
    l.act = {ActKind::clip, {0.5, 1.0, 0.75}, {-1.0, 0.0, 2.0}};
    l.act_bsl = 8;
    l.alpha_act = 1.0;
    m.layers = {l};
    validate(m);
    for (int t = 0; t < 50; ++t) {
      const Tensor in = random_input(m, rng);
      REQUIRE(run_sc(m, in).output == run_oracle(m, in));
    }
    m.layers[0].out_shape = {2, 2, 3};
    CHECK_THROWS_AS(validate(m), SizeError);
  }

  TEST_CASE("average pooling rounds toward positive infinity") {
    ModelGraph m;
    m.name = "pool";
    m.input = {{2, 2, 1}, 4, 1.0};
    LayerSpec p;
    p.id = "pool";
    p.kind = LayerKind::avgpool;
    p.in_shape = {2, 2, 1};
    p.out_shape = {1, 1, 1};
    p.kernel_h = p.kernel_w = p.stride = 2;
    m.layers = {p};
    validate(m);
    CHECK(m.output_bsl() == 16);
    const auto check = [&](std::vector<std::int64_t> v, std::int64_t expected) {
      const Tensor in{{2, 2, 1}, 4, 1.0, v};
      CHECK(run_oracle(m, in).data[0] == expected);
      CHECK(run_sc(m, in).output.data[0] == expected);
    };
    check({-1, -1, -1, 0}, 0);
    check({-2, -2, -1, 0}, -1);
    check({1, 0, 0, 0}, 1);
    check({2, 2, 2, 2}, 2);
    check({-2, -2, -2, -2}, -2);

    m.layers[0].kernel_h = m.layers[0].kernel_w = m.layers[0].stride = 3;
    CHECK_THROWS_AS(validate(m), ValidationError);
  }

  TEST_CASE("residual path carries 17 levels") {
    ModelGraph m;
    m.name = "res";
    m.input = {{1, 1, 1}, 16, 1.0};
    auto a = dense("a", 1, 1, {1});
    a.act_bsl = 16;
    auto b = dense("b", 1, 1, {0});
    b.act_bsl = 16;
    b.residual_from = "a";
    b.residual_bsl = 16;
    b.rescale_log2 = 0;
    m.layers = {a, b};
    validate(m);
    std::set<std::int64_t> sc, ref;
    for (std::int64_t q = -8; q <= 8; ++q) {
      const Tensor in{{1, 1, 1}, 16, 1.0, {q}};
      sc.insert(run_sc(m, in).output.data[0]);
      ref.insert(run_oracle(m, in).data[0]);
    }
    CHECK(sc.size() == 17);
    CHECK(sc == ref);
  }

  TEST_CASE("residual division rounds like the divider") {
    ModelGraph m;
    m.name = "res";
    m.input = {{1, 1, 1}, 16, 1.0};
    auto a = dense("a", 1, 1, {1});
    a.act_bsl = 16;
    a.alpha_act = 1.0;
    auto b = dense("b", 1, 1, {0});
    b.alpha_w = 2.0;
    b.act_bsl = 16;
    b.alpha_act = 2.0;
    b.residual_from = "a";
    b.residual_bsl = 16;
    b.rescale_log2 = -1;
    m.layers = {a, b};
    validate(m);
    for (std::int64_t q = -8; q <= 8; ++q) {
      const Tensor in{{1, 1, 1}, 16, 1.0, {q}};
      const std::int64_t expected = q >= 0 ? (q + 1) / 2 : -((-q) / 2);
      CAPTURE(q);
      CHECK(run_oracle(m, in).data[0] == expected);
      CHECK(run_sc(m, in).output.data[0] == expected);
    }
  }

  TEST_CASE("approximate config covering the observed sums is exact") {
    const auto m = fixture("tiny-mlp");
    std::mt19937_64 rng(3);
    std::vector<Tensor> inputs;
    std::int64_t max_fc1 = 0, max_fc2 = 0;
    for (int t = 0; t < 200; ++t) {
      inputs.push_back(random_input(m, rng));
      const auto r = run_sc(m, inputs.back());
      for (auto q : r.trace[0].accum_q) max_fc1 = std::max(max_fc1, std::abs(q));
      for (auto q : r.trace[1].accum_q) max_fc2 = std::max(max_fc2, std::abs(q));
    }
    RunConfig cfg;
    cfg.datapath.mode = cost::Mode::approx;
    cfg.datapath.approx.emplace(32, approx::ApproxConfig::clip(32, static_cast<std::size_t>(16 - max_fc1)));
    cfg.datapath.approx.emplace(16, approx::ApproxConfig::clip(16, static_cast<std::size_t>(8 - max_fc2)));
    for (const auto& in : inputs) REQUIRE(run_sc(m, in, cfg).output == run_oracle(m, in));
  }

  TEST_CASE("clipping one layer leaves the others untouched") {
    const auto m = fixture("tiny-mlp");
    RunConfig cfg;
    cfg.datapath.mode = cost::Mode::approx;
    cfg.datapath.approx.emplace(32, approx::ApproxConfig::exact(32));
    cfg.datapath.approx.emplace(16, approx::ApproxConfig::clip(16, 6));
    std::mt19937_64 rng(4);
    std::size_t differing = 0;
    for (int t = 0; t < 200; ++t) {
      const Tensor in = random_input(m, rng);
      const auto exact = run_sc(m, in);
      const auto approx = run_sc(m, in, cfg);
      REQUIRE(exact.trace[0].accum_q == approx.trace[0].accum_q);
      bool clipped = false;
      for (std::size_t k = 0; k < exact.trace[1].accum_q.size(); ++k) {
        const auto q = exact.trace[1].accum_q[k];
        CHECK(approx.trace[1].accum_q[k] == std::clamp<std::int64_t>(q, -2, 2));
        clipped |= std::abs(q) > 2;
      }
      if (!clipped) CHECK(approx.output == exact.output);
      differing += approx.output != exact.output;
    }
    CHECK(differing > 0);
  }

  TEST_CASE("missing approximate width is named") {
    const auto m = fixture("tiny-mlp");
    RunConfig cfg;
    cfg.datapath.mode = cost::Mode::approx;
    cfg.datapath.approx.emplace(32, approx::ApproxConfig::exact(32));
    const Tensor in{m.input.shape, 2, 1.0, std::vector<std::int64_t>(16, 1)};
    try {
      run_sc(m, in, cfg);
      FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
      CHECK(std::string(e.what()).find("16") != std::string::npos);
    }
  }

  TEST_CASE("temporal datapath with a wide partial is exact") {
    const auto m = fixture("tiny-cnn");
    RunConfig cfg;
    cfg.datapath.mode = cost::Mode::temporal;
    cfg.datapath.temporal.emplace(18, single_cycle(18));
    cfg.datapath.temporal.emplace(128, single_cycle(128));
    cfg.datapath.temporal.emplace(576, cost::TemporalPlan{approx::schedule_for(576, 160, 64),
                                                          approx::ApproxConfig::clip(160, 48)});
    std::mt19937_64 rng(8);
    for (int t = 0; t < 30; ++t) {
      const Tensor in = random_input(m, rng);
      REQUIRE(run_sc(m, in, cfg).output == run_oracle(m, in));
    }
  }

  TEST_CASE("output BSL overrides") {
    const auto m = fixture("tiny-mlp");
    RunConfig cfg;
    cfg.act_bsl_overrides["fc1"] = 4;
    const auto o = apply_overrides(m, cfg);
    CHECK(o.layers[0].act_bsl == 4);
    CHECK(o.layers[1].in_bsl == 4);
    CHECK(o.layers[1].accumulation_width() == 32);
    std::mt19937_64 rng(12);
    for (int t = 0; t < 50; ++t) {
      const Tensor in = random_input(o, rng);
      REQUIRE(run_sc(o, in).output == run_oracle(o, in));
    }
    cfg.act_bsl_overrides["nope"] = 4;
    CHECK_THROWS_AS(apply_overrides(m, cfg), ConfigError);
  }

  TEST_CASE("faults") {
    const auto m = fixture("tiny-mlp");
    std::mt19937_64 rng(21);
    const Tensor in = random_input(m, rng);
    RunConfig cfg;
    cfg.fault = arith::FaultConfig{0.0, 5};
    CHECK(run_sc(m, in, cfg).output == run_oracle(m, in));
    CHECK(run_oracle_binary_faults(m, in, {0.0, 5}) == run_oracle(m, in));

    cfg.fault = arith::FaultConfig{0.2, 5};
    const auto a = run_sc(m, in, cfg).output;
    CHECK(run_sc(m, in, cfg).output == a);
    const auto b = run_oracle_binary_faults(m, in, {0.2, 5});
    CHECK(run_oracle_binary_faults(m, in, {0.2, 5}) == b);

    CHECK(binary_width(2) == 2);
    CHECK(binary_width(4) == 2);
    CHECK(binary_width(16) == 4);
  }

  TEST_CASE("fault sweep") {
    const auto m = fixture("tiny-mlp");
    const auto d = io::load_dataset(kFixtures + "/tiny-mlp/dataset.json", m);
    CHECK(d.samples.size() == 256);
    CHECK(accuracy(m, d) == 1.0);

    const auto rows = evaluate_fault_tolerance(m, d, {0.0, 1e-2}, 2, 40);
    REQUIRE(rows.size() == 4);
    CHECK(rows[0].accuracy_loss_sc == 0.0);
    CHECK(rows[0].accuracy_loss_binary == 0.0);
    CHECK(rows[1].seed == 41);
    CHECK(rows[2].ber == 1e-2);
    CHECK(rows[2].accuracy_loss_sc > 0.0);

    const auto threaded = evaluate_fault_tolerance(m, d, {0.0, 1e-2}, 2, 40, 4);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      CHECK(threaded[i].accuracy_loss_sc == rows[i].accuracy_loss_sc);
      CHECK(threaded[i].accuracy_loss_binary == rows[i].accuracy_loss_binary);
    }
  }

  TEST_CASE("layer costs") {
    const auto m = fixture("tiny-cnn");
    const auto costs = cost_model(m, {});
    REQUIRE(costs.size() == 3);
    const auto s = layer_shape(m.layers[1]);
    CHECK(s.fan_in == 36);
    CHECK(s.residual_bsl == 16);
    CHECK(s.rescale_log2 == -1);
    double prev = 0.0;
    for (std::size_t bsl : {2u, 4u, 8u}) {
      const double adp = cost::cost_total(cost_model(m, {}, bsl)).adp;
      CHECK(adp > prev);
      prev = adp;
    }
  }
}

TEST_SUITE("io") {
  TEST_CASE("model round trip") {
    for (const std::string name : {"tiny-mlp", "tiny-cnn"}) {
      const auto m = fixture(name);
      const auto again = io::parse_model(io::model_to_json(m));
      CHECK(io::model_to_json(again) == io::model_to_json(m));
    }
  }

  TEST_CASE("tensor round trip") {
    const Tensor t{{2, 1, 3}, 8, 0.125, {-4, 0, 1, 2, 3, 4}};
    CHECK(io::parse_tensor(io::tensor_to_json(t)) == t);
    auto j = io::tensor_to_json(t);
    j.erase("bsl");
    CHECK(io::parse_tensor(j).bsl == 0);
    j["data"].push_back(1);
    CHECK_THROWS_AS(io::parse_tensor(j), SizeError);
  }

  TEST_CASE("taps round trip") {
    const auto t = si::compute_taps(si::bn_relu({1.0, 0.0}), 8, 8, 1.0, 1.0);
    CHECK(io::parse_taps(io::taps_to_json(t)) == t);
  }

  TEST_CASE("run config") {
    const auto j = io::parse_json(R"({
      "format_version": 1,
      "mode": "approx",
      "gate_costs": {"multiplier_gates": 6},
      "approx": {"4608": [[36, 128, 32, 2], [1, 1152, 512, 1]]},
      "temporal": {"4608": {"bsn_width": 576, "partial_bsl": 64, "cycles": 9}},
      "fault": {"ber": 0.001, "seed": 3},
      "act_bsl_overrides": {"fc1": 4}
    })", "config");
    const auto cfg = io::parse_run_config(j);
    CHECK(cfg.datapath.mode == cost::Mode::approx);
    CHECK(cfg.datapath.gates.multiplier_gates == 6);
    CHECK(cfg.datapath.approx.at(4608).stages().size() == 2);
    CHECK(cfg.datapath.temporal.at(4608).inner.output_width() == 64);
    CHECK(cfg.fault->seed == 3);
    CHECK(cfg.act_bsl_overrides.at("fc1") == 4);

    CHECK_THROWS_AS(io::parse_run_config(io::parse_json(R"({"approx": {"100": [[1, 64, 0, 1]]}})", "c")),
                    ConfigError);
    CHECK_THROWS_AS(io::parse_run_config(io::parse_json(R"({"approx": {"x": []}})", "c")), ParseError);
    CHECK_THROWS_AS(io::parse_run_config(io::parse_json(R"({"mode": "fast"})", "c")), ConfigError);
  }
}
