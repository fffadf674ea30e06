// Regenerates the bundled fixtures under a directory (default: fixtures/).
// Weights come from a fixed seed; goldens and dataset labels come from the
// integer reference, so re-running this on an unchanged tree is a no-op.

#include <filesystem>
#include <iostream>
#include <random>

#include "scsim/io.hpp"
#include "scsim/netsim.hpp"

using namespace scsim;
namespace fs = std::filesystem;

namespace {

std::vector<int> ternary_weights(std::size_t n, std::mt19937_64& rng) {
  std::vector<int> w(n);
  for (auto& x : w) x = static_cast<int>(rng() % 3) - 1;
  return w;
}

std::vector<double> spread(std::size_t n, double lo, double hi, std::mt19937_64& rng) {
  std::vector<double> v(n);
  // Quarter steps keep the values exact in text form.
  const auto steps = static_cast<std::uint64_t>((hi - lo) * 4.0);
  for (auto& x : v) x = lo + 0.25 * static_cast<double>(rng() % (steps + 1));
  return v;
}

net::LayerSpec weighted(const std::string& id, net::LayerKind kind, net::Shape in, net::Shape out,
                        std::size_t k, std::mt19937_64& rng) {
  net::LayerSpec l;
  l.id = id;
  l.kind = kind;
  l.in_shape = in;
  l.out_shape = out;
  l.kernel_h = l.kernel_w = k;
  l.pad = k / 2;
  l.weights = ternary_weights(out.c * k * k * in.c, rng);
  return l;
}

net::ModelGraph tiny_mlp() {
  std::mt19937_64 rng(1001);
  net::ModelGraph m;
  m.name = "tiny-mlp";
  m.input = {{1, 1, 16}, 2, 1.0};

  auto fc1 = weighted("fc1", net::LayerKind::dense, {1, 1, 16}, {1, 1, 8}, 1, rng);
  fc1.act = {net::ActKind::bn_relu, spread(8, 0.5, 1.0, rng), spread(8, -1.0, 1.0, rng)};
  fc1.act_bsl = 2;
  fc1.alpha_act = 1.0;

  auto fc2 = weighted("fc2", net::LayerKind::dense, {1, 1, 8}, {1, 1, 4}, 1, rng);
  fc2.act.kind = net::ActKind::identity;
  fc2.act_bsl = 16;
  fc2.alpha_act = 1.0;

  m.layers = {fc1, fc2};
  net::validate(m);
  return m;
}

net::ModelGraph tiny_cnn() {
  std::mt19937_64 rng(2042);
  net::ModelGraph m;
  m.name = "tiny-cnn";
  m.input = {{4, 4, 1}, 2, 1.0};

  auto conv1 = weighted("conv1", net::LayerKind::conv2d, {4, 4, 1}, {4, 4, 4}, 3, rng);
  conv1.act = {net::ActKind::bn_relu, spread(4, 0.5, 1.0, rng), spread(4, -1.0, 0.5, rng)};
  conv1.act_bsl = 16;
  conv1.alpha_act = 0.5;

  auto conv2 = weighted("conv2", net::LayerKind::conv2d, {4, 4, 4}, {4, 4, 4}, 3, rng);
  conv2.alpha_w = 2.0;
  conv2.act = {net::ActKind::bn_relu, spread(4, 0.25, 0.5, rng), spread(4, 0.0, 2.0, rng)};
  conv2.act_bsl = 2;
  conv2.alpha_act = 1.0;
  conv2.residual_from = "conv1";
  conv2.residual_bsl = 16;
  conv2.rescale_log2 = -1;

  net::LayerSpec pool;
  pool.id = "pool";
  pool.kind = net::LayerKind::avgpool;
  pool.in_shape = {4, 4, 4};
  pool.out_shape = {2, 2, 4};
  pool.kernel_h = pool.kernel_w = pool.stride = 2;

  net::LayerSpec flat;
  flat.id = "flatten";
  flat.kind = net::LayerKind::flatten;
  flat.in_shape = {2, 2, 4};
  flat.out_shape = {1, 1, 16};

  auto fc = weighted("fc", net::LayerKind::dense, {1, 1, 16}, {1, 1, 4}, 1, rng);
  fc.act.kind = net::ActKind::identity;
  fc.act_bsl = 16;
  fc.alpha_act = 1.0;

  m.layers = {conv1, conv2, pool, flat, fc};
  net::validate(m);
  return m;
}

net::Tensor random_input(const net::ModelGraph& m, std::mt19937_64& rng) {
  net::Tensor t{m.input.shape, m.input.bsl, m.input.alpha, {}};
  const auto levels = m.input.bsl + 1;
  for (std::size_t i = 0; i < t.shape.size(); ++i) {
    t.data.push_back(static_cast<std::int64_t>(rng() % levels) - static_cast<std::int64_t>(m.input.bsl / 2));
  }
  return t;
}

std::string pretty(const io::json& j) { return j.dump(1) + "\n"; }
std::string compact(const io::json& j) { return j.dump() + "\n"; }

void write_fixture(const fs::path& root, const net::ModelGraph& m, std::uint64_t seed) {
  const fs::path dir = root / m.name;
  fs::create_directories(dir);
  io::write_file(dir / "model.json", pretty(io::model_to_json(m)));

  std::mt19937_64 rng(seed);
  io::json inputs = io::json::array(), goldens = io::json::array();
  for (int i = 0; i < 32; ++i) {
    const net::Tensor in = random_input(m, rng);
    const net::Tensor out = net::run_oracle(m, in);
    inputs.push_back(io::tensor_to_json(in));
    goldens.push_back(io::tensor_to_json(out));
    if (i == 0) {
      io::write_file(dir / "input_0.json", pretty(io::tensor_to_json(in)));
      io::write_file(dir / "golden_0.json", pretty(io::tensor_to_json(out)));
    }
  }
  io::write_file(dir / "vectors.json",
                 compact({{"format_version", io::kFormatVersion}, {"model", m.name},
                         {"inputs", inputs}, {"goldens", goldens}}));

  net::Dataset d{m.name, {}};
  for (int i = 0; i < 256; ++i) {
    net::Sample s{random_input(m, rng), 0};
    s.label = net::argmax(net::run_oracle(m, s.input));
    d.samples.push_back(std::move(s));
  }
  io::write_file(dir / "dataset.json", compact(io::dataset_to_json(d)));
  std::cout << "wrote " << dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  const fs::path root = argc > 1 ? fs::path(argv[1]) : fs::path("fixtures");
  try {
    write_fixture(root, tiny_mlp(), 11);
    write_fixture(root, tiny_cnn(), 22);
  } catch (const std::exception& e) {
    std::cerr << "make_fixtures: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
