// Test-only reference computations. Nothing here calls into the code paths
// it is used to check.
#pragma once

#include <algorithm>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

inline std::vector<std::uint8_t> sorted_desc(std::vector<std::uint8_t> v) {
  std::sort(v.begin(), v.end(), std::greater<>{});
  return v;
}

inline std::int64_t count_ones(const std::vector<std::uint8_t>& v) {
  std::int64_t n = 0;
  for (auto b : v) n += b;
  return n;
}

inline std::vector<std::uint8_t> random_bits(std::size_t n, std::mt19937_64& rng) {
  std::vector<std::uint8_t> v(n);
  for (auto& b : v) b = static_cast<std::uint8_t>(rng() & 1u);
  return v;
}

/// Integer ceil(a / 2^n) computed by floating-point-free division.
inline std::int64_t ceil_div_pow2(std::int64_t a, int n) {
  const std::int64_t d = std::int64_t{1} << n;
  std::int64_t q = a / d;
  if (a % d != 0 && a > 0) ++q;
  return q;
}

/// i.i.d. ternary draws with P(+1) = P(-1) = p.
inline std::vector<int> ternary_draws(std::size_t count, double p, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<int> v(count);
  for (auto& x : v) {
    const double r = u(rng);
    x = r < p ? 1 : (r < 2 * p ? -1 : 0);
  }
  return v;
}

/// 2-bit thermometer pairs for a list of ternary values.
inline std::vector<std::uint8_t> pairs_of(const std::vector<int>& values) {
  std::vector<std::uint8_t> bits;
  bits.reserve(values.size() * 2);
  for (int v : values) {
    bits.push_back(v >= 0);
    bits.push_back(v > 0);
  }
  return bits;
}

}  // namespace oracle
