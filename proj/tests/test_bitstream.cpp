#include <random>

#include "doctest.h"
#include "oracles.hpp"
#include "scsim/bitstream.hpp"
#include "scsim/errors.hpp"

using namespace scsim;

namespace {
std::string digits(const Bitstream& b) {
  const auto lit = to_literal(b);
  return lit.substr(0, lit.find('@'));
}
}  // namespace

TEST_SUITE("bitstream") {
  TEST_CASE("thermometer codes for BSL 2 and 4") {
    CHECK(digits(encode(+1, 2)) == "11");
    CHECK(digits(encode(0, 2)) == "10");
    CHECK(digits(encode(-1, 2)) == "00");
    CHECK(digits(encode(-2, 4)) == "0000");
    CHECK(digits(encode(-1, 4)) == "1000");
    CHECK(digits(encode(0, 4)) == "1100");
    CHECK(digits(encode(1, 4)) == "1110");
    CHECK(digits(encode(2, 4)) == "1111");
  }

  TEST_CASE("minimum of range is the all-zero stream") {
    for (std::size_t L = 2; L <= 64; L += 2) {
      const auto b = encode(-static_cast<std::int64_t>(L / 2), L);
      CHECK(b.popcount() == 0);
    }
  }

  TEST_CASE("decode") {
    CHECK(decode(parse_literal("1110@1")) == QuantizedValue{1, 1.0});
    CHECK(decode(parse_literal("0101")).q == 0);
    CHECK(decode(parse_literal("1100")).q == 0);
  }

  TEST_CASE("round trip and range rejection for every even L up to 64") {
    for (std::size_t L = 2; L <= 64; L += 2) {
      const auto half = static_cast<std::int64_t>(L / 2);
      for (std::int64_t q = -half - 3; q <= half + 3; ++q) {
        if (q < -half || q > half) {
          CHECK_THROWS_AS(encode(q, L, 0.5), RangeError);
          continue;
        }
        const auto b = encode(q, L, 0.5);
        CHECK(b.canonical());
        CHECK(b.popcount() == static_cast<std::size_t>(q + half));
        CHECK(decode(b) == QuantizedValue{q, 0.5});
      }
    }
  }

  TEST_CASE("configuration errors") {
    CHECK_THROWS_AS(encode(0, 3), ConfigError);
    CHECK_THROWS_AS(encode(0, 0), ConfigError);
    CHECK_THROWS_AS(Bitstream({1, 0, 1}, 1.0), ConfigError);
    CHECK_THROWS_AS(Bitstream({1, 2}, 1.0), EncodingError);
    CHECK_THROWS_AS(Bitstream({1, 0}, 0.0), ScaleError);
  }

  TEST_CASE("canonicalize") {
    CHECK(digits(canonicalize(parse_literal("0101"))) == "1100");
    const auto c = parse_literal("1100@0.25");
    CHECK(canonicalize(c) == c);
    CHECK(canonicalize(c).alpha() == 0.25);
  }

  TEST_CASE("canonicalize matches a popcount prefix on random streams") {
    std::mt19937_64 rng(7);
    for (int t = 0; t < 200; ++t) {
      const auto bits = oracle::random_bits(64, rng);
      const auto ones = oracle::count_ones(bits);
      const auto c = canonicalize(Bitstream(bits, 1.0));
      CHECK(c.canonical());
      for (std::size_t i = 0; i < 64; ++i) CHECK(c[i] == (static_cast<std::int64_t>(i) < ones));
    }
  }

  TEST_CASE("decode is invariant under permutation") {
    std::mt19937_64 rng(11);
    for (int t = 0; t < 100; ++t) {
      auto bits = oracle::random_bits(32, rng);
      const auto q = decode(Bitstream(bits, 1.0)).q;
      std::shuffle(bits.begin(), bits.end(), rng);
      CHECK(decode(Bitstream(bits, 1.0)).q == q);
      CHECK(decode(canonicalize(Bitstream(bits, 1.0))).q == q);
    }
  }

  TEST_CASE("binary precision table") {
    CHECK(bsl_to_binary_precision(4) == 2);
    CHECK(bsl_to_binary_precision(8) == 3);
    CHECK(bsl_to_binary_precision(16) == 4);
    CHECK_FALSE(bsl_to_binary_precision(2).has_value());
    CHECK_THROWS_AS(bsl_to_binary_precision(12), ConfigError);
  }

  TEST_CASE("literal form") {
    const auto b = parse_literal("1100@0.5");
    CHECK(b.bsl() == 4);
    CHECK(b.alpha() == 0.5);
    CHECK(to_literal(b) == "1100@0.5");
    CHECK(to_literal(parse_literal("10")) == "10@1");
    CHECK_THROWS_AS(parse_literal("1x00@1"), ParseError);
    CHECK_THROWS_AS(parse_literal("1100@abc"), ParseError);
  }
}
