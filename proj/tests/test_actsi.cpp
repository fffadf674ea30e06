#include <cmath>

#include "doctest.h"
#include "scsim/actsi.hpp"
#include "scsim/errors.hpp"

using namespace scsim;
using namespace scsim::si;

namespace {

// Level reached by direct evaluation: largest output level not above f,
// saturated to [-L/2, L/2].
std::int64_t direct_level(double f_value, std::size_t out_bsl, double alpha_out) {
  const auto half = static_cast<std::int64_t>(out_bsl / 2);
  for (std::int64_t level = half; level > -half; --level) {
    if (f_value >= alpha_out * static_cast<double>(level)) return level;
  }
  return -half;
}

// Brute-force tap search straight from the definition.
std::vector<std::uint32_t> brute_taps(const StepFunction& f, std::size_t M, std::size_t L,
                                      double a_in, double a_out) {
  std::vector<std::uint32_t> taps;
  for (std::size_t j = 1; j <= L; ++j) {
    std::uint32_t tap = static_cast<std::uint32_t>(M + 1);
    for (std::size_t p = 0; p <= M; ++p) {
      const double u = a_in * (static_cast<double>(p) - static_cast<double>(M) / 2);
      if (f(u) >= a_out * (static_cast<double>(j) - static_cast<double>(L) / 2)) {
        tap = static_cast<std::uint32_t>(p);
        break;
      }
    }
    taps.push_back(tap);
  }
  return taps;
}

}  // namespace

TEST_SUITE("actsi") {
  TEST_CASE("fused BN-ReLU") {
    CHECK(fused_bn_relu(1, 0, 3.5) == 3.5);
    CHECK(fused_bn_relu(1, 0, -2) == 0.0);
    CHECK(fused_bn_relu(2, 1, 1) == 0.0);
    CHECK(fused_bn_relu(2, 1, 3) == 4.0);
    CHECK_THROWS_AS(fused_bn_relu(0, 0, 1), ConfigError);
    CHECK_THROWS_AS(fused_bn_relu(-1, 0, 1), ConfigError);
  }

  TEST_CASE("identity activation taps every position") {
    const auto t = compute_taps([](double u) { return u; }, 8, 8, 1.0, 1.0);
    CHECK(t.taps() == std::vector<std::uint32_t>{1, 2, 3, 4, 5, 6, 7, 8});
    const auto out = apply_taps(t, encode(1, 8));
    CHECK(out == encode(1, 8));
  }

  TEST_CASE("BN-ReLU taps at M = 8") {
    const auto f = bn_relu({1.0, 0.0});
    const auto t = compute_taps(f, 8, 8, 1.0, 1.0);
    CHECK(t.taps() == brute_taps(f, 8, 8, 1.0, 1.0));
    // Outputs 1..4 are on for every input since ReLU never drops below 0.
    CHECK(t.taps() == std::vector<std::uint32_t>{0, 0, 0, 0, 5, 6, 7, 8});
    for (std::size_t k = 0; k <= 8; ++k) {
      const auto out = apply_taps(t, encode(static_cast<std::int64_t>(k) - 4, 8));
      CHECK(decode(out).q == std::max<std::int64_t>(0, static_cast<std::int64_t>(k) - 4));
    }
  }

  TEST_CASE("two-step activation taps positions 3 and 6 of a 6-bit BSN") {
    const StepFunction step = [](double u) { return u < 0 ? -1.0 : (u < 3 ? 0.0 : 1.0); };
    const auto t = compute_taps(step, 6, 2, 1.0, 1.0);
    CHECK(t.taps() == std::vector<std::uint32_t>{3, 6});
    auto sorted = [](std::int64_t ones) { return encode(ones - 3, 6); };
    CHECK(to_literal(apply_taps(t, sorted(4))) == "10@1");
    CHECK(to_literal(apply_taps(t, sorted(6))) == "11@1");
    CHECK(to_literal(apply_taps(t, sorted(2))) == "00@1");
  }

  TEST_CASE("apply_taps errors") {
    const TapVector t({3, 6}, 6, 1.0);
    CHECK_THROWS_AS(apply_taps(t, encode(0, 8)), SizeError);
    CHECK_THROWS_AS(apply_taps(t, parse_literal("010101")), CanonicalError);
    CHECK_THROWS_AS(TapVector({6, 3}, 6, 1.0), ConfigError);
    CHECK_THROWS_AS(TapVector({3, 8}, 6, 1.0), ConfigError);
  }

  TEST_CASE("decreasing activation is rejected") {
    CHECK_THROWS_AS(compute_taps([](double u) { return -u; }, 8, 4, 1.0, 1.0), MonotonicityError);
  }

  TEST_CASE("SI output equals direct quantized evaluation for every popcount") {
    for (double gamma : {0.3, 0.75, 1.0, 3.0}) {
      for (double beta : {-2.5, 0.0, 1.7}) {
        for (double a_in : {0.1, 0.5}) {
          for (double a_out : {0.2, 1.0}) {
            const auto f = bn_relu({gamma, beta});
            const std::size_t M = 40;
            const std::size_t L = 8;
            const auto t = compute_taps(f, M, L, a_in, a_out);
            CHECK(t.taps() == brute_taps(f, M, L, a_in, a_out));
            for (std::size_t k = 0; k <= M; ++k) {
              const auto q_in = static_cast<std::int64_t>(k) - static_cast<std::int64_t>(M / 2);
              const auto out = apply_taps(t, encode(q_in, M, a_in));
              CHECK(out.canonical());
              CHECK(out.popcount() == t.output_popcount(k));
              CHECK(decode(out).q == direct_level(f(a_in * static_cast<double>(q_in)), L, a_out));
            }
          }
        }
      }
    }
  }

  TEST_CASE("shifting beta by whole input levels shifts the taps") {
    const std::size_t M = 64;
    const double a_in = 0.5;
    const auto base = compute_taps(bn_relu({1.0, 0.0}), M, 16, a_in, 1.0);
    for (int shift = -6; shift <= 6; ++shift) {
      const auto moved = compute_taps(bn_relu({1.0, shift * a_in}), M, 16, a_in, 1.0);
      for (std::size_t j = 0; j < 16; ++j) {
        if (base.taps()[j] == 0) {
          CHECK(moved.taps()[j] == 0);
          continue;
        }
        const auto expected = static_cast<std::int64_t>(base.taps()[j]) + shift;
        if (expected > static_cast<std::int64_t>(M)) {
          CHECK(moved.taps()[j] == M + 1);
        } else {
          CHECK(moved.taps()[j] == static_cast<std::uint32_t>(std::max<std::int64_t>(expected, 0)));
        }
      }
    }
  }

  TEST_CASE("shorter SI output keeps taps valid") {
    for (double beta : {-3.0, 0.0, 2.0}) {
      const auto f = bn_relu({0.5, beta});
      const auto wide = compute_taps(f, 64, 64, 0.25, 0.125);
      const auto narrow = compute_taps(f, 64, 16, 0.25, 0.5);
      CHECK(std::is_sorted(wide.taps().begin(), wide.taps().end()));
      CHECK(std::is_sorted(narrow.taps().begin(), narrow.taps().end()));
      for (std::size_t k = 0; k <= 64; ++k) {
        const double fv = f(0.25 * (static_cast<double>(k) - 32));
        const auto qn = static_cast<std::int64_t>(narrow.output_popcount(k)) - 8;
        CHECK(qn == direct_level(fv, 16, 0.5));
      }
    }
  }
}
