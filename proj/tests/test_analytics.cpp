#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "hbba/analytics.hpp"
#include "hbba/simulator.hpp"
#include "oracle.hpp"

using namespace hbba;

namespace {

Dyadic frac(std::int64_t n, unsigned e) { return Dyadic(BigInt(n), e); }

Pmf weights(std::map<std::int64_t, BigInt> w, unsigned e) { return Pmf::from_weights(w, e); }

} // namespace

TEST_CASE("slice_pmf") {
  CHECK(slice_pmf(Pmf::uniform_bits(4), 1, 2) == Pmf::uniform_bits(2));
  CHECK(slice_pmf(Pmf::point(5), 0, 1) == Pmf::point(1));
  auto tri = sum_pmf(3);
  CHECK(slice_pmf(Pmf::uniform_bits(6), 0, 5) == Pmf::uniform_bits(6));
  // Marginal of a non-uniform input, by direct summation.
  std::map<std::int64_t, BigInt> expect;
  for (const auto& e : tri.entries())
    expect[(e.value >> 2) & 1] += e.weight;
  CHECK(slice_pmf(tri, 2, 2) == Pmf::from_weights(expect, tri.exp()));
  CHECK_THROWS(slice_pmf(tri, 3, 2));
}

TEST_CASE("sum_pmf") {
  CHECK(sum_pmf(1) == weights({{0, 1}, {1, 2}, {2, 1}}, 2));
  CHECK(sum_pmf(0) == Pmf::point(0));
  CHECK(sum_pmf(2).prob(3) == frac(1, 2));
  CHECK(sum_pmf(2).prob(3) == frac(4, 4));
  for (unsigned n = 0; n <= 6; ++n) {
    std::map<std::int64_t, BigInt> counts;
    for (int x = 0; x < (1 << n); ++x)
      for (int y = 0; y < (1 << n); ++y)
        counts[x + y] += 1;
    CHECK(sum_pmf(n) == Pmf::from_weights(counts, 2 * n));
    CHECK(sum_pmf(Pmf::uniform_bits(n), Pmf::uniform_bits(n)) == sum_pmf(n));
  }
}

TEST_CASE("or_error_pmf") {
  CHECK(or_error_pmf(2) == weights({{0, 9}, {1, 3}, {2, 3}, {3, 1}}, 4));
  CHECK(or_error_pmf(0) == Pmf::point(0));
  CHECK(or_error_pmf(1) == weights({{0, 3}, {1, 1}}, 2));
  for (unsigned l = 0; l <= 6; ++l) {
    std::map<std::int64_t, BigInt> counts;
    for (int x = 0; x < (1 << l); ++x)
      for (int y = 0; y < (1 << l); ++y)
        counts[(x + y) - (x | y)] += 1;
    CHECK(or_error_pmf(l) == Pmf::from_weights(counts, 2 * l));
  }
}

TEST_CASE("generate and propagate probabilities") {
  CHECK(generate_prob(2) == frac(3, 3));
  CHECK(generate_prob(0).is_zero());
  CHECK(generate_prob(3) == frac(7, 4));
  for (unsigned m = 0; m <= 8; ++m) {
    std::int64_t hits = 0;
    for (int x = 0; x < (1 << m); ++x)
      for (int y = 0; y < (1 << m); ++y)
        hits += x + y >= (1 << m);
    CHECK(generate_prob(m) == frac(hits, 2 * m));
    CHECK(generate_prob(sum_pmf(m), m) == generate_prob(m));
  }
  CHECK(propagate_prob(2) == frac(1, 2));
  CHECK(propagate_prob(0) == Dyadic::one());
  CHECK(propagate_prob(1) == frac(1, 1));
  CHECK(propagate_prob(sum_pmf(3), 3) == frac(1, 3));
}

TEST_CASE("trunc_miss_prob") {
  CHECK(trunc_miss_prob(2, 0) == frac(3, 3));
  CHECK(trunc_miss_prob(2, 2).is_zero());
  CHECK(trunc_miss_prob(2, 1) == frac(1, 3));
  CHECK(trunc_miss_prob(5, 0) == generate_prob(5));
  CHECK_THROWS_AS(trunc_miss_prob(2, 3), std::invalid_argument);
}

TEST_CASE("block_error_pmf examples") {
  CHECK(block_error_pmf(BlockSpec::approximate(4, 2, 1)) ==
        weights({{0, 252}, {1, 84}, {2, 84}, {3, 28}, {16, 36}, {17, 12}, {18, 12}, {19, 4}}, 9));
  CHECK(block_error_pmf(BlockSpec::approximate(4, 2, 2)) == weights({{0, 9}, {1, 3}, {2, 3}, {3, 1}}, 4));
  CHECK(block_error_pmf(BlockSpec::approximate(4, 2, 3)) ==
        weights({{-14, 3}, {-13, 1}, {0, 36}, {1, 12}, {2, 9}, {3, 3}}, 6));
  CHECK(block_error_pmf(BlockSpec::accurate(4)) == Pmf::point(0));
  CHECK_THROWS_AS(block_error_pmf(BlockSpec::approximate(14, 2, 13)), BudgetError);
  CHECK_NOTHROW(block_error_pmf(BlockSpec::approximate(20, 4, 8)));
}

TEST_CASE("block_error_pmf equals the reference enumeration") {
  for (unsigned h : {1u, 2u, 3u, 4u, 5u, 6u, 8u})
    for (unsigned l = 0; l <= h; ++l)
      for (unsigned s = 0; s <= h; ++s)
        CHECK_MESSAGE(oracle::pmf_matches(block_error_pmf(BlockSpec::approximate(h, l, s)),
                                          oracle::block_error_counts({h, l, s, true}), 2 * h),
                      "H=" << h << " L=" << l << " S=" << s);
}

TEST_CASE("block_error_rate") {
  CHECK(block_error_rate(BlockSpec::approximate(4, 2, 0)) == frac(83, 7));
  CHECK(block_error_rate(BlockSpec::approximate(4, 2, 2)) == frac(7, 4));
  CHECK(block_error_rate(BlockSpec::approximate(4, 1, 3)) == frac(1, 2));
  for (unsigned h = 1; h <= 8; ++h)
    for (unsigned l = 0; l <= h; ++l)
      for (unsigned s = 0; s <= h; ++s) {
        auto spec = BlockSpec::approximate(h, l, s);
        auto counts = oracle::block_error_counts({h, l, s, true});
        std::int64_t ok = counts.count(0) ? static_cast<std::int64_t>(counts[0]) : 0;
        CHECK(block_error_rate(spec) == Dyadic::one() - frac(ok, 2 * h));
      }
}

TEST_CASE("adder_error_pmf and metrics") {
  auto exact = adder_error_pmf(AdderConfig::exact(16, 4));
  CHECK(exact == Pmf::point(0));
  auto m = metrics_from_pmf(adder_error_pmf(parse_config("HBBA{[2,2],[0,0]}", 16, 4)), 16);
  CHECK(m.med == frac(459, 2));
  auto m2 = metrics_from_pmf(adder_error_pmf(parse_config("HBBA{[2,1],[0,3]}", 16, 4)), 16);
  CHECK(m2.med == frac(43, 2));
  auto m3 = metrics_from_pmf(adder_error_pmf(parse_config("HBBA{[2,2],[0,2]}", 16, 4)), 16);
  CHECK(m3.med == frac(75, 2));
  CHECK(m3.error_rate.to_double() == doctest::Approx(0.802246094).epsilon(1e-9));
}

TEST_CASE("adder_error_pmf equals brute force inside the exactness condition") {
  for (const char* text : {"HBBA{[2,2],[0,3]}", "HBBA{[1,3],[0,4]}", "HBBA{[4],[2]}", "HBBA{[3,0],[0,1]}"}) {
    auto cfg = parse_config(text, 8, 4);
    REQUIRE(cfg.carry_isolated());
    auto counts = oracle::adder_error_counts(8, oracle::blocks(8, 4, cfg.or_vector(), cfg.chain_vector()));
    CHECK_MESSAGE(oracle::pmf_matches(adder_error_pmf(cfg), counts, 16), text);
  }
}

TEST_CASE("adder_error_rate") {
  CHECK(adder_error_rate(parse_config("HBBA{[2,2],[0,0]}", 16, 4)) == frac(14359, 14));
  CHECK(adder_error_rate(parse_config("HBBA{[2,1],[0,3]}", 16, 4)) == frac(377, 9));
  CHECK(adder_error_rate(parse_config("HBBA{[1,1],[0,3]}", 16, 4)).to_double() == 0.68359375);
  CHECK(adder_error_rate(AdderConfig::exact(8, 4)).is_zero());
}

TEST_CASE("inclusion-exclusion equals the product form") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    std::size_t k = 1 + trial % 8;
    std::vector<DyadicProb> rates;
    for (std::size_t i = 0; i < k; ++i) {
      unsigned e = 1 + static_cast<unsigned>(rng() % 12);
      rates.push_back(frac(static_cast<std::int64_t>(rng() % ((1u << e) + 1)), e));
    }
    // Independent oracle: complement of the product of complements.
    Dyadic none = Dyadic::one();
    for (const auto& r : rates)
      none = none * (Dyadic::one() - r);
    CHECK(union_rate_product(rates) == Dyadic::one() - none);
    CHECK(union_rate_inclusion_exclusion(rates) == Dyadic::one() - none);
  }
  CHECK(union_rate_product({}).is_zero());
}

TEST_CASE("metrics_from_pmf") {
  auto z = metrics_from_pmf(Pmf::point(0), 8);
  CHECK(z.med.is_zero());
  CHECK(z.error_rate.is_zero());
  CHECK(z.max_ed == 0);
  auto eq25 = metrics_from_pmf(block_error_pmf(BlockSpec::approximate(4, 2, 1)), 4);
  // Direct summation of the eight impulses.
  CHECK(eq25.med == frac(84 * 1 + 84 * 2 + 28 * 3 + 36 * 16 + 12 * 17 + 12 * 18 + 4 * 19, 9));
  CHECK(eq25.med == frac(11, 2));
  CHECK(eq25.error_rate == frac(260, 9));
  CHECK(eq25.max_ed == 19);
  auto neg = metrics_from_pmf(weights({{-3, 1}, {2, 1}}, 1), 4);
  CHECK(neg.med == frac(5, 1));
  CHECK(neg.mse == frac(13, 1));
  CHECK(neg.max_ed == 3);
  CHECK(neg.nmed == doctest::Approx(2.5 / 30.0));
  CHECK(nmed_divisor(16) == 131070.0);
}

TEST_CASE("MED is non-increasing in S while H-S >= L") {
  for (unsigned h = 1; h <= 8; ++h)
    for (unsigned l = 0; l <= h; ++l) {
      Dyadic prev;
      bool first = true;
      for (unsigned s = 0; h - s >= l && s <= h; ++s) {
        auto med = metrics_from_pmf(block_error_pmf(BlockSpec::approximate(h, l, s)), h).med;
        if (!first)
          CHECK(med <= prev);
        prev = med;
        first = false;
      }
    }
}

TEST_CASE("metrics reject a non-normalized distribution") {
  auto half = Pmf::from_sorted({{0, BigInt(1)}}, 1);
  CHECK_THROWS_AS(metrics_from_pmf(half, 8), std::logic_error);
}
