#pragma once

#include <cstdint>
#include <span>

#include "hbba/config.hpp"
#include "hbba/pmf.hpp"

namespace hbba {

// Exact analytic error model for uniformly distributed, independent operand
// bits. Every result is an exact dyadic value.

/// Marginal distribution of bits [low, high] of a value distributed as `in`.
/// Throws std::invalid_argument for an invalid bit range or negative values.
Pmf slice_pmf(const Pmf& in, unsigned low, unsigned high);

/// Distribution of X + Y for independent uniform n-bit X and Y (triangular).
Pmf sum_pmf(unsigned n);
/// Distribution of X + Y for independent X ~ x, Y ~ y.
Pmf sum_pmf(const Pmf& x, const Pmf& y);

/// Error of m OR gates standing in for full adders: p(v) = (1/4)^|v| (3/4)^(m-|v|),
/// |v| the popcount of v.
Pmf or_error_pmf(unsigned or_bits);

/// Pr(X + Y >= 2^m) for uniform m-bit X, Y.
DyadicProb generate_prob(unsigned m);
/// Pr(Z >= 2^m) for a given sum distribution Z.
DyadicProb generate_prob(const Pmf& sum_dist, unsigned m);

/// Pr(all s bit pairs differ) = 2^-s for uniform operands.
DyadicProb propagate_prob(unsigned s);
/// Pr(Z = 2^s - 1) for a given sum distribution over s-bit operands.
DyadicProb propagate_prob(const Pmf& sum_dist, unsigned s);

/// Probability that the full-adder section overflows while an s-bit chain
/// on top of it misses the carry. Throws std::invalid_argument if s > fa_width.
DyadicProb trunc_miss_prob(unsigned fa_width, unsigned s);

/// Block-local error distribution with a zero incoming carry.
///
/// H-S >= L uses the closed form (OR error and truncation miss on disjoint,
/// independent bit groups; a miss costs exactly 2^H). H-S < L, where the
/// chain reaches into the OR section, is enumerated; that needs H <= 12.
Pmf block_error_pmf(const BlockSpec& spec);

/// Pr(block error != 0): union of the OR-section and truncation events.
DyadicProb block_error_rate(const BlockSpec& spec);

/// Convolution of the block PMFs, each shifted to its positional weight.
Pmf adder_error_pmf(const AdderConfig& cfg);

/// Pr(some block errs) = 1 - prod(1 - ER_i).
DyadicProb adder_error_rate(const AdderConfig& cfg);
/// Same quantity by the inclusion-exclusion expansion over block events.
DyadicProb union_rate_inclusion_exclusion(std::span<const DyadicProb> rates);
DyadicProb union_rate_product(std::span<const DyadicProb> rates);

struct AnalyticMetrics {
  DyadicProb error_rate;
  Dyadic med;
  Dyadic mse;
  std::uint64_t max_ed = 0;
  double nmed = 0;

  friend bool operator==(const AnalyticMetrics&, const AnalyticMetrics&) = default;
};

/// NMED divisor: the largest N-bit sum, 2^(N+1) - 2.
double nmed_divisor(unsigned bits);

/// Moments of an error PMF. Throws std::logic_error if `pmf` is not normalized.
AnalyticMetrics metrics_from_pmf(const Pmf& pmf, unsigned bits);

} // namespace hbba
