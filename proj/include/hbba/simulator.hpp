#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>

#include "hbba/config.hpp"
#include "hbba/pmf.hpp"

namespace hbba {

/// A requested enumeration is larger than the configured budget.
class BudgetError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

struct BlockOutcome {
  std::uint64_t sum_bits = 0;
  unsigned carry_out = 0;
  friend bool operator==(const BlockOutcome&, const BlockOutcome&) = default;
};

/// Gate-faithful evaluation of one block.
///
/// Accurate: x + y + c_in split into sum bits and carry-out.
/// Approximate: bits [0, L) are x|y; bits [L, H) are the low H-L bits of
/// x_high + y_high + c_in (the overflow is dropped, and with L = H the
/// incoming carry is dropped too); carry-out comes from a generate/propagate
/// chain over bits [H-S, H) that starts from 0 and never sees c_in.
BlockOutcome block_eval(const BlockSpec& spec, std::uint64_t x, std::uint64_t y, unsigned c_in);

/// Approximate sum of two N-bit operands; the result has N + 1 bits.
std::uint64_t adder_eval(const AdderConfig& cfg, std::uint64_t a, std::uint64_t b);

/// Precomputed evaluator used by the drivers. Blocks up to 8 bits wide are
/// served from lookup tables.
class AdderEvaluator {
public:
  explicit AdderEvaluator(const AdderConfig& cfg);
  std::uint64_t operator()(std::uint64_t a, std::uint64_t b) const;
  const AdderConfig& config() const { return cfg_; }

private:
  AdderConfig cfg_;
  std::uint64_t block_mask_;
  // Per block: index (c_in << 2H | x << H | y) -> sum | carry << H.
  std::vector<std::vector<std::uint32_t>> tables_;
};

struct EmpiricalMetrics {
  std::uint64_t sample_count = 0;
  std::uint64_t error_count = 0;
  BigInt sum_abs_error = 0;
  BigInt sum_sq_error = 0;
  double error_rate = 0;
  double med = 0;
  double mse = 0;
  double nmed = 0;
  double mred = 0;
  std::uint64_t max_ed = 0;
  /// Standard errors of error_rate and med (sampled runs only).
  double er_stderr = 0;
  double med_stderr = 0;
  /// error value -> count; cleared when more than kMaxHistogram values occur.
  std::map<std::int64_t, std::uint64_t> histogram;
  bool histogram_truncated = false;

  static constexpr std::size_t kMaxHistogram = 4096;

  friend bool operator==(const EmpiricalMetrics&, const EmpiricalMetrics&) = default;
};

struct ExhaustiveOptions {
  unsigned max_bits = 12;
  unsigned workers = 1;
};

/// All 2^(2N) operand pairs. Throws BudgetError when N > max_bits.
EmpiricalMetrics exhaustive_metrics(const AdderConfig& cfg, const ExhaustiveOptions& opts = {});

/// Uniform operands from a counter-based generator: sample i depends only on
/// (seed, i), so results are identical for any worker count.
EmpiricalMetrics montecarlo_metrics(const AdderConfig& cfg, std::uint64_t samples, std::uint64_t seed,
                                    unsigned workers = 1);

/// Operand pair for sample `index` of a Monte Carlo run.
std::pair<std::uint64_t, std::uint64_t> montecarlo_operands(unsigned bits, std::uint64_t seed,
                                                            std::uint64_t index);

/// Exact error distribution over all 2^(2N) operand pairs by brute force.
Pmf exhaustive_error_pmf(const AdderConfig& cfg, const ExhaustiveOptions& opts = {});

/// The same distribution as exhaustive_error_pmf, computed by chaining each
/// block's 2^(2H) input pairs per incoming carry instead of enumerating
/// whole operands. Cost grows with the number of distinct partial errors,
/// not with 4^N.
Pmf carry_chain_error_pmf(const AdderConfig& cfg);

/// Block-local error distribution with c_in = 0 over all 4^H input pairs.
/// Throws BudgetError for H > 12.
Pmf block_exhaustive_pmf(const BlockSpec& spec);

/// Same, with x and y drawn from the given distributions over [0, 2^H).
Pmf block_exhaustive_pmf(const BlockSpec& spec, const Pmf& x_dist, const Pmf& y_dist);

} // namespace hbba
