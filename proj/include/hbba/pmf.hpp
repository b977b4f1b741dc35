#pragma once

#include <cstdint>
#include <map>
#include <utility>
#include <vector>

#include "hbba/dyadic.hpp"

namespace hbba {

/// Exact probability mass function over signed integer values.
///
/// Masses are stored as integer weights over a shared denominator 2^exp;
/// entries are sorted by value and never zero. Used both for error values
/// and for operand/sum distributions.
class Pmf {
public:
  struct Entry {
    std::int64_t value;
    BigInt weight;
  };

  Pmf() = default;
  /// Point mass at `value`.
  static Pmf point(std::int64_t value);
  /// Uniform over [0, 2^bits).
  static Pmf uniform_bits(unsigned bits);
  /// From per-value weights over a 2^exp denominator; zero weights dropped.
  /// Throws std::invalid_argument if weights do not sum to 2^exp.
  static Pmf from_weights(const std::map<std::int64_t, BigInt>& weights, unsigned exp);
  /// Unchecked construction for callers that already hold a normalized,
  /// sorted, zero-free entry list.
  static Pmf from_sorted(std::vector<Entry> entries, unsigned exp);

  const std::vector<Entry>& entries() const { return entries_; }
  unsigned exp() const { return exp_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }

  DyadicProb prob(std::int64_t value) const;
  DyadicProb total() const;
  bool normalized() const;
  std::int64_t min_value() const { return entries_.front().value; }
  std::int64_t max_value() const { return entries_.back().value; }

  /// Keys multiplied by 2^shift (positional weight of a block).
  Pmf shifted(unsigned shift) const;
  /// Distribution of X + Y for independent X ~ *this, Y ~ other.
  Pmf convolve(const Pmf& other) const;

  /// Value equality (independent of the shared denominator chosen).
  friend bool operator==(const Pmf& a, const Pmf& b);

private:
  std::vector<Entry> entries_;
  unsigned exp_ = 0;
};

using ErrorPmf = Pmf;

} // namespace hbba
