#include "hbba/pmf.hpp"

#include <algorithm>
#include <stdexcept>

namespace hbba {

Pmf Pmf::point(std::int64_t value) {
  Pmf p;
  p.entries_.push_back({value, BigInt(1)});
  return p;
}

Pmf Pmf::uniform_bits(unsigned bits) {
  if (bits > 24)
    throw std::invalid_argument("uniform_bits: too many values");
  Pmf p;
  p.exp_ = bits;
  for (std::int64_t v = 0; v < (std::int64_t{1} << bits); ++v)
    p.entries_.push_back({v, BigInt(1)});
  return p;
}

Pmf Pmf::from_weights(const std::map<std::int64_t, BigInt>& weights, unsigned exp) {
  Pmf p;
  p.exp_ = exp;
  BigInt sum = 0;
  for (const auto& [v, w] : weights) {
    if (w < 0)
      throw std::invalid_argument("negative probability weight");
    if (w == 0)
      continue;
    p.entries_.push_back({v, w});
    sum += w;
  }
  if (sum != (BigInt(1) << exp))
    throw std::invalid_argument("weights do not sum to 2^exp");
  return p;
}

Pmf Pmf::from_sorted(std::vector<Entry> entries, unsigned exp) {
  Pmf p;
  p.entries_ = std::move(entries);
  p.exp_ = exp;
  return p;
}

DyadicProb Pmf::prob(std::int64_t value) const {
  auto it = std::lower_bound(entries_.begin(), entries_.end(), value,
                             [](const Entry& e, std::int64_t v) { return e.value < v; });
  if (it == entries_.end() || it->value != value)
    return DyadicProb::zero();
  return DyadicProb(it->weight, exp_);
}

DyadicProb Pmf::total() const {
  BigInt sum = 0;
  for (const auto& e : entries_)
    sum += e.weight;
  return DyadicProb(sum, exp_);
}

bool Pmf::normalized() const {
  return !entries_.empty() && total() == DyadicProb::one();
}

Pmf Pmf::shifted(unsigned shift) const {
  Pmf p = *this;
  for (auto& e : p.entries_)
    e.value *= std::int64_t{1} << shift;
  return p;
}

Pmf Pmf::convolve(const Pmf& other) const {
  std::map<std::int64_t, BigInt> acc;
  for (const auto& a : entries_)
    for (const auto& b : other.entries_)
      acc[a.value + b.value] += a.weight * b.weight;
  Pmf p;
  p.exp_ = exp_ + other.exp_;
  p.entries_.reserve(acc.size());
  for (auto& [v, w] : acc)
    p.entries_.push_back({v, std::move(w)});
  return p;
}

bool operator==(const Pmf& a, const Pmf& b) {
  if (a.entries_.size() != b.entries_.size())
    return false;
  for (std::size_t i = 0; i < a.entries_.size(); ++i) {
    const auto& x = a.entries_[i];
    const auto& y = b.entries_[i];
    if (x.value != y.value)
      return false;
    if ((x.weight << b.exp_) != (y.weight << a.exp_))
      return false;
  }
  return true;
}

} // namespace hbba
