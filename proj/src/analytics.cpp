#include "hbba/analytics.hpp"

#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

#include "hbba/simulator.hpp"

namespace hbba {

Pmf slice_pmf(const Pmf& in, unsigned low, unsigned high) {
  if (low > high || high >= 63)
    throw std::invalid_argument("slice_pmf: invalid bit range");
  const std::int64_t mask = (std::int64_t{1} << (high - low + 1)) - 1;
  std::map<std::int64_t, BigInt> weights;
  for (const auto& e : in.entries()) {
    if (e.value < 0)
      throw std::invalid_argument("slice_pmf: negative value");
    weights[(e.value >> low) & mask] += e.weight;
  }
  return Pmf::from_weights(weights, in.exp());
}

Pmf sum_pmf(unsigned n) {
  if (n > 24)
    throw std::invalid_argument("sum_pmf: width too large");
  const std::int64_t top = std::int64_t{1} << n;
  std::vector<Pmf::Entry> entries;
  for (std::int64_t k = 0; k <= 2 * top - 2; ++k) {
    std::int64_t count = k <= top - 1 ? k + 1 : 2 * top - k - 1;
    entries.push_back({k, BigInt(count)});
  }
  return Pmf::from_sorted(std::move(entries), 2 * n);
}

Pmf sum_pmf(const Pmf& x, const Pmf& y) { return x.convolve(y); }

Pmf or_error_pmf(unsigned or_bits) {
  if (or_bits > 24)
    throw BudgetError("or_error_pmf: L too large");
  std::vector<Pmf::Entry> entries;
  for (std::uint64_t v = 0; v < (std::uint64_t{1} << or_bits); ++v) {
    // (1/4)^k (3/4)^(L-k) = 3^(L-k) / 4^L
    unsigned zeros = or_bits - static_cast<unsigned>(std::popcount(v));
    entries.push_back({static_cast<std::int64_t>(v), boost::multiprecision::pow(BigInt(3), zeros)});
  }
  return Pmf::from_sorted(std::move(entries), 2 * or_bits);
}

DyadicProb generate_prob(unsigned m) {
  if (m == 0)
    return DyadicProb::zero();
  return DyadicProb((BigInt(1) << m) - 1, m + 1);
}

DyadicProb generate_prob(const Pmf& sum_dist, unsigned m) {
  const std::int64_t threshold = std::int64_t{1} << m;
  DyadicProb p;
  for (const auto& e : sum_dist.entries())
    if (e.value >= threshold)
      p += DyadicProb(e.weight, sum_dist.exp());
  return p;
}

DyadicProb propagate_prob(unsigned s) { return DyadicProb(BigInt(1), s); }

DyadicProb propagate_prob(const Pmf& sum_dist, unsigned s) {
  return sum_dist.prob((std::int64_t{1} << s) - 1);
}

DyadicProb trunc_miss_prob(unsigned fa_width, unsigned s) {
  if (s > fa_width)
    throw std::invalid_argument("trunc_miss_prob: chain longer than the full-adder section");
  return generate_prob(fa_width - s) * propagate_prob(s);
}

namespace {

// H - S >= L: the chain lies inside the full-adder section.
Pmf closed_form_block_pmf(const BlockSpec& spec) {
  const unsigned h = spec.width, l = spec.or_bits, s = spec.chain_bits;
  Pmf q = or_error_pmf(l);
  DyadicProb t = trunc_miss_prob(h - l, s);
  if (t.is_zero())
    return q;
  DyadicProb keep = DyadicProb::one() - t;
  // Bring both branch probabilities to one denominator 2^e.
  unsigned e = std::max(t.exp(), keep.exp());
  BigInt tw = t.num() << (e - t.exp());
  BigInt kw = keep.num() << (e - keep.exp());
  std::vector<Pmf::Entry> entries;
  for (const auto& v : q.entries())
    entries.push_back({v.value, v.weight * kw});
  for (const auto& v : q.entries())
    entries.push_back({v.value + (std::int64_t{1} << h), v.weight * tw});
  return Pmf::from_sorted(std::move(entries), q.exp() + e);
}

} // namespace

Pmf block_error_pmf(const BlockSpec& spec) {
  if (!spec.is_approximate())
    return Pmf::point(0);
  if (spec.width - spec.chain_bits >= spec.or_bits)
    return closed_form_block_pmf(spec);
  return block_exhaustive_pmf(spec);
}

DyadicProb block_error_rate(const BlockSpec& spec) {
  if (!spec.is_approximate())
    return DyadicProb::zero();
  const unsigned h = spec.width, l = spec.or_bits, s = spec.chain_bits;
  if (h - s >= l) {
    // 1 - (3/4)^L
    DyadicProb or_event = DyadicProb::one() - DyadicProb(boost::multiprecision::pow(BigInt(3), l), 2 * l);
    DyadicProb trunc_event = trunc_miss_prob(h - l, s);
    return or_event + trunc_event - or_event * trunc_event;
  }
  return DyadicProb::one() - block_error_pmf(spec).prob(0);
}

Pmf adder_error_pmf(const AdderConfig& cfg) {
  Pmf acc = Pmf::point(0);
  for (unsigned i = 0; i < cfg.approx_count(); ++i)
    acc = acc.convolve(block_error_pmf(cfg.block(i)).shifted(i * cfg.block_size()));
  return acc;
}

DyadicProb union_rate_product(std::span<const DyadicProb> rates) {
  DyadicProb clean = DyadicProb::one();
  for (const auto& r : rates)
    clean *= DyadicProb::one() - r;
  return DyadicProb::one() - clean;
}

DyadicProb union_rate_inclusion_exclusion(std::span<const DyadicProb> rates) {
  // elem[j]: sum over all j-subsets of the product of their rates, i.e. the
  // j-th alternating term of the expansion.
  std::vector<DyadicProb> elem(rates.size() + 1);
  elem[0] = DyadicProb::one();
  for (const auto& r : rates)
    for (std::size_t j = elem.size() - 1; j >= 1; --j)
      elem[j] += elem[j - 1] * r;
  DyadicProb total;
  for (std::size_t j = 1; j < elem.size(); ++j)
    total = (j % 2) ? total + elem[j] : total - elem[j];
  return total;
}

DyadicProb adder_error_rate(const AdderConfig& cfg) {
  std::vector<DyadicProb> rates;
  for (unsigned i = 0; i < cfg.approx_count(); ++i)
    rates.push_back(block_error_rate(cfg.block(i)));
  return union_rate_product(rates);
}

double nmed_divisor(unsigned bits) { return std::ldexp(1.0, static_cast<int>(bits) + 1) - 2.0; }

AnalyticMetrics metrics_from_pmf(const Pmf& pmf, unsigned bits) {
  if (!pmf.normalized())
    throw std::logic_error("metrics_from_pmf: PMF does not sum to 1");
  BigInt abs_sum = 0, sq_sum = 0;
  std::uint64_t max_ed = 0;
  for (const auto& e : pmf.entries()) {
    BigInt ed = e.value < 0 ? BigInt(-e.value) : BigInt(e.value);
    abs_sum += ed * e.weight;
    sq_sum += ed * ed * e.weight;
    auto mag = static_cast<std::uint64_t>(e.value < 0 ? -e.value : e.value);
    if (mag > max_ed)
      max_ed = mag;
  }
  AnalyticMetrics m;
  m.error_rate = DyadicProb::one() - pmf.prob(0);
  m.med = Dyadic(abs_sum, pmf.exp());
  m.mse = Dyadic(sq_sum, pmf.exp());
  m.max_ed = max_ed;
  m.nmed = m.med.to_double() / nmed_divisor(bits);
  return m;
}

} // namespace hbba
