#include "hbba/simulator.hpp"

#include <cmath>
#include <cstdlib>

#include "hbba/parallel.hpp"

namespace hbba {

namespace {

constexpr std::uint64_t low_mask(unsigned bits) {
  return bits >= 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << bits) - 1;
}

unsigned chain_carry(std::uint64_t x, std::uint64_t y, unsigned width, unsigned chain) {
  unsigned c = 0;
  for (unsigned j = width - chain; j < width; ++j) {
    unsigned xj = (x >> j) & 1, yj = (y >> j) & 1;
    c = (xj & yj) | ((xj ^ yj) & c);
  }
  return c;
}

} // namespace

BlockOutcome block_eval(const BlockSpec& spec, std::uint64_t x, std::uint64_t y, unsigned c_in) {
  const unsigned h = spec.width;
  if (!spec.is_approximate()) {
    std::uint64_t t = x + y + c_in;
    return {t & low_mask(h), static_cast<unsigned>(t >> h)};
  }
  const unsigned l = spec.or_bits;
  std::uint64_t sum = (x | y) & low_mask(l);
  if (l < h) {
    std::uint64_t u = (x >> l) + (y >> l) + c_in;
    sum |= (u & low_mask(h - l)) << l;
  }
  return {sum, chain_carry(x, y, h, spec.chain_bits)};
}

std::uint64_t adder_eval(const AdderConfig& cfg, std::uint64_t a, std::uint64_t b) {
  const unsigned h = cfg.block_size();
  const std::uint64_t mask = low_mask(h);
  std::uint64_t result = 0;
  unsigned carry = 0;
  for (unsigned i = 0; i < cfg.block_count(); ++i) {
    auto out = block_eval(cfg.block(i), (a >> (i * h)) & mask, (b >> (i * h)) & mask, carry);
    result |= out.sum_bits << (i * h);
    carry = out.carry_out;
  }
  return result | (std::uint64_t{carry} << cfg.bits());
}

AdderEvaluator::AdderEvaluator(const AdderConfig& cfg) : cfg_(cfg), block_mask_(low_mask(cfg.block_size())) {
  const unsigned h = cfg.block_size();
  if (h > 8)
    return;
  for (const auto& spec : cfg.blocks()) {
    std::vector<std::uint32_t> table(std::size_t{2} << (2 * h));
    for (unsigned c = 0; c < 2; ++c)
      for (std::uint64_t x = 0; x <= block_mask_; ++x)
        for (std::uint64_t y = 0; y <= block_mask_; ++y) {
          auto out = block_eval(spec, x, y, c);
          table[(std::uint64_t{c} << (2 * h)) | (x << h) | y] =
              static_cast<std::uint32_t>(out.sum_bits | (std::uint64_t{out.carry_out} << h));
        }
    tables_.push_back(std::move(table));
  }
}

std::uint64_t AdderEvaluator::operator()(std::uint64_t a, std::uint64_t b) const {
  if (tables_.empty())
    return adder_eval(cfg_, a, b);
  const unsigned h = cfg_.block_size();
  std::uint64_t result = 0;
  std::uint64_t carry = 0;
  for (unsigned i = 0; i < tables_.size(); ++i) {
    std::uint64_t x = (a >> (i * h)) & block_mask_;
    std::uint64_t y = (b >> (i * h)) & block_mask_;
    std::uint32_t r = tables_[i][(carry << (2 * h)) | (x << h) | y];
    result |= (r & block_mask_) << (i * h);
    carry = r >> h;
  }
  return result | (carry << cfg_.bits());
}

namespace {

// Order-insensitive partial sums for one chunk of samples.
struct Accumulator {
  std::uint64_t samples = 0;
  std::uint64_t errors = 0;
  unsigned __int128 sum_abs = 0;
  unsigned __int128 sum_sq = 0;
  std::uint64_t max_ed = 0;
  double rel_sum = 0;
  std::uint64_t rel_count = 0;
  std::map<std::int64_t, std::uint64_t> histogram;
  bool histogram_truncated = false;

  void add(std::uint64_t exact, std::uint64_t approx) {
    auto err = static_cast<std::int64_t>(exact) - static_cast<std::int64_t>(approx);
    std::uint64_t ed = static_cast<std::uint64_t>(err < 0 ? -err : err);
    ++samples;
    if (err != 0)
      ++errors;
    sum_abs += ed;
    sum_sq += static_cast<unsigned __int128>(ed) * ed;
    if (ed > max_ed)
      max_ed = ed;
    if (exact != 0) {
      rel_sum += static_cast<double>(ed) / static_cast<double>(exact);
      ++rel_count;
    }
    if (!histogram_truncated) {
      ++histogram[err];
      if (histogram.size() > EmpiricalMetrics::kMaxHistogram) {
        histogram.clear();
        histogram_truncated = true;
      }
    }
  }

  void merge(const Accumulator& o) {
    samples += o.samples;
    errors += o.errors;
    sum_abs += o.sum_abs;
    sum_sq += o.sum_sq;
    if (o.max_ed > max_ed)
      max_ed = o.max_ed;
    rel_sum += o.rel_sum;
    rel_count += o.rel_count;
    if (o.histogram_truncated)
      histogram_truncated = true;
    if (!histogram_truncated) {
      for (auto [k, v] : o.histogram)
        histogram[k] += v;
      if (histogram.size() > EmpiricalMetrics::kMaxHistogram)
        histogram_truncated = true;
    }
    if (histogram_truncated)
      histogram.clear();
  }
};

BigInt to_big(unsigned __int128 v) {
  BigInt hi = static_cast<std::uint64_t>(v >> 64);
  return (hi << 64) | BigInt(static_cast<std::uint64_t>(v));
}

EmpiricalMetrics finish(const Accumulator& acc, unsigned bits, bool sampled) {
  EmpiricalMetrics m;
  m.sample_count = acc.samples;
  m.error_count = acc.errors;
  m.sum_abs_error = to_big(acc.sum_abs);
  m.sum_sq_error = to_big(acc.sum_sq);
  m.max_ed = acc.max_ed;
  m.histogram = acc.histogram;
  m.histogram_truncated = acc.histogram_truncated;
  if (acc.samples == 0)
    return m;
  const auto n = static_cast<double>(acc.samples);
  m.error_rate = static_cast<double>(acc.errors) / n;
  m.med = m.sum_abs_error.convert_to<double>() / n;
  m.mse = m.sum_sq_error.convert_to<double>() / n;
  m.nmed = m.med / (std::ldexp(1.0, static_cast<int>(bits) + 1) - 2.0);
  m.mred = acc.rel_count ? acc.rel_sum / static_cast<double>(acc.rel_count) : 0.0;
  if (sampled && acc.samples > 1) {
    m.er_stderr = std::sqrt(m.error_rate * (1 - m.error_rate) / n);
    double var = (m.mse - m.med * m.med) * n / (n - 1);
    m.med_stderr = std::sqrt(var > 0 ? var / n : 0.0);
  }
  return m;
}

constexpr std::uint64_t kChunk = std::uint64_t{1} << 16;

std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

} // namespace

EmpiricalMetrics exhaustive_metrics(const AdderConfig& cfg, const ExhaustiveOptions& opts) {
  const unsigned n = cfg.bits();
  if (n > opts.max_bits)
    throw BudgetError("exhaustive simulation needs N <= " + std::to_string(opts.max_bits) + ", got N=" +
                      std::to_string(n));
  AdderEvaluator eval(cfg);
  const std::uint64_t range = std::uint64_t{1} << n;
  // One chunk per group of A values; the partition depends only on N.
  const std::uint64_t a_per_chunk = range * range >= kChunk ? std::max<std::uint64_t>(1, kChunk / range) : range;
  const std::size_t chunks = (range + a_per_chunk - 1) / a_per_chunk;
  std::vector<Accumulator> parts(chunks);
  parallel_for(chunks, opts.workers, [&](std::size_t c) {
    Accumulator& acc = parts[c];
    std::uint64_t lo = c * a_per_chunk, hi = std::min(range, lo + a_per_chunk);
    for (std::uint64_t a = lo; a < hi; ++a)
      for (std::uint64_t b = 0; b < range; ++b)
        acc.add(a + b, eval(a, b));
  });
  Accumulator total;
  for (const auto& p : parts)
    total.merge(p);
  return finish(total, n, false);
}

std::pair<std::uint64_t, std::uint64_t> montecarlo_operands(unsigned bits, std::uint64_t seed, std::uint64_t index) {
  const std::uint64_t mask = low_mask(bits);
  std::uint64_t key = splitmix64(seed) ^ (index * 0xd1b54a32d192ed03ULL);
  std::uint64_t r1 = splitmix64(key);
  if (bits <= 32)
    return {r1 & mask, (r1 >> 32) & mask};
  std::uint64_t r2 = splitmix64(key ^ 0xa0761d6478bd642fULL);
  return {r1 & mask, r2 & mask};
}

EmpiricalMetrics montecarlo_metrics(const AdderConfig& cfg, std::uint64_t samples, std::uint64_t seed,
                                    unsigned workers) {
  if (samples == 0)
    throw std::invalid_argument("Monte Carlo run needs at least one sample");
  AdderEvaluator eval(cfg);
  const unsigned n = cfg.bits();
  const std::size_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<Accumulator> parts(chunks);
  parallel_for(chunks, workers, [&](std::size_t c) {
    Accumulator& acc = parts[c];
    std::uint64_t lo = c * kChunk, hi = std::min(samples, lo + kChunk);
    for (std::uint64_t i = lo; i < hi; ++i) {
      auto [a, b] = montecarlo_operands(n, seed, i);
      acc.add(a + b, eval(a, b));
    }
  });
  Accumulator total;
  for (const auto& p : parts)
    total.merge(p);
  return finish(total, n, true);
}

Pmf exhaustive_error_pmf(const AdderConfig& cfg, const ExhaustiveOptions& opts) {
  const unsigned n = cfg.bits();
  if (n > opts.max_bits)
    throw BudgetError("exhaustive enumeration needs N <= " + std::to_string(opts.max_bits) + ", got N=" +
                      std::to_string(n));
  AdderEvaluator eval(cfg);
  const std::uint64_t range = std::uint64_t{1} << n;
  std::vector<std::map<std::int64_t, std::uint64_t>> parts(range);
  parallel_for(range, opts.workers, [&](std::size_t a) {
    auto& hist = parts[a];
    for (std::uint64_t b = 0; b < range; ++b)
      ++hist[static_cast<std::int64_t>(a + b) - static_cast<std::int64_t>(eval(a, b))];
  });
  std::map<std::int64_t, BigInt> weights;
  for (const auto& hist : parts)
    for (auto [k, v] : hist)
      weights[k] += v;
  return Pmf::from_weights(weights, 2 * n);
}

namespace {

// (carry_out, local error) -> number of (x, y) pairs, for one incoming carry.
using TransferTable = std::map<std::pair<unsigned, std::int64_t>, std::uint64_t>;

TransferTable transfer_table(const BlockSpec& spec, unsigned c_in) {
  const std::uint64_t range = std::uint64_t{1} << spec.width;
  TransferTable t;
  for (std::uint64_t x = 0; x < range; ++x)
    for (std::uint64_t y = 0; y < range; ++y) {
      auto out = block_eval(spec, x, y, c_in);
      auto value = static_cast<std::int64_t>(out.sum_bits + (std::uint64_t{out.carry_out} << spec.width));
      ++t[{out.carry_out, static_cast<std::int64_t>(x + y + c_in) - value}];
    }
  return t;
}

} // namespace

Pmf carry_chain_error_pmf(const AdderConfig& cfg) {
  const unsigned h = cfg.block_size();
  if (h > 12)
    throw BudgetError("carry-chain enumeration needs H <= 12");
  // (incoming carry, accumulated error) -> weight over 4^(blocks so far * H)
  std::map<std::pair<unsigned, std::int64_t>, BigInt> state{{{0u, 0}, BigInt(1)}};
  for (unsigned i = 0; i < cfg.block_count(); ++i) {
    const TransferTable tables[2] = {transfer_table(cfg.block(i), 0), transfer_table(cfg.block(i), 1)};
    std::map<std::pair<unsigned, std::int64_t>, BigInt> next;
    for (const auto& [key, w] : state) {
      auto [carry, err] = key;
      for (const auto& [out, count] : tables[carry]) {
        auto [c_out, local] = out;
        next[{c_out, err + local * (std::int64_t{1} << (i * h))}] += w * count;
      }
    }
    state = std::move(next);
  }
  std::map<std::int64_t, BigInt> weights;
  for (const auto& [key, w] : state)
    weights[key.second] += w;
  return Pmf::from_weights(weights, 2 * cfg.bits());
}

Pmf block_exhaustive_pmf(const BlockSpec& spec) {
  if (spec.width > 12)
    throw BudgetError("block enumeration needs H <= 12, got H=" + std::to_string(spec.width));
  std::map<std::int64_t, BigInt> weights;
  for (const auto& [out, count] : transfer_table(spec, 0))
    weights[out.second] += count;
  return Pmf::from_weights(weights, 2 * spec.width);
}

Pmf block_exhaustive_pmf(const BlockSpec& spec, const Pmf& x_dist, const Pmf& y_dist) {
  if (spec.width > 12)
    throw BudgetError("block enumeration needs H <= 12, got H=" + std::to_string(spec.width));
  const auto range = std::int64_t{1} << spec.width;
  std::map<std::int64_t, BigInt> weights;
  for (const auto& x : x_dist.entries())
    for (const auto& y : y_dist.entries()) {
      if (x.value < 0 || x.value >= range || y.value < 0 || y.value >= range)
        throw std::invalid_argument("operand distribution outside [0, 2^H)");
      auto out = block_eval(spec, static_cast<std::uint64_t>(x.value), static_cast<std::uint64_t>(y.value), 0);
      auto value = static_cast<std::int64_t>(out.sum_bits + (std::uint64_t{out.carry_out} << spec.width));
      weights[x.value + y.value - value] += x.weight * y.weight;
    }
  return Pmf::from_weights(weights, x_dist.exp() + y_dist.exp());
}

} // namespace hbba
