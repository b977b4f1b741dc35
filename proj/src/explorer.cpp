#include "hbba/explorer.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <numeric>
#include <stdexcept>

#include "hbba/parallel.hpp"

namespace hbba {

namespace {

constexpr std::pair<Metric, std::string_view> kMetricNames[] = {
    {Metric::Med, "med"},     {Metric::Er, "er"},     {Metric::MaxEd, "max_ed"}, {Metric::Nmed, "nmed"},
    {Metric::Delay, "delay"}, {Metric::Area, "area"}, {Metric::Power, "power"},  {Metric::Energy, "energy"},
};

} // namespace

std::string_view metric_name(Metric m) {
  for (auto [metric, name] : kMetricNames)
    if (metric == m)
      return name;
  return "?";
}

Metric parse_metric(std::string_view name) {
  for (auto [metric, n] : kMetricNames)
    if (n == name)
      return metric;
  throw std::invalid_argument("unknown metric '" + std::string(name) + "'");
}

bool is_error_metric(Metric m) {
  return m == Metric::Med || m == Metric::Er || m == Metric::MaxEd || m == Metric::Nmed;
}

Constraint parse_constraint(std::string_view text) {
  std::size_t op = text.find("<=");
  std::size_t skip = 2;
  if (op == std::string_view::npos) {
    op = text.find_first_of("=:");
    skip = 1;
  }
  if (op == std::string_view::npos)
    throw std::invalid_argument("constraint must look like metric<=bound: '" + std::string(text) + "'");
  Constraint c;
  c.metric = parse_metric(text.substr(0, op));
  if (!is_error_metric(c.metric))
    throw std::invalid_argument("constraints apply to med, er, max_ed or nmed");
  auto rest = text.substr(op + skip);
  auto [ptr, ec] = std::from_chars(rest.data(), rest.data() + rest.size(), c.bound);
  if (ec != std::errc() || ptr != rest.data() + rest.size())
    throw std::invalid_argument("malformed constraint bound: '" + std::string(rest) + "'");
  return c;
}

void ExplorationSpec::validate() const {
  AdderConfig::exact(bits, block_size);
  if (max_approx_blocks > bits / block_size)
    throw ConfigError("max approximate blocks exceeds N/H");
  for (const auto& c : constraints)
    if (!is_error_metric(c.metric))
      throw std::invalid_argument("constraint on non-error metric " + std::string(metric_name(c.metric)));
  if (is_error_metric(objective))
    throw std::invalid_argument("objective must be delay, area, power or energy");
}

double DesignPoint::value(Metric m) const {
  switch (m) {
  case Metric::Med: return error.med.to_double();
  case Metric::Er: return error.error_rate.to_double();
  case Metric::MaxEd: return static_cast<double>(error.max_ed);
  case Metric::Nmed: return error.nmed;
  case Metric::Delay: return hw.delay_ps;
  case Metric::Area: return hw.area_um2;
  case Metric::Power: return hw.power_uw;
  case Metric::Energy: return hw.energy_aj;
  }
  return 0;
}

std::strong_ordering compare_on(const DesignPoint& a, const DesignPoint& b, Metric m) {
  switch (m) {
  case Metric::Med:
    return a.error.med <=> b.error.med;
  case Metric::Nmed:
    // Same N within one exploration; across widths fall back to the value.
    if (a.cfg.bits() == b.cfg.bits())
      return a.error.med <=> b.error.med;
    return Dyadic::from_double(a.error.nmed) <=> Dyadic::from_double(b.error.nmed);
  case Metric::Er:
    return a.error.error_rate <=> b.error.error_rate;
  case Metric::MaxEd:
    return a.error.max_ed <=> b.error.max_ed;
  case Metric::Delay:
    return a.hw.gate_depth <=> b.hw.gate_depth;
  case Metric::Area:
    return a.hw.gate_count <=> b.hw.gate_count;
  case Metric::Power:
  case Metric::Energy: {
    // Power and energy carry the 1/(G_ref*D_ref) normalization, which only
    // depends on N and H.
    if (a.cfg.bits() != b.cfg.bits() || a.cfg.block_size() != b.cfg.block_size())
      return Dyadic::from_double(a.value(m)) <=> Dyadic::from_double(b.value(m));
    unsigned __int128 ka = a.hw.power_key(), kb = b.hw.power_key();
    if (m == Metric::Energy) {
      ka *= a.hw.gate_depth;
      kb *= b.hw.gate_depth;
    }
    return ka <=> kb;
  }
  }
  return std::strong_ordering::equal;
}

bool satisfies(const DesignPoint& point, const Constraint& c) {
  if (c.bound < 0)
    return false;
  Dyadic bound = Dyadic::from_double(c.bound);
  switch (c.metric) {
  case Metric::Med: return point.error.med <= bound;
  case Metric::Er: return point.error.error_rate <= bound;
  case Metric::MaxEd: return Dyadic::integer(static_cast<std::int64_t>(point.error.max_ed)) <= bound;
  case Metric::Nmed: {
    // med / (2^(N+1) - 2) <= bound, cross-multiplied.
    auto divisor = Dyadic((BigInt(1) << (point.cfg.bits() + 1)) - 2, 0);
    return point.error.med <= bound * divisor;
  }
  default:
    throw std::invalid_argument("constraint on non-error metric");
  }
}

bool is_loa_equivalent(const AdderConfig& cfg) {
  const unsigned a = cfg.approx_count();
  if (a == 0)
    return true;
  unsigned or_total = 0;
  for (unsigned i = 0; i < a; ++i) {
    const auto& b = cfg.block(i);
    if (b.chain_bits != 0)
      return false;
    if (i + 1 < a && b.or_bits != b.width)
      return false;
    or_total += b.or_bits;
  }
  return or_total > 0;
}

std::vector<AdderConfig> enumerate_configs(const ExplorationSpec& spec) {
  spec.validate();
  const unsigned n = spec.bits, h = spec.block_size;
  std::vector<AdderConfig> out;
  out.push_back(AdderConfig::exact(n, h));
  for (unsigned a = 1; a <= spec.max_approx_blocks; ++a) {
    if (spec.loa_only) {
      for (unsigned top = 0; top <= h; ++top) {
        AdderConfig::ApproxList approx(a, {h, 0});
        approx.back().first = top;
        AdderConfig cfg(n, h, approx);
        if (is_loa_equivalent(cfg))
          out.push_back(std::move(cfg));
      }
      continue;
    }
    // Odometer over L then S, most significant digit = vector index 0.
    std::vector<unsigned> l(a, 0), s(a, 0);
    auto advance = [h](std::vector<unsigned>& v) {
      for (std::size_t i = v.size(); i-- > 0;) {
        if (++v[i] <= h)
          return true;
        v[i] = 0;
      }
      return false;
    };
    do {
      std::fill(s.begin(), s.end(), 0u);
      do {
        AdderConfig::ApproxList approx;
        for (unsigned i = 0; i < a; ++i)
          approx.emplace_back(l[i], s[i]);
        out.emplace_back(n, h, approx);
      } while (advance(s));
    } while (advance(l));
  }
  return out;
}

namespace {

DesignPoint make_point(const AdderConfig& cfg, AnalyticMetrics error, const TechConstants& tc) {
  return DesignPoint{cfg, canonical_string(cfg), std::move(error), adder_estimate(cfg, tc), is_loa_equivalent(cfg)};
}

using Wide = __int128;

BigInt to_big(Wide v) {
  bool negative = v < 0;
  auto mag = static_cast<unsigned __int128>(negative ? -v : v);
  BigInt out = BigInt(static_cast<std::uint64_t>(mag >> 64)) << 64;
  out |= BigInt(static_cast<std::uint64_t>(mag));
  return negative ? BigInt(-out) : out;
}

// Block error distribution as integer counts over 4^H.
struct BlockCounts {
  std::vector<std::int64_t> values;
  std::vector<Wide> counts;
};

BlockCounts block_counts(const BlockSpec& spec) {
  Pmf pmf = block_error_pmf(spec);
  const unsigned exp = 2 * spec.width;
  if (pmf.exp() > exp)
    throw std::logic_error("block PMF finer than 4^-H");
  BlockCounts bc;
  for (const auto& e : pmf.entries()) {
    bc.values.push_back(e.value);
    bc.counts.push_back(static_cast<Wide>((e.weight << (exp - pmf.exp())).convert_to<long long>()));
  }
  return bc;
}

// Error distribution of the blocks below the top approximate block, with
// cumulative sums for O(log n) evaluation of E|X + shift|.
struct PrefixDistribution {
  std::vector<std::int64_t> keys;
  std::vector<Wide> counts;
  std::vector<Wide> cum_counts;  // sum of counts[0..i)
  std::vector<Wide> cum_moment;  // sum of counts*keys over [0..i)
  Wide total = 0, moment = 0, square = 0;
};

constexpr std::int64_t kMaxDenseRange = std::int64_t{1} << 24;

std::optional<PrefixDistribution> build_prefix(const std::vector<const BlockCounts*>& blocks, unsigned h) {
  std::int64_t lo = 0, hi = 0;
  std::vector<Wide> dense{1};
  for (std::size_t j = 0; j < blocks.size(); ++j) {
    const auto& b = *blocks[j];
    const std::int64_t w = std::int64_t{1} << (j * h);
    std::int64_t nlo = lo + w * b.values.front(), nhi = hi + w * b.values.back();
    if (nhi - nlo + 1 > kMaxDenseRange)
      return std::nullopt;
    std::vector<Wide> next(static_cast<std::size_t>(nhi - nlo + 1), 0);
    for (std::size_t v = 0; v < b.values.size(); ++v) {
      const std::int64_t base = lo + w * b.values[v] - nlo;
      const Wide c = b.counts[v];
      for (std::size_t k = 0; k < dense.size(); ++k)
        if (dense[k])
          next[static_cast<std::size_t>(base) + k] += dense[k] * c;
    }
    dense = std::move(next);
    lo = nlo;
    hi = nhi;
  }
  PrefixDistribution p;
  for (std::size_t k = 0; k < dense.size(); ++k) {
    if (!dense[k])
      continue;
    const std::int64_t key = lo + static_cast<std::int64_t>(k);
    p.cum_counts.push_back(p.total);
    p.cum_moment.push_back(p.moment);
    p.keys.push_back(key);
    p.counts.push_back(dense[k]);
    p.total += dense[k];
    p.moment += dense[k] * key;
    p.square += dense[k] * key * key;
  }
  return p;
}

// Metrics of X + w*Y for X ~ prefix and Y ~ top block, exact over 4^(a*H).
AnalyticMetrics leaf_metrics(const PrefixDistribution& p, const BlockCounts& top, unsigned top_index, unsigned h,
                             unsigned bits) {
  const Wide w = Wide{1} << (top_index * h);
  Wide abs_sum = 0, sq_sum = 0, zero = 0;
  std::uint64_t max_ed = 0;
  for (std::size_t v = 0; v < top.values.size(); ++v) {
    const Wide shift = w * top.values[v];
    const Wide d = top.counts[v];
    // Entries with key + shift < 0 contribute with flipped sign.
    auto first_nonneg = std::lower_bound(p.keys.begin(), p.keys.end(), shift,
                                         [](std::int64_t k, Wide s) { return Wide{k} + s < 0; });
    const std::size_t i = static_cast<std::size_t>(first_nonneg - p.keys.begin());
    const Wide neg_count = i < p.keys.size() ? p.cum_counts[i] : p.total;
    const Wide neg_moment = i < p.keys.size() ? p.cum_moment[i] : p.moment;
    const Wide signed_sum = p.moment + shift * p.total;
    const Wide neg_sum = neg_moment + shift * neg_count;
    abs_sum += d * (signed_sum - 2 * neg_sum);
    sq_sum += d * (p.square + 2 * shift * p.moment + shift * shift * p.total);
    if (first_nonneg != p.keys.end() && Wide{*first_nonneg} + shift == 0)
      zero += d * p.counts[i];
    for (Wide end : {Wide{p.keys.front()} + shift, Wide{p.keys.back()} + shift}) {
      auto mag = static_cast<std::uint64_t>(end < 0 ? -end : end);
      max_ed = std::max(max_ed, mag);
    }
  }
  const unsigned exp = 2 * h * (top_index + 1);
  AnalyticMetrics m;
  m.error_rate = DyadicProb::one() - DyadicProb(to_big(zero), exp);
  m.med = Dyadic(to_big(abs_sum), exp);
  m.mse = Dyadic(to_big(sq_sum), exp);
  m.max_ed = max_ed;
  m.nmed = m.med.to_double() / nmed_divisor(bits);
  return m;
}

std::uint64_t spec_key(const BlockSpec& b) { return (std::uint64_t{b.or_bits} << 32) | b.chain_bits; }

} // namespace

DesignPoint evaluate_point(const AdderConfig& cfg, const TechConstants& tc) {
  return make_point(cfg, metrics_from_pmf(adder_error_pmf(cfg), cfg.bits()), tc);
}

std::vector<DesignPoint> evaluate_all(const std::vector<AdderConfig>& configs, const TechConstants& tc,
                                      unsigned workers) {
  std::vector<std::optional<DesignPoint>> slots(configs.size());

  // Memoized block tables, one per distinct (H, L, S).
  std::map<std::pair<unsigned, std::uint64_t>, BlockCounts> tables;
  for (const auto& cfg : configs)
    for (unsigned i = 0; i < cfg.approx_count(); ++i)
      tables.try_emplace({cfg.block_size(), spec_key(cfg.block(i))});
  std::vector<std::pair<const std::pair<unsigned, std::uint64_t>, BlockCounts>*> table_slots;
  for (auto& entry : tables)
    table_slots.push_back(&entry);
  parallel_for(table_slots.size(), workers, [&](std::size_t i) {
    auto& [key, counts] = *table_slots[i];
    counts = block_counts(BlockSpec::approximate(key.first, static_cast<unsigned>(key.second >> 32),
                                                 static_cast<unsigned>(key.second & 0xffffffffu)));
  });
  auto table_for = [&](const AdderConfig& cfg, unsigned i) -> const BlockCounts& {
    return tables.at({cfg.block_size(), spec_key(cfg.block(i))});
  };

  // Group configs sharing everything but the top approximate block.
  std::map<std::vector<std::uint64_t>, std::vector<std::size_t>> groups;
  for (std::size_t idx = 0; idx < configs.size(); ++idx) {
    const auto& cfg = configs[idx];
    std::vector<std::uint64_t> key{cfg.bits(), cfg.block_size(), cfg.approx_count()};
    for (unsigned i = 0; i + 1 < cfg.approx_count(); ++i)
      key.push_back(spec_key(cfg.block(i)));
    groups[key].push_back(idx);
  }
  std::vector<const std::vector<std::size_t>*> group_list;
  for (const auto& [key, members] : groups)
    group_list.push_back(&members);

  parallel_for(group_list.size(), workers, [&](std::size_t g) {
    const auto& members = *group_list[g];
    const AdderConfig& first = configs[members.front()];
    const unsigned a = first.approx_count(), h = first.block_size();
    // Exact integer fast path while 4^(aH)-scaled sums fit in 128 bits.
    std::optional<PrefixDistribution> prefix;
    if (a > 0 && a * h <= 30) {
      std::vector<const BlockCounts*> lower;
      for (unsigned i = 0; i + 1 < a; ++i)
        lower.push_back(&table_for(first, i));
      prefix = build_prefix(lower, h);
    }
    for (std::size_t idx : members) {
      const AdderConfig& cfg = configs[idx];
      if (a == 0)
        slots[idx] = make_point(cfg, metrics_from_pmf(Pmf::point(0), cfg.bits()), tc);
      else if (prefix)
        slots[idx] = make_point(cfg, leaf_metrics(*prefix, table_for(cfg, a - 1), a - 1, h, cfg.bits()), tc);
      else
        slots[idx] = evaluate_point(cfg, tc);
    }
  });

  std::vector<DesignPoint> out;
  out.reserve(slots.size());
  for (auto& s : slots)
    out.push_back(std::move(*s));
  return out;
}

std::vector<DesignPoint> pareto_front(const std::vector<DesignPoint>& points, std::pair<Metric, Metric> axes) {
  if (points.empty())
    throw std::invalid_argument("pareto_front: empty point set");
  auto [x, y] = axes;
  std::vector<const DesignPoint*> order;
  for (const auto& p : points)
    order.push_back(&p);
  std::sort(order.begin(), order.end(), [&](const DesignPoint* a, const DesignPoint* b) {
    if (auto c = compare_on(*a, *b, x); c != 0)
      return c < 0;
    if (auto c = compare_on(*a, *b, y); c != 0)
      return c < 0;
    return a->name < b->name;
  });
  std::vector<DesignPoint> front;
  const DesignPoint* best_before = nullptr; // min-y point over strictly smaller x
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && compare_on(*order[j], *order[i], x) == 0)
      ++j;
    // order[i] has the group's minimal y; keep every point tied with it.
    if (!best_before || compare_on(*order[i], *best_before, y) < 0) {
      for (std::size_t k = i; k < j && compare_on(*order[k], *order[i], y) == 0; ++k)
        front.push_back(*order[k]);
      best_before = order[i];
    }
    i = j;
  }
  return front;
}

Selection select_optimal(const std::vector<DesignPoint>& points, const std::vector<Constraint>& constraints,
                         Metric objective) {
  Selection sel;
  const DesignPoint* best = nullptr;
  for (const auto& p : points) {
    bool ok = std::all_of(constraints.begin(), constraints.end(), [&](const Constraint& c) { return satisfies(p, c); });
    if (!ok)
      continue;
    ++sel.feasible_count;
    if (!best) {
      best = &p;
      continue;
    }
    auto c = compare_on(p, *best, objective);
    if (c == 0)
      c = p.error.med <=> best->error.med;
    if (c == 0)
      c = p.name <=> best->name;
    if (c < 0)
      best = &p;
  }
  if (best) {
    sel.best = *best;
    return sel;
  }
  Infeasibility inf;
  bool first = true;
  for (const auto& c : constraints) {
    std::size_t count = 0;
    double lowest = 0;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (satisfies(points[i], c))
        ++count;
      double v = points[i].value(c.metric);
      lowest = i == 0 ? v : std::min(lowest, v);
    }
    if (first || count < inf.satisfied_alone) {
      inf = {c, count, lowest};
      first = false;
    }
  }
  sel.infeasible = inf;
  return sel;
}

Selection select_optimal(const ExplorationSpec& spec, const TechConstants& tc) {
  return select_optimal(evaluate_all(enumerate_configs(spec), tc, spec.workers), spec.constraints, spec.objective);
}

} // namespace hbba
