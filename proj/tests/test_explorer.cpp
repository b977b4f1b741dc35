#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <tuple>

#include "hbba/explorer.hpp"

using namespace hbba;

namespace {

ExplorationSpec space(unsigned n, unsigned h, unsigned max_blocks) {
  ExplorationSpec s;
  s.bits = n;
  s.block_size = h;
  s.max_approx_blocks = max_blocks;
  return s;
}

bool dominates(const DesignPoint& a, const DesignPoint& b, Metric x, Metric y) {
  return a.value(x) <= b.value(x) && a.value(y) <= b.value(y) && (a.value(x) < b.value(x) || a.value(y) < b.value(y));
}

const std::vector<DesignPoint>& space_8_4() {
  static const auto points = evaluate_all(enumerate_configs(space(8, 4, 2)), TechConstants{});
  return points;
}

// Plain scan: feasible by floating comparison, then objective, med, name.
std::optional<std::string> scan_optimal(const std::vector<DesignPoint>& pts, const std::vector<Constraint>& cs,
                                        Metric objective) {
  const DesignPoint* best = nullptr;
  for (const auto& p : pts) {
    bool ok = std::all_of(cs.begin(), cs.end(), [&](const Constraint& c) { return p.value(c.metric) <= c.bound; });
    if (!ok)
      continue;
    if (!best || std::make_tuple(p.value(objective), p.value(Metric::Med), p.name) <
                     std::make_tuple(best->value(objective), best->value(Metric::Med), best->name))
      best = &p;
  }
  if (!best)
    return std::nullopt;
  return best->name;
}

} // namespace

TEST_CASE("space sizes") {
  CHECK(enumerate_configs(space(8, 4, 1)).size() == 26);
  CHECK(enumerate_configs(space(8, 4, 2)).size() == 651);
  CHECK(enumerate_configs(space(8, 4, 0)).size() == 1);
  CHECK(enumerate_configs(space(8, 2, 4)).size() == 1 + 9 + 81 + 729 + 6561);
  auto loa = space(8, 4, 2);
  loa.loa_only = true;
  auto loa_cfgs = enumerate_configs(loa);
  CHECK(loa_cfgs.size() == 10);
  for (const auto& c : loa_cfgs)
    CHECK(is_loa_equivalent(c));
}

TEST_CASE("enumeration order") {
  auto cfgs = enumerate_configs(space(8, 4, 2));
  CHECK(canonical_string(cfgs[0]) == "HBBA{[],[]}");
  CHECK(canonical_string(cfgs[1]) == "HBBA{[0],[0]}");
  CHECK(canonical_string(cfgs[2]) == "HBBA{[0],[1]}");
  CHECK(canonical_string(cfgs[26]) == "HBBA{[0,0],[0,0]}");
  CHECK(canonical_string(cfgs.back()) == "HBBA{[4,4],[4,4]}");
  for (std::size_t i = 1; i < cfgs.size(); ++i) {
    auto key = [](const AdderConfig& c) { return std::make_tuple(c.approx_count(), c.or_vector(), c.chain_vector()); };
    CHECK(key(cfgs[i - 1]) < key(cfgs[i]));
  }
}

TEST_CASE("LOA membership") {
  CHECK(is_loa_equivalent(parse_config("HBBA{[4,2],[0,0]}", 16, 4)));
  CHECK(is_loa_equivalent(parse_config("HBBA{[3],[0]}", 16, 4)));
  CHECK_FALSE(is_loa_equivalent(parse_config("HBBA{[3,2],[0,0]}", 16, 4)));
  CHECK_FALSE(is_loa_equivalent(parse_config("HBBA{[4,2],[0,1]}", 16, 4)));
  CHECK(is_loa_equivalent(parse_config("HBBA{[],[]}", 16, 4)));
  CHECK_FALSE(is_loa_equivalent(parse_config("HBBA{[0],[0]}", 16, 4)));
}

TEST_CASE("evaluate_point examples") {
  TechConstants tc;
  auto exact = evaluate_point(AdderConfig::exact(16, 4), tc);
  CHECK(exact.error.med.is_zero());
  CHECK(exact.error.error_rate.is_zero());
  CHECK(exact.hw.delay_ps == doctest::Approx(485.6));
  CHECK(evaluate_point(parse_config("HBBA{[2,2],[0,2]}", 16, 4), tc).value(Metric::Med) == 18.75);
  CHECK(evaluate_point(parse_config("HBBA{[2,2],[0,0]}", 16, 4), tc).value(Metric::Er) ==
        doctest::Approx(0.876403809).epsilon(1e-9));
}

TEST_CASE("batched evaluation equals single evaluation") {
  TechConstants tc;
  for (auto [n, h, k] : {std::tuple{8u, 4u, 2u}, {8u, 2u, 4u}, {12u, 4u, 3u}, {12u, 3u, 2u}, {16u, 8u, 2u}}) {
    auto cfgs = enumerate_configs(space(n, h, k));
    auto batch = evaluate_all(cfgs, tc, 3);
    REQUIRE(batch.size() == cfgs.size());
    bool ok = true;
    for (std::size_t i = 0; i < cfgs.size(); ++i) {
      auto single = evaluate_point(cfgs[i], tc);
      bool same = batch[i].name == single.name && batch[i].error == single.error && batch[i].loa == single.loa &&
                  batch[i].hw.gate_count == single.hw.gate_count && batch[i].hw.delay_ps == single.hw.delay_ps;
      if (!same)
        MESSAGE("mismatch at " << single.name);
      ok = ok && same;
    }
    CHECK_MESSAGE(ok, "N=" << n << " H=" << h);
  }
}

TEST_CASE("wide spaces fall back to single evaluation") {
  TechConstants tc;
  std::vector<AdderConfig> cfgs{parse_config("HBBA{[4,4,4,4],[0,0,1,3]}", 32, 8),
                                parse_config("HBBA{[12,3],[0,5]}", 48, 12)};
  auto batch = evaluate_all(cfgs, tc, 2);
  for (std::size_t i = 0; i < cfgs.size(); ++i)
    CHECK(batch[i].error == evaluate_point(cfgs[i], tc).error);
}

TEST_CASE("pareto front basics") {
  TechConstants tc;
  auto a = evaluate_point(AdderConfig::exact(8, 4), tc);
  CHECK(pareto_front({a}, {Metric::Med, Metric::Delay}).size() == 1);
  CHECK_THROWS(pareto_front({}, {Metric::Med, Metric::Delay}));
  // Same delay, worse error: dominated.
  auto b = evaluate_point(parse_config("HBBA{[1],[4]}", 8, 4), tc);
  auto c = evaluate_point(parse_config("HBBA{[0],[4]}", 8, 4), tc);
  REQUIRE(b.hw.delay_ps == c.hw.delay_ps);
  REQUIRE(c.error.med < b.error.med);
  auto front = pareto_front({b, c}, {Metric::Med, Metric::Delay});
  REQUIRE(front.size() == 1);
  CHECK(front[0].name == c.name);
}

TEST_CASE("pareto invariants on the 8-bit space") {
  const auto& pts = space_8_4();
  for (auto axes : {std::pair{Metric::Med, Metric::Delay}, {Metric::Er, Metric::Area}, {Metric::Med, Metric::Energy},
                    {Metric::MaxEd, Metric::Power}}) {
    auto front = pareto_front(pts, axes);
    for (std::size_t i = 0; i < front.size(); ++i)
      for (std::size_t j = 0; j < front.size(); ++j)
        if (i != j)
          CHECK_FALSE(dominates(front[i], front[j], axes.first, axes.second));
    for (const auto& p : pts) {
      bool covered = std::any_of(front.begin(), front.end(), [&](const DesignPoint& q) {
        return q.value(axes.first) <= p.value(axes.first) && q.value(axes.second) <= p.value(axes.second);
      });
      CHECK_MESSAGE(covered, p.name);
    }
    for (std::size_t i = 1; i < front.size(); ++i)
      CHECK(front[i - 1].value(axes.first) <= front[i].value(axes.first));
    CHECK(pareto_front(pts, axes).size() == front.size());
  }
}

TEST_CASE("LOA points are dominated or matched by the front") {
  const auto& pts = space_8_4();
  auto front = pareto_front(pts, {Metric::Med, Metric::Delay});
  for (const auto& p : pts) {
    if (!p.loa)
      continue;
    bool covered = std::any_of(front.begin(), front.end(), [&](const DesignPoint& q) {
      return q.value(Metric::Med) <= p.value(Metric::Med) && q.value(Metric::Delay) <= p.value(Metric::Delay);
    });
    CHECK_MESSAGE(covered, p.name);
  }
}

TEST_CASE("select_optimal agrees with a plain scan") {
  const auto& pts = space_8_4();
  for (Metric objective : {Metric::Delay, Metric::Area, Metric::Power, Metric::Energy})
    for (double bound : {0.0, 0.5, 1.0, 2.0, 6.75, 11.75, 20.0, 50.0, 114.75, 1000.0}) {
      std::vector<Constraint> cs{{Metric::Med, bound}};
      auto sel = select_optimal(pts, cs, objective);
      auto expect = scan_optimal(pts, cs, objective);
      REQUIRE(expect.has_value());
      REQUIRE(sel.best.has_value());
      CHECK(sel.best->name == *expect);
      for (const auto& c : cs)
        CHECK(satisfies(*sel.best, c));
    }
  std::vector<Constraint> two{{Metric::Er, 0.5}, {Metric::MaxEd, 16}};
  CHECK(select_optimal(pts, two, Metric::Area).best->name == scan_optimal(pts, two, Metric::Area));
}

TEST_CASE("select_optimal examples") {
  TechConstants tc;
  auto s = space(8, 4, 2);
  s.constraints = {{Metric::Med, 0}};
  auto zero = select_optimal(s, tc);
  REQUIRE(zero.best);
  CHECK(zero.best->error.med.is_zero());
  CHECK(zero.best->hw.delay_ps <= evaluate_point(AdderConfig::exact(8, 4), tc).hw.delay_ps);

  s.constraints = {{Metric::Med, -1}};
  auto none = select_optimal(s, tc);
  CHECK_FALSE(none.best);
  REQUIRE(none.infeasible);
  CHECK(none.infeasible->tightest.bound == -1);
  CHECK(none.infeasible->satisfied_alone == 0);
  CHECK(none.infeasible->best_achievable == 0.0);
}

TEST_CASE("select_optimal on 16 bits with the table bound") {
  TechConstants tc;
  auto s = space(16, 4, 2);
  s.constraints = {{Metric::Med, 114.75}};
  s.objective = Metric::Area;
  auto sel = select_optimal(s, tc);
  REQUIRE(sel.best);
  CHECK(sel.best->hw.area_um2 <= evaluate_point(parse_config("HBBA{[2,2],[0,0]}", 16, 4), tc).hw.area_um2);
}

TEST_CASE("tightening a constraint never improves the optimum") {
  const auto& pts = space_8_4();
  for (Metric objective : {Metric::Delay, Metric::Area, Metric::Energy}) {
    double prev = -1;
    for (double bound : {500.0, 100.0, 40.0, 20.0, 10.0, 5.0, 2.0, 1.0, 0.0}) {
      auto sel = select_optimal(pts, {{Metric::Med, bound}}, objective);
      REQUIRE(sel.best);
      CHECK(sel.best->value(objective) >= prev);
      prev = sel.best->value(objective);
    }
  }
}

TEST_CASE("constraint parsing and exact comparison") {
  auto c = parse_constraint("med<=114.75");
  CHECK(c.metric == Metric::Med);
  CHECK(c.bound == 114.75);
  CHECK(parse_constraint("er=0.5").metric == Metric::Er);
  CHECK(parse_constraint("max_ed:16").bound == 16);
  CHECK_THROWS(parse_constraint("delay<=5"));
  CHECK_THROWS(parse_constraint("med<=abc"));
  CHECK_THROWS(parse_constraint("med"));
  CHECK_THROWS(parse_metric("speed"));
  auto p = evaluate_point(parse_config("HBBA{[2,2],[0,0]}", 16, 4), TechConstants{});
  CHECK(satisfies(p, {Metric::Med, 114.75}));
  CHECK_FALSE(satisfies(p, {Metric::Med, 114.74999999999}));
  CHECK(compare_on(p, p, Metric::Power) == std::strong_ordering::equal);
}

TEST_CASE("spec validation") {
  auto s = space(8, 4, 3);
  CHECK_THROWS(s.validate());
  s.max_approx_blocks = 2;
  s.objective = Metric::Med;
  CHECK_THROWS(s.validate());
  s.objective = Metric::Area;
  CHECK_NOTHROW(s.validate());
}

TEST_CASE("evaluation does not depend on worker count") {
  auto cfgs = enumerate_configs(space(8, 4, 2));
  TechConstants tc;
  auto one = evaluate_all(cfgs, tc, 1);
  auto many = evaluate_all(cfgs, tc, 6);
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].name == many[i].name);
    CHECK(one[i].error == many[i].error);
  }
}
