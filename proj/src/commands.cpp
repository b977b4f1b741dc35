#include "hbba/commands.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace hbba {

using nlohmann::ordered_json;

namespace {

// Monte Carlo agreement threshold for configs the analytic model covers exactly.
constexpr double kMcZTolerance = 5.0;

ordered_json exact_json(const Dyadic& d) { return {{"num", d.num().str()}, {"exp2", d.exp()}}; }

ordered_json tech_json(const TechConstants& tc) {
  return {{"source", tc.source}, {"c_d_ps", tc.c_d_ps}, {"c_a_um2", tc.c_a_um2}, {"c_p_uw", tc.c_p_uw}};
}

TechConstants load_tech(const CommandOptions& o) {
  if (o.tech.empty())
    return {};
  return load_tech_file(o.tech);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

AdderConfig load_config(const CommandOptions& o) {
  if (o.config.empty())
    throw ConfigError("missing --config");
  std::string text = o.config;
  auto first = text.find_first_not_of(" \t\r\n");
  bool inline_form = first != std::string::npos && (text[first] == '{' || text.compare(first, 4, "HBBA") == 0);
  if (!inline_form && std::filesystem::is_regular_file(text))
    text = read_file(text);
  return parse_config_any(text, o.bits, o.block);
}

void write_to(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary);
  if (!f)
    throw std::runtime_error("cannot write " + path);
  f << content;
  if (!f)
    throw std::runtime_error("write failed: " + path);
}

int guarded(std::ostream& err, const std::function<int()>& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitParse;
  } catch (const BudgetError& e) {
    err << "budget exceeded: " << e.what() << '\n';
    return kExitBudget;
  } catch (const std::invalid_argument& e) {
    err << "invalid argument: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitIo;
  }
}

ordered_json empirical_json(const EmpiricalMetrics& m, bool sampled) {
  ordered_json j{{"sample_count", m.sample_count},
                 {"error_count", m.error_count},
                 {"error_rate", m.error_rate},
                 {"med", m.med},
                 {"mse", m.mse},
                 {"nmed", m.nmed},
                 {"mred", m.mred},
                 {"max_ed", m.max_ed},
                 {"sum_abs_error", m.sum_abs_error.str()},
                 {"sum_sq_error", m.sum_sq_error.str()}};
  if (sampled) {
    j["er_stderr"] = m.er_stderr;
    j["med_stderr"] = m.med_stderr;
  }
  if (m.histogram_truncated) {
    j["histogram"] = nullptr;
  } else {
    ordered_json h = ordered_json::array();
    for (auto [k, v] : m.histogram)
      h.push_back({k, v});
    j["histogram"] = h;
  }
  j["histogram_truncated"] = m.histogram_truncated;
  return j;
}

} // namespace

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ptr);
  if (std::isfinite(v) && s.find_first_of(".e") == std::string::npos)
    s += ".0";
  return s;
}

std::string pmf_csv(const Pmf& pmf) {
  std::string out = "error_value,prob_num,prob_exp2,prob_float\n";
  for (const auto& e : pmf.entries()) {
    DyadicProb p(e.weight, pmf.exp());
    out += std::to_string(e.value) + ',' + p.num().str() + ',' + std::to_string(p.exp()) + ',' +
           format_double(p.to_double()) + '\n';
  }
  return out;
}

int run_analyze(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    AdderConfig cfg = load_config(o);
    Pmf pmf = adder_error_pmf(cfg);
    AnalyticMetrics m = metrics_from_pmf(pmf, cfg.bits());
    DyadicProb union_rate = adder_error_rate(cfg);
    ordered_json j{{"command", "analyze"},
                   {"config", canonical_string(cfg)},
                   {"n", cfg.bits()},
                   {"h", cfg.block_size()},
                   {"er", m.error_rate.to_double()},
                   {"er_exact", exact_json(m.error_rate)},
                   {"med", m.med.to_double()},
                   {"med_exact", exact_json(m.med)},
                   {"mse", m.mse.to_double()},
                   {"mse_exact", exact_json(m.mse)},
                   {"nmed", m.nmed},
                   {"max_ed", m.max_ed},
                   {"block_union_er", union_rate.to_double()},
                   {"block_union_er_exact", exact_json(union_rate)},
                   {"carry_isolated", cfg.carry_isolated()},
                   {"pmf_entries", pmf.size()}};
    if (!o.out.empty()) {
      write_to(o.out, pmf_csv(pmf));
      j["pmf_csv"] = o.out;
    } else {
      j["pmf_csv"] = nullptr;
    }
    out << j.dump(2) << '\n';
    return kExitOk;
  });
}

int run_simulate(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    AdderConfig cfg = load_config(o);
    ordered_json j{{"command", "simulate"},
                   {"config", canonical_string(cfg)},
                   {"n", cfg.bits()},
                   {"h", cfg.block_size()},
                   {"mode", o.mode}};
    if (o.mode == "exhaustive") {
      auto m = exhaustive_metrics(cfg, {o.exhaustive_max_bits, o.workers});
      j["metrics"] = empirical_json(m, false);
    } else if (o.mode == "montecarlo") {
      if (o.samples == 0)
        throw std::invalid_argument("--samples must be at least 1");
      auto m = montecarlo_metrics(cfg, o.samples, o.seed, o.workers);
      j["samples"] = o.samples;
      j["seed"] = o.seed;
      j["metrics"] = empirical_json(m, true);
    } else {
      throw std::invalid_argument("--mode must be exhaustive or montecarlo");
    }
    std::string doc = j.dump(2) + '\n';
    if (o.out.empty())
      out << doc;
    else
      write_to(o.out, doc);
    return kExitOk;
  });
}

int run_estimate(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    AdderConfig cfg = load_config(o);
    TechConstants tc = load_tech(o);
    HardwareEstimate est = adder_estimate(cfg, tc);
    ordered_json blocks = ordered_json::array();
    for (const auto& b : cfg.blocks())
      blocks.push_back({{"kind", b.is_approximate() ? "approximate" : "accurate"},
                        {"l", b.or_bits},
                        {"s", b.chain_bits},
                        {"gates", block_area_gates(b)},
                        {"depth", block_depth(b)},
                        {"delay_ps", block_delay(b, tc)}});
    ordered_json j{{"command", "estimate"},
                   {"config", canonical_string(cfg)},
                   {"n", cfg.bits()},
                   {"h", cfg.block_size()},
                   {"tech", tech_json(tc)},
                   {"delay_ps", est.delay_ps},
                   {"area_um2", est.area_um2},
                   {"power_uw", est.power_uw},
                   {"energy_aj", est.energy_aj},
                   {"gate_count", est.gate_count},
                   {"gate_depth", est.gate_depth},
                   {"blocks", blocks}};
    std::string doc = j.dump(2) + '\n';
    if (o.out.empty())
      out << doc;
    else
      write_to(o.out, doc);
    return kExitOk;
  });
}

std::string explore_csv(const std::vector<DesignPoint>& points, const std::vector<bool>& pareto,
                        const std::vector<bool>& feasible, const TechConstants& tc) {
  std::string out = "# tech source=" + tc.source + " c_d_ps=" + format_double(tc.c_d_ps) +
                    " c_a_um2=" + format_double(tc.c_a_um2) + " c_p_uw=" + format_double(tc.c_p_uw) + '\n';
  out += "config,med,er,nmed,max_ed,delay_ps,area_um2,power_uw,energy_aj,pareto,loa,feasible,med_exact,er_exact\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    out += '"' + p.name + "\"," + format_double(p.error.med.to_double()) + ',' +
           format_double(p.error.error_rate.to_double()) + ',' + format_double(p.error.nmed) + ',' +
           std::to_string(p.error.max_ed) + ',' + format_double(p.hw.delay_ps) + ',' + format_double(p.hw.area_um2) +
           ',' + format_double(p.hw.power_uw) + ',' + format_double(p.hw.energy_aj) + ',' + (pareto[i] ? '1' : '0') +
           ',' + (p.loa ? '1' : '0') + ',' + (feasible[i] ? '1' : '0') + ',' + p.error.med.to_fraction_string() + ',' +
           p.error.error_rate.to_fraction_string() + '\n';
  }
  return out;
}

int run_explore(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (!o.bits || !o.block)
      throw std::invalid_argument("explore needs --bits and --block");
    ExplorationSpec spec;
    spec.bits = *o.bits;
    spec.block_size = *o.block;
    AdderConfig::exact(spec.bits, spec.block_size);
    spec.max_approx_blocks = o.max_blocks.value_or(spec.bits / spec.block_size);
    for (const auto& c : o.constraints)
      spec.constraints.push_back(parse_constraint(c));
    spec.objective = parse_metric(o.objective);
    spec.pareto_axes = {Metric::Med, spec.objective};
    if (!o.axes.empty()) {
      auto comma = o.axes.find(',');
      if (comma == std::string::npos)
        throw std::invalid_argument("--axes expects two comma-separated metrics");
      spec.pareto_axes = {parse_metric(o.axes.substr(0, comma)), parse_metric(o.axes.substr(comma + 1))};
    }
    spec.loa_only = o.loa_only;
    spec.workers = o.workers;
    spec.validate();
    TechConstants tc = load_tech(o);

    auto configs = enumerate_configs(spec);
    auto points = evaluate_all(configs, tc, spec.workers);
    if (points.empty())
      throw std::invalid_argument("empty design space");

    std::vector<bool> feasible(points.size()), on_front(points.size(), false);
    for (std::size_t i = 0; i < points.size(); ++i) {
      bool ok = true;
      for (const auto& c : spec.constraints)
        ok = ok && satisfies(points[i], c);
      feasible[i] = ok;
    }
    auto front = pareto_front(points, spec.pareto_axes);
    std::set<std::string> front_names;
    for (const auto& p : front)
      front_names.insert(p.name);
    for (std::size_t i = 0; i < points.size(); ++i)
      on_front[i] = front_names.count(points[i].name) > 0;

    Selection sel = select_optimal(points, spec.constraints, spec.objective);

    ordered_json summary{{"command", "explore"},
                         {"n", spec.bits},
                         {"h", spec.block_size},
                         {"max_blocks", spec.max_approx_blocks},
                         {"loa_only", spec.loa_only},
                         {"tech", tech_json(tc)},
                         {"points", points.size()},
                         {"feasible", sel.feasible_count},
                         {"objective", metric_name(spec.objective)},
                         {"pareto_axes", {metric_name(spec.pareto_axes.first), metric_name(spec.pareto_axes.second)}}};
    if (sel.best) {
      const auto& b = *sel.best;
      summary["optimal"] = {{"config", b.name},
                            {"med", b.error.med.to_double()},
                            {"er", b.error.error_rate.to_double()},
                            {"delay_ps", b.hw.delay_ps},
                            {"area_um2", b.hw.area_um2},
                            {"power_uw", b.hw.power_uw},
                            {"energy_aj", b.hw.energy_aj}};
    } else {
      summary["optimal"] = nullptr;
    }
    if (sel.infeasible) {
      const auto& inf = *sel.infeasible;
      summary["infeasible"] = {{"tightest_constraint", std::string(metric_name(inf.tightest.metric)) +
                                                           "<=" + format_double(inf.tightest.bound)},
                               {"satisfied_alone", inf.satisfied_alone},
                               {"best_achievable", inf.best_achievable}};
    }
    if (o.pareto) {
      ordered_json names = ordered_json::array();
      for (const auto& p : front)
        names.push_back(p.name);
      summary["pareto"] = names;
    }

    std::string csv = explore_csv(points, on_front, feasible, tc);
    if (o.out.empty()) {
      out << csv;
      err << summary.dump(2) << '\n';
    } else {
      write_to(o.out, csv);
      out << summary.dump(2) << '\n';
    }
    if (sel.infeasible) {
      err << "infeasible: no configuration satisfies all constraints; tightest is "
          << metric_name(sel.infeasible->tightest.metric) << "<=" << format_double(sel.infeasible->tightest.bound)
          << '\n';
      return kExitInfeasible;
    }
    return kExitOk;
  });
}

std::vector<ValidationEntry> parse_validation_list(std::istream& in) {
  std::vector<ValidationEntry> entries;
  std::string line;
  while (std::getline(in, line)) {
    auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#')
      continue;
    std::istringstream fields(line);
    ValidationEntry e;
    std::string med, er;
    if (!(fields >> e.config_text >> e.bits >> e.block))
      throw ConfigError("validation list: expected '<config> <N> <H> [ref_med] [ref_er]': " + line);
    if (fields >> med && med != "-")
      e.ref_med = med;
    if (fields >> er && er != "-")
      e.ref_er = er;
    entries.push_back(std::move(e));
  }
  return entries;
}

bool matches_published(double value, const std::string& reference) {
  double ref = std::stod(reference);
  auto dot = reference.find('.');
  int decimals = dot == std::string::npos ? 0 : static_cast<int>(reference.size() - dot - 1);
  return std::fabs(value - ref) <= 0.5 * std::pow(10.0, -decimals) + 1e-12;
}

int run_validate(const CommandOptions& o, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (o.list.empty())
      throw std::invalid_argument("validate needs --list");
    if (o.samples == 0)
      throw std::invalid_argument("--samples must be at least 1");
    std::ifstream list_in(o.list);
    if (!list_in)
      throw std::runtime_error("cannot read " + o.list);
    auto entries = parse_validation_list(list_in);

    std::string csv = "config,n,h,metric,analytic,analytic_exact,exact_condition,montecarlo,mc_stderr,mc_dev_pct,"
                      "mc_z,exhaustive,exhaustive_match,reference,ref_dev_pct,flag\n";
    int failures = 0;
    for (const auto& e : entries) {
      AdderConfig cfg = parse_config_any(e.config_text, e.bits, e.block);
      AnalyticMetrics am = metrics_from_pmf(adder_error_pmf(cfg), cfg.bits());
      EmpiricalMetrics mc = montecarlo_metrics(cfg, o.samples, o.seed, o.workers);
      std::optional<EmpiricalMetrics> ex;
      if (cfg.bits() <= o.exhaustive_max_bits)
        ex = exhaustive_metrics(cfg, {o.exhaustive_max_bits, o.workers});
      const bool exact_condition = cfg.carry_isolated();
      const BigInt pairs = BigInt(1) << (2 * cfg.bits());

      struct Row {
        const char* metric;
        const Dyadic& analytic;
        double mc_value, mc_stderr;
        const std::optional<std::string>& reference;
      };
      const Row rows[] = {{"med", am.med, mc.med, mc.med_stderr, e.ref_med},
                          {"er", am.error_rate, mc.error_rate, mc.er_stderr, e.ref_er}};
      for (const auto& r : rows) {
        const double a = r.analytic.to_double();
        const double dev = std::fabs(a - r.mc_value) / std::max(r.mc_value, 1e-12) * 100.0;
        const double z = r.mc_stderr > 0 ? (a - r.mc_value) / r.mc_stderr : (a == r.mc_value ? 0.0 : INFINITY);
        std::vector<std::string> flags;
        std::string ex_value, ex_match;
        if (ex) {
          Dyadic exact_value = std::string(r.metric) == "med" ? Dyadic(ex->sum_abs_error, 2 * cfg.bits())
                                                               : Dyadic(BigInt(ex->error_count), 2 * cfg.bits());
          (void)pairs;
          ex_value = format_double(exact_value.to_double());
          bool match = exact_value == r.analytic;
          ex_match = match ? "1" : "0";
          if (!match)
            flags.push_back("exhaustive-mismatch");
        }
        if (std::fabs(z) > kMcZTolerance)
          flags.push_back("mc-deviation");
        bool fail = exact_condition && !flags.empty();
        if (!exact_condition)
          flags.push_back("outside-exactness-condition");
        std::string ref_dev;
        if (r.reference) {
          double ref = std::stod(*r.reference);
          ref_dev = format_double(std::fabs(a - ref) / std::max(std::fabs(ref), 1e-12) * 100.0);
          if (!matches_published(a, *r.reference))
            flags.push_back("reference-deviation");
        }
        if (fail)
          ++failures;
        std::string flag;
        for (const auto& f : flags)
          flag += (flag.empty() ? "" : "|") + f;
        if (flag.empty())
          flag = "ok";
        csv += '"' + canonical_string(cfg) + "\"," + std::to_string(cfg.bits()) + ',' +
               std::to_string(cfg.block_size()) + ',' + r.metric + ',' + format_double(a) + ',' +
               r.analytic.to_fraction_string() + ',' + (exact_condition ? '1' : '0') + ',' +
               format_double(r.mc_value) + ',' + format_double(r.mc_stderr) + ',' + format_double(dev) + ',' +
               format_double(z) + ',' + ex_value + ',' + ex_match + ',' + r.reference.value_or("") + ',' +
               ref_dev + ',' + flag + '\n';
      }
    }
    if (o.out.empty())
      out << csv;
    else
      write_to(o.out, csv);
    err << "validated " << entries.size() << " configs with " << o.samples << " samples each; " << failures
        << " failing rows\n";
    return failures ? kExitValidation : kExitOk;
  });
}

} // namespace hbba
