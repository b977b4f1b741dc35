#include <iostream>

#include "CLI11.hpp"
#include "hbba/commands.hpp"

namespace {

void add_common(CLI::App* cmd, hbba::CommandOptions& o) {
  cmd->add_option("--bits,-n", o.bits, "adder width N");
  cmd->add_option("--block,-k", o.block, "block size H");
  cmd->add_option("--out,-o", o.out, "output file");
  cmd->add_option("--workers,-j", o.workers, "worker threads")->check(CLI::Range(1u, 256u));
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Approximate block-based adder analysis and design exploration"};
  app.require_subcommand(1);
  hbba::CommandOptions o;

  auto* analyze = app.add_subcommand("analyze", "exact error distribution and metrics");
  add_common(analyze, o);
  analyze->add_option("--config,-c", o.config, "config text, JSON, or file")->required();

  auto* simulate = app.add_subcommand("simulate", "bit-exact simulation metrics");
  add_common(simulate, o);
  simulate->add_option("--config,-c", o.config, "config text, JSON, or file")->required();
  simulate->add_option("--mode", o.mode, "exhaustive or montecarlo")
      ->check(CLI::IsMember({"exhaustive", "montecarlo"}));
  simulate->add_option("--samples", o.samples, "Monte Carlo sample count");
  simulate->add_option("--seed", o.seed, "Monte Carlo seed");
  simulate->add_option("--exhaustive-max-bits", o.exhaustive_max_bits, "largest N allowed exhaustively");

  auto* estimate = app.add_subcommand("estimate", "gate-level hardware estimate");
  add_common(estimate, o);
  estimate->add_option("--config,-c", o.config, "config text, JSON, or file")->required();
  estimate->add_option("--tech", o.tech, "technology constants file");

  auto* explore = app.add_subcommand("explore", "enumerate the design space");
  add_common(explore, o);
  explore->add_option("--max-blocks", o.max_blocks, "most approximate blocks per config");
  explore->add_option("--constraint", o.constraints, "bound such as med<=20 (repeatable)");
  explore->add_option("--objective", o.objective, "metric to minimize");
  explore->add_option("--axes", o.axes, "Pareto axes, e.g. med,delay");
  explore->add_flag("--pareto", o.pareto, "list the Pareto front in the summary");
  explore->add_flag("--loa-only", o.loa_only, "restrict to lower-part-OR configurations");
  explore->add_option("--tech", o.tech, "technology constants file");

  auto* validate = app.add_subcommand("validate", "cross-check analytic, simulated and reference values");
  add_common(validate, o);
  validate->add_option("--list", o.list, "validation list file")->required();
  validate->add_option("--samples", o.samples, "Monte Carlo samples per config");
  validate->add_option("--seed", o.seed, "Monte Carlo seed");
  validate->add_option("--exhaustive-max-bits", o.exhaustive_max_bits, "largest N checked exhaustively");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : hbba::kExitUsage;
  }

  if (analyze->parsed())
    return hbba::run_analyze(o, std::cout, std::cerr);
  if (simulate->parsed())
    return hbba::run_simulate(o, std::cout, std::cerr);
  if (estimate->parsed())
    return hbba::run_estimate(o, std::cout, std::cerr);
  if (explore->parsed())
    return hbba::run_explore(o, std::cout, std::cerr);
  return hbba::run_validate(o, std::cout, std::cerr);
}
