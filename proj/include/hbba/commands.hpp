#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hbba/analytics.hpp"
#include "hbba/explorer.hpp"
#include "hbba/hardware.hpp"
#include "hbba/simulator.hpp"

namespace hbba {

/// Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 1,
  kExitParse = 2,
  kExitBudget = 3,
  kExitInfeasible = 4,
  kExitValidation = 5,
  kExitIo = 6,
};

struct CommandOptions {
  std::optional<unsigned> bits;
  std::optional<unsigned> block;
  std::string config;
  std::string out;   ///< output file; empty means the command's default stream
  std::string tech;  ///< technology file; empty means built-in constants
  std::uint64_t seed = 1;
  std::uint64_t samples = 10'000'000;
  unsigned workers = 1;
  unsigned exhaustive_max_bits = 12;

  // simulate
  std::string mode = "montecarlo";

  // explore
  std::optional<unsigned> max_blocks;
  std::vector<std::string> constraints;
  std::string objective = "delay";
  std::string axes;  ///< "first,second"; empty means med,<objective>
  bool pareto = false;
  bool loa_only = false;

  // validate
  std::string list;
};

// Each command writes its primary document to `out` (or to options.out when
// set, in which case `out` receives the JSON summary where there is one),
// diagnostics to `err`, and returns an ExitCode.
int run_analyze(const CommandOptions& options, std::ostream& out, std::ostream& err);
int run_simulate(const CommandOptions& options, std::ostream& out, std::ostream& err);
int run_estimate(const CommandOptions& options, std::ostream& out, std::ostream& err);
int run_explore(const CommandOptions& options, std::ostream& out, std::ostream& err);
int run_validate(const CommandOptions& options, std::ostream& out, std::ostream& err);

/// Rows sorted by error value: error_value,prob_num,prob_exp2,prob_float.
std::string pmf_csv(const Pmf& pmf);

/// Full exploration table, one row per point in input order.
std::string explore_csv(const std::vector<DesignPoint>& points, const std::vector<bool>& pareto,
                        const std::vector<bool>& feasible, const TechConstants& tc);

/// Shortest decimal that parses back to the same double.
std::string format_double(double v);

struct ValidationEntry {
  std::string config_text;
  unsigned bits = 0;
  unsigned block = 0;
  std::optional<std::string> ref_med;  ///< decimal text as published
  std::optional<std::string> ref_er;
};

/// One entry per non-blank, non-comment line: `<config> <N> <H> [ref_med|-] [ref_er|-]`.
std::vector<ValidationEntry> parse_validation_list(std::istream& in);

/// |value - reference| within half a unit of the reference's last printed digit.
bool matches_published(double value, const std::string& reference);

} // namespace hbba
