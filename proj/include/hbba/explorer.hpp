#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "hbba/analytics.hpp"
#include "hbba/config.hpp"
#include "hbba/hardware.hpp"

namespace hbba {

enum class Metric { Med, Er, MaxEd, Nmed, Delay, Area, Power, Energy };

std::string_view metric_name(Metric m);
/// Throws std::invalid_argument for unknown names.
Metric parse_metric(std::string_view name);
bool is_error_metric(Metric m);

struct Constraint {
  Metric metric = Metric::Med;
  double bound = 0;
};

/// Parses "med<=114.75" (also accepts "med=114.75" and "med:114.75").
Constraint parse_constraint(std::string_view text);

struct ExplorationSpec {
  unsigned bits = 8;
  unsigned block_size = 4;
  unsigned max_approx_blocks = 0;
  std::vector<Constraint> constraints;
  Metric objective = Metric::Delay;
  std::pair<Metric, Metric> pareto_axes{Metric::Med, Metric::Delay};
  bool loa_only = false;
  unsigned workers = 1;

  /// Throws ConfigError on geometry errors and std::invalid_argument on
  /// misplaced metrics (constraints must be error metrics, the objective a
  /// hardware metric).
  void validate() const;
};

struct DesignPoint {
  AdderConfig cfg;
  std::string name;  ///< canonical_string(cfg)
  AnalyticMetrics error;
  HardwareEstimate hw;
  bool loa = false;

  double value(Metric m) const;
};

/// Exact three-way comparison of two points on one metric. Error metrics
/// compare as exact rationals, hardware metrics by integer gate counts and
/// depths (the technology constants are positive scale factors).
std::strong_ordering compare_on(const DesignPoint& a, const DesignPoint& b, Metric m);

/// Exact test of `point.metric <= bound`.
bool satisfies(const DesignPoint& point, const Constraint& c);

/// LOA-equivalent: no carry chains, every approximate block below the top
/// one fully OR-replaced, and a non-empty OR part. The exact adder counts
/// as the LOA with an empty OR part.
bool is_loa_equivalent(const AdderConfig& cfg);

/// Every config of the space in canonical order: approximate block count
/// ascending, then the L vector, then the S vector (lexicographic).
std::vector<AdderConfig> enumerate_configs(const ExplorationSpec& spec);

/// Single-point evaluation through adder_error_pmf and metrics_from_pmf.
DesignPoint evaluate_point(const AdderConfig& cfg, const TechConstants& tc);

/// Evaluates many configs, returning points in input order. Shares per-block
/// PMFs and prefix distributions between configs; results are identical to
/// evaluate_point for every config and independent of `workers`.
std::vector<DesignPoint> evaluate_all(const std::vector<AdderConfig>& configs, const TechConstants& tc,
                                      unsigned workers = 1);

/// Points not dominated on (first, second), both minimized. Sorted by the
/// first axis, then the second, then canonical name. Throws
/// std::invalid_argument on empty input.
std::vector<DesignPoint> pareto_front(const std::vector<DesignPoint>& points, std::pair<Metric, Metric> axes);

struct Infeasibility {
  Constraint tightest;           ///< the constraint met by the fewest points
  std::size_t satisfied_alone = 0;
  double best_achievable = 0;    ///< smallest value of that metric in the space
};

struct Selection {
  std::optional<DesignPoint> best;
  std::optional<Infeasibility> infeasible;
  std::size_t feasible_count = 0;
};

/// Constraint-satisfying point of minimal objective; ties go to smaller
/// MED, then canonical name.
Selection select_optimal(const std::vector<DesignPoint>& points, const std::vector<Constraint>& constraints,
                         Metric objective);
Selection select_optimal(const ExplorationSpec& spec, const TechConstants& tc);

} // namespace hbba
