#pragma once

#include <cstdint>
#include <string>

#include "hbba/config.hpp"

namespace hbba {

/// Technology scaling factors of the gate-level cost model (32 nm defaults).
struct TechConstants {
  double c_d_ps = 12.14;  ///< delay per gate level pair factor, ps
  double c_a_um2 = 0.70;  ///< area per 2-input gate, um^2
  double c_p_uw = 9.24;   ///< combined static + dynamic power factor, uW
  std::string source = "builtin";

  /// Throws std::invalid_argument unless all factors are positive and finite.
  void validate() const;
};

/// Reads `key = value` lines (`c_d_ps`, `c_a_um2`, `c_p_uw`); '#' starts a
/// comment and missing keys keep their defaults. Throws std::runtime_error
/// on unreadable files, unknown keys or malformed values.
TechConstants load_tech_file(const std::string& path);

struct HardwareEstimate {
  double delay_ps = 0;
  double area_um2 = 0;
  double power_uw = 0;
  double energy_aj = 0;
  std::uint64_t gate_count = 0;
  std::uint64_t gate_depth = 0;
  /// gate_count * gate_depth: the exact quantity power is proportional to.
  std::uint64_t power_key() const { return gate_count * gate_depth; }
};

/// Gate levels on a block's critical path (delay = c_d * depth).
std::uint64_t block_depth(const BlockSpec& spec);
double block_delay(const BlockSpec& spec, const TechConstants& tc);
std::uint64_t block_area_gates(const BlockSpec& spec);

/// Sums per-block delay and gate counts. Power is the G*D figure of merit
/// normalized to the all-accurate adder of the same N and H, which scores
/// exactly c_p; it ranks designs but is not a physical wattage.
HardwareEstimate adder_estimate(const AdderConfig& cfg, const TechConstants& tc);

} // namespace hbba
