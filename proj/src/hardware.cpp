#include "hbba/hardware.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hbba {

void TechConstants::validate() const {
  for (double v : {c_d_ps, c_a_um2, c_p_uw})
    if (!(v > 0) || !std::isfinite(v))
      throw std::invalid_argument("technology constants must be positive");
}

TechConstants load_tech_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw std::runtime_error("cannot read technology file: " + path);
  TechConstants tc;
  tc.source = path;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos)
      line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos)
      continue;
    auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": expected key = value");
    std::istringstream key_in(line.substr(0, eq)), value_in(line.substr(eq + 1));
    std::string key, rest;
    double value = 0;
    key_in >> key;
    if (!(value_in >> value) || (value_in >> rest))
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": malformed value");
    if (key == "c_d_ps")
      tc.c_d_ps = value;
    else if (key == "c_a_um2")
      tc.c_a_um2 = value;
    else if (key == "c_p_uw")
      tc.c_p_uw = value;
    else
      throw std::runtime_error(path + ":" + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  tc.validate();
  return tc;
}

std::uint64_t block_depth(const BlockSpec& spec) {
  const std::uint64_t h = spec.width, l = spec.or_bits, s = spec.chain_bits;
  if (!spec.is_approximate())
    return 2 * (h + 1);
  if (s == 0)
    return 0;
  if (h - s <= l)
    return 2 * (s + 1);
  return 2 * (h - s - l);
}

double block_delay(const BlockSpec& spec, const TechConstants& tc) {
  return tc.c_d_ps * static_cast<double>(block_depth(spec));
}

std::uint64_t block_area_gates(const BlockSpec& spec) {
  const std::uint64_t h = spec.width, l = spec.or_bits, s = spec.chain_bits;
  if (!spec.is_approximate())
    return 9 * h;
  const bool truncated = h - s > l;
  std::uint64_t pg = truncated ? 4 * h - 3 * l : 4 * s + l;
  std::uint64_t sum = s == 0 ? 3 * (h - l) : 3 * (h - l) + 2;
  std::uint64_t carry = s == 0 ? 0 : truncated ? 2 * (h - l - 1) : 2 * (s - 1);
  return pg + sum + carry;
}

HardwareEstimate adder_estimate(const AdderConfig& cfg, const TechConstants& tc) {
  HardwareEstimate est;
  for (const auto& b : cfg.blocks()) {
    est.gate_count += block_area_gates(b);
    est.gate_depth += block_depth(b);
  }
  const std::uint64_t ref_gates = 9ull * cfg.bits();
  const std::uint64_t ref_depth = cfg.block_count() * 2ull * (cfg.block_size() + 1);
  est.delay_ps = tc.c_d_ps * static_cast<double>(est.gate_depth);
  est.area_um2 = tc.c_a_um2 * static_cast<double>(est.gate_count);
  est.power_uw = tc.c_p_uw * static_cast<double>(est.power_key()) / static_cast<double>(ref_gates * ref_depth);
  est.energy_aj = est.power_uw * est.delay_ps;
  return est;
}

} // namespace hbba
