#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hbba {

/// Rejection of a malformed or invariant-violating configuration. The
/// message names the violated rule.
class ConfigError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

enum class BlockKind { Accurate, Approximate };

/// One H-bit sub-adder.
///
/// Approximate blocks replace the full adders of their `or_bits` low bits
/// with OR gates and derive their carry-out from a generate/propagate chain
/// over their top `chain_bits` bits. Accurate blocks are exact CLAs and
/// always carry (or_bits, chain_bits) = (0, width).
struct BlockSpec {
  BlockKind kind = BlockKind::Accurate;
  unsigned width = 0;
  unsigned or_bits = 0;
  unsigned chain_bits = 0;

  static BlockSpec accurate(unsigned width);
  /// Throws ConfigError when or_bits or chain_bits exceed width.
  static BlockSpec approximate(unsigned width, unsigned or_bits, unsigned chain_bits);

  bool is_approximate() const { return kind == BlockKind::Approximate; }

  friend bool operator==(const BlockSpec&, const BlockSpec&) = default;
};

/// Largest supported adder width; results need N + 1 bits of a uint64.
inline constexpr unsigned kMaxAdderBits = 62;

/// A validated HBBA configuration: N/H blocks of width H, least-significant
/// first, with the approximate blocks forming a contiguous low-order run.
class AdderConfig {
public:
  /// (L, S) of each approximate block, least-significant block first.
  using ApproxList = std::vector<std::pair<unsigned, unsigned>>;

  AdderConfig(unsigned bits, unsigned block_size, const ApproxList& approx);
  /// Builds from explicit blocks; validates every invariant.
  AdderConfig(unsigned bits, unsigned block_size, std::vector<BlockSpec> blocks);

  static AdderConfig exact(unsigned bits, unsigned block_size) { return {bits, block_size, ApproxList{}}; }

  unsigned bits() const { return bits_; }
  unsigned block_size() const { return block_size_; }
  unsigned block_count() const { return static_cast<unsigned>(blocks_.size()); }
  unsigned approx_count() const { return approx_count_; }
  const std::vector<BlockSpec>& blocks() const { return blocks_; }
  const BlockSpec& block(unsigned i) const { return blocks_.at(i); }

  std::vector<unsigned> or_vector() const;
  std::vector<unsigned> chain_vector() const;

  /// True when every approximate block sees a constant-zero incoming carry:
  /// it is the lowest block, or the block below it has an empty chain.
  bool carry_isolated() const;

  friend bool operator==(const AdderConfig&, const AdderConfig&) = default;

private:
  void validate();

  unsigned bits_;
  unsigned block_size_;
  std::vector<BlockSpec> blocks_;
  unsigned approx_count_ = 0;
};

/// Parses `HBBA{[L1,...],[S1,...]}` (whitespace tolerated, vectors ordered
/// least-significant approximate block first).
AdderConfig parse_config(std::string_view text, unsigned bits, unsigned block_size);

/// Parses the JSON document form `{"n":..,"h":..,"l_vec":[..],"s_vec":[..]}`.
AdderConfig parse_config_json(std::string_view json_text);

/// Accepts either form. When the JSON form is given, its n/h win over the
/// supplied bits/block_size if those are absent (nullopt) and must agree
/// with them otherwise.
AdderConfig parse_config_any(std::string_view text, std::optional<unsigned> bits,
                             std::optional<unsigned> block_size);

std::string canonical_string(const AdderConfig& cfg);
std::string config_json(const AdderConfig& cfg);

} // namespace hbba
