#include "hbba/config.hpp"

#include <cctype>
#include <charconv>

#include "json.hpp"

namespace hbba {

BlockSpec BlockSpec::accurate(unsigned width) {
  if (width == 0)
    throw ConfigError("block width must be positive");
  return {BlockKind::Accurate, width, 0, width};
}

BlockSpec BlockSpec::approximate(unsigned width, unsigned or_bits, unsigned chain_bits) {
  if (width == 0)
    throw ConfigError("block width must be positive");
  if (or_bits > width)
    throw ConfigError("L out of range: L=" + std::to_string(or_bits) + " > H=" + std::to_string(width));
  if (chain_bits > width)
    throw ConfigError("S out of range: S=" + std::to_string(chain_bits) + " > H=" + std::to_string(width));
  return {BlockKind::Approximate, width, or_bits, chain_bits};
}

namespace {

void check_geometry(unsigned bits, unsigned block_size) {
  if (block_size == 0)
    throw ConfigError("block size H must be positive");
  if (bits == 0)
    throw ConfigError("adder width N must be positive");
  if (bits > kMaxAdderBits)
    throw ConfigError("adder width N=" + std::to_string(bits) + " exceeds " + std::to_string(kMaxAdderBits));
  if (bits % block_size != 0)
    throw ConfigError("N not divisible by H: N=" + std::to_string(bits) + ", H=" + std::to_string(block_size));
}

} // namespace

AdderConfig::AdderConfig(unsigned bits, unsigned block_size, const ApproxList& approx)
    : bits_(bits), block_size_(block_size) {
  check_geometry(bits, block_size);
  unsigned k = bits / block_size;
  if (approx.size() > k)
    throw ConfigError("too many approximate blocks: " + std::to_string(approx.size()) + " > N/H=" + std::to_string(k));
  for (auto [l, s] : approx)
    blocks_.push_back(BlockSpec::approximate(block_size, l, s));
  while (blocks_.size() < k)
    blocks_.push_back(BlockSpec::accurate(block_size));
  validate();
}

AdderConfig::AdderConfig(unsigned bits, unsigned block_size, std::vector<BlockSpec> blocks)
    : bits_(bits), block_size_(block_size), blocks_(std::move(blocks)) {
  check_geometry(bits, block_size);
  validate();
}

void AdderConfig::validate() {
  if (blocks_.size() * block_size_ != bits_)
    throw ConfigError("block widths do not sum to N");
  approx_count_ = 0;
  bool seen_accurate = false;
  for (const auto& b : blocks_) {
    if (b.width != block_size_)
      throw ConfigError("non-uniform block width " + std::to_string(b.width));
    if (b.or_bits > b.width || b.chain_bits > b.width)
      throw ConfigError("L or S out of range");
    if (b.is_approximate()) {
      if (seen_accurate)
        throw ConfigError("approximate blocks must form a contiguous low-order run");
      ++approx_count_;
    } else {
      if (b.or_bits != 0 || b.chain_bits != b.width)
        throw ConfigError("accurate block must have L=0, S=H");
      seen_accurate = true;
    }
  }
}

std::vector<unsigned> AdderConfig::or_vector() const {
  std::vector<unsigned> v;
  for (unsigned i = 0; i < approx_count_; ++i)
    v.push_back(blocks_[i].or_bits);
  return v;
}

std::vector<unsigned> AdderConfig::chain_vector() const {
  std::vector<unsigned> v;
  for (unsigned i = 0; i < approx_count_; ++i)
    v.push_back(blocks_[i].chain_bits);
  return v;
}

bool AdderConfig::carry_isolated() const {
  for (unsigned i = 1; i < approx_count_; ++i)
    if (blocks_[i - 1].chain_bits != 0)
      return false;
  return true;
}

namespace {

class Lexer {
public:
  explicit Lexer(std::string_view s) : s_(s) {}

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_])))
      ++pos_;
  }
  bool peek(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  void expect(char c) {
    if (!peek(c))
      fail(std::string("expected '") + c + "'");
    ++pos_;
  }
  void expect_word(std::string_view w) {
    skip_ws();
    if (s_.substr(pos_, w.size()) != w)
      fail("expected '" + std::string(w) + "'");
    pos_ += w.size();
  }
  unsigned number() {
    skip_ws();
    unsigned v = 0;
    auto [ptr, ec] = std::from_chars(s_.data() + pos_, s_.data() + s_.size(), v);
    if (ec != std::errc())
      fail("expected non-negative integer");
    pos_ = static_cast<std::size_t>(ptr - s_.data());
    return v;
  }
  std::vector<unsigned> list() {
    std::vector<unsigned> out;
    expect('[');
    if (peek(']')) {
      ++pos_;
      return out;
    }
    for (;;) {
      out.push_back(number());
      if (peek(',')) {
        ++pos_;
        continue;
      }
      expect(']');
      return out;
    }
  }
  void end() {
    skip_ws();
    if (pos_ != s_.size())
      fail("trailing characters");
  }
  [[noreturn]] void fail(const std::string& what) const {
    throw ConfigError("syntax error at offset " + std::to_string(pos_) + ": " + what);
  }

private:
  std::string_view s_;
  std::size_t pos_ = 0;
};

AdderConfig from_vectors(unsigned bits, unsigned block_size, const std::vector<unsigned>& l,
                         const std::vector<unsigned>& s) {
  if (l.size() != s.size())
    throw ConfigError("vector length mismatch: " + std::to_string(l.size()) + " L values, " +
                      std::to_string(s.size()) + " S values");
  AdderConfig::ApproxList approx;
  for (std::size_t i = 0; i < l.size(); ++i)
    approx.emplace_back(l[i], s[i]);
  return AdderConfig(bits, block_size, approx);
}

std::string join(const std::vector<unsigned>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i)
      out += ',';
    out += std::to_string(v[i]);
  }
  return out;
}

} // namespace

AdderConfig parse_config(std::string_view text, unsigned bits, unsigned block_size) {
  Lexer lex(text);
  lex.expect_word("HBBA");
  lex.expect('{');
  auto l = lex.list();
  lex.expect(',');
  auto s = lex.list();
  lex.expect('}');
  lex.end();
  return from_vectors(bits, block_size, l, s);
}

AdderConfig parse_config_json(std::string_view json_text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(json_text);
    return from_vectors(doc.at("n").get<unsigned>(), doc.at("h").get<unsigned>(),
                        doc.at("l_vec").get<std::vector<unsigned>>(),
                        doc.at("s_vec").get<std::vector<unsigned>>());
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("invalid config document: ") + e.what());
  }
}

AdderConfig parse_config_any(std::string_view text, std::optional<unsigned> bits,
                             std::optional<unsigned> block_size) {
  auto first = text.find_first_not_of(" \t\r\n");
  auto second = first == std::string_view::npos ? first : text.find_first_not_of(" \t\r\n", first + 1);
  if (first != std::string_view::npos && text[first] == '{' &&
      (second == std::string_view::npos || text[second] != '[')) {
    AdderConfig cfg = parse_config_json(text);
    if (bits && *bits != cfg.bits())
      throw ConfigError("config document n=" + std::to_string(cfg.bits()) + " disagrees with --bits");
    if (block_size && *block_size != cfg.block_size())
      throw ConfigError("config document h=" + std::to_string(cfg.block_size()) + " disagrees with --block");
    return cfg;
  }
  if (!bits || !block_size)
    throw ConfigError("adder width and block size are required with the string form");
  return parse_config(text, *bits, *block_size);
}

std::string canonical_string(const AdderConfig& cfg) {
  return "HBBA{[" + join(cfg.or_vector()) + "],[" + join(cfg.chain_vector()) + "]}";
}

std::string config_json(const AdderConfig& cfg) {
  nlohmann::json doc{{"n", cfg.bits()},
                     {"h", cfg.block_size()},
                     {"l_vec", cfg.or_vector()},
                     {"s_vec", cfg.chain_vector()}};
  return doc.dump();
}

} // namespace hbba
