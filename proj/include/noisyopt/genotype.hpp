#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "errors.hpp"
#include "random.hpp"

namespace noisyopt {

/// Fixed-length bit string. Bit 0 is the leftmost character of the textual
/// form and the most significant bit of `value()`.
class Genotype {
public:
  explicit Genotype(std::size_t n) : bits_(n, 0) {
    detail::require(n >= 1, "Genotype: length must be at least 1");
  }

  /// Parses a string of '0' and '1' characters.
  static Genotype from_string(std::string_view text) {
    Genotype g(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
      detail::require(text[i] == '0' || text[i] == '1', "Genotype: expected only '0' and '1'");
      g.bits_[i] = static_cast<std::uint8_t>(text[i] - '0');
    }
    return g;
  }

  static Genotype all_ones(std::size_t n) {
    Genotype g(n);
    std::fill(g.bits_.begin(), g.bits_.end(), std::uint8_t{1});
    return g;
  }

  /// Uniformly random bit string; consumes exactly one draw per bit.
  static Genotype random(std::size_t n, RandomStream& rng) {
    Genotype g(n);
    for (auto& bit : g.bits_) bit = rng.coin() ? 1 : 0;
    return g;
  }

  std::size_t size() const noexcept { return bits_.size(); }

  bool operator[](std::size_t i) const { return bits_.at(i) != 0; }

  void flip(std::size_t i) { bits_.at(i) ^= 1U; }

  std::span<const std::uint8_t> bits() const noexcept { return bits_; }

  std::size_t count_ones() const noexcept {
    return static_cast<std::size_t>(std::count(bits_.begin(), bits_.end(), std::uint8_t{1}));
  }

  bool is_all_ones() const noexcept {
    return std::all_of(bits_.begin(), bits_.end(), [](std::uint8_t b) { return b != 0; });
  }

  /// Binary value with bit 0 as the most significant bit. Requires size() <= 64.
  std::uint64_t value() const {
    detail::require(bits_.size() <= 64, "Genotype::value: more than 64 bits");
    std::uint64_t v = 0;
    for (auto bit : bits_) v = (v << 1) | bit;
    return v;
  }

  std::string to_string() const {
    std::string s(bits_.size(), '0');
    for (std::size_t i = 0; i < bits_.size(); ++i) s[i] = bits_[i] ? '1' : '0';
    return s;
  }

  friend bool operator==(const Genotype&, const Genotype&) = default;

private:
  std::vector<std::uint8_t> bits_;
};

inline std::size_t hamming_distance(const Genotype& a, const Genotype& b) {
  detail::require(a.size() == b.size(), "hamming_distance: length mismatch");
  std::size_t d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d += a.bits()[i] != b.bits()[i];
  return d;
}

}  // namespace noisyopt
