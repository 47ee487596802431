/// @file  ptr.hpp
/// @brief Node identities, child pointers, and the fixed-width records
///        stored in node and arc files

#pragma once

#include <compare>
#include <cstdint>
#include <string>

#include "error.hpp"

namespace xbdd {

/// Position of a variable in the global order, 0 = topmost
using level_t = std::uint32_t;

inline constexpr unsigned index_bits = 39;
inline constexpr level_t terminal_level = 0xFFFFFF;
inline constexpr level_t max_level = terminal_level - 1;
inline constexpr std::uint64_t max_index = (std::uint64_t{1} << index_bits) - 1;

/// A pointer to a terminal or to an internal node (level, index).
///
/// Packed as | level:24 | index:39 | flag:1 | so that comparing the raw word
/// orders nodes lexicographically by (level, index) and places terminals
/// (⊥ < ⊤) after all nodes. The flag bit carries the polarity of an arc's
/// source or the input tag of a request; it is zero on plain pointers.
class ptr {
public:
  constexpr ptr() = default;

  static constexpr ptr terminal(bool value) noexcept {
    return ptr((std::uint64_t{terminal_level} << 40) | (std::uint64_t{value} << 1));
  }
  static constexpr ptr node(level_t level, std::uint64_t index) {
    if (level > max_level || index > max_index)
      throw input_error("node identity out of range");
    return ptr((std::uint64_t{level} << 40) | (index << 1));
  }
  static constexpr ptr nil() noexcept { return ptr(~std::uint64_t{0}); }
  static constexpr ptr from_raw(std::uint64_t raw) noexcept { return ptr(raw); }

  constexpr bool is_nil() const noexcept { return _raw == ~std::uint64_t{0}; }
  constexpr bool is_terminal() const noexcept { return !is_nil() && level() == terminal_level; }
  constexpr bool is_node() const noexcept { return level() != terminal_level; }
  constexpr bool is_false() const noexcept { return without_flag() == terminal(false); }
  constexpr bool is_true() const noexcept { return without_flag() == terminal(true); }

  constexpr bool value() const noexcept { return ((_raw >> 1) & 1) != 0; }
  constexpr level_t level() const noexcept { return static_cast<level_t>(_raw >> 40); }
  constexpr std::uint64_t index() const noexcept { return (_raw >> 1) & max_index; }
  constexpr bool flag() const noexcept { return (_raw & 1) != 0; }
  constexpr ptr with_flag(bool f) const noexcept {
    return ptr((_raw & ~std::uint64_t{1}) | std::uint64_t{f});
  }
  constexpr ptr without_flag() const noexcept { return is_nil() ? *this : with_flag(false); }
  constexpr std::uint64_t raw() const noexcept { return _raw; }

  /// Same node with its level replaced; terminals and nil pass through
  constexpr ptr with_level(level_t level) const {
    if (!is_node())
      return *this;
    if (level > max_level)
      throw input_error("level out of range");
    return ptr((std::uint64_t{level} << 40) | (_raw & ((std::uint64_t{1} << 40) - 1)));
  }

  friend constexpr auto operator<=>(ptr, ptr) noexcept = default;

  std::string to_string() const {
    if (is_nil())
      return "nil";
    if (is_terminal())
      return value() ? "T" : "F";
    return "(" + std::to_string(level()) + "," + std::to_string(index()) + ")" +
           (flag() ? "'" : "");
  }

private:
  constexpr explicit ptr(std::uint64_t raw) noexcept : _raw(raw) {}
  std::uint64_t _raw = 0;
};

/// A BDD node: if uid's variable then high else low
struct node {
  ptr uid;
  ptr low;
  ptr high;

  friend constexpr bool operator==(const node &, const node &) = default;
};

/// An arc of an unreduced diagram; source.flag() is the polarity (1 = high)
struct arc {
  ptr source;
  ptr target;

  friend constexpr bool operator==(const arc &, const arc &) = default;
};

/// Number of nodes on one level
struct level_info {
  level_t level;
  std::uint64_t width;

  friend constexpr bool operator==(const level_info &, const level_info &) = default;
};

} // namespace xbdd
