/// @file  inspect.hpp
/// @brief Evaluation, counting, comparison, and the truth-table oracle

#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "diagram.hpp"

namespace xbdd {

/// Fixed-width unsigned integer for path and state counts. Fits in a
/// queue record; overflow throws.
template <std::size_t Words>
class wide_uint {
public:
  constexpr wide_uint() = default;
  constexpr wide_uint(std::uint64_t v) : _w{} { _w[0] = v; }

  static wide_uint power_of_two(std::uint64_t k) { return wide_uint(1) << k; }

  bool is_zero() const noexcept {
    return std::all_of(_w.begin(), _w.end(), [](std::uint64_t x) { return x == 0; });
  }

  wide_uint &operator+=(const wide_uint &o) {
    unsigned __int128 carry = 0;
    for (std::size_t i = 0; i < Words; ++i) {
      const unsigned __int128 s = static_cast<unsigned __int128>(_w[i]) + o._w[i] + carry;
      _w[i] = static_cast<std::uint64_t>(s);
      carry = s >> 64;
    }
    if (carry != 0)
      throw input_error("count exceeds " + std::to_string(64 * Words) + " bits");
    return *this;
  }
  friend wide_uint operator+(wide_uint a, const wide_uint &b) { return a += b; }

  wide_uint operator<<(std::uint64_t k) const {
    if (is_zero())
      return *this;
    if (k >= 64 * Words)
      throw input_error("count exceeds " + std::to_string(64 * Words) + " bits");
    wide_uint r;
    const std::size_t words = k / 64;
    const unsigned bits = k % 64;
    for (std::size_t i = Words; i-- > 0;) {
      if (i < words)
        continue;
      std::uint64_t v = _w[i - words] << bits;
      if (bits != 0 && i - words > 0)
        v |= _w[i - words - 1] >> (64 - bits);
      r._w[i] = v;
    }
    // detect bits shifted out
    for (std::size_t i = Words - words; i < Words; ++i)
      if (_w[i] != 0)
        throw input_error("count exceeds " + std::to_string(64 * Words) + " bits");
    if (bits != 0 && (_w[Words - 1 - words] >> (64 - bits)) != 0)
      throw input_error("count exceeds " + std::to_string(64 * Words) + " bits");
    return r;
  }

  friend bool operator==(const wide_uint &, const wide_uint &) = default;

  /// Exact value if it fits in 64 bits
  std::uint64_t low_word() const noexcept { return _w[0]; }
  bool fits_u64() const noexcept {
    return std::all_of(_w.begin() + 1, _w.end(), [](std::uint64_t x) { return x == 0; });
  }

  std::string to_string() const {
    if (is_zero())
      return "0";
    std::array<std::uint64_t, Words> cur = _w;
    std::string digits;
    const auto nonzero = [&]() {
      return std::any_of(cur.begin(), cur.end(), [](std::uint64_t x) { return x != 0; });
    };
    constexpr std::uint64_t chunk = 1000000000000000000ULL; // 10^18
    while (nonzero()) {
      unsigned __int128 rem = 0;
      for (std::size_t i = Words; i-- > 0;) {
        const unsigned __int128 v = (rem << 64) | cur[i];
        cur[i] = static_cast<std::uint64_t>(v / chunk);
        rem = v % chunk;
      }
      std::string part = std::to_string(static_cast<std::uint64_t>(rem));
      if (nonzero())
        part.insert(0, 18 - part.size(), '0');
      digits.insert(0, part);
    }
    return digits;
  }

private:
  std::array<std::uint64_t, Words> _w{};
};

/// 512-bit counts: enough for state spaces of up to 511 variables
using count_t = wide_uint<8>;

using assignment = std::map<level_t, bool>;

/// Follows the path selected by `a` from the root to a terminal
inline bool evaluate(engine &eng, const diagram &d, const assignment &a) {
  for (const level_info &li : d.levels())
    if (!a.contains(li.level))
      throw input_error("assignment has no value for level " + std::to_string(li.level));
  ptr cur = d.root();
  node_seeker seeker(eng, d);
  while (cur.is_node()) {
    const node &n = seeker.seek(cur);
    cur = a.at(n.uid.level()) ? n.high : n.low;
  }
  return cur.value();
}

/// Test oracle: entry i is the value under the i-th assignment to `labels`,
/// with the first label as the most significant bit. The diagram is read
/// into memory once; meant for n <= 24.
inline std::vector<bool> truth_table(engine &eng, const diagram &d,
                                     const std::vector<level_t> &labels) {
  const std::size_t n = labels.size();
  if (n > 24)
    throw input_error("truth tables are limited to 24 variables");
  std::vector<int> position(d.is_terminal() ? 0 : d.max_level() + 1, -1);
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] < position.size())
      position[labels[i]] = static_cast<int>(i);
  }
  for (const level_info &li : d.levels())
    if (position[li.level] < 0)
      throw input_error("truth table labels do not cover level " + std::to_string(li.level));

  std::vector<node> nodes;
  {
    node_stream in(eng, d, direction::backward);
    while (in.has_next())
      nodes.push_back(in.next());
  }
  const auto find = [&](ptr uid) -> const node & {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), uid,
                               [](const node &x, ptr u) { return x.uid < u; });
    return *it;
  };

  std::vector<bool> table(std::size_t{1} << n);
  for (std::size_t i = 0; i < table.size(); ++i) {
    ptr cur = d.root();
    while (cur.is_node()) {
      const node &x = find(cur);
      const bool bit = ((i >> (n - 1 - static_cast<std::size_t>(position[x.uid.level()]))) & 1) != 0;
      cur = bit ? x.high : x.low;
    }
    table[i] = cur.value();
  }
  return table;
}

inline std::uint64_t count_nodes(const diagram &d) noexcept { return d.node_count(); }

namespace detail {

struct count_message {
  ptr target;
  count_t count;
};
struct count_by_target {
  bool operator()(const count_message &a, const count_message &b) const noexcept {
    return a.target < b.target;
  }
};
struct count_level {
  std::uint64_t operator()(const count_message &m) const noexcept { return m.target.level(); }
};

/// Sums over root-to-true paths; each arc skipping k counted levels
/// multiplies by 2^k. With `counted` null every path weighs 1.
inline count_t count_paths(engine &eng, const diagram &d, const std::vector<level_t> *counted) {
  const auto rank = [&](ptr p) -> std::uint64_t {
    if (counted == nullptr)
      return 0;
    if (!p.is_node())
      return counted->size();
    return static_cast<std::uint64_t>(
        std::lower_bound(counted->begin(), counted->end(), p.level()) - counted->begin());
  };
  const auto gap = [&](ptr from, ptr to) -> std::uint64_t {
    if (counted == nullptr)
      return 0;
    return rank(to) - rank(from) - 1;
  };

  if (d.is_terminal())
    return d.is_true() ? count_t::power_of_two(counted ? counted->size() : 0) : count_t(0);

  if (counted != nullptr)
    for (const level_info &li : d.levels())
      if (!std::binary_search(counted->begin(), counted->end(), li.level))
        throw input_error("diagram depends on level " + std::to_string(li.level) +
                          " which is not a counted variable");

  count_t total(0);
  node_seeker seeker(eng, d);
  eng.require_blocks(6, "path counting");
  levelized_priority_queue<count_message, count_by_target, count_level> pq(eng, eng.available());
  pq.push({d.root(), count_t::power_of_two(rank(d.root()))});
  while (!pq.empty()) {
    count_message m = pq.pop();
    while (!pq.empty() && pq.top().target == m.target)
      m.count += pq.pop().count;
    const node n = seeker.seek(m.target);
    for (const ptr c : {n.low, n.high}) {
      const count_t w = m.count << gap(n.uid, c);
      if (c.is_terminal()) {
        if (c.value())
          total += w;
      } else {
        pq.push({c, w});
      }
    }
  }
  return total;
}

} // namespace detail

inline count_t count_paths_to_true(engine &eng, const diagram &d) {
  return detail::count_paths(eng, d, nullptr);
}

/// Number of satisfying assignments over `variables` (sorted levels that
/// must include every level of `d`)
inline count_t count_assignments(engine &eng, const diagram &d, std::vector<level_t> variables) {
  std::sort(variables.begin(), variables.end());
  variables.erase(std::unique(variables.begin(), variables.end()), variables.end());
  return detail::count_paths(eng, d, &variables);
}

/// Levels set to true on the lexicographically least path to true; every
/// other level is false. Throws on the false diagram.
inline std::vector<level_t> least_assignment(engine &eng, const diagram &d) {
  if (d.is_false())
    throw input_error("the empty set has no least element");
  std::vector<level_t> ones;
  node_seeker seeker(eng, d);
  ptr cur = d.root();
  while (cur.is_node()) {
    const node &n = seeker.seek(cur);
    if (n.low.is_false()) {
      ones.push_back(n.uid.level());
      cur = n.high;
    } else {
      cur = n.low;
    }
  }
  return ones;
}

/// Structural equality, which for reduced diagrams is functional equality
inline bool equal(engine &eng, const diagram &a, const diagram &b) {
  if (a.same_handle(b))
    return true;
  if (a.root() != b.root() || a.node_count() != b.node_count() || a.levels() != b.levels())
    return false;
  node_stream sa(eng, a, direction::forward);
  node_stream sb(eng, b, direction::forward);
  while (sa.has_next())
    if (!(sa.next() == sb.next()))
      return false;
  return true;
}

} // namespace xbdd
