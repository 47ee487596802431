/// @file  serialize.hpp
/// @brief The XBDD1 binary diagram format
///
///     "XBDD0001"                  8-byte magic
///     N                           u64
///     N x (label, low, high)      3 x u64, children before parents
///     [root]                      u64 0 or 1, only when N = 0
///
/// References are 0 = false, 1 = true, k + 2 = record k. The root is record
/// N - 1. All integers are little-endian.

#pragma once

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <string>

#include "builder.hpp"

namespace xbdd {

inline constexpr char xbdd1_magic[8] = {'X', 'B', 'D', 'D', '0', '0', '0', '1'};

namespace detail {

static_assert(std::endian::native == std::endian::little, "XBDD1 I/O assumes a little-endian host");

inline void put_u64(std::ostream &out, std::uint64_t v) {
  out.write(reinterpret_cast<const char *>(&v), sizeof v);
}

inline std::uint64_t get_u64(std::istream &in, const char *what) {
  std::uint64_t v = 0;
  if (!in.read(reinterpret_cast<char *>(&v), sizeof v))
    throw format_error(std::string("truncated input while reading ") + what);
  return v;
}

/// Record index of every level's first node in the written order
class record_index {
public:
  explicit record_index(const std::vector<level_info> &levels) {
    std::uint64_t offset = 0;
    for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
      _first.push_back({it->level, offset});
      offset += it->width;
    }
    _widths = levels;
  }

  std::uint64_t of(ptr uid) const {
    for (std::size_t i = 0; i < _first.size(); ++i)
      if (_first[i].level == uid.level())
        return _first[i].width + (_widths[_widths.size() - 1 - i].width - 1 - uid.index());
    throw invariant_violation("node " + uid.to_string() + " lies on a level without nodes");
  }

private:
  std::vector<level_info> _first; // (level, offset) deepest first
  std::vector<level_info> _widths;
};

inline std::uint64_t encode(ptr p, const record_index &idx) {
  if (p.is_terminal())
    return p.value() ? 1 : 0;
  return idx.of(p) + 2;
}

} // namespace detail

/// Writes `d` (with any attached shift applied) in one scan of its node
/// file. Output is counted as blocks of B records.
inline void serialize(engine &eng, const diagram &d, std::ostream &out) {
  out.write(xbdd1_magic, sizeof xbdd1_magic);
  detail::put_u64(out, d.node_count());
  if (d.is_terminal()) {
    detail::put_u64(out, d.is_true() ? 1 : 0);
  } else {
    const detail::record_index idx(d.levels());
    node_stream in(eng, d, direction::forward);
    std::uint64_t written = 0;
    const std::size_t B = eng.block_size();
    while (in.has_next()) {
      const node n = in.next();
      detail::put_u64(out, n.uid.level());
      detail::put_u64(out, detail::encode(n.low, idx));
      detail::put_u64(out, detail::encode(n.high, idx));
      if (++written % B == 0)
        ++eng.counters().blocks_written;
    }
    if (written % B != 0)
      ++eng.counters().blocks_written;
  }
  if (!out)
    throw io_error("failed writing serialized diagram");
}

inline void serialize_file(engine &eng, const diagram &d, const std::filesystem::path &p) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out)
    throw io_error("cannot open " + p.string() + " for writing");
  serialize(eng, d, out);
}

namespace detail {

struct labelled_record {
  std::uint64_t index;
  level_t level;
};

/// A child reference that still needs its label
struct pending_child {
  std::uint64_t child;
  std::uint64_t parent; // record index * 2 + polarity
};
struct resolved_child {
  std::uint64_t parent; // record index * 2 + polarity
  ptr target;
};

} // namespace detail

/// Reads an XBDD1 stream and canonicalizes it. The child labels are resolved
/// by sorting and merging rather than by random access into the input.
inline diagram deserialize(engine &eng, std::istream &in) {
  char magic[8];
  if (!in.read(magic, sizeof magic) || std::memcmp(magic, xbdd1_magic, sizeof magic) != 0)
    throw format_error("bad magic: not an XBDD1 diagram");
  const std::uint64_t N = detail::get_u64(in, "node count");
  if (N == 0) {
    const std::uint64_t root = detail::get_u64(in, "terminal root");
    if (root > 1)
      throw format_error("terminal root must be 0 or 1, got " + std::to_string(root));
    return diagram::terminal(root == 1);
  }
  if (N > max_index)
    throw format_error("node count out of range");

  // 1. one scan: labels by index, child references, nodes with placeholders
  record_file<detail::labelled_record> labels;
  record_file<detail::pending_child> pending;
  record_file<node> partial;
  {
    record_writer<detail::labelled_record> label_out(eng);
    record_writer<detail::pending_child> pending_out(eng);
    record_writer<node> partial_out(eng);
    const std::size_t B = eng.block_size();
    for (std::uint64_t k = 0; k < N; ++k) {
      const std::uint64_t label = detail::get_u64(in, "node label");
      if (label > max_level)
        throw format_error("label " + std::to_string(label) + " of record " + std::to_string(k) +
                           " is out of range");
      node n{ptr::node(static_cast<level_t>(label), k), ptr::nil(), ptr::nil()};
      for (const bool high : {false, true}) {
        const std::uint64_t ref = detail::get_u64(in, "child reference");
        ptr &slot = high ? n.high : n.low;
        if (ref < 2) {
          slot = ptr::terminal(ref == 1);
        } else if (ref - 2 >= k) {
          throw format_error("record " + std::to_string(k) + " refers to record " +
                             std::to_string(ref - 2) + " which is not before it");
        } else {
          pending_out.push({ref - 2, 2 * k + (high ? 1 : 0)});
        }
      }
      label_out.push({k, static_cast<level_t>(label)});
      partial_out.push(n);
      if ((k + 1) % B == 0 || k + 1 == N)
        ++eng.counters().blocks_read;
    }
    labels = label_out.finish();
    pending = pending_out.finish();
    partial = partial_out.finish();
  }

  // 2. attach the child's label to every reference
  record_file<detail::resolved_child> resolved;
  {
    const auto by_child = sort_external(eng, pending, [](const auto &a, const auto &b) {
      return a.child != b.child ? a.child < b.child : a.parent < b.parent;
    });
    record_reader<detail::pending_child> refs(eng, by_child);
    record_reader<detail::labelled_record> lab(eng, labels);
    record_writer<detail::resolved_child> out(eng);
    while (refs.has_next()) {
      const detail::pending_child r = refs.next();
      while (lab.peek().index < r.child)
        lab.next();
      out.push({r.parent, ptr::node(lab.peek().level, r.child)});
    }
    const auto unsorted = out.finish();
    resolved = sort_external(eng, unsorted, [](const auto &a, const auto &b) {
      return a.parent < b.parent;
    });
  }

  // 3. fill in the placeholders and check the variable order
  record_file<node> complete;
  {
    record_reader<node> nodes(eng, partial);
    record_reader<detail::resolved_child> res(eng, resolved);
    record_writer<node> out(eng);
    while (nodes.has_next()) {
      node n = nodes.next();
      while (res.has_next() && res.peek().parent / 2 == n.uid.index()) {
        const detail::resolved_child r = res.next();
        (r.parent % 2 == 1 ? n.high : n.low) = r.target;
      }
      for (const ptr c : {n.low, n.high})
        if (c.is_node() && c.level() <= n.uid.level())
          throw format_error("record " + std::to_string(n.uid.index()) + " on level " +
                             std::to_string(n.uid.level()) + " has a child on level " +
                             std::to_string(c.level()));
      out.push(n);
    }
    complete = out.finish();
  }

  // Indices are global, so uid order is (level, record index)
  const auto sorted = sort_external(eng, complete, detail::uid_descending{});
  record_reader<node> last(eng, partial, direction::backward);
  const ptr root = last.peek().uid;
  return detail::canonicalize_raw(eng, sorted, root);
}

inline diagram deserialize_file(engine &eng, const std::filesystem::path &p) {
  std::ifstream in(p, std::ios::binary);
  if (!in)
    throw io_error("cannot open " + p.string());
  return deserialize(eng, in);
}

} // namespace xbdd
