/// @file  extmem.hpp
/// @brief Block-based external memory primitives
///
/// Everything that holds records in internal memory registers them with the
/// owning engine's residency gauge, and every block transfer between a
/// buffer and its backing file is counted. Files are plain binary files of
/// fixed-width records under a temp directory (`XBDD_TMPDIR`, falling back
/// to the system temp directory) and are removed as soon as the last handle
/// to them is dropped.

#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <memory>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include <unistd.h>

#include "error.hpp"

namespace xbdd {

/// Block size B and memory budget M, both counted in records
struct block_config {
  std::size_t block_size = 64;
  std::size_t memory_budget = std::size_t{1} << 20;

  void validate() const {
    if (block_size < 2)
      throw config_error("block size must be at least 2 records");
    if (memory_budget < 4 * block_size)
      throw config_error("memory budget must be at least 4 blocks (M >= 4*B)");
  }
};

/// Block size used when only M is given: M/32 clamped to [2, 1024]
inline std::size_t default_block_size(std::size_t memory_budget) {
  return std::clamp<std::size_t>(memory_budget / 32, 2, 1024);
}

struct io_counters {
  std::uint64_t blocks_read = 0;
  std::uint64_t blocks_written = 0;
  std::uint64_t records_streamed = 0;
  std::uint64_t sorts = 0;

  friend io_counters operator-(const io_counters &a, const io_counters &b) {
    return {a.blocks_read - b.blocks_read, a.blocks_written - b.blocks_written,
            a.records_streamed - b.records_streamed, a.sorts - b.sorts};
  }
  friend bool operator==(const io_counters &, const io_counters &) = default;
};

/// Sizes of intermediate results, for reports and the pruning checks
struct sweep_stats {
  std::uint64_t largest_unreduced_nodes = 0;
  std::uint64_t largest_reduced_nodes = 0;
  /// Arc records produced by the conjunction inside relational products
  std::uint64_t relprod_apply_arcs = 0;
};

/// Owner of the counters, the residency gauge, and the temp file namespace.
///
/// One engine per thread; diagrams created through an engine must not be
/// read after it is destroyed.
class engine {
public:
  explicit engine(block_config cfg = {}) : engine(cfg, default_tmpdir()) {}

  engine(block_config cfg, std::filesystem::path tmpdir)
      : _cfg(cfg), _tmpdir(std::move(tmpdir)), _id(next_engine_id()) {
    _cfg.validate();
    std::error_code ec;
    std::filesystem::create_directories(_tmpdir, ec);
    if (!std::filesystem::is_directory(_tmpdir))
      throw io_error("temp directory is not usable: " + _tmpdir.string());
  }

  engine(const engine &) = delete;
  engine &operator=(const engine &) = delete;

  const block_config &config() const noexcept { return _cfg; }
  std::size_t block_size() const noexcept { return _cfg.block_size; }
  std::size_t memory_budget() const noexcept { return _cfg.memory_budget; }

  io_counters snapshot() const noexcept { return _counters; }
  void reset_counters() noexcept { _counters = {}; }
  io_counters &counters() noexcept { return _counters; }

  sweep_stats &stats() noexcept { return _stats; }
  const sweep_stats &stats() const noexcept { return _stats; }

  std::size_t resident() const noexcept { return _resident; }
  std::size_t peak_resident() const noexcept { return _peak; }
  void reset_peak() noexcept { _peak = _resident; }
  std::size_t available() const noexcept {
    return _resident >= _cfg.memory_budget ? 0 : _cfg.memory_budget - _resident;
  }

  void acquire(std::size_t records) {
    if (_resident + records > _cfg.memory_budget)
      throw budget_exceeded("resident records would exceed M=" +
                            std::to_string(_cfg.memory_budget) + " (resident " +
                            std::to_string(_resident) + ", requested " +
                            std::to_string(records) + ")");
    _resident += records;
    _peak = std::max(_peak, _resident);
  }
  void release(std::size_t records) noexcept { _resident -= std::min(records, _resident); }

  /// Throws unless at least `blocks` blocks are currently free
  void require_blocks(std::size_t blocks, const char *who) const {
    if (available() < blocks * block_size())
      throw budget_exceeded(std::string(who) + " needs " + std::to_string(blocks) +
                            " free blocks but only " + std::to_string(available()) +
                            " records are available (increase M or lower B)");
  }

  std::filesystem::path make_temp_path() {
    return _tmpdir / ("xbdd-" + std::to_string(::getpid()) + "-" + std::to_string(_id) +
                      "-" + std::to_string(_next_file++) + ".bin");
  }

  const std::filesystem::path &tmpdir() const noexcept { return _tmpdir; }

  static std::filesystem::path default_tmpdir() {
    if (const char *env = std::getenv("XBDD_TMPDIR"); env != nullptr && *env != '\0')
      return env;
    return std::filesystem::temp_directory_path();
  }

private:
  static std::uint64_t next_engine_id() {
    static std::atomic<std::uint64_t> counter{0};
    return counter++;
  }

  block_config _cfg;
  std::filesystem::path _tmpdir;
  std::uint64_t _id;
  std::uint64_t _next_file = 0;
  io_counters _counters;
  sweep_stats _stats;
  std::size_t _resident = 0;
  std::size_t _peak = 0;
};

/// RAII registration of resident records with an engine's gauge
class residency_lease {
public:
  residency_lease() = default;
  residency_lease(engine &eng, std::size_t records) : _eng(&eng) { resize(records); }

  residency_lease(residency_lease &&o) noexcept
      : _eng(std::exchange(o._eng, nullptr)), _records(std::exchange(o._records, 0)) {}
  residency_lease &operator=(residency_lease &&o) noexcept {
    if (this != &o) {
      reset();
      _eng = std::exchange(o._eng, nullptr);
      _records = std::exchange(o._records, 0);
    }
    return *this;
  }
  ~residency_lease() { reset(); }

  void resize(std::size_t records) {
    if (records > _records)
      _eng->acquire(records - _records);
    else
      _eng->release(_records - records);
    _records = records;
  }
  void reset() noexcept {
    if (_eng != nullptr)
      _eng->release(_records);
    _records = 0;
  }
  std::size_t size() const noexcept { return _records; }

private:
  engine *_eng = nullptr;
  std::size_t _records = 0;
};

namespace detail {

struct file_storage {
  std::filesystem::path path;
  std::uint64_t records = 0;

  explicit file_storage(std::filesystem::path p) : path(std::move(p)) {}
  file_storage(const file_storage &) = delete;
  file_storage &operator=(const file_storage &) = delete;
  ~file_storage() {
    std::error_code ec;
    std::filesystem::remove(path, ec);
  }
};

struct file_closer {
  void operator()(std::FILE *f) const noexcept { std::fclose(f); }
};
using file_ptr = std::unique_ptr<std::FILE, file_closer>;

inline file_ptr open_file(const std::filesystem::path &p, const char *mode) {
  file_ptr f(std::fopen(p.c_str(), mode));
  if (!f)
    throw io_error("cannot open " + p.string());
  return f;
}

} // namespace detail

/// Immutable handle to a file of fixed-width records.
/// Copies share the file; it is deleted when the last copy goes away.
/// A default-constructed handle is an empty file that never touched disk.
template <class R>
class record_file {
  static_assert(std::is_trivially_copyable_v<R>, "records must be fixed-width PODs");

public:
  record_file() = default;

  std::uint64_t size() const noexcept { return _storage ? _storage->records : 0; }
  bool empty() const noexcept { return size() == 0; }
  const std::filesystem::path *path() const noexcept {
    return _storage ? &_storage->path : nullptr;
  }

private:
  template <class>
  friend class record_writer;
  template <class>
  friend class record_reader;

  explicit record_file(std::shared_ptr<detail::file_storage> s) : _storage(std::move(s)) {}

  std::shared_ptr<detail::file_storage> _storage;
};

/// Sequential, block-buffered writer. The file is created on the first
/// block flush, so writers that end up empty cost no I/O.
template <class R>
class record_writer {
public:
  explicit record_writer(engine &eng) : _eng(&eng), _lease(eng, eng.block_size()) {
    _buffer.reserve(eng.block_size());
  }
  record_writer(record_writer &&) noexcept = default;
  record_writer &operator=(record_writer &&) noexcept = default;

  void push(const R &r) {
    _buffer.push_back(r);
    ++_eng->counters().records_streamed;
    if (_buffer.size() == _eng->block_size())
      flush();
  }

  std::uint64_t size() const noexcept {
    return (_storage ? _storage->records : 0) + _buffer.size();
  }

  /// Flushes and hands out the file; the writer must not be used afterwards
  record_file<R> finish() {
    flush();
    _file.reset();
    _lease.reset();
    if (!_storage || _storage->records == 0)
      return {};
    return record_file<R>(std::move(_storage));
  }

private:
  void flush() {
    if (_buffer.empty())
      return;
    if (!_storage) {
      _storage = std::make_shared<detail::file_storage>(_eng->make_temp_path());
      _file = detail::open_file(_storage->path, "wb");
    }
    if (std::fwrite(_buffer.data(), sizeof(R), _buffer.size(), _file.get()) != _buffer.size())
      throw io_error("short write to " + _storage->path.string());
    _storage->records += _buffer.size();
    ++_eng->counters().blocks_written;
    _buffer.clear();
  }

  engine *_eng;
  residency_lease _lease;
  std::vector<R> _buffer;
  std::shared_ptr<detail::file_storage> _storage;
  detail::file_ptr _file;
};

enum class direction { forward, backward };

/// Sequential reader over a record file in either direction. Blocks are
/// aligned to the start of the file; a full scan costs ceil(N/B) reads.
template <class R>
class record_reader {
public:
  record_reader(engine &eng, record_file<R> file, direction dir = direction::forward)
      : _eng(&eng), _file(std::move(file)), _dir(dir), _remaining(_file.size()) {
    if (_remaining == 0)
      return;
    const std::size_t B = eng.block_size();
    _lease = residency_lease(eng, static_cast<std::size_t>(std::min<std::uint64_t>(B, _remaining)));
    _handle = detail::open_file(_file._storage->path, "rb");
    const std::uint64_t blocks = (_remaining + B - 1) / B;
    _next_block = dir == direction::forward ? 0 : blocks - 1;
  }
  record_reader(record_reader &&) noexcept = default;
  record_reader &operator=(record_reader &&) noexcept = default;

  bool has_next() const noexcept { return _pos < _buffer.size() || _remaining > 0; }

  const R &peek() {
    if (_pos == _buffer.size())
      load();
    return _buffer[_pos];
  }

  R next() {
    R r = peek();
    ++_pos;
    ++_eng->counters().records_streamed;
    return r;
  }

  std::uint64_t size() const noexcept { return _file.size(); }

private:
  void load() {
    if (_remaining == 0)
      throw invariant_violation("read past the end of a record stream");
    const std::size_t B = _eng->block_size();
    const std::uint64_t total = _file.size();
    const std::uint64_t start = _next_block * B;
    const std::size_t count = static_cast<std::size_t>(std::min<std::uint64_t>(B, total - start));
    _buffer.resize(count);
    if (std::fseek(_handle.get(), static_cast<long>(start * sizeof(R)), SEEK_SET) != 0 ||
        std::fread(_buffer.data(), sizeof(R), count, _handle.get()) != count)
      throw io_error("short read from " + _file._storage->path.string());
    ++_eng->counters().blocks_read;
    if (_dir == direction::backward)
      std::reverse(_buffer.begin(), _buffer.end());
    _remaining -= count;
    _pos = 0;
    if (_dir == direction::forward)
      ++_next_block;
    else if (_next_block > 0)
      --_next_block;
  }

  engine *_eng;
  record_file<R> _file;
  direction _dir;
  std::uint64_t _remaining;
  std::uint64_t _next_block = 0;
  residency_lease _lease;
  detail::file_ptr _handle;
  std::vector<R> _buffer;
  std::size_t _pos = 0;
};

template <class R>
record_file<R> write_all(engine &eng, const std::vector<R> &records) {
  record_writer<R> w(eng);
  for (const R &r : records)
    w.push(r);
  return w.finish();
}

template <class R>
std::vector<R> read_all(engine &eng, const record_file<R> &file,
                        direction dir = direction::forward) {
  std::vector<R> out;
  record_reader<R> r(eng, file, dir);
  while (r.has_next())
    out.push_back(r.next());
  return out;
}

namespace detail {

/// Stable k-way merge of sorted runs into one run
template <class R, class Compare>
record_file<R> merge_runs(engine &eng, std::vector<record_file<R>> runs, Compare cmp) {
  std::vector<record_reader<R>> readers;
  readers.reserve(runs.size());
  for (auto &run : runs)
    readers.emplace_back(eng, std::move(run));
  record_writer<R> out(eng);
  for (;;) {
    std::size_t best = readers.size();
    for (std::size_t i = 0; i < readers.size(); ++i) {
      if (!readers[i].has_next())
        continue;
      if (best == readers.size() || cmp(readers[i].peek(), readers[best].peek()))
        best = i;
    }
    if (best == readers.size())
      break;
    out.push(readers[best].next());
  }
  return out.finish();
}

} // namespace detail

/// External merge sort within the memory currently available to the engine.
/// Runs are always materialized, even when the input fits in one run.
template <class R, class Compare>
record_file<R> sort_external(engine &eng, const record_file<R> &input, Compare cmp) {
  ++eng.counters().sorts;
  if (input.empty())
    return {};

  const std::size_t B = eng.block_size();
  eng.require_blocks(3, "external sort");

  std::vector<record_file<R>> runs;
  {
    record_reader<R> in(eng, input);
    const std::size_t chunk = eng.available() - B; // leave room for the run writer
    std::vector<R> buffer;
    residency_lease lease(eng, 0);
    while (in.has_next()) {
      buffer.clear();
      while (in.has_next() && buffer.size() < chunk) {
        if (buffer.size() == lease.size())
          lease.resize(std::min(chunk, lease.size() + B));
        buffer.push_back(in.next());
      }
      std::stable_sort(buffer.begin(), buffer.end(), cmp);
      record_writer<R> w(eng);
      for (const R &r : buffer)
        w.push(r);
      runs.push_back(w.finish());
    }
  }

  while (runs.size() > 1) {
    const std::size_t fan_in = std::max<std::size_t>(2, eng.available() / B - 1);
    std::vector<record_file<R>> merged;
    for (std::size_t i = 0; i < runs.size(); i += fan_in) {
      const std::size_t end = std::min(runs.size(), i + fan_in);
      if (end - i == 1) {
        merged.push_back(std::move(runs[i]));
        continue;
      }
      std::vector<record_file<R>> group(std::make_move_iterator(runs.begin() + i),
                                        std::make_move_iterator(runs.begin() + end));
      merged.push_back(detail::merge_runs(eng, std::move(group), cmp));
    }
    runs = std::move(merged);
  }
  return std::move(runs.front());
}

/// Priority queue for level-by-level sweeps.
///
/// `LevelOf` maps a record to its level rank; `Compare` must order records
/// by rank first. Pops are non-decreasing; a push below the current rank, or
/// at the current rank without exceeding the last popped record, is a sweep
/// bug and throws invariant_violation.
///
/// Internally an in-memory heap of bounded size; when it fills up its
/// content is written out as a sorted run and the smallest element is taken
/// across the heap and all run heads.
template <class R, class Compare, class LevelOf>
class levelized_priority_queue {
public:
  levelized_priority_queue(engine &eng, std::size_t share, Compare cmp = {}, LevelOf level = {})
      : _eng(&eng), _cmp(cmp), _level(level), _lease(eng, 0) {
    const std::size_t B = eng.block_size();
    _heap_capacity = share / 2;
    const std::size_t blocks = (share - _heap_capacity) / B;
    if (_heap_capacity < 1 || blocks < 3)
      throw budget_exceeded("priority queue share of " + std::to_string(share) +
                            " records is below 6 blocks");
    _max_runs = blocks - 1; // one block reserved for the writer when merging runs
  }

  levelized_priority_queue(const levelized_priority_queue &) = delete;
  levelized_priority_queue &operator=(const levelized_priority_queue &) = delete;

  bool empty() const noexcept { return _size == 0; }
  std::uint64_t size() const noexcept { return _size; }
  std::uint64_t current_level() const noexcept { return _current_level; }
  std::size_t run_count() const noexcept { return _runs.size(); }

  void push(const R &r) {
    if (_popped_any) {
      const auto lvl = _level(r);
      if (lvl < _current_level)
        throw invariant_violation("push to an already finished level");
      if (lvl == _current_level && !_cmp(_last_popped, r))
        throw invariant_violation("push at the current level does not follow the last pop");
    }
    if (_heap.size() == _heap_capacity)
      spill();
    if (_heap.size() == _lease.size())
      _lease.resize(std::min(_heap_capacity, _lease.size() + _eng->block_size()));
    _heap.push_back(r);
    std::push_heap(_heap.begin(), _heap.end(), inverted{_cmp});
    ++_size;
  }

  const R &top() {
    const std::size_t src = source_of_min();
    return src == heap_source ? _heap.front() : _runs[src].peek();
  }

  R pop() {
    const std::size_t src = source_of_min();
    R r;
    if (src == heap_source) {
      std::pop_heap(_heap.begin(), _heap.end(), inverted{_cmp});
      r = _heap.back();
      _heap.pop_back();
    } else {
      r = _runs[src].next();
      if (!_runs[src].has_next())
        _runs.erase(_runs.begin() + static_cast<std::ptrdiff_t>(src));
    }
    --_size;
    _last_popped = r;
    _current_level = _level(r);
    _popped_any = true;
    return r;
  }

private:
  static constexpr std::size_t heap_source = static_cast<std::size_t>(-1);

  struct inverted {
    Compare cmp;
    bool operator()(const R &a, const R &b) const { return cmp(b, a); }
  };

  std::size_t source_of_min() {
    if (_size == 0)
      throw invariant_violation("top/pop on an empty priority queue");
    std::size_t best = heap_source;
    const R *best_r = _heap.empty() ? nullptr : &_heap.front();
    for (std::size_t i = 0; i < _runs.size(); ++i) {
      const R &head = _runs[i].peek();
      if (best_r == nullptr || _cmp(head, *best_r)) {
        best = i;
        best_r = &head;
      }
    }
    return best;
  }

  void spill() {
    if (_runs.size() + 1 > _max_runs) {
      // Collapse the runs into one; their readers already hold their blocks.
      std::vector<record_file<R>> rest;
      record_writer<R> w(*_eng);
      for (;;) {
        std::size_t best = _runs.size();
        for (std::size_t i = 0; i < _runs.size(); ++i) {
          if (!_runs[i].has_next())
            continue;
          if (best == _runs.size() || _cmp(_runs[i].peek(), _runs[best].peek()))
            best = i;
        }
        if (best == _runs.size())
          break;
        w.push(_runs[best].next());
      }
      _runs.clear();
      _runs.emplace_back(*_eng, w.finish());
    }
    std::sort_heap(_heap.begin(), _heap.end(), inverted{_cmp});
    // sort_heap with an inverted comparator yields descending order
    record_writer<R> w(*_eng);
    for (auto it = _heap.rbegin(); it != _heap.rend(); ++it)
      w.push(*it);
    _heap.clear();
    _lease.resize(0);
    _runs.emplace_back(*_eng, w.finish());
  }

  engine *_eng;
  Compare _cmp;
  LevelOf _level;
  residency_lease _lease;
  std::vector<R> _heap;
  std::size_t _heap_capacity = 0;
  std::size_t _max_runs = 0;
  std::vector<record_reader<R>> _runs;
  std::uint64_t _size = 0;
  R _last_popped{};
  std::uint64_t _current_level = 0;
  bool _popped_any = false;
};

} // namespace xbdd
