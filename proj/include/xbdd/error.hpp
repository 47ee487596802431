/// @file  error.hpp
/// @brief Exception hierarchy shared by all xbdd modules

#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace xbdd {

/// Base class of every error thrown by the library
class error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Bad user input: malformed arguments, undefined assignments, bad model files
class input_error : public error {
public:
  using error::error;
};

/// A diagram file that does not follow the XBDD1 layout
class format_error : public input_error {
public:
  using input_error::input_error;
};

/// A variable substitution that would reorder levels
class non_monotone_error : public input_error {
public:
  using input_error::input_error;
};

/// Syntax error in a textual model or expression, with the byte offset
class parse_error : public input_error {
public:
  parse_error(const std::string &what, std::size_t offset)
      : input_error(what + " (at byte " + std::to_string(offset) + ")"),
        _offset(offset) {}

  std::size_t offset() const noexcept { return _offset; }

private:
  std::size_t _offset;
};

/// Invalid block size / memory budget combination
class config_error : public input_error {
public:
  using input_error::input_error;
};

/// Failure of the backing storage (open, read, write)
class io_error : public error {
public:
  using error::error;
};

/// An internal contract was broken: a sweep bug, a malformed intermediate,
/// or a residency budget overrun
class invariant_violation : public error {
public:
  using error::error;
};

/// Resident records would exceed the configured memory budget M
class budget_exceeded : public invariant_violation {
public:
  using invariant_violation::invariant_violation;
};

} // namespace xbdd
