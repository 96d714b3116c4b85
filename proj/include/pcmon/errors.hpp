#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace pcmon {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input data violates a precondition or invariant (empty cloud, degenerate
/// geometry, unknown epoch id, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Malformed file contents. `offset` is a 1-based line number for text
/// formats and a byte offset for binary payloads.
class ParseError : public ValidationError {
 public:
  enum class OffsetKind { Line, Byte };

  ParseError(const std::string& what, OffsetKind kind, std::uint64_t offset)
      : ValidationError(what + (kind == OffsetKind::Line ? " (line " : " (byte offset ") +
                        std::to_string(offset) + ")"),
        kind_(kind),
        offset_(offset) {}

  OffsetKind offset_kind() const { return kind_; }
  std::uint64_t offset() const { return offset_; }

 private:
  OffsetKind kind_;
  std::uint64_t offset_;
};

/// Filesystem failure: missing file, unwritable directory, short read.
class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace pcmon
