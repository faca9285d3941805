#pragma once

#include <stdexcept>
#include <string>

namespace segdist {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid arguments or violated preconditions.
class InputError : public Error {
 public:
  using Error::Error;
};

/// Malformed file content. `line` is 1-based; 0 when the error is not tied to a line.
class ParseError : public InputError {
 public:
  ParseError(const std::string& what, int line)
      : InputError(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line) {}
  int line() const noexcept { return line_; }

 private:
  int line_;
};

/// A brute-force routine was asked to work beyond its hard region cap.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Attempted to split an event whose include/exclude sets already pin a single segment.
class GroundEventError : public Error {
 public:
  using Error::Error;
};

/// Nothing left to refine: the event names exactly one segmentation.
class ExhaustedError : public Error {
 public:
  using Error::Error;
};

/// Internal bookkeeping disagreed with itself (masses, recorded segments, ...).
class ConsistencyError : public Error {
 public:
  using Error::Error;
};

}  // namespace segdist
