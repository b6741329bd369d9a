#pragma once

#include <stdexcept>
#include <string>

namespace hbss {

/// Base class for every error raised by the engine.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A generator that was required to lie in a span does not.
class MembershipError : public Error {
 public:
  using Error::Error;
};

/// A degree piece needed for the computation is not finitely realizable
/// inside the active window (infinite rank, or outside a truncation cap).
class WindowTooSmall : public Error {
 public:
  using Error::Error;
};

/// A sequence that was required to be regular is not.
class NonRegular : public Error {
 public:
  using Error::Error;
};

/// Dualization was requested on a module that is not free over the residue ring.
class NotFreeError : public Error {
 public:
  using Error::Error;
};

/// A differential does not square to zero.
class NonSquareZero : public Error {
 public:
  using Error::Error;
};

/// Input is well formed but violates a structural rule (odd degrees, unknown names, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Reading or writing a file failed.
class IoError : public Error {
 public:
  using Error::Error;
};

/// Malformed input text. `line` and `column` are 1-based; 0 means unknown.
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, int line, int column)
      : Error(format(message, line, column)), message_(message), line_(line), column_(column) {}

  const std::string& bare_message() const { return message_; }
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  static std::string format(const std::string& message, int line, int column) {
    if (line <= 0) return column > 0 ? "column " + std::to_string(column) + ": " + message : message;
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + message;
  }

  std::string message_;
  int line_;
  int column_;
};

}  // namespace hbss
