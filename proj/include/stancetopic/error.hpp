#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace stancetopic {

// Caller passed a value outside an operation's domain.
class ArgumentError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

// Input could not be opened or read at all.
class InputError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

// Malformed content in a text or binary file.
class ParseError : public std::runtime_error {
public:
  ParseError(const std::string &source, std::size_t line, const std::string &what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what),
        source_(source), line_(line) {}

  const std::string &source() const noexcept { return source_; }
  std::size_t line() const noexcept { return line_; }

private:
  std::string source_;
  std::size_t line_;
};

// A broken internal invariant (e.g. Gibbs counts out of sync with assignments).
class InternalError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

} // namespace stancetopic
