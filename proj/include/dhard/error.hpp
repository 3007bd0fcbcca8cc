#pragma once

#include <stdexcept>
#include <string>

namespace dhard {

/// Error categories surfaced through the C API as status codes.
enum class ErrorKind {
  invalid_argument,
  parse,
  io,
  cap_exceeded,
  sat_found,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string &what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

private:
  ErrorKind kind_;
};

} // namespace dhard
