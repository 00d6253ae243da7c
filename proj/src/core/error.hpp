#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace zscomp {

// Error taxonomy mirrored 1:1 by the C API status codes. `config` and
// `argument` are validation-time failures (CLI exit 2), everything else is a
// runtime/data failure (CLI exit 1).
enum class ErrorKind {
    io,
    format,
    argument,
    schema,
    data,
    config,
    lookup,
    size_guard,
    internal,
};

class Error : public std::runtime_error {
  public:
    Error(ErrorKind kind, std::string message)
        : std::runtime_error(std::move(message)), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

  private:
    ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& message) {
    throw Error(kind, message);
}

const char* error_kind_name(ErrorKind kind);

} // namespace zscomp
