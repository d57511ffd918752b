#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace nsc {

/// Failure categories shared by the C++ core, the C API and the CLI.
enum class ErrorKind {
    range,
    insufficient_data,
    shape,
    degenerate_niv,
    domain,
    argument_order,
    extraction_failed,
    empty_budget,
    compensation_failed,
    parse,
    io,
    invalid_argument,
    unknown_preset,
};

std::string_view to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace nsc
