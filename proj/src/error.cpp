#include "nsc/error.hpp"

namespace nsc {

std::string_view to_string(ErrorKind kind) noexcept
{
    switch (kind) {
    case ErrorKind::range: return "range";
    case ErrorKind::insufficient_data: return "insufficient_data";
    case ErrorKind::shape: return "shape";
    case ErrorKind::degenerate_niv: return "degenerate_niv";
    case ErrorKind::domain: return "domain";
    case ErrorKind::argument_order: return "argument_order";
    case ErrorKind::extraction_failed: return "extraction_failed";
    case ErrorKind::empty_budget: return "empty_budget";
    case ErrorKind::compensation_failed: return "compensation_failed";
    case ErrorKind::parse: return "parse";
    case ErrorKind::io: return "io";
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::unknown_preset: return "unknown_preset";
    }
    return "unknown";
}

} // namespace nsc
