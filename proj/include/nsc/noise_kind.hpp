#pragma once

#include <optional>
#include <string_view>

namespace nsc {

/// Power-law frequency noise types: white (AVAR ~ 1/tau), flicker (flat)
/// and random walk (AVAR ~ tau).
enum class NoiseKind { wfn, ffn, rwn };

std::string_view to_string(NoiseKind kind) noexcept;
std::optional<NoiseKind> parse_noise_kind(std::string_view text) noexcept;

/// Confidence constant used by the K error-bar model for each noise type.
double default_k_m(NoiseKind kind) noexcept;

/// K_M when the noise type is unknown: the smallest (most conservative) value.
inline constexpr double fallback_k_m = 0.75;

} // namespace nsc
