#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include "nsc/noise_kind.hpp"
#include "nsc/series.hpp"

namespace nsc {

/// Recipe for one seeded power-law noise stream. `level` is the Allan
/// deviation at tau0.
struct NoiseSpec {
    NoiseKind kind = NoiseKind::wfn;
    double level = 1.0;
    std::uint64_t seed = 0;
    double k_m = default_k_m(NoiseKind::wfn);

    static NoiseSpec make(NoiseKind kind, double level, std::uint64_t seed);

    /// Throws on level <= 0 or k_m outside (0, 1].
    void validate() const;
};

/// Generates n samples at base period tau0. Deterministic in (spec, n).
///   wfn: independent Gaussian samples
///   rwn: running sum of independent Gaussian samples
///   ffn: white noise through the half-integrating fractional filter
///        (1 - B)^(-1/2), truncated to min(n, 2^16) taps
TimeSeries generate(const NoiseSpec& spec, std::size_t n, double tau0 = 1.0);

/// Sum of several independent streams (e.g. a flicker floor plus random walk).
TimeSeries generate_mix(const std::vector<NoiseSpec>& specs, std::size_t n, double tau0 = 1.0);

/// Fractional-integration filter taps h_k of (1 - B)^(-1/2).
std::vector<double> flicker_taps(std::size_t length);

/// Innovation scale the generator uses for a unit Allan deviation at tau0.
double innovation_scale(NoiseKind kind, std::size_t n);

/// Least-squares slope of log(overlapping ADEV) against log(m) over the
/// standard grid restricted to [m_lo, m_hi]. Needs m_hi <= floor(M0/4),
/// at least three grid points and nonzero ADEV at each of them.
double verify_slope(const TimeSeries& series, std::size_t m_lo, std::size_t m_hi);

/// Classifies a record by its ADEV slope over m in [1, 100]: below -0.25 is
/// white, above +0.25 random walk, otherwise flicker. Returns nullopt when
/// the slope cannot be measured.
std::optional<NoiseKind> classify_noise(const TimeSeries& series);

} // namespace nsc
