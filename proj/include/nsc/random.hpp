#pragma once

#include <array>
#include <cstdint>
#include <span>

namespace nsc {

/// Philox4x32-10 counter-based generator (Salmon et al., Random123).
/// Every output block is a pure function of (key, counter), so streams can be
/// regenerated or split without shared state.
class Philox4x32 {
public:
    using Counter = std::array<std::uint32_t, 4>;
    using Key = std::array<std::uint32_t, 2>;

    static Counter block(Counter counter, Key key) noexcept;
};

/// Standard-normal stream addressed by (seed, index); draw i is reproducible
/// on any platform independent of the order draws are requested in.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed, std::uint32_t stream = 0) noexcept
        : seed_(seed), stream_(stream)
    {
    }

    double operator()(std::uint64_t index) const noexcept;

    /// Draws [first, first + out.size()) in one pass; identical to operator().
    void fill(std::span<double> out, std::uint64_t first = 0) const noexcept;

    std::uint64_t seed() const noexcept { return seed_; }

private:
    std::uint64_t seed_;
    std::uint32_t stream_;
};

/// Derives independent child seeds from a master seed (SplitMix64 finalizer).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t channel) noexcept;

} // namespace nsc
