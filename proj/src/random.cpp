#include "nsc/random.hpp"

#include <cmath>
#include <numbers>

namespace nsc {

namespace {

constexpr std::uint32_t philox_m0 = 0xD2511F53u;
constexpr std::uint32_t philox_m1 = 0xCD9E8D57u;
constexpr std::uint32_t philox_w0 = 0x9E3779B9u;
constexpr std::uint32_t philox_w1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) noexcept
{
    const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(product >> 32);
    lo = static_cast<std::uint32_t>(product);
}

// 53 random bits mapped into (0, 1].
inline double to_open_unit(std::uint64_t bits) noexcept
{
    return (static_cast<double>(bits >> 11) + 1.0) * 0x1.0p-53;
}

} // namespace

Philox4x32::Counter Philox4x32::block(Counter ctr, Key key) noexcept
{
    for (int round = 0; round < 10; ++round) {
        if (round > 0) {
            key[0] += philox_w0;
            key[1] += philox_w1;
        }
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(philox_m0, ctr[0], hi0, lo0);
        mulhilo(philox_m1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    }
    return ctr;
}

namespace {

struct NormalPair {
    double first;
    double second;
};

// One Philox block feeds one Box-Muller pair: draws 2i and 2i+1.
NormalPair normal_pair(std::uint64_t seed, std::uint32_t stream, std::uint64_t pair) noexcept
{
    const Philox4x32::Counter ctr = {static_cast<std::uint32_t>(pair),
                                     static_cast<std::uint32_t>(pair >> 32), stream, 0u};
    const Philox4x32::Key key = {static_cast<std::uint32_t>(seed),
                                 static_cast<std::uint32_t>(seed >> 32)};
    const auto out = Philox4x32::block(ctr, key);
    const double u1 = to_open_unit((static_cast<std::uint64_t>(out[1]) << 32) | out[0]);
    const double u2 = to_open_unit((static_cast<std::uint64_t>(out[3]) << 32) | out[2]);
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    return {radius * std::cos(angle), radius * std::sin(angle)};
}

} // namespace

double GaussianStream::operator()(std::uint64_t index) const noexcept
{
    const NormalPair p = normal_pair(seed_, stream_, index >> 1);
    return (index & 1u) ? p.second : p.first;
}

void GaussianStream::fill(std::span<double> out, std::uint64_t first) const noexcept
{
    std::size_t i = 0;
    if (first & 1u && !out.empty()) {
        out[i++] = (*this)(first);
    }
    for (; i + 1 < out.size(); i += 2) {
        const NormalPair p = normal_pair(seed_, stream_, (first + i) >> 1);
        out[i] = p.first;
        out[i + 1] = p.second;
    }
    if (i < out.size()) {
        out[i] = (*this)(first + i);
    }
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t channel) noexcept
{
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (channel + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace nsc
