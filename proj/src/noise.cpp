#include "nsc/noise.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <string>

#include "nsc/error.hpp"
#include "nsc/random.hpp"
#include "nsc/stats.hpp"
#include "summation.hpp"

namespace nsc {

std::string_view to_string(NoiseKind kind) noexcept
{
    switch (kind) {
    case NoiseKind::wfn: return "wfn";
    case NoiseKind::ffn: return "ffn";
    case NoiseKind::rwn: return "rwn";
    }
    return "unknown";
}

std::optional<NoiseKind> parse_noise_kind(std::string_view text) noexcept
{
    if (text == "wfn") return NoiseKind::wfn;
    if (text == "ffn") return NoiseKind::ffn;
    if (text == "rwn") return NoiseKind::rwn;
    return std::nullopt;
}

double default_k_m(NoiseKind kind) noexcept
{
    switch (kind) {
    case NoiseKind::wfn: return 0.87;
    case NoiseKind::ffn: return 0.77;
    case NoiseKind::rwn: return 0.75;
    }
    return fallback_k_m;
}

NoiseSpec NoiseSpec::make(NoiseKind kind, double level, std::uint64_t seed)
{
    NoiseSpec spec{kind, level, seed, default_k_m(kind)};
    spec.validate();
    return spec;
}

void NoiseSpec::validate() const
{
    if (!(level > 0.0) || !std::isfinite(level)) {
        throw Error(ErrorKind::domain, "noise level must be positive and finite");
    }
    if (!(k_m > 0.0 && k_m <= 1.0)) {
        throw Error(ErrorKind::domain, "K_M must lie in (0, 1]");
    }
}

namespace {

constexpr std::size_t max_flicker_taps = std::size_t{1} << 16;

// FFTW's planner is not reentrant.
std::mutex& fftw_planner_mutex()
{
    static std::mutex mutex;
    return mutex;
}

std::size_t next_power_of_two(std::size_t n)
{
    std::size_t p = 1;
    while (p < n) {
        p <<= 1;
    }
    return p;
}

// Valid part of the linear convolution: out[t] = sum_k taps[k] * input[t + L - 1 - k].
std::vector<double> filter_valid(const std::vector<double>& input, const std::vector<double>& taps,
                                 std::size_t n)
{
    const std::size_t size = next_power_of_two(input.size());
    const std::size_t bins = size / 2 + 1;
    std::vector<double> a(size, 0.0);
    std::vector<double> b(size, 0.0);
    std::vector<std::complex<double>> fa(bins);
    std::vector<std::complex<double>> fb(bins);
    std::copy(input.begin(), input.end(), a.begin());
    std::copy(taps.begin(), taps.end(), b.begin());

    auto* ca = reinterpret_cast<fftw_complex*>(fa.data());
    auto* cb = reinterpret_cast<fftw_complex*>(fb.data());
    fftw_plan forward_a;
    fftw_plan forward_b;
    fftw_plan backward;
    {
        std::lock_guard lock(fftw_planner_mutex());
        forward_a = fftw_plan_dft_r2c_1d(static_cast<int>(size), a.data(), ca, FFTW_ESTIMATE);
        forward_b = fftw_plan_dft_r2c_1d(static_cast<int>(size), b.data(), cb, FFTW_ESTIMATE);
        backward = fftw_plan_dft_c2r_1d(static_cast<int>(size), ca, a.data(), FFTW_ESTIMATE);
    }
    fftw_execute(forward_a);
    fftw_execute(forward_b);
    for (std::size_t i = 0; i < bins; ++i) {
        fa[i] *= fb[i];
    }
    fftw_execute(backward);
    {
        std::lock_guard lock(fftw_planner_mutex());
        fftw_destroy_plan(forward_a);
        fftw_destroy_plan(forward_b);
        fftw_destroy_plan(backward);
    }

    const double norm = 1.0 / static_cast<double>(size);
    const std::size_t offset = taps.size() - 1;
    std::vector<double> out(n);
    for (std::size_t t = 0; t < n; ++t) {
        out[t] = a[t + offset] * norm;
    }
    return out;
}

std::size_t flicker_length(std::size_t n)
{
    return std::min(n, max_flicker_taps);
}

} // namespace

std::vector<double> flicker_taps(std::size_t length)
{
    std::vector<double> h(length);
    if (length == 0) {
        return h;
    }
    h[0] = 1.0;
    for (std::size_t k = 1; k < length; ++k) {
        const double kk = static_cast<double>(k);
        h[k] = h[k - 1] * (kk - 0.5) / kk;
    }
    return h;
}

double innovation_scale(NoiseKind kind, std::size_t n)
{
    switch (kind) {
    case NoiseKind::wfn:
        return 1.0;
    case NoiseKind::rwn:
        // first differences are the innovations: AVAR(tau0) = s^2 / 2
        return std::sqrt(2.0);
    case NoiseKind::ffn: {
        // AVAR(tau0) = s^2 * sum_k (h_k - h_{k-1})^2 / 2 for the truncated filter
        const auto h = flicker_taps(flicker_length(n));
        detail::CompensatedSum sum;
        double previous = 0.0;
        for (double tap : h) {
            sum.add((tap - previous) * (tap - previous));
            previous = tap;
        }
        sum.add(previous * previous);
        return 1.0 / std::sqrt(sum.value() / 2.0);
    }
    }
    return 1.0;
}

TimeSeries generate(const NoiseSpec& spec, std::size_t n, double tau0)
{
    spec.validate();
    if (n < 2) {
        throw Error(ErrorKind::insufficient_data, "noise generation needs n >= 2");
    }
    const GaussianStream gauss(spec.seed);
    const double scale = spec.level * innovation_scale(spec.kind, n);
    std::vector<double> out(n);

    switch (spec.kind) {
    case NoiseKind::wfn:
        gauss.fill(out);
        for (double& v : out) {
            v *= scale;
        }
        break;
    case NoiseKind::rwn: {
        gauss.fill(out);
        double running = 0.0;
        for (double& v : out) {
            running += v * scale;
            v = running;
        }
        break;
    }
    case NoiseKind::ffn: {
        const auto taps = flicker_taps(flicker_length(n));
        std::vector<double> white(n + taps.size() - 1);
        gauss.fill(white);
        for (double& v : white) {
            v *= scale;
        }
        out = filter_valid(white, taps, n);
        break;
    }
    }
    return TimeSeries(std::move(out), tau0);
}

TimeSeries generate_mix(const std::vector<NoiseSpec>& specs, std::size_t n, double tau0)
{
    if (specs.empty()) {
        return TimeSeries(std::vector<double>(n, 0.0), tau0);
    }
    std::vector<double> total(n, 0.0);
    for (const auto& spec : specs) {
        const TimeSeries part = generate(spec, n, tau0);
        for (std::size_t j = 0; j < n; ++j) {
            total[j] += part[j];
        }
    }
    return TimeSeries(std::move(total), tau0);
}

double verify_slope(const TimeSeries& series, std::size_t m_lo, std::size_t m_hi)
{
    const std::size_t limit = series.size() / 4;
    if (m_hi > limit) {
        throw Error(ErrorKind::range, "slope range upper factor " + std::to_string(m_hi) +
                                          " exceeds floor(M0/4) = " + std::to_string(limit));
    }
    const TauGrid grid = TauGrid::standard(series.size(), m_lo, m_hi);
    const PrefixSums sums(series.values());
    std::vector<double> lx;
    std::vector<double> ly;
    for (std::size_t m : grid.factors()) {
        const double avar = overlap_moments(sums, sums, m).var_a;
        if (avar > 0.0 && std::isfinite(avar)) {
            lx.push_back(std::log(static_cast<double>(m)));
            ly.push_back(0.5 * std::log(avar));
        }
    }
    if (lx.size() < 3) {
        throw Error(ErrorKind::insufficient_data,
                    "slope needs at least 3 grid points with nonzero ADEV in [" +
                        std::to_string(m_lo) + ", " + std::to_string(m_hi) + "], found " +
                        std::to_string(lx.size()));
    }
    const double count = static_cast<double>(lx.size());
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        mx += lx[i];
        my += ly[i];
    }
    mx /= count;
    my /= count;
    double sxy = 0.0;
    double sxx = 0.0;
    for (std::size_t i = 0; i < lx.size(); ++i) {
        sxy += (lx[i] - mx) * (ly[i] - my);
        sxx += (lx[i] - mx) * (lx[i] - mx);
    }
    return sxy / sxx;
}

std::optional<NoiseKind> classify_noise(const TimeSeries& series)
{
    const std::size_t hi = std::min<std::size_t>(100, series.size() / 4);
    try {
        const double slope = verify_slope(series, 1, hi);
        if (slope < -0.25) return NoiseKind::wfn;
        if (slope > 0.25) return NoiseKind::rwn;
        return NoiseKind::ffn;
    } catch (const Error&) {
        return std::nullopt;
    }
}

} // namespace nsc
