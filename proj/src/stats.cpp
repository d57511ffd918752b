#include "nsc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsc/error.hpp"
#include "summation.hpp"

namespace nsc {

namespace {

void require_factor(std::size_t m, std::size_t length)
{
    if (m < 1 || m > length / 2) {
        throw Error(ErrorKind::range, "averaging factor " + std::to_string(m) +
                                          " outside admissible interval [1, " +
                                          std::to_string(length / 2) + "]");
    }
}

void require_overlap_length(std::size_t m, std::size_t length)
{
    if (m < 1) {
        throw Error(ErrorKind::range, "averaging factor must be >= 1");
    }
    if (length < 2 * m + 1) {
        throw Error(ErrorKind::insufficient_data,
                    "overlapping estimator at m=" + std::to_string(m) + " needs at least " +
                        std::to_string(2 * m + 1) + " samples, got " + std::to_string(length));
    }
}

void require_same_length(std::size_t a, std::size_t b)
{
    if (a != b) {
        throw Error(ErrorKind::shape, "series lengths differ: " + std::to_string(a) + " vs " +
                                          std::to_string(b));
    }
}

} // namespace

AveragedSeries block_average(const TimeSeries& series, std::size_t m)
{
    require_factor(m, series.size());
    const std::size_t count = series.size() / m;
    const auto values = series.values();
    const double origin = values.front();
    std::vector<double> out(count);
    for (std::size_t j = 0; j < count; ++j) {
        detail::CompensatedSum sum;
        for (std::size_t i = j * m; i < (j + 1) * m; ++i) {
            sum.add(values[i] - origin);
        }
        out[j] = sum.value() / static_cast<double>(m);
    }
    return AveragedSeries(origin, std::move(out), m, series.tau0());
}

double adev2(const AveragedSeries& series)
{
    return acov(series, series);
}

double acov(const AveragedSeries& a, const AveragedSeries& b)
{
    if (a.size() != b.size() || a.factor() != b.factor()) {
        throw Error(ErrorKind::shape, "Allan covariance needs equal length and factor");
    }
    const std::size_t count = a.size();
    if (count < 2) {
        throw Error(ErrorKind::insufficient_data, "Allan variance needs at least 2 averages");
    }
    const auto va = a.centered();
    const auto vb = b.centered();
    detail::CompensatedSum sum;
    for (std::size_t j = 0; j + 1 < count; ++j) {
        sum.add((va[j + 1] - va[j]) * (vb[j + 1] - vb[j]));
    }
    return sum.value() / (2.0 * static_cast<double>(count - 1));
}

PrefixSums::PrefixSums(std::span<const double> values)
    : hi_(values.size() + 1, 0.0), lo_(values.size() + 1, 0.0)
{
    const double origin = values.empty() ? 0.0 : values.front();
    double sum = 0.0;
    double carry = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double v = values[i] - origin;
        const double t = sum + v;
        // two-sum keeps the exact rounding error of each step
        const double bv = t - sum;
        carry += (sum - (t - bv)) + (v - bv);
        sum = t;
        hi_[i + 1] = sum;
        lo_[i + 1] = carry;
    }
}

PairMoments overlap_moments(const PrefixSums& a, const PrefixSums& b, std::size_t m)
{
    require_same_length(a.size(), b.size());
    require_overlap_length(m, a.size());
    const std::size_t terms = a.size() - 2 * m + 1;
    detail::CompensatedSum saa;
    detail::CompensatedSum sbb;
    detail::CompensatedSum sab;
    for (std::size_t j = 0; j < terms; ++j) {
        const double wa = a.window(j, m);
        const double wb = b.window(j, m);
        saa.add(wa * wa);
        sbb.add(wb * wb);
        sab.add(wa * wb);
    }
    const double norm = 2.0 * static_cast<double>(m) * static_cast<double>(m) *
                        static_cast<double>(terms);
    return {saa.value() / norm, sbb.value() / norm, sab.value() / norm, terms};
}

PairMoments normal_moments(const TimeSeries& a, const TimeSeries& b, std::size_t m)
{
    require_same_length(a.size(), b.size());
    const AveragedSeries aa = block_average(a, m);
    const AveragedSeries ab = block_average(b, m);
    return {adev2(aa), adev2(ab), acov(aa, ab), aa.size() - 1};
}

double overlap_adev2(const TimeSeries& series, std::size_t m)
{
    require_overlap_length(m, series.size());
    const PrefixSums sums(series.values());
    return overlap_moments(sums, sums, m).var_a;
}

double overlap_acov(const TimeSeries& a, const TimeSeries& b, std::size_t m)
{
    require_same_length(a.size(), b.size());
    require_overlap_length(m, a.size());
    return overlap_moments(PrefixSums(a.values()), PrefixSums(b.values()), m).cov;
}

double edf(std::optional<NoiseKind> kind, std::size_t m, std::size_t series_length)
{
    require_overlap_length(m, series_length);
    const double M0 = static_cast<double>(series_length);
    if (!kind) {
        return std::max(1.0, std::floor(M0 / static_cast<double>(m)));
    }
    // Approximations for the overlapping Allan variance, written for
    // N = M0 + 1 phase points.
    const double N = M0 + 1.0;
    const double mm = static_cast<double>(m);
    double value = 0.0;
    switch (*kind) {
    case NoiseKind::wfn:
        value = (3.0 * (N - 1.0) / (2.0 * mm) - 2.0 * (N - 2.0) / N) *
                (4.0 * mm * mm / (4.0 * mm * mm + 5.0));
        break;
    case NoiseKind::ffn:
        if (m == 1) {
            value = 2.0 * (N - 2.0) * (N - 2.0) / (2.3 * N - 4.9);
        } else {
            value = 5.0 * N * N / (4.0 * mm * (N + 3.0 * mm));
        }
        break;
    case NoiseKind::rwn:
        value = (N - 2.0) / mm *
                ((N - 1.0) * (N - 1.0) - 3.0 * mm * (N - 1.0) + 4.0 * mm * mm) /
                ((N - 3.0) * (N - 3.0));
        break;
    }
    return std::clamp(value, 1.0, M0);
}

} // namespace nsc
