#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "nsc/noise_kind.hpp"
#include "nsc/series.hpp"

namespace nsc {

/// Means of consecutive m-blocks; the trailing M0 mod m samples are dropped.
AveragedSeries block_average(const TimeSeries& series, std::size_t m);

/// Allan variance of an averaged series (non-overlapping estimator).
double adev2(const AveragedSeries& series);

/// Allan covariance of two averaged series with equal length and factor.
double acov(const AveragedSeries& a, const AveragedSeries& b);

/// Overlapping Allan variance of the raw series at factor m. Requires M0 >= 2m+1.
double overlap_adev2(const TimeSeries& series, std::size_t m);

/// Overlapping Allan covariance; overlap_acov(a, a, m) == overlap_adev2(a, m).
double overlap_acov(const TimeSeries& a, const TimeSeries& b, std::size_t m);

/// Compensated prefix sums of a record (recentred on its first sample), so
/// any block sum costs O(1). Build once, query every averaging factor.
class PrefixSums {
public:
    explicit PrefixSums(std::span<const double> values);

    std::size_t size() const noexcept { return hi_.size() - 1; }

    /// Sum of (v[i] - v[0]) for i in [first, first + count).
    double block_sum(std::size_t first, std::size_t count) const noexcept
    {
        const std::size_t last = first + count;
        return (hi_[last] - hi_[first]) + (lo_[last] - lo_[first]);
    }

    /// Overlapping window statistic m * (mean of next m-block - mean of this one).
    double window(std::size_t j, std::size_t m) const noexcept
    {
        return block_sum(j + m, m) - block_sum(j, m);
    }

private:
    std::vector<double> hi_;
    std::vector<double> lo_;
};

/// Allan variances of two records and their Allan covariance at one factor.
struct PairMoments {
    double var_a = 0.0;
    double var_b = 0.0;
    double cov = 0.0;
    std::size_t terms = 0;   // difference terms entering each sum
};

PairMoments normal_moments(const TimeSeries& a, const TimeSeries& b, std::size_t m);
PairMoments overlap_moments(const PrefixSums& a, const PrefixSums& b, std::size_t m);

/// Effective degrees of freedom of the overlapping Allan variance at factor m
/// for a record of M0 frequency samples, clamped to [1, M0]. With no noise
/// kind, returns the non-overlapping sample count floor(M0/m).
double edf(std::optional<NoiseKind> kind, std::size_t m, std::size_t series_length);

} // namespace nsc
