#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace nsc {

/// Uniformly sampled record at base period tau0, e.g. fractional frequency
/// or a monitored environmental variable. Always holds at least two samples.
class TimeSeries {
public:
    TimeSeries(std::vector<double> values, double tau0);

    std::span<const double> values() const noexcept { return values_; }
    double operator[](std::size_t i) const noexcept { return values_[i]; }
    std::size_t size() const noexcept { return values_.size(); }
    double tau0() const noexcept { return tau0_; }

    /// Contiguous sub-record [first, first + count).
    TimeSeries slice(std::size_t first, std::size_t count) const;

    /// Adjacent differences v[j+1] - v[j]; one sample shorter.
    TimeSeries differences() const;

    friend bool operator==(const TimeSeries&, const TimeSeries&) = default;

private:
    std::vector<double> values_;
    double tau0_;
};

/// Block means of a TimeSeries at averaging factor m (tau = m * tau0).
/// Also keeps the means relative to an origin (the first source sample), which
/// is what the Allan estimators difference; a constant offset in the source
/// then cannot leak into them through rounding.
class AveragedSeries {
public:
    AveragedSeries(std::vector<double> values, std::size_t m, double tau0);
    AveragedSeries(double origin, std::vector<double> centered, std::size_t m, double tau0);

    std::span<const double> values() const noexcept { return values_; }
    std::span<const double> centered() const noexcept { return centered_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::size_t factor() const noexcept { return m_; }
    double tau() const noexcept { return static_cast<double>(m_) * tau0_; }
    double tau0() const noexcept { return tau0_; }

private:
    std::vector<double> values_;
    std::vector<double> centered_;
    std::size_t m_;
    double tau0_;
};

/// Strictly increasing averaging factors, each in [1, floor(M0/2)].
class TauGrid {
public:
    TauGrid(std::vector<std::size_t> factors, std::size_t series_length);

    /// 1-2-5 progression per decade up to floor(M0/4).
    static TauGrid standard(std::size_t series_length);

    /// Standard grid restricted to [lo, hi] (inclusive), hi clipped to floor(M0/4).
    static TauGrid standard(std::size_t series_length, std::size_t lo, std::size_t hi);

    std::span<const std::size_t> factors() const noexcept { return factors_; }
    std::size_t size() const noexcept { return factors_.size(); }
    bool empty() const noexcept { return factors_.empty(); }

private:
    TauGrid() = default;
    std::vector<std::size_t> factors_;
};

} // namespace nsc
