#include "nsc/series.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nsc/error.hpp"

namespace nsc {

TimeSeries::TimeSeries(std::vector<double> values, double tau0)
    : values_(std::move(values)), tau0_(tau0)
{
    if (values_.size() < 2) {
        throw Error(ErrorKind::insufficient_data,
                    "time series needs at least 2 samples, got " + std::to_string(values_.size()));
    }
    if (!(tau0_ > 0.0) || !std::isfinite(tau0_)) {
        throw Error(ErrorKind::domain, "tau0 must be a positive finite number of seconds");
    }
}

TimeSeries TimeSeries::slice(std::size_t first, std::size_t count) const
{
    if (first > values_.size() || count > values_.size() - first) {
        throw Error(ErrorKind::range, "slice [" + std::to_string(first) + ", " +
                                          std::to_string(first + count) + ") exceeds length " +
                                          std::to_string(values_.size()));
    }
    const auto begin = values_.begin() + static_cast<std::ptrdiff_t>(first);
    return TimeSeries(std::vector<double>(begin, begin + static_cast<std::ptrdiff_t>(count)), tau0_);
}

TimeSeries TimeSeries::differences() const
{
    std::vector<double> out(values_.size() - 1);
    for (std::size_t j = 0; j + 1 < values_.size(); ++j) {
        out[j] = values_[j + 1] - values_[j];
    }
    return TimeSeries(std::move(out), tau0_);
}

AveragedSeries::AveragedSeries(std::vector<double> values, std::size_t m, double tau0)
    : values_(std::move(values)), centered_(values_.size()), m_(m), tau0_(tau0)
{
    if (m_ == 0) {
        throw Error(ErrorKind::range, "averaging factor must be >= 1");
    }
    const double origin = values_.empty() ? 0.0 : values_.front();
    for (std::size_t j = 0; j < values_.size(); ++j) {
        centered_[j] = values_[j] - origin;
    }
}

AveragedSeries::AveragedSeries(double origin, std::vector<double> centered, std::size_t m,
                               double tau0)
    : values_(centered.size()), centered_(std::move(centered)), m_(m), tau0_(tau0)
{
    if (m_ == 0) {
        throw Error(ErrorKind::range, "averaging factor must be >= 1");
    }
    for (std::size_t j = 0; j < centered_.size(); ++j) {
        values_[j] = origin + centered_[j];
    }
}

TauGrid::TauGrid(std::vector<std::size_t> factors, std::size_t series_length)
    : factors_(std::move(factors))
{
    const std::size_t limit = series_length / 2;
    for (std::size_t i = 0; i < factors_.size(); ++i) {
        const std::size_t m = factors_[i];
        if (m < 1 || m > limit) {
            throw Error(ErrorKind::range, "averaging factor " + std::to_string(m) +
                                              " outside [1, " + std::to_string(limit) + "]");
        }
        if (i > 0 && m <= factors_[i - 1]) {
            throw Error(ErrorKind::invalid_argument, "tau grid factors must be strictly increasing");
        }
    }
}

TauGrid TauGrid::standard(std::size_t series_length)
{
    return standard(series_length, 1, series_length / 4);
}

TauGrid TauGrid::standard(std::size_t series_length, std::size_t lo, std::size_t hi)
{
    TauGrid grid;
    hi = std::min(hi, series_length / 4);
    constexpr std::size_t steps[] = {1, 2, 5};
    for (std::size_t decade = 1; decade <= hi; decade *= 10) {
        for (std::size_t step : steps) {
            const std::size_t m = step * decade;
            if (m >= lo && m <= hi) {
                grid.factors_.push_back(m);
            }
        }
        if (decade > hi / 10) {
            break;
        }
    }
    return grid;
}

} // namespace nsc
