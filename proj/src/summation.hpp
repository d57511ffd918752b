#pragma once

#include <cmath>

namespace nsc::detail {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
public:
    void add(double value) noexcept
    {
        const double t = sum_ + value;
        if (std::fabs(sum_) >= std::fabs(value)) {
            carry_ += (sum_ - t) + value;
        } else {
            carry_ += (value - t) + sum_;
        }
        sum_ = t;
    }

    double value() const noexcept { return sum_ + carry_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

} // namespace nsc::detail
