#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "nsc/fsc.hpp"
#include "nsc/series.hpp"

namespace nsc {

enum class AsyncMode { delay, integral, both };

/// Timing mismatch between the frequency record and the NIV record:
/// a signed delay of D base periods and/or a moving mean over I periods.
struct AsynchronySpec {
    int delay_steps = 0;
    std::size_t integral_steps = 1;

    AsyncMode mode() const noexcept;
    void validate() const;
};

/// A transformed NIV record and where it sits against the original time
/// axis: series[j] pairs with y[j + lead].
struct Aligned {
    TimeSeries series;
    std::size_t lead = 0;

    /// y cut to the samples that pair with `series`.
    TimeSeries truncate(const TimeSeries& y) const;
};

/// out[j] = x[j + D]. For D >= 0 the lead is 0; for D < 0 the series is
/// x[0, M0 - |D|) with lead |D|. Length M0 - |D|; |D| >= M0 is a range error.
Aligned apply_delay(const TimeSeries& x, int delay_steps);

/// Centred moving mean over I samples, out[j] = mean x[j, j + I), lead
/// floor(I / 2). Only full windows are kept: length M0 - I + 1 for odd I,
/// M0 - I for even I (window centred half a step early).
/// I = 0 or I > ceil(M0 / 2) is a range error.
Aligned apply_integral_mean(const TimeSeries& x, std::size_t integral_steps);

/// Integral mean of the delayed record; leads add.
Aligned apply_asynchrony(const TimeSeries& x, const AsynchronySpec& spec);

/// Expected K(tau) of an effect with coefficient k seen through a pure delay.
double theory_k_delay(double tau, double tau_dly, double k);

/// Expected K(tau) of an effect with coefficient k seen through an integral mean.
double theory_k_integral(double tau, double tau_int, double k);

struct CompensationOptions {
    int delay_min = -16;
    int delay_max = 16;
    std::size_t integral_min = 1;
    std::size_t integral_max = 16;
    std::vector<std::size_t> probes{1, 2, 4, 8};
    CurveOptions curve;
};

struct CompensationResult {
    AsynchronySpec best;
    double score = 0.0;
    KCurve curve;
    std::size_t evaluated = 0;
    std::size_t degenerate = 0;
};

/// Exhaustive search over delay in [delay_min, delay_max] and integral window
/// in [integral_min, integral_max]. Each candidate x' = integral mean of the
/// delayed x is scored by sum over probe factors of the residual Allan
/// variance of (y - K x') relative to that of y; the minimum wins, ties
/// (1e-12 relative) going to smaller |D|, then smaller I, then positive D.
/// Returns the winner and its K curve over the standard grid.
CompensationResult compensate(const TimeSeries& y, const TimeSeries& x,
                              const CompensationOptions& options = {});

} // namespace nsc
