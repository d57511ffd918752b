#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nsc/asynchrony.hpp"
#include "nsc/noise.hpp"
#include "nsc/series.hpp"

namespace nsc {

/// One environmental effect acting on the clock with coefficient k.
///
/// The recorded NIV is the generated stream (plus measurement noise when
/// given). The clock responds to the asynchrony-transformed stream, so the
/// recorded copy is what compensate() has to realign.
struct EffectSpec {
    std::string name;
    double k = 0.0;
    std::vector<NoiseSpec> niv;                    // summed streams of x
    std::optional<AsynchronySpec> asynchrony;
    std::optional<NoiseSpec> measurement_noise;
    /// When set, the clock sees (k / (2 x0)) (x0 + x)^2 instead of k x: a
    /// quadratic response whose slope at x = 0 is still k.
    std::optional<double> operating_point;
};

/// White frequency floor of a passive standard: sigma_y(tau0) = 1 / (Q SNR).
struct QualityFloor {
    double q = 0.0;
    double snr = 0.0;
    std::uint64_t seed = 0;

    double level() const { return 1.0 / (q * snr); }
};

struct ClockSpec {
    double y_bar = 0.0;
    std::vector<NoiseSpec> floor;                  // y0 as a noise mixture
    std::optional<QualityFloor> quality;           // or as a (Q, SNR) floor
    std::vector<EffectSpec> effects;
    std::vector<NoiseSpec> reference;              // y_ref, subtracted
};

struct Scenario {
    std::string name = "custom";
    ClockSpec clock;
    std::size_t n = 0;
    double tau0 = 1.0;
    std::uint64_t seed = 0;
    std::string caveat;

    /// Checks every parameter; nothing is generated.
    void validate() const;
};

struct EffectTruth {
    std::string name;
    double k = 0.0;
    int delay_steps = 0;
    std::size_t integral_steps = 1;
    bool quadratic = false;
    double ratio = 0.0;        // realized Allan variance share of this effect at tau0
};

struct Truth {
    std::string scenario;
    std::uint64_t seed = 0;
    std::size_t n = 0;
    double tau0 = 1.0;
    double y_bar = 0.0;
    std::vector<EffectTruth> effects;
    std::string caveat;
};

struct Simulation {
    TimeSeries y;                         // y0 + y_bar - y_ref + sum of contributions
    std::vector<TimeSeries> x;            // recorded NIVs
    std::vector<TimeSeries> x_true;       // NIVs as seen by the clock
    std::vector<TimeSeries> contribution; // per-effect term added to y
    Truth truth;
};

/// Deterministic in the scenario: equal scenarios give bit-identical output.
/// y is accumulated as ((y0 + y_bar) - y_ref) + c_1 + c_2 + ...
Simulation simulate(const Scenario& scenario);

/// Named reference scenarios; scale in (0, 1] shrinks the record length.
/// Every stream seed is derived from `seed`.
Scenario preset(std::string_view name, double scale = 1.0, std::uint64_t seed = 1);

const std::vector<std::string>& preset_names();

} // namespace nsc
