#include "nsc/sim.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <set>
#include <string>

#include "nsc/error.hpp"
#include "nsc/random.hpp"
#include "nsc/stats.hpp"

namespace nsc {

namespace {

std::size_t padding(const EffectSpec& e)
{
    if (!e.asynchrony) {
        return 0;
    }
    return static_cast<std::size_t>(std::abs(static_cast<long long>(e.asynchrony->delay_steps))) +
           e.asynchrony->integral_steps;
}

void validate_mix(const std::vector<NoiseSpec>& mix)
{
    for (const auto& spec : mix) {
        spec.validate();
    }
}

double share(const TimeSeries& part, const TimeSeries& whole)
{
    const double total = overlap_adev2(whole, 1);
    return total > 0.0 ? overlap_adev2(part, 1) / total : 0.0;
}

} // namespace

void Scenario::validate() const
{
    if (n < 2) {
        throw Error(ErrorKind::insufficient_data, "scenario needs at least 2 samples");
    }
    if (!(tau0 > 0.0) || !std::isfinite(tau0)) {
        throw Error(ErrorKind::domain, "tau0 must be a positive finite number of seconds");
    }
    if (!std::isfinite(clock.y_bar)) {
        throw Error(ErrorKind::domain, "y_bar must be finite");
    }
    validate_mix(clock.floor);
    validate_mix(clock.reference);
    if (clock.quality) {
        if (!clock.floor.empty()) {
            throw Error(ErrorKind::invalid_argument,
                        "noise floor given both as a mixture and as (Q, SNR)");
        }
        if (!(clock.quality->q > 0.0) || !(clock.quality->snr > 0.0) ||
            !std::isfinite(clock.quality->level())) {
            throw Error(ErrorKind::domain, "Q and SNR must be positive");
        }
    }
    std::set<std::string> names;
    std::set<std::uint64_t> seeds;
    for (const auto& e : clock.effects) {
        if (e.name.empty() || !names.insert(e.name).second) {
            throw Error(ErrorKind::invalid_argument,
                        "effect names must be nonempty and unique ('" + e.name + "')");
        }
        if (!std::isfinite(e.k)) {
            throw Error(ErrorKind::domain, "effect '" + e.name + "' has a non-finite k");
        }
        if (e.niv.empty()) {
            throw Error(ErrorKind::invalid_argument, "effect '" + e.name + "' has no NIV stream");
        }
        validate_mix(e.niv);
        for (const auto& spec : e.niv) {
            if (!seeds.insert(spec.seed).second) {
                throw Error(ErrorKind::invalid_argument,
                            "NIV seed " + std::to_string(spec.seed) + " is used twice");
            }
        }
        if (e.measurement_noise) {
            e.measurement_noise->validate();
        }
        if (e.asynchrony) {
            e.asynchrony->validate();
        }
        if (e.operating_point && (!(*e.operating_point != 0.0) || !std::isfinite(*e.operating_point))) {
            throw Error(ErrorKind::domain,
                        "effect '" + e.name + "' needs a finite nonzero operating point");
        }
    }
}

Simulation simulate(const Scenario& scenario)
{
    scenario.validate();
    const std::size_t n = scenario.n;
    const auto& clock = scenario.clock;

    std::vector<double> acc(n, 0.0);
    if (clock.quality) {
        const NoiseSpec spec = NoiseSpec::make(NoiseKind::wfn, clock.quality->level(), clock.quality->seed);
        const TimeSeries y0 = generate(spec, n, scenario.tau0);
        std::copy(y0.values().begin(), y0.values().end(), acc.begin());
    } else if (!clock.floor.empty()) {
        const TimeSeries y0 = generate_mix(clock.floor, n, scenario.tau0);
        std::copy(y0.values().begin(), y0.values().end(), acc.begin());
    }
    for (double& v : acc) {
        v += clock.y_bar;
    }
    if (!clock.reference.empty()) {
        const TimeSeries ref = generate_mix(clock.reference, n, scenario.tau0);
        for (std::size_t j = 0; j < n; ++j) {
            acc[j] -= ref[j];
        }
    }

    Truth truth;
    truth.scenario = scenario.name;
    truth.seed = scenario.seed;
    truth.n = n;
    truth.tau0 = scenario.tau0;
    truth.y_bar = clock.y_bar;
    truth.caveat = scenario.caveat;

    std::vector<TimeSeries> measured;
    std::vector<TimeSeries> driving;
    std::vector<TimeSeries> contributions;
    for (const auto& e : clock.effects) {
        const std::size_t pad = padding(e);
        const TimeSeries u = generate_mix(e.niv, n + 2 * pad, scenario.tau0);

        std::vector<double> xm(u.values().begin() + static_cast<std::ptrdiff_t>(pad),
                               u.values().begin() + static_cast<std::ptrdiff_t>(pad + n));
        std::vector<double> xt = xm;
        if (e.asynchrony) {
            const Aligned v = apply_asynchrony(u, *e.asynchrony);
            for (std::size_t t = 0; t < n; ++t) {
                xt[t] = v.series[t + pad - v.lead];
            }
        }
        if (e.measurement_noise) {
            const TimeSeries noise = generate(*e.measurement_noise, n, scenario.tau0);
            for (std::size_t t = 0; t < n; ++t) {
                xm[t] += noise[t];
            }
        }

        std::vector<double> c(n);
        if (e.operating_point) {
            const double x0 = *e.operating_point;
            const double q = e.k / (2.0 * x0);
            for (std::size_t t = 0; t < n; ++t) {
                const double s = x0 + xt[t];
                c[t] = q * s * s;
            }
        } else {
            for (std::size_t t = 0; t < n; ++t) {
                c[t] = e.k * xt[t];
            }
        }
        for (std::size_t t = 0; t < n; ++t) {
            acc[t] += c[t];
        }

        EffectTruth et;
        et.name = e.name;
        et.k = e.k;
        if (e.asynchrony) {
            et.delay_steps = e.asynchrony->delay_steps;
            et.integral_steps = e.asynchrony->integral_steps;
        }
        et.quadratic = e.operating_point.has_value();
        truth.effects.push_back(et);

        measured.emplace_back(std::move(xm), scenario.tau0);
        driving.emplace_back(std::move(xt), scenario.tau0);
        contributions.emplace_back(std::move(c), scenario.tau0);
    }

    TimeSeries y(std::move(acc), scenario.tau0);
    for (std::size_t i = 0; i < contributions.size(); ++i) {
        truth.effects[i].ratio = share(contributions[i], y);
    }
    return {std::move(y), std::move(measured), std::move(driving), std::move(contributions),
            std::move(truth)};
}

// --- presets ---------------------------------------------------------------

namespace {

constexpr double y_bar_default = 1e-13;

// Seed channels: 0 (Q, SNR) floor, 1 reference, 10 + i NIV streams,
// 100 + i floor mixture; single-effect presets add 1000 per noise kind so
// presets of different kinds never share a stream.
struct Seeder {
    std::uint64_t master;
    std::uint64_t operator()(std::uint64_t channel) const { return derive_seed(master, channel); }
};

std::size_t scaled(double base, double scale)
{
    if (!(scale > 0.0 && scale <= 1.0)) {
        throw Error(ErrorKind::range, "scale must lie in (0, 1]");
    }
    return static_cast<std::size_t>(std::llround(base * scale));
}

// One-effect clock where k x carries `ratio` of the total variance at every
// tau: floor and NIV share the noise kind(s), with relative levels `mix`.
Scenario single_effect(std::string name, std::vector<std::pair<NoiseKind, double>> mix, double k,
                       double ratio, std::size_t n, std::uint64_t seed)
{
    const Seeder s{seed};
    Scenario sc;
    sc.name = std::move(name);
    sc.n = n;
    sc.seed = seed;
    sc.clock.y_bar = y_bar_default;
    const double total = 1e-13;
    EffectSpec e;
    e.name = "x";
    e.k = k;
    std::uint64_t channel = 0;
    for (const auto& [kind, rel] : mix) {
        const std::uint64_t family = 1000 * static_cast<std::uint64_t>(kind);
        sc.clock.floor.push_back(
            NoiseSpec::make(kind, rel * total * std::sqrt(1.0 - ratio), s(family + 100 + channel)));
        e.niv.push_back(
            NoiseSpec::make(kind, rel * total * std::sqrt(ratio) / std::abs(k), s(family + 10 + channel)));
        ++channel;
    }
    sc.clock.effects.push_back(e);
    return sc;
}

} // namespace

const std::vector<std::string>& preset_names()
{
    static const std::vector<std::string> names{
        "fig3_affs", "fig3_osc",      "fig4_wfn",  "fig4_ffn", "fig4_rwn",
        "fig5_delay", "fig5_integral", "fig5_both", "table1",   "zeeman_demo"};
    return names;
}

Scenario preset(std::string_view name, double scale, std::uint64_t seed)
{
    const Seeder s{seed};
    if (name == "fig3_affs") {
        Scenario sc = single_effect("fig3_affs", {{NoiseKind::wfn, 1.0}}, 0.11, 0.01,
                                    scaled(6.5e5, scale), seed);
        sc.caveat = "synthetic white-noise stand-in for recorded fountain data";
        return sc;
    }
    if (name == "fig3_osc") {
        Scenario sc = single_effect("fig3_osc", {{NoiseKind::ffn, 1.0}, {NoiseKind::rwn, 0.05}}, 0.11,
                                    0.01, scaled(6.5e5, scale), seed);
        sc.caveat = "synthetic flicker plus random-walk stand-in for recorded oscillator data";
        return sc;
    }
    if (name == "fig4_wfn" || name == "table1") {
        Scenario sc = single_effect(std::string(name), {{NoiseKind::wfn, 1.0}}, 1.0, 0.05,
                                    scaled(2e6, scale), seed);
        return sc;
    }
    if (name == "fig4_ffn") {
        return single_effect("fig4_ffn", {{NoiseKind::ffn, 1.0}}, 1.0, 0.05, scaled(2e6, scale), seed);
    }
    if (name == "fig4_rwn") {
        return single_effect("fig4_rwn", {{NoiseKind::rwn, 1.0}}, 1.0, 0.05, scaled(2e6, scale), seed);
    }
    if (name == "fig5_delay" || name == "fig5_integral" || name == "fig5_both") {
        Scenario sc = single_effect(std::string(name), {{NoiseKind::wfn, 1.0}}, 0.11, 0.05,
                                    scaled(6.5e5, scale), seed);
        if (name == "fig5_delay") {
            sc.clock.effects[0].asynchrony = AsynchronySpec{10, 1};
        } else if (name == "fig5_integral") {
            sc.clock.effects[0].asynchrony = AsynchronySpec{0, 10};
        } else {
            sc.clock.effects[0].asynchrony = AsynchronySpec{6, 8};
        }
        sc.caveat = "asynchrony injected on the clock side of a white-noise NIV";
        return sc;
    }
    if (name == "zeeman_demo") {
        // Second-order Zeeman shift y = a (I + dI)^2 read through a sense
        // resistor: x = dV = R dI, slope 2 a I / R = 6.47e-14 per volt.
        const double resistance = 100.0;
        const double current = 11.05;
        const double k_volt = 6.47e-14;
        Scenario sc;
        sc.name = "zeeman_demo";
        sc.n = scaled(1e6, scale);
        sc.seed = seed;
        sc.clock.y_bar = y_bar_default;
        sc.clock.quality = QualityFloor{7e9, 1e3, s(0)};
        sc.clock.reference.push_back(NoiseSpec::make(NoiseKind::wfn, 2e-14, s(1)));
        EffectSpec e;
        e.name = "coil_voltage";
        e.k = k_volt;
        e.niv.push_back(NoiseSpec::make(NoiseKind::wfn, 1.5e-4 * current * resistance, s(10)));
        e.operating_point = current * resistance;
        sc.clock.effects.push_back(e);
        sc.caveat = "synthetic quadratic response; hardware coefficients are not reproduced";
        return sc;
    }
    std::string list;
    for (const auto& p : preset_names()) {
        list += (list.empty() ? "" : ", ") + p;
    }
    throw Error(ErrorKind::unknown_preset,
                "unknown preset '" + std::string(name) + "'; valid presets: " + list);
}

} // namespace nsc
