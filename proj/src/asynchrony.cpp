#include "nsc/asynchrony.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <future>
#include <string>
#include <thread>

#include "nsc/error.hpp"
#include "nsc/stats.hpp"

namespace nsc {

AsyncMode AsynchronySpec::mode() const noexcept
{
    if (integral_steps > 1) {
        return delay_steps != 0 ? AsyncMode::both : AsyncMode::integral;
    }
    return AsyncMode::delay;
}

void AsynchronySpec::validate() const
{
    if (integral_steps < 1) {
        throw Error(ErrorKind::range, "integral window must be at least 1 step");
    }
}

TimeSeries Aligned::truncate(const TimeSeries& y) const
{
    return y.slice(lead, series.size());
}

Aligned apply_delay(const TimeSeries& x, int delay_steps)
{
    const std::size_t shift = static_cast<std::size_t>(std::abs(static_cast<long long>(delay_steps)));
    if (shift >= x.size()) {
        throw Error(ErrorKind::range, "delay of " + std::to_string(delay_steps) +
                                          " steps does not fit a record of " +
                                          std::to_string(x.size()) + " samples");
    }
    const std::size_t count = x.size() - shift;
    if (count < 2) {
        throw Error(ErrorKind::range, "delay leaves fewer than 2 samples");
    }
    if (delay_steps >= 0) {
        return {x.slice(shift, count), 0};
    }
    return {x.slice(0, count), shift};
}

Aligned apply_integral_mean(const TimeSeries& x, std::size_t integral_steps)
{
    const std::size_t width = integral_steps;
    const std::size_t limit = (x.size() + 1) / 2;
    if (width < 1 || width > limit) {
        throw Error(ErrorKind::range, "integral window " + std::to_string(width) +
                                          " outside [1, " + std::to_string(limit) + "]");
    }
    const std::size_t half = width / 2;
    const std::size_t count = x.size() - 2 * half;
    if (width == 1) {
        return {x, 0};
    }
    const PrefixSums sums(x.values());
    const double origin = x[0];
    std::vector<double> out(count);
    for (std::size_t j = 0; j < count; ++j) {
        out[j] = origin + sums.block_sum(j, width) / static_cast<double>(width);
    }
    return {TimeSeries(std::move(out), x.tau0()), half};
}

Aligned apply_asynchrony(const TimeSeries& x, const AsynchronySpec& spec)
{
    spec.validate();
    Aligned delayed = apply_delay(x, spec.delay_steps);
    Aligned averaged = apply_integral_mean(delayed.series, spec.integral_steps);
    averaged.lead += delayed.lead;
    return averaged;
}

double theory_k_delay(double tau, double tau_dly, double k)
{
    if (!(tau > 0.0)) {
        throw Error(ErrorKind::domain, "tau must be positive");
    }
    const double d = std::abs(tau_dly);
    if (tau < 0.5 * d) {
        return 0.0;
    }
    if (tau < d) {
        return (d / (2.0 * tau) - 1.0) * k;
    }
    return (1.0 - 1.5 * d / tau) * k;
}

double theory_k_integral(double tau, double tau_int, double k)
{
    if (!(tau > 0.0) || !(tau_int > 0.0)) {
        throw Error(ErrorKind::domain, "tau and tau_int must be positive");
    }
    if (tau < 0.25 * tau_int) {
        return 0.0;
    }
    if (tau < 0.5 * tau_int) {
        const double a = tau_int - 4.0 * tau;
        return a * a / (8.0 * tau * tau_int) * k;
    }
    return (1.0 - 0.375 * tau_int / tau) * k;
}

namespace {

struct Scored {
    AsynchronySpec spec;
    double score = 0.0;
};

bool preferred(const Scored& a, const Scored& b)
{
    const double scale = std::max(std::abs(a.score), std::abs(b.score));
    if (std::abs(a.score - b.score) > 1e-12 * scale) {
        return a.score < b.score;
    }
    const int da = std::abs(a.spec.delay_steps);
    const int db = std::abs(b.spec.delay_steps);
    if (da != db) {
        return da < db;
    }
    if (a.spec.integral_steps != b.spec.integral_steps) {
        return a.spec.integral_steps < b.spec.integral_steps;
    }
    return a.spec.delay_steps > b.spec.delay_steps;
}

std::optional<double> score_candidate(const TimeSeries& y, const Aligned& xa,
                                      const std::vector<std::size_t>& probes, Style style)
{
    const TimeSeries yt = xa.truncate(y);
    std::optional<PrefixSums> py;
    std::optional<PrefixSums> px;
    if (style == Style::overlap) {
        py.emplace(yt.values());
        px.emplace(xa.series.values());
    }
    double score = 0.0;
    for (const std::size_t m : probes) {
        const PairMoments pm = style == Style::overlap ? overlap_moments(*py, *px, m)
                                                       : normal_moments(yt, xa.series, m);
        if (!(pm.var_b >= degenerate_variance) || !(pm.var_a > 0.0)) {
            return std::nullopt;
        }
        score += (pm.var_a - pm.cov * pm.cov / pm.var_b) / pm.var_a;
    }
    return score;
}

} // namespace

CompensationResult compensate(const TimeSeries& y, const TimeSeries& x,
                              const CompensationOptions& options)
{
    if (y.size() != x.size()) {
        throw Error(ErrorKind::shape, "y and x lengths differ: " + std::to_string(y.size()) +
                                          " vs " + std::to_string(x.size()));
    }
    if (options.delay_min > options.delay_max || options.integral_min < 1 ||
        options.integral_min > options.integral_max || options.probes.empty()) {
        throw Error(ErrorKind::range, "compensation search ranges are empty");
    }
    const std::size_t max_shift = static_cast<std::size_t>(
        std::max(std::abs(static_cast<long long>(options.delay_min)),
                 std::abs(static_cast<long long>(options.delay_max))));
    const std::size_t max_probe = *std::max_element(options.probes.begin(), options.probes.end());
    const std::size_t spent = max_shift + 2 * (options.integral_max / 2);
    if (spent >= x.size() || x.size() - spent < 2 * max_probe + 1 ||
        options.integral_max > (x.size() - max_shift + 1) / 2) {
        throw Error(ErrorKind::range, "search ranges leave too few samples for probe factor " +
                                          std::to_string(max_probe));
    }

    // Delays are scored on worker threads; the reduction below runs in grid
    // order so the result does not depend on scheduling.
    const std::size_t delays = static_cast<std::size_t>(options.delay_max - options.delay_min) + 1;
    const std::size_t widths = options.integral_max - options.integral_min + 1;
    std::vector<std::optional<double>> scores(delays * widths);
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t r; (r = next.fetch_add(1)) < delays;) {
            const Aligned delayed = apply_delay(x, options.delay_min + static_cast<int>(r));
            for (std::size_t c = 0; c < widths; ++c) {
                Aligned xa = apply_integral_mean(delayed.series, options.integral_min + c);
                xa.lead += delayed.lead;
                scores[r * widths + c] = score_candidate(y, xa, options.probes, options.curve.style);
            }
        }
    };
    const std::size_t threads =
        std::min<std::size_t>(delays, std::max(1u, std::thread::hardware_concurrency()));
    std::vector<std::future<void>> jobs;
    for (std::size_t t = 1; t < threads; ++t) {
        jobs.push_back(std::async(std::launch::async, worker));
    }
    worker();
    for (auto& j : jobs) {
        j.get();
    }

    CompensationResult result;
    std::optional<Scored> best;
    for (std::size_t r = 0; r < delays; ++r) {
        for (std::size_t c = 0; c < widths; ++c) {
            ++result.evaluated;
            const auto& score = scores[r * widths + c];
            if (!score) {
                ++result.degenerate;
                continue;
            }
            const Scored cand{{options.delay_min + static_cast<int>(r), options.integral_min + c}, *score};
            if (!best || preferred(cand, *best)) {
                best = cand;
            }
        }
    }
    if (!best) {
        throw Error(ErrorKind::compensation_failed,
                    "all " + std::to_string(result.evaluated) +
                        " (delay, integral) candidates have a degenerate NIV or y");
    }
    result.best = best->spec;
    result.score = best->score;
    const Aligned xa = apply_asynchrony(x, best->spec);
    result.curve = k_curve(xa.truncate(y), xa.series, options.curve);
    return result;
}

} // namespace nsc
