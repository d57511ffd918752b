#include "nsc/fsc.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <string>

#include "nsc/noise.hpp"
#include "nsc/stats.hpp"
#include "summation.hpp"

namespace nsc {

std::string_view to_string(Style style) noexcept
{
    return style == Style::normal ? "normal" : "overlap";
}

std::string_view to_string(Variant variant) noexcept
{
    return variant == Variant::nsc ? "nsc" : "nsc_d";
}

std::optional<Style> parse_style(std::string_view text) noexcept
{
    if (text == "normal") {
        return Style::normal;
    }
    if (text == "overlap") {
        return Style::overlap;
    }
    return std::nullopt;
}

std::optional<Variant> parse_variant(std::string_view text) noexcept
{
    if (text == "nsc") {
        return Variant::nsc;
    }
    if (text == "nsc_d" || text == "nsc-d") {
        return Variant::nsc_d;
    }
    return std::nullopt;
}

void KCurve::validate() const
{
    if (points.empty()) {
        throw Error(ErrorKind::insufficient_data, "K curve has no points");
    }
    for (std::size_t i = 0; i < points.size(); ++i) {
        const auto& p = points[i];
        if (p.m < 1 || (i > 0 && p.m <= points[i - 1].m)) {
            throw Error(ErrorKind::invalid_argument, "K curve factors must be strictly increasing");
        }
        if (!std::isfinite(p.k) || !(p.sigma_k >= 0.0) || !std::isfinite(p.sigma_k)) {
            throw Error(ErrorKind::domain, "K curve point at m=" + std::to_string(p.m) +
                                               " has a non-finite value or negative error bar");
        }
    }
}

namespace {

PairMoments moments(const TimeSeries& y, const TimeSeries& x, std::size_t m, Style style)
{
    if (style == Style::normal) {
        return normal_moments(y, x, m);
    }
    return overlap_moments(PrefixSums(y.values()), PrefixSums(x.values()), m);
}

void require_degenerate_free(double var_x, std::size_t m)
{
    if (!(var_x >= degenerate_variance)) {
        throw Error(ErrorKind::degenerate_niv,
                    "NIV Allan variance vanishes at m=" + std::to_string(m));
    }
}

bool admissible(std::size_t m, std::size_t length, Style style)
{
    if (style == Style::normal) {
        return m >= 1 && m <= length / 2;
    }
    return m >= 1 && length >= 2 * m + 1;
}

} // namespace

double k_of_tau(const TimeSeries& y, const TimeSeries& x, std::size_t m, Style style)
{
    const PairMoments pm = moments(y, x, m, style);
    require_degenerate_free(pm.var_b, m);
    return pm.cov / pm.var_b;
}

double sigma_k_rel(double samples, double ratio_total_to_effect, double k_m)
{
    if (!(samples > 0.0) || !(ratio_total_to_effect > 0.0) || !(k_m > 0.0)) {
        throw Error(ErrorKind::domain, "sigma_K/K needs M > 0, variance ratio > 0 and K_M > 0");
    }
    return std::sqrt((0.47 * ratio_total_to_effect + 1.0 / k_m) / samples);
}

double sigma_k_abs(double samples, double var_y, double var_x, double k, double k_m)
{
    if (!(samples > 0.0) || !(var_y >= 0.0) || !(var_x > 0.0) || !(k_m > 0.0)) {
        throw Error(ErrorKind::domain, "sigma_K needs M > 0, variances >= 0 and K_M > 0");
    }
    return std::sqrt((0.47 * var_y / var_x + k * k / k_m) / samples);
}

KCurve k_curve(const TimeSeries& y, const TimeSeries& x, const TauGrid& grid,
               const CurveOptions& options)
{
    if (y.size() != x.size()) {
        throw Error(ErrorKind::shape, "y and x lengths differ: " + std::to_string(y.size()) +
                                          " vs " + std::to_string(x.size()));
    }
    const bool diff = options.variant == Variant::nsc_d;
    if (diff && y.size() < 3) {
        throw Error(ErrorKind::insufficient_data, "differenced estimator needs at least 3 samples");
    }
    const TimeSeries yu = diff ? y.differences() : y;
    const TimeSeries xu = diff ? x.differences() : x;
    const std::size_t length = yu.size();

    KCurve curve;
    curve.style = options.style;
    curve.variant = options.variant;
    curve.tau0 = y.tau0();
    curve.y_name = options.y_name;
    curve.x_name = options.x_name;
    curve.noise_kind = options.noise_kind ? options.noise_kind : classify_noise(xu);
    curve.k_m = curve.noise_kind ? default_k_m(*curve.noise_kind) : fallback_k_m;

    std::optional<PrefixSums> py;
    std::optional<PrefixSums> px;
    if (options.style == Style::overlap) {
        py.emplace(yu.values());
        px.emplace(xu.values());
    }

    for (const std::size_t m : grid.factors()) {
        if (!admissible(m, length, options.style)) {
            curve.omitted.push_back({m, "insufficient_data"});
            continue;
        }
        PairMoments pm;
        double samples = 0.0;
        if (options.style == Style::overlap) {
            pm = overlap_moments(*py, *px, m);
            samples = edf(curve.noise_kind, m, length);
        } else {
            pm = normal_moments(yu, xu, m);
            samples = static_cast<double>(length / m);
        }
        if (!(pm.var_b >= degenerate_variance)) {
            curve.omitted.push_back({m, "degenerate_niv"});
            continue;
        }
        const double k = pm.cov / pm.var_b;
        const double sigma = sigma_k_abs(samples, pm.var_a, pm.var_b, k, curve.k_m);
        curve.points.push_back({m, static_cast<double>(m) * curve.tau0, k, sigma, samples});
    }

    if (curve.points.empty()) {
        throw Error(ErrorKind::degenerate_niv,
                    "no usable averaging factor for NIV '" + options.x_name + "'");
    }
    return curve;
}

KCurve k_curve(const TimeSeries& y, const TimeSeries& x, const CurveOptions& options)
{
    const std::size_t length = options.variant == Variant::nsc_d ? y.size() - 1 : y.size();
    const TauGrid grid = TauGrid::standard(length);
    if (grid.empty()) {
        throw Error(ErrorKind::insufficient_data,
                    "record of " + std::to_string(length) + " samples is too short for a K curve");
    }
    return k_curve(y, x, grid, options);
}

double dilution_factor(double var_true, double var_measured)
{
    if (!(var_true > 0.0) || !std::isfinite(var_measured)) {
        throw Error(ErrorKind::domain, "dilution factor needs a positive true variance");
    }
    if (var_measured < var_true) {
        throw Error(ErrorKind::argument_order,
                    "measured variance is smaller than the true variance; arguments swapped?");
    }
    return var_true / var_measured;
}

std::vector<CurveResult> parallel_curves(const TimeSeries& y, const std::vector<TimeSeries>& xs,
                                         const CurveOptions& options)
{
    std::vector<std::future<KCurve>> jobs;
    jobs.reserve(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) {
        CurveOptions local = options;
        if (local.x_name == CurveOptions{}.x_name) {
            local.x_name = "x" + std::to_string(i);
        }
        jobs.push_back(std::async(std::launch::async,
                                  [&y, &x = xs[i], local] { return k_curve(y, x, local); }));
    }
    std::vector<CurveResult> out(xs.size());
    for (std::size_t i = 0; i < jobs.size(); ++i) {
        try {
            out[i].curve = jobs[i].get();
        } catch (const Error& e) {
            out[i].error = e;
        }
    }
    return out;
}

BudgetEntry BudgetEntry::with_type_b(std::string name, double k, double sigma_tau, double sigma_b)
{
    return {std::move(name), k, std::hypot(sigma_tau, sigma_b)};
}

double BudgetEntry::contribution() const noexcept
{
    return std::abs(k) * sigma_x;
}

Budget budget(std::vector<BudgetEntry> entries)
{
    if (entries.empty()) {
        throw Error(ErrorKind::empty_budget, "uncertainty budget has no entries");
    }
    double scale = 0.0;
    for (const auto& e : entries) {
        if (!std::isfinite(e.k) || !std::isfinite(e.sigma_x) || e.sigma_x < 0.0) {
            throw Error(ErrorKind::domain,
                        "budget entry '" + e.name + "' needs finite k and sigma_x >= 0");
        }
        scale = std::max(scale, e.contribution());
    }
    double u_b = 0.0;
    if (scale > 0.0) {
        detail::CompensatedSum sum;
        for (const auto& e : entries) {
            const double c = e.contribution() / scale;
            sum.add(c * c);
        }
        u_b = scale * std::sqrt(sum.value());
    }
    return {std::move(entries), u_b};
}

} // namespace nsc
