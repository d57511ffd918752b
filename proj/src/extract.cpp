#include <algorithm>
#include <cmath>
#include <string>

#include "nsc/fsc.hpp"
#include "summation.hpp"

namespace nsc {

namespace {

struct Window {
    std::size_t first = 0;
    std::size_t last = 0;   // inclusive
    double mean_bar = 0.0;
    double violation = 0.0;
};

double mean_of(const std::vector<KCurvePoint>& points, std::size_t first, std::size_t last,
               double KCurvePoint::*field)
{
    detail::CompensatedSum sum;
    for (std::size_t i = first; i <= last; ++i) {
        sum.add(points[i].*field);
    }
    return sum.value() / static_cast<double>(last - first + 1);
}

Window evaluate(const std::vector<KCurvePoint>& points, std::size_t first, std::size_t last)
{
    const std::size_t n = last - first + 1;
    const std::size_t c_lo = first + n / 3;
    const std::size_t c_hi = last - n / 3;
    const double mid_k = mean_of(points, c_lo, c_hi, &KCurvePoint::k);
    const double mid_bar = mean_of(points, c_lo, c_hi, &KCurvePoint::sigma_k);
    double violation = -mid_bar;
    for (std::size_t i = first; i <= last; ++i) {
        violation = std::max(violation, std::abs(points[i].k - mid_k) - mid_bar);
    }
    return {first, last, mean_of(points, first, last, &KCurvePoint::sigma_k), violation};
}

bool better(const Window& a, const Window& b)
{
    const double scale = std::max(std::abs(a.mean_bar), std::abs(b.mean_bar));
    if (std::abs(a.mean_bar - b.mean_bar) > 1e-12 * scale) {
        return a.mean_bar < b.mean_bar;
    }
    const std::size_t na = a.last - a.first;
    const std::size_t nb = b.last - b.first;
    if (na != nb) {
        return na > nb;
    }
    return a.first < b.first;
}

} // namespace

KEstimate extract_estimate(const KCurve& curve)
{
    curve.validate();
    const auto& pts = curve.points;

    std::optional<Window> best;
    std::optional<Window> closest;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t j = i + 1; j < pts.size(); ++j) {
            if (pts[j].m < 10 * pts[i].m) {
                continue;
            }
            const Window w = evaluate(pts, i, j);
            if (w.violation <= 0.0) {
                if (!best || better(w, *best)) {
                    best = w;
                }
            } else if (!closest || w.violation < closest->violation) {
                closest = w;
            }
        }
    }

    if (!best) {
        if (!closest) {
            throw ExtractionError("K curve spans less than one decade in tau (m " +
                                      std::to_string(pts.front().m) + " to " +
                                      std::to_string(pts.back().m) + ")",
                                  std::nullopt);
        }
        const WindowCandidate cand{pts[closest->first].m, pts[closest->last].m, closest->violation};
        throw ExtractionError("no decade-wide window of the K curve is flat within its error "
                              "bars; closest is m " +
                                  std::to_string(cand.m_lo) + " to " + std::to_string(cand.m_hi) +
                                  " exceeding its band by " + std::to_string(cand.violation),
                              cand);
    }

    KEstimate est;
    est.m_lo = pts[best->first].m;
    est.m_hi = pts[best->last].m;
    est.tau_lo = pts[best->first].tau;
    est.tau_hi = pts[best->last].tau;
    est.count = best->last - best->first + 1;
    est.k_bar = mean_of(pts, best->first, best->last, &KCurvePoint::k);
    detail::CompensatedSum ss;
    for (std::size_t i = best->first; i <= best->last; ++i) {
        const double d = pts[i].k - est.k_bar;
        ss.add(d * d);
        est.sigma_max = std::max(est.sigma_max, pts[i].sigma_k);
    }
    est.sigma_bar = std::sqrt(ss.value() / static_cast<double>(est.count - 1));
    est.sigma_total = std::hypot(est.sigma_bar, est.sigma_max);
    return est;
}

} // namespace nsc
