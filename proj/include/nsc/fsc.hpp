#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "nsc/error.hpp"
#include "nsc/noise_kind.hpp"
#include "nsc/series.hpp"

namespace nsc {

/// Estimator flavour: non-overlapping block averages or overlapping windows.
enum class Style { normal, overlap };

/// NSC works on the records as given; NSC-D first replaces both records by
/// their adjacent differences, which whitens random-walk noise.
enum class Variant { nsc, nsc_d };

std::string_view to_string(Style style) noexcept;
std::string_view to_string(Variant variant) noexcept;
std::optional<Style> parse_style(std::string_view text) noexcept;
std::optional<Variant> parse_variant(std::string_view text) noexcept;

struct KCurvePoint {
    std::size_t m = 0;
    double tau = 0.0;
    double k = 0.0;
    double sigma_k = 0.0;
    double edf = 0.0;       // sample count entering the error bar (M or edf)

    friend bool operator==(const KCurvePoint&, const KCurvePoint&) = default;
};

/// A grid point that produced no estimate, with a machine-readable reason.
struct OmittedPoint {
    std::size_t m = 0;
    std::string reason;

    friend bool operator==(const OmittedPoint&, const OmittedPoint&) = default;
};

/// K(tau) curve for one (y, x) pair. Points are strictly increasing in m.
struct KCurve {
    std::vector<KCurvePoint> points;
    std::vector<OmittedPoint> omitted;
    Style style = Style::overlap;
    Variant variant = Variant::nsc;
    std::optional<NoiseKind> noise_kind;   // kind used for K_M and edf, if any
    double k_m = fallback_k_m;
    double tau0 = 1.0;
    std::string y_name = "y";
    std::string x_name = "x";

    /// Throws unless nonempty with strictly increasing factors and sigma_k >= 0.
    void validate() const;

    friend bool operator==(const KCurve&, const KCurve&) = default;
};

struct CurveOptions {
    Style style = Style::overlap;
    Variant variant = Variant::nsc;
    /// Noise type of x for K_M and edf; nullopt classifies x by its ADEV slope
    /// and falls back to K_M = 0.75, edf = M when that is inconclusive.
    std::optional<NoiseKind> noise_kind;
    std::string y_name = "y";
    std::string x_name = "x";
};

/// Allan variances below this are treated as a degenerate (constant) NIV.
inline constexpr double degenerate_variance = 1e-300;

/// K(tau) = ACOV(y, x) / AVAR(x) at factor m.
double k_of_tau(const TimeSeries& y, const TimeSeries& x, std::size_t m, Style style);

/// Relative error bar sigma_K / K for M samples (or edf), ratio
/// sigma_y^2 / sigma_yI^2 of total to effect variance, and constant K_M:
/// sqrt((0.47 * ratio + 1 / K_M) / M).
double sigma_k_rel(double samples, double ratio_total_to_effect, double k_m);

/// Absolute error bar, well defined for K = 0:
/// sqrt((0.47 * var_y / var_x + K^2 / K_M) / M).
double sigma_k_abs(double samples, double var_y, double var_x, double k, double k_m);

/// One point per grid factor. Points whose factor is inadmissible for the
/// record length, or whose x variance underflows, are listed in `omitted`.
/// Throws degenerate_niv when no point survives.
KCurve k_curve(const TimeSeries& y, const TimeSeries& x, const TauGrid& grid,
               const CurveOptions& options = {});

/// Same, over the standard 1-2-5 grid of the (possibly differenced) record.
KCurve k_curve(const TimeSeries& y, const TimeSeries& x, const CurveOptions& options = {});

/// Attenuation of K when x is measured with extra independent noise:
/// var_true / var_measured, in (0, 1].
double dilution_factor(double var_true, double var_measured);

/// One curve per NIV; a failing NIV yields an error without affecting others.
struct CurveResult {
    std::optional<KCurve> curve;
    std::optional<Error> error;
};

std::vector<CurveResult> parallel_curves(const TimeSeries& y, const std::vector<TimeSeries>& xs,
                                         const CurveOptions& options = {});

// --- scalar extraction -----------------------------------------------------

/// Scalar K with uncertainty drawn from a window of the curve.
struct KEstimate {
    double k_bar = 0.0;
    double sigma_bar = 0.0;     // sample standard deviation of window points
    double sigma_max = 0.0;     // largest point error bar in the window
    double sigma_total = 0.0;   // sqrt(sigma_bar^2 + sigma_max^2)
    std::size_t m_lo = 0;
    std::size_t m_hi = 0;
    double tau_lo = 0.0;
    double tau_hi = 0.0;
    std::size_t count = 0;      // points in the window
};

/// Candidate window that came closest to qualifying.
struct WindowCandidate {
    std::size_t m_lo = 0;
    std::size_t m_hi = 0;
    double violation = 0.0;     // largest |k - mid mean| - mid bar in the window
};

class ExtractionError : public Error {
public:
    ExtractionError(const std::string& message, std::optional<WindowCandidate> best)
        : Error(ErrorKind::extraction_failed, message), best_(best)
    {
    }

    const std::optional<WindowCandidate>& best() const noexcept { return best_; }

private:
    std::optional<WindowCandidate> best_;
};

/// Window rule:
///  1. candidates are contiguous runs of points with m_hi >= 10 m_lo;
///  2. the middle points are the central third (indices [n/3, n-1-n/3]);
///     a window qualifies when every point lies within mean(middle k) +-
///     mean(middle sigma_k);
///  3. the qualifying window with the smallest mean sigma_k wins; ties go to
///     the window with more points, then the smaller m_lo.
/// Throws ExtractionError when the curve spans less than a decade or no
/// window qualifies.
KEstimate extract_estimate(const KCurve& curve);

// --- uncertainty budget ----------------------------------------------------

struct BudgetEntry {
    std::string name;
    double k = 0.0;
    double sigma_x = 0.0;   // total NIV uncertainty, type-B part included

    /// sigma_x = sqrt(sigma_tau^2 + sigma_b^2).
    static BudgetEntry with_type_b(std::string name, double k, double sigma_tau, double sigma_b);

    double contribution() const noexcept;
};

struct Budget {
    std::vector<BudgetEntry> entries;
    double u_b = 0.0;
};

/// u_B = sqrt(sum (k_i sigma_xi)^2). Throws empty_budget on no entries.
Budget budget(std::vector<BudgetEntry> entries);

} // namespace nsc
