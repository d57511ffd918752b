#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "nsc/error.hpp"
#include "nsc/fsc.hpp"
#include "nsc/noise.hpp"
#include "nsc/stats.hpp"
#include "oracles.hpp"

using namespace nsc;

namespace {

std::vector<double> to_vec(const TimeSeries& s)
{
    return {s.values().begin(), s.values().end()};
}

std::vector<double> combine(const TimeSeries& a, double ka, const TimeSeries& b, double kb)
{
    std::vector<double> out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out[i] = ka * a[i] + kb * b[i];
    }
    return out;
}

double golden_min(auto f, double lo, double hi)
{
    const double g = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo;
    double b = hi;
    double c = b - g * (b - a);
    double d = a + g * (b - a);
    double fc = f(c);
    double fd = f(d);
    for (int it = 0; it < 200 && b - a > 1e-13 * std::max(1.0, std::abs(a)); ++it) {
        if (fc < fd) {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

KCurve synthetic(const std::vector<std::size_t>& ms, const std::vector<double>& ks,
                 const std::vector<double>& bars)
{
    KCurve c;
    for (std::size_t i = 0; i < ms.size(); ++i) {
        c.points.push_back({ms[i], static_cast<double>(ms[i]), ks[i], bars[i], 100.0});
    }
    return c;
}

} // namespace

TEST_CASE("k_of_tau trivial identities")
{
    const TimeSeries y = generate(NoiseSpec::make(NoiseKind::wfn, 1.0, 3), 500);
    const TimeSeries y2(combine(y, 2.0, y, 0.0), 1.0);
    for (Style style : {Style::normal, Style::overlap}) {
        CHECK(k_of_tau(y, y, 3, style) == 1.0);
        CHECK(k_of_tau(y, y2, 3, style) == doctest::Approx(0.5).epsilon(1e-15));
    }
    const TimeSeries flat(std::vector<double>(100, 2.5), 1.0);
    CHECK_THROWS_AS(k_of_tau(y.slice(0, 100), flat, 2, Style::overlap), Error);
    try {
        k_of_tau(y.slice(0, 100), flat, 2, Style::normal);
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::degenerate_niv);
    }
    CHECK_THROWS_AS(k_of_tau(y, y.slice(0, 100), 1, Style::normal), Error);
}

TEST_CASE("argmin identity against golden-section search")
{
    for (std::uint64_t seed = 0; seed < 12; ++seed) {
        const std::size_t n = 200 + 37 * seed;
        const TimeSeries x = generate(NoiseSpec::make(NoiseKind::rwn, 1.0, 100 + seed), n);
        const TimeSeries e = generate(NoiseSpec::make(NoiseKind::wfn, 2.0, 200 + seed), n);
        const std::vector<double> yv = combine(x, 0.7 - 0.1 * static_cast<double>(seed), e, 1.0);
        const std::vector<double> xv = to_vec(x);
        const TimeSeries y(yv, 1.0);
        for (std::size_t m : {1u, 3u, 10u, 40u}) {
            for (Style style : {Style::normal, Style::overlap}) {
                const bool ov = style == Style::overlap;
                const double closed = k_of_tau(y, x, m, style);
                const auto f = [&](double k) { return oracle::residual_avar(yv, xv, k, m, ov); };
                const double searched = golden_min(f, -20.0, 20.0);
                CHECK(searched == doctest::Approx(closed).epsilon(1e-6));
                // the residual variance is an exact parabola in k: its vertex through
                // three well separated samples pins the minimum below sqrt(eps)
                const double h = 1.0;
                const double fl = f(searched - h);
                const double fc = f(searched);
                const double fr = f(searched + h);
                const double vertex = searched - 0.5 * h * (fr - fl) / (fr - 2.0 * fc + fl);
                CHECK(vertex == doctest::Approx(closed).epsilon(1e-9));
            }
        }
    }
}

TEST_CASE("affine equivariance in x")
{
    const std::size_t n = 4000;
    const TimeSeries x = generate(NoiseSpec::make(NoiseKind::ffn, 1.0, 11), n);
    const TimeSeries e = generate(NoiseSpec::make(NoiseKind::wfn, 1.0, 12), n);
    const TimeSeries y(combine(x, 0.3, e, 1.0), 1.0);
    const double a = -3.75;
    const double b = 1234.5;
    std::vector<double> xv = to_vec(x);
    for (double& v : xv) {
        v = a * v + b;
    }
    const TimeSeries xa(xv, 1.0);
    for (Style style : {Style::normal, Style::overlap}) {
        for (std::size_t m : {1u, 7u, 100u, 900u}) {
            CHECK(k_of_tau(y, xa, m, style) ==
                  doctest::Approx(k_of_tau(y, x, m, style) / a).epsilon(1e-9));
        }
    }
}

TEST_CASE("independence null at m = 1, M0 = 1e4")
{
    const std::size_t n = 10000;
    int inside = 0;
    const int seeds = 1000;
    for (int s = 0; s < seeds; ++s) {
        const TimeSeries y = generate(NoiseSpec::make(NoiseKind::wfn, 1.0, 10000 + s), n);
        const TimeSeries x = generate(NoiseSpec::make(NoiseKind::wfn, 1.0, 20000 + s), n);
        const double k = k_of_tau(y, x, 1, Style::normal);
        const double bound = 5.0 * std::sqrt(adev2(block_average(y, 1)) /
                                              adev2(block_average(x, 1)) /
                                              static_cast<double>(n));
        inside += std::abs(k) <= bound;
    }
    CHECK(inside >= 990);
}

TEST_CASE("sigma_k_rel evaluates the error model")
{
    CHECK(sigma_k_rel(1e4, 20.0, 0.75) == doctest::Approx(std::sqrt((0.47 * 20 + 4.0 / 3.0) / 1e4)));
    CHECK(sigma_k_rel(1e4, 20.0, 0.75) == doctest::Approx(0.0328).epsilon(1e-3));
    CHECK(sigma_k_rel(1e300, 20.0, 0.75) < 1e-140);
    CHECK(default_k_m(NoiseKind::wfn) == 0.87);
    CHECK(default_k_m(NoiseKind::ffn) == 0.77);
    CHECK(default_k_m(NoiseKind::rwn) == 0.75);
    CHECK_THROWS_AS(sigma_k_rel(0.0, 1.0, 0.75), Error);
    CHECK_THROWS_AS(sigma_k_rel(10.0, -1.0, 0.75), Error);
    CHECK_THROWS_AS(sigma_k_rel(10.0, 1.0, 0.0), Error);
    // absolute form agrees with the relative one for K != 0
    const double var_x = 2.0;
    const double k = 1.5;
    const double var_y = 20.0 * k * k * var_x;
    CHECK(sigma_k_abs(1e4, var_y, var_x, k, 0.75) ==
          doctest::Approx(k * sigma_k_rel(1e4, 20.0, 0.75)).epsilon(1e-14));
}

TEST_CASE("y = 3x + noise recovers 3 within 3 sigma_K")
{
    // sigma^2_noise = 19 * sigma^2_{3x}: total to effect ratio 20
    const std::size_t n = 1000000;
    int covered = 0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
        const TimeSeries x = generate(NoiseSpec::make(NoiseKind::wfn, 1.0, 300 + s), n);
        const TimeSeries e =
            generate(NoiseSpec::make(NoiseKind::wfn, 3.0 * std::sqrt(19.0), 700 + s), n);
        const TimeSeries y(combine(x, 3.0, e, 1.0), 1.0);
        const double k = k_of_tau(y, x, 1, Style::normal);
        const double bar = 3.0 * sigma_k_rel(static_cast<double>(n), 20.0, default_k_m(NoiseKind::wfn));
        covered += std::abs(k - 3.0) <= 3.0 * bar;
    }
    CHECK(covered >= 90);
}

TEST_CASE("error-bar calibration over 200 seeds")
{
    const std::size_t n = 20000;
    const int seeds = 200;
    const std::vector<std::size_t> ms{1, 10, 100};
    for (Style style : {Style::normal, Style::overlap}) {
        std::vector<double> s1(ms.size()), s2(ms.size()), bar(ms.size());
        for (int s = 0; s < seeds; ++s) {
            const TimeSeries x = generate(NoiseSpec::make(NoiseKind::wfn, std::sqrt(0.05), 1000 + s), n);
            const TimeSeries y0 = generate(NoiseSpec::make(NoiseKind::wfn, std::sqrt(0.95), 5000 + s), n);
            const TimeSeries y(combine(y0, 1.0, x, 1.0), 1.0);
            CurveOptions opt;
            opt.style = style;
            opt.noise_kind = NoiseKind::wfn;
            const KCurve c = k_curve(y, x, TauGrid(ms, n), opt);
            for (std::size_t i = 0; i < ms.size(); ++i) {
                const double d = c.points[i].k - 1.0;
                s1[i] += d;
                s2[i] += d * d;
                bar[i] += c.points[i].sigma_k / seeds;
            }
        }
        for (std::size_t i = 0; i < ms.size(); ++i) {
            const double mu = s1[i] / seeds;
            const double sd = std::sqrt(s2[i] / seeds - mu * mu);
            CAPTURE(ms[i]);
            CHECK(sd / bar[i] <= 2.0);
            CHECK(sd / bar[i] >= 0.5);
            CHECK(std::abs(mu) <= 3.0 * sd / std::sqrt(static_cast<double>(seeds)));
        }
    }
}

TEST_CASE("dilution factor")
{
    CHECK(dilution_factor(2.0, 2.0) == 1.0);
    CHECK(dilution_factor(1.0, 1.25) == doctest::Approx(0.8));
    try {
        dilution_factor(2.0, 1.0);
        FAIL("expected argument-order error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::argument_order);
    }
    CHECK_THROWS_AS(dilution_factor(0.0, 1.0), Error);

    // measurement noise of equal variance halves the recovered coefficient
    const std::size_t n = 200000;
    const TimeSeries x = generate(NoiseSpec::make(NoiseKind::wfn, 1.0, 41), n);
    const TimeSeries noise = generate(NoiseSpec::make(NoiseKind::wfn, 1.0, 42), n);
    const TimeSeries y0 = generate(NoiseSpec::make(NoiseKind::wfn, 1.0, 43), n);
    const double k = 2.0;
    const TimeSeries y(combine(y0, 1.0, x, k), 1.0);
    const TimeSeries xm(combine(x, 1.0, noise, 1.0), 1.0);
    const double d = dilution_factor(adev2(block_average(x, 1)), adev2(block_average(xm, 1)));
    CHECK(d == doctest::Approx(0.5).epsilon(0.02));
    CurveOptions opt;
    opt.style = Style::normal;
    opt.noise_kind = NoiseKind::wfn;
    const KCurve c = k_curve(y, xm, TauGrid({1, 10, 100}, n), opt);
    for (const auto& p : c.points) {
        CAPTURE(p.m);
        CHECK(std::abs(p.k - 0.5 * k) <= 3.0 * p.sigma_k);
    }
}

TEST_CASE("differenced variant is unbiased on white noise and whitens random walk")
{
    const std::size_t n = 100000;
    CurveOptions opt;
    opt.variant = Variant::nsc_d;
    const TauGrid grid({1, 5, 20}, n - 1);
    double mean = 0.0;
    const int seeds = 20;
    for (int s = 0; s < seeds; ++s) {
        const TimeSeries x = generate(NoiseSpec::make(NoiseKind::wfn, 1.0, 60 + s), n);
        const TimeSeries y0 = generate(NoiseSpec::make(NoiseKind::wfn, 3.0, 90 + s), n);
        const TimeSeries y(combine(y0, 1.0, x, 0.4), 1.0);
        const KCurve c = k_curve(y, x, grid, opt);
        CHECK(c.variant == Variant::nsc_d);
        for (const auto& p : c.points) {
            CHECK(std::abs(p.k - 0.4) <= 3.0 * 2.0 * p.sigma_k);
        }
        mean += c.points[0].k / seeds;
    }
    CHECK(mean == doctest::Approx(0.4).epsilon(0.05));

    const TimeSeries xr = generate(NoiseSpec::make(NoiseKind::rwn, 1.0, 5), n);
    const TimeSeries yr(combine(xr, 0.5, generate(NoiseSpec::make(NoiseKind::rwn, 1.0, 6), n), 1.0), 1.0);
    const KCurve cd = k_curve(yr, xr, grid, opt);
    REQUIRE(cd.noise_kind);
    CHECK(*cd.noise_kind == NoiseKind::wfn);
}

TEST_CASE("k_curve bookkeeping")
{
    const std::size_t n = 41;
    const TimeSeries x = generate(NoiseSpec::make(NoiseKind::wfn, 1.0, 1), n);
    const TimeSeries y = generate(NoiseSpec::make(NoiseKind::wfn, 1.0, 2), n);
    CurveOptions opt;
    opt.noise_kind = NoiseKind::wfn;
    // m = 20 is admissible for block averages but leaves no overlapping term pair
    const TauGrid grid({1, 2, 20}, n);
    const KCurve ov = k_curve(y, x, grid, opt);
    REQUIRE(ov.points.size() == 3);
    opt.variant = Variant::nsc_d;
    const KCurve ovd = k_curve(y, x, grid, opt);
    REQUIRE(ovd.points.size() == 2);
    REQUIRE(ovd.omitted.size() == 1);
    CHECK(ovd.omitted[0].m == 20);
    CHECK(ovd.omitted[0].reason == "insufficient_data");

    opt = {};
    opt.style = Style::normal;
    const KCurve nm = k_curve(y, x, grid, opt);
    CHECK(nm.points.size() == 3);
    CHECK(nm.points[2].edf == 2.0);
    CHECK(nm.points[1].tau == 2.0);
    CHECK_NOTHROW(nm.validate());

    // period-2 x: every pair average is identical
    std::vector<double> alt(1000);
    for (std::size_t i = 0; i < alt.size(); ++i) {
        alt[i] = static_cast<double>(i % 2);
    }
    const TimeSeries xs(alt, 1.0);
    const TimeSeries ys = generate(NoiseSpec::make(NoiseKind::wfn, 1.0, 3), 1000);
    opt = {};
    opt.style = Style::normal;
    const KCurve partial = k_curve(ys, xs, TauGrid({1, 2}, 1000), opt);
    CHECK(partial.points.size() == 1);
    REQUIRE(partial.omitted.size() == 1);
    CHECK(partial.omitted[0].reason == "degenerate_niv");

    const TimeSeries flat(std::vector<double>(1000, 3.0), 1.0);
    try {
        k_curve(ys, flat, opt);
        FAIL("expected degenerate NIV");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::degenerate_niv);
    }

    KCurve bad = nm;
    std::swap(bad.points[0], bad.points[1]);
    CHECK_THROWS_AS(bad.validate(), Error);
    CHECK_THROWS_AS(KCurve{}.validate(), Error);
}

TEST_CASE("noise kind selects K_M and falls back when unclassifiable")
{
    const std::size_t n = 20000;
    const TimeSeries x = generate(NoiseSpec::make(NoiseKind::rwn, 1.0, 8), n);
    const TimeSeries y = generate(NoiseSpec::make(NoiseKind::wfn, 1.0, 9), n);
    const KCurve c = k_curve(y, x);
    REQUIRE(c.noise_kind);
    CHECK(*c.noise_kind == NoiseKind::rwn);
    CHECK(c.k_m == 0.75);
    CurveOptions opt;
    opt.noise_kind = NoiseKind::ffn;
    CHECK(k_curve(y, x, opt).k_m == 0.77);

    // too short to classify: K_M = 0.75 and edf = floor(M0 / m)
    const TimeSeries xs = x.slice(0, 9);
    const TimeSeries ys = y.slice(0, 9);
    const KCurve s = k_curve(ys, xs, TauGrid({1, 2}, 9));
    CHECK_FALSE(s.noise_kind);
    CHECK(s.k_m == fallback_k_m);
    CHECK(s.points[1].edf == 4.0);
}

TEST_CASE("parallel curves isolate failures and match serial results")
{
    const std::size_t n = 5000;
    const TimeSeries x1 = generate(NoiseSpec::make(NoiseKind::wfn, 1.0, 21), n);
    const TimeSeries x2 = generate(NoiseSpec::make(NoiseKind::wfn, 1.0, 22), n);
    const TimeSeries e = generate(NoiseSpec::make(NoiseKind::wfn, 0.5, 23), n);
    std::vector<double> yv(n);
    for (std::size_t i = 0; i < n; ++i) {
        yv[i] = 1.5 * x1[i] - 0.8 * x2[i] + e[i];
    }
    const TimeSeries y(yv, 1.0);
    const TimeSeries flat(std::vector<double>(n, 0.0), 1.0);
    const auto results = parallel_curves(y, {x1, flat, x2, y, TimeSeries(combine(y, 2.0, y, 0.0), 1.0)});
    REQUIRE(results.size() == 5);
    REQUIRE(results[0].curve);
    REQUIRE(results[1].error);
    CHECK(results[1].error->kind() == ErrorKind::degenerate_niv);
    REQUIRE(results[2].curve);
    CurveOptions opt;
    opt.x_name = "x0";
    CHECK(*results[0].curve == k_curve(y, x1, opt));
    const auto& p1 = results[0].curve->points.front();
    const auto& p2 = results[2].curve->points.front();
    CHECK(std::abs(p1.k - 1.5) <= 3.0 * p1.sigma_k);
    CHECK(std::abs(p2.k + 0.8) <= 3.0 * p2.sigma_k);
    CHECK(results[3].curve->points[0].k == 1.0);
    CHECK(results[4].curve->points[0].k == doctest::Approx(0.5).epsilon(1e-15));
}

TEST_CASE("window extraction")
{
    SUBCASE("flat curve with equal bars takes the widest window")
    {
        const KCurve c = synthetic({1, 2, 5, 10, 20, 50, 100}, std::vector<double>(7, 2.0),
                                   std::vector<double>(7, 0.1));
        const KEstimate e = extract_estimate(c);
        CHECK(e.m_lo == 1);
        CHECK(e.m_hi == 100);
        CHECK(e.count == 7);
        CHECK(e.k_bar == 2.0);
        CHECK(e.sigma_bar == 0.0);
        CHECK(e.sigma_max == 0.1);
        CHECK(e.sigma_total == doctest::Approx(0.1));
    }
    SUBCASE("departing tail is excluded")
    {
        const KCurve c = synthetic({1, 2, 5, 10, 20, 50, 100, 200},
                                   {1.00, 1.01, 0.99, 1.015, 0.98, 1.0, 3.0, 6.0},
                                   {0.01, 0.014, 0.022, 0.03, 0.045, 0.07, 0.1, 0.14});
        const KEstimate e = extract_estimate(c);
        CHECK(e.m_lo == 1);
        CHECK(e.m_hi == 10);
        const std::vector<double> win{1.00, 1.01, 0.99, 1.015};
        const double mean = std::accumulate(win.begin(), win.end(), 0.0) / 4.0;
        double ss = 0.0;
        for (double v : win) {
            ss += (v - mean) * (v - mean);
        }
        const double sd = std::sqrt(ss / 3.0);
        CHECK(e.k_bar == doctest::Approx(mean));
        CHECK(e.sigma_bar == doctest::Approx(sd));
        CHECK(e.sigma_total * e.sigma_total ==
              doctest::Approx(e.sigma_bar * e.sigma_bar + e.sigma_max * e.sigma_max).epsilon(1e-12));
    }
    SUBCASE("less than a decade")
    {
        const KCurve c = synthetic({1, 2, 5}, {1, 1, 1}, {0.1, 0.1, 0.1});
        try {
            extract_estimate(c);
            FAIL("expected extraction failure");
        } catch (const ExtractionError& e) {
            CHECK(e.kind() == ErrorKind::extraction_failed);
            CHECK_FALSE(e.best());
        }
    }
    SUBCASE("no qualifying window reports the closest candidate")
    {
        const KCurve c = synthetic({1, 3, 10, 30, 100}, {0.0, 1.0, 2.0, 3.0, 4.0},
                                   {0.1, 0.1, 0.1, 0.1, 0.1});
        try {
            extract_estimate(c);
            FAIL("expected extraction failure");
        } catch (const ExtractionError& e) {
            REQUIRE(e.best());
            CHECK(e.best()->m_hi == 10 * e.best()->m_lo);
            CHECK(e.best()->violation == doctest::Approx(0.9));
        }
    }
}

TEST_CASE("budget")
{
    CHECK(budget({{"a", 2.0, 3.0}}).u_b == 6.0);
    CHECK(budget({{"a", 3.0, 1.0}, {"b", -4.0, 1.0}}).u_b == 5.0);
    CHECK(budget({{"zeeman", 1.007, 1e-15}}).u_b == doctest::Approx(1.007e-15).epsilon(1e-14));
    try {
        budget({});
        FAIL("expected empty budget");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::empty_budget);
    }
    CHECK_THROWS_AS(budget({{"a", 1.0, -1.0}}), Error);
    CHECK(BudgetEntry::with_type_b("t", 2.0, 3.0, 4.0).sigma_x == 5.0);
    CHECK(budget({{"z", 0.0, 0.0}}).u_b == 0.0);
    CHECK(budget({{"big", 1e150, 1e150}, {"big2", 1e150, 1e150}}).u_b ==
          doctest::Approx(std::sqrt(2.0) * 1e300));

    std::vector<BudgetEntry> entries;
    double sum2 = 0.0;
    for (int i = 0; i < 9; ++i) {
        const double k = 0.3 * i - 1.1;
        const double s = 1e-3 * (i + 1);
        entries.push_back({"e" + std::to_string(i), k, s});
        sum2 += k * k * s * s;
    }
    const double u = budget(entries).u_b;
    CHECK(u * u == doctest::Approx(sum2).epsilon(1e-12));
    std::reverse(entries.begin(), entries.end());
    std::rotate(entries.begin(), entries.begin() + 4, entries.end());
    CHECK(budget(entries).u_b == doctest::Approx(u).epsilon(1e-15));
    for (auto& e : entries) {
        e.sigma_x *= 7.0;
    }
    CHECK(budget(entries).u_b == doctest::Approx(7.0 * u).epsilon(1e-14));
}
