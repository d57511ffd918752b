#include <doctest.h>

#include <cmath>
#include <vector>

#include "nsc/asynchrony.hpp"
#include "nsc/error.hpp"
#include "nsc/noise.hpp"

using namespace nsc;

namespace {

std::vector<double> vec(const TimeSeries& s)
{
    return {s.values().begin(), s.values().end()};
}

// y responds to x through `spec`; both records cover the same n samples.
struct Pair {
    TimeSeries y;
    TimeSeries x;
};

Pair build(const AsynchronySpec& spec, std::size_t n, double k, double noise, std::uint64_t seed)
{
    const std::size_t pad = 40;
    const TimeSeries u = generate(NoiseSpec::make(NoiseKind::wfn, 1.0, seed), n + 2 * pad);
    const TimeSeries e = generate(NoiseSpec::make(NoiseKind::wfn, noise, seed + 1), n);
    const Aligned v = apply_asynchrony(u, spec);
    std::vector<double> x(n);
    std::vector<double> y(n);
    for (std::size_t t = 0; t < n; ++t) {
        x[t] = u[t + pad];
        y[t] = e[t] + k * v.series[t + pad - v.lead];
    }
    return {TimeSeries(y, 1.0), TimeSeries(x, 1.0)};
}

} // namespace

TEST_CASE("delay")
{
    const TimeSeries x({1, 2, 3, 4}, 1.0);
    CHECK(apply_delay(x, 0).series == x);
    CHECK(apply_delay(x, 0).lead == 0);
    const Aligned a = apply_delay(x, 1);
    CHECK(vec(a.series) == std::vector<double>{2, 3, 4});
    CHECK(a.lead == 0);
    CHECK(vec(a.truncate(TimeSeries({10, 20, 30, 40}, 1.0))) == std::vector<double>{10, 20, 30});
    const Aligned b = apply_delay(x, -1);
    CHECK(vec(b.series) == std::vector<double>{1, 2, 3});
    CHECK(vec(b.truncate(TimeSeries({10, 20, 30, 40}, 1.0))) == std::vector<double>{20, 30, 40});
    CHECK_THROWS_AS(apply_delay(x, 4), Error);
    CHECK_THROWS_AS(apply_delay(x, -7), Error);

    const TimeSeries w = generate(NoiseSpec::make(NoiseKind::wfn, 1.0, 1), 50);
    for (int d : {1, 3, 7, -5}) {
        const Aligned there = apply_delay(w, d);
        const Aligned back = apply_delay(there.series, -d);
        const std::size_t s = static_cast<std::size_t>(std::abs(d));
        CHECK(back.series == w.slice(s, w.size() - 2 * s));
        CHECK(back.lead + there.lead == s);
    }
}

TEST_CASE("integral mean")
{
    const TimeSeries x({0, 3, 0, 3, 0}, 1.0);
    CHECK(apply_integral_mean(x, 1).series == x);
    const Aligned a = apply_integral_mean(x, 3);
    CHECK(vec(a.series) == std::vector<double>{1, 2, 1});
    CHECK(a.lead == 1);
    const Aligned b = apply_integral_mean(TimeSeries({0, 2, 4, 6, 8, 10}, 1.0), 2);
    CHECK(vec(b.series) == std::vector<double>{1, 3, 5, 7});
    CHECK(b.lead == 1);
    const Aligned c = apply_integral_mean(TimeSeries(std::vector<double>(30, 7.25), 1.0), 6);
    CHECK(c.series.size() == 24);
    for (double v : c.series.values()) {
        CHECK(v == 7.25);
    }
    CHECK_THROWS_AS(apply_integral_mean(x, 4), Error);
    CHECK_THROWS_AS(apply_integral_mean(x, 0), Error);

    const AsynchronySpec both{4, 5};
    CHECK(both.mode() == AsyncMode::both);
    CHECK(AsynchronySpec{0, 5}.mode() == AsyncMode::integral);
    CHECK(AsynchronySpec{-2, 1}.mode() == AsyncMode::delay);
    const TimeSeries w = generate(NoiseSpec::make(NoiseKind::wfn, 1.0, 2), 100);
    const Aligned z = apply_asynchrony(w, both);
    CHECK(z.lead == 2);
    CHECK(z.series.size() == 100 - 4 - 4);
    double s = 0.0;
    for (std::size_t i = 4; i < 9; ++i) {
        s += w[i];
    }
    CHECK(z.series[0] == doctest::Approx(s / 5.0).epsilon(1e-13));
}

TEST_CASE("theory curves")
{
    const double k = 2.5;
    const double d = 10.0;
    CHECK(theory_k_delay(4.9, d, k) == 0.0);
    CHECK(theory_k_delay(5.0, d, k) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));
    CHECK(theory_k_delay(d, d, k) == doctest::Approx(-k / 2).epsilon(1e-12));
    CHECK(theory_k_delay(std::nextafter(d, 0.0), d, k) == doctest::Approx(-k / 2).epsilon(1e-12));
    CHECK(theory_k_delay(1e12, d, k) == doctest::Approx(k).epsilon(1e-10));
    CHECK(theory_k_delay(1.0, 0.0, k) == k);
    const double t = 8.0;
    CHECK(theory_k_integral(1.99, t, k) == 0.0);
    CHECK(theory_k_integral(2.0, t, k) == 0.0);
    CHECK(theory_k_integral(std::nextafter(4.0, 0.0), t, k) == doctest::Approx(k / 4).epsilon(1e-12));
    CHECK(theory_k_integral(4.0, t, k) == doctest::Approx(k / 4).epsilon(1e-12));
    CHECK(theory_k_integral(t, t, k) == doctest::Approx(0.625 * k).epsilon(1e-15));
    for (double tau : {0.3, 3.0, 7.0, 12.0, 40.0}) {
        CHECK(theory_k_delay(tau, -d, k) == theory_k_delay(tau, d, k));
    }
    double prev_d = theory_k_delay(d, d, k);
    double prev_i = theory_k_integral(t, t, k);
    for (double tau = 10.5; tau < 1e4; tau *= 1.3) {
        const double kd = theory_k_delay(tau, d, k);
        const double ki = theory_k_integral(tau, t, k);
        CHECK(kd > prev_d);
        CHECK(ki > prev_i);
        CHECK(kd < k);
        CHECK(ki < k);
        prev_d = kd;
        prev_i = ki;
    }
    CHECK_THROWS_AS(theory_k_delay(0.0, d, k), Error);
    CHECK_THROWS_AS(theory_k_integral(1.0, 0.0, k), Error);
}

TEST_CASE("simulated curves follow the theory")
{
    const std::size_t n = 200000;
    const double k = 1.0;
    CurveOptions opt;
    opt.noise_kind = NoiseKind::wfn;
    const TauGrid grid({1, 2, 5, 10, 20, 50, 100, 200}, n);
    {
        const Pair p = build({10, 1}, n, k, 0.1, 11);
        const KCurve c = k_curve(p.y, p.x, grid, opt);
        for (const auto& pt : c.points) {
            CAPTURE(pt.m);
            CHECK(std::abs(pt.k - theory_k_delay(pt.tau, 10.0, k)) <= 2.0 * 3.0 * pt.sigma_k);
        }
    }
    {
        const Pair p = build({0, 10}, n, k, 0.1, 21);
        const KCurve c = k_curve(p.y, p.x, grid, opt);
        for (const auto& pt : c.points) {
            CAPTURE(pt.m);
            CHECK(std::abs(pt.k - theory_k_integral(pt.tau, 10.0, k)) <= 2.0 * 3.0 * pt.sigma_k);
        }
    }
}

TEST_CASE("compensation recovers injected asynchrony")
{
    const std::size_t n = 50000;
    CompensationOptions opt;
    opt.delay_min = -12;
    opt.delay_max = 12;
    opt.integral_max = 12;
    for (const AsynchronySpec truth : {AsynchronySpec{10, 1}, AsynchronySpec{0, 10},
                                       AsynchronySpec{6, 8}, AsynchronySpec{-3, 1}}) {
        CAPTURE(truth.delay_steps);
        CAPTURE(truth.integral_steps);
        const Pair p = build(truth, n, 0.8, 1.0, 31);
        const CompensationResult r = compensate(p.y, p.x, opt);
        CHECK(r.best.delay_steps == truth.delay_steps);
        CHECK(r.best.integral_steps == truth.integral_steps);
        CHECK(r.evaluated == 25 * 12);
        CHECK(r.curve.points.front().m == 1);
    }
}

TEST_CASE("aligned records give a flat curve at tau0")
{
    const std::size_t n = 50000;
    for (const AsynchronySpec truth : {AsynchronySpec{10, 1}, AsynchronySpec{0, 10},
                                       AsynchronySpec{6, 8}}) {
        int within = 0;
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            const Pair p = build(truth, n, 0.8, 1.0, 500 + 2 * seed);
            const Aligned xa = apply_asynchrony(p.x, truth);
            const KCurve c = k_curve(xa.truncate(p.y), xa.series, TauGrid({1, 10}, n / 2));
            within += std::abs(c.points[0].k - 0.8) <= 3.0 * c.points[0].sigma_k;
        }
        CAPTURE(truth.delay_steps);
        CHECK(within >= 8);
    }
}

TEST_CASE("compensation ties and failures")
{
    // identical records: every integral window of the aligned delay scores 0
    const TimeSeries x = generate(NoiseSpec::make(NoiseKind::wfn, 1.0, 4), 2000);
    CompensationOptions opt;
    opt.delay_min = -3;
    opt.delay_max = 3;
    opt.integral_max = 3;
    const CompensationResult r = compensate(x, x, opt);
    CHECK(r.best.delay_steps == 0);
    CHECK(r.best.integral_steps == 1);
    CHECK(r.score == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    const TimeSeries flat(std::vector<double>(2000, 1.0), 1.0);
    try {
        compensate(x, flat, opt);
        FAIL("expected compensation failure");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::compensation_failed);
    }
    opt.delay_max = 5000;
    CHECK_THROWS_AS(compensate(x, x, opt), Error);
    opt.delay_max = -4;
    CHECK_THROWS_AS(compensate(x, x, opt), Error);
}
