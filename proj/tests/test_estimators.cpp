#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "glwalk/errors.hpp"
#include "glwalk/estimators.hpp"
#include "glwalk/stats.hpp"

using namespace glwalk;

namespace {

Mat mat2(double a, double b, double c, double d) {
    Mat m = Mat::zero(2);
    m(0, 0) = a;
    m(0, 1) = b;
    m(1, 0) = c;
    m(1, 1) = d;
    return m;
}

EnsembleSpec contracting_two_atom() {
    double c1 = std::cos(0.3), s1 = std::sin(0.3);
    double c2 = std::cos(-0.8), s2 = std::sin(-0.8);
    Mat g1 = mat2(c1, -s1, s1, c1) * mat2(2.0, 0, 0, 0.5);
    Mat g2 = mat2(c2, -s2, s2, c2) * mat2(3.0, 0, 0, 1.0 / 3.0);
    return EnsembleSpec::two_atom(g1, g2, 4.0);
}

SampleMatrix synthetic_samples(const std::vector<std::int64_t>& n_grid, std::int64_t paths,
                               double lambda, double s, std::uint64_t seed) {
    SampleMatrix sm;
    sm.n_grid = n_grid;
    sm.paths = paths;
    RngStream rng(seed);
    auto alloc = [&](std::vector<std::vector<double>>& v) {
        v.assign(n_grid.size(), std::vector<double>(static_cast<std::size_t>(paths)));
    };
    alloc(sm.log_vec_norm);
    alloc(sm.log_mat_norm);
    alloc(sm.log_spec_radius);
    for (std::size_t g = 0; g < n_grid.size(); ++g) {
        double n = static_cast<double>(n_grid[g]);
        for (std::int64_t p = 0; p < paths; ++p) {
            double x = n * lambda + std::sqrt(n) * s * rng.next_gaussian();
            sm.log_vec_norm[g][static_cast<std::size_t>(p)] = x;
            sm.log_mat_norm[g][static_cast<std::size_t>(p)] = x;
            sm.log_spec_radius[g][static_cast<std::size_t>(p)] = x;
        }
    }
    return sm;
}

} // namespace

TEST_CASE("lyapunov on isometries is exactly zero") {
    EnsembleSpec spec = EnsembleSpec::orthogonal_only(2);
    StationarySampler sampler = StationarySampler::make(spec, 16);
    LyapunovEstimate e = lyapunov(spec, 200, 8, sampler, RngStream(1));
    CHECK(e.value == doctest::Approx(0.0).epsilon(1e-13));
    CHECK(e.increment_variant == doctest::Approx(0.0).epsilon(1e-13));
}

TEST_CASE("ks_to_cdf equals a brute-force grid sup at 1e-4 resolution") {
    RngStream rng(77);
    std::vector<double> samples;
    for (int i = 0; i < 500; ++i) samples.push_back(0.3 + 1.7 * rng.next_gaussian());
    auto cdf = [](double t) { return normal_cdf(t / 1.5); };
    double exact = ks_to_cdf(samples, cdf);
    double brute = 0.0;
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    for (double t = -8.0; t <= 8.0; t += 1e-4) {
        double ecdf = static_cast<double>(std::lower_bound(sorted.begin(), sorted.end(), t) -
                                          sorted.begin());
        // count of values <= t (upper_bound) for the right limit
        double ecdf_hi = static_cast<double>(std::upper_bound(sorted.begin(), sorted.end(), t) -
                                             sorted.begin());
        brute = std::max(brute, std::fabs(ecdf_hi / 500.0 - cdf(t)));
        brute = std::max(brute, std::fabs(ecdf / 500.0 - cdf(t)));
    }
    CHECK(exact >= brute - 1e-12);
    CHECK(exact <= brute + 2e-4); // grid misses the sup by at most the grid slack
}

TEST_CASE("ks_distance on exact-null gaussian samples sits below 1.5x the MC floor") {
    SampleMatrix sm = synthetic_samples({256, 1024}, 20'000, 0.2, 0.8, 99);
    KolmogorovReport rep = ks_distance(sm, "vec_norm", 0.2, 0.8);
    for (double d : rep.d_n) CHECK(d < 1.5 * rep.mc_floor);
}

TEST_CASE("ks_distance refuses a degenerate variance") {
    SampleMatrix sm = synthetic_samples({16}, 100, 0.0, 1.0, 3);
    CHECK_THROWS_AS(ks_distance(sm, "vec_norm", 0.0, 0.0), DegenerateVarianceError);
}

TEST_CASE("rate_fit recovers synthetic slopes") {
    KolmogorovReport rep;
    rep.observable = "vec_norm";
    rep.paths = 1'000'000'000; // synthetic: negligible mc floor
    rep.mc_floor = 1.36 / std::sqrt(1e9);
    rep.n_grid = {256, 1024, 4096, 16384};
    rep.s_hat = 1.0;

    SUBCASE("free power law c n^{-1/2}") {
        rep.d_n.clear();
        for (std::int64_t n : rep.n_grid) rep.d_n.push_back(0.8 / std::sqrt(static_cast<double>(n)));
        RateFit f = rate_fit(rep, RateModel::power_law, 4.0);
        CHECK(f.slope == doctest::Approx(-0.5).epsilon(1e-2));
        CHECK(f.r2 > 0.999);
    }
    SUBCASE("paper rate ((log n)/n)^{q/2-1} with q = 2.5 fits at unit slope") {
        rep.d_n.clear();
        for (std::int64_t n : rep.n_grid) {
            double nn = static_cast<double>(n);
            rep.d_n.push_back(2.0 * std::pow(std::log(nn) / nn, 0.25));
        }
        RateFit f = rate_fit(rep, RateModel::paper_q_rate, 2.5);
        CHECK(f.slope == doctest::Approx(1.0).epsilon(2e-2));
    }
    SUBCASE("q in (3,4) closing-remark rate fits at unit slope") {
        rep.d_n.clear();
        for (std::int64_t n : rep.n_grid) {
            double nn = static_cast<double>(n);
            rep.d_n.push_back(0.5 * std::pow(std::log(nn), 0.25) / std::sqrt(nn));
        }
        RateFit f = rate_fit(rep, RateModel::paper_q34_rate, 3.5);
        CHECK(f.slope == doctest::Approx(1.0).epsilon(2e-2));
    }
}

TEST_CASE("rate_fit refuses noise-dominated inputs and names the offenders") {
    KolmogorovReport rep;
    rep.observable = "vec_norm";
    rep.paths = 100;
    rep.mc_floor = 0.136;
    rep.n_grid = {16, 64, 256, 1024};
    rep.d_n = {0.5, 0.41, 0.40, 0.01}; // the last point is under 3x floor
    rep.s_hat = 1.0;
    try {
        rate_fit(rep, RateModel::power_law, 4.0);
        FAIL("expected NoiseDominatedError");
    } catch (const NoiseDominatedError& e) {
        CHECK(std::string(e.what()).find("1024") != std::string::npos);
    }
}

TEST_CASE("worst-start distance dominates the single-start distance") {
    EnsembleSpec spec = contracting_two_atom();
    StationarySampler sampler = StationarySampler::make(spec, 64);
    WorstStartReport r = ks_distance_worst_start(spec, {64, 256}, 400, sampler,
                                                 /*lambda*/ 0.7283, /*s*/ 0.45, RngStream(5));
    for (std::size_t g = 0; g < r.max_report.n_grid.size(); ++g)
        CHECK(r.max_report.d_n[g] >= r.single_report.d_n[g]);
}

TEST_CASE("bougerol gap on scalar matrices is identically zero") {
    ZLaw law;
    law.kind = ZLaw::Kind::two_point;
    law.z1 = 0.6;
    law.z2 = -0.2;
    law.p1 = 0.5;
    EnsembleSpec spec = EnsembleSpec::scalar_gauge(2, law);
    StationarySampler sampler = StationarySampler::make(spec, 8);
    GapReport rep = bougerol_gap(spec, 200, 4, sampler, 16, RngStream(3));
    CHECK(std::fabs(rep.min_gap) <= 1e-10);
    for (double g : rep.per_n_max) CHECK(std::fabs(g) <= 1e-9);
}

TEST_CASE("gap is nonnegative for matrix families") {
    EnsembleSpec spec = contracting_two_atom();
    StationarySampler sampler = StationarySampler::make(spec, 32);
    GapReport rep = bougerol_gap(spec, 300, 8, sampler, 16, RngStream(7));
    CHECK(rep.min_gap >= -1e-10);
}

TEST_CASE("variance on the degenerate control family raises its flag") {
    EnsembleSpec spec = EnsembleSpec::orthogonal_only(2);
    StationarySampler sampler = StationarySampler::make(spec, 8);
    VarianceEstimate e = variance_batch_means(spec, sampler, 64, RngStream(1));
    CHECK(e.degenerate);
    CHECK(e.value == doctest::Approx(0.0).epsilon(1e-12));
}
