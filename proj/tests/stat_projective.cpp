#include <doctest.h>

#include <cmath>

#include "glwalk/ensemble.hpp"
#include "glwalk/projective.hpp"

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

} // namespace

TEST_CASE("one-step invariance of nu_hat at B=200 for the contracting two-atom family") {
    EnsembleSpec spec = contracting_two_atom();
    StationarySampler s = StationarySampler::make(spec, 200);
    InvarianceTest t = invariance_self_test(s, 10'000, RngStream(404));
    CHECK(t.ks <= t.threshold);
}

TEST_CASE("one-step invariance holds for the rotation-only chain") {
    EnsembleSpec spec = EnsembleSpec::orthogonal_only(2);
    StationarySampler s = StationarySampler::make(spec, 50);
    InvarianceTest t = invariance_self_test(s, 8'000, RngStream(405));
    CHECK(t.ks <= t.threshold);
}

TEST_CASE("insufficient burn-in is caught by the self-test") {
    // One step from a point mass is visibly non-stationary for a contracting
    // family; the KS statistic must blow past the two-sample quantile.
    EnsembleSpec spec = contracting_two_atom();
    StationarySampler s = StationarySampler::make(spec, 1);
    InvarianceTest t = invariance_self_test(s, 10'000, RngStream(406));
    CHECK(t.ks > t.threshold);
}

TEST_CASE("pool draws agree with direct stationary draws in distribution") {
    EnsembleSpec spec = contracting_two_atom();
    StationarySampler s = StationarySampler::make(spec, 200);
    s.fill_pool(4096, RngStream(11));
    ProjectivePoint ref = ProjectivePoint::basis(2, 0);
    std::vector<double> pool_al, direct_al;
    RngStream rng(12);
    for (int i = 0; i < 4096; ++i) {
        pool_al.push_back(alignment(s.pool[static_cast<std::size_t>(i)], ref));
        RngStream ri = rng.child(static_cast<std::uint64_t>(i), stage::start);
        direct_al.push_back(alignment(stationary_draw(s, ri), ref));
    }
    double ks = two_sample_ks(pool_al, direct_al);
    CHECK(ks <= 1.358 * std::sqrt(2.0 / 4096.0));
}
