#include <doctest.h>

#include <cmath>

#include "glwalk/stats.hpp"
#include "glwalk/walk.hpp"
#include "support/oracles.hpp"

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

TEST_CASE("two-atom n=10: Monte Carlo mean matches the exhaustive enumeration oracle") {
    EnsembleSpec spec = contracting_two_atom();
    Vec start = Vec::basis(2, 0);
    std::vector<double> exact =
        oracle::enumerate_two_atom_log_norms(spec.atoms[0], spec.atoms[1], 10, start);
    double exact_mean = 0.0;
    for (double v : exact) exact_mean += v;
    exact_mean /= static_cast<double>(exact.size());

    RunningStat mc;
    RngStream rng(2718);
    ProjectivePoint x0 = ProjectivePoint::from_vector(start);
    for (int p = 0; p < 100'000; ++p) {
        RngStream pr = rng.child(static_cast<std::uint64_t>(p), stage::walk);
        mc.add(run_path(spec, 10, x0, pr).log_vec_norm);
    }
    CHECK(std::fabs(mc.mean - exact_mean) <= 4.0 * mc.se_mean());
}

TEST_CASE("scalar walk at n=1024 matches a direct iid-sum simulation") {
    ZLaw law;
    law.kind = ZLaw::Kind::two_point;
    law.z1 = 0.45;
    law.z2 = -0.55;
    law.p1 = 0.55; // centered two-point law: 0.55*0.45 - 0.45*0.55 = 0
    EnsembleSpec spec = EnsembleSpec::scalar_gauge(2, law);

    const std::int64_t n = 1024, paths = 20'000;
    StationarySampler sampler = StationarySampler::make(spec, 8);
    SampleMatrix sm = run_stationary_batch(spec, {n}, paths, sampler, RngStream(5));
    std::vector<double> walk_scaled(sm.log_vec_norm[0]);
    for (double& v : walk_scaled) v /= std::sqrt(static_cast<double>(n));

    std::vector<double> iid = oracle::iid_sum_samples(law, n, paths, RngStream(6));
    for (double& v : iid) v /= std::sqrt(static_cast<double>(n));

    double ks = two_sample_ks(walk_scaled, iid);
    double combined_noise = 1.358 * std::sqrt(2.0 / static_cast<double>(paths));
    CHECK(ks < 2.0 * combined_noise);
}
