#include <doctest.h>

#include <cmath>

#include "glwalk/blocking.hpp"
#include "glwalk/errors.hpp"

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

EnsembleSpec scalar_spec() {
    ZLaw law;
    law.kind = ZLaw::Kind::two_point;
    law.z1 = 0.8;
    law.z2 = -0.4;
    law.p1 = 0.5;
    return EnsembleSpec::scalar_gauge(2, law);
}

StationarySampler pooled_sampler(const EnsembleSpec& spec, int pool = 256) {
    StationarySampler s = StationarySampler::make(spec, 64);
    s.fill_pool(pool, RngStream(4242));
    return s;
}

} // namespace

TEST_CASE("F_m membership matches the even-block definition exhaustively") {
    for (std::int64_t m : {2, 3, 7, 16}) {
        for (std::int64_t k = 1; k <= 10'000; ++k) {
            std::int64_t ceil_km = (k + m - 1) / m;
            CHECK(fm_member(k, m) == (ceil_km % 2 == 0));
        }
    }
}

TEST_CASE("BlockLayout enforces n = 2Nm with m >= 2, N >= 2") {
    BlockLayout l = BlockLayout::make(16, 8);
    CHECK(l.n == 256);
    CHECK_THROWS_AS(BlockLayout::make(1, 8), ConfigError);
    CHECK_THROWS_AS(BlockLayout::make(16, 1), ConfigError);
    BlockLayout k = BlockLayout::from_kappa(1000, 1.0);
    CHECK(k.n == 2 * k.N * k.m);
    CHECK(k.n <= 1000);
}

TEST_CASE("xkm on scalar_gauge equals Z_k - lambda_hat for any J_nu") {
    EnsembleSpec spec = scalar_spec();
    StationarySampler sampler = pooled_sampler(spec);
    RngStream eps_rng(7);
    std::vector<GroupElement> window;
    for (int i = 0; i < 6; ++i) window.push_back(sample(spec, eps_rng));
    double z_last = window.back().log_norm;
    for (int j_nu : {1, 4, 32}) {
        XkmEvaluator ev(spec, sampler, j_nu, 0.25);
        RngStream picks(9);
        CHECK(ev.eval(window, picks) == doctest::Approx(z_last - 0.25).epsilon(1e-14));
    }
}

TEST_CASE("m = 1 window: xkm averages sigma(eps_k, x_j) over the pool picks") {
    EnsembleSpec spec = contracting_two_atom();
    StationarySampler sampler = pooled_sampler(spec);
    RngStream eps_rng(3);
    GroupElement g = sample(spec, eps_rng);
    std::vector<GroupElement> window = {g};
    XkmEvaluator ev(spec, sampler, 8, 0.1);
    RngStream picks_a(5), picks_b(5);
    double got = ev.eval(window, picks_a);
    double expect = 0.0;
    for (int j = 0; j < 8; ++j)
        expect += cocycle(g, sampler.pool_at(picks_b.next_u64()));
    expect = expect / 8.0 - 0.1;
    CHECK(got == doctest::Approx(expect).epsilon(1e-14));
}

TEST_CASE("window fully inside a member block: conditional expectation equals xkm") {
    EnsembleSpec spec = contracting_two_atom();
    StationarySampler sampler = pooled_sampler(spec);
    std::int64_t m = 4, n = 16;
    RngStream eps_rng(11);
    std::vector<GroupElement> eps;
    for (std::int64_t i = 0; i < n; ++i) eps.push_back(sample(spec, eps_rng));
    XkmEvaluator ev(spec, sampler, 8, 0.0);
    // k = 2jm lands the window exactly on the member block (2j-1)m+1 .. 2jm.
    std::int64_t k = 8;
    for (std::int64_t i = k - m + 1; i <= k; ++i) CHECK(fm_member(i, m));
    RngStream a(21), b(21);
    double ce = conditional_expectation_fm(spec, eps, k, m, ev, 16, a);
    double direct = ev.eval(std::span<const GroupElement>(eps).subspan(
                                static_cast<std::size_t>(k - m), static_cast<std::size_t>(m)),
                            b);
    CHECK(ce == direct);
}

TEST_CASE("scalar_gauge: conditional expectation at a member k is exact") {
    EnsembleSpec spec = scalar_spec();
    StationarySampler sampler = pooled_sampler(spec);
    std::int64_t m = 4, n = 16;
    RngStream eps_rng(13);
    std::vector<GroupElement> eps;
    for (std::int64_t i = 0; i < n; ++i) eps.push_back(sample(spec, eps_rng));
    XkmEvaluator ev(spec, sampler, 4, 0.0);
    // k = 6 is a member (block 2 of m=4 covers 5..8) but its window straddles.
    std::int64_t k = 6;
    CHECK(fm_member(k, m));
    RngStream rng(31);
    double ce = conditional_expectation_fm(spec, eps, k, m, ev, 32, rng);
    CHECK(ce == doctest::Approx(eps[static_cast<std::size_t>(k - 1)].log_norm).epsilon(1e-13));
}

TEST_CASE("scalar_gauge: conditional expectation at a non-member k approaches E Z") {
    EnsembleSpec spec = scalar_spec();
    StationarySampler sampler = pooled_sampler(spec);
    std::int64_t m = 4, n = 24;
    RngStream eps_rng(17);
    std::vector<GroupElement> eps;
    for (std::int64_t i = 0; i < n; ++i) eps.push_back(sample(spec, eps_rng));
    XkmEvaluator ev(spec, sampler, 4, 0.0);
    std::int64_t k = 11; // block 3 (9..12) is odd: non-member
    CHECK_FALSE(fm_member(k, m));
    RngStream rng(37);
    int j_c = 4096;
    double ce = conditional_expectation_fm(spec, eps, k, m, ev, j_c, rng);
    double ez = spec.z_law.mean();
    double tol = 4.0 * std::sqrt(spec.z_law.variance() / j_c);
    CHECK(std::fabs(ce - ez) <= tol);
}

TEST_CASE("decompose: the identity S_nm = S1 + S2 holds to 1e-12") {
    EnsembleSpec spec = contracting_two_atom();
    StationarySampler sampler = pooled_sampler(spec);
    BlockLayout layout = BlockLayout::make(4, 4); // n = 32
    BlockSample bs = decompose(spec, layout, sampler, 8, 8, 0.37, RngStream(23));
    CHECK(std::fabs(bs.s1 + bs.s2 - bs.s_nm) <= 1e-12);
    CHECK(bs.u.size() == 4);
    CHECK(bs.y[2] == doctest::Approx(bs.u[2] + bs.r[2]).epsilon(1e-15));
}

TEST_CASE("scalar bookkeeping: R_j vanish identically; U_1 is the centered prefix sum") {
    EnsembleSpec spec = scalar_spec();
    StationarySampler sampler = pooled_sampler(spec);
    BlockLayout layout = BlockLayout::make(2, 2); // n = 8
    double lambda_hat = 0.11;
    RngStream root(29);
    BlockSample bs = decompose(spec, layout, sampler, 4, 8, lambda_hat, root);

    // R_j ranges over member blocks where X_{k,m} is F_m-measurable, so every
    // term X - E(X|F_m) vanishes for the direction-free family (up to one ulp
    // from the normalization inside the projective action).
    CHECK(std::fabs(bs.r[0]) <= 1e-13);
    CHECK(std::fabs(bs.r[1]) <= 1e-13);

    // Replay the decompose stream derivation to recover the realized Z_k.
    RngStream eps_rng = root.child(1, stage::blocking);
    std::vector<double> z;
    for (int i = 0; i < 8; ++i) z.push_back(sample(spec, eps_rng).log_norm);
    CHECK(bs.u[0] == doctest::Approx(z[0] + z[1] - 2 * lambda_hat).epsilon(1e-13));
    // S_nm = U_1 + sum_{k>m} (Z_k - lambda)
    double expect = z[0] + z[1] - 2 * lambda_hat;
    for (int k = 3; k <= 8; ++k) expect += z[static_cast<std::size_t>(k - 1)] - lambda_hat;
    CHECK(bs.s_nm == doctest::Approx(expect).epsilon(1e-12));
    CHECK(std::fabs(bs.s1 + bs.s2 - bs.s_nm) <= 1e-12);
}

TEST_CASE("decompose budget guard") {
    EnsembleSpec spec = contracting_two_atom();
    StationarySampler sampler = pooled_sampler(spec);
    BlockLayout layout = BlockLayout::make(16, 8);
    CHECK_THROWS_AS(decompose(spec, layout, sampler, 64, 64, 0.0, RngStream(1), /*budget=*/1000),
                    BudgetError);
}

TEST_CASE("scaling grid validation") {
    EnsembleSpec spec = contracting_two_atom();
    StationarySampler sampler = pooled_sampler(spec);
    CHECK_THROWS_AS(
        r1_moment_scaling(spec, 2.0, {8, 16}, 4, 4, 4, sampler, RngStream(1)),
        InsufficientGridError);
    CHECK_THROWS_AS(
        r1_moment_scaling(spec, 2.0, {8, 16, 32}, 4, 4, 4, sampler, RngStream(1)),
        InsufficientGridError);
}

TEST_CASE("evaluator requires a filled pool and J_nu >= 1") {
    EnsembleSpec spec = contracting_two_atom();
    StationarySampler empty = StationarySampler::make(spec, 16);
    CHECK_THROWS_AS(XkmEvaluator(spec, empty, 4, 0.0), ConfigError);
    StationarySampler s = pooled_sampler(spec, 8);
    CHECK_THROWS_AS(XkmEvaluator(spec, s, 0, 0.0), ConfigError);
}
