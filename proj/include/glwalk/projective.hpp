#pragma once

#include <vector>

#include "glwalk/ensemble.hpp"
#include "glwalk/linalg.hpp"
#include "glwalk/rng.hpp"

namespace glwalk {

// A direction in projective space, stored as a unit vector with canonical
// sign: the first coordinate exceeding 1e-14 in magnitude is positive. The
// canonical form makes comparisons and ECDFs over alignment coordinates
// well-defined.
struct ProjectivePoint {
    Vec direction;

    static ProjectivePoint from_vector(const Vec& v); // normalizes + canonicalizes
    static ProjectivePoint basis(int d, int i) { return from_vector(Vec::basis(d, i)); }

    int dim() const { return direction.d; }
};

// Projective action g.x = (g x) / ||g x||, canonicalized. Safe for matrices
// with entries up to ~e^600 (norms are computed in log scale).
ProjectivePoint act(const GroupElement& g, const ProjectivePoint& x);
ProjectivePoint act(const Mat& m, const ProjectivePoint& x);

// Additive cocycle sigma(g, x) = log(||g x|| / ||x||) for the unit
// representative x. Satisfies sigma(g1 g2, x) = sigma(g1, g2.x) + sigma(g2, x).
double cocycle(const GroupElement& g, const ProjectivePoint& x);
double cocycle(const Mat& m, const ProjectivePoint& x);

// One step of the projective chain together with its cocycle increment;
// the returned pair is (sigma(g, x), g.x). Cheaper than calling cocycle and
// act separately in hot loops.
struct StepResult {
    double increment;
    ProjectivePoint next;
};
StepResult step(const GroupElement& g, const ProjectivePoint& x);

// Alignment delta(u, v) = |<u, v>| for unit representatives; 1 iff equal as
// projective points, 0 iff orthogonal.
double alignment(const ProjectivePoint& u, const ProjectivePoint& v);

// Approximate sampler for the stationary (Furstenberg) measure nu: run the
// chain burn_in steps forward from a fixed start. An optional pre-drawn pool
// amortizes the burn-in when many independent draws are needed per path.
struct StationarySampler {
    EnsembleSpec spec;
    int burn_in = 200;
    std::vector<ProjectivePoint> pool; // optional cache, filled once

    static StationarySampler make(const EnsembleSpec& spec, int burn_in = 200);

    // Fill the cache with `size` iid draws using a dedicated stream.
    void fill_pool(int size, RngStream rng);

    const ProjectivePoint& pool_at(std::size_t i) const { return pool[i % pool.size()]; }
};

// W_B = eps_B ... eps_1 . x0 from the fixed start x0 = e1.
ProjectivePoint stationary_draw(const StationarySampler& s, RngStream& rng);

// Two-sample Kolmogorov-Smirnov statistic between samples of a scalar
// statistic; used for the one-step invariance self-test of nu_hat.
double two_sample_ks(std::vector<double> a, std::vector<double> b);

// One-step invariance self-test: KS distance between alignment(W, r) for
// W ~ nu_hat and for eps.W, compared against the 95% two-sample quantile
// 1.358 * sqrt((n+m)/(n m)). Returns (statistic, threshold).
struct InvarianceTest {
    double ks = 0.0;
    double threshold = 0.0;
    bool pass() const { return ks <= threshold; }
};
InvarianceTest invariance_self_test(const StationarySampler& s, int draws, RngStream rng);

} // namespace glwalk
