#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "glwalk/ensemble.hpp"
#include "glwalk/projective.hpp"
#include "glwalk/rng.hpp"

namespace glwalk {

// Start-pair pools for approximating the sup over X x X in
// delta_{p,inf}^p(k) = sup_{x,y} E |X_{k,x} - X_{k,y}|^p. The pool maximum is
// a lower bound on the sup and is reported as such; nearly-orthogonal starts
// maximize the initial projective distance and are the natural adversarial
// choice.
enum class PairStrategy { nu_pairs, antipodal, pinned, mixed };

const char* pair_strategy_name(PairStrategy s);
PairStrategy pair_strategy_from_name(const std::string& name);

struct DepCoefCurve {
    double p = 1.0;
    std::vector<std::int64_t> k_grid;
    std::vector<double> values; // delta_hat(k), p-th root of the pool max
    std::vector<double> se;     // delta-method SE at the argmax pair
    std::int64_t pair_count = 0;
    std::int64_t replicates = 0;
    PairStrategy strategy = PairStrategy::mixed;
};

// Common-randomness coupling: both chains of a pair consume the identical
// eps_1..eps_k (one draw drives both), so lambda_mu cancels in the increment
// difference and no centering is needed.
DepCoefCurve estimate_delta(const EnsembleSpec& spec, double p,
                            const std::vector<std::int64_t>& k_grid, PairStrategy strategy,
                            std::int64_t replicates, const StationarySampler& sampler,
                            RngStream rng, int pairs = 32,
                            const std::vector<std::pair<ProjectivePoint, ProjectivePoint>>* pinned =
                                nullptr);

struct DecayReport {
    double slope = 0.0;    // log-log slope of delta_hat vs k
    double slope_se = 0.0; // bootstrap SE
    double ratio = 0.0;    // max/min of k^{q/p-1} delta_hat(k) on the upper half grid
    bool flagged = false;  // ratio grows monotonically beyond the configured factor
    bool degenerate = false; // curve identically ~0 (direction-free cocycle)
    double q = 0.0;
    double p = 1.0;
};

// Checks the decay law delta_{p,inf}(k) = o(1/k^{q/p-1}): log-log slope plus a
// bounded-ratio statistic of k^{q/p-1} delta_hat(k).
DecayReport decay_check(const DepCoefCurve& curve, double q, double flag_factor = 3.0,
                        int bootstrap = 400, std::uint64_t bootstrap_seed = 7);

} // namespace glwalk
