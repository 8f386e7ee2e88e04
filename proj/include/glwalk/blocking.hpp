#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "glwalk/ensemble.hpp"
#include "glwalk/projective.hpp"
#include "glwalk/rng.hpp"

namespace glwalk {

// Partition of {1..n} into 2N blocks of length m, n = 2Nm exactly (the m' = 0
// simplification; general m' is rejected).
struct BlockLayout {
    std::int64_t n = 0;
    std::int64_t m = 0;
    std::int64_t N = 0;
    double kappa = 4.0; // block-count policy N ~ kappa log n (when derived)

    static BlockLayout make(std::int64_t m, std::int64_t N);
    // N = max(2, [kappa log n]), m = n/(2N) rounded down, n snapped to 2Nm.
    static BlockLayout from_kappa(std::int64_t n_target, double kappa);
};

// F_m membership: k (1-based) belongs to the sigma-algebra's generators iff
// ceil(k/m) is even, i.e. k lies in an even m-block.
inline bool fm_member(std::int64_t k, std::int64_t m) { return (((k - 1) / m) % 2) == 1; }

// Nested Monte Carlo realization of X_{k,m}: average of
// sigma(eps_k, eps_{k-1}...eps_{k-m+1} . x_j) - lambda_hat over J_nu
// directions x_j drawn from the stationary pool. The partial product is
// applied by iterated action; no large product is ever materialized.
class XkmEvaluator {
public:
    XkmEvaluator(const EnsembleSpec& spec, const StationarySampler& sampler, int j_nu,
                 double lambda_hat);

    // window = (eps_{k-m+1}, ..., eps_k), any length >= 1.
    double eval(std::span<const GroupElement> window, RngStream& pick_rng) const;

    int j_nu() const { return j_nu_; }
    double lambda_hat() const { return lambda_hat_; }

private:
    const EnsembleSpec* spec_;
    const StationarySampler* sampler_;
    int j_nu_;
    double lambda_hat_;
};

// E(X_{k,m} | F_m) by freezing the F_m-member epsilons of the window and
// resampling the non-members J_c times. Matches the sigma-algebra definition
// literally: only the blocks intersecting the window matter, since X_{k,m} is
// measurable with respect to the m-window.
// eps is the realized path, eps[i] = eps_{i+1}; k is 1-based, k > m.
double conditional_expectation_fm(const EnsembleSpec& spec, std::span<const GroupElement> eps,
                                  std::int64_t k, std::int64_t m, const XkmEvaluator& ev, int j_c,
                                  RngStream& rng);

// One realized decomposition S_{n,m} = S1 + S2 with all intermediate blocks.
struct BlockSample {
    BlockLayout layout;
    std::vector<double> u; // U_1..U_N (U_1 = sum of raw centered increments)
    std::vector<double> r; // R_1..R_N
    std::vector<double> y; // Y_j = U_j + R_j
    double s1 = 0.0;       // sum of Y_j
    double s2 = 0.0;       // sum_{k>m} E(X_{k,m}|F_m)
    double s_nm = 0.0;     // sum_{k<=m} X_k + sum_{k>m} X_{k,m}
    int j_nu = 0;
    int j_c = 0;
    double lambda_hat = 0.0;
};

BlockSample decompose(const EnsembleSpec& spec, const BlockLayout& layout,
                      const StationarySampler& sampler, int j_nu, int j_c, double lambda_hat,
                      RngStream rng, std::int64_t step_budget = 10'000'000'000LL);

// Log-log scaling law report shared by the lemma-level checks.
struct ScalingReport {
    std::vector<std::int64_t> m_grid;
    std::vector<double> values;
    std::vector<double> se;
    double slope = 0.0;
    double slope_se = 0.0;
    double theory_ceiling = 0.0; // asserted upper bound on the slope
    bool degenerate = false;     // values at noise level, slope undefined
    std::vector<double> noise_floor_sd;  // conditional-variance check only
    std::vector<double> noise_floor_var; // ditto, scales like 1/inner
};

// E|R_1|^p vs m; the moment bound gives slope <= p+1-q.
ScalingReport r1_moment_scaling(const EnsembleSpec& spec, double p,
                                const std::vector<std::int64_t>& m_grid, std::int64_t paths,
                                int j_nu, int j_c, const StationarySampler& sampler,
                                RngStream rng);

// E|sum_{k=m+1}^{2m} X_k|^q vs m; the Rosenthal-type bound gives slope <= q/2.
ScalingReport block_moment_growth(const EnsembleSpec& spec, double q,
                                  const std::vector<std::int64_t>& m_grid, std::int64_t paths,
                                  double lambda_hat, const StationarySampler& sampler,
                                  RngStream rng);

// L1 distance between the G_m-conditional and unconditional second moments of
// the centered block sum; concentration gives slope <= 1/5 for q > 3.
ScalingReport conditional_variance_concentration(const EnsembleSpec& spec,
                                                 const std::vector<std::int64_t>& m_grid,
                                                 int outer, int inner, int j_nu,
                                                 const StationarySampler& sampler, RngStream rng);

// Structural claims of the blocking decomposition:
//  (a) conditional independence of the (U_j, R_j) blocks given one fixed F_m
//      realization (correlations of block sums across conditional resamples);
//  (b) one-dependence of Z_j = E(cos(t Y_j / sqrt(2m)) | F_m) across
//      independent F_m draws: lag >= 2 correlations vanish, lag 1 is free;
//  (c) conditional characteristic function moduli |phi_j(t)| <= 1, with
//      phi_j(0) = 1 exactly.
struct StructureReport {
    // (a)
    double max_abs_corr_blocks = 0.0;
    double corr_threshold_blocks = 0.0; // 3 / sqrt(replicates)
    std::int64_t block_pairs = 0;
    // (b)
    double max_abs_corr_lag2 = 0.0; // over |j-j'| >= 2
    double max_abs_corr_lag1 = 0.0; // reported, unconstrained
    double corr_threshold_z = 0.0;  // 3 / sqrt(outer)
    // (c)
    double phi_max_modulus = 0.0;
    double phi_at_zero = 0.0;

    bool conditional_independence_pass() const {
        return max_abs_corr_blocks <= corr_threshold_blocks;
    }
    bool one_dependence_pass() const { return max_abs_corr_lag2 <= corr_threshold_z; }
};

StructureReport structural_checks(const EnsembleSpec& spec, const BlockLayout& layout,
                                  int replicates_a, int outer_b, int inner_b, int j_nu, int j_c,
                                  double t_value, double lambda_hat,
                                  const StationarySampler& sampler, RngStream rng);

} // namespace glwalk
