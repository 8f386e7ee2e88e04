#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glwalk/ensemble.hpp"
#include "glwalk/projective.hpp"
#include "glwalk/rng.hpp"
#include "glwalk/walk.hpp"

namespace glwalk {

struct LyapunovEstimate {
    double value = 0.0;          // mean over paths of log||A_n x|| / n, x ~ nu_hat
    double se = 0.0;             // across paths
    double increment_variant = 0.0; // same, discarding a burn-in prefix of n/10 steps
    std::int64_t n = 0;
    std::int64_t paths = 0;
};

LyapunovEstimate lyapunov(const EnsembleSpec& spec, std::int64_t n, std::int64_t paths,
                          const StationarySampler& sampler, RngStream rng, int workers = 1);

struct VarianceEstimate {
    enum class Method { batch_means, covariance_series };
    Method method = Method::batch_means;
    double value = 0.0; // s_hat^2
    double se = 0.0;
    int truncation_lag = 0; // series method
    bool degenerate = false;
};

// Var(S_n)/n over n in {2^8..2^13} across stationary paths, extrapolated by
// averaging the two largest grid points. Centering cancels inside a variance,
// so no lambda_hat is needed.
VarianceEstimate variance_batch_means(const EnsembleSpec& spec, const StationarySampler& sampler,
                                      std::int64_t paths, RngStream rng, int workers = 1);

// s^2 = c_0 + 2 sum_{l>=1} c_l from long stationary paths, truncated at the
// smallest lag whose autocovariance drops below 2 SE (capped at max_lag).
VarianceEstimate variance_covariance_series(const EnsembleSpec& spec,
                                            const StationarySampler& sampler,
                                            std::int64_t path_length, int replicates, int max_lag,
                                            RngStream rng);

struct KolmogorovReport {
    std::string observable; // vec_norm | mat_norm | spec_radius | vec_norm_worst_start
    std::vector<std::int64_t> n_grid;
    std::vector<double> d_n; // sup_y | F_hat(y sqrt(n)) - Phi(y / s_hat) |
    std::int64_t paths = 0;
    double mc_floor = 0.0; // 1.36 / sqrt(paths)
    double lambda_hat = 0.0;
    double s_hat = 0.0;
};

// Exact sup over ECDF jump points of the distance between the law of
// (value - n lambda_hat)/sqrt(n) and the N(0, s_hat^2) reference.
KolmogorovReport ks_distance(const SampleMatrix& samples, const std::string& observable,
                             double lambda_hat, double s_hat);

// sup over a 16-point adversarial start set (8 nu_hat draws + 8 fixed
// directions of maximal pairwise projective spread); the first start is the
// plain nu_hat draw, so the maximum dominates the single-start distance.
struct WorstStartReport {
    KolmogorovReport max_report;    // per-n maximum over the start set
    KolmogorovReport single_report; // first nu_hat start only
};
WorstStartReport ks_distance_worst_start(const EnsembleSpec& spec,
                                         const std::vector<std::int64_t>& n_grid,
                                         std::int64_t paths_per_start,
                                         const StationarySampler& sampler, double lambda_hat,
                                         double s_hat, RngStream rng, int workers = 1,
                                         std::int64_t step_budget = 10'000'000'000LL);

enum class RateModel { power_law, paper_q_rate, paper_sqrt_rate, paper_q34_rate };

const char* rate_model_name(RateModel m);
RateModel rate_model_from_name(const std::string& name);

struct RateFit {
    RateModel model = RateModel::power_law;
    double slope = 0.0; // on log v_n (unit slope = the paper's shape) or log n (power law)
    double intercept = 0.0;
    double r2 = 0.0;
    double se = 0.0; // bootstrap (0 when no samples supplied)
    double ci_lo = 0.0;
    double ci_hi = 0.0;
    double q = 0.0;
};

// OLS of log D_n on the model regressor. Refuses noise-dominated inputs
// (any D_n < 3 mc_floor). When the sample matrix is supplied the CI comes
// from >= 200 path-resampling bootstrap replicates.
RateFit rate_fit(const KolmogorovReport& report, RateModel model, double q,
                 const SampleMatrix* samples = nullptr, int bootstrap = 200,
                 std::uint64_t bootstrap_seed = 11);

struct GapReport {
    std::int64_t n_max = 0;
    std::int64_t paths = 0;
    int j_nu = 0;
    std::vector<double> per_n_max; // max over paths of gap_n, for n = 1..n_max
    double min_gap = 0.0;          // over all (path, n); >= -1e-10 by operator-norm domination
    double trend_ratio = 0.0;      // last-decile mean / first-decile mean of per-n maxima
};

// gap_n = log||A_n|| - (1/J) sum_j log||A_n u_j|| with u_j ~ nu_hat per path;
// nonnegative term by term, and bounded in n for proximal families.
GapReport bougerol_gap(const EnsembleSpec& spec, std::int64_t n_max, std::int64_t paths,
                       const StationarySampler& sampler, int j_nu, RngStream rng, int workers = 1);

} // namespace glwalk
