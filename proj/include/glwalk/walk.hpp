#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glwalk/ensemble.hpp"
#include "glwalk/projective.hpp"
#include "glwalk/rng.hpp"

namespace glwalk {

// Running state of one path, kept overflow-free by storing the matrix product
// in factored form A_k = e^{c_k} M_k with ||M_k|| in [1/2, 2]:
//
//   vec_dir   current chain state W_k
//   vec_log   log ||A_k x0|| = sum of cocycle increments (exact by construction)
//   mat_unit  M_k, renormalized whenever its operator norm leaves [1/2, 2]
//   mat_log   c_k
//
// Raw products overflow near n ~ 700 for modest Lyapunov exponents; the
// factored form is exact up to rounding at any n.
class WalkAccumulator {
public:
    WalkAccumulator(const ProjectivePoint& start, int renorm_cadence = 1);

    void advance(const GroupElement& g);

    std::int64_t step_count() const { return step_; }
    const ProjectivePoint& vec_dir() const { return dir_; }
    double log_vec_norm() const { return vec_log_; }
    double log_mat_norm() const;
    double log_spec_radius() const; // rho(A_n) = e^{c_n} rho(M_n)
    const Mat& mat_unit() const { return mat_unit_; }
    double mat_log() const { return mat_log_; }

    // Raw sigma increments (no centering): when enabled, every advance()
    // appends sigma(eps_k, W_{k-1}).
    void record_increments(std::vector<double>* sink) { increments_ = sink; }

private:
    ProjectivePoint dir_;
    double vec_log_ = 0.0;
    Mat mat_unit_;
    double mat_log_ = 0.0;
    std::int64_t step_ = 0;
    int cadence_ = 1;
    std::vector<double>* increments_ = nullptr;
};

struct PathResult {
    std::int64_t n = 0;
    double log_vec_norm = 0.0;
    double log_mat_norm = 0.0;
    double log_spec_radius = 0.0;
    std::vector<double> increments; // raw sigma increments when requested
};

PathResult run_path(const EnsembleSpec& spec, std::int64_t n, const ProjectivePoint& start,
                    RngStream& rng, bool record_increments = false);

// Per-(n, observable) sample arrays from independent stationary-start paths,
// checkpointed in a single pass per path.
struct SampleMatrix {
    std::vector<std::int64_t> n_grid;
    std::int64_t paths = 0;
    // sample[g][p] = observable at n_grid[g] for path p
    std::vector<std::vector<double>> log_vec_norm;
    std::vector<std::vector<double>> log_mat_norm;
    std::vector<std::vector<double>> log_spec_radius;

    const std::vector<std::vector<double>>& observable(const std::string& name) const;
};

// Streams per path are derived as child(path, stage) from `base`: results are
// independent of worker count and scheduling order by construction.
SampleMatrix run_stationary_batch(const EnsembleSpec& spec, const std::vector<std::int64_t>& n_grid,
                                  std::int64_t paths, const StationarySampler& sampler,
                                  RngStream base, int workers = 1,
                                  std::int64_t step_budget = 10'000'000'000LL);

} // namespace glwalk
