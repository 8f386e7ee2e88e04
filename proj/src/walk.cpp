#include "glwalk/walk.hpp"

#include <atomic>
#include <cmath>
#include <string>
#include <thread>

#include "glwalk/errors.hpp"

namespace glwalk {

WalkAccumulator::WalkAccumulator(const ProjectivePoint& start, int renorm_cadence)
    : dir_(start), mat_unit_(Mat::identity(start.dim())), cadence_(renorm_cadence) {
    if (renorm_cadence < 1) throw ConfigError("WalkAccumulator: cadence must be >= 1");
}

namespace {

// Scale-safe 2x2 operator norm (the pre-renormalization product can carry
// entries up to ~2 e^600, so the squares must not be formed at full scale).
inline double op_norm_2x2(const double* a) {
    double e = 0.5 * (a[0] + a[3]);
    double f = 0.5 * (a[0] - a[3]);
    double gg = 0.5 * (a[2] + a[1]);
    double h = 0.5 * (a[2] - a[1]);
    double m = std::max(std::max(std::fabs(e), std::fabs(f)),
                        std::max(std::fabs(gg), std::fabs(h)));
    if (m == 0.0) return 0.0;
    e /= m;
    f /= m;
    gg /= m;
    h /= m;
    return m * (std::sqrt(e * e + h * h) + std::sqrt(f * f + gg * gg));
}

} // namespace

void WalkAccumulator::advance(const GroupElement& g) {
    StepResult sr = step(g, dir_);
    vec_log_ += sr.increment;
    dir_ = sr.next;
    if (increments_) increments_->push_back(sr.increment);

    ++step_;
    if (mat_unit_.d == 2) {
        const auto& gm = g.matrix.a;
        double m0 = mat_unit_.a[0], m1 = mat_unit_.a[1];
        double m2 = mat_unit_.a[2], m3 = mat_unit_.a[3];
        mat_unit_.a[0] = gm[0] * m0 + gm[1] * m2;
        mat_unit_.a[1] = gm[0] * m1 + gm[1] * m3;
        mat_unit_.a[2] = gm[2] * m0 + gm[3] * m2;
        mat_unit_.a[3] = gm[2] * m1 + gm[3] * m3;
        if (step_ % cadence_ == 0) {
            double nrm = op_norm_2x2(mat_unit_.a.data());
            if (nrm < 0.5 || nrm > 2.0) {
                double inv = 1.0 / nrm;
                mat_unit_.a[0] *= inv;
                mat_unit_.a[1] *= inv;
                mat_unit_.a[2] *= inv;
                mat_unit_.a[3] *= inv;
                mat_log_ += std::log(nrm);
            }
        }
        return;
    }
    mat_unit_ = g.matrix * mat_unit_;
    if (step_ % cadence_ == 0) {
        double nrm = operator_norm(mat_unit_);
        if (nrm < 0.5 || nrm > 2.0) {
            mat_unit_ = scale(mat_unit_, 1.0 / nrm);
            mat_log_ += std::log(nrm);
        }
    }
}

double WalkAccumulator::log_mat_norm() const { return mat_log_ + std::log(operator_norm(mat_unit_)); }

double WalkAccumulator::log_spec_radius() const {
    return mat_log_ + std::log(spectral_radius(mat_unit_));
}

PathResult run_path(const EnsembleSpec& spec, std::int64_t n, const ProjectivePoint& start,
                    RngStream& rng, bool record_increments) {
    if (n < 0) throw ConfigError("run_path: n must be >= 0");
    PathResult r;
    r.n = n;
    WalkAccumulator acc(start);
    if (record_increments) {
        r.increments.reserve(static_cast<std::size_t>(n));
        acc.record_increments(&r.increments);
    }
    for (std::int64_t k = 0; k < n; ++k) acc.advance(sample(spec, rng));
    r.log_vec_norm = acc.log_vec_norm();
    r.log_mat_norm = acc.log_mat_norm();
    r.log_spec_radius = acc.log_spec_radius();
    return r;
}

const std::vector<std::vector<double>>& SampleMatrix::observable(const std::string& name) const {
    if (name == "vec_norm") return log_vec_norm;
    if (name == "mat_norm") return log_mat_norm;
    if (name == "spec_radius") return log_spec_radius;
    throw ConfigError("unknown observable: " + name);
}

SampleMatrix run_stationary_batch(const EnsembleSpec& spec, const std::vector<std::int64_t>& n_grid,
                                  std::int64_t paths, const StationarySampler& sampler,
                                  RngStream base, int workers, std::int64_t step_budget) {
    if (n_grid.empty()) throw ConfigError("run_stationary_batch: empty n_grid");
    for (std::size_t i = 1; i < n_grid.size(); ++i)
        if (n_grid[i] <= n_grid[i - 1]) throw ConfigError("run_stationary_batch: n_grid must be ascending");
    if (paths < 1) throw ConfigError("run_stationary_batch: paths must be >= 1");
    std::int64_t n_max = n_grid.back();
    if (paths > step_budget / std::max<std::int64_t>(n_max, 1))
        throw BudgetError("run_stationary_batch: paths * max(n_grid) = " +
                          std::to_string(paths * n_max) + " exceeds step budget " +
                          std::to_string(step_budget));

    SampleMatrix sm;
    sm.n_grid = n_grid;
    sm.paths = paths;
    auto alloc = [&](std::vector<std::vector<double>>& v) {
        v.assign(n_grid.size(), std::vector<double>(static_cast<std::size_t>(paths)));
    };
    alloc(sm.log_vec_norm);
    alloc(sm.log_mat_norm);
    alloc(sm.log_spec_radius);

    auto run_one = [&](std::int64_t p) {
        RngStream start_rng = base.child(static_cast<std::uint64_t>(p), stage::start);
        RngStream walk_rng = base.child(static_cast<std::uint64_t>(p), stage::walk);
        ProjectivePoint w0 = stationary_draw(sampler, start_rng);
        WalkAccumulator acc(w0);
        std::size_t gi = 0;
        for (std::int64_t k = 1; k <= n_max; ++k) {
            acc.advance(sample(spec, walk_rng));
            if (gi < n_grid.size() && k == n_grid[gi]) {
                std::size_t pp = static_cast<std::size_t>(p);
                sm.log_vec_norm[gi][pp] = acc.log_vec_norm();
                sm.log_mat_norm[gi][pp] = acc.log_mat_norm();
                sm.log_spec_radius[gi][pp] = acc.log_spec_radius();
                ++gi;
            }
        }
    };

    if (workers <= 1) {
        for (std::int64_t p = 0; p < paths; ++p) run_one(p);
    } else {
        std::atomic<std::int64_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w)
            pool.emplace_back([&] {
                for (;;) {
                    std::int64_t p = next.fetch_add(1);
                    if (p >= paths) return;
                    run_one(p);
                }
            });
        for (auto& t : pool) t.join();
    }
    return sm;
}

} // namespace glwalk
