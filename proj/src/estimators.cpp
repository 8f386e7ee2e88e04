#include "glwalk/estimators.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <functional>
#include <limits>
#include <thread>
#include <utility>

#include "glwalk/errors.hpp"
#include "glwalk/stats.hpp"

namespace glwalk {

namespace {

void parallel_paths(std::int64_t paths, int workers, const std::function<void(std::int64_t)>& fn) {
    if (workers <= 1) {
        for (std::int64_t p = 0; p < paths; ++p) fn(p);
        return;
    }
    std::atomic<std::int64_t> next{0};
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w)
        pool.emplace_back([&] {
            for (;;) {
                std::int64_t p = next.fetch_add(1);
                if (p >= paths) return;
                fn(p);
            }
        });
    for (auto& t : pool) t.join();
}

} // namespace

LyapunovEstimate lyapunov(const EnsembleSpec& spec, std::int64_t n, std::int64_t paths,
                          const StationarySampler& sampler, RngStream rng, int workers) {
    if (n < 1 || paths < 1) throw ConfigError("lyapunov: n and paths must be >= 1");
    std::int64_t burn = n / 10;
    std::vector<double> full(static_cast<std::size_t>(paths)), tail(static_cast<std::size_t>(paths));
    parallel_paths(paths, workers, [&](std::int64_t p) {
        RngStream sr = rng.child(static_cast<std::uint64_t>(p), stage::start);
        RngStream wr = rng.child(static_cast<std::uint64_t>(p), stage::walk);
        ProjectivePoint w = stationary_draw(sampler, sr);
        double acc = 0.0, acc_at_burn = 0.0;
        for (std::int64_t k = 1; k <= n; ++k) {
            StepResult s = step(sample(spec, wr), w);
            acc += s.increment;
            w = s.next;
            if (k == burn) acc_at_burn = acc;
        }
        full[static_cast<std::size_t>(p)] = acc / static_cast<double>(n);
        tail[static_cast<std::size_t>(p)] =
            (acc - acc_at_burn) / static_cast<double>(n - burn);
    });
    RunningStat sf, st;
    for (double v : full) sf.add(v);
    for (double v : tail) st.add(v);
    LyapunovEstimate e;
    e.value = sf.mean;
    e.se = sf.se_mean();
    e.increment_variant = st.mean;
    e.n = n;
    e.paths = paths;
    return e;
}

VarianceEstimate variance_batch_means(const EnsembleSpec& spec, const StationarySampler& sampler,
                                      std::int64_t paths, RngStream rng, int workers) {
    std::vector<std::int64_t> n_grid = {256, 512, 1024, 2048, 4096, 8192};
    SampleMatrix sm = run_stationary_batch(spec, n_grid, paths, sampler, rng, workers);
    // Var is invariant to the (deterministic) centering by n lambda, so the
    // raw log norms can be used directly.
    std::vector<double> v(n_grid.size()), v_se(n_grid.size());
    for (std::size_t g = 0; g < n_grid.size(); ++g) {
        RunningStat s;
        for (double x : sm.log_vec_norm[g]) s.add(x);
        v[g] = s.variance() / static_cast<double>(n_grid[g]);
        v_se[g] = s.se_variance() / static_cast<double>(n_grid[g]);
    }
    VarianceEstimate e;
    e.method = VarianceEstimate::Method::batch_means;
    std::size_t top = n_grid.size() - 1;
    e.value = 0.5 * (v[top - 1] + v[top]);
    // The two top points share the same paths; assume full correlation.
    e.se = 0.5 * (v_se[top - 1] + v_se[top]);
    e.degenerate = e.value < 3.0 * e.se || e.value <= 1e-12;
    return e;
}

VarianceEstimate variance_covariance_series(const EnsembleSpec& spec,
                                            const StationarySampler& sampler,
                                            std::int64_t path_length, int replicates, int max_lag,
                                            RngStream rng) {
    if (replicates < 2) throw ConfigError("variance_covariance_series: replicates must be >= 2");
    if (path_length < 64 * max_lag)
        throw ConfigError("variance_covariance_series: path too short for the lag cap");

    RunningStat est;
    int lag_used = 0;
    for (int r = 0; r < replicates; ++r) {
        RngStream sr = rng.child(static_cast<std::uint64_t>(r), stage::start);
        RngStream wr = rng.child(static_cast<std::uint64_t>(r), stage::walk);
        ProjectivePoint w = stationary_draw(sampler, sr);
        std::vector<double> x(static_cast<std::size_t>(path_length));
        for (std::int64_t k = 0; k < path_length; ++k) {
            StepResult s = step(sample(spec, wr), w);
            x[static_cast<std::size_t>(k)] = s.increment;
            w = s.next;
        }
        double mean = 0.0;
        for (double xi : x) mean += xi;
        mean /= static_cast<double>(path_length);
        for (double& xi : x) xi -= mean;

        auto cov = [&](int lag) {
            double c = 0.0;
            std::int64_t count = path_length - lag;
            for (std::int64_t i = 0; i < count; ++i)
                c += x[static_cast<std::size_t>(i)] * x[static_cast<std::size_t>(i + lag)];
            return c / static_cast<double>(count);
        };

        double c0 = cov(0);
        double s2 = c0;
        double se_c = c0 / std::sqrt(static_cast<double>(path_length));
        int lag = 0;
        int below = 0;
        for (int l = 1; l <= max_lag; ++l) {
            double cl = cov(l);
            if (std::fabs(cl) < 2.0 * se_c) {
                if (below == 0) lag = l - 1;
                if (++below >= 4) break;
            } else {
                below = 0;
                lag = l;
            }
            s2 += 2.0 * cl;
        }
        if (below == 0) lag = max_lag;
        lag_used = std::max(lag_used, lag);
        est.add(s2);
    }
    VarianceEstimate e;
    e.method = VarianceEstimate::Method::covariance_series;
    e.value = std::max(0.0, est.mean);
    e.se = est.se_mean();
    e.truncation_lag = lag_used;
    e.degenerate = e.value < 3.0 * e.se || e.value <= 1e-12;
    return e;
}

KolmogorovReport ks_distance(const SampleMatrix& samples, const std::string& observable,
                             double lambda_hat, double s_hat) {
    if (!(s_hat > 0.0)) throw DegenerateVarianceError("ks_distance: s_hat must be positive");
    const auto& obs = samples.observable(observable);
    KolmogorovReport rep;
    rep.observable = observable;
    rep.n_grid = samples.n_grid;
    rep.paths = samples.paths;
    rep.mc_floor = 1.36 / std::sqrt(static_cast<double>(samples.paths));
    rep.lambda_hat = lambda_hat;
    rep.s_hat = s_hat;
    for (std::size_t g = 0; g < samples.n_grid.size(); ++g) {
        double n = static_cast<double>(samples.n_grid[g]);
        std::vector<double> centered(obs[g].size());
        for (std::size_t p = 0; p < obs[g].size(); ++p)
            centered[p] = (obs[g][p] - n * lambda_hat) / std::sqrt(n);
        rep.d_n.push_back(
            ks_to_cdf(std::move(centered), [&](double t) { return normal_cdf(t / s_hat); }));
    }
    return rep;
}

WorstStartReport ks_distance_worst_start(const EnsembleSpec& spec,
                                         const std::vector<std::int64_t>& n_grid,
                                         std::int64_t paths_per_start,
                                         const StationarySampler& sampler, double lambda_hat,
                                         double s_hat, RngStream rng, int workers,
                                         std::int64_t step_budget) {
    if (!(s_hat > 0.0)) throw DegenerateVarianceError("ks_distance_worst_start: s_hat must be positive");
    const int d = spec.d;
    // 8 nu_hat draws followed by 8 fixed directions of maximal pairwise spread
    // (equi-angular fan for d = 2, cycled basis directions otherwise).
    std::vector<ProjectivePoint> starts;
    RngStream srng = rng.child(0, stage::start);
    for (int i = 0; i < 8; ++i) starts.push_back(stationary_draw(sampler, srng));
    for (int i = 0; i < 8; ++i) {
        if (d == 2) {
            Vec v = Vec::zero(2);
            double th = M_PI * static_cast<double>(i) / 8.0;
            v[0] = std::cos(th);
            v[1] = std::sin(th);
            starts.push_back(ProjectivePoint::from_vector(v));
        } else {
            starts.push_back(ProjectivePoint::basis(d, i % d));
        }
    }

    std::vector<std::vector<double>> d_per_start;
    for (std::size_t si = 0; si < starts.size(); ++si) {
        SampleMatrix sm;
        sm.n_grid = n_grid;
        sm.paths = paths_per_start;
        sm.log_vec_norm.assign(n_grid.size(),
                               std::vector<double>(static_cast<std::size_t>(paths_per_start)));
        std::int64_t n_max = n_grid.back();
        if (paths_per_start * static_cast<std::int64_t>(starts.size()) >
            step_budget / std::max<std::int64_t>(n_max, 1))
            throw BudgetError("ks_distance_worst_start: step budget exceeded");
        std::atomic<std::int64_t> next{0};
        auto run_one = [&](std::int64_t p) {
            RngStream wr = rng.child(static_cast<std::uint64_t>(si) * (1ULL << 40) +
                                         static_cast<std::uint64_t>(p),
                                     stage::walk);
            ProjectivePoint w = starts[si];
            double acc = 0.0;
            std::size_t gi = 0;
            for (std::int64_t k = 1; k <= n_max; ++k) {
                StepResult s = step(sample(spec, wr), w);
                acc += s.increment;
                w = s.next;
                if (gi < n_grid.size() && k == n_grid[gi]) {
                    sm.log_vec_norm[gi][static_cast<std::size_t>(p)] = acc;
                    ++gi;
                }
            }
        };
        if (workers <= 1) {
            for (std::int64_t p = 0; p < paths_per_start; ++p) run_one(p);
        } else {
            std::vector<std::thread> pool;
            for (int w = 0; w < workers; ++w)
                pool.emplace_back([&] {
                    for (;;) {
                        std::int64_t p = next.fetch_add(1);
                        if (p >= paths_per_start) return;
                        run_one(p);
                    }
                });
            for (auto& t : pool) t.join();
        }
        sm.log_mat_norm = sm.log_vec_norm; // unused there, keep shape valid
        sm.log_spec_radius = sm.log_vec_norm;
        KolmogorovReport r = ks_distance(sm, "vec_norm", lambda_hat, s_hat);
        d_per_start.push_back(r.d_n);
    }

    WorstStartReport out;
    out.single_report.observable = "vec_norm";
    out.single_report.n_grid = n_grid;
    out.single_report.paths = paths_per_start;
    out.single_report.mc_floor = 1.36 / std::sqrt(static_cast<double>(paths_per_start));
    out.single_report.lambda_hat = lambda_hat;
    out.single_report.s_hat = s_hat;
    out.single_report.d_n = d_per_start.front();
    out.max_report = out.single_report;
    out.max_report.observable = "vec_norm_worst_start";
    for (std::size_t g = 0; g < n_grid.size(); ++g)
        for (const auto& ds : d_per_start)
            out.max_report.d_n[g] = std::max(out.max_report.d_n[g], ds[g]);
    return out;
}

const char* rate_model_name(RateModel m) {
    switch (m) {
        case RateModel::power_law: return "power_law";
        case RateModel::paper_q_rate: return "paper_q_rate";
        case RateModel::paper_sqrt_rate: return "paper_sqrt_rate";
        case RateModel::paper_q34_rate: return "paper_q34_rate";
    }
    return "?";
}

RateModel rate_model_from_name(const std::string& name) {
    if (name == "power_law") return RateModel::power_law;
    if (name == "paper_q_rate") return RateModel::paper_q_rate;
    if (name == "paper_sqrt_rate") return RateModel::paper_sqrt_rate;
    if (name == "paper_q34_rate") return RateModel::paper_q34_rate;
    throw ConfigError("unknown rate model: " + name);
}

namespace {

double rate_regressor(RateModel model, double q, double n) {
    switch (model) {
        case RateModel::power_law:
            return std::log(n);
        case RateModel::paper_q_rate: // v_n = ((log n)/n)^{q/2-1}
            return (q / 2.0 - 1.0) * (std::log(std::log(n)) - std::log(n));
        case RateModel::paper_sqrt_rate: // v_n = n^{-1/2}
            return -0.5 * std::log(n);
        case RateModel::paper_q34_rate: // v_n = (log n)^{(4-q)/2} / sqrt(n)
            return 0.5 * (4.0 - q) * std::log(std::log(n)) - 0.5 * std::log(n);
    }
    return 0.0;
}

} // namespace

RateFit rate_fit(const KolmogorovReport& report, RateModel model, double q,
                 const SampleMatrix* samples, int bootstrap, std::uint64_t bootstrap_seed) {
    if (report.n_grid.size() < 4) throw InsufficientGridError("rate_fit: need >= 4 grid points");
    std::string offenders;
    for (std::size_t g = 0; g < report.n_grid.size(); ++g)
        if (report.d_n[g] < 3.0 * report.mc_floor)
            offenders += (offenders.empty() ? "" : ",") + std::to_string(report.n_grid[g]);
    if (!offenders.empty())
        throw NoiseDominatedError("rate_fit: D_n below 3x mc_floor at n in {" + offenders + "}");

    std::vector<double> xs, ys;
    for (std::size_t g = 0; g < report.n_grid.size(); ++g) {
        xs.push_back(rate_regressor(model, q, static_cast<double>(report.n_grid[g])));
        ys.push_back(std::log(report.d_n[g]));
    }
    LinFit f = ols(xs, ys);
    RateFit rf;
    rf.model = model;
    rf.q = q;
    rf.slope = f.slope;
    rf.intercept = f.intercept;
    rf.r2 = f.r2;
    rf.ci_lo = rf.ci_hi = f.slope;

    if (samples && bootstrap >= 2) {
        if (bootstrap < 200) throw ConfigError("rate_fit: bootstrap must be >= 200");
        const auto& obs = samples->observable(report.observable == "vec_norm_worst_start"
                                                  ? "vec_norm"
                                                  : report.observable);
        std::size_t paths = static_cast<std::size_t>(samples->paths);
        // Pre-sort the centered samples per n so each bootstrap replicate only
        // needs multiplicity weights in sorted order.
        std::vector<std::vector<double>> sorted(report.n_grid.size());
        std::vector<std::vector<std::uint32_t>> order(report.n_grid.size());
        for (std::size_t g = 0; g < report.n_grid.size(); ++g) {
            double n = static_cast<double>(report.n_grid[g]);
            std::vector<std::pair<double, std::uint32_t>> tmp(paths);
            for (std::size_t p = 0; p < paths; ++p)
                tmp[p] = {(obs[g][p] - n * report.lambda_hat) / std::sqrt(n),
                          static_cast<std::uint32_t>(p)};
            std::sort(tmp.begin(), tmp.end());
            sorted[g].resize(paths);
            order[g].resize(paths);
            for (std::size_t p = 0; p < paths; ++p) {
                sorted[g][p] = tmp[p].first;
                order[g][p] = tmp[p].second;
            }
        }
        RngStream brng(bootstrap_seed);
        std::vector<double> slopes;
        std::vector<double> counts(paths);
        std::vector<double> weights(paths);
        for (int b = 0; b < bootstrap; ++b) {
            std::fill(counts.begin(), counts.end(), 0.0);
            for (std::size_t i = 0; i < paths; ++i)
                counts[static_cast<std::size_t>(brng.next_u64() % paths)] += 1.0;
            std::vector<double> yb;
            bool ok = true;
            for (std::size_t g = 0; g < report.n_grid.size(); ++g) {
                for (std::size_t p = 0; p < paths; ++p) weights[p] = counts[order[g][p]];
                double dn = ks_to_cdf_weighted(
                    sorted[g], weights, [&](double t) { return normal_cdf(t / report.s_hat); });
                if (dn <= 0.0) ok = false;
                yb.push_back(std::log(dn));
            }
            if (ok) slopes.push_back(ols(xs, yb).slope);
        }
        RunningStat bs;
        for (double s : slopes) bs.add(s);
        rf.se = bs.sd();
        rf.ci_lo = quantile(slopes, 0.025);
        rf.ci_hi = quantile(slopes, 0.975);
    }
    return rf;
}

GapReport bougerol_gap(const EnsembleSpec& spec, std::int64_t n_max, std::int64_t paths,
                       const StationarySampler& sampler, int j_nu, RngStream rng, int workers) {
    if (j_nu < 16) throw ConfigError("bougerol_gap: J_nu must be >= 16");
    GapReport rep;
    rep.n_max = n_max;
    rep.paths = paths;
    rep.j_nu = j_nu;
    rep.per_n_max.assign(static_cast<std::size_t>(n_max), -std::numeric_limits<double>::infinity());

    std::vector<std::vector<double>> per_path_max(
        static_cast<std::size_t>(paths)); // deterministic merge after the parallel phase
    std::vector<double> per_path_min(static_cast<std::size_t>(paths));

    parallel_paths(paths, workers, [&](std::int64_t p) {
        RngStream sr = rng.child(static_cast<std::uint64_t>(p), stage::start);
        RngStream wr = rng.child(static_cast<std::uint64_t>(p), stage::walk);
        std::vector<ProjectivePoint> u;
        std::vector<double> vec_logs(static_cast<std::size_t>(j_nu), 0.0);
        for (int j = 0; j < j_nu; ++j) u.push_back(stationary_draw(sampler, sr));
        WalkAccumulator acc(u[0]);
        std::vector<double>& gaps = per_path_max[static_cast<std::size_t>(p)];
        gaps.resize(static_cast<std::size_t>(n_max));
        double path_min = std::numeric_limits<double>::infinity();
        for (std::int64_t k = 1; k <= n_max; ++k) {
            GroupElement g = sample(spec, wr);
            acc.advance(g);
            double mean_vec = 0.0;
            for (int j = 0; j < j_nu; ++j) {
                StepResult s = step(g, u[static_cast<std::size_t>(j)]);
                vec_logs[static_cast<std::size_t>(j)] += s.increment;
                u[static_cast<std::size_t>(j)] = s.next;
                mean_vec += vec_logs[static_cast<std::size_t>(j)];
            }
            mean_vec /= static_cast<double>(j_nu);
            double gap = acc.log_mat_norm() - mean_vec;
            gaps[static_cast<std::size_t>(k - 1)] = gap;
            path_min = std::min(path_min, gap);
        }
        per_path_min[static_cast<std::size_t>(p)] = path_min;
    });

    rep.min_gap = std::numeric_limits<double>::infinity();
    for (std::int64_t p = 0; p < paths; ++p) {
        rep.min_gap = std::min(rep.min_gap, per_path_min[static_cast<std::size_t>(p)]);
        for (std::int64_t k = 0; k < n_max; ++k)
            rep.per_n_max[static_cast<std::size_t>(k)] =
                std::max(rep.per_n_max[static_cast<std::size_t>(k)],
                         per_path_max[static_cast<std::size_t>(p)][static_cast<std::size_t>(k)]);
    }

    std::int64_t dec = std::max<std::int64_t>(1, n_max / 10);
    RunningStat first, last;
    for (std::int64_t k = 0; k < dec; ++k) first.add(rep.per_n_max[static_cast<std::size_t>(k)]);
    for (std::int64_t k = n_max - dec; k < n_max; ++k)
        last.add(rep.per_n_max[static_cast<std::size_t>(k)]);
    rep.trend_ratio = first.mean != 0.0 ? last.mean / first.mean
                                        : std::numeric_limits<double>::infinity();
    return rep;
}

} // namespace glwalk
