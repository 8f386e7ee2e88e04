#include "glwalk/blocking.hpp"

#include <cmath>
#include <string>

#include "glwalk/errors.hpp"
#include "glwalk/stats.hpp"

namespace glwalk {

BlockLayout BlockLayout::make(std::int64_t m, std::int64_t N) {
    if (m < 2) throw ConfigError("BlockLayout: m must be >= 2");
    if (N < 2) throw ConfigError("BlockLayout: N must be >= 2");
    BlockLayout l;
    l.m = m;
    l.N = N;
    l.n = 2 * N * m;
    return l;
}

BlockLayout BlockLayout::from_kappa(std::int64_t n_target, double kappa) {
    if (n_target < 8) throw ConfigError("BlockLayout: n too small");
    if (!(kappa > 0.0)) throw ConfigError("BlockLayout: kappa must be positive");
    std::int64_t N = std::max<std::int64_t>(
        2, static_cast<std::int64_t>(kappa * std::log(static_cast<double>(n_target))));
    std::int64_t m = std::max<std::int64_t>(2, n_target / (2 * N));
    BlockLayout l = make(m, N);
    l.kappa = kappa;
    return l;
}

XkmEvaluator::XkmEvaluator(const EnsembleSpec& spec, const StationarySampler& sampler, int j_nu,
                           double lambda_hat)
    : spec_(&spec), sampler_(&sampler), j_nu_(j_nu), lambda_hat_(lambda_hat) {
    if (j_nu < 1) throw ConfigError("XkmEvaluator: J_nu must be >= 1");
    if (sampler.pool.empty()) throw ConfigError("XkmEvaluator: stationary pool not filled");
}

double XkmEvaluator::eval(std::span<const GroupElement> window, RngStream& pick_rng) const {
    const std::size_t m = window.size();
    double acc = 0.0;
    for (int j = 0; j < j_nu_; ++j) {
        const ProjectivePoint& x0 = sampler_->pool_at(pick_rng.next_u64());
        ProjectivePoint y = x0;
        for (std::size_t t = 0; t + 1 < m; ++t) y = act(window[t], y);
        acc += cocycle(window[m - 1], y);
    }
    return acc / j_nu_ - lambda_hat_;
}

double conditional_expectation_fm(const EnsembleSpec& spec, std::span<const GroupElement> eps,
                                  std::int64_t k, std::int64_t m, const XkmEvaluator& ev, int j_c,
                                  RngStream& rng) {
    if (k <= m) throw ConfigError("conditional_expectation_fm: k must exceed m");
    if (j_c < 1) throw ConfigError("conditional_expectation_fm: J_c must be >= 1");

    std::span<const GroupElement> window = eps.subspan(static_cast<std::size_t>(k - m), // eps_{k-m+1}
                                                       static_cast<std::size_t>(m));
    bool has_non_member = false;
    for (std::int64_t i = k - m + 1; i <= k; ++i)
        if (!fm_member(i, m)) {
            has_non_member = true;
            break;
        }
    // Window entirely inside a member block: nothing to resample.
    if (!has_non_member) return ev.eval(window, rng);

    std::vector<GroupElement> scratch(window.begin(), window.end());
    double acc = 0.0;
    for (int c = 0; c < j_c; ++c) {
        for (std::int64_t i = k - m + 1; i <= k; ++i)
            if (!fm_member(i, m)) scratch[static_cast<std::size_t>(i - (k - m + 1))] = sample(spec, rng);
        acc += ev.eval(scratch, rng);
    }
    return acc / j_c;
}

namespace {

std::vector<GroupElement> materialize_eps(const EnsembleSpec& spec, std::int64_t n, RngStream& rng) {
    std::vector<GroupElement> eps;
    eps.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) eps.push_back(sample(spec, rng));
    return eps;
}

std::span<const GroupElement> window_of(const std::vector<GroupElement>& eps, std::int64_t k,
                                        std::int64_t m) {
    return std::span<const GroupElement>(eps).subspan(static_cast<std::size_t>(k - m),
                                                      static_cast<std::size_t>(m));
}

} // namespace

BlockSample decompose(const EnsembleSpec& spec, const BlockLayout& layout,
                      const StationarySampler& sampler, int j_nu, int j_c, double lambda_hat,
                      RngStream rng, std::int64_t step_budget) {
    const std::int64_t n = layout.n, m = layout.m, N = layout.N;
    if ((n - m) * static_cast<std::int64_t>(j_c) * j_nu * m > step_budget)
        throw BudgetError("decompose: nested Monte Carlo cost exceeds step budget");

    XkmEvaluator ev(spec, sampler, j_nu, lambda_hat);
    RngStream start_rng = rng.child(0, stage::start);
    RngStream eps_rng = rng.child(1, stage::blocking);
    RngStream mc_rng = rng.child(2, stage::blocking);

    ProjectivePoint w0 = stationary_draw(sampler, start_rng);
    std::vector<GroupElement> eps = materialize_eps(spec, n, eps_rng);

    BlockSample bs;
    bs.layout = layout;
    bs.j_nu = j_nu;
    bs.j_c = j_c;
    bs.lambda_hat = lambda_hat;
    bs.u.assign(static_cast<std::size_t>(N), 0.0);
    bs.r.assign(static_cast<std::size_t>(N), 0.0);
    bs.y.assign(static_cast<std::size_t>(N), 0.0);

    // U_1 = sum_{k<=m} X_k with raw increments centered by lambda_hat.
    ProjectivePoint w = w0;
    for (std::int64_t k = 1; k <= m; ++k) {
        StepResult sr = step(eps[static_cast<std::size_t>(k - 1)], w);
        bs.u[0] += sr.increment - lambda_hat;
        w = sr.next;
    }

    // X_{k,m} and C_k = E(X_{k,m}|F_m) once per k; both sides of the identity
    // reuse the same values, so S_{n,m} = S1 + S2 holds up to fp associativity.
    std::vector<double> xkm(static_cast<std::size_t>(n + 1), 0.0);
    std::vector<double> ck(static_cast<std::size_t>(n + 1), 0.0);
    for (std::int64_t k = m + 1; k <= n; ++k) {
        xkm[static_cast<std::size_t>(k)] = ev.eval(window_of(eps, k, m), mc_rng);
        ck[static_cast<std::size_t>(k)] =
            conditional_expectation_fm(spec, eps, k, m, ev, j_c, mc_rng);
    }

    for (std::int64_t j = 2; j <= N; ++j)
        for (std::int64_t k = (2 * j - 2) * m + 1; k <= (2 * j - 1) * m; ++k)
            bs.u[static_cast<std::size_t>(j - 1)] +=
                xkm[static_cast<std::size_t>(k)] - ck[static_cast<std::size_t>(k)];
    for (std::int64_t j = 1; j <= N; ++j)
        for (std::int64_t k = (2 * j - 1) * m + 1; k <= 2 * j * m; ++k)
            bs.r[static_cast<std::size_t>(j - 1)] +=
                xkm[static_cast<std::size_t>(k)] - ck[static_cast<std::size_t>(k)];

    for (std::int64_t j = 0; j < N; ++j) {
        bs.y[static_cast<std::size_t>(j)] =
            bs.u[static_cast<std::size_t>(j)] + bs.r[static_cast<std::size_t>(j)];
        bs.s1 += bs.y[static_cast<std::size_t>(j)];
    }
    for (std::int64_t k = m + 1; k <= n; ++k) bs.s2 += ck[static_cast<std::size_t>(k)];
    bs.s_nm = bs.u[0];
    for (std::int64_t k = m + 1; k <= n; ++k) bs.s_nm += xkm[static_cast<std::size_t>(k)];
    return bs;
}

namespace {

ScalingReport finish_scaling(const std::vector<std::int64_t>& m_grid,
                             const std::vector<RunningStat>& stats, double ceiling,
                             RngStream& rng) {
    ScalingReport rep;
    rep.m_grid = m_grid;
    rep.theory_ceiling = ceiling;
    double vmax = 0.0;
    for (const auto& s : stats) {
        rep.values.push_back(s.mean);
        rep.se.push_back(s.se_mean());
        vmax = std::max(vmax, std::fabs(s.mean));
    }
    if (vmax < 1e-13) {
        rep.degenerate = true;
        return rep;
    }
    std::vector<double> sizes;
    for (std::int64_t m : m_grid) sizes.push_back(static_cast<double>(m));
    SlopeFit f = fit_loglog_slope(sizes, rep.values, rep.se, 400, rng);
    rep.slope = f.slope;
    rep.slope_se = f.se;
    return rep;
}

void check_grid(const std::vector<std::int64_t>& m_grid) {
    if (m_grid.size() < 3) throw InsufficientGridError("scaling: need >= 3 grid points");
    if (m_grid.back() < 8 * m_grid.front())
        throw InsufficientGridError("scaling: m_grid must span a factor >= 8");
}

} // namespace

ScalingReport r1_moment_scaling(const EnsembleSpec& spec, double p,
                                const std::vector<std::int64_t>& m_grid, std::int64_t paths,
                                int j_nu, int j_c, const StationarySampler& sampler,
                                RngStream rng) {
    check_grid(m_grid);
    std::vector<RunningStat> stats(m_grid.size());
    for (std::size_t gi = 0; gi < m_grid.size(); ++gi) {
        std::int64_t m = m_grid[gi];
        XkmEvaluator ev(spec, sampler, j_nu, 0.0); // lambda cancels in X - E(X|F_m)
        for (std::int64_t path = 0; path < paths; ++path) {
            RngStream pr = rng.child(static_cast<std::uint64_t>(path) * 64 + gi, stage::blocking);
            // R_1 needs eps_1..eps_2m only (windows of k in [m+1, 2m]).
            std::vector<GroupElement> eps = materialize_eps(spec, 2 * m, pr);
            double r1 = 0.0;
            for (std::int64_t k = m + 1; k <= 2 * m; ++k) {
                double x = ev.eval(window_of(eps, k, m), pr);
                double c = conditional_expectation_fm(spec, eps, k, m, ev, j_c, pr);
                r1 += x - c;
            }
            stats[gi].add(std::pow(std::fabs(r1), p));
        }
    }
    RngStream brng = rng.child(999, stage::blocking);
    ScalingReport rep = finish_scaling(m_grid, stats, p + 1.0 - spec.declared_q, brng);
    return rep;
}

ScalingReport block_moment_growth(const EnsembleSpec& spec, double q,
                                  const std::vector<std::int64_t>& m_grid, std::int64_t paths,
                                  double lambda_hat, const StationarySampler& sampler,
                                  RngStream rng) {
    check_grid(m_grid);
    std::vector<RunningStat> stats(m_grid.size());
    for (std::size_t gi = 0; gi < m_grid.size(); ++gi) {
        std::int64_t m = m_grid[gi];
        for (std::int64_t path = 0; path < paths; ++path) {
            RngStream pr = rng.child(static_cast<std::uint64_t>(path) * 64 + gi, stage::blocking);
            RngStream sr = pr.child(0, stage::start);
            // By stationarity sum_{k=m+1}^{2m} X_k has the law of the first m
            // increments from a nu-distributed start.
            ProjectivePoint w = stationary_draw(sampler, sr);
            double s = 0.0;
            for (std::int64_t k = 0; k < m; ++k) {
                StepResult st = step(sample(spec, pr), w);
                s += st.increment - lambda_hat;
                w = st.next;
            }
            stats[gi].add(std::pow(std::fabs(s), q));
        }
    }
    RngStream brng = rng.child(999, stage::blocking);
    return finish_scaling(m_grid, stats, q / 2.0, brng);
}

ScalingReport conditional_variance_concentration(const EnsembleSpec& spec,
                                                 const std::vector<std::int64_t>& m_grid,
                                                 int outer, int inner, int j_nu,
                                                 const StationarySampler& sampler, RngStream rng) {
    check_grid(m_grid);
    if (outer < 64) throw ConfigError("conditional_variance_concentration: outer must be >= 64");
    if (inner < 64) throw ConfigError("conditional_variance_concentration: inner must be >= 64");

    ScalingReport rep;
    rep.m_grid = m_grid;
    rep.theory_ceiling = 0.2;

    std::vector<double> sizes, dev_vals, dev_ses;
    XkmEvaluator ev(spec, sampler, j_nu, 0.0); // centering cancels in X - E_m(X)

    for (std::size_t gi = 0; gi < m_grid.size(); ++gi) {
        std::int64_t m = m_grid[gi];
        std::vector<double> v_hat(static_cast<std::size_t>(outer));
        RunningStat noise_var_stat;
        std::vector<GroupElement> eps(static_cast<std::size_t>(2 * m));
        std::vector<double> t_sum(static_cast<std::size_t>(inner));
        for (int o = 0; o < outer; ++o) {
            RngStream orng = rng.child(static_cast<std::uint64_t>(o) * 64 + gi, stage::blocking);
            // Frozen G_m part: eps_1..eps_m (W_0 never enters X_{k,m}).
            for (std::int64_t i = 0; i < m; ++i)
                eps[static_cast<std::size_t>(i)] = sample(spec, orng);
            RunningStat ts;
            for (int r = 0; r < inner; ++r) {
                for (std::int64_t i = m; i < 2 * m; ++i)
                    eps[static_cast<std::size_t>(i)] = sample(spec, orng);
                double t = 0.0;
                for (std::int64_t k = m + 1; k <= 2 * m; ++k)
                    t += ev.eval(std::span<const GroupElement>(eps).subspan(
                                     static_cast<std::size_t>(k - m), static_cast<std::size_t>(m)),
                                 orng);
                t_sum[static_cast<std::size_t>(r)] = t;
                ts.add(t);
            }
            // Unbiased conditional variance of the centered block sum; the
            // centering E_m(X_{k,m}) is the inner mean, so V = Var_r(T).
            v_hat[static_cast<std::size_t>(o)] = ts.variance();
            // Estimator noise: Var(V_hat) ~ Var((T - mean)^2) / inner.
            RunningStat sq;
            for (int r = 0; r < inner; ++r) {
                double c = t_sum[static_cast<std::size_t>(r)] - ts.mean;
                sq.add(c * c);
            }
            noise_var_stat.add(sq.variance() / static_cast<double>(inner));
        }
        double grand = 0.0;
        for (double v : v_hat) grand += v;
        grand /= static_cast<double>(outer);
        RunningStat dev;
        for (double v : v_hat) dev.add(std::fabs(v - grand));
        rep.values.push_back(dev.mean);
        rep.se.push_back(dev.se_mean());
        rep.noise_floor_var.push_back(noise_var_stat.mean);
        rep.noise_floor_sd.push_back(std::sqrt(std::max(0.0, noise_var_stat.mean)));
        sizes.push_back(static_cast<double>(m));
        dev_vals.push_back(dev.mean);
        dev_ses.push_back(dev.se_mean());
    }

    // Degenerate when the measured deviation sits at the Monte Carlo floor
    // (independent-of-the-past families).
    bool all_floor = true;
    for (std::size_t gi = 0; gi < m_grid.size(); ++gi)
        if (rep.values[gi] > 3.0 * rep.noise_floor_sd[gi]) all_floor = false;
    if (all_floor) {
        rep.degenerate = true;
        return rep;
    }
    RngStream brng = rng.child(999, stage::blocking);
    SlopeFit f = fit_loglog_slope(sizes, dev_vals, dev_ses, 400, brng);
    rep.slope = f.slope;
    rep.slope_se = f.se;
    return rep;
}

StructureReport structural_checks(const EnsembleSpec& spec, const BlockLayout& layout,
                                  int replicates_a, int outer_b, int inner_b, int j_nu, int j_c,
                                  double t_value, double lambda_hat,
                                  const StationarySampler& sampler, RngStream rng) {
    const std::int64_t n = layout.n, m = layout.m, N = layout.N;
    XkmEvaluator ev(spec, sampler, j_nu, lambda_hat);
    StructureReport rep;

    // Uncentered block sums: the F_m-conditional centering is constant under a
    // fixed F_m realization, so correlations are unaffected by dropping it.
    auto block_sums = [&](const std::vector<GroupElement>& eps, const ProjectivePoint& w0,
                          RngStream& mc, std::vector<double>& out) {
        out.assign(static_cast<std::size_t>(N), 0.0);
        ProjectivePoint w = w0;
        for (std::int64_t k = 1; k <= m; ++k) {
            StepResult sr = step(eps[static_cast<std::size_t>(k - 1)], w);
            out[0] += sr.increment - lambda_hat;
            w = sr.next;
        }
        for (std::int64_t k = m + 1; k <= n; ++k) {
            std::int64_t j = (k - 1) / (2 * m) + 1; // Y_j covers blocks 2j-1 and 2j
            out[static_cast<std::size_t>(j - 1)] += ev.eval(window_of(eps, k, m), mc);
        }
    };

    // (a) one fixed F_m realization; resample non-members and W_0.
    {
        RngStream fm_rng = rng.child(0, stage::blocking);
        std::vector<GroupElement> eps = materialize_eps(spec, n, fm_rng);
        std::vector<std::vector<double>> ys(static_cast<std::size_t>(N));
        std::vector<double> sums;
        for (int rep_i = 0; rep_i < replicates_a; ++rep_i) {
            RngStream rr = rng.child(static_cast<std::uint64_t>(rep_i) + 1, stage::blocking);
            for (std::int64_t k = 1; k <= n; ++k)
                if (!fm_member(k, m)) eps[static_cast<std::size_t>(k - 1)] = sample(spec, rr);
            RngStream sr = rr.child(0, stage::start);
            ProjectivePoint w0 = stationary_draw(sampler, sr);
            block_sums(eps, w0, rr, sums);
            for (std::int64_t j = 0; j < N; ++j)
                ys[static_cast<std::size_t>(j)].push_back(sums[static_cast<std::size_t>(j)]);
        }
        rep.corr_threshold_blocks = 3.0 / std::sqrt(static_cast<double>(replicates_a));
        for (std::int64_t j = 0; j < N; ++j)
            for (std::int64_t j2 = j + 1; j2 < N; ++j2) {
                double c = pearson_corr(ys[static_cast<std::size_t>(j)],
                                        ys[static_cast<std::size_t>(j2)]);
                rep.max_abs_corr_blocks = std::max(rep.max_abs_corr_blocks, std::fabs(c));
                ++rep.block_pairs;
            }
    }

    // (b)+(c): independent F_m draws; per draw estimate Z_j and phi_j by
    // resampling the non-member blocks inner_b times.
    {
        double root2m = std::sqrt(2.0 * static_cast<double>(m));
        std::vector<std::vector<double>> z(static_cast<std::size_t>(N));
        std::vector<double> ck(static_cast<std::size_t>(n + 1), 0.0);
        std::vector<double> sums;
        for (int o = 0; o < outer_b; ++o) {
            RngStream orng = rng.child(static_cast<std::uint64_t>(o) + 1'000'003, stage::blocking);
            std::vector<GroupElement> eps = materialize_eps(spec, n, orng);
            // C_k once per F_m draw (constant across the inner resamples).
            for (std::int64_t k = m + 1; k <= n; ++k)
                ck[static_cast<std::size_t>(k)] =
                    conditional_expectation_fm(spec, eps, k, m, ev, j_c, orng);
            std::vector<double> c_block(static_cast<std::size_t>(N), 0.0);
            for (std::int64_t k = m + 1; k <= n; ++k) {
                std::int64_t j = (k - 1) / (2 * m) + 1;
                c_block[static_cast<std::size_t>(j - 1)] += ck[static_cast<std::size_t>(k)];
            }
            const double t_grid[4] = {0.0, 0.5 * t_value, t_value, 2.0 * t_value};
            std::vector<RunningStat> zc(static_cast<std::size_t>(N));
            std::vector<RunningStat> phi_re(static_cast<std::size_t>(4 * N)),
                phi_im(static_cast<std::size_t>(4 * N));
            for (int r = 0; r < inner_b; ++r) {
                for (std::int64_t k = 1; k <= n; ++k)
                    if (!fm_member(k, m)) eps[static_cast<std::size_t>(k - 1)] = sample(spec, orng);
                RngStream sr = orng.child(static_cast<std::uint64_t>(r), stage::start);
                ProjectivePoint w0 = stationary_draw(sampler, sr);
                block_sums(eps, w0, orng, sums);
                for (std::int64_t j = 0; j < N; ++j) {
                    double yj = sums[static_cast<std::size_t>(j)] - c_block[static_cast<std::size_t>(j)];
                    zc[static_cast<std::size_t>(j)].add(std::cos(t_value * yj / root2m));
                    for (int ti = 0; ti < 4; ++ti) {
                        double arg = t_grid[ti] * yj / root2m;
                        phi_re[static_cast<std::size_t>(4 * j + ti)].add(std::cos(arg));
                        phi_im[static_cast<std::size_t>(4 * j + ti)].add(std::sin(arg));
                    }
                }
            }
            for (std::int64_t j = 0; j < N; ++j) {
                z[static_cast<std::size_t>(j)].push_back(zc[static_cast<std::size_t>(j)].mean);
                for (int ti = 0; ti < 4; ++ti) {
                    double mod = std::hypot(phi_re[static_cast<std::size_t>(4 * j + ti)].mean,
                                            phi_im[static_cast<std::size_t>(4 * j + ti)].mean);
                    if (ti == 0)
                        rep.phi_at_zero = std::max(rep.phi_at_zero, mod);
                    else
                        rep.phi_max_modulus = std::max(rep.phi_max_modulus, mod);
                }
            }
        }
        rep.corr_threshold_z = 3.0 / std::sqrt(static_cast<double>(outer_b));
        for (std::int64_t j = 0; j < N; ++j)
            for (std::int64_t j2 = j + 1; j2 < N; ++j2) {
                double c = std::fabs(pearson_corr(z[static_cast<std::size_t>(j)],
                                                  z[static_cast<std::size_t>(j2)]));
                if (j2 - j == 1)
                    rep.max_abs_corr_lag1 = std::max(rep.max_abs_corr_lag1, c);
                else
                    rep.max_abs_corr_lag2 = std::max(rep.max_abs_corr_lag2, c);
            }
    }
    return rep;
}

} // namespace glwalk
