#include "glwalk/depcoef.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "glwalk/errors.hpp"
#include "glwalk/stats.hpp"

namespace glwalk {

const char* pair_strategy_name(PairStrategy s) {
    switch (s) {
        case PairStrategy::nu_pairs: return "nu_pairs";
        case PairStrategy::antipodal: return "antipodal";
        case PairStrategy::pinned: return "pinned";
        case PairStrategy::mixed: return "mixed";
    }
    return "?";
}

PairStrategy pair_strategy_from_name(const std::string& name) {
    if (name == "nu_pairs") return PairStrategy::nu_pairs;
    if (name == "antipodal") return PairStrategy::antipodal;
    if (name == "pinned") return PairStrategy::pinned;
    if (name == "mixed") return PairStrategy::mixed;
    throw ConfigError("unknown pair strategy: " + name);
}

namespace {

// Orthogonal partner of x: a random direction with its x-component removed,
// giving alignment(x, y) = 0.
ProjectivePoint orthogonal_partner(const ProjectivePoint& x, RngStream& rng) {
    int d = x.dim();
    for (int attempt = 0; attempt < 64; ++attempt) {
        Vec r = Vec::zero(d);
        for (int i = 0; i < d; ++i) r[i] = rng.next_gaussian();
        double c = dot(r, x.direction);
        for (int i = 0; i < d; ++i) r[i] -= c * x.direction[i];
        if (max_abs(r) > 1e-8) return ProjectivePoint::from_vector(r);
    }
    throw ConfigError("orthogonal_partner: degenerate draws");
}

} // namespace

DepCoefCurve estimate_delta(const EnsembleSpec& spec, double p,
                            const std::vector<std::int64_t>& k_grid, PairStrategy strategy,
                            std::int64_t replicates, const StationarySampler& sampler,
                            RngStream rng, int pairs,
                            const std::vector<std::pair<ProjectivePoint, ProjectivePoint>>* pinned) {
    if (!(p >= 1.0)) throw ConfigError("estimate_delta: p must be >= 1");
    if (replicates < 100) throw ConfigError("estimate_delta: replicates must be >= 100");
    if (k_grid.empty()) throw ConfigError("estimate_delta: empty k_grid");

    std::vector<std::pair<ProjectivePoint, ProjectivePoint>> pool;
    if (strategy == PairStrategy::pinned) {
        if (!pinned || pinned->empty()) throw ConfigError("estimate_delta: pinned strategy without pairs");
        pool = *pinned;
    } else {
        bool want_nu = strategy == PairStrategy::nu_pairs || strategy == PairStrategy::mixed;
        bool want_anti = strategy == PairStrategy::antipodal || strategy == PairStrategy::mixed;
        for (int i = 0; i < pairs; ++i) {
            RngStream pr = rng.child(static_cast<std::uint64_t>(i), stage::start);
            if (want_nu) {
                ProjectivePoint x = stationary_draw(sampler, pr);
                ProjectivePoint y = stationary_draw(sampler, pr);
                pool.emplace_back(x, y);
            }
            if (want_anti) {
                ProjectivePoint x = stationary_draw(sampler, pr);
                pool.emplace_back(x, orthogonal_partner(x, pr));
            }
        }
    }

    std::int64_t k_max = *std::max_element(k_grid.begin(), k_grid.end());

    // stat[pair][grid index] over replicates of |X_{k,x} - X_{k,y}|^p
    std::vector<std::vector<RunningStat>> stat(pool.size(),
                                               std::vector<RunningStat>(k_grid.size()));

    for (std::size_t pi = 0; pi < pool.size(); ++pi) {
        for (std::int64_t r = 0; r < replicates; ++r) {
            RngStream eps = rng.child(static_cast<std::uint64_t>(r) * 4096 + pi, stage::depcoef);
            ProjectivePoint wx = pool[pi].first;
            ProjectivePoint wy = pool[pi].second;
            std::size_t gi = 0;
            for (std::int64_t k = 1; k <= k_max; ++k) {
                // One draw drives both chains: the coupling is common-randomness
                // by construction, so the two chains' stream positions agree.
                GroupElement g = sample(spec, eps);
                StepResult sx = step(g, wx);
                StepResult sy = step(g, wy);
                if (gi < k_grid.size() && k == k_grid[gi]) {
                    stat[pi][gi].add(std::pow(std::fabs(sx.increment - sy.increment), p));
                    ++gi;
                }
                wx = sx.next;
                wy = sy.next;
            }
        }
    }

    DepCoefCurve curve;
    curve.p = p;
    curve.k_grid = k_grid;
    curve.pair_count = static_cast<std::int64_t>(pool.size());
    curve.replicates = replicates;
    curve.strategy = strategy;
    curve.values.resize(k_grid.size());
    curve.se.resize(k_grid.size());

    for (std::size_t gi = 0; gi < k_grid.size(); ++gi) {
        // Fixed merge order: mean over replicates first, then max over pairs.
        std::size_t arg = 0;
        double best = -1.0;
        for (std::size_t pi = 0; pi < pool.size(); ++pi) {
            if (stat[pi][gi].mean > best) {
                best = stat[pi][gi].mean;
                arg = pi;
            }
        }
        double m = std::max(best, 0.0);
        double se_m = stat[arg][gi].se_mean();
        curve.values[gi] = std::pow(m, 1.0 / p);
        // Delta method for m^(1/p); zero-mean pairs contribute exactly 0.
        curve.se[gi] = m > 0.0 ? se_m * std::pow(m, 1.0 / p - 1.0) / p : 0.0;
    }
    return curve;
}

DecayReport decay_check(const DepCoefCurve& curve, double q, double flag_factor, int bootstrap,
                        std::uint64_t bootstrap_seed) {
    const auto& ks = curve.k_grid;
    if (ks.size() < 4) throw InsufficientGridError("decay_check: need >= 4 grid points");
    double span = static_cast<double>(ks.back()) / static_cast<double>(ks.front());
    if (span < 8.0) throw InsufficientGridError("decay_check: k_grid must span a factor >= 8");

    DecayReport rep;
    rep.q = q;
    rep.p = curve.p;

    double vmax = 0.0;
    for (double v : curve.values) vmax = std::max(vmax, v);
    if (vmax < 1e-14) {
        rep.degenerate = true;
        return rep;
    }

    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < ks.size(); ++i) {
        if (curve.values[i] <= 0.0) continue;
        lx.push_back(std::log(static_cast<double>(ks[i])));
        ly.push_back(std::log(curve.values[i]));
    }
    if (lx.size() < 4) throw InsufficientGridError("decay_check: too few positive values");
    rep.slope = ols(lx, ly).slope;

    // Parametric bootstrap on the log scale using the per-point SEs.
    RngStream brng(bootstrap_seed);
    RunningStat bs;
    for (int b = 0; b < bootstrap; ++b) {
        std::vector<double> yb(ly.size());
        std::size_t j = 0;
        for (std::size_t i = 0; i < ks.size(); ++i) {
            if (curve.values[i] <= 0.0) continue;
            double rel = curve.se[i] / curve.values[i];
            yb[j] = ly[j] + rel * brng.next_gaussian();
            ++j;
        }
        bs.add(ols(lx, yb).slope);
    }
    rep.slope_se = bs.sd();

    // Bounded-ratio check of k^{q/p-1} delta(k) over the upper half of the grid.
    double expo = q / curve.p - 1.0;
    std::vector<double> r;
    for (std::size_t i = ks.size() / 2; i < ks.size(); ++i)
        r.push_back(std::pow(static_cast<double>(ks[i]), expo) * curve.values[i]);
    double rmin = *std::min_element(r.begin(), r.end());
    double rmax = *std::max_element(r.begin(), r.end());
    rep.ratio = rmin > 0.0 ? rmax / rmin : std::numeric_limits<double>::infinity();
    bool monotone_up = true;
    for (std::size_t i = 1; i < r.size(); ++i)
        if (r[i] <= r[i - 1]) monotone_up = false;
    rep.flagged = monotone_up && rep.ratio > flag_factor;
    return rep;
}

} // namespace glwalk
