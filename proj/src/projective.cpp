#include "glwalk/projective.hpp"

#include <algorithm>
#include <cmath>

#include "glwalk/errors.hpp"

namespace glwalk {

namespace {

constexpr double kSignThreshold = 1e-14;

void canonicalize(Vec& v) {
    for (int i = 0; i < v.d; ++i) {
        double c = v[i];
        if (std::fabs(c) > kSignThreshold) {
            if (c < 0.0)
                for (int j = 0; j < v.d; ++j) v[j] = -v[j];
            return;
        }
    }
}

// Normalize in a scale-safe way; returns log of the original norm.
double normalize_scaled(Vec& v) {
    double m = max_abs(v);
    double s = 0.0;
    for (int i = 0; i < v.d; ++i) {
        v[i] /= m;
        s += v[i] * v[i];
    }
    double nrm = std::sqrt(s);
    for (int i = 0; i < v.d; ++i) v[i] /= nrm;
    return std::log(m) + std::log(nrm);
}

} // namespace

ProjectivePoint ProjectivePoint::from_vector(const Vec& v) {
    ProjectivePoint p;
    p.direction = v;
    if (max_abs(v) == 0.0) throw ConfigError("ProjectivePoint: zero vector");
    normalize_scaled(p.direction);
    canonicalize(p.direction);
    return p;
}

ProjectivePoint act(const Mat& m, const ProjectivePoint& x) {
    ProjectivePoint p;
    p.direction = m * x.direction;
    normalize_scaled(p.direction);
    canonicalize(p.direction);
    return p;
}

ProjectivePoint act(const GroupElement& g, const ProjectivePoint& x) { return act(g.matrix, x); }

double cocycle(const Mat& m, const ProjectivePoint& x) { return log_norm2(m * x.direction); }

double cocycle(const GroupElement& g, const ProjectivePoint& x) { return cocycle(g.matrix, x); }

StepResult step(const GroupElement& g, const ProjectivePoint& x) {
    StepResult r;
    r.next.direction = g.matrix * x.direction;
    r.increment = normalize_scaled(r.next.direction);
    canonicalize(r.next.direction);
    return r;
}

double alignment(const ProjectivePoint& u, const ProjectivePoint& v) {
    double a = std::fabs(dot(u.direction, v.direction));
    return std::min(a, 1.0);
}

StationarySampler StationarySampler::make(const EnsembleSpec& spec, int burn_in) {
    if (burn_in < 1) throw ConfigError("StationarySampler: burn_in must be >= 1");
    StationarySampler s;
    s.spec = spec;
    s.burn_in = burn_in;
    return s;
}

void StationarySampler::fill_pool(int size, RngStream rng) {
    pool.clear();
    pool.reserve(static_cast<std::size_t>(size));
    for (int i = 0; i < size; ++i) {
        RngStream child = rng.child(static_cast<std::uint64_t>(i), stage::pool);
        pool.push_back(stationary_draw(*this, child));
    }
}

ProjectivePoint stationary_draw(const StationarySampler& s, RngStream& rng) {
    ProjectivePoint w = ProjectivePoint::basis(s.spec.d, 0);
    for (int k = 0; k < s.burn_in; ++k) {
        GroupElement g = sample(s.spec, rng);
        w = act(g, w);
    }
    return w;
}

double two_sample_ks(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    double na = static_cast<double>(a.size());
    double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

InvarianceTest invariance_self_test(const StationarySampler& s, int draws, RngStream rng) {
    // Project onto the scalar alignment(W, r) against a fixed random reference
    // direction r; compare W ~ nu_hat against the one-step pushforward eps.W.
    RngStream ref_rng = rng.child(0, stage::start);
    ProjectivePoint ref = stationary_draw(s, ref_rng);

    std::vector<double> base, pushed;
    base.reserve(static_cast<std::size_t>(draws));
    pushed.reserve(static_cast<std::size_t>(draws));
    for (int i = 0; i < draws; ++i) {
        RngStream ri = rng.child(static_cast<std::uint64_t>(i) + 1, stage::start);
        ProjectivePoint w = stationary_draw(s, ri);
        base.push_back(alignment(w, ref));
        GroupElement g = sample(s.spec, ri);
        pushed.push_back(alignment(act(g, w), ref));
    }
    InvarianceTest t;
    t.ks = two_sample_ks(base, pushed);
    double n = static_cast<double>(draws);
    t.threshold = 1.358 * std::sqrt(2.0 / n);
    return t;
}

} // namespace glwalk
