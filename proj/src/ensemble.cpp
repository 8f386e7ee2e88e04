#include "glwalk/ensemble.hpp"

#include <algorithm>
#include <cmath>

#include "glwalk/errors.hpp"

namespace glwalk {

const char* family_name(Family f) {
    switch (f) {
        case Family::two_atom: return "two_atom";
        case Family::scalar_gauge: return "scalar_gauge";
        case Family::rot_diag_rot: return "rot_diag_rot";
        case Family::orthogonal_only: return "orthogonal_only";
    }
    return "?";
}

Family family_from_name(const std::string& name) {
    if (name == "two_atom") return Family::two_atom;
    if (name == "scalar_gauge") return Family::scalar_gauge;
    if (name == "rot_diag_rot") return Family::rot_diag_rot;
    if (name == "orthogonal_only") return Family::orthogonal_only;
    throw ConfigError("unknown ensemble family: " + name);
}

double ZLaw::mean() const {
    switch (kind) {
        case Kind::two_point: return p1 * z1 + (1.0 - p1) * z2;
        case Kind::exponential: return 1.0 / rate;
        case Kind::uniform: return 0.5 * (lo + hi);
    }
    return 0.0;
}

double ZLaw::variance() const {
    switch (kind) {
        case Kind::two_point: {
            double m = mean();
            return p1 * (z1 - m) * (z1 - m) + (1.0 - p1) * (z2 - m) * (z2 - m);
        }
        case Kind::exponential: return 1.0 / (rate * rate);
        case Kind::uniform: {
            double w = hi - lo;
            return w * w / 12.0;
        }
    }
    return 0.0;
}

double ZLaw::abs_moment(double p) const {
    switch (kind) {
        case Kind::two_point:
            return p1 * std::pow(std::fabs(z1), p) + (1.0 - p1) * std::pow(std::fabs(z2), p);
        case Kind::exponential:
            return std::tgamma(p + 1.0) / std::pow(rate, p);
        case Kind::uniform: {
            // Simpson quadrature of |z|^p on [lo, hi]; exact enough for diagnostics.
            const int n = 2048;
            double h = (hi - lo) / n;
            double s = std::pow(std::fabs(lo), p) + std::pow(std::fabs(hi), p);
            for (int i = 1; i < n; ++i)
                s += (i % 2 ? 4.0 : 2.0) * std::pow(std::fabs(lo + i * h), p);
            return s * h / 3.0;
        }
    }
    return 0.0;
}

namespace {

// Numeric guard on the heavy-tailed log-singular-value: e^L must stay
// representable through one unrenormalized product. P(L > 600) < 2e-7 even at
// tail index 2.5, so the truncation is far below Monte Carlo resolution.
constexpr double kMaxLogScale = 600.0;

void check_finite(const Mat& m, const char* who) {
    for (int i = 0; i < m.d * m.d; ++i)
        if (!std::isfinite(m.a[static_cast<std::size_t>(i)]))
            throw SingularEnsembleError(std::string(who) + ": non-finite matrix entry");
}

// In-place right-multiplication by the Givens rotation G(i,j,theta).
void apply_givens_columns(Mat& m, int i, int j, double c, double s) {
    for (int r = 0; r < m.d; ++r) {
        double a = m(r, i), b = m(r, j);
        m(r, i) = c * a - s * b;
        m(r, j) = s * a + c * b;
    }
}

// (cos, sin) of a uniform angle without trig calls: a uniform point of the
// unit disk, angle-doubled (Marsaglia). Same law as cos/sin of next_angle().
void uniform_rotation_pair(RngStream& rng, double& c, double& s) {
    for (;;) {
        double u = 2.0 * rng.next_double() - 1.0;
        double v = 2.0 * rng.next_double() - 1.0;
        double q = u * u + v * v;
        if (q > 0.0 && q <= 1.0) {
            c = (u * u - v * v) / q;
            s = 2.0 * u * v / q;
            return;
        }
    }
}

// Haar-like rotation: compose Givens rotations with uniform angles over all
// coordinate pairs.
Mat random_rotation(int d, RngStream& rng) {
    Mat m = Mat::identity(d);
    for (int i = 0; i < d - 1; ++i)
        for (int j = i + 1; j < d; ++j) {
            double c, s;
            uniform_rotation_pair(rng, c, s);
            apply_givens_columns(m, i, j, c, s);
        }
    return m;
}

// Inverse-CDF draw of L >= 0 with P(L > t) = (1+t)^(-a).
double heavy_tail_draw(double a, RngStream& rng) {
    double u = rng.next_double_pos(); // plays the role of the survival probability
    double l = std::exp(-std::log(u) / a) - 1.0;
    return std::min(l, kMaxLogScale);
}

} // namespace

EnsembleSpec EnsembleSpec::two_atom(const Mat& g1, const Mat& g2, double declared_q) {
    EnsembleSpec s;
    s.d = g1.d;
    s.family = Family::two_atom;
    s.declared_q = declared_q;
    s.tail_index = std::numeric_limits<double>::infinity(); // bounded support: all moments
    s.atoms = {g1, g2};
    for (const Mat& g : s.atoms) {
        double sv[kMaxDim];
        singular_values(g, sv);
        if (!(sv[g.d - 1] > 0.0) || sv[0] / sv[g.d - 1] > 1e14)
            throw SingularEnsembleError("two_atom: atom numerically singular");
        s.atom_log_norm.push_back(std::log(sv[0]));
        s.atom_log_inv_norm.push_back(-std::log(sv[g.d - 1]));
    }
    s.validate();
    return s;
}

EnsembleSpec EnsembleSpec::scalar_gauge(int d, const ZLaw& law, double declared_q) {
    EnsembleSpec s;
    s.d = d;
    s.family = Family::scalar_gauge;
    s.declared_q = declared_q;
    s.tail_index = std::numeric_limits<double>::infinity();
    s.z_law = law;
    s.validate();
    return s;
}

EnsembleSpec EnsembleSpec::rot_diag_rot(int d, double tail_index, double declared_q) {
    EnsembleSpec s;
    s.d = d;
    s.family = Family::rot_diag_rot;
    s.tail_index = tail_index;
    s.declared_q = declared_q;
    s.validate();
    return s;
}

EnsembleSpec EnsembleSpec::orthogonal_only(int d) {
    EnsembleSpec s;
    s.d = d;
    s.family = Family::orthogonal_only;
    s.declared_q = std::numeric_limits<double>::infinity();
    s.tail_index = std::numeric_limits<double>::infinity();
    s.validate();
    return s;
}

void EnsembleSpec::validate() const {
    if (d < 2 || d > kMaxDim) throw ConfigError("ensemble: dimension d must be in [2, 8]");
    if (family == Family::two_atom) {
        if (atoms.size() != 2) throw ConfigError("two_atom: exactly two atoms required");
        for (const Mat& g : atoms)
            if (g.d != d) throw ConfigError("two_atom: atom dimension mismatch");
    }
    if (family == Family::rot_diag_rot) {
        if (!(tail_index > 0.0)) throw ConfigError("rot_diag_rot: tail_index must be positive");
        if (!(declared_q < tail_index))
            throw ConfigError("rot_diag_rot: declared_q must satisfy q < tail_index");
    }
    if (!(declared_q >= 1.0)) throw ConfigError("ensemble: declared_q must be >= 1");
}

GroupElement sample(const EnsembleSpec& spec, RngStream& rng) {
    GroupElement g;
    switch (spec.family) {
        case Family::two_atom: {
            std::size_t i = (rng.next_double() < 0.5) ? 0 : 1;
            g.matrix = spec.atoms[i];
            g.log_norm = spec.atom_log_norm[i];
            g.log_inv_norm = spec.atom_log_inv_norm[i];
            break;
        }
        case Family::scalar_gauge: {
            double z = 0.0;
            switch (spec.z_law.kind) {
                case ZLaw::Kind::two_point:
                    z = (rng.next_double() < spec.z_law.p1) ? spec.z_law.z1 : spec.z_law.z2;
                    break;
                case ZLaw::Kind::exponential:
                    z = rng.next_exponential(spec.z_law.rate);
                    break;
                case ZLaw::Kind::uniform:
                    z = spec.z_law.lo + (spec.z_law.hi - spec.z_law.lo) * rng.next_double();
                    break;
            }
            if (spec.d == 2) {
                double e = std::exp(z);
                g.matrix.d = 2;
                g.matrix.a[0] = e;
                g.matrix.a[1] = 0.0;
                g.matrix.a[2] = 0.0;
                g.matrix.a[3] = e;
            } else {
                g.matrix = scale(Mat::identity(spec.d), std::exp(z));
            }
            g.log_norm = z;
            g.log_inv_norm = -z;
            break;
        }
        case Family::rot_diag_rot: {
            if (spec.d == 2) {
                double c1, s1, c2, s2;
                uniform_rotation_pair(rng, c1, s1);
                double l = heavy_tail_draw(spec.tail_index, rng);
                uniform_rotation_pair(rng, c2, s2);
                double r = std::exp(l), ri = 1.0 / r;
                g.matrix.d = 2;
                g.matrix.a[0] = c1 * r * c2 - s1 * ri * s2;
                g.matrix.a[1] = -c1 * r * s2 - s1 * ri * c2;
                g.matrix.a[2] = s1 * r * c2 + c1 * ri * s2;
                g.matrix.a[3] = -s1 * r * s2 + c1 * ri * c2;
                g.log_norm = l;
                g.log_inv_norm = l;
                break;
            }
            Mat r1 = random_rotation(spec.d, rng);
            double l = heavy_tail_draw(spec.tail_index, rng);
            Mat r2 = random_rotation(spec.d, rng);
            Mat diag = Mat::identity(spec.d);
            diag(0, 0) = std::exp(l);
            diag(1, 1) = std::exp(-l);
            g.matrix = r1 * (diag * r2);
            g.log_norm = l;
            g.log_inv_norm = l;
            break;
        }
        case Family::orthogonal_only: {
            if (spec.d == 2) {
                double c, s;
                uniform_rotation_pair(rng, c, s);
                g.matrix.d = 2;
                g.matrix.a[0] = c;
                g.matrix.a[1] = -s;
                g.matrix.a[2] = s;
                g.matrix.a[3] = c;
                g.log_norm = 0.0;
                g.log_inv_norm = 0.0;
                break;
            }
            g.matrix = random_rotation(spec.d, rng);
            g.log_norm = 0.0;
            g.log_inv_norm = 0.0;
            break;
        }
    }
    check_finite(g.matrix, family_name(spec.family));
    return g;
}

MomentEstimate moment_diagnostic(const EnsembleSpec& spec, double p, std::int64_t n_samples,
                                 RngStream& rng) {
    if (!(p >= 1.0)) throw ConfigError("moment_diagnostic: p must be >= 1");
    if (n_samples < 16) n_samples = 16;

    MomentEstimate est;
    est.p = p;
    est.n_samples = n_samples;

    // Prefix means at doubling sample counts, to detect estimates that fail
    // to stabilize (heavy tails with p >= tail index).
    std::vector<double> prefix_means;
    double sum = 0.0, sum_sq = 0.0;
    std::int64_t next_checkpoint = n_samples;
    std::vector<std::int64_t> checkpoints;
    while (next_checkpoint >= 16 && checkpoints.size() < 6) {
        checkpoints.push_back(next_checkpoint);
        next_checkpoint /= 2;
    }
    std::sort(checkpoints.begin(), checkpoints.end());

    std::size_t ci = 0;
    for (std::int64_t i = 1; i <= n_samples; ++i) {
        GroupElement g = sample(spec, rng);
        double v = std::pow(g.log_n(), p);
        sum += v;
        sum_sq += v * v;
        if (ci < checkpoints.size() && i == checkpoints[ci]) {
            prefix_means.push_back(sum / static_cast<double>(i));
            ++ci;
        }
    }

    double n = static_cast<double>(n_samples);
    est.value = sum / n;
    double var = std::max(0.0, sum_sq / n - est.value * est.value);
    est.se = std::sqrt(var / n);

    // Divergent integrals make the prefix mean drift upward geometrically in
    // the sample count; a stable estimate fluctuates around its limit.
    if (prefix_means.size() >= 4) {
        std::size_t k = prefix_means.size();
        bool increasing = true;
        for (std::size_t i = k - 3; i < k; ++i)
            if (prefix_means[i] <= prefix_means[i - 1]) increasing = false;
        double growth = prefix_means[k - 1] / std::max(prefix_means[k - 4], 1e-300);
        est.unstable = increasing && growth > 1.25;
    }
    return est;
}

} // namespace glwalk
