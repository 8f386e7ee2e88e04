#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "glwalk/linalg.hpp"
#include "glwalk/rng.hpp"

namespace glwalk {

// Generator families for the driving measure mu on GL_d(R).
//
//   two_atom        mu = (delta_g1 + delta_g2)/2 with user atoms; admits exact
//                   enumeration oracles. Strong irreducibility / proximality
//                   hold for generic contracting atoms (documented, not
//                   detected).
//   scalar_gauge    g = e^Z * Id. NOT irreducible: the walk reduces to an iid
//                   scalar sum, giving closed-form oracles.
//   rot_diag_rot    g = R1 * diag(e^L, e^-L, 1, ...) * R2 with uniform-angle
//                   Givens rotations and L >= 0 heavy-tailed,
//                   P(L > t) = (1+t)^-a. log N(g) = L, so moments of order p
//                   exist iff p < a. Strongly irreducible via the rotations,
//                   proximal via the gapped diagonal.
//   orthogonal_only degenerate control family, N(g) = 1 for every draw.
enum class Family { two_atom, scalar_gauge, rot_diag_rot, orthogonal_only };

const char* family_name(Family f);
Family family_from_name(const std::string& name);

// Scalar law for the scalar_gauge exponent Z.
struct ZLaw {
    enum class Kind { two_point, exponential, uniform } kind = Kind::two_point;
    // two_point: P(Z = z1) = p1, P(Z = z2) = 1 - p1.
    double z1 = 1.0, z2 = -1.0, p1 = 0.5;
    // exponential: Z = Exp(rate) >= 0.
    double rate = 1.0;
    // uniform on [lo, hi].
    double lo = 0.0, hi = 1.0;

    double mean() const;
    double variance() const;
    double abs_moment(double p) const; // E |Z|^p (quadrature for uniform/exponential)
};

struct EnsembleSpec {
    int d = 2;
    Family family = Family::rot_diag_rot;
    double tail_index = 4.5; // a: moments of order p exist iff p < a (heavy-tailed families)
    double declared_q = 2.5; // moment order the caller relies on
    ZLaw z_law;              // scalar_gauge only

    // two_atom only: atoms plus their exact log norms, fixed at construction.
    std::vector<Mat> atoms;
    std::vector<double> atom_log_norm;
    std::vector<double> atom_log_inv_norm;

    static EnsembleSpec two_atom(const Mat& g1, const Mat& g2, double declared_q = 2.0);
    static EnsembleSpec scalar_gauge(int d, const ZLaw& law, double declared_q = 2.0);
    static EnsembleSpec rot_diag_rot(int d, double tail_index, double declared_q);
    static EnsembleSpec orthogonal_only(int d);

    void validate() const; // throws ConfigError / SingularEnsembleError
};

// A sampled group element with cached norms. For every family the norms are
// known exactly from the construction (isometries have unit norm, the
// rot_diag_rot factorization exposes its singular values), so the cache is
// not a numerical estimate.
struct GroupElement {
    Mat matrix;
    double log_norm = 0.0;     // log ||g||   (operator 2-norm)
    double log_inv_norm = 0.0; // log ||g^-1||

    double log_n() const { return std::max(log_norm, log_inv_norm); } // log N(g)
};

// Draw one element of mu. Deterministic given the stream state; the number of
// raw draws consumed per sample is fixed per family.
GroupElement sample(const EnsembleSpec& spec, RngStream& rng);

struct MomentEstimate {
    double value = 0.0;
    double se = 0.0;
    double p = 0.0;
    std::int64_t n_samples = 0;
    bool unstable = false; // suspected divergent integral (p >= tail index)
};

// Monte Carlo estimate of int (log N(g))^p dmu. Never throws: divergence is
// reported through the stability flag, detected by comparing estimates across
// doubling sample prefixes.
MomentEstimate moment_diagnostic(const EnsembleSpec& spec, double p, std::int64_t n_samples,
                                 RngStream& rng);

} // namespace glwalk
