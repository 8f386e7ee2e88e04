#pragma once

// Independent oracles for the test suites. Everything here recomputes expected
// values from first principles (exhaustive enumeration, quadrature, direct iid
// simulation) without going through the walk/blocking machinery it checks.

#include <cstdint>
#include <functional>
#include <vector>

#include "glwalk/ensemble.hpp"
#include "glwalk/linalg.hpp"
#include "glwalk/rng.hpp"

namespace glwalk::oracle {

// All 2^n values of log ||eps_n ... eps_1 x|| for the equal-weight two-atom
// measure, by direct matrix-vector products (n small enough that no
// renormalization is needed).
std::vector<double> enumerate_two_atom_log_norms(const Mat& g1, const Mat& g2, int n,
                                                 const Vec& start);

// Exact sup |ECDF(samples) - CDF(atoms)| where `atoms` carries equal weight
// each (the two-step-function Kolmogorov distance, evaluated at all jumps).
double sup_ecdf_vs_atoms(std::vector<double> samples, std::vector<double> atoms);

// E[L^p] for P(L > t) = (1+t)^{-a} via 1-d quadrature of the tail formula
// E[L^p] = int_0^inf p t^{p-1} (1+t)^{-a} dt (piecewise Simpson with an
// analytic tail remainder). Requires p < a.
double heavy_tail_moment_quadrature(double a, double p);

// Same moment in closed form, a * Beta(p+1, a-p); used to cross-check the
// quadrature itself.
double heavy_tail_moment_closed_form(double a, double p);

// Direct iid simulation of sums of Z (no matrix machinery): returns `paths`
// samples of sum_{k<=n} Z_k.
std::vector<double> iid_sum_samples(const ZLaw& law, std::int64_t n, std::int64_t paths,
                                    RngStream rng);

} // namespace glwalk::oracle
