#include "support/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace glwalk::oracle {

std::vector<double> enumerate_two_atom_log_norms(const Mat& g1, const Mat& g2, int n,
                                                 const Vec& start) {
    if (n > 24) throw std::invalid_argument("enumeration oracle: n too large");
    std::vector<double> out;
    out.reserve(1u << n);
    for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
        Vec v = start;
        for (int k = 0; k < n; ++k) {
            const Mat& g = ((mask >> k) & 1u) ? g2 : g1;
            v = g * v;
        }
        double s = 0.0;
        for (int i = 0; i < v.d; ++i) s += v[i] * v[i];
        out.push_back(0.5 * std::log(s));
    }
    return out;
}

double sup_ecdf_vs_atoms(std::vector<double> samples, std::vector<double> atoms) {
    std::sort(samples.begin(), samples.end());
    std::sort(atoms.begin(), atoms.end());
    double ns = static_cast<double>(samples.size());
    double na = static_cast<double>(atoms.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < samples.size() || j < atoms.size()) {
        double x;
        if (j >= atoms.size() || (i < samples.size() && samples[i] <= atoms[j]))
            x = samples[i];
        else
            x = atoms[j];
        while (i < samples.size() && samples[i] <= x) ++i;
        while (j < atoms.size() && atoms[j] <= x) ++j;
        d = std::max(d, std::fabs(static_cast<double>(i) / ns - static_cast<double>(j) / na));
    }
    return d;
}

namespace {

double simpson(const std::function<double(double)>& f, double lo, double hi, int intervals) {
    double h = (hi - lo) / intervals;
    double s = f(lo) + f(hi);
    for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(lo + i * h);
    return s * h / 3.0;
}

} // namespace

double heavy_tail_moment_quadrature(double a, double p) {
    if (!(p < a)) throw std::invalid_argument("heavy_tail_moment: needs p < a");
    auto integrand = [&](double t) { return p * std::pow(t, p - 1.0) * std::pow(1.0 + t, -a); };
    // Piecewise over decades, then the analytic remainder
    // int_T^inf p t^{p-1} (1+t)^{-a} dt ~ p T^{p-a} / (a-p) for large T.
    double total = simpson(integrand, 1e-9, 1.0, 4096);
    double lo = 1.0;
    for (int dec = 0; dec < 8; ++dec) {
        double hi = lo * 10.0;
        total += simpson(integrand, lo, hi, 4096);
        lo = hi;
    }
    total += p * std::pow(lo, p - a) / (a - p);
    return total;
}

double heavy_tail_moment_closed_form(double a, double p) {
    // E[L^p] = a Beta(p+1, a-p) = a Gamma(p+1) Gamma(a-p) / Gamma(a+1).
    return a * std::exp(std::lgamma(p + 1.0) + std::lgamma(a - p) - std::lgamma(a + 1.0));
}

std::vector<double> iid_sum_samples(const ZLaw& law, std::int64_t n, std::int64_t paths,
                                    RngStream rng) {
    // Deliberately re-implements the scalar draws: this oracle must stay
    // independent of the ensemble sampling code it is used to check.
    auto draw = [&](RngStream& r) {
        switch (law.kind) {
            case ZLaw::Kind::two_point:
                return r.next_double() < law.p1 ? law.z1 : law.z2;
            case ZLaw::Kind::exponential:
                return -std::log(r.next_double_pos()) / law.rate;
            case ZLaw::Kind::uniform:
                return law.lo + (law.hi - law.lo) * r.next_double();
        }
        return 0.0;
    };
    std::vector<double> out(static_cast<std::size_t>(paths));
    for (std::int64_t p = 0; p < paths; ++p) {
        RngStream pr = rng.child(static_cast<std::uint64_t>(p), stage::oracle);
        double s = 0.0;
        for (std::int64_t k = 0; k < n; ++k) s += draw(pr);
        out[static_cast<std::size_t>(p)] = s;
    }
    return out;
}

} // namespace glwalk::oracle
