#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <vector>

namespace glwalk {

inline double normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.70710678118654752440); }

// Online central moments up to order four (Welford-style updates); enough for
// means, variances, and the standard error of a sample variance.
struct RunningStat {
    std::int64_t n = 0;
    double mean = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;

    void add(double x) {
        double n1 = static_cast<double>(n);
        n += 1;
        double nn = static_cast<double>(n);
        double delta = x - mean;
        double delta_n = delta / nn;
        double delta_n2 = delta_n * delta_n;
        double term1 = delta * delta_n * n1;
        mean += delta_n;
        m4 += term1 * delta_n2 * (nn * nn - 3.0 * nn + 3.0) + 6.0 * delta_n2 * m2 - 4.0 * delta_n * m3;
        m3 += term1 * delta_n * (nn - 2.0) - 3.0 * delta_n * m2;
        m2 += term1;
    }

    double variance() const { return n > 1 ? m2 / static_cast<double>(n - 1) : 0.0; }
    double sd() const { return std::sqrt(std::max(0.0, variance())); }
    double se_mean() const { return n > 0 ? sd() / std::sqrt(static_cast<double>(n)) : 0.0; }

    // Standard error of the sample variance: Var(s^2) = (mu4 - (n-3)/(n-1) s^4)/n.
    double se_variance() const {
        if (n < 4) return 0.0;
        double nn = static_cast<double>(n);
        double mu4 = m4 / nn;
        double s2 = variance();
        double v = (mu4 - (nn - 3.0) / (nn - 1.0) * s2 * s2) / nn;
        return std::sqrt(std::max(0.0, v));
    }
};

// Exact Kolmogorov distance between the ECDF of `samples` and a continuous
// CDF: the sup over R is attained at the sample jump points, where both the
// left and right limits of the ECDF must be compared.
inline double ks_to_cdf(std::vector<double> samples, const std::function<double(double)>& cdf) {
    std::sort(samples.begin(), samples.end());
    double n = static_cast<double>(samples.size());
    double d = 0.0;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        double f = cdf(samples[i]);
        double hi = static_cast<double>(i + 1) / n - f;
        double lo = f - static_cast<double>(i) / n;
        d = std::max(d, std::max(hi, lo));
    }
    return d;
}

// Same sup with multiplicity weights on pre-sorted samples (bootstrap reuse).
inline double ks_to_cdf_weighted(const std::vector<double>& sorted, const std::vector<double>& weights,
                                 const std::function<double(double)>& cdf) {
    double total = 0.0;
    for (double w : weights) total += w;
    double cum = 0.0;
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        double f = cdf(sorted[i]);
        d = std::max(d, f - cum / total);
        cum += weights[i];
        d = std::max(d, cum / total - f);
    }
    return d;
}

struct LinFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

inline LinFit ols(const std::vector<double>& x, const std::vector<double>& y) {
    double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
    }
    double mx = sx / n, my = sy / n;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
        syy += (y[i] - my) * (y[i] - my);
    }
    LinFit f;
    f.slope = sxy / sxx;
    f.intercept = my - f.slope * mx;
    f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
    return f;
}

inline double quantile(std::vector<double> v, double q) {
    std::sort(v.begin(), v.end());
    double pos = q * static_cast<double>(v.size() - 1);
    std::size_t lo = static_cast<std::size_t>(pos);
    std::size_t hi = std::min(lo + 1, v.size() - 1);
    double frac = pos - static_cast<double>(lo);
    return v[lo] * (1.0 - frac) + v[hi] * frac;
}

inline double pearson_corr(const std::vector<double>& x, const std::vector<double>& y) {
    LinFit f = ols(x, y);
    double sign = f.slope >= 0.0 ? 1.0 : -1.0;
    return sign * std::sqrt(std::max(0.0, f.r2));
}

struct SlopeFit {
    double slope = 0.0;
    double se = 0.0;
};

// Log-log slope of values vs sizes, with a parametric bootstrap SE built from
// the per-point standard errors (propagated to the log scale).
template <typename Rng>
SlopeFit fit_loglog_slope(const std::vector<double>& sizes, const std::vector<double>& values,
                          const std::vector<double>& ses, int bootstrap, Rng& rng) {
    std::vector<double> lx(sizes.size()), ly(values.size());
    for (std::size_t i = 0; i < sizes.size(); ++i) {
        lx[i] = std::log(sizes[i]);
        ly[i] = std::log(values[i]);
    }
    SlopeFit f;
    f.slope = ols(lx, ly).slope;
    RunningStat bs;
    std::vector<double> yb(ly.size());
    for (int b = 0; b < bootstrap; ++b) {
        for (std::size_t i = 0; i < ly.size(); ++i)
            yb[i] = ly[i] + (ses[i] / values[i]) * rng.next_gaussian();
        bs.add(ols(lx, yb).slope);
    }
    f.se = bs.sd();
    return f;
}

} // namespace glwalk
