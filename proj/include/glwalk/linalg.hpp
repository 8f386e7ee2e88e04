#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <limits>

namespace glwalk {

// Dimensions are tiny (projective-space walks at desk scale), so matrices and
// vectors live on the stack with a runtime dimension d <= kMaxDim.
inline constexpr int kMaxDim = 8;

// Default construction leaves entries uninitialized on purpose: the hot walk
// loop creates short-lived values it fully overwrites. Use zero()/identity()
// when a blank matrix is meant.
struct Vec {
    int d = 0;
    std::array<double, kMaxDim> a;

    double& operator[](int i) noexcept { return a[static_cast<std::size_t>(i)]; }
    double operator[](int i) const noexcept { return a[static_cast<std::size_t>(i)]; }

    static Vec zero(int d) {
        Vec v;
        v.d = d;
        v.a.fill(0.0);
        return v;
    }
    static Vec basis(int d, int i) {
        Vec v = zero(d);
        v[i] = 1.0;
        return v;
    }
};

struct Mat {
    int d = 0;
    std::array<double, kMaxDim * kMaxDim> a;

    double& operator()(int i, int j) noexcept { return a[static_cast<std::size_t>(i * d + j)]; }
    double operator()(int i, int j) const noexcept { return a[static_cast<std::size_t>(i * d + j)]; }

    static Mat zero(int d) {
        Mat m;
        m.d = d;
        m.a.fill(0.0);
        return m;
    }
    static Mat identity(int d) {
        Mat m = zero(d);
        for (int i = 0; i < d; ++i) m(i, i) = 1.0;
        return m;
    }
};

inline Mat operator*(const Mat& x, const Mat& y) {
    Mat r;
    r.d = x.d;
    if (x.d == 2) {
        r.a[0] = x.a[0] * y.a[0] + x.a[1] * y.a[2];
        r.a[1] = x.a[0] * y.a[1] + x.a[1] * y.a[3];
        r.a[2] = x.a[2] * y.a[0] + x.a[3] * y.a[2];
        r.a[3] = x.a[2] * y.a[1] + x.a[3] * y.a[3];
        return r;
    }
    for (int i = 0; i < x.d; ++i)
        for (int j = 0; j < x.d; ++j) {
            double s = 0.0;
            for (int k = 0; k < x.d; ++k) s += x(i, k) * y(k, j);
            r(i, j) = s;
        }
    return r;
}

inline Vec operator*(const Mat& m, const Vec& v) {
    Vec r;
    r.d = m.d;
    if (m.d == 2) {
        r.a[0] = m.a[0] * v.a[0] + m.a[1] * v.a[1];
        r.a[1] = m.a[2] * v.a[0] + m.a[3] * v.a[1];
        return r;
    }
    for (int i = 0; i < m.d; ++i) {
        double s = 0.0;
        for (int j = 0; j < m.d; ++j) s += m(i, j) * v[j];
        r[i] = s;
    }
    return r;
}

inline Mat scale(const Mat& m, double c) {
    Mat r = m;
    for (int i = 0; i < m.d * m.d; ++i) r.a[static_cast<std::size_t>(i)] *= c;
    return r;
}

inline double dot(const Vec& x, const Vec& y) {
    double s = 0.0;
    for (int i = 0; i < x.d; ++i) s += x[i] * y[i];
    return s;
}

inline double max_abs(const Vec& v) {
    double m = 0.0;
    for (int i = 0; i < v.d; ++i) m = std::max(m, std::fabs(v[i]));
    return m;
}

// log(||v||_2) computed with the largest component factored out, so the result
// is finite whenever the components are (entries can reach e^600 for
// heavy-tailed ensembles before any renormalization step).
inline double log_norm2(const Vec& v) {
    double m = max_abs(v);
    if (m == 0.0) return -std::numeric_limits<double>::infinity();
    double s = 0.0;
    for (int i = 0; i < v.d; ++i) {
        double t = v[i] / m;
        s += t * t;
    }
    return std::log(m) + 0.5 * std::log(s);
}

inline double norm2(const Vec& v) { return std::exp(log_norm2(v)); }

// Singular values in decreasing order.
//
// d = 2 uses the closed form; larger d uses one-sided Jacobi (orthogonalize
// column pairs until all inner products vanish), which preserves the relative
// accuracy of small singular values.
inline void singular_values(const Mat& m, double* sv) {
    const int d = m.d;
    if (d == 2) {
        double e = 0.5 * (m(0, 0) + m(1, 1));
        double f = 0.5 * (m(0, 0) - m(1, 1));
        double g = 0.5 * (m(1, 0) + m(0, 1));
        double h = 0.5 * (m(1, 0) - m(0, 1));
        double q = std::hypot(e, h);
        double r = std::hypot(f, g);
        sv[0] = q + r;
        sv[1] = std::fabs(q - r);
        return;
    }
    // Columns of a working copy; rotate pairs (p,q) to zero their inner product.
    Mat w = m;
    for (int sweep = 0; sweep < 60; ++sweep) {
        double off = 0.0;
        for (int p = 0; p < d - 1; ++p) {
            for (int q = p + 1; q < d; ++q) {
                double app = 0.0, aqq = 0.0, apq = 0.0;
                for (int i = 0; i < d; ++i) {
                    app += w(i, p) * w(i, p);
                    aqq += w(i, q) * w(i, q);
                    apq += w(i, p) * w(i, q);
                }
                off = std::max(off, std::fabs(apq) / (std::sqrt(app * aqq) + 1e-300));
                if (std::fabs(apq) < 1e-30 * std::sqrt(app * aqq) + 1e-300) continue;
                double tau = (aqq - app) / (2.0 * apq);
                double t = (tau >= 0 ? 1.0 : -1.0) / (std::fabs(tau) + std::sqrt(1.0 + tau * tau));
                double c = 1.0 / std::sqrt(1.0 + t * t);
                double s = c * t;
                for (int i = 0; i < d; ++i) {
                    double wip = w(i, p), wiq = w(i, q);
                    w(i, p) = c * wip - s * wiq;
                    w(i, q) = s * wip + c * wiq;
                }
            }
        }
        if (off < 1e-15) break;
    }
    for (int j = 0; j < d; ++j) {
        double s = 0.0;
        for (int i = 0; i < d; ++i) s += w(i, j) * w(i, j);
        sv[j] = std::sqrt(s);
    }
    std::sort(sv, sv + d, [](double x, double y) { return x > y; });
}

// Operator 2-norm ||m|| = sigma_max.
inline double operator_norm(const Mat& m) {
    double sv[kMaxDim];
    singular_values(m, sv);
    return sv[0];
}

// Smallest singular value; ||m^{-1}|| = 1 / sigma_min for invertible m.
inline double min_singular_value(const Mat& m) {
    double sv[kMaxDim];
    singular_values(m, sv);
    return sv[m.d - 1];
}

// Spectral radius rho(m) = max |eigenvalue|.
//
// d = 2 has the closed form via trace/determinant; otherwise a complex QR
// iteration (Hessenberg reduction, Wilkinson shifts, deflation) brings the
// matrix to triangular form and the diagonal carries the eigenvalues.
inline double spectral_radius(const Mat& m) {
    const int d = m.d;
    if (d == 2) {
        double tr = m(0, 0) + m(1, 1);
        double det = m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
        double disc = 0.25 * tr * tr - det;
        if (disc >= 0.0) {
            double rt = std::sqrt(disc);
            return std::max(std::fabs(0.5 * tr + rt), std::fabs(0.5 * tr - rt));
        }
        return std::sqrt(det); // complex pair: |lambda|^2 = det
    }

    using cplx = std::complex<double>;
    std::array<cplx, kMaxDim * kMaxDim> hbuf{};
    auto H = [&](int i, int j) -> cplx& { return hbuf[static_cast<std::size_t>(i * d + j)]; };
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j) H(i, j) = m(i, j);

    // Complex Givens G with G^H (x y)^T = (r 0)^T; returns (c real, s).
    auto givens = [](cplx x, cplx y, double& c, cplx& s) {
        double nx = std::abs(x), ny = std::abs(y);
        double r = std::hypot(nx, ny);
        if (r < 1e-300) {
            c = 1.0;
            s = 0.0;
        } else if (nx < 1e-300) {
            c = 0.0;
            s = std::conj(y) / ny;
        } else {
            c = nx / r;
            s = (x / nx) * std::conj(y) / r;
        }
    };
    auto rotate = [&](int k, double c, cplx s) {
        for (int j = 0; j < d; ++j) { // rows k, k+1
            cplx a = H(k, j), b = H(k + 1, j);
            H(k, j) = c * a + s * b;
            H(k + 1, j) = -std::conj(s) * a + c * b;
        }
        for (int i = 0; i < d; ++i) { // columns k, k+1 (similarity)
            cplx a = H(i, k), b = H(i, k + 1);
            H(i, k) = c * a + std::conj(s) * b;
            H(i, k + 1) = -s * a + c * b;
        }
    };

    // Hessenberg reduction by Givens similarities.
    for (int j = 0; j + 2 < d; ++j)
        for (int i = j + 2; i < d; ++i) {
            if (std::abs(H(i, j)) == 0.0) continue;
            double c;
            cplx s;
            givens(H(j + 1, j), H(i, j), c, s);
            // rows j+1, i and columns j+1, i
            for (int jj = 0; jj < d; ++jj) {
                cplx a = H(j + 1, jj), b = H(i, jj);
                H(j + 1, jj) = c * a + s * b;
                H(i, jj) = -std::conj(s) * a + c * b;
            }
            for (int ii = 0; ii < d; ++ii) {
                cplx a = H(ii, j + 1), b = H(ii, i);
                H(ii, j + 1) = c * a + std::conj(s) * b;
                H(ii, i) = -s * a + c * b;
            }
        }

    const double eps = 1e-15;
    int hi = d - 1;
    int iters = 0;
    while (hi > 0 && iters++ < 100 * d) {
        // Deflate converged trailing eigenvalues.
        if (std::abs(H(hi, hi - 1)) <= eps * (std::abs(H(hi - 1, hi - 1)) + std::abs(H(hi, hi)))) {
            H(hi, hi - 1) = 0.0;
            --hi;
            continue;
        }
        int lo = hi;
        while (lo > 0 &&
               std::abs(H(lo, lo - 1)) > eps * (std::abs(H(lo - 1, lo - 1)) + std::abs(H(lo, lo))))
            --lo;
        // Wilkinson shift from the trailing 2x2 of the active block.
        cplx a = H(hi - 1, hi - 1), b = H(hi - 1, hi), c2 = H(hi, hi - 1), dd = H(hi, hi);
        cplx tr = a + dd;
        cplx det = a * dd - b * c2;
        cplx disc = std::sqrt(tr * tr - 4.0 * det);
        cplx mu1 = 0.5 * (tr + disc), mu2 = 0.5 * (tr - disc);
        cplx mu = std::abs(mu1 - dd) < std::abs(mu2 - dd) ? mu1 : mu2;
        if (iters % 16 == 0) mu += std::abs(H(hi, hi - 1)); // exceptional shift on stall

        cplx x = H(lo, lo) - mu;
        cplx y = H(lo + 1, lo);
        for (int k = lo; k < hi; ++k) {
            double c;
            cplx s;
            givens(x, y, c, s);
            rotate(k, c, s);
            if (k + 1 < hi) {
                x = H(k + 1, k);
                y = H(k + 2, k);
            }
        }
    }
    double rho = 0.0;
    for (int i = 0; i < d; ++i) rho = std::max(rho, std::abs(H(i, i)));
    return rho;
}

inline double determinant(const Mat& m) {
    // LU with partial pivoting; d is tiny.
    Mat w = m;
    const int d = m.d;
    double det = 1.0;
    for (int k = 0; k < d; ++k) {
        int piv = k;
        for (int i = k + 1; i < d; ++i)
            if (std::fabs(w(i, k)) > std::fabs(w(piv, k))) piv = i;
        if (w(piv, k) == 0.0) return 0.0;
        if (piv != k) {
            for (int j = 0; j < d; ++j) std::swap(w(k, j), w(piv, j));
            det = -det;
        }
        det *= w(k, k);
        for (int i = k + 1; i < d; ++i) {
            double f = w(i, k) / w(k, k);
            for (int j = k; j < d; ++j) w(i, j) -= f * w(k, j);
        }
    }
    return det;
}

} // namespace glwalk
