#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lab {

using cdouble = std::complex<double>;

/// Uniform radial grid on [a, b] with n nodes (endpoints included).
struct Grid {
    double a = 0.0;
    double b = 1.0;
    int n = 2;

    double h() const { return (b - a) / (n - 1); }
    double r(int i) const { return a + i * h(); }
    /// Index of the node nearest to x.
    int nearest(double x) const {
        int i = static_cast<int>(std::lround((x - a) / h()));
        if (i < 0) i = 0;
        if (i >= n) i = n - 1;
        return i;
    }
    bool contains(double x) const { return x >= a && x <= b; }
    std::vector<double> nodes() const {
        std::vector<double> v(n);
        for (int i = 0; i < n; ++i) v[i] = r(i);
        return v;
    }
};

/// Polynomial smoothstep of order 2N+1 rescaled to [x0, x1]:
/// 0 for x <= x0, 1 for x >= x1, C^N at the joins.
double smoothstep(double x, double x0, double x1, int N);
/// Derivative of smoothstep with respect to x.
double smoothstep_deriv(double x, double x0, double x1, int N);
double smoothstep_second(double x, double x0, double x1, int N);

/// C-infinity transition: 0 for z <= 0, 1 for z >= 1, built from exp(-1/z).
double smooth_transition(double z);
double smooth_transition_deriv(double z);

/// C-infinity plateau taper on [-1, 1]: identically 1 for |y| <= 1/2,
/// identically 0 for |y| >= 1, exponential shoulders in between.
double plateau_taper(double y);

/// Compactly supported bump: exp(1 - 1/(1-z^2)) on |z| < 1, else 0.
double bump(double z);
double bump_deriv(double z);

/// FNV-1a 64-bit hash (used for config/output fingerprints).
std::uint64_t fnv1a(std::span<const unsigned char> data);
std::uint64_t fnv1a(const std::string& s);

/// Finite-difference weights for the d-th derivative at x0 given nodes xs
/// (Fornberg's algorithm).
std::vector<double> fd_weights(double x0, std::span<const double> xs, int d);

/// Simple adaptive Simpson quadrature.
double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth = 48);

/// Least-squares line fit y = c0 + c1 x; returns {c0, c1, stderr_of_c1, rms_residual}.
struct LineFit {
    double intercept = 0.0;
    double slope = 0.0;
    double slope_stderr = 0.0;
    double rms_residual = 0.0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

inline void require(bool cond, const std::string& msg) {
    if (!cond) throw std::runtime_error(msg);
}

}  // namespace lab
