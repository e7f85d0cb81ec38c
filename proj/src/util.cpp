#include "lab/util.hpp"

#include <algorithm>
#include <cmath>

namespace lab {

namespace {

// Binomial coefficient as double (small arguments only).
double binom(int n, int k) {
    double v = 1.0;
    for (int i = 1; i <= k; ++i) v *= double(n - k + i) / double(i);
    return v;
}

}  // namespace

double smoothstep(double x, double x0, double x1, int N) {
    if (x <= x0) return 0.0;
    if (x >= x1) return 1.0;
    double y = (x - x0) / (x1 - x0);
    // S_N(y) = y^{N+1} sum_k C(N+k,k) C(2N+1,N-k) (-y)^k
    double s = 0.0;
    for (int k = 0; k <= N; ++k) {
        s += binom(N + k, k) * binom(2 * N + 1, N - k) * std::pow(-y, k);
    }
    return std::pow(y, N + 1) * s;
}

double smoothstep_deriv(double x, double x0, double x1, int N) {
    if (x <= x0 || x >= x1) return 0.0;
    double w = x1 - x0;
    double y = (x - x0) / w;
    double s = 0.0;
    for (int k = 0; k <= N; ++k) {
        double c = binom(N + k, k) * binom(2 * N + 1, N - k) * std::pow(-1.0, k);
        s += c * (N + 1 + k) * std::pow(y, N + k);
    }
    return s / w;
}

double smoothstep_second(double x, double x0, double x1, int N) {
    if (x <= x0 || x >= x1) return 0.0;
    double w = x1 - x0;
    double y = (x - x0) / w;
    double s = 0.0;
    for (int k = 0; k <= N; ++k) {
        double c = binom(N + k, k) * binom(2 * N + 1, N - k) * std::pow(-1.0, k);
        s += c * (N + 1 + k) * (N + k) * std::pow(y, N + k - 1);
    }
    return s / (w * w);
}

double smooth_transition(double z) {
    auto f = [](double t) { return t > 0.0 ? std::exp(-1.0 / t) : 0.0; };
    double a = f(z), b = f(1.0 - z);
    return a / (a + b);
}

double smooth_transition_deriv(double z) {
    if (z <= 0.0 || z >= 1.0) return 0.0;
    auto f = [](double t) { return std::exp(-1.0 / t); };
    auto fp = [](double t) { return std::exp(-1.0 / t) / (t * t); };
    double a = f(z), b = f(1.0 - z);
    double ap = fp(z), bp = -fp(1.0 - z);
    double den = a + b;
    return (ap * den - a * (ap + bp)) / (den * den);
}

double plateau_taper(double y) {
    double ay = std::fabs(y);
    if (ay <= 0.5) return 1.0;
    if (ay >= 1.0) return 0.0;
    return smooth_transition(2.0 * (1.0 - ay));
}

double bump(double z) {
    if (std::fabs(z) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - z * z));
}

double bump_deriv(double z) {
    if (std::fabs(z) >= 1.0) return 0.0;
    double d = 1.0 - z * z;
    return bump(z) * (-2.0 * z / (d * d));
}

std::uint64_t fnv1a(std::span<const unsigned char> data) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : data) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::uint64_t fnv1a(const std::string& s) {
    return fnv1a(std::span<const unsigned char>(
        reinterpret_cast<const unsigned char*>(s.data()), s.size()));
}

std::vector<double> fd_weights(double x0, std::span<const double> xs, int d) {
    // Fornberg (1988). Weights for derivatives 0..d at x0; we return order d.
    const int n = static_cast<int>(xs.size());
    std::vector<std::vector<double>> c(n, std::vector<double>(d + 1, 0.0));
    double c1 = 1.0;
    double c4 = xs[0] - x0;
    c[0][0] = 1.0;
    for (int i = 1; i < n; ++i) {
        int mn = std::min(i, d);
        double c2 = 1.0;
        double c5 = c4;
        c4 = xs[i] - x0;
        for (int j = 0; j < i; ++j) {
            double c3 = xs[i] - xs[j];
            c2 *= c3;
            if (j == i - 1) {
                for (int k = mn; k >= 1; --k)
                    c[i][k] = c1 * (k * c[i - 1][k - 1] - c5 * c[i - 1][k]) / c2;
                c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
            }
            for (int k = mn; k >= 1; --k)
                c[j][k] = (c4 * c[j][k] - k * c[j][k - 1]) / c3;
            c[j][0] = c4 * c[j][0] / c3;
        }
        c1 = c2;
    }
    std::vector<double> w(n);
    for (int i = 0; i < n; ++i) w[i] = c[i][d];
    return w;
}

namespace {
double simpson(double a, double fa, double b, double fb, double fm) {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
}

double adsimp(const std::function<double(double)>& f, double a, double fa, double b,
              double fb, double m, double fm, double whole, double tol, int depth) {
    double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    double flm = f(lm), frm = f(rm);
    double left = simpson(a, fa, m, fm, flm);
    double right = simpson(m, fm, b, fb, frm);
    if (depth <= 0 || std::fabs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return adsimp(f, a, fa, m, fm, lm, flm, left, 0.5 * tol, depth - 1) +
           adsimp(f, m, fm, b, fb, rm, frm, right, 0.5 * tol, depth - 1);
}
}  // namespace

double adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                        double tol, int max_depth) {
    double m = 0.5 * (a + b);
    double fa = f(a), fb = f(b), fm = f(m);
    double whole = simpson(a, fa, b, fb, fm);
    return adsimp(f, a, fa, b, fb, m, fm, whole, tol, max_depth);
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
    const int n = static_cast<int>(x.size());
    require(n >= 2 && y.size() == x.size(), "fit_line: need >= 2 points");
    double sx = 0, sy = 0;
    for (int i = 0; i < n; ++i) {
        sx += x[i];
        sy += y[i];
    }
    double mx = sx / n, my = sy / n;
    double sxx = 0, sxy = 0;
    for (int i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    require(sxx > 0, "fit_line: degenerate abscissae");
    LineFit out;
    out.slope = sxy / sxx;
    out.intercept = my - out.slope * mx;
    double ss = 0;
    for (int i = 0; i < n; ++i) {
        double r = y[i] - (out.intercept + out.slope * x[i]);
        ss += r * r;
    }
    out.rms_residual = std::sqrt(ss / n);
    out.slope_stderr = (n > 2) ? std::sqrt(ss / (n - 2) / sxx) : 0.0;
    return out;
}

}  // namespace lab
