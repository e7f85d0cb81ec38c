#pragma once

#include <array>
#include <cmath>

#include "lab/util.hpp"

namespace lab {

/// Truncated bivariate Taylor expansion (order 4) in two variables; the
/// arithmetic carries exact partial derivatives through coefficient formulas.
struct Jet2 {
    static constexpr int Ord = 4;
    std::array<std::array<double, Ord + 1>, Ord + 1> c{};  // c[i][j], i+j<=Ord

    Jet2() = default;
    /*implicit*/ Jet2(double v) { c[0][0] = v; }
    static Jet2 var1(double v) {
        Jet2 j(v);
        j.c[1][0] = 1.0;
        return j;
    }
    static Jet2 var2(double v) {
        Jet2 j(v);
        j.c[0][1] = 1.0;
        return j;
    }

    double value() const { return c[0][0]; }
    /// Partial derivative d^{i+j} / dx^i dy^j (with factorials restored).
    double deriv(int i, int j) const {
        double f = 1.0;
        for (int k = 2; k <= i; ++k) f *= k;
        for (int k = 2; k <= j; ++k) f *= k;
        return c[i][j] * f;
    }

    Jet2 operator-() const {
        Jet2 o;
        for (int i = 0; i <= Ord; ++i)
            for (int j = 0; j + i <= Ord; ++j) o.c[i][j] = -c[i][j];
        return o;
    }
    friend Jet2 operator+(const Jet2& a, const Jet2& b) {
        Jet2 o;
        for (int i = 0; i <= Ord; ++i)
            for (int j = 0; j + i <= Ord; ++j) o.c[i][j] = a.c[i][j] + b.c[i][j];
        return o;
    }
    friend Jet2 operator-(const Jet2& a, const Jet2& b) {
        Jet2 o;
        for (int i = 0; i <= Ord; ++i)
            for (int j = 0; j + i <= Ord; ++j) o.c[i][j] = a.c[i][j] - b.c[i][j];
        return o;
    }
    friend Jet2 operator*(const Jet2& a, const Jet2& b) {
        Jet2 o;
        for (int i = 0; i <= Ord; ++i)
            for (int j = 0; j + i <= Ord; ++j) {
                double s = 0.0;
                for (int p = 0; p <= i; ++p)
                    for (int q = 0; q <= j; ++q) s += a.c[p][q] * b.c[i - p][j - q];
                o.c[i][j] = s;
            }
        return o;
    }
    friend Jet2 operator*(double s, const Jet2& a) { return Jet2(s) * a; }
    friend Jet2 operator*(const Jet2& a, double s) { return Jet2(s) * a; }
    friend Jet2 operator+(const Jet2& a, double s) { return a + Jet2(s); }
    friend Jet2 operator+(double s, const Jet2& a) { return a + Jet2(s); }
    friend Jet2 operator-(const Jet2& a, double s) { return a - Jet2(s); }
    friend Jet2 operator-(double s, const Jet2& a) { return Jet2(s) - a; }

    friend Jet2 recip(const Jet2& b) {
        require(std::fabs(b.c[0][0]) > 1e-300, "jet reciprocal at zero");
        Jet2 u = b;
        double b0 = b.c[0][0];
        u.c[0][0] = 0.0;
        Jet2 un = u * (1.0 / b0);
        // 1/b = (1/b0)(1 - u + u^2 - u^3 + u^4), u = (b - b0)/b0
        Jet2 acc(1.0), pw(1.0);
        double sgn = -1.0;
        for (int k = 1; k <= Ord; ++k) {
            pw = pw * un;
            acc = acc + sgn * pw;
            sgn = -sgn;
        }
        return acc * (1.0 / b0);
    }
    friend Jet2 operator/(const Jet2& a, const Jet2& b) { return a * recip(b); }
    friend Jet2 operator/(const Jet2& a, double s) { return a * (1.0 / s); }
    friend Jet2 operator/(double s, const Jet2& b) { return Jet2(s) * recip(b); }

    friend Jet2 compose1(const std::array<double, Ord + 1>& series, const Jet2& g) {
        // series[k] = f^{(k)}(g0)/k!; returns f(g) truncated
        Jet2 dg = g;
        dg.c[0][0] = 0.0;
        Jet2 acc(series[0]), pw(1.0);
        for (int k = 1; k <= Ord; ++k) {
            pw = pw * dg;
            acc = acc + series[k] * pw;
        }
        return acc;
    }
    friend Jet2 sin(const Jet2& g) {
        double s = std::sin(g.c[0][0]), c0 = std::cos(g.c[0][0]);
        return compose1({s, c0, -s / 2, -c0 / 6, s / 24}, g);
    }
    friend Jet2 cos(const Jet2& g) {
        double s = std::sin(g.c[0][0]), c0 = std::cos(g.c[0][0]);
        return compose1({c0, -s, -c0 / 2, s / 6, c0 / 24}, g);
    }
};

inline Jet2 recip_of(const Jet2& j) { return recip(j); }

}  // namespace lab
