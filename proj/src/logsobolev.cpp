#include "lab/logsobolev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace lab {

std::string NormSpec::label() const {
    if (!id.empty()) return id;
    char buf[96];
    std::snprintf(buf, sizeof buf, "H[s=%g,l=%g,r=%g,j=%g]", s, l, wr, wj);
    return buf;
}

double xtilde(double x) {
    if (x <= 0.25) return x;
    if (x >= 0.5) return 0.5;
    // monotone quintic bridge matching value/slope/curvature at both ends
    double y = (x - 0.25) / 0.25;
    // Hermite quintic: p(0)=0.25, p'(0)=0.25 (in y), p''(0)=0; p(1)=0.5, p'=p''=0.
    double y2 = y * y, y3 = y2 * y, y4 = y3 * y, y5 = y4 * y;
    double h00 = 1 - 10 * y3 + 15 * y4 - 6 * y5;
    double h10 = y - 6 * y3 + 8 * y4 - 3 * y5;
    double h01 = 10 * y3 - 15 * y4 + 6 * y5;
    return 0.25 * h00 + 0.25 * h10 + 0.5 * h01;
}

double weight_factor(const NormSpec& spec, double t) {
    if (spec.wr == 0.0 && spec.wj == 0.0) return 1.0;
    double x = std::exp(-t);
    double lx = std::log(1.0 / xtilde(x));
    return std::exp(spec.wr * t) * std::pow(lx, spec.wj);
}

double log_sobolev_norm(std::span<const cdouble> u, double h, const NormSpec& spec,
                        double t) {
    const int m = static_cast<int>(u.size());
    require(m >= 64, "log_sobolev_norm: window too small (need >= 64 nodes)");
    // taper
    std::vector<cdouble> v(m);
    for (int i = 0; i < m; ++i) {
        double y = -1.0 + 2.0 * i / (m - 1);
        v[i] = u[i] * plateau_taper(y);
    }
    // direct DFT; frequencies 2 pi k / (m h), k = -m/2 .. m/2-1
    const double L = m * h;
    const double two_pi = 2.0 * std::numbers::pi;
    double acc = 0.0;
    const int k_lo = -(m / 2), k_hi = (m - 1) / 2;
    for (int k = k_lo; k <= k_hi; ++k) {
        cdouble sum = 0.0;
        const double phase0 = -two_pi * k / m;
        // exp(-i xi r_j) with r_j = j h: exp(-i 2pi k j / m)
        double c = std::cos(phase0), s = std::sin(phase0);
        cdouble rot(c, s), cur(1.0, 0.0);
        for (int j = 0; j < m; ++j) {
            sum += v[j] * cur;
            cur *= rot;
        }
        sum *= h;
        double xi = two_pi * k / L;
        double jap = std::sqrt(1.0 + xi * xi);
        double logjap = std::log(jap);
        double wgt = std::pow(jap, 2.0 * spec.s) *
                     std::pow(1.0 + logjap * logjap, spec.l);
        acc += wgt * std::norm(sum);
    }
    double dxi = two_pi / L;
    double norm2 = acc * dxi / two_pi;
    return weight_factor(spec, t) * std::sqrt(norm2);
}

double windowed_norm(std::span<const cdouble> field, const Grid& grid,
                     const NormSpec& spec, double t) {
    require(spec.window_hi > spec.window_lo, "windowed_norm: empty window");
    require(grid.contains(spec.window_lo) && grid.contains(spec.window_hi),
            "windowed_norm: window straddles the grid boundary");
    int i0 = grid.nearest(spec.window_lo);
    int i1 = grid.nearest(spec.window_hi);
    require(i1 - i0 + 1 >= 64, "windowed_norm: window too small on this grid");
    return log_sobolev_norm(field.subspan(i0, i1 - i0 + 1), grid.h(), spec, t);
}

double embedding_constant(double eps, double quad_tol) {
    if (eps <= 0.0)
        throw std::invalid_argument(
            "embedding_constant: integral diverges for eps <= 0");
    // substitute xi = sinh(y): integrand (1 + log^2 cosh y)^{-(1+2eps)/2} dy
    auto f = [eps](double y) {
        double lc = y + std::log1p(std::exp(-2.0 * y)) - std::log(2.0);
        if (y < 20.0) lc = std::log(std::cosh(y));
        return std::pow(1.0 + lc * lc, -(1.0 + 2.0 * eps) / 2.0);
    };
    // numeric part on [0, Y], analytic-style tail bound beyond: integrand
    // ~ y^{-1-2eps} there, tail = Y^{-2eps}/(2 eps) with a small correction.
    const double Y = 5e3;
    double main = adaptive_simpson(f, 0.0, Y, quad_tol);
    double tail = std::pow(Y, -2.0 * eps) / (2.0 * eps);
    double I = 2.0 * (main + tail);
    return std::sqrt(I / (2.0 * std::numbers::pi));
}

InterpolationReport check_interpolation_inequalities(double l, double v, double w,
                                                     double grid_max,
                                                     int grid_points) {
    require(l > 0 && v > 0 && w > 0, "interpolation check: l, v, w must be positive");
    InterpolationReport rep;
    const double lo = std::log(2.0);
    std::vector<double> xs(grid_points);
    for (int i = 0; i < grid_points; ++i)
        xs[i] = lo * std::pow(grid_max / lo, double(i) / (grid_points - 1));

    for (double alpha : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        double sup = 0.0;
        for (double X : xs) {
            for (double P : xs) {
                double ratio = std::pow(
                    std::pow(X, 1.0 - alpha) * std::pow(P, alpha) / (v * X + w * P), l);
                sup = std::max(sup, ratio);
            }
        }
        // AM-GM: X^{1-a} P^a <= (1-a) X + a P, so the ratio is bounded by
        // ((1-a) X + a P)/(v X + w P))^l <= max(1-a, a)^l / min(v, w)^l.
        double bound = std::pow(std::max(1.0 - alpha, alpha) / std::min(v, w), l);
        if (alpha == 0.0) bound = std::pow(v, -l);
        if (alpha == 1.0) bound = std::pow(w, -l);
        rep.rows.push_back({alpha, sup, bound, sup <= bound * (1.0 + 1e-12)});
    }

    // decomposition of part (2): with phi a smooth 0->1 cutoff in P/X,
    //   (X + P)^l = P^l b1 + X^l b2,
    //   b1 = phi(P/X) (1 + X/P)^l, b2 = (1 - phi(P/X)) (1 + P/X)^l,
    // and both b's are bounded on their supports.
    auto phi = [](double z) { return smoothstep(z, 0.5, 1.5, 2); };
    double sb1 = 0.0, sb2 = 0.0, maxerr = 0.0;
    for (double X : xs) {
        for (double P : xs) {
            double z = P / X;
            double b1 = phi(z) * std::pow(1.0 + X / P, l);
            double b2 = (1.0 - phi(z)) * std::pow(1.0 + P / X, l);
            sb1 = std::max(sb1, b1);
            sb2 = std::max(sb2, b2);
            double lhs = std::pow(X + P, l);
            double rhs = std::pow(P, l) * b1 + std::pow(X, l) * b2;
            // identity holds only where phi is 0 or 1; in the overlap the
            // two pieces still reconstruct (X+P)^l exactly by construction:
            // phi + (1 - phi) = 1.
            maxerr = std::max(maxerr, std::fabs(lhs - rhs) / lhs);
        }
    }
    rep.sup_b1 = sb1;
    rep.sup_b2 = sb2;
    rep.bound_b1 = std::pow(3.0, l);   // on supp phi: P/X >= 1/2, so 1 + X/P <= 3
    rep.bound_b2 = std::pow(2.5, l);   // on supp (1-phi): P/X <= 3/2
    rep.max_decomp_error = maxerr;
    rep.all_ok = sb1 <= rep.bound_b1 * (1 + 1e-12) && sb2 <= rep.bound_b2 * (1 + 1e-12) &&
                 maxerr < 1e-12;
    for (auto& r : rep.rows) rep.all_ok = rep.all_ok && r.ok;
    return rep;
}

std::vector<NormSeries> horizon_regularity_sweep(const EvolveResult& run,
                                                 const Grid& grid,
                                                 const std::vector<NormSpec>& specs) {
    require(!run.snapshots.empty(), "regularity sweep: run has no snapshots");
    std::vector<NormSeries> out;
    for (const auto& spec : specs) {
        NormSeries series;
        series.spec = spec;
        series.t.resize(run.snapshots.size());
        series.value.resize(run.snapshots.size());
        series.value_half.resize(run.snapshots.size());
        out.push_back(std::move(series));
    }
    const int ns = static_cast<int>(run.snapshots.size());
#pragma omp parallel for schedule(dynamic)
    for (int k = 0; k < ns; ++k) {
        const auto& snap = run.snapshots[k];
        for (std::size_t q = 0; q < specs.size(); ++q) {
            const auto& spec = specs[q];
            int i0 = grid.nearest(spec.window_lo);
            int i1 = grid.nearest(spec.window_hi);
            require(i0 >= snap.i0 &&
                        i1 < snap.i0 + static_cast<int>(snap.u.size()),
                    "regularity sweep: window not covered by snapshots");
            std::span<const cdouble> win(snap.u.data() + (i0 - snap.i0), i1 - i0 + 1);
            out[q].t[k] = snap.t;
            out[q].value[k] = log_sobolev_norm(win, grid.h(), spec, snap.t);
            // Richardson companion: every other node
            std::vector<cdouble> half;
            for (std::size_t j = 0; j < win.size(); j += 2) half.push_back(win[j]);
            out[q].value_half[k] =
                half.size() >= 64
                    ? log_sobolev_norm(half, 2.0 * grid.h(), spec, snap.t)
                    : 0.0;
        }
    }
    return out;
}

std::vector<NormSpec> default_norm_specs(double lo, double hi, double eps) {
    std::vector<NormSpec> v;
    auto add = [&](double s, double l, const char* id) {
        NormSpec n;
        n.s = s;
        n.l = l;
        n.window_lo = lo;
        n.window_hi = hi;
        n.id = id;
        v.push_back(n);
    };
    add(0.0, 0.0, "L2");
    add(0.4, 0.0, "H0.4");
    add(0.5, 0.0, "H0.5");
    add(0.5, 0.5 + eps, "H0.5+log");
    add(0.6, 0.0, "H0.6");
    add(0.9, 0.0, "H0.9");
    add(1.0, 0.0, "H1");
    return v;
}

}  // namespace lab
