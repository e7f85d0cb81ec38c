#include "lab/carter.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <lapacke.h>

namespace lab {

// ---------------------------------------------------------------------------
// TestFunction
// ---------------------------------------------------------------------------

void TestFunction::add_term(cdouble coef, int p, int q, int u, int v, int m) {
    Term t;
    t.coef = coef;
    t.p = p;
    t.q = q;
    t.m = m;
    t.ang = {{{u, v}, 1.0}};
    terms_.push_back(std::move(t));
}

namespace {

// differentiate a (cos^u sin^v) polynomial once in theta
std::vector<std::pair<std::pair<int, int>, double>> ang_diff(
    const std::vector<std::pair<std::pair<int, int>, double>>& poly) {
    std::vector<std::pair<std::pair<int, int>, double>> out;
    auto add = [&](int u, int v, double c) {
        if (c == 0.0) return;
        for (auto& e : out) {
            if (e.first.first == u && e.first.second == v) {
                e.second += c;
                return;
            }
        }
        out.push_back({{u, v}, c});
    };
    for (auto& e : poly) {
        int u = e.first.first, v = e.first.second;
        double c = e.second;
        if (u > 0) add(u - 1, v + 1, -c * u);
        if (v > 0) add(u + 1, v - 1, c * v);
    }
    return out;
}

double falling(double x, int k) {
    double f = 1.0;
    for (int i = 0; i < k; ++i) f *= (x - i);
    return f;
}

}  // namespace

cdouble TestFunction::deriv(const DerivIndex& d, double t, double r, double th,
                            double ph) const {
    cdouble acc = 0.0;
    for (const auto& term : terms_) {
        if (d.kt > term.p || d.kr > term.q) continue;
        double tpart = falling(term.p, d.kt) * std::pow(t, term.p - d.kt);
        double rpart = falling(term.q, d.kr) * std::pow(r, term.q - d.kr);
        auto ang = term.ang;
        for (int k = 0; k < d.kth; ++k) ang = ang_diff(ang);
        double apart = 0.0;
        for (auto& e : ang)
            apart += e.second * std::pow(std::cos(th), e.first.first) *
                     std::pow(std::sin(th), e.first.second);
        cdouble phpart = std::exp(cdouble(0, term.m * ph));
        cdouble imfac = std::pow(cdouble(0, term.m), d.kph);
        acc += term.coef * tpart * rpart * apart * imfac * phpart;
    }
    return acc;
}

std::complex<long double> TestFunction::value_ld(long double t, long double r,
                                                 long double th,
                                                 long double ph) const {
    std::complex<long double> acc = 0.0L;
    for (const auto& term : terms_) {
        long double tpart = powl(t, term.p);
        long double rpart = powl(r, term.q);
        long double apart = 0.0L;
        for (auto& e : term.ang)
            apart += (long double)e.second * powl(cosl(th), e.first.first) *
                     powl(sinl(th), e.first.second);
        std::complex<long double> phpart(cosl(term.m * ph), sinl(term.m * ph));
        acc += std::complex<long double>(term.coef.real(), term.coef.imag()) *
               tpart * rpart * apart * phpart;
    }
    return acc;
}

TestFunction TestFunction::random(std::uint64_t seed, int n_terms) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> amp(-1.0, 1.0);
    std::uniform_int_distribution<int> pd(0, 2), qd(0, 3), ud(0, 2), vd(0, 2),
        md(-2, 2);
    TestFunction f;
    for (int k = 0; k < n_terms; ++k) {
        f.add_term({amp(rng), amp(rng)}, pd(rng), qd(rng), ud(rng), vd(rng),
                   md(rng));
    }
    return f;
}

// ---------------------------------------------------------------------------
// Kerr chart coefficients (shared template)
// ---------------------------------------------------------------------------

KerrChart KerrChart::build(const BlackHoleParams& p) {
    require(p.family == Family::Kerr, "KerrChart: Kerr-family parameters required");
    p.validate();
    auto horizons = find_horizons(p);
    RadialProfile prof(p);
    double lo = 0.5 * horizons.radii.front();
    double hi = horizons.radii.back() + 6.0;
    Slicing window(std::move(prof), horizons, SheetConvention::Paper, lo, hi);
    return KerrChart{p, std::move(horizons), std::move(window)};
}

namespace {

// W window with derivatives as a jet (plateaus are exact constants)
Jet2 window_jet(const Slicing& sl, double r) {
    Jet2 w(sl.W(r));
    // derivative structure only inside transitions; probe smoothly
    double d1 = sl.dW(r);
    if (d1 != 0.0) {
        // numerical jet: sample the smooth transition polynomial
        double h = 1e-3;
        auto f = [&](double x) { return sl.W(x); };
        w.c[1][0] = d1;
        w.c[2][0] = (f(r + h) - 2 * f(r) + f(r - h)) / (h * h) / 2.0;
        w.c[3][0] = (f(r + 2 * h) - 2 * f(r + h) + 2 * f(r - h) - f(r - 2 * h)) /
                    (2 * h * h * h) / 6.0;
        w.c[4][0] = (f(r + 2 * h) - 4 * f(r + h) + 6 * f(r) - 4 * f(r - h) +
                     f(r - 2 * h)) /
                    (h * h * h * h) / 24.0;
    }
    return w;
}

// Kerr inverse-metric blocks scaled by rho^2, in the horizon-penetrating
// chart; valid for Lambda = 0.
template <typename T, typename WinT>
struct KerrCoeffs {
    T Htt, Htf, Hff, Htr, Hrf, Hrr, Hthth;
    T rho2, sin_th, cos_th;

    static KerrCoeffs compute(const BlackHoleParams& p, const T& r, const T& th,
                              const WinT& W) {
        KerrCoeffs k;
        const double a = p.spin, M = p.mass;
        T r2a2 = r * r + a * a;
        T Delta = r2a2 - 2.0 * M * r;
        k.sin_th = sin(th);
        k.cos_th = cos(th);
        k.rho2 = r * r + (a * a) * k.cos_th * k.cos_th;
        T one_w2 = 1.0 - W * W;
        T s2 = k.sin_th * k.sin_th;
        k.Htt = one_w2 * r2a2 * r2a2 / Delta - (a * a) * s2;
        k.Htf = one_w2 * r2a2 * a / Delta - a;
        k.Hff = one_w2 * (a * a) / Delta - 1.0 / s2;
        k.Htr = W * r2a2;
        k.Hrf = W * a;
        k.Hrr = -Delta;
        k.Hthth = -1.0;
        return k;
    }
};

}  // namespace

std::vector<OperatorTerm> rho2_box_terms(const KerrChart& chart, double r,
                                         double th) {
    // jets centered at (r, th)
    Jet2 rj = Jet2::var1(r), thj = Jet2::var2(th);
    Jet2 Wj = window_jet(chart.window, r);
    auto K = KerrCoeffs<Jet2, Jet2>::compute(chart.params, rj, thj, Wj);
    // long-double values at the center (W exactly from the window)
    long double rl = r, thl = th;
    long double Wl = chart.window.W(r);
    auto Kl = KerrCoeffs<long double, long double>::compute(chart.params, rl, thl, Wl);

    Jet2 cot = cos(thj) / sin(thj);
    long double cotl = cosl(thl) / sinl(thl);

    std::vector<OperatorTerm> op;
    auto term = [&](Jet2 cj, long double cl, int kt, int kr, int kth, int kph) {
        op.push_back({cj, cl, {kt, kr, kth, kph}});
    };
    // second order: H^{ab} d_a d_b with symmetric off-diagonals doubled
    term(K.Htt, Kl.Htt, 2, 0, 0, 0);
    term(2.0 * K.Htr, 2.0L * Kl.Htr, 1, 1, 0, 0);
    term(2.0 * K.Htf, 2.0L * Kl.Htf, 1, 0, 0, 1);
    term(K.Hrr, Kl.Hrr, 0, 2, 0, 0);
    term(2.0 * K.Hrf, 2.0L * Kl.Hrf, 0, 1, 0, 1);
    term(K.Hff, Kl.Hff, 0, 0, 0, 2);
    term(K.Hthth, Kl.Hthth, 0, 0, 2, 0);
    // first order: (1/sin) d_a (sin H^{ab}) = d_r H^{rb} + cot(th) H^{th b}
    // with H^{th b} = -delta^{b, theta}.
    auto d_r = [](const Jet2& j) {
        Jet2 o;
        for (int i = 0; i + 1 <= Jet2::Ord; ++i)
            for (int jj = 0; i + 1 + jj <= Jet2::Ord; ++jj)
                o.c[i][jj] = j.c[i + 1][jj] * (i + 1);
        return o;
    };
    auto d_th = [](const Jet2& j) {
        Jet2 o;
        for (int i = 0; i <= Jet2::Ord; ++i)
            for (int jj = 0; i + jj + 1 <= Jet2::Ord; ++jj)
                o.c[i][jj] = j.c[i][jj + 1] * (jj + 1);
        return o;
    };
    Jet2 beta_t = d_r(K.Htr);
    Jet2 beta_r = d_r(K.Hrr);
    Jet2 beta_f = d_r(K.Hrf);
    Jet2 beta_th = -cot;
    // long-double first-order values from the jet derivatives (exact formulas)
    term(beta_t, (long double)beta_t.value(), 1, 0, 0, 0);
    term(beta_r, (long double)beta_r.value(), 0, 1, 0, 0);
    term(beta_f, (long double)beta_f.value(), 0, 0, 0, 1);
    term(beta_th, -cotl, 0, 0, 1, 0);
    return op;
}

std::vector<OperatorTerm> carter_terms(const KerrChart& chart, double r, double th) {
    const double a = chart.params.spin;
    const double gamma = chart.params.lambda * a * a / 3.0;
    Jet2 thj = Jet2::var2(th);
    Jet2 s = sin(thj), c = cos(thj);
    Jet2 kappa = 1.0 + gamma * c * c;
    long double sl = sinl((long double)th), cl = cosl((long double)th);
    long double kapl = 1.0L + (long double)gamma * cl * cl;
    double op2 = (1.0 + gamma) * (1.0 + gamma);
    // C = -[ kappa d_th^2 + (kappa' + kappa cot) d_th
    //        + (1+g)^2/(kappa sin^2) d_ph^2 + 2a(1+g)^2/kappa d_t d_ph
    //        + (1+g)^2 a^2 sin^2/kappa d_t^2 ]
    auto d_th = [](const Jet2& j) {
        Jet2 o;
        for (int i = 0; i <= Jet2::Ord; ++i)
            for (int jj = 0; i + jj + 1 <= Jet2::Ord; ++jj)
                o.c[i][jj] = j.c[i][jj + 1] * (jj + 1);
        return o;
    };
    Jet2 kp = d_th(kappa);
    Jet2 cot = c / s;
    long double kpl = -2.0L * (long double)gamma * cl * sl;
    long double cotl = cl / sl;

    std::vector<OperatorTerm> op;
    auto term = [&](Jet2 cj, long double cl2, int kt, int kr, int kth, int kph) {
        op.push_back({cj, cl2, {kt, kr, kth, kph}});
    };
    term(-kappa, -kapl, 0, 0, 2, 0);
    term(-(kp + kappa * cot), -(kpl + kapl * cotl), 0, 0, 1, 0);
    term(-(op2 / (kappa * s * s)), -((long double)op2 / (kapl * sl * sl)), 0, 0, 0, 2);
    term(-(2.0 * a * op2 / kappa), -(2.0L * a * (long double)op2 / kapl), 1, 0, 0, 1);
    term(-(op2 * a * a * s * s / kappa),
         -((long double)op2 * a * a * sl * sl / kapl), 2, 0, 0, 0);
    return op;
}

cdouble apply_operator(const std::vector<OperatorTerm>& op, const TestFunction& f,
                       double t, double r, double th, double ph) {
    cdouble acc = 0.0;
    for (const auto& tm : op)
        acc += tm.coef.value() * f.deriv(tm.idx, t, r, th, ph);
    return acc;
}

cdouble apply_carter(const KerrChart& chart, const TestFunction& f, double t,
                     double r, double th, double ph) {
    require(std::sin(th) > 1e-3, "apply_carter: axis proximity");
    auto op = carter_terms(chart, r, th);
    return apply_operator(op, f, t, r, th, ph);
}

namespace {

// exact composition A(B f) at a point: expand derivatives of (B f) by the
// Leibniz rule; coefficients depend on (r, theta) only.
cdouble compose_apply(const std::vector<OperatorTerm>& A,
                      const std::vector<OperatorTerm>& B, const TestFunction& f,
                      double t, double r, double th, double ph) {
    cdouble acc = 0.0;
    for (const auto& ta : A) {
        // need d^{alpha}(B f) with alpha = ta.idx; alpha splits into the
        // (r, theta) part acting on B's coefficients and the rest on f
        cdouble inner = 0.0;
        const int ar = ta.idx.kr, ath = ta.idx.kth;
        for (const auto& tb : B) {
            for (int i = 0; i <= ar; ++i) {
                double br = 1.0;  // binomial(ar, i)
                for (int k = 0; k < i; ++k) br = br * (ar - k) / (k + 1);
                for (int j = 0; j <= ath; ++j) {
                    double bt = 1.0;
                    for (int k = 0; k < j; ++k) bt = bt * (ath - k) / (k + 1);
                    double cderiv = tb.coef.deriv(i, j);
                    if (cderiv == 0.0) continue;
                    DerivIndex di{ta.idx.kt + tb.idx.kt, (ar - i) + tb.idx.kr,
                                  (ath - j) + tb.idx.kth, ta.idx.kph + tb.idx.kph};
                    inner += br * bt * cderiv * f.deriv(di, t, r, th, ph);
                }
            }
        }
        acc += ta.coef.value() * inner;
    }
    return acc;
}

}  // namespace

CommutatorSample commutator_once(const KerrChart& chart, const TestFunction& f,
                                 double t, double r, double th, double ph) {
    require(std::sin(th) > 1e-3, "commutator: axis proximity");
    for (double rj : chart.horizons.radii)
        require(std::fabs(r - rj) > 1e-3, "commutator: horizon proximity");
    auto A = rho2_box_terms(chart, r, th);
    auto B = carter_terms(chart, r, th);
    CommutatorSample s;
    s.ab = compose_apply(A, B, f, t, r, th, ph);
    s.ba = compose_apply(B, A, f, t, r, th, ph);
    return s;
}

CommutatorReport commutator_residual(const BlackHoleParams& params, int n_seeds,
                                     int n_points, std::uint64_t seed0) {
    auto chart = KerrChart::build(params);
    CommutatorReport rep;
    rep.seeds = n_seeds;
    rep.points = n_points;
    std::mt19937_64 rng(seed0 * 7919 + 13);
    std::uniform_real_distribution<double> rd(0.35, 5.0), thd(0.2, M_PI - 0.2),
        td(0.0, 2.0), phd(0.0, 2.0 * M_PI);
    std::vector<double> maxres(n_seeds, 0.0);
    // points are drawn once and shared across witnesses
    std::vector<std::array<double, 4>> pts;
    for (int k = 0; k < n_points; ++k) {
        double r;
        do {
            r = rd(rng);
        } while ([&] {
            for (double rj : chart.horizons.radii)
                if (std::fabs(r - rj) < 2e-3) return true;
            return false;
        }());
        pts.push_back({td(rng), r, thd(rng), phd(rng)});
    }
#pragma omp parallel for schedule(dynamic)
    for (int s = 0; s < n_seeds; ++s) {
        auto f = TestFunction::random(seed0 + s);
        double worst = 0.0;
        for (auto& p : pts) {
            auto smp = commutator_once(chart, f, p[0], p[1], p[2], p[3]);
            worst = std::max(worst, smp.residual_rel());
        }
        maxres[s] = worst;
    }
    for (double v : maxres) rep.max_residual = std::max(rep.max_residual, v);
    return rep;
}

// ---------------------------------------------------------------------------
// order-8 long-double finite-difference oracle
// ---------------------------------------------------------------------------

namespace {

using cldouble = std::complex<long double>;

// order-8 central stencils for derivative orders 0..2 on a 9-point line
void fd_weights_ld(int order, long double h, long double* w) {
    static const long double d1[9] = {
        1.0L / 280, -4.0L / 105, 1.0L / 5, -4.0L / 5, 0.0L,
        4.0L / 5,   -1.0L / 5,   4.0L / 105, -1.0L / 280};
    static const long double d2[9] = {
        -1.0L / 560, 8.0L / 315, -1.0L / 5, 8.0L / 5, -205.0L / 72,
        8.0L / 5,    -1.0L / 5,  8.0L / 315, -1.0L / 560};
    for (int i = 0; i < 9; ++i) {
        if (order == 0)
            w[i] = (i == 4) ? 1.0L : 0.0L;
        else if (order == 1)
            w[i] = d1[i] / h;
        else
            w[i] = d2[i] / (h * h);
    }
}

// FD derivative of a 4-variable long-double function at a point, tensorized
template <typename F>
cldouble fd_deriv(F&& fn, const DerivIndex& d, long double t, long double r,
                  long double th, long double ph, long double h) {
    // apply one dimension at a time, recursively
    if (d.kt > 0) {
        long double w[9];
        fd_weights_ld(d.kt, h, w);
        require(d.kt <= 2, "fd_deriv: order > 2 per variable unsupported");
        cldouble acc = 0.0L;
        DerivIndex rest = d;
        rest.kt = 0;
        for (int i = 0; i < 9; ++i) {
            if (w[i] == 0.0L) continue;
            acc += w[i] * fd_deriv(fn, rest, t + (i - 4) * h, r, th, ph, h);
        }
        return acc;
    }
    if (d.kr > 0) {
        long double w[9];
        fd_weights_ld(d.kr, h, w);
        require(d.kr <= 2, "fd_deriv: order > 2 per variable unsupported");
        cldouble acc = 0.0L;
        DerivIndex rest = d;
        rest.kr = 0;
        for (int i = 0; i < 9; ++i) {
            if (w[i] == 0.0L) continue;
            acc += w[i] * fd_deriv(fn, rest, t, r + (i - 4) * h, th, ph, h);
        }
        return acc;
    }
    if (d.kth > 0) {
        long double w[9];
        fd_weights_ld(d.kth, h, w);
        require(d.kth <= 2, "fd_deriv: order > 2 per variable unsupported");
        cldouble acc = 0.0L;
        DerivIndex rest = d;
        rest.kth = 0;
        for (int i = 0; i < 9; ++i) {
            if (w[i] == 0.0L) continue;
            acc += w[i] * fd_deriv(fn, rest, t, r, th + (i - 4) * h, ph, h);
        }
        return acc;
    }
    if (d.kph > 0) {
        long double w[9];
        fd_weights_ld(d.kph, h, w);
        require(d.kph <= 2, "fd_deriv: order > 2 per variable unsupported");
        cldouble acc = 0.0L;
        DerivIndex rest = d;
        rest.kph = 0;
        for (int i = 0; i < 9; ++i) {
            if (w[i] == 0.0L) continue;
            acc += w[i] * fd_deriv(fn, rest, t, r, th, ph + (i - 4) * h, h);
        }
        return acc;
    }
    return fn(t, r, th, ph);
}

// operator application with every witness derivative replaced by FD; the
// coefficients are evaluated in closed form at the shifted points
template <typename F>
cldouble fd_apply_op(const KerrChart& chart, bool carter_op, F&& fn, long double t,
                     long double r, long double th, long double ph,
                     long double h) {
    // coefficient values at (r, th) via the shared template instantiated with
    // long double at the evaluation point
    auto terms = carter_op ? carter_terms(chart, (double)r, (double)th)
                           : rho2_box_terms(chart, (double)r, (double)th);
    cldouble acc = 0.0L;
    for (auto& tm : terms) {
        acc += (cldouble)tm.value * fd_deriv(fn, tm.idx, t, r, th, ph, h);
    }
    return acc;
}

}  // namespace

CommutatorSample commutator_fd(const KerrChart& chart, const TestFunction& f,
                               double t, double r, double th, double ph,
                               double h) {
    auto fval = [&](long double tt, long double rr, long double tth,
                    long double pph) { return f.value_ld(tt, rr, tth, pph); };
    long double hl = h;
    auto Bf = [&](long double tt, long double rr, long double tth, long double pph) {
        return fd_apply_op(chart, true, fval, tt, rr, tth, pph, hl);
    };
    auto Af = [&](long double tt, long double rr, long double tth, long double pph) {
        return fd_apply_op(chart, false, fval, tt, rr, tth, pph, hl);
    };
    CommutatorSample s;
    cldouble ab = fd_apply_op(chart, false, Bf, t, r, th, ph, hl);
    cldouble ba = fd_apply_op(chart, true, Af, t, r, th, ph, hl);
    s.ab = cdouble((double)ab.real(), (double)ab.imag());
    s.ba = cdouble((double)ba.real(), (double)ba.imag());
    return s;
}

double killing_commutator_residual(const KerrChart& chart, const TestFunction& f,
                                   double t, double r, double th, double ph,
                                   bool phi_direction) {
    auto A = rho2_box_terms(chart, r, th);
    // D = -i d (t* or phi*); [A, D] f = A(D f) - D(A f)
    std::vector<OperatorTerm> D;
    DerivIndex di;
    if (phi_direction)
        di.kph = 1;
    else
        di.kt = 1;
    D.push_back({Jet2(1.0), 1.0L, di});
    cdouble ab = compose_apply(A, D, f, t, r, th, ph);
    cdouble ba = compose_apply(D, A, f, t, r, th, ph);
    double scale = std::max({std::abs(ab), std::abs(ba), 1e-30});
    return std::abs(ab - ba) / scale;
}

AngularWitnessReport mode_regularity_witness(const BlackHoleParams& params, int m,
                                             int n_grid, int n_eigs,
                                             double weyl_cut) {
    require(std::fabs(params.spin) <= 0.3 * params.mass,
            "mode_regularity_witness: |a| <= 0.3 M required");
    const double gamma = params.lambda * params.spin * params.spin / 3.0;
    const double op2 = (1.0 + gamma) * (1.0 + gamma);
    // flux form on x = cos(theta): -d/dx[(1-x^2) kappa du/dx] + m^2(1+g)^2 /
    // (kappa (1-x^2)) with kappa = 1 + gamma x^2.  The degenerate flux at
    // x = +-1 makes the natural condition the right one for m = 0, so the
    // endpoint nodes are kept; for m != 0 the potential enforces vanishing
    // there and the interior grid with implicit Dirichlet ends is correct.
    auto flux = [&](double x) {
        double k = 1.0 + gamma * x * x;
        return (1.0 - x * x) * k;
    };
    int N;
    std::vector<double> diag, off;
    if (m == 0) {
        // finite-volume form with half cells at the ends, symmetrized with
        // the cell-mass weights (keeps second-order accuracy at the
        // degenerate endpoints)
        N = n_grid + 1;
        const double dx = 2.0 / n_grid;
        diag.resize(N);
        off.resize(N - 1);
        std::vector<double> mass(N, dx);
        mass.front() = mass.back() = 0.5 * dx;
        for (int i = 0; i < N; ++i) {
            double x = -1.0 + i * dx;
            double fm = (i == 0) ? 0.0 : flux(x - 0.5 * dx);
            double fp = (i == N - 1) ? 0.0 : flux(x + 0.5 * dx);
            diag[i] = (fm + fp) / dx / mass[i];
            if (i + 1 < N) off[i] = -(fp / dx) / std::sqrt(mass[i] * mass[i + 1]);
        }
    } else {
        N = n_grid;
        const double dx = 2.0 / (N + 1);
        diag.resize(N);
        off.resize(N - 1);
        for (int i = 0; i < N; ++i) {
            double x = -1.0 + (i + 1) * dx;
            double fm = flux(x - 0.5 * dx), fp = flux(x + 0.5 * dx);
            double k = 1.0 + gamma * x * x;
            diag[i] = (fm + fp) / (dx * dx) + m * m * op2 / (k * (1.0 - x * x));
            if (i + 1 < N) off[i] = -fp / (dx * dx);
        }
    }
    std::vector<double> evals = diag, offc = off;
    lapack_int info = LAPACKE_dstev(LAPACK_ROW_MAJOR, 'N', N, evals.data(),
                                    offc.data(), nullptr, N);
    require(info == 0, "mode_regularity_witness: eigensolver failed");
    AngularWitnessReport rep;
    rep.weyl_cut = weyl_cut;
    for (int i = 0; i < N; ++i) {
        if (i < n_eigs) rep.eigenvalues.push_back(evals[i]);
        if (evals[i] <= weyl_cut) ++rep.count_below_cut;
    }
    // deviation from the l(l+1) ladder starting at |m|
    double dev = 0.0;
    for (int k = 0; k < std::min<int>(n_eigs, 10); ++k) {
        double l = std::fabs(m) + k;
        dev = std::max(dev, std::fabs(rep.eigenvalues[k] - l * (l + 1)));
    }
    rep.max_dev_from_l_l1 = dev;
    return rep;
}

}  // namespace lab
