#include "lab/evolve.hpp"

#include <algorithm>
#include <cmath>

namespace lab {

WaveOperator1D::WaveOperator1D(const Slicing& slicing, Grid grid, int ell,
                               OuterBoundary outer, double ko_eps)
    : grid_(grid), ell_(ell), ko_(ko_eps), outer_(outer) {
    require(grid_.n >= 201, "wave operator: need n >= 201 nodes");
    require(ell >= 0, "wave operator: ell must be >= 0");

    const int n = grid_.n;
    A_.resize(n);
    B_.resize(n);
    C_.resize(n);
    b1_.resize(n);
    c1_.resize(n);
    V_.resize(n);
    for (int i = 0; i < n; ++i) {
        const double r = grid_.r(i);
        auto k = slicing.coeffs(r);
        require(k.A > 0.0, "wave operator: slices not spacelike at node " +
                               std::to_string(i));
        A_[i] = k.A;
        B_[i] = k.B;
        C_[i] = k.C;
        b1_[i] = k.dB + 2.0 * k.B / r;
        c1_[i] = k.dC + 2.0 * k.C / r;
        V_[i] = double(ell) * double(ell + 1) / (r * r);
    }
    // Grid-scale (Nyquist) content sees no advection under centered stencils;
    // it is amplified by horizon compression (rate kappa) and by the
    // zeroth-order terms (rate |b1|/2A).  The dissipation rate eps/h must
    // dominate both, so floor eps at 2 h max(rates); the floor stays O(h)
    // and does not affect the convergence order.
    if (ko_ < 0.0) {
        ko_ = -ko_;  // negative input: use as-is without the floor
    } else {
        double rate = 0.0;
        for (double k : slicing.horizons().kappas) rate = std::max(rate, k);
        for (int i = 0; i < n; ++i)
            rate = std::max(rate, std::fabs(b1_[i]) / A_[i]);
        ko_ = std::max(ko_, 2.0 * rate * grid_.h());
    }
    check_outflow();
}

std::pair<double, double> WaveOperator1D::char_speeds(int i) const {
    return {(B_[i] + 1.0) / A_[i], (B_[i] - 1.0) / A_[i]};
}

double WaveOperator1D::max_char_speed() const {
    double v = 0.0;
    for (int i = 0; i < grid_.n; ++i) {
        auto [sp, sm] = char_speeds(i);
        v = std::max({v, std::fabs(sp), std::fabs(sm)});
    }
    return v;
}

void WaveOperator1D::check_outflow() const {
    auto [sp0, sm0] = char_speeds(0);
    if (!(sp0 < 0.0 && sm0 < 0.0))
        throw std::runtime_error("wave operator: inner collar not outflow at node 0");
    if (outer_ == OuterBoundary::Outflow) {
        auto [spn, smn] = char_speeds(grid_.n - 1);
        if (!(spn > 0.0 && smn > 0.0))
            throw std::runtime_error("wave operator: outer collar not outflow at node " +
                                     std::to_string(grid_.n - 1));
    }
}

namespace {

// First and second derivative stencils; node classes as described in the
// header.  All one-sided closures are second order.
inline cdouble d1_at(const cdouble* u, int i, int n, double ih) {
    if (i >= 2 && i <= n - 3) {
        return (u[i - 2] - 8.0 * u[i - 1] + 8.0 * u[i + 1] - u[i + 2]) * (ih / 12.0);
    }
    if (i == 0) return (-3.0 * u[0] + 4.0 * u[1] - u[2]) * (0.5 * ih);
    if (i == n - 1) return (3.0 * u[n - 1] - 4.0 * u[n - 2] + u[n - 3]) * (0.5 * ih);
    return (u[i + 1] - u[i - 1]) * (0.5 * ih);
}

inline cdouble d2_at(const cdouble* u, int i, int n, double ih2) {
    if (i >= 2 && i <= n - 3) {
        return (-u[i - 2] + 16.0 * u[i - 1] - 30.0 * u[i] + 16.0 * u[i + 1] - u[i + 2]) *
               (ih2 / 12.0);
    }
    if (i == 0) return (2.0 * u[0] - 5.0 * u[1] + 4.0 * u[2] - u[3]) * ih2;
    if (i == n - 1)
        return (2.0 * u[n - 1] - 5.0 * u[n - 2] + 4.0 * u[n - 3] - u[n - 4]) * ih2;
    return (u[i - 1] - 2.0 * u[i] + u[i + 1]) * ih2;
}

// Kreiss-Oliger dissipation: sixth difference in the interior, fourth at the
// transition nodes, none at the outermost pairs.
inline cdouble ko_at(const cdouble* u, int i, int n, double eps_h) {
    if (i >= 3 && i <= n - 4) {
        return (u[i - 3] - 6.0 * u[i - 2] + 15.0 * u[i - 1] - 20.0 * u[i] +
                15.0 * u[i + 1] - 6.0 * u[i + 2] + u[i + 3]) *
               (eps_h / 64.0);
    }
    if (i == 2 || i == n - 3) {
        return (u[i - 2] - 4.0 * u[i - 1] + 6.0 * u[i] - 4.0 * u[i + 1] + u[i + 2]) *
               (-eps_h / 16.0);
    }
    return 0.0;
}

}  // namespace

void WaveOperator1D::rhs_serial(const cdouble* u, const cdouble* v,
                                const cdouble* w, cdouble* du, cdouble* dv,
                                cdouble* dw) const {
    const int n = grid_.n;
    const double ih = 1.0 / grid_.h();
    const double eps_h = ko_ * ih;
    const bool radiating = outer_ == OuterBoundary::Radiating;
    for (int i = 0; i < n; ++i) {
        if (radiating && i >= n - 2) {
            double sp = (B_[i] + 1.0) / A_[i];
            double r = grid_.r(i);
            du[i] = -sp * (d1_at(u, i, n, ih) + u[i] / r);
            dv[i] = -sp * (d1_at(v, i, n, ih) + v[i] / r);
            dw[i] = -sp * (d1_at(w, i, n, ih) + w[i] / r);
            continue;
        }
        cdouble vr = d1_at(v, i, n, ih);
        cdouble wr = d1_at(w, i, n, ih);
        du[i] = w[i] + ko_at(u, i, n, eps_h);
        dv[i] = wr + ko_at(v, i, n, eps_h);
        dw[i] = -(2.0 * B_[i] * wr + C_[i] * vr + b1_[i] * w[i] + c1_[i] * v[i] +
                  V_[i] * u[i]) /
                    A_[i] +
                ko_at(w, i, n, eps_h);
    }
}

void WaveOperator1D::rhs(const cdouble* u, const cdouble* v, const cdouble* w,
                         cdouble* du, cdouble* dv, cdouble* dw) const {
    const int n = grid_.n;
    const double ih = 1.0 / grid_.h();
    const double eps_h = ko_ * ih;
    const bool radiating = outer_ == OuterBoundary::Radiating;
#pragma omp parallel for schedule(static)
    for (int i = 0; i < n; ++i) {
        if (radiating && i >= n - 2) {
            double sp = (B_[i] + 1.0) / A_[i];
            double r = grid_.r(i);
            du[i] = -sp * (d1_at(u, i, n, ih) + u[i] / r);
            dv[i] = -sp * (d1_at(v, i, n, ih) + v[i] / r);
            dw[i] = -sp * (d1_at(w, i, n, ih) + w[i] / r);
            continue;
        }
        cdouble vr = d1_at(v, i, n, ih);
        cdouble wr = d1_at(w, i, n, ih);
        du[i] = w[i] + ko_at(u, i, n, eps_h);
        dv[i] = wr + ko_at(v, i, n, eps_h);
        dw[i] = -(2.0 * B_[i] * wr + C_[i] * vr + b1_[i] * w[i] + c1_[i] * v[i] +
                  V_[i] * u[i]) /
                    A_[i] +
                ko_at(w, i, n, eps_h);
    }
}

void WaveOperator1D::gradient(const cdouble* u, cdouble* v) const {
    const int n = grid_.n;
    const double ih = 1.0 / grid_.h();
    for (int i = 0; i < n; ++i) v[i] = d1_at(u, i, n, ih);
}

void WaveOperator1D::apply_spatial0(const cdouble* u, cdouble* out) const {
    const int n = grid_.n;
    const double ih = 1.0 / grid_.h();
    const double ih2 = ih * ih;
    for (int i = 0; i < n; ++i) {
        out[i] = C_[i] * d2_at(u, i, n, ih2) + c1_[i] * d1_at(u, i, n, ih) +
                 V_[i] * u[i];
    }
}

void WaveOperator1D::apply_spatial1(const cdouble* u, cdouble* out) const {
    const int n = grid_.n;
    const double ih = 1.0 / grid_.h();
    for (int i = 0; i < n; ++i) {
        out[i] = 2.0 * B_[i] * d1_at(u, i, n, ih) + b1_[i] * u[i];
    }
}

// ---------------------------------------------------------------------------
// initial data
// ---------------------------------------------------------------------------

void InitialData::validate_support(double lo, double hi) const {
    require(width > 0.0, "initial data: width must be positive");
    require(center - width > lo && center + width < hi,
            "initial data: support must lie strictly inside the exterior region");
}

namespace {
// Compactly supported C^7 profile; polynomial edges keep the pulse front
// resolvable (an exponential bump leaves 2nd-order-looking edge content at
// practical resolutions).
double poly_bump(double z) {
    if (std::fabs(z) >= 1.0) return 0.0;
    double q = 1.0 - z * z;
    double q2 = q * q, q4 = q2 * q2;
    return q4 * q4;
}
double poly_bump_deriv(double z) {
    if (std::fabs(z) >= 1.0) return 0.0;
    double q = 1.0 - z * z;
    double q2 = q * q;
    return -16.0 * z * q2 * q2 * q2 * q;
}
}  // namespace

double InitialData::value(double r) const {
    return amplitude * poly_bump((r - center) / width);
}

double InitialData::deriv(double r) const {
    return amplitude * poly_bump_deriv((r - center) / width) / width;
}

// ---------------------------------------------------------------------------
// evolution driver
// ---------------------------------------------------------------------------

EvolveResult evolve_from(const WaveOperator1D& op, std::vector<cdouble> u,
                         std::vector<cdouble> w, const EvolveConfig& cfg) {
    const int n = op.n();
    require(static_cast<int>(u.size()) == n && static_cast<int>(w.size()) == n,
            "evolve: field size mismatch");
    require(cfg.T > 0.0, "evolve: T must be positive");

    std::vector<cdouble> v(n);
    op.gradient(u.data(), v.data());

    const double h = op.grid().h();
    const double vmax = op.max_char_speed();
    require(cfg.cfl > 0.0 && cfg.cfl <= 1.2,
            "evolve: CFL violation (factor must lie in (0, 1.2])");
    double dt_raw = cfg.cfl * h / vmax;
    require(dt_raw > 0.0, "evolve: CFL produced nonpositive step");
    // land exactly on probe sample times
    int per_probe = std::max(1, static_cast<int>(std::ceil(cfg.probe_dt / dt_raw)));
    double dt = cfg.probe_dt / per_probe;
    long n_samples = std::lround(cfg.T / cfg.probe_dt);
    long steps = n_samples * per_probe;

    EvolveResult out;
    out.dt = dt;
    out.steps = steps;
    for (double rp : cfg.probe_radii) {
        ProbeSeries ps;
        ps.r = op.grid().r(op.grid().nearest(rp));
        out.probes.push_back(ps);
    }
    std::vector<int> probe_idx;
    for (double rp : cfg.probe_radii) probe_idx.push_back(op.grid().nearest(rp));
    int win_lo = cfg.window_hi > cfg.window_lo ? op.grid().nearest(cfg.window_lo) : 0;
    int win_hi = cfg.window_hi > cfg.window_lo ? op.grid().nearest(cfg.window_hi) : -1;
    int snap_every =
        cfg.snap_dt > 0.0 ? std::max(1, static_cast<int>(std::lround(cfg.snap_dt / cfg.probe_dt)))
                          : 0;
    int slo = 0, shi = n - 1;
    if (cfg.snap_hi > cfg.snap_lo) {
        slo = op.grid().nearest(cfg.snap_lo);
        shi = op.grid().nearest(cfg.snap_hi);
    }

    auto record = [&](double t, long sample_index) {
        out.times.push_back(t);
        for (std::size_t p = 0; p < probe_idx.size(); ++p) {
            out.probes[p].u.push_back(u[probe_idx[p]]);
            out.probes[p].w.push_back(w[probe_idx[p]]);
        }
        if (win_hi >= win_lo) {
            double su = 0.0, sw = 0.0;
            for (int i = win_lo; i <= win_hi; ++i) {
                su = std::max(su, std::abs(u[i]));
                sw = std::max(sw, std::abs(w[i]));
            }
            out.sup_u.push_back(su);
            out.sup_w.push_back(sw);
        }
        if (snap_every > 0 && sample_index % snap_every == 0) {
            Snapshot s;
            s.t = t;
            s.i0 = slo;
            s.u.assign(u.begin() + slo, u.begin() + shi + 1);
            s.w.assign(w.begin() + slo, w.begin() + shi + 1);
            out.snapshots.push_back(std::move(s));
        }
    };

    std::vector<cdouble> ku(n), kv(n), kw(n), u1(n), v1(n), w1(n), au(n), av(n), aw(n);
    auto call_rhs = [&](const std::vector<cdouble>& uu, const std::vector<cdouble>& vv,
                        const std::vector<cdouble>& ww) {
        if (cfg.parallel)
            op.rhs(uu.data(), vv.data(), ww.data(), ku.data(), kv.data(), kw.data());
        else
            op.rhs_serial(uu.data(), vv.data(), ww.data(), ku.data(), kv.data(),
                          kw.data());
    };
    auto step_rk4 = [&] {
        call_rhs(u, v, w);
        for (int i = 0; i < n; ++i) {
            au[i] = u[i] + (dt / 6.0) * ku[i];
            av[i] = v[i] + (dt / 6.0) * kv[i];
            aw[i] = w[i] + (dt / 6.0) * kw[i];
            u1[i] = u[i] + 0.5 * dt * ku[i];
            v1[i] = v[i] + 0.5 * dt * kv[i];
            w1[i] = w[i] + 0.5 * dt * kw[i];
        }
        call_rhs(u1, v1, w1);
        for (int i = 0; i < n; ++i) {
            au[i] += (dt / 3.0) * ku[i];
            av[i] += (dt / 3.0) * kv[i];
            aw[i] += (dt / 3.0) * kw[i];
            u1[i] = u[i] + 0.5 * dt * ku[i];
            v1[i] = v[i] + 0.5 * dt * kv[i];
            w1[i] = w[i] + 0.5 * dt * kw[i];
        }
        call_rhs(u1, v1, w1);
        for (int i = 0; i < n; ++i) {
            au[i] += (dt / 3.0) * ku[i];
            av[i] += (dt / 3.0) * kv[i];
            aw[i] += (dt / 3.0) * kw[i];
            u1[i] = u[i] + dt * ku[i];
            v1[i] = v[i] + dt * kv[i];
            w1[i] = w[i] + dt * kw[i];
        }
        call_rhs(u1, v1, w1);
        for (int i = 0; i < n; ++i) {
            u[i] = au[i] + (dt / 6.0) * ku[i];
            v[i] = av[i] + (dt / 6.0) * kv[i];
            w[i] = aw[i] + (dt / 6.0) * kw[i];
        }
    };

    record(cfg.t0, 0);
    long sample = 0;
    for (long s = 1; s <= steps; ++s) {
        step_rk4();
        // NaN scan after each step
        for (int i = 0; i < n; ++i) {
            if (!std::isfinite(u[i].real()) || !std::isfinite(u[i].imag()) ||
                !std::isfinite(w[i].real()) || !std::isfinite(w[i].imag())) {
                throw std::runtime_error("evolve: non-finite value at step " +
                                         std::to_string(s) + ", node " + std::to_string(i));
            }
        }
        if (s % per_probe == 0) {
            ++sample;
            record(cfg.t0 + sample * cfg.probe_dt, sample);
        }
    }
    return out;
}

EvolveResult evolve(const WaveOperator1D& op, const InitialData& data,
                    const EvolveConfig& cfg) {
    const int n = op.n();
    std::vector<cdouble> u(n), w(n);
    for (int i = 0; i < n; ++i) {
        double r = op.grid().r(i);
        u[i] = data.value(r);
        if (data.type == InitialData::Type::Ingoing) {
            auto [sp, sm] = op.char_speeds(i);
            (void)sp;
            // ingoing branch: u(t, r) = f(r - sm t)  =>  u_t = -sm u_r
            w[i] = -sm * data.deriv(r);
        } else {
            w[i] = 0.0;
        }
    }
    return evolve_from(op, std::move(u), std::move(w), cfg);
}

// ---------------------------------------------------------------------------
// decay fitting
// ---------------------------------------------------------------------------

DecayFit fit_decay(std::span<const double> t, std::span<const double> values,
                   double t_lo, double t_hi) {
    require(t.size() == values.size() && t.size() >= 8, "fit_decay: series too short");
    DecayFit out;

    // collect the window
    std::vector<double> tw, vw;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (t[i] >= t_lo && t[i] <= t_hi && values[i] > 0.0) {
            tw.push_back(t[i]);
            vw.push_back(values[i]);
        }
    }
    require(tw.size() >= 8, "fit_decay: too few usable samples in window");
    out.spans_decade = tw.back() / tw.front() >= 10.0;

    // oscillation detection: count local minima dipping well below neighbors
    int dips = 0;
    for (std::size_t i = 1; i + 1 < vw.size(); ++i) {
        if (vw[i] < 0.2 * std::min(vw[i - 1], vw[i + 1])) ++dips;
    }
    std::vector<double> tf = tw, vf = vw;
    if (dips >= 3) {
        out.envelope_used = true;
        tf.clear();
        vf.clear();
        for (std::size_t i = 1; i + 1 < vw.size(); ++i) {
            if (vw[i] >= vw[i - 1] && vw[i] >= vw[i + 1]) {
                tf.push_back(tw[i]);
                vf.push_back(vw[i]);
            }
        }
        require(tf.size() >= 4, "fit_decay: envelope too sparse");
    }

    std::vector<double> lx(tf.size()), ly(tf.size());
    for (std::size_t i = 0; i < tf.size(); ++i) {
        lx[i] = std::log(tf[i]);
        ly[i] = std::log(vf[i]);
    }
    auto fit = fit_line(lx, ly);
    out.exponent = -fit.slope;
    out.ci95 = 1.96 * fit.slope_stderr;
    out.residual = fit.rms_residual;

    // sliding local index over ~quarter-decade windows
    double span = 1.25;  // multiplicative window width
    for (std::size_t i = 0; i < tw.size(); ++i) {
        double a = tw[i], b = a * span;
        if (b > tw.back()) break;
        std::vector<double> sx, sy;
        for (std::size_t j = i; j < tw.size() && tw[j] <= b; ++j) {
            sx.push_back(std::log(tw[j]));
            sy.push_back(std::log(vw[j]));
        }
        if (sx.size() >= 4) {
            auto lf = fit_line(sx, sy);
            out.t_mid.push_back(std::sqrt(a * b));
            out.p_local.push_back(-lf.slope);
        }
    }
    return out;
}

LiftedBound lift_linfty_bound(std::span<const double> t,
                              std::span<const double> u_abs,
                              std::span<const double> du_abs, double fit_lo,
                              double fit_hi) {
    const std::size_t n = t.size();
    require(u_abs.size() == n && du_abs.size() == n && n >= 4,
            "lift_linfty_bound: series mismatch");
    LiftedBound out;
    out.t.assign(t.begin(), t.end());
    out.bound.resize(n);
    // tail quadrature of |s u'(s)|^2 from t to T (trapezoid), plus |u(T)|
    std::vector<double> tail(n, 0.0);
    for (std::size_t i = n - 1; i-- > 0;) {
        double f1 = t[i] * du_abs[i], f2 = t[i + 1] * du_abs[i + 1];
        tail[i] = tail[i + 1] + 0.5 * (f1 * f1 + f2 * f2) * (t[i + 1] - t[i]);
    }
    double uT = u_abs[n - 1];
    for (std::size_t i = 0; i < n; ++i) {
        double ti = std::max(t[i], 1e-300);
        out.bound[i] = uT + std::sqrt(tail[i] / ti);
    }
    for (std::size_t i = 0; i < n; ++i)
        out.max_violation = std::max(out.max_violation, u_abs[i] - out.bound[i]);
    auto fit = fit_decay(out.t, out.bound, fit_lo, fit_hi);
    out.exponent = fit.exponent;
    return out;
}

}  // namespace lab
