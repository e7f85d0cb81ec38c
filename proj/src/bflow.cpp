#include "lab/bflow.hpp"

#include <cmath>

#include <lapacke.h>

namespace lab {

namespace {

// scale padding making rho_hat smooth and bounded below the homogeneous zone
double pad(double q) { return 16.0 * smoothstep((16.0 - q) / 12.0, 0.0, 1.0, 5); }
double pad_deriv(double q) {
    return -16.0 / 12.0 * smoothstep_deriv((16.0 - q) / 12.0, 0.0, 1.0, 5);
}

}  // namespace

double fiber_scale(double sb, double xi, double eta) {
    double q = sb * sb + xi * xi + eta * eta;
    return 1.0 / std::sqrt(q + pad(q));
}

double HamiltonFlow::hamiltonian(const FlowState& s) const {
    require(s.tau >= -1e-14, "hamiltonian: tau must be nonnegative");
    auto k = slicing_->coeffs(s.r);
    double quad = k.A * s.sb * s.sb + 2.0 * k.B * s.sb * s.xi + k.C * s.xi * s.xi;
    return -quad + s.eta * s.eta / (s.r * s.r);
}

std::array<double, 4> HamiltonFlow::rescaled_rhs(const FlowState& s) const {
    auto k = slicing_->coeffs(s.r);
    double rho = fiber_scale(s.sb, s.xi, s.eta);
    // dp/dsb, dp/dxi, dp/dr with p = -(A sb^2 + 2B sb xi + C xi^2) + eta^2/r^2
    double dp_dsb = -(2.0 * k.A * s.sb + 2.0 * k.B * s.xi);
    double dp_dxi = -(2.0 * k.B * s.sb + 2.0 * k.C * s.xi);
    double dp_dr = -(k.dA * s.sb * s.sb + 2.0 * k.dB * s.sb * s.xi +
                     k.dC * s.xi * s.xi) -
                   2.0 * s.eta * s.eta / (s.r * s.r * s.r);
    // t-dot = dp/dsb, tau = e^{-t}: tau-dot = -tau dp/dsb; sb conserved.
    return {-s.tau * rho * dp_dsb, rho * dp_dxi, 0.0, -rho * dp_dr};
}

double HamiltonFlow::null_xi(const FlowState& s, double xi_guess) const {
    auto k = slicing_->coeffs(s.r);
    double a = k.C, b = 2.0 * k.B * s.sb,
           c = k.A * s.sb * s.sb - s.eta * s.eta / (s.r * s.r);
    if (std::fabs(a) < 1e-14) {
        require(std::fabs(b) > 1e-14, "null_xi: degenerate quadratic");
        return -c / b;
    }
    double disc = b * b - 4.0 * a * c;
    require(disc >= 0.0, "null_xi: no real null covector here");
    double rt = std::sqrt(disc);
    double x1 = (-b + rt) / (2.0 * a), x2 = (-b - rt) / (2.0 * a);
    return std::fabs(x1 - xi_guess) < std::fabs(x2 - xi_guess) ? x1 : x2;
}

HamiltonFlow::Trajectory HamiltonFlow::integrate(FlowState start, double T,
                                                 double tol) const {
    double p0 = hamiltonian(start);
    double scale0 = std::max({std::fabs(start.sb), std::fabs(start.xi), start.eta});
    require(std::fabs(p0) < std::max(1e-8, tol * 1e4) * scale0 * scale0 + 1e-12,
            "flow_integrate: start is not null");

    // Dormand-Prince 5(4)
    static const double A21 = 1.0 / 5;
    static const double A31 = 3.0 / 40, A32 = 9.0 / 40;
    static const double A41 = 44.0 / 45, A42 = -56.0 / 15, A43 = 32.0 / 9;
    static const double A51 = 19372.0 / 6561, A52 = -25360.0 / 2187,
                        A53 = 64448.0 / 6561, A54 = -212.0 / 729;
    static const double A61 = 9017.0 / 3168, A62 = -355.0 / 33,
                        A63 = 46732.0 / 5247, A64 = 49.0 / 176,
                        A65 = -5103.0 / 18656;
    static const double B1 = 35.0 / 384, B3 = 500.0 / 1113, B4 = 125.0 / 192,
                        B5 = -2187.0 / 6784, B6 = 11.0 / 84;
    static const double E1 = 71.0 / 57600, E3 = -71.0 / 16695, E4 = 71.0 / 1920,
                        E5 = -17253.0 / 339200, E6 = 22.0 / 525, E7 = -1.0 / 40;

    auto f = [&](const FlowState& s) { return rescaled_rhs(s); };
    auto add = [](const FlowState& s, double h, const std::array<double, 4>& k) {
        FlowState o = s;
        o.tau += h * k[0];
        o.r += h * k[1];
        o.sb += h * k[2];
        o.xi += h * k[3];
        return o;
    };

    Trajectory tr;
    double t = 0.0, h = std::min(0.01, T / 10.0);
    FlowState s = start;
    tr.param.push_back(0.0);
    tr.state.push_back(s);
    tr.p.push_back(p0);
    int guard = 0;
    while (t < T) {
        require(++guard < 2000000, "flow_integrate: too many steps");
        h = std::min(h, T - t);
        auto k1 = f(s);
        auto k2 = f(add(s, h * A21, k1));
        auto k3 = f(add(add(s, h * A31, k1), h * A32, k2));
        auto k4 = f(add(add(add(s, h * A41, k1), h * A42, k2), h * A43, k3));
        auto k5 = f(add(add(add(add(s, h * A51, k1), h * A52, k2), h * A53, k3),
                        h * A54, k4));
        auto k6 = f(add(add(add(add(add(s, h * A61, k1), h * A62, k2), h * A63, k3),
                            h * A64, k4),
                        h * A65, k5));
        FlowState s5 = s;
        s5.tau += h * (B1 * k1[0] + B3 * k3[0] + B4 * k4[0] + B5 * k5[0] + B6 * k6[0]);
        s5.r += h * (B1 * k1[1] + B3 * k3[1] + B4 * k4[1] + B5 * k5[1] + B6 * k6[1]);
        s5.sb += h * (B1 * k1[2] + B3 * k3[2] + B4 * k4[2] + B5 * k5[2] + B6 * k6[2]);
        s5.xi += h * (B1 * k1[3] + B3 * k3[3] + B4 * k4[3] + B5 * k5[3] + B6 * k6[3]);
        auto k7 = f(s5);
        double err = 0.0;
        for (int c = 0; c < 4; ++c) {
            double e = h * (E1 * k1[c] + E3 * k3[c] + E4 * k4[c] + E5 * k5[c] +
                            E6 * k6[c] + E7 * k7[c]);
            err = std::max(err, std::fabs(e));
        }
        double target = tol * std::max(1.0, std::fabs(s.xi));
        if (err <= target) {
            t += h;
            s = s5;
            if (s.tau < 0.0 && s.tau > -1e-12) s.tau = 0.0;
            require(s.tau >= 0.0, "flow_integrate: tau left the boundary");
            tr.param.push_back(t);
            tr.state.push_back(s);
            tr.p.push_back(hamiltonian(s));
        }
        double fac = err > 0 ? 0.9 * std::pow(target / err, 0.2) : 2.0;
        h *= std::min(4.0, std::max(0.1, fac));
        require(h > 1e-14 * std::max(1.0, T),
                "flow_integrate: step-size collapse near r = " + std::to_string(s.r));
    }
    double scale = std::max({1.0, std::fabs(start.xi) * std::fabs(start.xi)});
    for (double pv : tr.p)
        tr.p_drift = std::max(tr.p_drift, std::fabs(pv - p0) / scale);
    return tr;
}

RadialSetReport radial_set_linearize(const HamiltonFlow& flow, int j, int n_samples) {
    const auto& h = flow.slicing().horizons();
    require(j >= 0 && j < h.count(), "radial_set_linearize: bad horizon index");
    RadialSetReport rep;
    rep.horizon_index = j;
    rep.r_j = h.radii[j];
    rep.kappa_j = h.kappas[j];

    const double R = 8.0;
    auto beta0_of = [&](double xi) {
        FlowState s{0.0, rep.r_j, 0.0, xi, 0.0};
        auto rhs = flow.rescaled_rhs(s);
        // d rho_hat / ds = (d rho/d xi) xi_dot; sb and eta stationary here
        double q = xi * xi;
        double rho = fiber_scale(0.0, xi, 0.0);
        double drho_dxi = -xi * (1.0 + pad_deriv(q)) * rho * rho * rho;
        return drho_dxi * rhs[3] / rho;
    };
    double b_plus = beta0_of(R), b_minus = beta0_of(-R);
    rep.xi_sign = (b_plus > b_minus) ? +1 : -1;
    rep.beta0 = std::max(b_plus, b_minus);
    const double xi_star = rep.xi_sign * R;

    // beta_tilde = -(H_p tau / tau)/beta0 with H_p tau / tau = -rho dp/dsb
    auto btilde_of = [&](double scl) {
        double xi = rep.xi_sign * scl;
        auto k = flow.slicing().coeffs(rep.r_j);
        double rho = fiber_scale(0.0, xi, 0.0);
        double tau_rate = rho * 2.0 * k.B * xi;  // = H_p tau / tau
        double q = xi * xi;
        double drho_dxi = -xi * (1.0 + pad_deriv(q)) * rho * rho * rho;
        FlowState s{0.0, rep.r_j, 0.0, xi, 0.0};
        auto rhs = flow.rescaled_rhs(s);
        double beta0 = drho_dxi * rhs[3] / rho;
        return -tau_rate / beta0;
    };
    rep.beta_tilde = btilde_of(R);
    double bt_min = rep.beta_tilde, bt_max = rep.beta_tilde;
    for (int k = 0; k < n_samples; ++k) {
        double scl = 4.0 * std::pow(100.0, double(k) / (n_samples - 1));
        double bt = btilde_of(scl);
        bt_min = std::min(bt_min, bt);
        bt_max = std::max(bt_max, bt);
    }
    rep.beta_tilde_spread = bt_max - bt_min;

    // Jacobian of the rescaled flow at the fixed point, central differences
    // with Richardson extrapolation.
    auto jac = [&](double step) {
        std::array<std::array<double, 4>, 4> J{};
        FlowState base{0.0, rep.r_j, 0.0, xi_star, 0.0};
        for (int c = 0; c < 4; ++c) {
            FlowState sp = base, sm = base;
            double* fp = (c == 0) ? &sp.tau : (c == 1) ? &sp.r : (c == 2) ? &sp.sb : &sp.xi;
            double* fm = (c == 0) ? &sm.tau : (c == 1) ? &sm.r : (c == 2) ? &sm.sb : &sm.xi;
            *fp += step;
            *fm -= step;
            auto rp = flow.rescaled_rhs(sp);
            auto rm = flow.rescaled_rhs(sm);
            for (int rr = 0; rr < 4; ++rr) J[rr][c] = (rp[rr] - rm[rr]) / (2.0 * step);
        }
        return J;
    };
    auto J1 = jac(1e-6), J2 = jac(5e-7);
    double M[16];
    for (int r = 0; r < 4; ++r)
        for (int c = 0; c < 4; ++c)
            M[r * 4 + c] = (4.0 * J2[r][c] - J1[r][c]) / 3.0;
    rep.tau_eigenvalue = M[0];
    double wr[4], wi[4];
    {
        double vl[16], vr[16];
        lapack_int info = LAPACKE_dgeev(LAPACK_ROW_MAJOR, 'N', 'N', 4, M, 4, wr, wi,
                                        vl, 4, vr, 4);
        require(info == 0, "radial_set_linearize: dgeev failed");
    }
    for (int k = 0; k < 4; ++k) {
        require(std::fabs(wi[k]) < 1e-6, "radial_set_linearize: complex eigenvalue");
        rep.eigenvalues[k] = wr[k];
    }
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end());
    // hyperbolicity check (one zero mode along the conserved sb is expected)
    int zeros = 0;
    for (double ev : rep.eigenvalues)
        if (std::fabs(ev) < 1e-5) ++zeros;
    require(zeros <= 1, "radial_set_linearize: non-hyperbolic linearization");

    // Quadratic defining function rho0 = dr^2 + (sb rho)^2 + (eta rho)^2 on
    // the characteristic sheet through L, sampled on shrinking circles.  The
    // sheet near the conormal is the graph r = r(sb, eta) at fixed xi; solve
    // it by Newton in r.
    auto sheet_r = [&](double sb, double eta) {
        double r = rep.r_j;
        for (int it = 0; it < 60; ++it) {
            FlowState s{0.0, r, sb, xi_star, eta};
            double p = flow.hamiltonian(s);
            auto k = flow.slicing().coeffs(r);
            double dp_dr = -(k.dA * sb * sb + 2.0 * k.dB * sb * xi_star +
                             k.dC * xi_star * xi_star) -
                           2.0 * eta * eta / (r * r * r);
            double step = p / dp_dr;
            r -= step;
            if (std::fabs(step) < 1e-14 * std::max(1.0, std::fabs(r))) break;
        }
        return r;
    };
    double eps = 0.05;
    rep.beta_q = -1.0;
    while (eps > 1e-6) {
        double worst = 1e300;
        const int K = 64;
        bool ok = true;
        for (int b = 0; b < K; ++b) {
            double ph = 2.0 * M_PI * (b + 0.5) / K;
            double sb = eps * R * std::cos(ph);
            double eta = eps * R * std::fabs(std::sin(ph));
            double r = sheet_r(sb, eta);
            FlowState s{0.0, r, sb, xi_star, eta};
            if (std::fabs(flow.hamiltonian(s)) > 1e-8 * R * R) {
                ok = false;
                break;
            }
            double rho = fiber_scale(s.sb, s.xi, s.eta);
            double rho0 = (s.r - rep.r_j) * (s.r - rep.r_j) +
                          (s.sb * rho) * (s.sb * rho) +
                          (s.eta * rho) * (s.eta * rho);
            if (rho0 < 1e-24) continue;
            auto rhs = flow.rescaled_rhs(s);
            double q = s.sb * s.sb + s.xi * s.xi + s.eta * s.eta;
            double rho3 = rho * rho * rho;
            double drho = -(1.0 + pad_deriv(q)) * rho3 *
                          (s.sb * rhs[2] + s.xi * rhs[3]);  // eta constant
            double d_rho0 = 2.0 * (s.r - rep.r_j) * rhs[1] +
                            2.0 * (s.sb * rho) * (rhs[2] * rho + s.sb * drho) +
                            2.0 * (s.eta * rho) * (s.eta * drho);
            worst = std::min(worst, d_rho0 / rho0);
        }
        if (ok && worst > 0.0) {
            rep.beta_q = worst;
            rep.beta_q_radius = eps;
            break;
        }
        eps *= 0.5;
    }
    require(rep.beta_q > 0.0,
            "radial_set_linearize: no neighborhood with positive expansion found");

    // future-directedness of the beta0 branch against the time orientation
    {
        auto k = flow.slicing().coeffs(rep.r_j);
        const auto& radii = h.radii;
        // orientation covector: +dt* near the outer horizons, -dt* at and
        // below the inner (blue-shift) ones
        double T_sign = +1.0;
        if (h.count() >= 4 && rep.r_j <= radii[1]) T_sign = -1.0;
        if (h.count() < 4 && h.count() >= 2 && j < h.count() - 1) T_sign = -1.0;
        double pairing = T_sign * xi_star * k.B;  // G(xi* dr, T_sign dt*)
        rep.future_is_beta0_branch = pairing < 0.0;
    }
    return rep;
}

double threshold_regularity(const RadialSetReport& rep, double weight) {
    return 0.5 + rep.beta_tilde * weight;
}

}  // namespace lab
