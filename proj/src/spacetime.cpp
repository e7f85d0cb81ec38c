#include "lab/spacetime.hpp"

#include <algorithm>
#include <cmath>

namespace lab {

void BlackHoleParams::validate() const {
    if (mass <= 0.0) throw std::invalid_argument("mass must be positive");
    if (lambda < 0.0) throw std::invalid_argument("cosmological constant must be >= 0");
    if (family == Family::RN) {
        if (std::fabs(charge) >= mass)
            throw std::invalid_argument("subextremality requires |Q| < M");
    } else {
        if (std::fabs(spin) >= mass)
            throw std::invalid_argument("subextremality requires |a| < M");
    }
}

double eval_mu(const BlackHoleParams& p, double r) {
    if (r <= 0.0) throw std::invalid_argument("eval_mu: r must be positive");
    if (p.family == Family::RN) {
        return 1.0 - 2.0 * p.mass / r + p.charge * p.charge / (r * r) -
               p.lambda * r * r / 3.0;
    }
    const double a2 = p.spin * p.spin;
    return (r * r + a2) * (1.0 - p.lambda * r * r / 3.0) - 2.0 * p.mass * r;
}

double eval_mu_prime(const BlackHoleParams& p, double r) {
    if (r <= 0.0) throw std::invalid_argument("eval_mu_prime: r must be positive");
    if (p.family == Family::RN) {
        return 2.0 * p.mass / (r * r) - 2.0 * p.charge * p.charge / (r * r * r) -
               2.0 * p.lambda * r / 3.0;
    }
    const double a2 = p.spin * p.spin;
    return 2.0 * r - p.lambda * (4.0 * r * r * r + 2.0 * a2 * r) / 3.0 - 2.0 * p.mass;
}

double eval_mu_second(const BlackHoleParams& p, double r) {
    if (r <= 0.0) throw std::invalid_argument("eval_mu_second: r must be positive");
    if (p.family == Family::RN) {
        return -4.0 * p.mass / (r * r * r) +
               6.0 * p.charge * p.charge / (r * r * r * r) - 2.0 * p.lambda / 3.0;
    }
    const double a2 = p.spin * p.spin;
    return 2.0 - p.lambda * (12.0 * r * r + 2.0 * a2) / 3.0;
}

ExtensionParams ExtensionParams::defaults_for(double r1, double r2) {
    ExtensionParams e;
    e.r0 = 0.55 * r1;
    e.delta = 0.05 * r1;
    e.rQm = e.r0 - 0.5 * e.delta;
    e.rQp = 0.5 * (e.r0 + r1);
    e.rmp = 2.5 * r2;
    e.kappa0 = 1.0;
    return e;
}

void ExtensionParams::validate(double r1) const {
    bool ok = (r0 - delta < rQm) && (rQm < r0) && (r0 < rQp) && (rQp < r1) &&
              (delta > 0.0) && (kappa0 > 0.0);
    if (!ok) throw std::invalid_argument("extension radii must satisfy r0-delta < rQ- < r0 < rQ+ < r1");
}

double surface_gravity(const BlackHoleParams& p, double rj) {
    double dp = eval_mu_prime(p, rj);
    double denom = (p.family == Family::RN) ? 2.0 : 2.0 * (rj * rj + p.spin * p.spin);
    double kappa = std::fabs(dp) / denom;
    if (kappa < 1e-10)
        throw std::runtime_error("surface_gravity: degenerate root (extremal limit)");
    return kappa;
}

double photon_sphere_radius(const BlackHoleParams& p) {
    const double M = p.mass, Q = p.charge;
    return 0.5 * (3.0 * M + std::sqrt(9.0 * M * M - 8.0 * Q * Q));
}

// ---------------------------------------------------------------------------
// RadialProfile
// ---------------------------------------------------------------------------

RadialProfile::RadialProfile(const BlackHoleParams& p)
    : params_(p), params_vac_(p), params_outer_(p) {
    params_vac_.lambda = 0.0;
    if (params_outer_.family == Family::Kerr) params_outer_.spin = 0.0;
}

RadialProfile::RadialProfile(const BlackHoleParams& p, const ExtensionParams& ext,
                             bool glue)
    : params_(p), params_vac_(p), params_outer_(p), ext_(ext), glue_(glue) {
    params_vac_.lambda = 0.0;
    if (params_outer_.family == Family::Kerr) params_outer_.spin = 0.0;
    if (glue_ && p.lambda <= 0.0)
        throw std::invalid_argument("gluing requires lambda > 0");
    build_blend();
}

namespace {
// Gluing cutoff.  C^5 joins: anything rougher shows up as a convergence-order
// loss of the evolution in the wake of the gluing zone.
constexpr int kGlueOrder = 5;
double chi_m(double r, double rmp) { return 1.0 - smoothstep(r, rmp, rmp + 1.0, kGlueOrder); }
double chi_m_prime(double r, double rmp) {
    return -smoothstep_deriv(r, rmp, rmp + 1.0, kGlueOrder);
}
double chi_m_second(double r, double rmp) {
    return -smoothstep_second(r, rmp, rmp + 1.0, kGlueOrder);
}
}  // namespace

void RadialProfile::build_blend() {
    const auto& e = *ext_;
    // mu_* = line + H * (mu - line) with line = 2 kappa0 (r - r0) and H a
    // Hermite smoothstep on [r0, rQ+]: matches (0, 2 kappa0) at r0 and
    // (mu, mu') at rQ+, equals the negative line on [r0 - 2 delta, r0], and
    // since mu > line on (r0, rQ+] it has exactly one root there, at r0.
    quintic_used_ = ext_->quintic_blend;
    auto root_count_ok = [&] {
        const double lo = e.r0 - 2.0 * e.delta, hi = e.rQp;
        auto roots = scan_roots(lo, hi, 1e-4 * params_.mass);
        if (roots.size() != 1) return false;
        if (std::fabs(roots[0] - e.r0) > 1e-8) return false;
        return blend(e.r0 - e.delta) < 0.0 && blend(0.5 * (e.r0 + e.rQp)) > 0.0;
    };
    if (!root_count_ok()) {
        if (!quintic_used_) {
            quintic_used_ = true;  // C^2 upgrade
            if (root_count_ok()) return;
        }
        throw std::runtime_error(
            "extended profile: blend produced extra roots or degeneracy");
    }
}

double RadialProfile::blend_H(double r) const {
    const auto& e = *ext_;
    return smoothstep(r, e.r0, e.rQp, quintic_used_ ? 2 : 1);
}

double RadialProfile::blend_H_prime(double r) const {
    const auto& e = *ext_;
    return smoothstep_deriv(r, e.r0, e.rQp, quintic_used_ ? 2 : 1);
}

double RadialProfile::blend_H_second(double r) const {
    const auto& e = *ext_;
    if (r <= e.r0 || r >= e.rQp) return 0.0;
    double w = e.rQp - e.r0;
    double y = (r - e.r0) / w;
    if (quintic_used_) return (120.0 * y * y * y - 180.0 * y * y + 60.0 * y) / (w * w);
    return (6.0 - 12.0 * y) / (w * w);
}

double RadialProfile::blend(double r) const {
    const auto& e = *ext_;
    double line = 2.0 * e.kappa0 * (r - e.r0);
    if (r <= e.r0) return line;
    double H = blend_H(r);
    return line + H * (eval_mu(params_vac_, r) - line);
}

double RadialProfile::dblend(double r) const {
    const auto& e = *ext_;
    double lp = 2.0 * e.kappa0;
    if (r <= e.r0) return lp;
    double line = 2.0 * e.kappa0 * (r - e.r0);
    double H = blend_H(r), Hp = blend_H_prime(r);
    return lp + Hp * (eval_mu(params_vac_, r) - line) +
           H * (eval_mu_prime(params_vac_, r) - lp);
}

double RadialProfile::d2blend(double r) const {
    const auto& e = *ext_;
    if (r <= e.r0) return 0.0;
    double line = 2.0 * e.kappa0 * (r - e.r0);
    double lp = 2.0 * e.kappa0;
    double H = blend_H(r), Hp = blend_H_prime(r), Hpp = blend_H_second(r);
    return Hpp * (eval_mu(params_vac_, r) - line) +
           2.0 * Hp * (eval_mu_prime(params_vac_, r) - lp) +
           H * eval_mu_second(params_vac_, r);
}

double RadialProfile::mu(double r) const {
    if (ext_ && r < ext_->rQp) return blend(r);
    if (!glue_) return eval_mu(params_vac_, r);
    double chi = chi_m(r, ext_ ? ext_->rmp : 0.0);
    if (chi >= 1.0) return eval_mu(params_vac_, r);
    if (chi <= 0.0) return eval_mu(params_outer_, r);
    return chi * eval_mu(params_vac_, r) + (1.0 - chi) * eval_mu(params_outer_, r);
}

double RadialProfile::dmu(double r) const {
    if (ext_ && r < ext_->rQp) return dblend(r);
    if (!glue_) return eval_mu_prime(params_vac_, r);
    double rmp = ext_ ? ext_->rmp : 0.0;
    double chi = chi_m(r, rmp);
    if (chi >= 1.0) return eval_mu_prime(params_vac_, r);
    if (chi <= 0.0) return eval_mu_prime(params_outer_, r);
    double dv = eval_mu(params_vac_, r) - eval_mu(params_outer_, r);
    return chi * eval_mu_prime(params_vac_, r) +
           (1.0 - chi) * eval_mu_prime(params_outer_, r) + chi_m_prime(r, rmp) * dv;
}

double RadialProfile::d2mu(double r) const {
    if (ext_ && r < ext_->rQp) return d2blend(r);
    if (!glue_) return eval_mu_second(params_vac_, r);
    double rmp = ext_ ? ext_->rmp : 0.0;
    double chi = chi_m(r, rmp);
    if (chi >= 1.0) return eval_mu_second(params_vac_, r);
    if (chi <= 0.0) return eval_mu_second(params_outer_, r);
    double dv = eval_mu(params_vac_, r) - eval_mu(params_outer_, r);
    double dv1 = eval_mu_prime(params_vac_, r) - eval_mu_prime(params_outer_, r);
    return chi * eval_mu_second(params_vac_, r) +
           (1.0 - chi) * eval_mu_second(params_outer_, r) +
           2.0 * chi_m_prime(r, rmp) * dv1 + chi_m_second(r, rmp) * dv;
}

std::vector<double> RadialProfile::scan_roots(double lo, double hi, double step) const {
    std::vector<double> out;
    double prev = mu(lo);
    for (double r = lo + step; r <= hi + 0.5 * step; r += step) {
        double rr = std::min(r, hi);
        double cur = mu(rr);
        if (prev == 0.0) out.push_back(rr - step);
        if (prev * cur < 0.0) {
            double a = rr - step, b = rr, fa = prev;
            for (int it = 0; it < 200; ++it) {
                double m = 0.5 * (a + b), fm = mu(m);
                if (fa * fm <= 0.0)
                    b = m;
                else
                    a = m, fa = fm;
                if (b - a < 1e-15 * std::max(1.0, std::fabs(m))) break;
            }
            out.push_back(0.5 * (a + b));
        }
        prev = cur;
    }
    return out;
}

// ---------------------------------------------------------------------------
// find_horizons
// ---------------------------------------------------------------------------

HorizonStructure find_horizons(const BlackHoleParams& p, const ExtensionParams* ext) {
    p.validate();
    const double M = p.mass;
    double scan_hi = (p.lambda > 0.0) ? 2.2 * std::sqrt(3.0 / p.lambda) : 8.0 * M;

    std::vector<double> roots;
    if (ext) {
        ext->validate(/*r1=*/[&] {
            BlackHoleParams vac = p;
            vac.lambda = 0.0;
            auto h = find_horizons(vac);
            return h.radii.front();
        }());
        RadialProfile prof(p, *ext, p.lambda > 0.0);
        roots = prof.scan_roots(ext->r0 - 2.0 * ext->delta, scan_hi, 1e-3 * M);
        HorizonStructure out;
        for (double r : roots) {
            double dp = prof.dmu(r);
            if (std::fabs(dp) < 1e-8)
                throw std::runtime_error("find_horizons: degenerate root (extremality)");
            out.radii.push_back(r);
            double denom = (p.family == Family::RN) ? 2.0 : 2.0 * (r * r + p.spin * p.spin);
            out.kappas.push_back(std::fabs(dp) / denom);
            out.signs.push_back(dp > 0 ? -1 : 1);
        }
        int expected = (p.lambda > 0.0) ? 4 : 3;
        if (out.count() != expected)
            throw std::runtime_error("find_horizons: expected root count unavailable");
        return out;
    }

    RadialProfile prof(p);
    BlackHoleParams base = p;  // includes lambda
    auto mu_full = [&](double r) { return eval_mu(base, r); };
    // Sign-change scan with bracketed bisection.
    double lo = 1e-6 * M, step = 1e-3 * M;
    std::vector<double> rts;
    double prev = mu_full(lo);
    for (double r = lo + step; r <= scan_hi; r += step) {
        double cur = mu_full(r);
        if (prev * cur < 0.0) {
            double a = r - step, b = r, fa = prev;
            for (int it = 0; it < 200; ++it) {
                double m = 0.5 * (a + b), fm = mu_full(m);
                if (fa * fm <= 0.0)
                    b = m;
                else
                    a = m, fa = fm;
                if (b - a < 1e-15 * std::max(1.0, m)) break;
            }
            rts.push_back(0.5 * (a + b));
        }
        prev = cur;
    }
    HorizonStructure out;
    for (double r : rts) {
        double dp = eval_mu_prime(base, r);
        if (std::fabs(dp) < 1e-8)
            throw std::runtime_error("find_horizons: degenerate root (extremality)");
        out.radii.push_back(r);
        double denom = (p.family == Family::RN) ? 2.0 : 2.0 * (r * r + p.spin * p.spin);
        out.kappas.push_back(std::fabs(dp) / denom);
        out.signs.push_back(dp > 0 ? -1 : 1);
    }
    bool charged = (p.family == Family::RN) ? (p.charge != 0.0) : (p.spin != 0.0);
    int expected = (p.lambda > 0.0) ? (charged ? 3 : 2) : (charged ? 2 : 1);
    if (out.count() != expected)
        throw std::runtime_error("find_horizons: expected root count unavailable for given lambda");
    return out;
}

// ---------------------------------------------------------------------------
// Slicing
// ---------------------------------------------------------------------------

Slicing::Slicing(RadialProfile profile, HorizonStructure horizons,
                 SheetConvention sheet, double domain_lo, double domain_hi)
    : profile_(std::move(profile)), horizons_(std::move(horizons)), lo_(domain_lo),
      hi_(domain_hi) {
    const int m = horizons_.count();
    require(m >= 1, "slicing: no horizons");
    sheet_.resize(m);
    // Evolution sheet: ingoing at every root; the outermost root takes the
    // outgoing sheet only when the domain ends in an outflow collar just
    // past it (glued runs).  Far-field runs taper W to the static chart
    // instead and need the ingoing sheet at the event horizon.
    bool collar_end = hi_ <= horizons_.radii.back() + 2.5;
    for (int j = 0; j < m; ++j) {
        sheet_[j] = (sheet == SheetConvention::Paper) ? horizons_.signs[j]
                    : (j == m - 1 && m > 1 && collar_end) ? +1
                                                          : -1;
    }

    // Plateau half-widths: cover the 2*delta bands but keep clear of neighbors.
    double delta = profile_.has_extension() ? profile_.extension().delta
                                            : 0.025 * horizons_.radii.front();
    for (int j = 0; j < m; ++j) {
        double gap_lo = (j == 0) ? 1e30 : horizons_.radii[j] - horizons_.radii[j - 1];
        double gap_hi = (j == m - 1) ? 1e30 : horizons_.radii[j + 1] - horizons_.radii[j];
        double b = std::min(2.5 * delta, 0.3 * std::min(gap_lo, gap_hi));
        require(b >= 2.0 * delta * 0.999,
                "slicing: plateau width collision; reduce delta");
        plateaus_.push_back({horizons_.radii[j] - b, horizons_.radii[j] + b, sheet_[j]});
    }
    // Transitions between consecutive plateaus.  A wide gap is crossed via a
    // static zone (W identically 0 there, so the shift integral vanishes and
    // the chart is the unmodified static one a unit distance past the root).
    for (int j = 0; j + 1 < m; ++j) {
        double t_lo = plateaus_[j].hi, t_hi = plateaus_[j + 1].lo;
        double rj = horizons_.radii[j], rj1 = horizons_.radii[j + 1];
        bool wide = (rj1 - rj) > 2.5 && sheet_[j] != sheet_[j + 1];
        if (wide) {
            transitions_.push_back({t_lo, rj + 1.0, sheet_[j], 0});
            transitions_.push_back({rj1 - 1.0, t_hi, 0, sheet_[j + 1]});
        } else if (sheet_[j] != sheet_[j + 1]) {
            transitions_.push_back({t_lo, t_hi, sheet_[j], sheet_[j + 1]});
        }
    }
    // Trailing taper to the static chart for domains running far outward.
    if (hi_ > horizons_.radii.back() + 2.5 && sheet_.back() == -1) {
        transitions_.push_back(
            {plateaus_.back().hi, horizons_.radii.back() + 1.0, -1, 0});
    }

    // Tilt amplitudes.  The outer one is computed from the profile beyond
    // the inner horizon only, so charts with different artificial extensions
    // agree identically there; the inner one covers the extension region and
    // transitions to the outer value inside the r1 plateau.
    auto mu_max_over = [&](double a, double b) {
        double mx = 0.0;
        int ng = 4001;
        for (int i = 0; i < ng; ++i) {
            double r = a + (b - a) * i / (ng - 1);
            mx = std::max(mx, profile_.mu(r));
        }
        return mx;
    };
    if (m >= 2 && profile_.has_extension()) {
        int j1 = 1;  // inner (Cauchy) horizon
        double b1 = horizons_.radii[j1] - plateaus_[j1].lo;
        ct_lo_ = horizons_.radii[j1] - 0.9 * b1;
        ct_hi_ = horizons_.radii[j1] - 0.45 * b1;
        c_out_ = std::min(1.0, 1.0 / std::max(mu_max_over(ct_hi_, hi_), 1e-6));
        c_in_ = std::min(1.0, 1.0 / std::max(mu_max_over(lo_, ct_hi_), 1e-6));
    } else {
        c_out_ = std::min(1.0, 1.0 / std::max(mu_max_over(lo_, hi_), 1e-6));
        c_in_ = c_out_;
        ct_lo_ = lo_ - 1.0;
        ct_hi_ = lo_ - 0.5;
    }
}

double Slicing::tilt(double r) const {
    if (c_in_ == c_out_ || r >= ct_hi_) return c_out_;
    if (r <= ct_lo_) return c_in_;
    return c_in_ + (c_out_ - c_in_) * smoothstep(r, ct_lo_, ct_hi_, taper_N_);
}

double Slicing::dtilt(double r) const {
    if (c_in_ == c_out_ || r >= ct_hi_ || r <= ct_lo_) return 0.0;
    return (c_out_ - c_in_) * smoothstep_deriv(r, ct_lo_, ct_hi_, taper_N_);
}

double Slicing::W(double r) const {
    double level = plateaus_.front().sign;
    std::size_t ip = 0, it = 0;
    while (ip < plateaus_.size() || it < transitions_.size()) {
        bool take_plateau =
            it >= transitions_.size() ||
            (ip < plateaus_.size() && plateaus_[ip].lo <= transitions_[it].lo);
        if (take_plateau) {
            const auto& p = plateaus_[ip++];
            if (r < p.lo) return level;
            if (r <= p.hi) return p.sign;
            level = p.sign;
        } else {
            const auto& t = transitions_[it++];
            if (r < t.lo) return level;
            if (r <= t.hi)
                return t.from + (t.to - t.from) * smoothstep(r, t.lo, t.hi, taper_N_);
            level = t.to;
        }
    }
    return level;
}

double Slicing::dW(double r) const {
    for (const auto& t : transitions_) {
        if (r > t.lo && r < t.hi)
            return (t.to - t.from) * smoothstep_deriv(r, t.lo, t.hi, taper_N_);
    }
    return 0.0;
}

double Slicing::Ftilde_prime(double r) const { return -W(r) * tilt(r); }

double Slicing::F_prime(double r) const { return W(r) / profile_.mu(r); }

Slicing::Coeffs Slicing::coeffs(double r) const {
    Coeffs k{};
    k.mu = profile_.mu(r);
    k.dmu = profile_.dmu(r);
    k.W = W(r);
    const double Wp = dW(r);
    const double c = tilt(r), cp = dtilt(r);
    const double w2 = k.W * k.W;
    k.C = -k.mu;
    k.dC = -k.dmu;
    k.B = k.W * (1.0 - k.mu * c);
    k.dB = Wp * (1.0 - k.mu * c) - k.W * (k.dmu * c + k.mu * cp);
    if (Wp == 0.0 && std::fabs(std::fabs(k.W) - 1.0) < 1e-14) {
        // plateau: (1 - W^2)/mu vanishes identically
        k.A = c * (2.0 - k.mu * c);
        k.dA = 2.0 * cp - k.dmu * c * c - 2.0 * k.mu * c * cp;
    } else {
        k.A = (1.0 - w2) / k.mu + w2 * c * (2.0 - k.mu * c);
        k.dA = (-2.0 * k.W * Wp * k.mu - (1.0 - w2) * k.dmu) / (k.mu * k.mu) +
               2.0 * k.W * Wp * c * (2.0 - k.mu * c) +
               w2 * (2.0 * cp - k.dmu * c * c - 2.0 * k.mu * c * cp);
    }
    return k;
}

double Slicing::F(double r) const {
    // Anchor: F = 0 on the first W == 0 stretch if one exists, otherwise at
    // the outer domain end.
    double anchor = hi_;
    for (auto& t : transitions_)
        if (t.to == 0) anchor = t.hi + 0.25;
    auto integrand = [&](double x) { return W(x) / profile_.mu(x); };
    // Integrate from anchor to r, subtracting the log singularity near each
    // crossed root analytically: near r_j, W/mu = s_j/(mu'(r_j)(x-r_j)) + smooth.
    double lo = std::min(r, anchor), hi = std::max(r, anchor);
    double total = 0.0;
    // Collect crossed roots.
    std::vector<int> crossed;
    for (int j = 0; j < horizons_.count(); ++j) {
        double rj = horizons_.radii[j];
        if (rj > lo && rj < hi) crossed.push_back(j);
    }
    double eps = 1e-3;
    double cur = lo;
    for (int j : crossed) {
        double rj = horizons_.radii[j];
        double dmu_j = profile_.dmu(rj);
        double sj = sheet_[j];
        // smooth part on [cur, rj - eps] and the analytic log piece across.
        auto smooth_part = [&](double x) {
            return integrand(x) - sj / (dmu_j * (x - rj));
        };
        if (rj - eps > cur)
            total += adaptive_simpson(integrand, cur, rj - eps, 1e-11);
        // Across the root: integral of the smooth remainder plus the
        // principal-value log term, which cancels by symmetry of the window.
        total += adaptive_simpson(smooth_part, rj - eps, rj + eps, 1e-11);
        cur = rj + eps;
    }
    total += adaptive_simpson(integrand, cur, hi, 1e-11);
    return (r < anchor) ? -total : total;
}

Slicing::CausalReport Slicing::verify_causal(int n_grid) const {
    CausalReport rep;
    rep.min_A_bands = 1e300;
    rep.min_A_global = 1e300;
    const auto& rs = horizons_.radii;
    double delta = profile_.has_extension() ? profile_.extension().delta
                                            : 0.025 * rs.front();
    const int m = horizons_.count();
    // Interior strip bounded by the Cauchy and event horizons.
    double strip_lo = 0.0, strip_hi = 0.0;
    if (m >= 4) {
        strip_lo = rs[1];
        strip_hi = rs[2];
    } else if (m >= 2) {
        strip_lo = rs[m - 2];
        strip_hi = rs[m - 1];
    }
    auto in_bands = [&](double r) {
        if (m >= 4) {
            return (r >= rs[0] - 2 * delta && r <= rs[1] + 2 * delta) ||
                   (r >= rs[2] - 2 * delta && r <= rs[3] + 2 * delta);
        }
        return r >= rs.back() - 2 * delta && r <= rs.back() + 2 * delta;
    };
    for (int i = 0; i < n_grid; ++i) {
        double r = lo_ + (hi_ - lo_) * i / (n_grid - 1);
        auto k = coeffs(r);
        double det_err = std::fabs(k.A * k.C - k.B * k.B + 1.0);
        rep.max_det_error = std::max(rep.max_det_error, det_err);
        if (k.A < rep.min_A_global) {
            rep.min_A_global = k.A;
            rep.worst_r_global = r;
        }
        if (in_bands(r) && k.A < rep.min_A_bands) {
            rep.min_A_bands = k.A;
            rep.worst_r_bands = r;
        }
        // -dr must be timelike throughout the strip; its orientation is fixed
        // against dt* near the event horizon, where dt* is future-timelike on
        // both sheet conventions.
        if (strip_hi > strip_lo && r > strip_lo + 1e-9 && r < strip_hi - 1e-9) {
            bool timelike = k.C > 0.0;
            bool oriented = true;
            if (r >= strip_hi - 2 * delta) oriented = (-k.B > 0.0);
            if (!(timelike && oriented)) rep.min_dr_timelike_ok = false;
        }
    }
    return rep;
}

// ---------------------------------------------------------------------------
// builders
// ---------------------------------------------------------------------------

CoordinateMaps build_coordinate_maps(const BlackHoleParams& p,
                                     const ExtensionParams& ext, bool glue) {
    auto horizons = find_horizons(p, &ext);
    RadialProfile prof(p, ext, glue && p.lambda > 0.0);
    double lo = ext.r0 - 2.0 * ext.delta;
    double hi = horizons.radii.back() + 2.0 * ext.delta;
    Slicing sl(std::move(prof), std::move(horizons), SheetConvention::Paper, lo, hi);
    CoordinateMaps maps{std::move(sl), {}};
    maps.report = maps.slicing.verify_causal();
    if (maps.report.min_A_bands <= 0.0)
        throw std::runtime_error("coordinate maps: dt* fails to be timelike on band near r=" +
                                 std::to_string(maps.report.worst_r_bands));
    return maps;
}

ExtendedMetric build_extended_metric(const BlackHoleParams& p,
                                     const ExtensionParams& ext) {
    if (p.lambda <= 0.0)
        throw std::invalid_argument("extended metric requires lambda > 0 for the gluing");
    auto horizons = find_horizons(p, &ext);
    RadialProfile prof(p, ext, true);
    double lo = ext.r0 - ext.delta;
    double hi = horizons.radii.back() + ext.delta;
    Slicing sl(std::move(prof), std::move(horizons), SheetConvention::Evolution, lo, hi);
    ExtendedMetric m{std::move(sl), {}};
    m.report = m.slicing.verify_causal();
    if (m.report.min_A_global <= 0.0)
        throw std::runtime_error("extended metric: slices fail to be spacelike at r=" +
                                 std::to_string(m.report.worst_r_global));
    return m;
}

ExtendedMetric build_exterior_metric(const BlackHoleParams& p, double r_lo,
                                     double r_hi) {
    BlackHoleParams vac = p;
    vac.lambda = 0.0;
    auto horizons = find_horizons(vac);
    double r2 = horizons.radii.back();
    require(r_lo < r2 && r_hi > r2 + 2.0, "exterior metric: domain must straddle the event horizon");
    // Keep only the event horizon: the domain never reaches the inner root.
    HorizonStructure h2;
    h2.radii = {r2};
    h2.kappas = {horizons.kappas.back()};
    h2.signs = {horizons.signs.back()};
    RadialProfile prof(vac);
    Slicing sl(std::move(prof), std::move(h2), SheetConvention::Evolution, r_lo, r_hi);
    ExtendedMetric m{std::move(sl), {}};
    m.report = m.slicing.verify_causal();
    if (m.report.min_A_global <= 0.0)
        throw std::runtime_error("exterior metric: slices fail to be spacelike at r=" +
                                 std::to_string(m.report.worst_r_global));
    return m;
}

}  // namespace lab
