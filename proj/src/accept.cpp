#include "lab/accept.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>

#include "json.hpp"
#include "lab/bflow.hpp"
#include "lab/carter.hpp"
#include "lab/evolve.hpp"
#include "lab/logsobolev.hpp"
#include "lab/runner.hpp"
#include "lab/spectral.hpp"

namespace lab {

namespace {

using clock_type = std::chrono::steady_clock;

std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4g", v);
    return buf;
}

struct Suite {
    AcceptanceReport report;
    clock_type::time_point start = clock_type::now();
    double budget_s = 1e9;
    double tol_scale = 1.0;

    double elapsed() const {
        return std::chrono::duration<double>(clock_type::now() - start).count();
    }
    bool over_budget() const { return elapsed() > budget_s; }

    void add(int crit, const std::string& name, double measured,
             const std::string& expected, bool pass, const std::string& note = "") {
        CheckResult c{crit, name, measured, expected, pass, note};
        std::printf("[%s] criterion %2d  %-38s measured=%-12.6g expected %s%s%s\n",
                    pass ? "PASS" : "FAIL", crit, name.c_str(), measured,
                    expected.c_str(), note.empty() ? "" : "  # ", note.c_str());
        std::fflush(stdout);
        report.checks.push_back(std::move(c));
    }
    void skip(int crit, const std::string& name, const std::string& why) {
        std::printf("[SKIP] criterion %2d  %-38s (%s)\n", crit, name.c_str(),
                    why.c_str());
        std::fflush(stdout);
        report.partial = true;
    }
};

struct GluedLab {
    BlackHoleParams params;
    ExtensionParams ext;
    ExtendedMetric metric;
    double r1, r2;
};

GluedLab make_glued(const LabConfig& cfg) {
    auto p = cfg.black_hole();
    auto ext = cfg.extension();
    auto metric = build_extended_metric(p, ext);
    double r1 = metric.horizons().radii[1];
    double r2 = metric.horizons().radii[2];
    return {p, ext, std::move(metric), r1, r2};
}

// vacuum profile with the inner extension but no cosmological gluing, domain
// running to a far radiating boundary
struct InteriorLab {
    ExtensionParams ext;
    Slicing slicing;
    HorizonStructure horizons;
};

InteriorLab make_interior(const LabConfig& cfg, double r_out) {
    auto p = cfg.black_hole();
    p.lambda = 0.0;
    auto ext = cfg.extension();
    auto horizons = find_horizons(p, &ext);
    RadialProfile prof(p, ext, false);
    Slicing sl(std::move(prof), horizons, SheetConvention::Evolution,
               ext.r0 - ext.delta, r_out);
    return {ext, std::move(sl), std::move(horizons)};
}

std::vector<double> abs_series(const ProbeSeries& ps) {
    std::vector<double> a;
    a.reserve(ps.u.size());
    for (auto& z : ps.u) a.push_back(std::abs(z));
    return a;
}

// ---------------------------------------------------------------------------

void criterion_1(Suite& s, const LabConfig& cfg) {
    double tol = 1e-10 * s.tol_scale;
    auto t0 = clock_type::now();
    auto p = cfg.black_hole();
    p.lambda = 0.0;
    auto h = find_horizons(p);
    double M = p.mass, Q = p.charge;
    double r1c = M - std::sqrt(M * M - Q * Q);
    double r2c = M + std::sqrt(M * M - Q * Q);
    auto mup = [&](double r) { return 2 * M / (r * r) - 2 * Q * Q / (r * r * r); };
    double k1c = std::fabs(mup(r1c)) / 2.0, k2c = std::fabs(mup(r2c)) / 2.0;
    double err = std::max(
        {std::fabs(h.radii[0] - r1c), std::fabs(h.radii[1] - r2c),
         std::fabs(h.kappas[0] - k1c), std::fabs(h.kappas[1] - k2c)});
    double secs = std::chrono::duration<double>(clock_type::now() - t0).count();
    s.add(1, "horizon algebra vs closed form", err, "< 1e-10", err < tol);
    s.add(1, "horizon finding runtime [s]", secs, "< 1", secs < 1.0);
}

void criterion_2(Suite& s, const LabConfig& cfg, bool quick) {
    auto p = cfg.black_hole();
    p.lambda = 0.0;

    // l = 0: pinned resolution and window
    {
        auto metric = build_exterior_metric(p, 1.4, 160.0);
        Grid g{1.4, 160.0, 1601};
        WaveOperator1D op(metric.slicing, g, 0, OuterBoundary::Radiating,
                          cfg.get("grid.ko"));
        InitialData d;
        d.center = 3.6;
        d.width = 0.5;
        d.type = InitialData::Type::Ingoing;
        EvolveConfig e;
        e.T = 300.0;
        e.probe_dt = 0.5;
        e.probe_radii = {10.0};
        auto res = evolve(op, d, e);
        auto fit = fit_decay(res.times, abs_series(res.probes[0]), 100.0, 300.0);
        double tol = 0.15 * s.tol_scale;
        s.add(2, "price tail l=0 (n=1601, T=300)", fit.exponent,
              "3 +- " + fmt3(tol),
              std::fabs(fit.exponent - 3.0) < tol);
    }
    // l = 1: its own domain and window (the ringdown epoch lasts past t=180)
    {
        double R = quick ? 240.0 : 360.0;
        int n = quick ? 2401 : 3601;
        double T = quick ? 360.0 : 500.0;
        auto metric = build_exterior_metric(p, 1.4, R);
        Grid g{1.4, R, n};
        WaveOperator1D op(metric.slicing, g, 1, OuterBoundary::Radiating,
                          cfg.get("grid.ko"));
        InitialData d;
        d.center = 3.6;
        d.width = 0.5;
        d.type = InitialData::Type::Ingoing;
        EvolveConfig e;
        e.T = T;
        e.probe_dt = 0.5;
        e.probe_radii = {10.0};
        auto res = evolve(op, d, e);
        auto fit = fit_decay(res.times, abs_series(res.probes[0]), 220.0, T - 20.0);
        double tol = 0.3 * s.tol_scale;
        s.add(2, "price tail l=1", fit.exponent, "5 +- " + fmt3(tol),
              std::fabs(fit.exponent - 5.0) < tol);
    }
}

struct InteriorRun {
    EvolveResult res;
    double alpha = 0.0;  // measured exterior exponent
};

InteriorRun interior_run(const LabConfig& cfg, bool quick) {
    auto lab = make_interior(cfg, 160.0);
    int n = quick ? 8001 : 16001;
    Grid g{lab.slicing.domain_lo(), 160.0, n};
    WaveOperator1D op(lab.slicing, g, 0, OuterBoundary::Radiating,
                      cfg.get("grid.ko"));
    double r1 = lab.horizons.radii[1];
    InitialData d;
    d.center = 3.6;
    d.width = 0.5;
    d.type = InitialData::Type::Ingoing;
    EvolveConfig e;
    e.T = 300.0;
    e.probe_dt = 0.5;
    e.window_lo = r1 + 4.0 * g.h();  // resolvable part of the horizon window
    e.window_hi = r1 + 0.14;
    e.probe_radii = {r1 + 0.05, 10.0};
    InteriorRun run{evolve(op, d, e), 0.0};
    auto fit = fit_decay(run.res.times, abs_series(run.res.probes[1]), 100.0, 300.0);
    run.alpha = fit.exponent;
    return run;
}

void criterion_3_5(Suite& s, const LabConfig& cfg, bool quick) {
    auto run = interior_run(cfg, quick);
    auto fsup = fit_decay(run.res.times, run.res.sup_u, 100.0, 300.0);
    s.add(3, "sup |u| index over (r1, r1+d')", fsup.exponent, ">= 1.8",
          fsup.exponent >= 1.8 / s.tol_scale,
          "alpha_ext = " + fmt3(run.alpha));

    auto lb = lift_linfty_bound(run.res.times, run.res.sup_u, run.res.sup_w, 100.0,
                                240.0);
    double target = run.alpha - 1.0 - 0.2 * s.tol_scale;
    s.add(5, "lifted sup-bound exponent", lb.exponent,
          ">= alpha-1.2 = " + fmt3(target), lb.exponent >= target);
    s.add(5, "lifted bound dominates |u|", lb.max_violation, "<= 0 (+rounding)",
          lb.max_violation <= 1e-10);
}

void criterion_4(Suite& s, const LabConfig& cfg, std::uint64_t seed, bool quick) {
    auto lab = make_glued(cfg);
    const double dp = 0.14;
    double r1 = lab.r1;

    struct SeedOutcome {
        double log_exponent, h1_ratio, alpha;
        bool log_bounded;
    };
    std::vector<SeedOutcome> outcomes;
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> cdist(3.2, 3.9), wdist(0.35, 0.6);

    int n = quick ? 1601 : 3201;
    double T = quick ? 200.0 : 300.0;
    for (int k = 0; k < 3; ++k) {
        Grid g{lab.metric.slicing.domain_lo(), lab.metric.slicing.domain_hi(), n};
        WaveOperator1D op(lab.metric.slicing, g, 0, OuterBoundary::Outflow,
                          cfg.get("grid.ko"));
        InitialData d;
        d.center = cdist(rng);
        d.width = wdist(rng);
        d.type = InitialData::Type::Ingoing;
        EvolveConfig e;
        e.T = T;
        e.probe_dt = 0.5;
        e.snap_dt = 2.0;
        e.snap_lo = r1 - dp - 0.05;
        e.snap_hi = r1 + dp + 0.05;
        e.probe_radii = {3.0};
        auto res = evolve(op, d, e);
        auto specs = default_norm_specs(r1 - dp, r1 + dp, 0.1);
        auto series = horizon_regularity_sweep(res, g, specs);
        const NormSeries* slog = nullptr;
        const NormSeries* sh1 = nullptr;
        for (auto& sr : series) {
            if (sr.spec.id == "H0.5+log") slog = &sr;
            if (sr.spec.id == "H1") sh1 = &sr;
        }
        SeedOutcome oc{};
        auto fext = fit_decay(res.times, abs_series(res.probes[0]), 50.0, T);
        oc.alpha = fext.exponent;
        // log-norm: bounded (no growth at late times) and its fitted exponent
        auto flog = fit_decay(slog->t, slog->value, 50.0, T);
        oc.log_exponent = flog.exponent;
        double vmax50 = 0, vall = 0;
        for (std::size_t i = 0; i < slog->t.size(); ++i) {
            vall = std::max(vall, slog->value[i]);
            if (slog->t[i] >= 50.0) vmax50 = std::max(vmax50, slog->value[i]);
        }
        oc.log_bounded = vmax50 <= 1.05 * vall;
        // H1 growth factor over the post-ringdown window
        double h50 = 0;
        for (std::size_t i = 0; i < sh1->t.size(); ++i)
            if (std::fabs(sh1->t[i] - 50.0) < 3.0) h50 = std::max(h50, sh1->value[i]);
        double hmax = 0;
        for (std::size_t i = 0; i < sh1->t.size(); ++i)
            if (sh1->t[i] >= 50.0) hmax = std::max(hmax, sh1->value[i]);
        oc.h1_ratio = hmax / std::max(h50, 1e-300);
        outcomes.push_back(oc);
    }
    double worst_log = 1e300, worst_h1 = 1e300;
    bool bounded = true;
    double alpha = outcomes[0].alpha;
    for (auto& oc : outcomes) {
        worst_log = std::min(worst_log, oc.log_exponent);
        worst_h1 = std::min(worst_h1, oc.h1_ratio);
        bounded = bounded && oc.log_bounded;
    }
    double target = alpha - 1.5 - 0.2 * s.tol_scale;
    s.add(4, "H^{1/2+(0.6)log} window norm bounded", bounded ? 1.0 : 0.0,
          "bounded after ringdown", bounded);
    s.add(4, "H^{1/2+log} fitted exponent", worst_log,
          ">= alpha-1.7 = " + fmt3(target), worst_log >= target,
          "alpha = " + fmt3(alpha));
    s.add(4, "H^1 window growth factor (t >= 50)", worst_h1, ">= 10",
          worst_h1 >= 10.0 / s.tol_scale,
          "blue-shift steepening saturates the grid before t=50; see ledger");

    // threshold dichotomy across resolutions at a late snapshot time
    std::vector<int> ns = quick ? std::vector<int>{1601, 3201}
                                : std::vector<int>{3201, 6401, 12801};
    std::vector<double> h04, h06;
    for (int nn : ns) {
        Grid g{lab.metric.slicing.domain_lo(), lab.metric.slicing.domain_hi(), nn};
        WaveOperator1D op(lab.metric.slicing, g, 0, OuterBoundary::Outflow,
                          cfg.get("grid.ko"));
        InitialData d;
        d.center = 3.6;
        d.width = 0.5;
        d.type = InitialData::Type::Ingoing;
        EvolveConfig e;
        e.T = quick ? 120.0 : 200.0;
        e.probe_dt = 1.0;
        e.snap_dt = e.T;  // final snapshot only
        e.snap_lo = r1 - dp - 0.05;
        e.snap_hi = r1 + dp + 0.05;
        e.probe_radii = {3.0};
        auto res = evolve(op, d, e);
        NormSpec n4;
        n4.s = 0.4;
        n4.window_lo = r1 - dp;
        n4.window_hi = r1 + dp;
        NormSpec n6 = n4;
        n6.s = 0.6;
        const auto& snap = res.snapshots.back();
        std::span<const cdouble> full(snap.u);
        int i0 = g.nearest(n4.window_lo) - snap.i0;
        int i1 = g.nearest(n4.window_hi) - snap.i0;
        std::span<const cdouble> win = full.subspan(i0, i1 - i0 + 1);
        h04.push_back(log_sobolev_norm(win, g.h(), n4));
        h06.push_back(log_sobolev_norm(win, g.h(), n6));
    }
    double worst_h04_dev = 0.0, worst_h06_growth = 1e300;
    for (std::size_t k = 0; k + 1 < ns.size(); ++k) {
        worst_h04_dev = std::max(worst_h04_dev, std::fabs(h04[k + 1] / h04[k] - 1.0));
        worst_h06_growth = std::min(worst_h06_growth, h06[k + 1] / h06[k]);
    }
    s.add(4, "H^0.4 resolution-stable (max dev)", worst_h04_dev, "< 0.05",
          worst_h04_dev < 0.05 * s.tol_scale);
    s.add(4, "H^0.6 resolution-divergent (min ratio)", worst_h06_growth, ">= 1.04",
          worst_h06_growth >= 1.0 + 0.04 / s.tol_scale);
}

void criterion_6(Suite& s, const LabConfig& cfg, bool quick) {
    auto lab = make_glued(cfg);
    int n = quick ? 401 : cfg.get_int("resonances.n");
    int n2 = quick ? 801 : cfg.get_int("resonances.n_check");
    Grid g{lab.metric.slicing.domain_lo(), lab.metric.slicing.domain_hi(), n};
    Grid g2{lab.metric.slicing.domain_lo(), lab.metric.slicing.domain_hi(), n2};
    auto fam = assemble_family(lab.metric.slicing, g, 0);
    auto fam2 = assemble_family(lab.metric.slicing, g2, 0);
    ScanWindow win;
    win.re_lo = -1.0;
    win.re_hi = 1.0;
    win.im_lo = -0.3;
    win.im_hi = 0.1;
    auto regions = MassRegions::from(lab.metric.horizons(), lab.ext.delta);
    auto r1s = resonance_scan(fam, win, regions);
    auto r2s = resonance_scan(fam2, win, regions);

    int n_zero = 0, n_zero2 = 0;
    bool damped = true;
    for (auto& r : r1s) {
        if (std::abs(r.sigma) < 1e-6)
            ++n_zero;
        else if (r.sigma.imag() >= 0.0)
            damped = false;
    }
    for (auto& r : r2s)
        if (std::abs(r.sigma) < 1e-6) ++n_zero2;
    s.add(6, "exactly one eigenvalue |sigma|<1e-6", n_zero, "== 1 (both n)",
          n_zero == 1 && n_zero2 == 1);
    s.add(6, "all other eigenvalues damped", damped ? 1.0 : 0.0, "Im sigma < 0",
          damped);

    // convergence of the reported (non-artifact) set under doubling; modes
    // failing the self-convergence oracle are discretization artifacts and
    // are tagged, mirroring the collar deflation
    int converged = 0, artifacts = 0;
    double zero_drift = 1e300;
    for (auto& r : r1s) {
        double drift = 1e300;
        for (auto& q : r2s) drift = std::min(drift, std::abs(q.sigma - r.sigma));
        if (std::abs(r.sigma) < 1e-6) zero_drift = drift;
        if (drift < 1e-3)
            ++converged;
        else
            ++artifacts;
    }
    s.add(6, "zero-mode drift under doubling", zero_drift, "< 1e-3",
          zero_drift < 1e-3 * s.tol_scale,
          fmt3(converged) + " converged, " +
              fmt3(artifacts) + " tagged artifacts");

    int rank = pole_rank(fam, cdouble(0, 0), 0.05);
    s.add(6, "pole rank at sigma=0 (radius 0.05)", rank, "== 1", rank == 1);

    auto zm = zero_mode_structure(fam, 0.0, regions);
    s.add(6, "zero mode constant on the exterior", zm.exterior_flatness, "< 1e-6",
          zm.exterior_flatness < 1e-6 * s.tol_scale);
}

void criterion_7(Suite& s, const LabConfig& cfg) {
    auto lab = make_glued(cfg);
    Grid g{lab.metric.slicing.domain_lo(), lab.metric.slicing.domain_hi(), 401};
    auto fam = assemble_family(lab.metric.slicing, g, 0);
    auto regions = MassRegions::from(lab.metric.horizons(), lab.ext.delta);
    ScanWindow win;
    win.re_lo = -2.0;
    win.re_hi = 2.0;
    win.im_lo = -0.9;
    win.im_hi = 0.05;
    auto res = resonance_scan(fam, win, regions);
    const Resonance* target = nullptr;
    double best = 0.0;
    for (auto& r : res) {
        if (std::abs(r.sigma) < 1e-5 || r.rank != 1) continue;
        double m = 0;
        for (int i = 0; i < fam.n(); ++i) {
            double rr = fam.grid.r(i);
            if (rr > lab.ext.rQm && rr < lab.ext.rQp) m += std::norm(r.mode[i]);
        }
        if (m > best) {
            best = m;
            target = &r;
        }
    }
    require(target, "criterion 7: no admissible target resonance");
    double bc = 0.5 * (lab.ext.rQm + lab.ext.rQp);
    double bw = 0.45 * (lab.ext.rQp - lab.ext.rQm);
    double e0 = 1e-4;
    auto pr = perturb_resonance(fam, target->sigma, bc, bw,
                                {e0, -e0, 2 * e0, -2 * e0});
    double rel = std::abs(pr.slope_formula - pr.slope_fd) / std::abs(pr.slope_formula);
    s.add(7, "perturbation slope: formula vs FD", rel, "< 0.01",
          rel < 0.01 * s.tol_scale);

    cdouble eni(0.0, 1e-3);
    auto pr2 = perturb_resonance(fam, target->sigma, bc, bw, {eni});
    double im_move = std::fabs((pr2.sigma[0] - pr2.sigma_base).imag());
    double im_expected = std::fabs((pr2.slope_formula * eni).imag());
    s.add(7, "nonreal eps moves sigma off axis", im_move, "> 0",
          im_move > 0.2 * im_expected && im_move > 0.0,
          "predicted " + fmt3(im_expected));
}

void criterion_8(Suite& s, const LabConfig& cfg) {
    double worst_pos = 1e300, worst_spread = 0.0, worst_rel = 0.0, worst_bq = 1e300;
    bool signs_ok = true;
    double ref_product = 0.0;
    bool first = true;
    for (double Q : cfg.get_list("flow.charges")) {
        auto cfg2 = cfg;
        cfg2.set("spacetime.charge", format_g17(Q));
        auto p = cfg2.black_hole();
        auto ext = cfg2.extension();
        auto maps = build_coordinate_maps(p, ext);
        HamiltonFlow flow(maps.slicing);
        const auto& h = maps.slicing.horizons();
        for (int j = 0; j < h.count(); ++j) {
            auto rep = radial_set_linearize(flow, j);
            worst_pos = std::min({worst_pos, rep.beta0, rep.beta_tilde, rep.beta_q});
            worst_spread = std::max(worst_spread, rep.beta_tilde_spread);
            double prod = rep.beta_tilde * h.kappas[j];
            if (first) {
                ref_product = prod;
                first = false;
            }
            worst_rel = std::max(worst_rel, std::fabs(prod - ref_product));
            worst_bq = std::min(worst_bq, rep.beta_q);
            // red-shift horizons carry the future flow on the beta0 branch;
            // blue-shift ones on the opposite branch, with the transversal
            // eigenvalue -2 on the estimate branch
            bool redshift = (j >= h.count() - 2);
            signs_ok = signs_ok && (rep.future_is_beta0_branch == redshift) &&
                       std::fabs(rep.tau_eigenvalue + 2.0) < 1e-5;
        }
    }
    s.add(8, "beta0, beta~, beta_q all positive", worst_pos, "> 0", worst_pos > 0);
    s.add(8, "beta~ constant along each set", worst_spread, "< 1e-6",
          worst_spread < 1e-6 * s.tol_scale);
    s.add(8, "beta~ * kappa universal", worst_rel, "< 1e-6",
          worst_rel < 1e-6 * s.tol_scale);
    s.add(8, "source/saddle sign pattern", signs_ok ? 1.0 : 0.0,
          "red-shift/blue-shift split", signs_ok);
}

void criterion_9(Suite& s, const LabConfig& cfg, std::uint64_t seed) {
    BlackHoleParams p;
    p.family = Family::Kerr;
    p.mass = cfg.get("spacetime.mass");
    p.spin = cfg.get("carter.spin");
    auto rep = commutator_residual(p, cfg.get_int("carter.witnesses"),
                                   cfg.get_int("carter.points"), seed);
    s.add(9, "carter commutator residual (20x50)", rep.max_residual, "< 1e-8",
          rep.max_residual < 1e-8 * s.tol_scale);

    auto chart = KerrChart::build(p);
    double worst = 0.0;
    for (std::uint64_t k : {seed, seed + 1, seed + 2}) {
        auto f = TestFunction::random(k);
        double t = 0.8, r = 2.7, th = 1.2, ph = 1.0;
        auto ex = commutator_once(chart, f, t, r, th, ph);
        auto fd = commutator_fd(chart, f, t, r, th, ph);
        double scale = std::max({std::abs(ex.ab), std::abs(ex.ba), 1.0});
        worst = std::max(worst, std::abs(ex.ab - fd.ab) / scale);
        worst = std::max(worst, std::abs(ex.ba - fd.ba) / scale);
    }
    s.add(9, "exact vs order-8 FD cross-check", worst, "< 1e-6",
          worst < 1e-6 * s.tol_scale);
}

void criterion_10(Suite& s) {
    bool ok = true;
    double worst_c = 0.0;
    for (double l : {1.0, 2.0}) {
        auto rep = check_interpolation_inequalities(l, 1.0, 1.0, 1e6);
        ok = ok && rep.all_ok;
        for (auto& row : rep.rows) worst_c = std::max(worst_c, row.empirical_c);
    }
    s.add(10, "log-weight interpolation inequalities", worst_c,
          "<= AM-GM bound (1 at v=w=1)", ok && worst_c <= 1.0 + 1e-12);
}

void criterion_11(Suite& s, const LabConfig& cfg, bool quick) {
    auto p = cfg.black_hole();
    auto e1 = cfg.extension();
    auto e2 = e1;
    e2.kappa0 = 0.6;
    e2.rQm = e2.r0 - 0.3 * e2.delta;
    int n = quick ? 1601 : 3201;
    auto run_with = [&](const ExtensionParams& e) {
        auto metric = build_extended_metric(p, e);
        Grid g{metric.slicing.domain_lo(), metric.slicing.domain_hi(), n};
        WaveOperator1D op(metric.slicing, g, 0, OuterBoundary::Outflow,
                          cfg.get("grid.ko"));
        InitialData d;
        d.center = 3.6;
        d.width = 0.5;
        d.type = InitialData::Type::Ingoing;
        EvolveConfig ecfg;
        ecfg.T = 25.0;
        ecfg.probe_dt = 0.5;
        ecfg.probe_radii = {0.55, 3.0};
        return evolve(op, d, ecfg);
    };
    auto ra = run_with(e1), rb = run_with(e2);
    double scale = 0, dmax = 0;
    for (std::size_t k = 0; k < ra.times.size(); ++k) {
        for (int pi = 0; pi < 2; ++pi) {
            scale = std::max(scale, std::abs(ra.probes[pi].u[k]));
            dmax = std::max(dmax, std::abs(ra.probes[pi].u[k] - rb.probes[pi].u[k]));
        }
    }
    double rel = dmax / scale;
    double tol = (quick ? 1e-5 : 1e-6) * s.tol_scale;
    s.add(11, "extension-independence of r > r1 probes", rel,
          quick ? "< 1e-5" : "< 1e-6", rel < tol);
}

void criterion_12(Suite& s, const LabConfig& cfg, bool quick) {
    auto lab = make_glued(cfg);
    auto run_at = [&](int n) {
        Grid g{lab.metric.slicing.domain_lo(), lab.metric.slicing.domain_hi(), n};
        WaveOperator1D op(lab.metric.slicing, g, 0, OuterBoundary::Outflow,
                          cfg.get("grid.ko"));
        InitialData d;  // default time-symmetric data: smooth epoch at t = 10
        d.center = 3.6;
        d.width = 0.5;
        EvolveConfig e;
        e.T = 10.0;
        e.probe_dt = 10.0;
        e.snap_dt = 10.0;
        e.probe_radii = {3.0};
        return std::pair{evolve(op, d, e), g};
    };
    int n0 = quick ? 401 : 801;
    auto [ra, ga] = run_at(n0);
    auto [rb, gb] = run_at(2 * n0 - 1);
    auto [rc, gc] = run_at(4 * n0 - 3);
    int ia = ga.nearest(0.5);
    auto diff = [](const std::vector<cdouble>& coarse, const std::vector<cdouble>& fine,
                   int start) {
        double acc = 0.0;
        int cnt = 0;
        for (std::size_t i = start; i < coarse.size(); ++i, ++cnt)
            acc += std::norm(coarse[i] - fine[2 * i]);
        return std::sqrt(acc / cnt);
    };
    double eA = diff(ra.snapshots.back().u, rb.snapshots.back().u, ia);
    double eB = diff(rb.snapshots.back().u, rc.snapshots.back().u, 2 * ia);
    double order = std::log2(eA / eB);
    s.add(12, "self-convergence order (upstream)", order, ">= 3.5",
          order >= 3.5 / s.tol_scale,
          "e(" + std::to_string(n0) + ")=" + fmt3(eA));

    // byte-identical deterministic rerun through the output pipeline
    auto cfg2 = cfg;
    cfg2.set("evolve.T", "5.0");
    cfg2.set("grid.n", "401");
    cfg2.set("evolve.snap_dt", "2.5");
    std::string base = s.report.checks.empty() ? "acc" : "acc";
    auto m1 = run_tasks(cfg2, {"horizons", "evolve"}, "/tmp/lab_accept_rerun_a", 1);
    auto m2 = run_tasks(cfg2, {"horizons", "evolve"}, "/tmp/lab_accept_rerun_b", 1);
    bool identical = m1.output_hashes == m2.output_hashes;
    for (auto& t : m1.tasks) identical = identical && t.status == "ok";
    s.add(12, "deterministic rerun hashes identical", identical ? 1.0 : 0.0,
          "equal", identical);
    (void)base;
}

}  // namespace

AcceptanceReport run_acceptance(const LabConfig& cfg, const AcceptanceOptions& opt) {
    Suite s;
    s.budget_s = opt.budget_minutes * 60.0;
    s.tol_scale = opt.tol_scale;
    std::printf("== acceptance suite (%s, budget %.0f min) ==\n", lab_version(),
                opt.budget_minutes);

    struct Entry {
        int id;
        const char* name;
        std::function<void()> fn;
    };
    std::vector<Entry> entries = {
        {1, "horizon algebra", [&] { criterion_1(s, cfg); }},
        {10, "interpolation inequalities", [&] { criterion_10(s); }},
        {8, "radial-set geometry", [&] { criterion_8(s, cfg); }},
        {9, "carter commutation", [&] { criterion_9(s, cfg, opt.seed); }},
        {7, "resonance perturbation", [&] { criterion_7(s, cfg); }},
        {6, "resonance structure", [&] { criterion_6(s, cfg, opt.quick); }},
        {11, "extension independence", [&] { criterion_11(s, cfg, opt.quick); }},
        {12, "convergence and determinism", [&] { criterion_12(s, cfg, opt.quick); }},
        {2, "price tails", [&] { criterion_2(s, cfg, opt.quick); }},
        {3, "horizon sup decay + lift", [&] { criterion_3_5(s, cfg, opt.quick); }},
        {4, "regularity dichotomy", [&] { criterion_4(s, cfg, opt.seed, opt.quick); }},
    };
    for (auto& e : entries) {
        if (s.over_budget()) {
            s.skip(e.id, e.name, "budget exhausted");
            continue;
        }
        try {
            e.fn();
        } catch (const std::exception& ex) {
            s.add(e.id, e.name, 0.0, "completed", false, ex.what());
        }
    }

    std::printf("== %zu checks, %s%s ==\n", s.report.checks.size(),
                s.report.all_pass() ? "ALL PASS" : "FAILURES PRESENT",
                s.report.partial ? " (PARTIAL: budget exhausted)" : "");
    if (!opt.out_dir.empty()) {
        nlohmann::json j = nlohmann::json::array();
        for (auto& c : s.report.checks) {
            j.push_back({{"criterion", c.criterion},
                         {"name", c.name},
                         {"measured", c.measured},
                         {"expected", c.expected},
                         {"pass", c.pass},
                         {"note", c.note}});
        }
        std::filesystem::create_directories(opt.out_dir);
        std::ofstream out(opt.out_dir + "/acceptance_report.json", std::ios::binary);
        out << j.dump(2) << "\n";
    }
    return s.report;
}

}  // namespace lab
