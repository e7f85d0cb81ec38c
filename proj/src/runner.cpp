#include "lab/runner.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "json.hpp"
#include "lab/bflow.hpp"
#include "lab/carter.hpp"
#include "lab/evolve.hpp"
#include "lab/logsobolev.hpp"
#include "lab/spectral.hpp"

namespace lab {

namespace fs = std::filesystem;
using nlohmann::json;

const char* lab_version() { return "cauchylab 0.3.0"; }

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : path_(path) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += header[i];
    }
    buf_ += "\r\n";
}

void CsvWriter::row(const std::vector<double>& values) {
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (i) buf_ += ',';
        buf_ += format_g17(values[i]);
    }
    buf_ += "\r\n";
}

void CsvWriter::close() {
    if (!open_) return;
    std::ofstream out(path_, std::ios::binary);
    require(out.good(), "csv: cannot open " + path_);
    out << buf_;
    open_ = false;
}

std::uint64_t hash_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    require(in.good(), "hash_file: cannot open " + path);
    std::stringstream ss;
    ss << in.rdbuf();
    return fnv1a(ss.str());
}

namespace {

std::string hex64(std::uint64_t v) {
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

struct TaskContext {
    const LabConfig& cfg;
    std::string out_dir;
    std::uint64_t seed;
    RunManifest* manifest;

    std::string file(const std::string& name) const { return out_dir + "/" + name; }
    void record_output(const std::string& path) const {
        manifest->output_hashes[fs::path(path).filename().string()] =
            hex64(hash_file(path));
    }
};

void task_horizons(const TaskContext& ctx) {
    auto p = ctx.cfg.black_hole();
    auto ext = ctx.cfg.extension();
    auto h = (p.lambda > 0.0) ? find_horizons(p, &ext) : [&] {
        auto base = find_horizons(p, &ext);
        return base;
    }();
    json j;
    j["radii"] = h.radii;
    j["kappas"] = h.kappas;
    j["signs"] = h.signs;
    auto path = ctx.file("horizons.json");
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << "\n";
    out.close();
    ctx.record_output(path);
}

struct EvolveSetup {
    ExtendedMetric metric;
    Grid grid;
    InitialData data;
    EvolveConfig ecfg;
    int ell;
};

EvolveSetup evolve_setup(const LabConfig& cfg, int n_override = 0) {
    auto p = cfg.black_hole();
    auto ext = cfg.extension();
    auto metric = build_extended_metric(p, ext);
    int n = n_override > 0 ? n_override : cfg.get_int("grid.n");
    Grid g{metric.slicing.domain_lo(), metric.slicing.domain_hi(), n};
    const auto& h = metric.horizons();
    double r1 = h.radii[1], r2 = h.radii[2];

    InitialData d;
    d.width = cfg.get("evolve.data_width");
    d.amplitude = cfg.get("evolve.data_amplitude");
    d.center = cfg.get_str("evolve.data_center") == "auto"
                   ? r2 + 2.0
                   : cfg.get("evolve.data_center");
    auto type = cfg.get_str("evolve.data_type");
    require(type == "time-symmetric" || type == "ingoing",
            "config: evolve.data_type must be time-symmetric or ingoing");
    d.type = type == "ingoing" ? InitialData::Type::Ingoing
                               : InitialData::Type::TimeSymmetric;
    d.validate_support(r2, h.radii[3]);

    EvolveConfig e;
    e.T = cfg.get("evolve.T");
    e.cfl = cfg.get("grid.cfl");
    e.probe_dt = cfg.get("evolve.probe_dt");
    e.snap_dt = cfg.get("evolve.snap_dt");
    double dp = cfg.get("evolve.delta_probe");
    e.window_lo = r1 + 4.0 * g.h();  // resolvable part of the horizon window
    e.window_hi = r1 + dp;
    e.probe_radii = {r1 - dp, r1 - 0.5 * dp, r1 + 0.5 * dp, r1 + dp};
    for (double rp : cfg.get_list("evolve.probes")) e.probe_radii.push_back(rp);
    return {std::move(metric), g, d, e, cfg.get_int("evolve.ell")};
}

void write_probes_csv(const TaskContext& ctx, const std::string& name,
                      const EvolveResult& res) {
    CsvWriter csv(ctx.file(name), {"t_star", "r_probe", "re_u", "im_u", "abs_u"});
    for (std::size_t p = 0; p < res.probes.size(); ++p) {
        for (std::size_t k = 0; k < res.times.size(); ++k) {
            auto z = res.probes[p].u[k];
            csv.row({res.times[k], res.probes[p].r, z.real(), z.imag(), std::abs(z)});
        }
    }
    csv.close();
    ctx.record_output(ctx.file(name));
}

void task_evolve(const TaskContext& ctx) {
    auto setup = evolve_setup(ctx.cfg);
    WaveOperator1D op(setup.metric.slicing, setup.grid, setup.ell,
                      OuterBoundary::Outflow, ctx.cfg.get("grid.ko"));
    auto res = evolve(op, setup.data, setup.ecfg);
    write_probes_csv(ctx, "probes.csv", res);

    // snapshots (if enabled): one CSV per snapshot
    for (std::size_t s = 0; s < res.snapshots.size(); ++s) {
        char name[64];
        std::snprintf(name, sizeof name, "snapshot_%04zu.csv", s);
        CsvWriter csv(ctx.file(name), {"r", "re_u", "im_u"});
        const auto& snap = res.snapshots[s];
        for (std::size_t i = 0; i < snap.u.size(); ++i) {
            csv.row({setup.grid.r(snap.i0 + static_cast<int>(i)), snap.u[i].real(),
                     snap.u[i].imag()});
        }
        csv.close();
        ctx.record_output(ctx.file(name));
    }

    // decay fits on the exterior probes
    json j;
    j["dt"] = res.dt;
    j["steps"] = res.steps;
    double t_lo = std::max(50.0, 0.3 * setup.ecfg.T);
    double t_hi = setup.ecfg.T;
    json fits = json::array();
    for (auto& ps : res.probes) {
        std::vector<double> a;
        for (auto& z : ps.u) a.push_back(std::abs(z));
        try {
            auto fit = fit_decay(res.times, a, t_lo, t_hi);
            fits.push_back({{"r", ps.r},
                            {"exponent", fit.exponent},
                            {"ci95", fit.ci95},
                            {"residual", fit.residual},
                            {"envelope", fit.envelope_used},
                            {"spans_decade", fit.spans_decade}});
        } catch (const std::exception& e) {
            fits.push_back({{"r", ps.r}, {"error", e.what()}});
        }
    }
    j["fits"] = fits;
    if (!res.sup_u.empty()) {
        try {
            auto fs2 = fit_decay(res.times, res.sup_u, t_lo, t_hi);
            j["sup_window_exponent"] = fs2.exponent;
        } catch (const std::exception& e) {
            j["sup_window_exponent_error"] = e.what();
        }
    }
    auto path = ctx.file("evolve_summary.json");
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << "\n";
    out.close();
    ctx.record_output(path);
}

void task_norms(const TaskContext& ctx) {
    auto setup = evolve_setup(ctx.cfg, ctx.cfg.get_int("norms.n"));
    setup.ecfg.T = ctx.cfg.get("norms.T");
    setup.ecfg.snap_dt = 2.0;
    const auto& h = setup.metric.horizons();
    double r1 = h.radii[1];
    double dp = ctx.cfg.get("evolve.delta_probe");
    setup.ecfg.snap_lo = r1 - dp - 0.05;
    setup.ecfg.snap_hi = r1 + dp + 0.05;
    WaveOperator1D op(setup.metric.slicing, setup.grid, setup.ell,
                      OuterBoundary::Outflow, ctx.cfg.get("grid.ko"));
    auto res = evolve(op, setup.data, setup.ecfg);

    auto specs = default_norm_specs(r1 - dp, r1 + dp, ctx.cfg.get("norms.eps"));
    auto series = horizon_regularity_sweep(res, setup.grid, specs);

    CsvWriter csv(ctx.file("norms.csv"), {"t_star", "spec_id", "value"});
    json table = json::array();
    for (std::size_t q = 0; q < series.size(); ++q) {
        for (std::size_t k = 0; k < series[q].t.size(); ++k) {
            csv.row({series[q].t[k], double(q), series[q].value[k]});
        }
        table.push_back({{"spec_id", q},
                         {"label", series[q].spec.label()},
                         {"s", series[q].spec.s},
                         {"l", series[q].spec.l},
                         {"window_lo", series[q].spec.window_lo},
                         {"window_hi", series[q].spec.window_hi}});
    }
    csv.close();
    ctx.record_output(ctx.file("norms.csv"));
    auto path = ctx.file("norm_specs.json");
    std::ofstream out(path, std::ios::binary);
    out << table.dump(2) << "\n";
    out.close();
    ctx.record_output(path);
}

void task_resonances(const TaskContext& ctx) {
    auto p = ctx.cfg.black_hole();
    auto ext = ctx.cfg.extension();
    auto metric = build_extended_metric(p, ext);
    int n = ctx.cfg.get_int("resonances.n");
    Grid g{metric.slicing.domain_lo(), metric.slicing.domain_hi(), n};
    auto fam = assemble_family(metric.slicing, g, ctx.cfg.get_int("evolve.ell"));
    ScanWindow win;
    win.re_lo = ctx.cfg.get("resonances.re_lo");
    win.re_hi = ctx.cfg.get("resonances.re_hi");
    win.im_lo = ctx.cfg.get("resonances.im_lo");
    win.im_hi = ctx.cfg.get("resonances.im_hi");
    win.collar_deflation = ctx.cfg.get("resonances.deflation");
    // strip-depth guard: the scan floor must stay above the resolvable strip
    double gamma = 0.5 * metric.horizons().kappas[1];
    if (ctx.cfg.get_str("resonances.gamma") != "auto")
        gamma = ctx.cfg.get("resonances.gamma");
    require(win.im_lo >= -gamma - 1e-12,
            "resonances: window deeper than the configured strip depth");
    auto regions = MassRegions::from(metric.horizons(), ext.delta);
    auto res = resonance_scan(fam, win, regions);

    // resolution-doubling companion scan for convergence tagging
    int n2 = ctx.cfg.get_int("resonances.n_check");
    Grid g2{metric.slicing.domain_lo(), metric.slicing.domain_hi(), n2};
    auto fam2 = assemble_family(metric.slicing, g2, ctx.cfg.get_int("evolve.ell"));
    auto res2 = resonance_scan(fam2, win, regions);

    json j = json::array();
    for (auto& r : res) {
        double drift = 1e300;
        for (auto& q : res2) drift = std::min(drift, std::abs(q.sigma - r.sigma));
        j.push_back({{"sigma_re", r.sigma.real()},
                     {"sigma_im", r.sigma.imag()},
                     {"rank", r.rank},
                     {"collar_mass", r.collar_mass},
                     {"interior_mass", r.interior_mass},
                     {"doubling_drift", drift},
                     {"converged", drift < 1e-3}});
    }
    auto path = ctx.file("resonances.json");
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << "\n";
    out.close();
    ctx.record_output(path);
}

void task_flow(const TaskContext& ctx) {
    auto p = ctx.cfg.black_hole();
    auto ext = ctx.cfg.extension();
    auto maps = build_coordinate_maps(p, ext);
    HamiltonFlow flow(maps.slicing);
    const auto& h = maps.slicing.horizons();

    // sample trajectory from the exterior
    FlowState s{0.0, h.radii[2] + 1.0, 2.0, 0.0, 5.0};
    s.xi = flow.null_xi(s, -4.0);
    auto tr = flow.integrate(s, 4.0, 1e-10);
    CsvWriter csv(ctx.file("flow_trajectory.csv"),
                  {"s", "tau", "r", "sigma_b", "xi", "p"});
    for (std::size_t k = 0; k < tr.param.size(); ++k) {
        csv.row({tr.param[k], tr.state[k].tau, tr.state[k].r, tr.state[k].sb,
                 tr.state[k].xi, tr.p[k]});
    }
    csv.close();
    ctx.record_output(ctx.file("flow_trajectory.csv"));

    json j = json::array();
    for (int jx = 0; jx < h.count(); ++jx) {
        auto rep = radial_set_linearize(flow, jx);
        j.push_back({{"horizon", jx},
                     {"r", rep.r_j},
                     {"kappa", rep.kappa_j},
                     {"beta0", rep.beta0},
                     {"beta_tilde", rep.beta_tilde},
                     {"beta_tilde_spread", rep.beta_tilde_spread},
                     {"beta_q", rep.beta_q},
                     {"beta_q_radius", rep.beta_q_radius},
                     {"tau_eigenvalue", rep.tau_eigenvalue},
                     {"eigenvalues", rep.eigenvalues},
                     {"future_is_beta0_branch", rep.future_is_beta0_branch},
                     {"threshold_at_weight_1", threshold_regularity(rep, 1.0)}});
    }
    auto path = ctx.file("flow_report.json");
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << "\n";
    out.close();
    ctx.record_output(path);
}

void task_carter(const TaskContext& ctx) {
    BlackHoleParams p;
    p.family = Family::Kerr;
    p.mass = ctx.cfg.get("spacetime.mass");
    p.spin = ctx.cfg.get("carter.spin");
    p.lambda = 0.0;
    int seeds = ctx.cfg.get_int("carter.witnesses");
    int points = ctx.cfg.get_int("carter.points");
    auto rep = commutator_residual(p, seeds, points, ctx.seed);
    json j;
    j["max_residual"] = rep.max_residual;
    j["points"] = rep.points;
    j["seeds"] = rep.seeds;
    auto path = ctx.file("carter_report.json");
    std::ofstream out(path, std::ios::binary);
    out << j.dump(2) << "\n";
    out.close();
    ctx.record_output(path);
}

}  // namespace

void RunManifest::write(const std::string& path) const {
    json j;
    j["config_hash"] = config_hash;
    j["version"] = version;
    j["wall_seconds"] = wall_seconds;
    json tj = json::array();
    for (auto& t : tasks) {
        tj.push_back({{"name", t.name},
                      {"status", t.status},
                      {"seconds", t.seconds},
                      {"detail", t.detail}});
    }
    j["tasks"] = tj;
    j["outputs"] = output_hashes;
    j["config"] = config_echo;
    std::ofstream out(path, std::ios::binary);
    require(out.good(), "manifest: cannot open " + path);
    out << j.dump(2) << "\n";
}

RunManifest run_tasks(const LabConfig& cfg, const std::vector<std::string>& tasks,
                      const std::string& out_dir, std::uint64_t seed) {
    fs::create_directories(out_dir);
    RunManifest man;
    char hash[20];
    std::snprintf(hash, sizeof hash, "%016llx",
                  static_cast<unsigned long long>(cfg.hash()));
    man.config_hash = hash;
    man.version = lab_version();
    for (auto& [k, v] : cfg.entries()) man.config_echo[k] = v;

    auto t_start = std::chrono::steady_clock::now();
    TaskContext ctx{cfg, out_dir, seed, &man};
    for (const auto& name : tasks) {
        TaskRecord rec;
        rec.name = name;
        auto t0 = std::chrono::steady_clock::now();
        try {
            if (name == "horizons")
                task_horizons(ctx);
            else if (name == "evolve")
                task_evolve(ctx);
            else if (name == "norms")
                task_norms(ctx);
            else if (name == "resonances")
                task_resonances(ctx);
            else if (name == "flow")
                task_flow(ctx);
            else if (name == "carter")
                task_carter(ctx);
            else
                throw std::runtime_error("unknown task '" + name + "'");
            rec.status = "ok";
        } catch (const std::exception& e) {
            rec.status = "failed";
            rec.detail = e.what();
        }
        rec.seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                .count();
        man.tasks.push_back(rec);
    }
    man.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
            .count();
    man.write(out_dir + "/manifest.json");
    return man;
}

}  // namespace lab
