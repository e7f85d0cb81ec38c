// Benchmark: serial reference kernel vs the OpenMP kernel of the evolution
// right-hand side, plus the windowed-norm sweep.

#include <chrono>
#include <cstdio>
#include <vector>

#include <omp.h>

#include "lab/evolve.hpp"
#include "lab/logsobolev.hpp"
#include "lab/spacetime.hpp"

using namespace lab;
using clock_type = std::chrono::steady_clock;

namespace {

double time_of(int reps, auto&& fn) {
    auto t0 = clock_type::now();
    for (int k = 0; k < reps; ++k) fn();
    return std::chrono::duration<double>(clock_type::now() - t0).count() / reps;
}

}  // namespace

int main() {
    BlackHoleParams p;
    p.mass = 1.0;
    p.charge = 0.8;
    p.lambda = 0.02;
    BlackHoleParams vac = p;
    vac.lambda = 0.0;
    auto hv = find_horizons(vac);
    auto ext = ExtensionParams::defaults_for(hv.radii[0], hv.radii[1]);
    auto metric = build_extended_metric(p, ext);

    std::printf("threads available: %d\n\n", omp_get_max_threads());
    std::printf("%-8s %-12s %-12s %-8s\n", "n", "serial [us]", "openmp [us]", "speedup");
    for (int n : {2001, 8001, 32001, 128001}) {
        Grid g{metric.slicing.domain_lo(), metric.slicing.domain_hi(), n};
        WaveOperator1D op(metric.slicing, g, 1);
        std::vector<cdouble> u(n), v(n), w(n), du(n), dv(n), dw(n);
        for (int i = 0; i < n; ++i) {
            double r = g.r(i);
            u[i] = {std::sin(r), std::cos(2 * r)};
            w[i] = {std::cos(r), 0.1};
        }
        op.gradient(u.data(), v.data());
        int reps = std::max(3, 2000000 / n);
        double ts = time_of(reps, [&] {
            op.rhs_serial(u.data(), v.data(), w.data(), du.data(), dv.data(),
                          dw.data());
        });
        double tp = time_of(reps, [&] {
            op.rhs(u.data(), v.data(), w.data(), du.data(), dv.data(), dw.data());
        });
        // sanity: identical results
        std::vector<cdouble> du2(n), dv2(n), dw2(n);
        op.rhs_serial(u.data(), v.data(), w.data(), du2.data(), dv2.data(), dw2.data());
        for (int i = 0; i < n; ++i) {
            if (du2[i] != du[i] || dw2[i] != dw[i]) {
                std::printf("MISMATCH at node %d\n", i);
                return 1;
            }
        }
        std::printf("%-8d %-12.2f %-12.2f %-8.2f\n", n, ts * 1e6, tp * 1e6, ts / tp);
    }

    std::printf("\nwindowed norm sweep (128 nodes/window, 600 snapshots):\n");
    {
        Grid g{0.0, 1.27, 128};
        std::vector<cdouble> win(128);
        for (int i = 0; i < 128; ++i) win[i] = std::sin(0.3 * i);
        NormSpec spec;
        spec.s = 0.5;
        spec.l = 0.6;
        double t1 = time_of(3, [&] {
            double acc = 0;
#pragma omp parallel for reduction(+ : acc)
            for (int k = 0; k < 600; ++k)
                acc += log_sobolev_norm(win, g.h(), spec);
            (void)acc;
        });
        double t0 = time_of(3, [&] {
            double acc = 0;
            for (int k = 0; k < 600; ++k) acc += log_sobolev_norm(win, g.h(), spec);
            (void)acc;
        });
        std::printf("serial %.1f ms   openmp %.1f ms   speedup %.2f\n", t0 * 1e3,
                    t1 * 1e3, t0 / t1);
    }
    return 0;
}
