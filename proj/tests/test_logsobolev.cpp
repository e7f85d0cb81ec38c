#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "lab/logsobolev.hpp"

using namespace lab;

namespace {

NormSpec spec_of(double s, double l, double wr = 0, double wj = 0) {
    NormSpec n;
    n.s = s;
    n.l = l;
    n.wr = wr;
    n.wj = wj;
    return n;
}

std::vector<cdouble> sampled(int m, double h, auto&& f) {
    std::vector<cdouble> v(m);
    for (int i = 0; i < m; ++i) v[i] = f(i * h);
    return v;
}

}  // namespace

TEST_CASE("zero field has zero norm; Parseval at (0,0,0,0)") {
    const int m = 128;
    const double h = 0.01;
    std::vector<cdouble> z(m, 0.0);
    CHECK(log_sobolev_norm(z, h, spec_of(0, 0)) == 0.0);

    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> dist(-1, 1);
    std::vector<cdouble> u(m);
    for (auto& x : u) x = {dist(rng), dist(rng)};
    double norm = log_sobolev_norm(u, h, spec_of(0, 0));
    double direct = 0.0;
    for (int i = 0; i < m; ++i) {
        double y = -1.0 + 2.0 * i / (m - 1);
        direct += std::norm(u[i] * plateau_taper(y)) * h;
    }
    CHECK(norm * norm == doctest::Approx(direct).epsilon(1e-12));
}

TEST_CASE("single Fourier mode at (0,0) returns the taper norm") {
    // oracle: continuum L2 norm of the taper by fine quadrature
    double taper_l2 = std::sqrt(adaptive_simpson(
        [](double y) { return plateau_taper(y) * plateau_taper(y); }, -1.0, 1.0,
        1e-12));
    double xi0 = 11.0;
    for (int m : {256, 512}) {
        double L = 2.0;  // window [0, 2]
        double h = L / (m - 1);
        auto u = sampled(m, h, [&](double r) {
            return std::exp(cdouble(0, xi0 * r));
        });
        // window scale: taper on [-1,1] maps to length L/2 factor sqrt(L/2)
        double norm = log_sobolev_norm(u, h, spec_of(0, 0));
        CHECK(norm == doctest::Approx(taper_l2 * std::sqrt(L / 2.0)).epsilon(2e-3));
    }
}

TEST_CASE("step profile: threshold dichotomy across resolutions") {
    // |u_hat| ~ 1/xi: finite in H^s iff s < 1/2
    auto norms_at = [&](int m) {
        double L = 2.0, h = L / (m - 1);
        auto u = sampled(m, h, [&](double r) { return r > 1.0 ? 1.0 : 0.0; });
        return std::pair{log_sobolev_norm(u, h, spec_of(0.4, 0)),
                         log_sobolev_norm(u, h, spec_of(0.6, 0))};
    };
    auto [a1, b1] = norms_at(257);
    auto [a2, b2] = norms_at(513);
    auto [a3, b3] = norms_at(1025);
    // H^0.4 resolution-stable
    CHECK(std::fabs(a3 / a2 - 1.0) < 0.05);
    CHECK(std::fabs(a2 / a1 - 1.0) < 0.08);
    // H^0.6 grows by ~2^0.1 per doubling
    CHECK(b2 / b1 > 1.04);
    CHECK(b3 / b2 > 1.04);
}

TEST_CASE("monotonicity of the norm in (s, l, -r, -j)") {
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> dist(-1, 1);
    const int m = 128;
    const double h = 0.02, t = 60.0;
    for (int trial = 0; trial < 100; ++trial) {
        std::vector<cdouble> u(m);
        for (auto& x : u) x = {dist(rng), dist(rng)};
        double base = log_sobolev_norm(u, h, spec_of(0.4, 0.2, 0.1, 0.1), t);
        CHECK(log_sobolev_norm(u, h, spec_of(0.6, 0.2, 0.1, 0.1), t) >= base);
        CHECK(log_sobolev_norm(u, h, spec_of(0.4, 0.5, 0.1, 0.1), t) >= base);
        CHECK(log_sobolev_norm(u, h, spec_of(0.4, 0.2, 0.2, 0.1), t) >= base);
        CHECK(log_sobolev_norm(u, h, spec_of(0.4, 0.2, 0.1, 0.3), t) >= base);
    }
}

TEST_CASE("weight action identity") {
    // a field carrying the boundary weight x^r log^-j(xtilde^-1), measured in
    // the (s,l,r,j) space, has exactly the unweighted norm of the bare field
    std::mt19937_64 rng(23);
    std::uniform_real_distribution<double> dist(-1, 1);
    const int m = 128;
    const double h = 0.02;
    for (double t : {1.0, 10.0, 55.0}) {
        std::vector<cdouble> u(m);
        for (auto& x : u) x = {dist(rng), dist(rng)};
        double x = std::exp(-t);
        double wfac = std::pow(x, 0.7) * std::pow(std::log(1.0 / xtilde(x)), -0.4);
        std::vector<cdouble> uw(m);
        for (int i = 0; i < m; ++i) uw[i] = u[i] * wfac;
        double a = log_sobolev_norm(uw, h, spec_of(0.3, 0.2, 0.7, 0.4), t);
        double b = log_sobolev_norm(u, h, spec_of(0.3, 0.2, 0.0, 0.0), t);
        CHECK(a == doctest::Approx(b).epsilon(1e-12));
    }
}

TEST_CASE("xtilde bridge is monotone and matches the endpoints") {
    CHECK(xtilde(0.1) == 0.1);
    CHECK(xtilde(0.25) == 0.25);
    CHECK(xtilde(0.5) == 0.5);
    CHECK(xtilde(0.9) == 0.5);
    double prev = 0.0;
    for (int i = 0; i <= 200; ++i) {
        double x = 0.6 * i / 200.0;
        double v = xtilde(x);
        CHECK(v >= prev - 1e-14);
        prev = v;
    }
}

TEST_CASE("embedding constant") {
    CHECK_THROWS(embedding_constant(0.0));
    CHECK_THROWS(embedding_constant(-0.3));
    double c1 = embedding_constant(0.5, 1e-10);
    double c2 = embedding_constant(0.5, 5e-11);
    CHECK(c1 > 0.0);
    CHECK(std::fabs(c1 - c2) < 1e-8);  // quadrature self-consistency
    // monotone decreasing in eps
    CHECK(embedding_constant(0.25) > c1);

    // sanity: 200 seeded band-limited fields obey max|u| <= C(eps) * norm
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1, 1);
    const int m = 512;
    const double L = 8.0, h = L / (m - 1);
    const double eps = 0.5;
    double C = embedding_constant(eps);
    NormSpec ns = spec_of(0.5, 0.5 + eps);
    int checked = 0;
    for (int trial = 0; trial < 200; ++trial) {
        // random band-limited field, zero outside the taper plateau
        std::vector<cdouble> u(m, 0.0);
        int K = 24;
        std::vector<cdouble> coef(2 * K + 1);
        for (auto& c : coef) c = {dist(rng), dist(rng)};
        for (int i = 0; i < m; ++i) {
            double r = i * h;
            cdouble acc = 0;
            for (int k = -K; k <= K; ++k)
                acc += coef[k + K] *
                       std::exp(cdouble(0, 2.0 * std::numbers::pi * k * r / L));
            double y = -1.0 + 2.0 * i / (m - 1);
            u[i] = acc * plateau_taper(2.0 * y);  // supported well inside
        }
        double maxu = 0.0;
        for (auto& z : u) maxu = std::max(maxu, std::abs(z));
        double nrm = log_sobolev_norm(u, h, ns);
        CHECK(maxu <= C * nrm * (1.0 + 1e-6));
        ++checked;
    }
    CHECK(checked == 200);
}

TEST_CASE("interpolation inequalities") {
    for (double l : {1.0, 2.0}) {
        auto rep = check_interpolation_inequalities(l, 1.0, 1.0);
        CHECK(rep.all_ok);
        for (auto& row : rep.rows) {
            CHECK(row.empirical_c <= row.bound * (1 + 1e-12));
            if (row.alpha == 0.0) CHECK(row.bound == doctest::Approx(1.0));
            if (row.alpha == 1.0) CHECK(row.bound == doctest::Approx(1.0));
        }
        // AM-GM: empirical constant at v=w=1 stays below 1
        for (auto& row : rep.rows) CHECK(row.empirical_c <= 1.0 + 1e-12);
        CHECK(rep.max_decomp_error < 1e-12);
    }
    // general weights: alpha=0 ratio bounded by v^-l exactly
    auto rep = check_interpolation_inequalities(1.5, 2.0, 0.7);
    CHECK(rep.rows[0].empirical_c <= std::pow(2.0, -1.5) * (1 + 1e-12));
    CHECK(rep.rows[4].empirical_c <= std::pow(0.7, -1.5) * (1 + 1e-12));
}

TEST_CASE("window errors") {
    std::vector<cdouble> small(32, 1.0);
    CHECK_THROWS(log_sobolev_norm(small, 0.01, spec_of(0, 0)));
    Grid g{0.0, 1.0, 201};
    std::vector<cdouble> field(201, 1.0);
    NormSpec bad = spec_of(0, 0);
    bad.window_lo = 0.9;
    bad.window_hi = 1.4;  // straddles the boundary
    CHECK_THROWS(windowed_norm(field, g, bad));
}
