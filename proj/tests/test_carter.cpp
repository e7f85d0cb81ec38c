#include <cmath>

#include "doctest.h"
#include "lab/carter.hpp"

using namespace lab;

namespace {

BlackHoleParams kerr(double a, double lambda = 0.0) {
    BlackHoleParams p;
    p.family = Family::Kerr;
    p.mass = 1.0;
    p.spin = a;
    p.lambda = lambda;
    return p;
}

}  // namespace

TEST_CASE("jet arithmetic sanity") {
    // f(r, th) = r^2 sin(th) / (1 + r): check derivatives against closed form
    double r0 = 1.3, th0 = 0.8;
    Jet2 r = Jet2::var1(r0), th = Jet2::var2(th0);
    Jet2 f = r * r * sin(th) / (1.0 + r);
    double v = r0 * r0 * std::sin(th0) / (1.0 + r0);
    CHECK(f.value() == doctest::Approx(v).epsilon(1e-14));
    // d/dr: (2r(1+r) - r^2)/(1+r)^2 sin
    double dr = (2 * r0 * (1 + r0) - r0 * r0) / ((1 + r0) * (1 + r0)) * std::sin(th0);
    CHECK(f.deriv(1, 0) == doctest::Approx(dr).epsilon(1e-13));
    CHECK(f.deriv(0, 1) ==
          doctest::Approx(r0 * r0 * std::cos(th0) / (1 + r0)).epsilon(1e-13));
    // mixed second derivative
    double drth = (2 * r0 * (1 + r0) - r0 * r0) / ((1 + r0) * (1 + r0)) * std::cos(th0);
    CHECK(f.deriv(1, 1) == doctest::Approx(drth).epsilon(1e-12));
}

TEST_CASE("witness derivatives are exact") {
    TestFunction f;
    f.add_term({2.0, 0.0}, 2, 1, 1, 1, 1);  // 2 t^2 r cos sin e^{i ph}
    double t = 1.4, r = 2.0, th = 0.9, ph = 0.3;
    // d/dt d/dth by hand: d/dt -> 4 t r cos sin e; d/dth -> 4 t r cos(2th) e
    cdouble expect = 4.0 * t * r * std::cos(2 * th) *
                     std::exp(cdouble(0, ph));
    CHECK(std::abs(f.deriv({1, 0, 1, 0}, t, r, th, ph) - expect) < 1e-13);
    // phi derivative brings i m
    cdouble ep = cdouble(0, 1) * 2.0 * t * t * r * std::cos(th) * std::sin(th) *
                 std::exp(cdouble(0, ph));
    CHECK(std::abs(f.deriv({0, 0, 0, 1}, t, r, th, ph) - ep) < 1e-13);
}

TEST_CASE("carter operator basics") {
    auto chart = KerrChart::build(kerr(0.0));
    // f == 1 -> 0
    TestFunction one;
    one.add_term(1.0, 0, 0, 0, 0, 0);
    CHECK(std::abs(apply_carter(chart, one, 0.5, 2.0, 1.0, 0.2)) < 1e-14);
    // f = t at a = 0: only angular terms remain, all differentiate f to 0
    TestFunction ft;
    ft.add_term(1.0, 1, 0, 0, 0, 0);
    CHECK(std::abs(apply_carter(chart, ft, 0.5, 2.0, 1.0, 0.2)) < 1e-14);
    // a = 0, f = cos(th): the nonnegative spherical Laplacian gives 2 cos(th)
    TestFunction fc;
    fc.add_term(1.0, 0, 0, 1, 0, 0);
    for (double th : {0.4, 1.0, 2.2}) {
        cdouble v = apply_carter(chart, fc, 0.0, 2.0, th, 0.0);
        CHECK(std::abs(v - 2.0 * std::cos(th)) < 1e-12);
    }
    CHECK_THROWS(apply_carter(chart, fc, 0.0, 2.0, 1e-5, 0.0));  // axis margin
}

TEST_CASE("commutation with the Killing directions") {
    auto chart = KerrChart::build(kerr(0.1));
    for (std::uint64_t s : {1, 2, 3}) {
        auto f = TestFunction::random(s);
        CHECK(killing_commutator_residual(chart, f, 0.7, 2.5, 1.1, 0.4, false) <
              1e-12);
        CHECK(killing_commutator_residual(chart, f, 0.7, 2.5, 1.1, 0.4, true) <
              1e-12);
    }
}

TEST_CASE("carter commutation: exact path") {
    auto rep = commutator_residual(kerr(0.1), 20, 50, 1);
    CHECK(rep.max_residual < 1e-8);
    CHECK(rep.seeds == 20);
    CHECK(rep.points == 50);
    // spherical limit: the spherical Laplacian commutes too
    auto rep0 = commutator_residual(kerr(0.0), 5, 20, 2);
    CHECK(rep0.max_residual < 1e-12);
}

TEST_CASE("commutator samples are stationary and axisymmetric") {
    auto chart = KerrChart::build(kerr(0.1));
    auto f = TestFunction::random(5);
    auto s1 = commutator_once(chart, f, 0.5, 2.2, 1.0, 0.3);
    // t-translation and phi-rotation act on the witness by an overall factor
    // for each term; residuals stay at rounding level regardless
    auto s2 = commutator_once(chart, f, 5.5, 2.2, 1.0, 0.3);
    auto s3 = commutator_once(chart, f, 0.5, 2.2, 1.0, 4.3);
    CHECK(s1.residual_rel() < 1e-10);
    CHECK(s2.residual_rel() < 1e-10);
    CHECK(s3.residual_rel() < 1e-10);
}

TEST_CASE("exact vs order-8 finite-difference cross-validation") {
    auto chart = KerrChart::build(kerr(0.1));
    for (std::uint64_t s : {1, 4, 9}) {
        auto f = TestFunction::random(s);
        double t = 0.8, r = 2.7, th = 1.2, ph = 1.0;
        auto ex = commutator_once(chart, f, t, r, th, ph);
        auto fd = commutator_fd(chart, f, t, r, th, ph);
        double scale = std::max({std::abs(ex.ab), std::abs(ex.ba), 1.0});
        CHECK(std::abs(ex.ab - fd.ab) < 1e-6 * scale);
        CHECK(std::abs(ex.ba - fd.ba) < 1e-6 * scale);
    }
}

TEST_CASE("angular witness: Legendre spectrum and Weyl count") {
    auto rep = mode_regularity_witness(kerr(0.0), 0, 800, 12, 1.0e4);
    REQUIRE(rep.eigenvalues.size() >= 6);
    for (int l = 0; l < 6; ++l) {
        CHECK(rep.eigenvalues[l] == doctest::Approx(l * (l + 1)).epsilon(2e-3));
    }
    // m = 2 ladder starts at l = 2
    auto rep2 = mode_regularity_witness(kerr(0.0), 2, 800, 8, 1.0e4);
    CHECK(rep2.eigenvalues[0] == doctest::Approx(6.0).epsilon(5e-3));
    CHECK(rep2.eigenvalues[1] == doctest::Approx(12.0).epsilon(5e-3));
    // Weyl: count below L grows like sqrt(L)
    auto repc1 = mode_regularity_witness(kerr(0.0), 0, 3000, 4, 400.0);
    auto repc2 = mode_regularity_witness(kerr(0.0), 0, 3000, 4, 1600.0);
    double ratio = double(repc2.count_below_cut) / repc1.count_below_cut;
    CHECK(ratio == doctest::Approx(2.0).epsilon(0.15));

    // a = 0.1 with Lambda = 0: angular part is still exactly Legendre
    auto repa = mode_regularity_witness(kerr(0.1), 0, 800, 8, 1.0e4);
    CHECK(repa.max_dev_from_l_l1 < 0.02);
    // Lambda > 0: first-order shift bounded by the perturbation size
    auto repl = mode_regularity_witness(kerr(0.3, 0.02), 0, 800, 8, 1.0e4);
    double gamma = 0.02 * 0.09 / 3.0;
    CHECK(repl.max_dev_from_l_l1 < 60.0 * gamma + 0.02);
    CHECK(repl.max_dev_from_l_l1 > 0.0);
}
