#include <cmath>

#include "doctest.h"
#include "lab/util.hpp"

using namespace lab;

TEST_CASE("smoothstep endpoints and smoothness") {
    CHECK(smoothstep(-0.1, 0, 1, 2) == 0.0);
    CHECK(smoothstep(1.1, 0, 1, 2) == 1.0);
    CHECK(smoothstep(0.5, 0, 1, 2) == doctest::Approx(0.5));
    // quintic: 6y^5 - 15y^4 + 10y^3
    double y = 0.3;
    double ref = 6 * std::pow(y, 5) - 15 * std::pow(y, 4) + 10 * std::pow(y, 3);
    CHECK(smoothstep(y, 0, 1, 2) == doctest::Approx(ref).epsilon(1e-14));
    // derivative consistency, both orders
    for (int N : {2, 5}) {
        for (double x : {0.15, 0.4, 0.77}) {
            double h = 1e-6;
            double fd = (smoothstep(x + h, 0, 1, N) - smoothstep(x - h, 0, 1, N)) / (2 * h);
            CHECK(smoothstep_deriv(x, 0, 1, N) == doctest::Approx(fd).epsilon(1e-7));
        }
    }
}

TEST_CASE("plateau taper is 1 on the middle half and 0 outside") {
    for (double y : {0.0, 0.2, -0.49, 0.5}) CHECK(plateau_taper(y) == 1.0);
    for (double y : {1.0, -1.2, 1.5}) CHECK(plateau_taper(y) == 0.0);
    CHECK(plateau_taper(0.75) > 0.0);
    CHECK(plateau_taper(0.75) < 1.0);
    CHECK(plateau_taper(0.75) == plateau_taper(-0.75));
}

TEST_CASE("fornberg weights reproduce standard stencils") {
    std::vector<double> xs = {-2, -1, 0, 1, 2};
    auto w2 = fd_weights(0.0, xs, 2);
    std::vector<double> ref = {-1.0 / 12, 16.0 / 12, -30.0 / 12, 16.0 / 12, -1.0 / 12};
    for (int i = 0; i < 5; ++i) CHECK(w2[i] == doctest::Approx(ref[i]).epsilon(1e-13));
    auto w1 = fd_weights(0.0, xs, 1);
    std::vector<double> ref1 = {1.0 / 12, -8.0 / 12, 0.0, 8.0 / 12, -1.0 / 12};
    for (int i = 0; i < 5; ++i) CHECK(w1[i] == doctest::Approx(ref1[i]).epsilon(1e-13));
}

TEST_CASE("adaptive simpson") {
    double v = adaptive_simpson([](double x) { return std::sin(x); }, 0, M_PI, 1e-12);
    CHECK(v == doctest::Approx(2.0).epsilon(1e-10));
}

TEST_CASE("line fit recovers slope") {
    std::vector<double> x, y;
    for (int i = 0; i < 50; ++i) {
        x.push_back(0.1 * i);
        y.push_back(3.0 - 2.5 * 0.1 * i);
    }
    auto f = fit_line(x, y);
    CHECK(f.slope == doctest::Approx(-2.5).epsilon(1e-12));
    CHECK(f.intercept == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(f.rms_residual < 1e-12);
}

TEST_CASE("fnv1a is stable") {
    CHECK(fnv1a(std::string("")) == 14695981039346656037ull);
    CHECK(fnv1a(std::string("a")) != fnv1a(std::string("b")));
}
