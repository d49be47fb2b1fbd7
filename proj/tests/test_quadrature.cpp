#include <doctest.h>

#include <cmath>

#include "sobtrace/besov1d.hpp"
#include "sobtrace/quadrature.hpp"
#include "support.hpp"

using namespace sobtrace;

TEST_CASE("gauss rules integrate polynomials exactly") {
    for (int n : {4, 6, 8, 32}) {
        // x^{2n-1} integrates to zero on [-1, 1]; x^2 to 2/3.
        double v = integrate_gl([](double x) { return x * x; }, -1, 1, n);
        CHECK(v == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
        double odd = integrate_gl(
            [n](double x) { return std::pow(x, 2 * n - 1); }, -1, 1, n);
        CHECK(odd == doctest::Approx(0.0).epsilon(1e-12));
    }
}

TEST_CASE("adaptive 1d on a peaked integrand") {
    double unresolved = 0.0;
    double v = adaptive_integrate_1d(
        [](double x) { return 1.0 / (1e-4 + x * x); }, -1, 1, 1e-10, 30,
        unresolved);
    const double exact = 2.0 / 1e-2 * std::atan(1.0 / 1e-2);
    CHECK(v == doctest::Approx(exact).epsilon(1e-8));
    CHECK(unresolved <= 1e-8 * v);
}

TEST_CASE("besov quadrature: affine functions have zero seminorm") {
    PiecewiseC11 f = PiecewiseC11::from_affine(0.0, 2.0, -3.0);
    CHECK(besov_seminorm_quadrature(f, 3.0, 1e-6) == 0.0);
}

TEST_CASE("besov quadrature detects a derivative jump") {
    // Continuous, piecewise affine, slope jumps by 1 at 0: the double
    // integral diverges for p > 2.
    PiecewiseC11 f;
    f.breakpoints = {-1.0, 0.0, 1.0};
    f.pieces = {Poly1::affine(0.0, 0.0, 0.0), Poly1::affine(0.0, 0.0, 1.0)};
    f.left_piece = Poly1::affine(0.0, 0.0, 0.0);
    f.right_piece = Poly1::affine(0.0, 0.0, 1.0);
    CHECK_THROWS_AS(besov_seminorm_quadrature(f, 4.0, 1e-4), ToleranceNotMet);
}

TEST_CASE("besov quadrature scaling law on a stretched extension") {
    test::Rng rng(19);
    std::vector<double> xs{0.0, 0.35, 0.8, 1.0}, gs{0.1, -0.2, 0.4, 0.0};
    const double p = 4.0, lambda = 2.0;
    PiecewiseC11 f = extend_Tb_core(Samples1D(xs, gs, p));
    PiecewiseC11 g = f.stretched(lambda);
    const double a = besov_seminorm_quadrature(f, p, 1e-6);
    const double b = besov_seminorm_quadrature(g, p, 1e-6);
    CHECK(std::pow(b, p) ==
          doctest::Approx(std::pow(lambda, 2.0 - 2.0 * p) * std::pow(a, p))
              .epsilon(1e-4));
}

TEST_CASE("besov quadrature on a known smooth bump is stable in tol") {
    PiecewiseC11 f = plateau_cutoff(0.0, 1.0, 0.5);
    const double p = 3.0;
    double coarse = besov_seminorm_quadrature(f, p, 1e-3);
    double fine = besov_seminorm_quadrature(f, p, 1e-7);
    CHECK(coarse == doctest::Approx(fine).epsilon(2e-3));
    CHECK(fine > 0.0);
}

TEST_CASE("claim-2 style bound: one-endpoint kernel integral") {
    // int_a^b |F'(x) - F'(a)|^p / |x-a|^{p-1} dx <= C ||F||^p_[a,b]
    test::Rng rng(23);
    for (double p : {2.5, 3.0, 4.0}) {
        std::vector<double> xs, gs;
        double x = 0.0;
        for (int i = 0; i < 6; ++i) {
            xs.push_back(x);
            gs.push_back(rng.uniform(-1, 1));
            x += rng.uniform(0.1, 0.4);
        }
        PiecewiseC11 f = extend_Tb_core(Samples1D(xs, gs, p));
        const double a = xs.front(), b = xs.back();
        const double da = f.deriv(a);
        double unresolved = 0.0;
        double lhs = adaptive_integrate_1d(
            [&](double t) {
                return std::pow(std::fabs(f.deriv(t) - da), p) /
                       std::pow(t - a, p - 1.0);
            },
            a, b, 1e-9, 26, unresolved);
        double rhs = std::pow(besov_seminorm_quadrature(f, p, 1e-5), p);
        CHECK(lhs <= 200.0 * rhs + 1e-12);
    }
}
