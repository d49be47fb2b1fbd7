#include <doctest.h>

#include <cmath>

#include "sobtrace/besov1d.hpp"
#include "sobtrace/kernels.hpp"
#include "sobtrace/oracle.hpp"
#include "support.hpp"

using namespace sobtrace;

namespace {

// Dense KKT solve of the p = 2 problem: minimize u^T A u / 2 s.t. C u = d,
// with A assembled from the same cell stencils. Independent of the
// projected-CG path.
std::vector<double> dense_p2(const GridProblem& prob) {
    const int n = prob.n;
    const std::size_t N = std::size_t(n) * n;
    kernels::Grid2D g{n, prob.box.side / (n - 1)};
    // assemble A by applying the matvec to unit vectors (small n only)
    std::vector<std::vector<double>> A(N, std::vector<double>(N, 0.0));
    std::vector<double> w(N, 1.0);
    for (std::size_t c = 0; c < N; ++c) {
        std::vector<double> e(N, 0.0), dxx, dxy, dyy, y;
        e[c] = 1.0;
        kernels::cell_hessians_serial(g, e, dxx, dxy, dyy);
        kernels::weighted_gather_serial(g, w, dxx, dxy, dyy, y);
        for (std::size_t r = 0; r < N; ++r) A[r][c] = y[r];
    }
    // constraint rows (bilinear)
    std::vector<std::vector<double>> C;
    std::vector<double> dvec;
    for (const auto& [q, val] : prob.constraints) {
        std::vector<double> row(N, 0.0);
        const double h = g.h;
        double fx = (q.x - prob.box.xmin()) / h, fy = (q.y - prob.box.ymin()) / h;
        int i = std::min(std::max(int(std::floor(fx)), 0), n - 2);
        int j = std::min(std::max(int(std::floor(fy)), 0), n - 2);
        double ax = fx - i, ay = fy - j;
        row[std::size_t(j * n + i)] += (1 - ax) * (1 - ay);
        row[std::size_t(j * n + i + 1)] += ax * (1 - ay);
        row[std::size_t((j + 1) * n + i)] += (1 - ax) * ay;
        row[std::size_t((j + 1) * n + i + 1)] += ax * ay;
        C.push_back(row);
        dvec.push_back(val);
    }
    const std::size_t m = C.size(), T = N + m;
    std::vector<std::vector<double>> K(T, std::vector<double>(T, 0.0));
    std::vector<double> rhs(T, 0.0);
    for (std::size_t r = 0; r < N; ++r)
        for (std::size_t c = 0; c < N; ++c) K[r][c] = A[r][c];
    for (std::size_t r = 0; r < m; ++r) {
        for (std::size_t c = 0; c < N; ++c) {
            K[N + r][c] = C[r][c];
            K[c][N + r] = C[r][c];
        }
        rhs[N + r] = dvec[r];
    }
    // Gaussian elimination with partial pivoting
    for (std::size_t col = 0; col < T; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < T; ++r)
            if (std::fabs(K[r][col]) > std::fabs(K[piv][col])) piv = r;
        std::swap(K[piv], K[col]);
        std::swap(rhs[piv], rhs[col]);
        REQUIRE(std::fabs(K[col][col]) > 1e-13);
        for (std::size_t r = 0; r < T; ++r) {
            if (r == col) continue;
            const double f = K[r][col] / K[col][col];
            if (f == 0.0) continue;
            for (std::size_t c = col; c < T; ++c) K[r][c] -= f * K[col][c];
            rhs[r] -= f * rhs[col];
        }
    }
    std::vector<double> u(N);
    for (std::size_t c = 0; c < N; ++c) u[c] = rhs[c] / K[c][c];
    return u;
}

struct QuadField final : Field2D {
    FieldEval eval(const Point2& x) const override {
        FieldEval e;
        e.v = 0.5 * (x.x * x.x + x.y * x.y);
        e.gx = x.x;
        e.gy = x.y;
        e.hxx = e.hyy = 1.0;
        return e;
    }
};

struct SmoothField final : Field2D {
    FieldEval eval(const Point2& x) const override {
        FieldEval e;
        e.v = std::sin(x.x) * std::cos(x.y);
        e.gx = std::cos(x.x) * std::cos(x.y);
        e.gy = -std::sin(x.x) * std::sin(x.y);
        e.hxx = -std::sin(x.x) * std::cos(x.y);
        e.hyy = -std::sin(x.x) * std::cos(x.y);
        e.hxy = -std::cos(x.x) * std::sin(x.y);
        return e;
    }
};

}  // namespace

TEST_CASE("min_energy_2d: affine constraints give zero energy") {
    GridProblem prob;
    prob.box = Square({0, 0}, 2.0);
    prob.n = 24;
    prob.p = 4.0;
    for (const Point2 q : {Point2{-0.5, -0.3}, Point2{0.4, 0.1}, Point2{0.2, 0.6}})
        prob.constraints.emplace_back(q, 1.0 + 2.0 * q.x - 0.5 * q.y);
    GridSolution sol = min_energy_2d(prob);
    CHECK(sol.energy_p_root <= 1e-6);
    // and the field matches the affine function at the nodes
    kernels::Grid2D g{prob.n, prob.box.side / (prob.n - 1)};
    for (int j = 0; j < prob.n; j += 5)
        for (int i = 0; i < prob.n; i += 5) {
            const double x = prob.box.xmin() + i * g.h;
            const double y = prob.box.ymin() + j * g.h;
            CHECK(sol.values[std::size_t(j * prob.n + i)] ==
                  doctest::Approx(1.0 + 2.0 * x - 0.5 * y).epsilon(1e-4));
        }
}

TEST_CASE("min_energy_2d p = 2 matches the dense KKT solve") {
    GridProblem prob;
    prob.box = Square({0, 0}, 2.0);
    prob.n = 16;
    prob.p = 2.0;
    prob.constraints = {{{-0.4, -0.4}, 1.0}, {{0.5, -0.2}, -0.5}, {{0.0, 0.5}, 0.3}};
    GridSolution sol = min_energy_2d(prob);
    std::vector<double> ref = dense_p2(prob);
    kernels::Grid2D g{prob.n, prob.box.side / (prob.n - 1)};
    std::vector<double> dxx, dxy, dyy;
    kernels::cell_hessians_serial(g, ref, dxx, dxy, dyy);
    const double eref = kernels::penergy_serial(g, dxx, dxy, dyy, 2.0);
    CHECK(std::pow(sol.energy_p_root, 2.0) ==
          doctest::Approx(eref).epsilon(1e-6));
}

TEST_CASE("min_energy_2d is monotone under added constraints") {
    test::Rng rng(83);
    GridProblem prob;
    prob.box = Square({0, 0}, 2.0);
    prob.n = 24;
    prob.p = 4.0;
    prob.constraints = {{{-0.6, -0.5}, 0.4}, {{0.55, -0.35}, -0.8},
                        {{0.1, 0.5}, 0.9}};
    double last = 0.0;
    for (int extra = 0; extra < 3; ++extra) {
        GridSolution sol = min_energy_2d(prob);
        CHECK(sol.energy_p_root >= last - 1e-8);
        last = sol.energy_p_root;
        prob.constraints.emplace_back(rng.point(-0.8, 0.8), rng.uniform(-1, 1));
    }
}

TEST_CASE("min_energy_2d is invariant under affine shifts of the data") {
    GridProblem prob;
    prob.box = Square({0, 0}, 2.0);
    prob.n = 24;
    prob.p = 3.0;
    prob.constraints = {{{-0.6, -0.5}, 0.4}, {{0.55, -0.35}, -0.8},
                        {{0.1, 0.5}, 0.9}, {{0.6, 0.6}, 0.0}};
    GridSolution a = min_energy_2d(prob);
    GridProblem prob2 = prob;
    for (auto& [q, v] : prob2.constraints) v += 2.0 * q.x - 1.5 * q.y + 0.7;
    GridSolution b = min_energy_2d(prob2);
    CHECK(b.energy_p_root == doctest::Approx(a.energy_p_root).epsilon(1e-5));
}

TEST_CASE("min_energy_2d refinement stability") {
    GridProblem prob;
    prob.box = Square({0, 0}, 2.0);
    prob.n = 32;
    prob.p = 4.0;
    prob.constraints = {{{-0.6, -0.5}, 0.4}, {{0.55, -0.35}, -0.8},
                        {{0.1, 0.5}, 0.9}, {{0.6, 0.6}, 0.0},
                        {{-0.2, 0.1}, 0.2}};
    GridSolution c32 = min_energy_2d(prob);
    prob.n = 64;
    GridSolution c64 = min_energy_2d(prob);
    prob.n = 128;
    GridSolution c128 = min_energy_2d(prob);
    CHECK(std::fabs(c64.energy_p_root - c32.energy_p_root) <=
          0.10 * c64.energy_p_root);
    CHECK(std::fabs(c128.energy_p_root - c64.energy_p_root) <=
          0.10 * c128.energy_p_root);
}

TEST_CASE("min_besov_1d: affine data, cross-oracle band, scaling") {
    std::vector<double> xs{0.0, 0.4, 1.0};
    std::vector<double> aff;
    for (double x : xs) aff.push_back(2.0 * x - 1.0);
    CHECK(min_besov_1d(xs, aff, 4.0, 65) <= 1e-6);

    std::vector<double> gs{0.0, 0.0, 1.0};
    const double p = 4.0;
    double onorm = min_besov_1d(xs, gs, p, 65);
    double formula = std::pow(trace_seminorm_p(Samples1D(xs, gs, p)).Mp, 1.0 / p);
    CHECK(onorm <= 50.0 * formula);
    CHECK(formula <= 50.0 * onorm);

    std::vector<double> xs2;
    for (double x : xs) xs2.push_back(2.0 * x);
    double onorm2 = min_besov_1d(xs2, gs, p, 65);
    CHECK(std::pow(onorm2, p) ==
          doctest::Approx(std::pow(2.0, 2.0 - 2.0 * p) * std::pow(onorm, p))
              .epsilon(0.05));
}

TEST_CASE("sobolev quadrature on affine and quadratic fields") {
    FieldPtr aff = make_affine_field(AffineJet({0, 0}, 1.0, {2, 3}));
    Square box({0, 0}, 1.0);
    CHECK(sobolev_seminorm_quadrature(*aff, box, 64, 3.0) == 0.0);
    QuadField q;
    CHECK(sobolev_seminorm_quadrature(q, box, 64, 4.0) ==
          doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
}

TEST_CASE("sobolev quadrature refinement stability on a smooth field") {
    SmoothField f;
    Square box({0.3, -0.2}, 2.0);
    double a = sobolev_seminorm_quadrature(f, box, 64, 3.0);
    double b = sobolev_seminorm_quadrature(f, box, 128, 3.0);
    CHECK(std::fabs(a - b) <= 0.02 * b);
}

TEST_CASE("min_besov_1d is invariant under affine data shifts") {
    std::vector<double> xs{0.0, 0.3, 0.55, 1.0};
    std::vector<double> gs{0.2, -0.4, 0.1, 0.5};
    const double p = 3.0;
    double a = min_besov_1d(xs, gs, p, 65);
    std::vector<double> shifted = gs;
    for (std::size_t i = 0; i < xs.size(); ++i) shifted[i] += 1.7 * xs[i] - 0.4;
    double b = min_besov_1d(xs, shifted, p, 65);
    CHECK(b == doctest::Approx(a).epsilon(1e-5));
}
