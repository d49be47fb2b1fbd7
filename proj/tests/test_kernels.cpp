#include <doctest.h>

#include <cmath>

#include "sobtrace/kernels.hpp"
#include "support.hpp"

using namespace sobtrace;
using namespace sobtrace::kernels;

namespace {

struct QuadraticField final : Field2D {
    FieldEval eval(const Point2& x) const override {
        FieldEval e;
        e.v = 0.5 * (x.x * x.x + x.y * x.y) + 0.25 * x.x * x.y;
        e.gx = x.x + 0.25 * x.y;
        e.gy = x.y + 0.25 * x.x;
        e.hxx = 1.0;
        e.hyy = 1.0;
        e.hxy = 0.25;
        return e;
    }
};

}  // namespace

TEST_CASE("serial and OpenMP kernels produce identical bits") {
    test::Rng rng(5);
    std::vector<Point2> pts = test::random_points(rng, 12, -1, 1, 1e-2);
    std::vector<double> angles;
    for (int a = 0; a < 64; ++a) angles.push_back(M_PI * a / 64);

    auto ps = angle_profile_serial(pts, angles, 3.5);
    auto po = angle_profile_omp(pts, angles, 3.5);
    REQUIRE(ps.size() == po.size());
    for (std::size_t i = 0; i < ps.size(); ++i) CHECK(ps[i] == po[i]);

    QuadraticField F;
    Square box({0.2, -0.1}, 2.0);
    auto hs = hessian_rows_serial(F, box, 33, 3.0);
    auto ho = hessian_rows_omp(F, box, 33, 3.0);
    for (std::size_t i = 0; i < hs.size(); ++i) CHECK(hs[i] == ho[i]);

    Grid2D g{24, 0.1};
    std::vector<double> u(24 * 24);
    for (double& x : u) x = rng.uniform(-1, 1);
    std::vector<double> dxx1, dxy1, dyy1, dxx2, dxy2, dyy2;
    cell_hessians_serial(g, u, dxx1, dxy1, dyy1);
    cell_hessians_omp(g, u, dxx2, dxy2, dyy2);
    for (std::size_t i = 0; i < dxx1.size(); ++i) {
        CHECK(dxx1[i] == dxx2[i]);
        CHECK(dxy1[i] == dxy2[i]);
        CHECK(dyy1[i] == dyy2[i]);
    }
    CHECK(penergy_serial(g, dxx1, dxy1, dyy1, 3.0) ==
          penergy_omp(g, dxx1, dxy1, dyy1, 3.0));

    std::vector<double> w(24 * 24, 1.3), y1, y2;
    weighted_gather_serial(g, w, dxx1, dxy1, dyy1, y1);
    weighted_gather_omp(g, w, dxx1, dxy1, dyy1, y2);
    for (std::size_t i = 0; i < y1.size(); ++i) CHECK(y1[i] == y2[i]);

    std::vector<double> s(40), K(40 * 40, 0.0);
    for (double& x : s) x = rng.uniform(-1, 1);
    for (int i = 0; i < 40; ++i)
        for (int j = 0; j < 40; ++j)
            if (i != j) K[std::size_t(i * 40 + j)] = 1.0 / (1 + std::abs(i - j));
    std::vector<double> w1, w2;
    pair_weights_serial(s, 3.0, 1e-6, w1);
    pair_weights_omp(s, 3.0, 1e-6, w2);
    for (std::size_t i = 0; i < w1.size(); ++i) CHECK(w1[i] == w2[i]);
    std::vector<double> pm1, pm2;
    pair_matvec_serial(K, w1, s, pm1);
    pair_matvec_omp(K, w1, s, pm2);
    for (std::size_t i = 0; i < pm1.size(); ++i) CHECK(pm1[i] == pm2[i]);
    CHECK(pair_energy_serial(K, s, 3.0) == pair_energy_omp(K, s, 3.0));
}

TEST_CASE("hessian row sums integrate a constant-Hessian field") {
    QuadraticField F;
    Square box({0.0, 0.0}, 1.0);
    auto rows = hessian_rows_serial(F, box, 64, 4.0);
    double total = 0.0;
    for (double r : rows) total += r;
    // |Hess|_F = sqrt(1 + 1 + 2 * 0.0625) constant; integral over unit box.
    const double frob = std::sqrt(2.0 + 2.0 * 0.0625);
    CHECK(std::pow(total, 0.25) == doctest::Approx(frob).epsilon(1e-12));
}

TEST_CASE("weighted gather is the gradient of the weighted energy") {
    // directional-derivative check: grad E_w(u) . v ~ (E_w(u+t v) - E_w(u-t v)) / 2t
    test::Rng rng(9);
    Grid2D g{16, 0.25};
    const std::size_t N = 16 * 16;
    std::vector<double> u(N), v(N), w(N);
    for (double& x : u) x = rng.uniform(-1, 1);
    for (double& x : v) x = rng.uniform(-1, 1);
    for (double& x : w) x = rng.uniform(0.5, 2.0);

    auto Ew = [&](const std::vector<double>& z) {
        std::vector<double> dxx, dxy, dyy;
        cell_hessians_serial(g, z, dxx, dxy, dyy);
        double s = 0.0;
        for (std::size_t c = 0; c < N; ++c)
            s += w[c] * (dxx[c] * dxx[c] + 2 * dxy[c] * dxy[c] +
                         dyy[c] * dyy[c]);
        return s * g.h * g.h;
    };
    std::vector<double> dxx, dxy, dyy, y;
    cell_hessians_serial(g, u, dxx, dxy, dyy);
    weighted_gather_serial(g, w, dxx, dxy, dyy, y);
    double gv = 0.0;
    for (std::size_t i = 0; i < N; ++i) gv += y[i] * v[i];
    const double t = 1e-6;
    std::vector<double> up = u, um = u;
    for (std::size_t i = 0; i < N; ++i) {
        up[i] += t * v[i];
        um[i] -= t * v[i];
    }
    const double fd = (Ew(up) - Ew(um)) / (2 * t);
    CHECK(gv == doctest::Approx(fd).epsilon(1e-5));
}

TEST_CASE("pair matvec is the gradient of the weighted pair energy") {
    test::Rng rng(13);
    const std::size_t n = 20;
    std::vector<double> s(n), v(n), K(n * n, 0.0), w(n * n, 0.0);
    for (double& x : s) x = rng.uniform(-1, 1);
    for (double& x : v) x = rng.uniform(-1, 1);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            if (i != j) {
                K[i * n + j] = 1.0 / double(1 + (i > j ? i - j : j - i));
                w[i * n + j] = rng.uniform(0.5, 1.5);
            }
    // symmetrize
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) {
            w[i * n + j] = w[j * n + i];
        }
    auto Ew = [&](const std::vector<double>& z) {
        double e = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                e += K[i * n + j] * w[i * n + j] * (z[i] - z[j]) * (z[i] - z[j]);
        return e;
    };
    std::vector<double> y;
    pair_matvec_serial(K, w, s, y);
    double gv = 0.0;
    for (std::size_t i = 0; i < n; ++i) gv += y[i] * v[i];
    const double t = 1e-6;
    std::vector<double> up = s, um = s;
    for (std::size_t i = 0; i < n; ++i) {
        up[i] += t * v[i];
        um[i] -= t * v[i];
    }
    CHECK(gv == doctest::Approx((Ew(up) - Ew(um)) / (2 * t)).epsilon(1e-6));
}
