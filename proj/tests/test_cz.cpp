#include <doctest.h>

#include <cmath>
#include <functional>
#include <set>

#include "sobtrace/cz.hpp"
#include "support.hpp"

using namespace sobtrace;

namespace {

Config test_config(double p = 4.0) {
    Config cfg;
    cfg.p = p;
    cfg.angle_count = 64;  // cheaper scans for the unit suite
    cfg.exec = ExecPolicy::OpenMP;
    return cfg;
}

void check_good_geometry(const CZDecomposition& d) {
    double area = 0.0;
    for (const Square& q : d.leaves) area += q.side * q.side;
    CHECK(area == doctest::Approx(d.root.side * d.root.side).epsilon(1e-9));
    for (std::size_t i = 0; i < d.leaves.size(); ++i)
        for (std::size_t j = i + 1; j < d.leaves.size(); ++j) {
            const Square &a = d.leaves[i], &b = d.leaves[j];
            if (are_neighbors(a, b)) {
                CHECK(a.side <= 2.0 * b.side);
                CHECK(b.side <= 2.0 * a.side);
            } else {
                CHECK_FALSE(are_neighbors(dilate(a, 1.3), dilate(b, 1.3)));
                CHECK(square_distance(a, b) >=
                      std::max(a.side, b.side) / 10.0 - 1e-12);
            }
        }
    for (std::size_t i = 0; i < d.leaves.size(); ++i) {
        int overlaps = 0;
        for (std::size_t j = 0; j < d.leaves.size(); ++j)
            if (are_neighbors(dilate(d.leaves[i], 1.3), dilate(d.leaves[j], 1.3)))
                ++overlaps;
        CHECK(overlaps <= 13);
        CHECK(int(d.adjacency[i].size()) <= 13);
    }
}

void check_keystones_and_paths(const CZDecomposition& d) {
    for (int mu = 0; mu < d.keystone_count(); ++mu) {
        const Square& ks = d.leaves[std::size_t(d.keystones[std::size_t(mu)])];
        for (const Square& q : d.leaves)
            if (are_neighbors(dilate(ks, 100.0), q))
                CHECK(q.side >= ks.side);
    }
    for (int nu = 0; nu < d.leaf_count(); ++nu) {
        const auto& path = d.paths[std::size_t(nu)];
        REQUIRE(!path.empty());
        CHECK(path.front() == nu);
        CHECK(path.back() ==
              d.keystones[std::size_t(d.mu_of_nu[std::size_t(nu)])]);
        for (std::size_t i = 0; i + 1 < path.size(); ++i)
            CHECK(are_neighbors(d.leaves[std::size_t(path[i])],
                                d.leaves[std::size_t(path[i + 1])]));
    }
    for (int nu = 0; nu < d.leaf_count(); ++nu) {
        const Square& q = d.leaves[std::size_t(nu)];
        CHECK(dilate(q, 0.5).contains(d.x_nu[std::size_t(nu)]));
        double dd = std::numeric_limits<double>::infinity();
        for (const Point2& e : d.points)
            dd = std::min(dd, dist(d.x_nu[std::size_t(nu)], e));
        if (!d.points.empty()) CHECK(dd >= q.side / 5.0 - 1e-12);
        CHECK(dilate(d.root, 0.99).contains(d.x_nu[std::size_t(nu)]));
    }
}

}  // namespace

TEST_CASE("choose_root basics") {
    Square r1 = choose_root({{0.1, 0.0}});
    CHECK(r1.side >= 2.1);
    CHECK(std::exp2(std::round(std::log2(r1.side))) == r1.side);

    Square r2 = choose_root({{-1, -1}, {1, 1}});
    CHECK(r2.side == 32.0);

    Square r0 = choose_root({});
    CHECK(r0.side == 16.0);

    CHECK_THROWS_AS(choose_root({{1, 2}, {1, 2}}), InvalidInput);
}

TEST_CASE("cut returns the root for empty and collinear data") {
    Config cfg = test_config();
    CHECK(cut(choose_root({}), {}, cfg.p, cfg.c1, cfg.angle_count).size() == 1);
    std::vector<Point2> line;
    for (int i = 0; i < 6; ++i) line.push_back({0.1 * i - 0.3, 0.2 * i - 0.6});
    Square root = choose_root(line);
    CHECK(cut(root, line, cfg.p, cfg.c1, cfg.angle_count).size() == 1);
}

TEST_CASE("cut refines near right-angle clusters and the leaves are OK") {
    Config cfg = test_config();
    std::vector<Point2> E;
    auto corner = [&](Point2 c, double s) {
        E.push_back(c);
        E.push_back({c.x + s, c.y});
        E.push_back({c.x, c.y + s});
    };
    corner({-0.8, -0.8}, 0.05);
    corner({0.9, 0.0}, 0.04);
    corner({-0.1, 0.85}, 0.06);
    Square root = choose_root(E);
    std::vector<Square> leaves =
        cut(root, E, cfg.p, cfg.c1, cfg.angle_count, cfg.exec);
    CHECK(leaves.size() > 1);
    for (const Square& q : leaves)
        CHECK(is_OK(q, E, cfg.p, cfg.c1, cfg.angle_count, cfg.exec));
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    for (const Square& q : leaves) {
        if (q.dyadic_addr->level == 0) continue;
        const auto& a = *q.dyadic_addr;
        const double s = q.side * 2.0;
        Square parent(Point2{root.xmin() + (double(a.i / 2) + 0.5) * s,
                             root.ymin() + (double(a.j / 2) + 0.5) * s},
                      s);
        if (!seen.insert({a.i / 2, a.j / 2}).second) continue;
        CHECK_FALSE(is_OK(parent, E, cfg.p, cfg.c1, cfg.angle_count, cfg.exec));
    }
}

TEST_CASE("keystones: uniform leaves are all keystone") {
    std::vector<Square> leaves;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            leaves.push_back(Square({i + 0.5, j + 0.5}, 1.0));
    std::vector<int> ks = find_keystones(leaves);
    CHECK(ks.size() == leaves.size());
}

TEST_CASE("keystones: isolated small leaves are keystone") {
    std::vector<Square> leaves;
    leaves.push_back(Square({0.25, 0.25}, 0.5));
    leaves.push_back(Square({0.75, 0.25}, 0.5));
    for (int i = 0; i < 3; ++i)
        leaves.push_back(Square({200.0 + i * 1.0, 0.5}, 1.0));
    std::vector<int> ks = find_keystones(leaves);
    CHECK(std::find(ks.begin(), ks.end(), 0) != ks.end());
    CHECK(std::find(ks.begin(), ks.end(), 1) != ks.end());
}

TEST_CASE("decomposition invariants on corner fixtures") {
    Config cfg = test_config();
    std::vector<Point2> E{{-0.5, -0.5}, {-0.45, -0.5}, {-0.5, -0.45},
                          {0.6, 0.55},  {0.66, 0.55},  {0.6, 0.61}};
    CZDecomposition d = build_decomposition(E, cfg);
    CHECK_FALSE(d.trivial());
    check_good_geometry(d);
    check_keystones_and_paths(d);
    CHECK(d.keystone_count() >= 1);
    for (int mu = 0; mu < d.keystone_count(); ++mu)
        CHECK(d.delta_pairs.count({mu, mu}) == 1);
}

TEST_CASE("decomposition invariants on random instances") {
    Config cfg = test_config();
    test::Rng rng(17);
    for (int rep = 0; rep < 4; ++rep) {
        std::vector<Point2> E =
            test::random_points(rng, rng.uniform_int(3, 10), -1, 1, 0.02);
        CZDecomposition d = build_decomposition(E, cfg);
        check_good_geometry(d);
        check_keystones_and_paths(d);
    }
}

TEST_CASE("two-scale fixture: paths descend to the fine center") {
    Config cfg = test_config();
    std::vector<Point2> E{{0, 0}, {0.01, 0}, {0, 0.01}};
    for (int k = 0; k < 8; ++k) {
        double a = 2.0 * M_PI * k / 8;
        E.push_back({0.9 * std::cos(a), 0.9 * std::sin(a)});
    }
    CZDecomposition d = build_decomposition(E, cfg);
    CHECK_FALSE(d.trivial());
    check_good_geometry(d);
    check_keystones_and_paths(d);
    CHECK(d.decay_constant > 0.0);
    CHECK(d.decay_constant <= 8.0);
}

TEST_CASE("delta pairs: witnessed gaps only") {
    Config cfg = test_config();
    std::vector<Point2> E{{-0.5, -0.5}, {-0.45, -0.5}, {-0.5, -0.45},
                          {0.6, 0.55},  {0.66, 0.55},  {0.6, 0.61}};
    CZDecomposition d = build_decomposition(E, cfg);
    for (const auto& [key, gap] : d.delta_pairs) {
        double expect = std::numeric_limits<double>::infinity();
        for (int nu = 0; nu < d.leaf_count(); ++nu) {
            if (d.mu_of_nu[std::size_t(nu)] != key.first) continue;
            for (int nb : d.adjacency[std::size_t(nu)])
                if (d.mu_of_nu[std::size_t(nb)] == key.second)
                    expect = std::min(expect, d.leaves[std::size_t(nu)].side);
        }
        CHECK(gap == expect);
    }
}

TEST_CASE("fiber geometric sums and keystone size comparisons") {
    Config cfg = test_config();
    std::vector<Point2> E{{0, 0}, {0.01, 0}, {0, 0.01}};
    for (int k = 0; k < 8; ++k) {
        double a = 2.0 * M_PI * k / 8;
        E.push_back({0.9 * std::cos(a), 0.9 * std::sin(a)});
    }
    CZDecomposition d = build_decomposition(E, cfg);
    REQUIRE_FALSE(d.trivial());
    const double p = cfg.p;
    // sum over each fiber of delta_nu^{-eps} <= C (delta#_mu)^{-eps}
    for (double eps : {p - 2.0, 2.0 * p - 2.0}) {
        double worst = 0.0;
        for (int mu = 0; mu < d.keystone_count(); ++mu) {
            double sum = 0.0;
            for (int nu = 0; nu < d.leaf_count(); ++nu)
                if (d.mu_of_nu[std::size_t(nu)] == mu)
                    sum += std::pow(d.leaves[std::size_t(nu)].side, -eps);
            const double ref = std::pow(
                d.leaves[std::size_t(d.keystones[std::size_t(mu)])].side, -eps);
            worst = std::max(worst, sum / ref);
        }
        CHECK(worst < 500.0);  // recorded geometric-series constant
    }
    // d(Q_nu, Q#_mu(nu)) <= C delta_nu and delta# <= C delta_nu
    double cd = 0.0, cs = 0.0;
    for (int nu = 0; nu < d.leaf_count(); ++nu) {
        const Square& q = d.leaves[std::size_t(nu)];
        const Square& ks =
            d.leaves[std::size_t(d.keystones[std::size_t(d.mu_of_nu[std::size_t(nu)])])];
        cd = std::max(cd, square_distance(q, ks) / q.side);
        cs = std::max(cs, ks.side / q.side);
    }
    CHECK(cd < 300.0);
    CHECK(cs <= 1.0 + 1e-12);
    // K3: bounded intersection of the 10-dilates of the keystones
    for (int mu = 0; mu < d.keystone_count(); ++mu) {
        int overlaps = 0;
        const Square a =
            dilate(d.leaves[std::size_t(d.keystones[std::size_t(mu)])], 10.0);
        for (int mu2 = 0; mu2 < d.keystone_count(); ++mu2)
            if (are_neighbors(
                    a, dilate(d.leaves[std::size_t(d.keystones[std::size_t(mu2)])],
                              10.0)))
                ++overlaps;
        CHECK(overlaps <= 50);
    }
}

TEST_CASE("global Sobolev inequality for smooth fields") {
    Config cfg = test_config();
    test::Rng rng(41);
    std::vector<Point2> E = test::random_points(rng, 8, -1, 1, 0.02);
    CZDecomposition d = build_decomposition(E, cfg);
    if (d.trivial()) return;
    const double p = cfg.p;

    struct Candidate {
        const char* name;
        std::function<Point2(Point2)> grad;
        std::function<double(Point2)> hess_frob;
    };
    std::vector<Candidate> fields;
    fields.push_back(
        {"sin*cos",
         [](Point2 q) {
             return Point2{std::cos(q.x) * std::cos(q.y),
                           -std::sin(q.x) * std::sin(q.y)};
         },
         [](Point2 q) {
             const double sxy = std::sin(q.x) * std::cos(q.y);
             const double cxy = std::cos(q.x) * std::sin(q.y);
             return std::sqrt(2.0 * sxy * sxy + 2.0 * cxy * cxy);
         }});
    const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1),
                 c = rng.uniform(-1, 1);
    fields.push_back({"quadratic",
                      [=](Point2 q) {
                          return Point2{a * q.x + b * q.y, b * q.x + c * q.y};
                      },
                      [=](Point2) {
                          return std::sqrt(a * a + 2 * b * b + c * c);
                      }});

    for (const Candidate& F : fields) {
        double lhs = 0.0;
        for (int nu = 0; nu < d.leaf_count(); ++nu) {
            const Point2 xd = d.x_nu[std::size_t(nu)];
            const Point2 xk =
                d.x_sharp[std::size_t(d.mu_of_nu[std::size_t(nu)])];
            const Point2 g1 = F.grad(xd), g2 = F.grad(xk);
            lhs += std::pow(std::hypot(g1.x - g2.x, g1.y - g2.y), p) *
                   std::pow(d.leaves[std::size_t(nu)].side, 2.0 - p);
        }
        // numeric Hessian p-norm over the root
        double rhs = 0.0;
        const int n = 64;
        const double h = d.root.side / n;
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                Point2 q{d.root.xmin() + (i + 0.5) * h,
                         d.root.ymin() + (j + 0.5) * h};
                rhs += std::pow(F.hess_frob(q), p) * h * h;
            }
        CHECK(lhs <= 1e4 * rhs);  // generous recorded constant
    }
}
