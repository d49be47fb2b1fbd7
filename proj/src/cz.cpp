#include "sobtrace/cz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace sobtrace {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double min_pairwise_gap(const std::vector<Point2>& E) {
    double g = kInf;
    for (std::size_t i = 0; i < E.size(); ++i)
        for (std::size_t j = i + 1; j < E.size(); ++j)
            g = std::min(g, dist(E[i], E[j]));
    return g;
}
}  // namespace

Square choose_root(const std::vector<Point2>& E) {
    for (std::size_t i = 0; i < E.size(); ++i)
        for (std::size_t j = i + 1; j < E.size(); ++j)
            if (E[i] == E[j]) throw InvalidInput("choose_root: duplicate points");
    double r = 0.0;
    for (const Point2& e : E) r = std::max(r, e.norm_inf());
    double want = 10.5 * std::max(1.0, 2.0 * r);
    double side = std::exp2(std::ceil(std::log2(want)));
    Square root({0.0, 0.0}, side);
    root.dyadic_addr = DyadicAddr{0, 0, 0};
    for (const Point2& e : E)
        if (!(std::fabs(e.x) < side / 20.0 && std::fabs(e.y) < side / 20.0))
            throw InternalError("choose_root: containment failed");
    return root;
}

std::vector<Square> cut(const Square& root, const std::vector<Point2>& E,
                        double p, double c1, int angles, ExecPolicy exec) {
    int depth_cap = 64;
    if (E.size() >= 2) {
        const double eps = min_pairwise_gap(E) / 100.0;
        depth_cap = int(std::ceil(std::log2(root.side / eps))) + 4;
    }
    std::vector<Square> leaves;
    std::vector<std::pair<Square, int>> stack{{root, 0}};
    while (!stack.empty()) {
        auto [Q, depth] = stack.back();
        stack.pop_back();
        if (is_OK(Q, E, p, c1, angles, exec)) {
            leaves.push_back(Q);
            continue;
        }
        if (depth >= depth_cap)
            throw InternalError("cut: depth cap exceeded (seminorm estimate bug?)");
        for (const Square& ch : children(Q)) stack.emplace_back(ch, depth + 1);
    }
    // Deterministic order: by address (level, then j, then i).
    std::sort(leaves.begin(), leaves.end(), [](const Square& a, const Square& b) {
        const DyadicAddr &x = *a.dyadic_addr, &y = *b.dyadic_addr;
        if (x.level != y.level) return x.level < y.level;
        if (x.j != y.j) return x.j < y.j;
        return x.i < y.i;
    });
    return leaves;
}

std::vector<int> find_keystones(const std::vector<Square>& leaves) {
    std::vector<int> out;
    for (std::size_t k = 0; k < leaves.size(); ++k) {
        const Square big = dilate(leaves[k], 100.0);
        bool keystone = true;
        for (std::size_t j = 0; j < leaves.size() && keystone; ++j) {
            if (leaves[j].side >= leaves[k].side) continue;
            if (are_neighbors(big, Square(leaves[j].center, leaves[j].side)))
                keystone = false;
        }
        if (keystone) out.push_back(int(k));
    }
    return out;
}

Point2 representative_point(const Square& leaf, const std::vector<Point2>& E) {
    const std::vector<Point2> nearby = points_in_dilate(leaf, 3.0, E);
    if (nearby.empty()) return leaf.center;
    const Square half = dilate(leaf, 0.5);
    Point2 best = leaf.center;
    double best_d = -1.0;
    for (int i = 0; i <= 8; ++i)
        for (int j = 0; j <= 8; ++j) {
            const Point2 c{half.xmin() + half.side * i / 8.0,
                           half.ymin() + half.side * j / 8.0};
            double d = kInf;
            for (const Point2& e : E) d = std::min(d, dist(c, e));
            if (d > best_d) {
                best_d = d;
                best = c;
            }
        }
    if (best_d < leaf.side / 5.0)
        throw ConfigError("representative_point: no point with d >= side/5; "
                          "decrease c1");
    return best;
}

namespace {

// Leaves crossed by the segment between the closest points of two squares,
// ordered by entry parameter. Consecutive entries share at least a point
// because the leaves tile the root.
std::vector<int> segment_leaves(const std::vector<Square>& leaves, int from,
                                int to) {
    const Square &A = leaves[std::size_t(from)], &B = leaves[std::size_t(to)];
    // Closest pair of points between two closed axis-aligned squares,
    // computed per axis.
    auto closest_1d = [](double alo, double ahi, double blo, double bhi,
                         double& xa, double& xb) {
        if (ahi < blo) {
            xa = ahi;
            xb = blo;
        } else if (bhi < alo) {
            xa = alo;
            xb = bhi;
        } else {
            const double mid = 0.5 * (std::max(alo, blo) + std::min(ahi, bhi));
            xa = xb = mid;
        }
    };
    Point2 a, b;
    closest_1d(A.xmin(), A.xmax(), B.xmin(), B.xmax(), a.x, b.x);
    closest_1d(A.ymin(), A.ymax(), B.ymin(), B.ymax(), a.y, b.y);
    const Point2 d = b - a;
    if (d.norm() == 0.0) return {from, to};

    struct Hit {
        double t_in, t_out;
        int idx;
    };
    std::vector<Hit> hits;
    for (std::size_t k = 0; k < leaves.size(); ++k) {
        // Parametric clip of [a, b] against the closed box.
        const Square& Q = leaves[k];
        double t0 = 0.0, t1 = 1.0;
        bool ok = true;
        for (int axis = 0; axis < 2 && ok; ++axis) {
            const double o = axis ? a.y : a.x, dd = axis ? d.y : d.x;
            const double lo = axis ? Q.ymin() : Q.xmin();
            const double hi = axis ? Q.ymax() : Q.xmax();
            if (std::fabs(dd) < 1e-300) {
                if (o < lo || o > hi) ok = false;
            } else {
                double u = (lo - o) / dd, v = (hi - o) / dd;
                if (u > v) std::swap(u, v);
                t0 = std::max(t0, u);
                t1 = std::min(t1, v);
                if (t0 > t1) ok = false;
            }
        }
        if (ok) hits.push_back({t0, t1, int(k)});
    }
    // Greedy interval cover: consecutive chain members overlap in the
    // segment parameter, so they share a segment point and are neighbors.
    // Leaves touching the segment in a single point are skipped unless they
    // extend the coverage.
    const double eps = 1e-12;
    std::vector<int> out;
    double reach = 0.0;
    while (reach < 1.0 - eps) {
        int best = -1;
        double best_out = reach;
        for (const Hit& h : hits) {
            if (h.t_in > reach + eps) continue;
            if (h.t_out > best_out + eps) {
                best = h.idx;
                best_out = h.t_out;
            } else if (best >= 0 && std::fabs(h.t_out - best_out) <= eps &&
                       h.idx < best) {
                best = h.idx;
            }
        }
        if (best < 0) break;  // no progress; endpoints are appended by the caller
        out.push_back(best);
        reach = best_out;
        hits.erase(std::remove_if(hits.begin(), hits.end(),
                                  [&](const Hit& h) { return h.idx == best; }),
                   hits.end());
    }
    return out;
}

}  // namespace

CZDecomposition build_decomposition(const std::vector<Point2>& E,
                                    const Config& cfg) {
    cfg.validate();
    CZDecomposition d;
    d.points = E;
    d.root = choose_root(E);
    d.leaves = cut(d.root, E, cfg.p, cfg.c1, cfg.angle_count, cfg.exec);
    const int K = d.leaf_count();

    d.adjacency.resize(std::size_t(K));
    for (int i = 0; i < K; ++i)
        for (int j = 0; j < K; ++j)
            if (are_neighbors(d.leaves[std::size_t(i)], d.leaves[std::size_t(j)]))
                d.adjacency[std::size_t(i)].push_back(j);

    d.E_nu.resize(std::size_t(K));
    for (int nu = 0; nu < K; ++nu) {
        const Square dil = dilate(d.leaves[std::size_t(nu)], 1.1);
        for (std::size_t e = 0; e < E.size(); ++e)
            if (dil.contains(E[e])) d.E_nu[std::size_t(nu)].push_back(int(e));
    }

    d.x_nu.resize(std::size_t(K));
    for (int nu = 0; nu < K; ++nu)
        d.x_nu[std::size_t(nu)] = representative_point(d.leaves[std::size_t(nu)], E);

    if (d.trivial()) {
        d.mu_of_nu = {0};
        d.keystones = {0};
        d.paths = {{0}};
        d.x_sharp = {d.x_nu[0]};
        d.E_sharp.resize(1);
        for (std::size_t e = 0; e < E.size(); ++e) d.E_sharp[0].push_back(int(e));
        return d;
    }

    d.keystones = find_keystones(d.leaves);
    if (d.keystones.empty())
        throw InternalError("build_decomposition: no keystone found");
    std::vector<int> slot_of_leaf(std::size_t(K), -1);
    for (std::size_t m = 0; m < d.keystones.size(); ++m)
        slot_of_leaf[std::size_t(d.keystones[m])] = int(m);

    // Marker iteration: hop to the closest leaf of at most half the size
    // inside the 100-dilate until a keystone is reached; intermediaries are
    // the leaves crossing the connecting segment.
    d.paths.resize(std::size_t(K));
    d.mu_of_nu.assign(std::size_t(K), -1);
    d.decay_constant = 0.0;
    for (int nu = 0; nu < K; ++nu) {
        std::vector<int> path{nu};
        int marker = nu;
        std::vector<char> visited(std::size_t(K), 0);
        while (slot_of_leaf[std::size_t(marker)] < 0) {
            if (visited[std::size_t(marker)])
                throw InternalError("keystone path: marker cycle");
            visited[std::size_t(marker)] = 1;
            const Square big = dilate(d.leaves[std::size_t(marker)], 100.0);
            int next = -1;
            double best_d = kInf;
            for (int j = 0; j < K; ++j) {
                if (d.leaves[std::size_t(j)].side >
                    d.leaves[std::size_t(marker)].side / 2.0)
                    continue;
                if (!are_neighbors(big, d.leaves[std::size_t(j)])) continue;
                const double dd = square_distance(d.leaves[std::size_t(marker)],
                                                  d.leaves[std::size_t(j)]);
                if (dd < best_d) {
                    best_d = dd;
                    next = j;
                }
            }
            if (next < 0)
                throw InternalError("keystone path: marker is not keystone yet "
                                    "has no smaller leaf in its 100-dilate");
            std::vector<int> seg = segment_leaves(d.leaves, marker, next);
            for (int idx : seg)
                if (path.back() != idx) path.push_back(idx);
            if (path.back() != next) path.push_back(next);
            marker = next;
        }
        d.paths[std::size_t(nu)] = path;
        d.mu_of_nu[std::size_t(nu)] = slot_of_leaf[std::size_t(marker)];
        // Decay certificate with c = 1/4.
        for (std::size_t i = 0; i < path.size(); ++i)
            for (std::size_t j = i + 1; j < path.size(); ++j) {
                const double ratio = d.leaves[std::size_t(path[j])].side /
                                     d.leaves[std::size_t(path[i])].side;
                d.decay_constant = std::max(
                    d.decay_constant,
                    ratio * std::pow(4.0 / 3.0, double(j - i)));
            }
    }

    d.x_sharp.resize(d.keystones.size());
    d.E_sharp.resize(d.keystones.size());
    for (std::size_t m = 0; m < d.keystones.size(); ++m) {
        const int leaf = d.keystones[m];
        d.x_sharp[m] = d.x_nu[std::size_t(leaf)];
        const Square dil = dilate(d.leaves[std::size_t(leaf)], 9.0);
        for (std::size_t e = 0; e < E.size(); ++e)
            if (dil.contains(E[e])) d.E_sharp[m].push_back(int(e));
    }

    // Delta_{mu mu'} = min leaf size among nu in fiber mu touching fiber mu'.
    for (int nu = 0; nu < K; ++nu)
        for (int nb : d.adjacency[std::size_t(nu)]) {
            const int mu = d.mu_of_nu[std::size_t(nu)];
            const int mup = d.mu_of_nu[std::size_t(nb)];
            const double s = d.leaves[std::size_t(nu)].side;
            auto key = std::make_pair(mu, mup);
            auto it = d.delta_pairs.find(key);
            if (it == d.delta_pairs.end()) d.delta_pairs[key] = s;
            else it->second = std::min(it->second, s);
        }
    return d;
}

} // namespace sobtrace
