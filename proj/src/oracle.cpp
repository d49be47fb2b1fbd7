#include "sobtrace/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "sobtrace/errors.hpp"
#include "sobtrace/kernels.hpp"

namespace sobtrace {

namespace {

// Sparse constraint rows C u = rhs.
struct ConstraintSet {
    std::vector<std::vector<std::pair<int, double>>> rows;
    std::vector<double> rhs;

    std::size_t size() const { return rows.size(); }

    void apply(const std::vector<double>& u, std::vector<double>& out) const {
        out.assign(rows.size(), 0.0);
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (const auto& [c, a] : rows[r]) out[r] += a * u[std::size_t(c)];
    }
    void apply_transpose(const std::vector<double>& lam,
                         std::vector<double>& out, std::size_t n) const {
        out.assign(n, 0.0);
        for (std::size_t r = 0; r < rows.size(); ++r)
            for (const auto& [c, a] : rows[r]) out[std::size_t(c)] += a * lam[r];
    }
};

// Dense Cholesky of the small Gram matrix C C^T.
struct GramSolver {
    int m = 0;
    std::vector<double> L;  // lower triangle, row-major

    explicit GramSolver(const ConstraintSet& C) : m(int(C.size())) {
        std::vector<double> G(std::size_t(m) * m, 0.0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j <= i; ++j) {
                double s = 0.0;
                for (const auto& [ci, ai] : C.rows[std::size_t(i)])
                    for (const auto& [cj, aj] : C.rows[std::size_t(j)])
                        if (ci == cj) s += ai * aj;
                G[std::size_t(i) * m + j] = s;
            }
        L.assign(std::size_t(m) * m, 0.0);
        for (int i = 0; i < m; ++i)
            for (int j = 0; j <= i; ++j) {
                double s = G[std::size_t(i) * m + j];
                for (int k = 0; k < j; ++k)
                    s -= L[std::size_t(i) * m + k] * L[std::size_t(j) * m + k];
                if (i == j) {
                    if (s <= 0.0)
                        throw InvalidInput("oracle: degenerate constraints");
                    L[std::size_t(i) * m + i] = std::sqrt(s);
                } else {
                    L[std::size_t(i) * m + j] = s / L[std::size_t(j) * m + j];
                }
            }
    }

    std::vector<double> solve(std::vector<double> b) const {
        for (int i = 0; i < m; ++i) {
            for (int k = 0; k < i; ++k)
                b[std::size_t(i)] -= L[std::size_t(i) * m + k] * b[std::size_t(k)];
            b[std::size_t(i)] /= L[std::size_t(i) * m + i];
        }
        for (int i = m - 1; i >= 0; --i) {
            for (int k = i + 1; k < m; ++k)
                b[std::size_t(i)] -= L[std::size_t(k) * m + i] * b[std::size_t(k)];
            b[std::size_t(i)] /= L[std::size_t(i) * m + i];
        }
        return b;
    }
};

double dot(const std::vector<double>& a, const std::vector<double>& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

// Projection onto the null space of C: v -> v - C^T (CC^T)^{-1} C v.
void project(const ConstraintSet& C, const GramSolver& gram,
             std::vector<double>& v) {
    if (C.size() == 0) return;
    std::vector<double> cv;
    C.apply(v, cv);
    std::vector<double> lam = gram.solve(std::move(cv));
    std::vector<double> corr;
    C.apply_transpose(lam, corr, v.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] -= corr[i];
}

// Minimize 1/2 u^T A u over {C u = rhs} starting from a feasible point,
// with A given as a matvec. Projected conjugate gradients with an optional
// diagonal preconditioner.
void projected_cg(const std::function<void(const std::vector<double>&,
                                           std::vector<double>&)>& matvec,
                  const ConstraintSet& C, const GramSolver& gram,
                  const std::vector<double>& inv_diag, std::vector<double>& u,
                  double rel_tol, int max_iters) {
    const std::size_t n = u.size();
    std::vector<double> r(n), z(n), pdir(n), Ap(n);
    matvec(u, r);
    for (std::size_t i = 0; i < n; ++i) r[i] = -r[i];
    project(C, gram, r);
    auto precond = [&](const std::vector<double>& v, std::vector<double>& out) {
        out = v;
        if (!inv_diag.empty())
            for (std::size_t i = 0; i < n; ++i) out[i] *= inv_diag[i];
        project(C, gram, out);
    };
    precond(r, z);
    pdir = z;
    double rz = dot(r, z);
    const double rz0 = rz;
    if (rz0 <= 0.0) return;
    for (int it = 0; it < max_iters; ++it) {
        matvec(pdir, Ap);
        const double pAp = dot(pdir, Ap);
        if (pAp <= 0.0) return;
        const double alpha = rz / pAp;
        for (std::size_t i = 0; i < n; ++i) {
            u[i] += alpha * pdir[i];
            r[i] -= alpha * Ap[i];
        }
        project(C, gram, r);
        precond(r, z);
        const double rz_new = dot(r, z);
        if (rz_new <= rel_tol * rel_tol * rz0) return;
        const double beta = rz_new / rz;
        for (std::size_t i = 0; i < n; ++i) pdir[i] = z[i] + beta * pdir[i];
        rz = rz_new;
    }
}

void bilinear_stencil(const Square& box, int n, const Point2& q,
                      std::vector<std::pair<int, double>>& row) {
    const double h = box.side / (n - 1);
    double fx = (q.x - box.xmin()) / h;
    double fy = (q.y - box.ymin()) / h;
    int i = std::min(int(std::floor(fx)), n - 2);
    int j = std::min(int(std::floor(fy)), n - 2);
    i = std::max(i, 0);
    j = std::max(j, 0);
    const double ax = fx - i, ay = fy - j;
    auto idx = [n](int a, int b) { return b * n + a; };
    row = {{idx(i, j), (1 - ax) * (1 - ay)},
           {idx(i + 1, j), ax * (1 - ay)},
           {idx(i, j + 1), (1 - ax) * ay},
           {idx(i + 1, j + 1), ax * ay}};
}

}  // namespace

namespace {

ConstraintSet build_constraints(const GridProblem& prob) {
    const int n = prob.n;
    const double h = prob.box.side / (n - 1);
    ConstraintSet C;
    for (const auto& [q, val] : prob.constraints) {
        if (!prob.box.contains(q))
            throw InvalidInput("min_energy_2d: constraint outside box");
        std::vector<std::pair<int, double>> row;
        bilinear_stencil(prob.box, n, q, row);
        C.rows.push_back(std::move(row));
        C.rhs.push_back(val);
    }
    for (const auto& jc : prob.jet_constraints) {
        std::vector<std::pair<int, double>> row;
        bilinear_stencil(prob.box, n, jc.at, row);
        C.rows.push_back(row);
        C.rhs.push_back(jc.value);
        // Central-difference gradient at the nearest interior node.
        int i = std::clamp(int(std::lround((jc.at.x - prob.box.xmin()) / h)), 1,
                           n - 2);
        int j = std::clamp(int(std::lround((jc.at.y - prob.box.ymin()) / h)), 1,
                           n - 2);
        auto idx = [n](int a, int b) { return b * n + a; };
        C.rows.push_back({{idx(i + 1, j), 0.5 / h}, {idx(i - 1, j), -0.5 / h}});
        C.rhs.push_back(jc.grad.x);
        C.rows.push_back({{idx(i, j + 1), 0.5 / h}, {idx(i, j - 1), -0.5 / h}});
        C.rhs.push_back(jc.grad.y);
    }
    return C;
}

// Diagonal of the weighted quadratic's Hessian, for Jacobi preconditioning.
std::vector<double> weighted_diagonal(const kernels::Grid2D& g,
                                      const std::vector<double>& w) {
    const int n = g.n;
    const double h2 = g.h * g.h;
    const double ih2 = 1.0 / h2;
    std::vector<double> diag(std::size_t(n) * n, 0.0);
    auto interior = [n](int i, int j) {
        return i >= 1 && i <= n - 2 && j >= 1 && j <= n - 2;
    };
    for (int b = 0; b < n; ++b)
        for (int a = 0; a < n; ++a) {
            double s = 0.0;
            for (int di = -1; di <= 1; ++di)
                if (interior(a + di, b)) {
                    const double c = (di == 0 ? -2.0 : 1.0) * ih2;
                    s += 2.0 * w[std::size_t(g.idx(a + di, b))] * c * c;
                }
            for (int dj = -1; dj <= 1; ++dj)
                if (interior(a, b + dj)) {
                    const double c = (dj == 0 ? -2.0 : 1.0) * ih2;
                    s += 2.0 * w[std::size_t(g.idx(a, b + dj))] * c * c;
                }
            for (int di = -1; di <= 1; di += 2)
                for (int dj = -1; dj <= 1; dj += 2)
                    if (interior(a + di, b + dj)) {
                        const double c = di * dj * 0.25 * ih2;
                        s += 4.0 * w[std::size_t(g.idx(a + di, b + dj))] * c * c;
                    }
            diag[std::size_t(g.idx(a, int(b)))] = s * h2;
        }
    return diag;
}

std::vector<double> inverted_or_one(const std::vector<double>& d) {
    std::vector<double> out(d.size(), 1.0);
    double dmax = 0.0;
    for (double v : d) dmax = std::max(dmax, v);
    if (dmax <= 0.0) return out;
    const double floor = 1e-12 * dmax;
    for (std::size_t i = 0; i < d.size(); ++i)
        out[i] = 1.0 / std::max(d[i], floor);
    return out;
}

// Exact line search (convex along a direction) by golden section.
template <class EnergyFn>
double golden_step(EnergyFn&& energy, const std::vector<double>& u,
                   const std::vector<double>& dir, double lo, double hi) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    auto at = [&](double a) {
        std::vector<double> v(u.size());
        for (std::size_t i = 0; i < u.size(); ++i) v[i] = u[i] + a * dir[i];
        return energy(v);
    };
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = at(x1), f2 = at(x2);
    for (int it = 0; it < 40; ++it) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = at(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = at(x2);
        }
    }
    return 0.5 * (x1 + x2);
}

}  // namespace

GridSolution min_energy_2d(const GridProblem& prob, ExecPolicy exec) {
    const int n = prob.n;
    if (n < 16) throw InvalidInput("min_energy_2d: n < 16");
    if (!(prob.p >= 2.0)) throw InvalidInput("min_energy_2d: p < 2");
    kernels::Grid2D grid{n, prob.box.side / (n - 1)};
    const std::size_t N = std::size_t(n) * n;

    ConstraintSet C = build_constraints(prob);
    if (C.size() >= N)
        throw InvalidInput("min_energy_2d: more constraints than free nodes");
    GramSolver gram(C);

    GridSolution sol;
    if (n >= 32) {
        // Coarse-to-fine warm start: solve at half resolution, prolong.
        GridProblem coarse = prob;
        coarse.n = (n + 1) / 2;
        GridSolution cs = min_energy_2d(coarse, exec);
        sol.values.assign(N, 0.0);
        const double ch = prob.box.side / (coarse.n - 1);
        for (int j = 0; j < n; ++j)
            for (int i = 0; i < n; ++i) {
                const Point2 q{prob.box.xmin() + i * grid.h,
                               prob.box.ymin() + j * grid.h};
                double fx = (q.x - prob.box.xmin()) / ch;
                double fy = (q.y - prob.box.ymin()) / ch;
                int ci = std::min(int(std::floor(fx)), coarse.n - 2);
                int cj = std::min(int(std::floor(fy)), coarse.n - 2);
                const double ax = fx - ci, ay = fy - cj;
                auto cv = [&](int a, int b) {
                    return cs.values[std::size_t(b * coarse.n + a)];
                };
                sol.values[std::size_t(j * n + i)] =
                    (1 - ax) * (1 - ay) * cv(ci, cj) +
                    ax * (1 - ay) * cv(ci + 1, cj) +
                    (1 - ax) * ay * cv(ci, cj + 1) +
                    ax * ay * cv(ci + 1, cj + 1);
            }
        // restore exact feasibility
        std::vector<double> cu;
        C.apply(sol.values, cu);
        for (std::size_t r = 0; r < C.size(); ++r) cu[r] = C.rhs[r] - cu[r];
        std::vector<double> lam = gram.solve(std::move(cu));
        std::vector<double> corr;
        C.apply_transpose(lam, corr, N);
        for (std::size_t i = 0; i < N; ++i) sol.values[i] += corr[i];
    } else {
        // Feasible least-norm start u = C^T (CC^T)^{-1} rhs.
        sol.values.assign(N, 0.0);
        std::vector<double> lam = gram.solve(C.rhs);
        C.apply_transpose(lam, sol.values, N);
    }

    std::vector<double> dxx, dxy, dyy, w(N, 1.0);
    auto energy = [&](const std::vector<double>& u) {
        kernels::cell_hessians(grid, u, dxx, dxy, dyy, exec);
        return kernels::penergy(grid, dxx, dxy, dyy, prob.p, exec);
    };
    auto matvec = [&](const std::vector<double>& u, std::vector<double>& y) {
        std::vector<double> a, b, c;
        kernels::cell_hessians(grid, u, a, b, c, exec);
        kernels::weighted_gather(grid, w, a, b, c, y, exec);
    };
    const int cg_cap = 600 + 60 * n;

    double E = energy(sol.values);
    sol.outer_iterations = 0;
    if (prob.p == 2.0) {
        std::vector<double> inv_diag = inverted_or_one(weighted_diagonal(grid, w));
        projected_cg(matvec, C, gram, inv_diag, sol.values, 1e-8, 4 * cg_cap);
        sol.energy_p_root =
            std::pow(std::max(energy(sol.values), 0.0), 1.0 / prob.p);
        sol.outer_iterations = 1;
        return sol;
    }

    const int max_outer = 500;
    const double scale =
        std::sqrt(E / std::max(1, (n - 2) * (n - 2))) + 1e-300;
    for (int outer = 0; outer < max_outer; ++outer) {
        sol.outer_iterations = outer + 1;
        kernels::cell_hessians(grid, sol.values, dxx, dxy, dyy, exec);
        const double eps2 = 1e-12 * scale * scale;
        for (std::size_t c = 0; c < N; ++c) {
            const double q =
                dxx[c] * dxx[c] + 2.0 * dxy[c] * dxy[c] + dyy[c] * dyy[c];
            w[c] = std::pow(q + eps2, 0.5 * prob.p - 1.0);
        }
        std::vector<double> inv_diag = inverted_or_one(weighted_diagonal(grid, w));
        // Forcing sequence: loose inner solves early, 1e-8 near convergence.
        const double inner_tol =
            std::max(1e-8, 1e-2 * std::pow(0.25, double(outer)));
        std::vector<double> next = sol.values;
        projected_cg(matvec, C, gram, inv_diag, next, inner_tol, cg_cap);
        // Exact line search along the IRLS direction (energy is convex).
        std::vector<double> dir(N);
        for (std::size_t i = 0; i < N; ++i) dir[i] = next[i] - sol.values[i];
        const double step = golden_step(energy, sol.values, dir, 0.0, 1.25);
        for (std::size_t i = 0; i < N; ++i)
            next[i] = sol.values[i] + step * dir[i];
        double En = energy(next);
        if (En > E) {
            En = E;  // reject; stationary along this direction
            next = sol.values;
        }
        sol.values = next;
        const double drop = E - En;
        E = En;
        if (outer >= 2 && drop <= 1e-8 * std::max(E, 1e-300)) {
            sol.energy_p_root = std::pow(std::max(E, 0.0), 1.0 / prob.p);
            return sol;
        }
    }
    throw ToleranceNotMet("min_energy_2d: IRLS stagnation",
                          std::pow(std::max(E, 0.0), 1.0 / prob.p));
}

double min_besov_1d(const std::vector<double>& xs,
                    const std::vector<double>& values, double p, int n,
                    ExecPolicy exec) {
    if (xs.size() != values.size()) throw InvalidInput("min_besov_1d: sizes");
    if (xs.size() < 2) return 0.0;
    const double lo = xs.front(), hi = xs.back();
    const double span = hi - lo;
    // Nodes: uniform grid padded by 10% with the data positions merged in.
    std::vector<double> t;
    for (int i = 0; i < n; ++i)
        t.push_back(lo - 0.1 * span + (1.2 * span) * i / (n - 1));
    t.insert(t.end(), xs.begin(), xs.end());
    std::sort(t.begin(), t.end());
    t.erase(std::unique(t.begin(), t.end(),
                        [&](double a, double b) {
                            return std::fabs(a - b) < 1e-12 * span;
                        }),
            t.end());
    const std::size_t M = t.size();

    // Cell measures (trapezoid weights).
    std::vector<double> hm(M, 0.0);
    for (std::size_t i = 0; i < M; ++i) {
        if (i > 0) hm[i] += 0.5 * (t[i] - t[i - 1]);
        if (i + 1 < M) hm[i] += 0.5 * (t[i + 1] - t[i]);
    }
    std::vector<double> K(M * M, 0.0);
    for (std::size_t i = 0; i < M; ++i)
        for (std::size_t j = 0; j < M; ++j)
            if (i != j)
                K[i * M + j] = hm[i] * hm[j] *
                               std::pow(std::fabs(t[i] - t[j]), -p);

    // Unknowns: [v0, s_0 .. s_{M-1}]; values accumulate by trapezoid.
    const std::size_t NU = M + 1;
    ConstraintSet C;
    for (std::size_t k = 0; k < xs.size(); ++k) {
        std::vector<std::pair<int, double>> row{{0, 1.0}};
        std::vector<double> acc(M, 0.0);
        // integrate s from t[0] to xs[k]
        for (std::size_t i = 0; i + 1 < M && t[i] < xs[k]; ++i) {
            const double seg = std::min(t[i + 1], xs[k]) - t[i];
            if (seg <= 0) break;
            // Linear slope between nodes; exact trapezoid on full cells and
            // a clipped trapezoid on the last partial cell.
            const double frac = seg / (t[i + 1] - t[i]);
            acc[i] += seg * (1.0 - 0.5 * frac);
            acc[i + 1] += seg * 0.5 * frac;
        }
        for (std::size_t i = 0; i < M; ++i)
            if (acc[i] != 0.0) row.emplace_back(int(i + 1), acc[i]);
        C.rows.push_back(std::move(row));
        C.rhs.push_back(values[k]);
    }
    GramSolver gram(C);

    std::vector<double> u(NU, 0.0);
    {
        std::vector<double> lam = gram.solve(C.rhs);
        C.apply_transpose(lam, u, NU);
    }
    auto slopes = [&](const std::vector<double>& uu) {
        return std::vector<double>(uu.begin() + 1, uu.end());
    };
    auto energy = [&](const std::vector<double>& uu) {
        return kernels::pair_energy(K, slopes(uu), p, exec);
    };

    double E = energy(u);
    std::vector<double> w;
    const double eps = 1e-8 * (std::sqrt(E / std::max<double>(M, 1)) + 1e-30);
    for (int outer = 0; outer < 500; ++outer) {
        kernels::pair_weights(slopes(u), p, eps, w, exec);
        auto matvec = [&](const std::vector<double>& uu,
                          std::vector<double>& y) {
            std::vector<double> ys;
            kernels::pair_matvec(K, w, slopes(uu), ys, exec);
            y.assign(NU, 0.0);
            for (std::size_t i = 0; i < M; ++i) y[i + 1] = ys[i];
        };
        std::vector<double> next = u;
        projected_cg(matvec, C, gram, {}, next, 1e-8, 2000);
        double En = energy(next);
        double step = 1.0;
        while (En > E && step > 1e-8) {
            step *= 0.5;
            for (std::size_t i = 0; i < NU; ++i)
                next[i] = u[i] + step * (next[i] - u[i]);
            En = energy(next);
        }
        u = next;
        const double drop = E - En;
        E = En;
        if (drop <= 1e-8 * std::max(E, 1e-300))
            return std::pow(std::max(E, 0.0), 1.0 / p);
    }
    throw ToleranceNotMet("min_besov_1d: IRLS stagnation",
                          std::pow(std::max(E, 0.0), 1.0 / p));
}

double sobolev_seminorm_quadrature(const Field2D& F, const Square& box, int n,
                                   double p, ExecPolicy exec) {
    std::vector<double> rows = kernels::hessian_rows(F, box, n, p, exec);
    double s = 0.0;
    for (double r : rows) s += r;
    return std::pow(s, 1.0 / p);
}

double w2p_norm_quadrature(const Field2D& F, const Square& box, int n,
                           double p) {
    const double h = box.side / n;
    double sv = 0.0, sg = 0.0, sh = 0.0;
    for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) {
            const Point2 q{box.xmin() + (i + 0.5) * h,
                           box.ymin() + (j + 0.5) * h};
            FieldEval e = F.eval(q);
            sv += std::pow(std::fabs(e.v), p);
            sg += std::pow(std::hypot(e.gx, e.gy), p);
            sh += std::pow(e.hess_frobenius(), p);
        }
    const double a = h * h;
    return std::pow(sv * a, 1.0 / p) + std::pow(sg * a, 1.0 / p) +
           std::pow(sh * a, 1.0 / p);
}

} // namespace sobtrace
