#include "sobtrace/jets.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace sobtrace {

double lp_eliminate(const std::vector<double>& z,
                    const std::vector<double>& beta, double p) {
    if (z.size() != beta.size())
        throw InvalidInput("lp_eliminate: length mismatch");
    double num = 0.0, den = 0.0;
    for (std::size_t i = 0; i < z.size(); ++i) {
        if (beta[i] == 0.0) continue;
        const double bp = std::pow(std::fabs(beta[i]), p);
        num += (z[i] / beta[i]) * bp;
        den += bp;
    }
    return den == 0.0 ? 0.0 : num / den;
}

double lp_objective(const ElimProblem& prob, const std::array<double, 3>& a,
                    double p) {
    double s = 0.0;
    for (std::size_t i = 0; i < prob.size(); ++i) {
        const double r = prob.z[i] - prob.beta[i][0] * a[0] -
                         prob.beta[i][1] * a[1] - prob.beta[i][2] * a[2];
        s += prob.weight[i] * std::pow(std::fabs(r), p);
    }
    return s;
}

namespace {

// Residuals with one coordinate left symbolic: r_i = base_i - beta_i * a.
struct Reduced {
    std::vector<double> base;
    std::vector<double> beta;
};

}  // namespace

std::array<double, 3> minimize_affine_lp(const ElimProblem& prob, double p,
                                         int sweeps) {
    const std::size_t n = prob.size();
    if (n == 0) return {0.0, 0.0, 0.0};

    // Fold the weights into the rows: w |r|^p = |w^{1/p} r|^p.
    std::vector<std::array<double, 4>> rows(n);  // z, b0, b1, b2 scaled
    for (std::size_t i = 0; i < n; ++i) {
        const double s = std::pow(prob.weight[i], 1.0 / p);
        rows[i] = {s * prob.z[i], s * prob.beta[i][0], s * prob.beta[i][1],
                   s * prob.beta[i][2]};
    }
    auto column = [&](int c) {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = rows[i][std::size_t(c + 1)];
        return v;
    };
    auto constants = [&]() {
        std::vector<double> v(n);
        for (std::size_t i = 0; i < n; ++i) v[i] = rows[i][0];
        return v;
    };

    // Nested elimination: express coordinate 0 through (1, 2), then 1
    // through 2, then solve for 2, and back-substitute. Every step is the
    // Claim-1 linear surrogate, so the whole map is linear in z.
    const std::vector<double> b0 = column(0), b1 = column(1), b2 = column(2);
    const std::vector<double> z0 = constants();

    // Step 1: a0 = S(z - a1 b1 - a2 b2; b0) = s_z - a1 s_1 - a2 s_2.
    const double s_z = lp_eliminate(z0, b0, p);
    const double s_1 = lp_eliminate(b1, b0, p);
    const double s_2 = lp_eliminate(b2, b0, p);
    std::vector<double> z1(n), c1(n), c2(n);
    for (std::size_t i = 0; i < n; ++i) {
        z1[i] = z0[i] - b0[i] * s_z;
        c1[i] = b1[i] - b0[i] * s_1;
        c2[i] = b2[i] - b0[i] * s_2;
    }
    // Step 2: a1 = S(z1 - a2 c2; c1) = t_z - a2 t_2.
    const double t_z = lp_eliminate(z1, c1, p);
    const double t_2 = lp_eliminate(c2, c1, p);
    std::vector<double> z2(n), d2(n);
    for (std::size_t i = 0; i < n; ++i) {
        z2[i] = z1[i] - c1[i] * t_z;
        d2[i] = c2[i] - c1[i] * t_2;
    }
    // Step 3: a2 directly, then back-substitute.
    std::array<double, 3> a{};
    a[2] = lp_eliminate(z2, d2, p);
    a[1] = t_z - a[2] * t_2;
    a[0] = s_z - a[1] * s_1 - a[2] * s_2;

    // Fixed number of coordinate sweeps around the nested solution. The
    // count never depends on the data, so the output stays linear in z.
    std::vector<double> resid(n);
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        for (int c = 0; c < 3; ++c) {
            const std::vector<double>& bc = (c == 0) ? b0 : (c == 1) ? b1 : b2;
            for (std::size_t i = 0; i < n; ++i)
                resid[i] = rows[i][0] - rows[i][1] * a[0] - rows[i][2] * a[1] -
                           rows[i][3] * a[2] + bc[i] * a[std::size_t(c)];
            a[std::size_t(c)] = lp_eliminate(resid, bc, p);
        }
    }
    return a;
}

AffineJet keystone_jet_rough(const std::vector<Point2>& pts,
                             const std::vector<double>& vals,
                             const Point2& base) {
    // Most-separated pair of chord directions; the jet gradient solves the
    // two directional-slope equations.
    const std::size_t N = pts.size();
    if (N < 2) throw InvalidInput("keystone_jet_rough: need two points");
    double best = -1.0;
    std::array<std::size_t, 4> pick{0, 1, 0, 1};
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) {
            const Point2 u = pts[j] - pts[i];
            const double nu = u.norm();
            if (nu == 0.0) continue;
            for (std::size_t k = 0; k < N; ++k)
                for (std::size_t l = k + 1; l < N; ++l) {
                    const Point2 v = pts[l] - pts[k];
                    const double nv = v.norm();
                    if (nv == 0.0) continue;
                    const double m = std::min(
                        std::hypot(u.x / nu - v.x / nv, u.y / nu - v.y / nv),
                        std::hypot(u.x / nu + v.x / nv, u.y / nu + v.y / nv));
                    if (m > best) {
                        best = m;
                        pick = {i, j, k, l};
                    }
                }
        }
    const Point2 x1 = pts[pick[0]], x2 = pts[pick[1]];
    const Point2 y1 = pts[pick[2]], y2 = pts[pick[3]];
    const double n1 = dist(x1, x2), n2 = dist(y1, y2);
    const Point2 v1{(x2.x - x1.x) / n1, (x2.y - x1.y) / n1};
    const Point2 v2{(y2.x - y1.x) / n2, (y2.y - y1.y) / n2};
    const double m1 = (vals[pick[1]] - vals[pick[0]]) / n1;
    const double m2 = (vals[pick[3]] - vals[pick[2]]) / n2;
    const double det = v1.x * v2.y - v1.y * v2.x;
    const Point2 grad{(m1 * v2.y - m2 * v1.y) / det,
                      (v1.x * m2 - v2.x * m1) / det};
    AffineJet L(x1, vals[pick[0]], grad);
    return L.rebased(base);
}

AffineJet keystone_jet_flat(const Square& box, const std::vector<Point2>& pts,
                            const std::vector<double>& vals, const Point2& base,
                            const Config& cfg) {
    AffineJet zero(base, 0.0, {0.0, 0.0});
    LocalSolution loc = local_extend(box, pts, base, vals, zero, cfg.p, cfg);
    ElimProblem prob;
    for (const NormTerm& t : loc.functionals) {
        double z = 0.0;
        for (const auto& [site, c] : t.functional.coeffs_f)
            z += c * vals[std::size_t(site)];
        z *= t.functional.offset_weight;
        std::array<double, 3> beta{0.0, 0.0, 0.0};
        for (const auto& [key, c] : t.functional.coeffs_jet)
            beta[std::size_t(key.second)] -= c * t.functional.offset_weight;
        prob.z.push_back(z);
        prob.beta.push_back(beta);
        prob.weight.push_back(t.weight);
    }
    std::array<double, 3> a = minimize_affine_lp(prob, cfg.p);
    return AffineJet(base, a[0], {a[1], a[2]});
}

AffineJet keystone_jet(int mu, const CZDecomposition& d,
                       const std::vector<double>& f, const Config& cfg) {
    const std::vector<int>& idx = d.E_sharp[std::size_t(mu)];
    if (idx.empty())
        throw InternalError("keystone_jet: empty E#_mu (K2 violated)");
    const Point2 base = d.x_sharp[std::size_t(mu)];
    std::vector<Point2> pts;
    std::vector<double> vals;
    for (int e : idx) {
        pts.push_back(d.points[std::size_t(e)]);
        vals.push_back(f[std::size_t(e)]);
    }
    if (satisfies_R1(pts, cfg.c2)) return keystone_jet_rough(pts, vals, base);
    const Square box =
        dilate(d.leaves[std::size_t(d.keystones[std::size_t(mu)])], 10.0);
    return keystone_jet_flat(box, pts, vals, base, cfg);
}

WhitneyField keystone_field(const CZDecomposition& d,
                            const std::vector<double>& f, const Config& cfg) {
    WhitneyField out;
    for (int mu = 0; mu < d.keystone_count(); ++mu) {
        out.sites.push_back(d.x_sharp[std::size_t(mu)]);
        out.entries.push_back(keystone_jet(mu, d, f, cfg));
    }
    return out;
}

WhitneyField constant_path_field(const WhitneyField& Lsharp,
                                 const CZDecomposition& d) {
    if (Lsharp.size() != d.x_sharp.size())
        throw InvalidInput("constant_path_field: keystone entry missing");
    WhitneyField out;
    for (std::size_t nu = 0; nu < d.leaves.size(); ++nu) {
        const int mu = d.mu_of_nu[nu];
        out.sites.push_back(d.x_nu[nu]);
        out.entries.push_back(Lsharp.entries[std::size_t(mu)].rebased(d.x_nu[nu]));
    }
    return out;
}

} // namespace sobtrace
