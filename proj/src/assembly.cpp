#include "sobtrace/assembly.hpp"

#include <algorithm>
#include <cmath>

#include "sobtrace/parallel.hpp"

namespace sobtrace {

namespace {

// Normalized bump theta_i = raw_i / sum_j raw_j, with the sum restricted to
// the bumps whose support contains the point.
class NormalizedBumpField final : public Field2D {
public:
    NormalizedBumpField(std::shared_ptr<const PartitionOfUnity::Data> data,
                        int index)
        : data_(std::move(data)), i_(index) {}

    FieldEval eval(const Point2& x) const override {
        FieldEval mine;
        FieldEval sum;
        bool found = false;
        for (std::size_t j = 0; j < data_->raw.size(); ++j) {
            if (!data_->supports[j].contains(x)) continue;
            FieldEval e = data_->raw[j]->eval(x);
            sum.v += e.v;
            sum.gx += e.gx;
            sum.gy += e.gy;
            sum.hxx += e.hxx;
            sum.hxy += e.hxy;
            sum.hyy += e.hyy;
            if (int(j) == i_) {
                mine = e;
                found = true;
            }
        }
        if (!found || sum.v <= 0.0) return FieldEval{};
        if (data_->domain.contains(x) && sum.v < 0.5)
            throw InternalError("partition of unity: denominator below 1/2");
        FieldEval out;
        const double S = sum.v, S2 = S * S;
        out.v = mine.v / S;
        out.gx = (mine.gx * S - mine.v * sum.gx) / S2;
        out.gy = (mine.gy * S - mine.v * sum.gy) / S2;
        auto hess = [&](double mab, double ma, double mb, double sab, double sa,
                        double sb) {
            return mab / S - (ma * sb + mb * sa) / S2 - mine.v * sab / S2 +
                   2.0 * mine.v * sa * sb / (S2 * S);
        };
        out.hxx = hess(mine.hxx, mine.gx, mine.gx, sum.hxx, sum.gx, sum.gx);
        out.hxy = hess(mine.hxy, mine.gx, mine.gy, sum.hxy, sum.gx, sum.gy);
        out.hyy = hess(mine.hyy, mine.gy, mine.gy, sum.hyy, sum.gy, sum.gy);
        return out;
    }

private:
    std::shared_ptr<const PartitionOfUnity::Data> data_;
    int i_;
};

// sum_nu theta_nu(x) Fhat_nu(x), evaluating only the leaves active at x.
class PatchedField final : public Field2D {
public:
    PatchedField(std::shared_ptr<const PartitionOfUnity::Data> data,
                 std::vector<FieldPtr> locals)
        : data_(std::move(data)), locals_(std::move(locals)) {}

    FieldEval eval(const Point2& x) const override {
        static thread_local std::vector<int> active;
        active.clear();
        for (std::size_t j = 0; j < data_->supports.size(); ++j)
            if (data_->supports[j].contains(x)) active.push_back(int(j));
        if (active.empty()) return FieldEval{};

        FieldEval S;
        static thread_local std::vector<FieldEval> raws;
        raws.clear();
        for (int j : active) {
            FieldEval e = data_->raw[std::size_t(j)]->eval(x);
            raws.push_back(e);
            S.v += e.v;
            S.gx += e.gx;
            S.gy += e.gy;
            S.hxx += e.hxx;
            S.hxy += e.hxy;
            S.hyy += e.hyy;
        }
        if (S.v <= 0.0) return FieldEval{};
        if (data_->domain.contains(x) && S.v < 0.5)
            throw InternalError("partition of unity: denominator below 1/2");

        FieldEval out;
        const double Sv = S.v, S2 = Sv * Sv;
        for (std::size_t k = 0; k < active.size(); ++k) {
            const FieldEval& r = raws[k];
            FieldEval F = locals_[std::size_t(active[k])]->eval(x);
            // theta = r / S and its derivatives.
            FieldEval th;
            th.v = r.v / Sv;
            th.gx = (r.gx * Sv - r.v * S.gx) / S2;
            th.gy = (r.gy * Sv - r.v * S.gy) / S2;
            auto hess = [&](double mab, double ma, double mb, double sab,
                            double sa, double sb) {
                return mab / Sv - (ma * sb + mb * sa) / S2 - r.v * sab / S2 +
                       2.0 * r.v * sa * sb / (S2 * Sv);
            };
            th.hxx = hess(r.hxx, r.gx, r.gx, S.hxx, S.gx, S.gx);
            th.hxy = hess(r.hxy, r.gx, r.gy, S.hxy, S.gx, S.gy);
            th.hyy = hess(r.hyy, r.gy, r.gy, S.hyy, S.gy, S.gy);
            // product rule
            out.v += th.v * F.v;
            out.gx += th.gx * F.v + th.v * F.gx;
            out.gy += th.gy * F.v + th.v * F.gy;
            out.hxx += th.hxx * F.v + 2.0 * th.gx * F.gx + th.v * F.hxx;
            out.hyy += th.hyy * F.v + 2.0 * th.gy * F.gy + th.v * F.hyy;
            out.hxy += th.hxy * F.v + th.gx * F.gy + th.gy * F.gx + th.v * F.hxy;
        }
        return out;
    }

private:
    std::shared_ptr<const PartitionOfUnity::Data> data_;
    std::vector<FieldPtr> locals_;
};

// theta0 (F - L) + L with the outer cutoff's support box short-circuiting
// the patched field far away.
class OuterWrapField final : public Field2D {
public:
    OuterWrapField(FieldPtr inner, AffineJet L, FieldPtr cutoff, Square support)
        : inner_(std::move(inner)), L_(L), cutoff_(std::move(cutoff)),
          support_(support) {}

    FieldEval eval(const Point2& x) const override {
        FieldEval out;
        if (!support_.contains(x)) {
            out.v = L_(x);
            out.gx = L_.grad.x;
            out.gy = L_.grad.y;
            return out;
        }
        FieldEval th = cutoff_->eval(x);
        FieldEval F = inner_->eval(x);
        const double dv = F.v - L_(x);
        const double dgx = F.gx - L_.grad.x, dgy = F.gy - L_.grad.y;
        out.v = th.v * dv + L_(x);
        out.gx = th.gx * dv + th.v * dgx + L_.grad.x;
        out.gy = th.gy * dv + th.v * dgy + L_.grad.y;
        out.hxx = th.hxx * dv + 2.0 * th.gx * dgx + th.v * F.hxx;
        out.hyy = th.hyy * dv + 2.0 * th.gy * dgy + th.v * F.hyy;
        out.hxy = th.hxy * dv + th.gx * dgy + th.gy * dgx + th.v * F.hxy;
        return out;
    }

private:
    FieldPtr inner_;
    AffineJet L_;
    FieldPtr cutoff_;
    Square support_;
};

constexpr double kSupportDilate = 1.04;

}  // namespace

FieldPtr PartitionOfUnity::theta(int nu) const {
    return std::make_shared<NormalizedBumpField>(data, nu);
}

PartitionOfUnity build_pou(const CZDecomposition& d) {
    auto data = std::make_shared<PartitionOfUnity::Data>();
    data->domain = d.root;
    for (const Square& Q : d.leaves) {
        const Square outer = dilate(Q, kSupportDilate);
        data->supports.push_back(outer);
        data->raw.push_back(make_box_plateau(Q, outer));
    }
    PartitionOfUnity pou;
    pou.data = data;
    return pou;
}

AssembleResult assemble(const std::vector<double>& f, const WhitneyField& Lsharp,
                        const CZDecomposition& d, const Config& cfg) {
    if (f.size() != d.points.size())
        throw InvalidInput("assemble: value count mismatch");
    AssembleResult res;
    res.path_field = constant_path_field(Lsharp, d);

    const int K = d.leaf_count();
    res.locals = parallel_map(
        std::size_t(K),
        [&](std::size_t nu) {
            const Square box = dilate(d.leaves[nu], 1.3);
            std::vector<Point2> pts;
            std::vector<double> vals;
            for (int e : d.E_nu[nu]) {
                pts.push_back(d.points[std::size_t(e)]);
                vals.push_back(f[std::size_t(e)]);
            }
            return local_extend(box, pts, d.x_nu[nu], vals,
                                res.path_field.entries[nu], cfg.p, cfg);
        },
        cfg.exec);

    PartitionOfUnity pou = build_pou(d);
    std::vector<FieldPtr> fields;
    for (const LocalSolution& s : res.locals) fields.push_back(s.field);
    res.patched = std::make_shared<PatchedField>(pou.data, fields);

    FieldEval j0 = res.patched->eval({0.0, 0.0});
    res.origin_jet = AffineJet({0.0, 0.0}, j0.v, {j0.gx, j0.gy});
    FieldPtr cutoff = make_box_plateau(dilate(d.root, 0.99), d.root);
    res.field = std::make_shared<OuterWrapField>(res.patched, res.origin_jet,
                                                 cutoff, d.root);

    res.Mhat_p = 0.0;
    for (const LocalSolution& s : res.locals) res.Mhat_p += s.Mhat_p;
    for (int nu = 0; nu < K; ++nu) {
        const AffineJet& Ln = res.path_field.entries[std::size_t(nu)];
        const double dn = d.leaves[std::size_t(nu)].side;
        for (int nb : d.adjacency[std::size_t(nu)]) {
            if (nb == nu) continue;
            const AffineJet& Lm = res.path_field.entries[std::size_t(nb)];
            const double gx = Ln.grad.x - Lm.grad.x;
            const double gy = Ln.grad.y - Lm.grad.y;
            const double dv = Ln(d.x_nu[std::size_t(nu)]) -
                              Lm(d.x_nu[std::size_t(nu)]);
            res.Mhat_p += (std::pow(std::fabs(gx), cfg.p) +
                           std::pow(std::fabs(gy), cfg.p)) *
                              std::pow(dn, 2.0 - cfg.p) +
                          std::pow(std::fabs(dv), cfg.p) *
                              std::pow(dn, 2.0 - 2.0 * cfg.p);
        }
    }
    return res;
}

Extension extend(const std::vector<double>& f, const std::vector<Point2>& E,
                 const Config& cfg) {
    cfg.validate();
    if (f.size() != E.size()) throw InvalidInput("extend: value count mismatch");
    Extension out;
    out.decomp = std::make_shared<CZDecomposition>(build_decomposition(E, cfg));
    const CZDecomposition& d = *out.decomp;

    if (d.trivial()) {
        const Point2 x0 = d.x_nu[0];
        AffineJet zero(x0, 0.0, {0.0, 0.0});
        LocalSolution probe = local_extend(d.root, E, x0, f, zero, cfg.p, cfg);
        ElimProblem prob;
        for (const NormTerm& t : probe.functionals) {
            double z = 0.0;
            for (const auto& [site, c] : t.functional.coeffs_f)
                z += c * f[std::size_t(site)];
            z *= t.functional.offset_weight;
            std::array<double, 3> beta{0.0, 0.0, 0.0};
            for (const auto& [key, c] : t.functional.coeffs_jet)
                beta[std::size_t(key.second)] -= c * t.functional.offset_weight;
            prob.z.push_back(z);
            prob.beta.push_back(beta);
            prob.weight.push_back(t.weight);
        }
        std::array<double, 3> a = minimize_affine_lp(prob, cfg.p);
        AffineJet L1(x0, a[0], {a[1], a[2]});
        LocalSolution sol = local_extend(d.root, E, x0, f, L1, cfg.p, cfg);

        FieldEval j0 = sol.field->eval({0.0, 0.0});
        AffineJet L_origin({0.0, 0.0}, j0.v, {j0.gx, j0.gy});
        FieldPtr cutoff = make_box_plateau(dilate(d.root, 0.99), d.root);
        out.field = std::make_shared<OuterWrapField>(sol.field, L_origin, cutoff,
                                                     d.root);
        out.Mhat_p = out.M_p = sol.Mhat_p;
        for (const NormTerm& t : sol.functionals) {
            const double v = t.functional.apply(f, {L1});
            out.functional_report.emplace_back("leaf0/" + t.label,
                                               t.weight * std::pow(std::fabs(v),
                                                                   cfg.p));
        }
        out.functional_count = sol.functionals.size();
        out.keystone_field.sites = {x0};
        out.keystone_field.entries = {L1};
        out.constant_path = out.keystone_field;
        return out;
    }

    out.keystone_field = keystone_field(d, f, cfg);
    AssembleResult res = assemble(f, out.keystone_field, d, cfg);
    out.field = res.field;
    out.Mhat_p = res.Mhat_p;
    out.constant_path = res.path_field;

    // Norm form: local functional blocks plus keystone-pair mismatch terms
    // over the witnessed gaps.
    out.M_p = 0.0;
    out.functional_count = 0;
    for (int nu = 0; nu < d.leaf_count(); ++nu) {
        const LocalSolution& s = res.locals[std::size_t(nu)];
        out.M_p += s.Mhat_p;
        out.functional_count += s.functionals.size();
        for (const NormTerm& t : s.functionals) {
            const double v = t.functional.apply(
                [&] {
                    std::vector<double> vals;
                    for (int e : d.E_nu[std::size_t(nu)])
                        vals.push_back(f[std::size_t(e)]);
                    return vals;
                }(),
                {res.path_field.entries[std::size_t(nu)]});
            out.functional_report.emplace_back(
                "leaf" + std::to_string(nu) + "/" + t.label,
                t.weight * std::pow(std::fabs(v), cfg.p));
        }
    }
    // Witnessed keystone pairs, folded to unordered: the two orderings carry
    // the same gradient mismatch, so each unordered pair contributes two
    // gradient functionals plus a value mismatch anchored at either
    // representative, with the smaller witnessed gap.
    for (const auto& [key, gap] : d.delta_pairs) {
        const auto [mu, mup] = key;
        if (mu >= mup) continue;
        auto rev = d.delta_pairs.find({mup, mu});
        const double D =
            (rev == d.delta_pairs.end()) ? gap : std::min(gap, rev->second);
        const AffineJet& La = out.keystone_field.entries[std::size_t(mu)];
        const AffineJet& Lb = out.keystone_field.entries[std::size_t(mup)];
        const Point2 xa = d.x_sharp[std::size_t(mu)];
        const Point2 xb = d.x_sharp[std::size_t(mup)];
        const double gx = La.grad.x - Lb.grad.x;
        const double gy = La.grad.y - Lb.grad.y;
        const double tg = (std::pow(std::fabs(gx), cfg.p) +
                           std::pow(std::fabs(gy), cfg.p)) *
                          std::pow(D, 2.0 - cfg.p);
        const double tv = (std::pow(std::fabs(La(xa) - Lb(xa)), cfg.p) +
                           std::pow(std::fabs(La(xb) - Lb(xb)), cfg.p)) *
                          std::pow(D, 2.0 - 2.0 * cfg.p);
        out.M_p += tg + tv;
        out.functional_count += 4;
        out.functional_report.emplace_back(
            "pair(" + std::to_string(mu) + "," + std::to_string(mup) + ")/grad",
            tg);
        out.functional_report.emplace_back(
            "pair(" + std::to_string(mu) + "," + std::to_string(mup) + ")/value",
            tv);
    }
    return out;
}

} // namespace sobtrace
