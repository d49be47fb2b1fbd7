#include "sobtrace/local.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace sobtrace {

namespace {

double max_abs_deriv(const PiecewiseC11& f) {
    double m = std::max(std::fabs(f.left_piece.deriv(f.breakpoints.front())),
                        std::fabs(f.right_piece.deriv(f.breakpoints.back())));
    for (std::size_t i = 0; i < f.pieces.size(); ++i) {
        const double a = f.breakpoints[i], b = f.breakpoints[i + 1];
        for (int k = 0; k <= 32; ++k)
            m = std::max(m, std::fabs(f.pieces[i].deriv(a + (b - a) * k / 32.0)));
    }
    return m;
}

Frame pick_chord_frame(const std::vector<Point2>& E0, double p,
                       const Config& cfg) {
    SetSeminormEstimate est =
        set_seminorm(E0, p, cfg.angle_count, cfg.exec);
    if (!est.graph_ok)
        throw ConfigError("straighten: set is not a graph in any scanned frame");
    // Chord realizing the largest u-spread in the optimal frame.
    std::size_t ia = 0, ib = 1;
    double spread = -1.0;
    for (std::size_t i = 0; i < E0.size(); ++i)
        for (std::size_t j = i + 1; j < E0.size(); ++j) {
            const double du = std::fabs(est.frame.to_local(E0[i]).x -
                                        est.frame.to_local(E0[j]).x);
            if (du > spread) {
                spread = du;
                ia = i;
                ib = j;
            }
        }
    Frame chord = frame_from_chord(E0[ia], E0[ib]);
    // Fall back to the search frame if the chord frame is graph-degenerate.
    double diam = 0.0;
    for (std::size_t i = 0; i < E0.size(); ++i)
        for (std::size_t j = i + 1; j < E0.size(); ++j)
            diam = std::max(diam, dist(E0[i], E0[j]));
    std::vector<double> us;
    for (const Point2& e : E0) us.push_back(chord.to_local(e).x);
    std::sort(us.begin(), us.end());
    for (std::size_t i = 0; i + 1 < us.size(); ++i)
        if (us[i + 1] - us[i] <= 1e-12 * diam) {
            Frame f = est.frame;
            f.origin = E0[ia];
            return f;
        }
    return chord;
}

}  // namespace

Straightening straighten(const Square& Q, const std::vector<Point2>& E0,
                         double p, const Config& cfg) {
    Straightening s;
    s.scale = Q.side;
    if (E0.size() <= 1) {
        s.frame.origin = E0.empty() ? Q.center : E0[0];
        s.phi_hat = make_affine_field(AffineJet({0, 0}, 0.0, {0, 0}));
        s.flatten = make_affine_map(1, 0, 0, 1, {0, 0});
        s.graph = make_affine_map(1, 0, 0, 1, {0, 0});
        s.to_local = make_to_local_map(s.frame);
        return s;
    }

    s.frame = pick_chord_frame(E0, p, cfg);
    std::vector<std::pair<double, double>> uv;
    for (const Point2& e : E0) {
        const Point2 q = s.frame.to_local(e);
        uv.emplace_back(q.x, q.y);
    }
    std::sort(uv.begin(), uv.end());
    std::vector<double> us, vs;
    for (const auto& [u, v] : uv) {
        us.push_back(u);
        vs.push_back(v);
    }
    for (std::size_t i = 0; i + 1 < us.size(); ++i)
        if (!(us[i + 1] - us[i] > 0))
            throw ConfigError("straighten: graph-degenerate frame");

    PiecewiseC11 phi = extend_Tb(Samples1D(us, vs, p));
    const double slope = max_abs_deriv(phi);
    if (slope > 0.5)
        throw ConfigError("straighten: contraction failure (|phi'| > 1/2); "
                          "decrease c4");

    s.phi_hat = make_trace_extension(std::move(phi));
    s.flatten = make_flatten_map(s.phi_hat, 1e-12 * std::max(s.scale, 1.0));
    s.graph = make_graph_map(s.phi_hat);
    s.to_local = make_to_local_map(s.frame);
    return s;
}

LocalSolution local_extend(const Square& Q, const std::vector<Point2>& E0,
                           const Point2& x0, const std::vector<double>& f0,
                           const AffineJet& L0, double p, const Config& cfg) {
    if (E0.size() != f0.size())
        throw InvalidInput("local_extend: E0/f0 size mismatch");
    const double delta = Q.side;
    for (const Point2& e : E0)
        if (!dilate(Q, 0.9).contains(e))
            throw InvalidInput("local_extend: E0 not inside 0.9 Q");
    if (!dilate(Q, 0.9).contains(x0))
        throw InvalidInput("local_extend: x0 outside 0.9 Q");
    double dx0 = std::numeric_limits<double>::infinity();
    for (const Point2& e : E0) dx0 = std::min(dx0, dist(x0, e));
    if (!E0.empty() && dx0 < delta / 100.0)
        throw InvalidInput("local_extend: d(x0, E0) < delta_Q / 100");

    // Unit-square chart: world -> (x - c) / delta.
    MapPtr chart = make_affine_map(1.0 / delta, 0.0, 0.0, 1.0 / delta,
                                   {-Q.center.x / delta, -Q.center.y / delta});
    std::vector<Point2> E0u;
    for (const Point2& e : E0) E0u.push_back(chart->apply(e));
    const Point2 x0u = chart->apply(x0);

    // Shift by the prescribed jet so the pipeline sees data that must come
    // out with a zero jet at x0.
    std::vector<double> shifted(f0.size());
    for (std::size_t i = 0; i < f0.size(); ++i) shifted[i] = f0[i] - L0(E0[i]);

    LocalSolution sol;
    Straightening st = straighten(Square({0, 0}, 1.0), E0u, p, cfg);

    // Flat 1D data: u-coordinates with the shifted values, sorted.
    std::vector<double> us;
    for (const Point2& e : E0u) us.push_back(st.frame.to_local(e).x);
    sol.order.resize(E0.size());
    std::iota(sol.order.begin(), sol.order.end(), 0);
    std::sort(sol.order.begin(), sol.order.end(),
              [&](int a, int b) { return us[std::size_t(a)] < us[std::size_t(b)]; });
    std::vector<double> xs1, g1;
    for (int idx : sol.order) {
        xs1.push_back(us[std::size_t(idx)]);
        g1.push_back(shifted[std::size_t(idx)]);
    }
    for (std::size_t i = 0; i + 1 < xs1.size(); ++i)
        if (!(xs1[i] < xs1[i + 1]))
            throw ConfigError("local_extend: coincident flat coordinates");

    FieldPtr F3_unit;
    if (E0.empty()) {
        F3_unit = make_affine_field(AffineJet({0, 0}, 0.0, {0, 0}));
    } else {
        Samples1D data(xs1, g1, p);
        FieldPtr F1 = make_trace_extension(extend_Tb(data));
        FieldPtr F2 = st.pullback(F1);
        FieldEval j = F2->eval(x0u);
        AffineJet Jx0(x0u, j.v, {j.gx, j.gy});
        // Pinning bump: vanishes on E0, identically 1 near x0. Its radius
        // follows the actual clearance d(x0, E0) instead of a fixed 1/150;
        // a fixed tiny radius would put an O(radius^-2) Hessian bump into
        // the field and ruin the optimality constant.
        const double r_out = std::min(0.6 * dx0 / delta, 0.22);
        FieldPtr theta = make_radial_bump(x0u, 0.5 * r_out, r_out);
        F3_unit = make_linear_combination(
            {{1.0, F2},
             {-1.0, make_product(theta, make_affine_field(Jx0))}});
    }
    sol.field = make_linear_combination(
        {{1.0, make_pullback(F3_unit, chart)},
         {1.0, make_affine_field(L0)}});

    // Functionals: the 1D full trace norm of the shifted flat data, with the
    // square's scaling weight folded in; expanded over (f0, L0).
    const double scale_w = std::pow(delta, 2.0 - 2.0 * p);
    if (!E0.empty()) {
        TraceNorm1D full = trace_norm_full_p(Samples1D(xs1, g1, p));
        auto expand = [&](const NormTerm& t) {
            NormTerm out;
            out.weight = t.weight * scale_w;
            out.label = t.label;
            out.functional.offset_weight = t.functional.offset_weight;
            for (const auto& [site, c] : t.functional.coeffs_f) {
                const int orig = sol.order[std::size_t(site)];
                const Point2& e = E0[std::size_t(orig)];
                out.functional.add_f(orig, c);
                out.functional.add_jet(0, LinearFunctional::kValue, -c);
                out.functional.add_jet(0, LinearFunctional::kGx,
                                       -c * (e.x - L0.base.x));
                out.functional.add_jet(0, LinearFunctional::kGy,
                                       -c * (e.y - L0.base.y));
            }
            return out;
        };
        for (const NormTerm& t : full.terms) sol.functionals.push_back(expand(t));
        for (const NormTerm& t : full.inhomogeneous_terms)
            sol.functionals.push_back(expand(t));
        sol.Mhat_p = scale_w * full.Mp;
    }
    return sol;
}

ZeroJetBound hatM_zero_jet_bound(const Square& Q,
                                 const std::vector<Point2>& E0,
                                 const Point2& x0, const AffineJet& L,
                                 double p, const Config& cfg) {
    ZeroJetBound out;
    const double delta = Q.side;
    out.upper = std::pow(std::fabs(L(x0)), p) * std::pow(delta, 2.0 - 2.0 * p) +
                std::pow(L.grad.norm(), p) * std::pow(delta, 2.0 - p);
    if (!E0.empty()) {
        SetSeminormEstimate est = set_seminorm(E0, p, cfg.angle_count, cfg.exec);
        out.equivalent =
            est.value >= cfg.c1 * std::pow(delta, 2.0 / p - 1.0);
    }
    return out;
}

} // namespace sobtrace
