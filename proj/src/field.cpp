#include "sobtrace/field.hpp"

#include <algorithm>
#include <cmath>

#include "sobtrace/errors.hpp"
#include "sobtrace/quadrature.hpp"

namespace sobtrace {

namespace {

class AffineField final : public Field2D {
public:
    explicit AffineField(const AffineJet& L) : L_(L) {}
    FieldEval eval(const Point2& x) const override {
        FieldEval e;
        e.v = L_(x);
        e.gx = L_.grad.x;
        e.gy = L_.grad.y;
        return e;
    }
    double value(const Point2& x) const override { return L_(x); }

private:
    AffineJet L_;
};

class LinCombField final : public Field2D {
public:
    explicit LinCombField(std::vector<std::pair<double, FieldPtr>> terms)
        : terms_(std::move(terms)) {}
    FieldEval eval(const Point2& x) const override {
        FieldEval e;
        for (const auto& [c, f] : terms_) {
            FieldEval t = f->eval(x);
            e.v += c * t.v;
            e.gx += c * t.gx;
            e.gy += c * t.gy;
            e.hxx += c * t.hxx;
            e.hxy += c * t.hxy;
            e.hyy += c * t.hyy;
        }
        return e;
    }
    double value(const Point2& x) const override {
        double v = 0.0;
        for (const auto& [c, f] : terms_) v += c * f->value(x);
        return v;
    }

private:
    std::vector<std::pair<double, FieldPtr>> terms_;
};

class ProductField final : public Field2D {
public:
    ProductField(FieldPtr a, FieldPtr b) : a_(std::move(a)), b_(std::move(b)) {}
    FieldEval eval(const Point2& x) const override {
        FieldEval u = a_->eval(x), w = b_->eval(x);
        FieldEval e;
        e.v = u.v * w.v;
        e.gx = u.gx * w.v + u.v * w.gx;
        e.gy = u.gy * w.v + u.v * w.gy;
        e.hxx = u.hxx * w.v + 2.0 * u.gx * w.gx + u.v * w.hxx;
        e.hyy = u.hyy * w.v + 2.0 * u.gy * w.gy + u.v * w.hyy;
        e.hxy = u.hxy * w.v + u.gx * w.gy + u.gy * w.gx + u.v * w.hxy;
        return e;
    }
    double value(const Point2& x) const override {
        return a_->value(x) * b_->value(x);
    }

private:
    FieldPtr a_, b_;
};

class PullbackField final : public Field2D {
public:
    PullbackField(FieldPtr f, MapPtr m) : f_(std::move(f)), m_(std::move(m)) {}
    FieldEval eval(const Point2& x) const override {
        MapEval me = m_->eval(x);
        FieldEval fe = f_->eval(me.y);
        const double g[2] = {fe.gx, fe.gy};
        const double h[2][2] = {{fe.hxx, fe.hxy}, {fe.hxy, fe.hyy}};
        FieldEval e;
        e.v = fe.v;
        double gout[2] = {0, 0};
        for (int a = 0; a < 2; ++a)
            for (int i = 0; i < 2; ++i) gout[a] += g[i] * me.J[i][a];
        double hout[2][2] = {{0, 0}, {0, 0}};
        for (int a = 0; a < 2; ++a)
            for (int b = 0; b < 2; ++b) {
                double s = 0.0;
                for (int i = 0; i < 2; ++i) {
                    for (int j = 0; j < 2; ++j)
                        s += h[i][j] * me.J[i][a] * me.J[j][b];
                    s += g[i] * me.H[i][a][b];
                }
                hout[a][b] = s;
            }
        e.gx = gout[0];
        e.gy = gout[1];
        e.hxx = hout[0][0];
        e.hxy = 0.5 * (hout[0][1] + hout[1][0]);
        e.hyy = hout[1][1];
        return e;
    }
    double value(const Point2& x) const override {
        return f_->value(m_->apply(x));
    }

private:
    FieldPtr f_;
    MapPtr m_;
};

class RadialBumpField final : public Field2D {
public:
    RadialBumpField(const Point2& c, double rin, double rout)
        : c_(c), rin_(rin), rout_(rout), step_(quintic_smoothstep()) {
        if (!(0 < rin && rin < rout))
            throw InvalidInput("radial bump: need 0 < r_in < r_out");
    }
    FieldEval eval(const Point2& x) const override {
        FieldEval e;
        const Point2 d = x - c_;
        const double r = d.norm();
        if (r <= rin_) {
            e.v = 1.0;
            return e;
        }
        if (r >= rout_) return e;
        const double w = rout_ - rin_;
        const double t = (r - rin_) / w;
        e.v = 1.0 - step_.eval(t);
        const double dv = -step_.deriv(t) / w;     // d theta / d r
        const double ddv = -step_.second(t) / (w * w);
        const double nx = d.x / r, ny = d.y / r;
        e.gx = dv * nx;
        e.gy = dv * ny;
        e.hxx = ddv * nx * nx + dv * (1.0 - nx * nx) / r;
        e.hyy = ddv * ny * ny + dv * (1.0 - ny * ny) / r;
        e.hxy = ddv * nx * ny - dv * nx * ny / r;
        return e;
    }

private:
    Point2 c_;
    double rin_, rout_;
    Poly1 step_;
};

class BoxPlateauField final : public Field2D {
public:
    BoxPlateauField(PiecewiseC11 fx, PiecewiseC11 fy)
        : fx_(std::move(fx)), fy_(std::move(fy)) {}
    FieldEval eval(const Point2& p) const override {
        const double a = fx_.eval(p.x), b = fy_.eval(p.y);
        const double da = fx_.deriv(p.x), db = fy_.deriv(p.y);
        FieldEval e;
        e.v = a * b;
        e.gx = da * b;
        e.gy = a * db;
        e.hxx = fx_.second(p.x) * b;
        e.hyy = a * fy_.second(p.y);
        e.hxy = da * db;
        return e;
    }
    double value(const Point2& p) const override {
        return fx_.eval(p.x) * fy_.eval(p.y);
    }

private:
    PiecewiseC11 fx_, fy_;
};

// rho(t) = (15/16)(1 - t^2)^2; int rho = 1, int t rho = 0, int t^2 rho = 1/7.
inline double rho_kernel(double t) {
    const double u = 1.0 - t * t;
    return (15.0 / 16.0) * u * u;
}

class TraceExtensionField final : public Field2D {
public:
    explicit TraceExtensionField(PiecewiseC11 g) : g_(std::move(g)) {
        scale_ = std::max(1.0, g_.breakpoints.back() - g_.breakpoints.front());
        y_eps_ = 1e-9 * scale_;
    }

    FieldEval eval(const Point2& p) const override {
        const double x = p.x, y = p.y;
        const double r = std::fabs(y);
        FieldEval e;
        if (r <= y_eps_) {
            const double d2 = g_.second(x);
            e.v = g_.eval(x);
            e.gx = g_.deriv(x);
            e.gy = 0.0;
            e.hxx = d2;
            e.hxy = 0.0;
            e.hyy = d2 / 7.0;
            return e;
        }
        const double sgn = (y > 0) ? 1.0 : -1.0;
        double m0 = 0, m0x = 0, m0t = 0, m1x = 0, m1xt = 0, m1tt = 0;
        integrate_moments(x, r, m0, m0x, m0t, m1x, m1xt, m1tt);
        e.v = m0;
        e.gx = m0x;
        e.gy = -sgn * m0t;
        e.hxx = m1x;
        e.hxy = -sgn * m1xt;
        e.hyy = m1tt;
        return e;
    }

    double value(const Point2& p) const override {
        const double x = p.x, r = std::fabs(p.y);
        if (r <= y_eps_) return g_.eval(x);
        double v = 0.0;
        for_each_segment(x, r, [&](double ta, double tb) {
            v += integrate_gl(
                [&](double t) { return g_.eval(x - r * t) * rho_kernel(t); }, ta,
                tb, 32);
        });
        return v;
    }

private:
    template <class Fn>
    void for_each_segment(double x, double r, Fn&& fn) const {
        // Split [-1, 1] where the sample line x - r t crosses a breakpoint.
        std::vector<double> cuts;
        cuts.reserve(g_.breakpoints.size() + 2);
        cuts.push_back(-1.0);
        for (double bp : g_.breakpoints) {
            const double t = (x - bp) / r;
            if (t > -1.0 && t < 1.0) cuts.push_back(t);
        }
        cuts.push_back(1.0);
        std::sort(cuts.begin(), cuts.end());
        for (std::size_t i = 0; i + 1 < cuts.size(); ++i)
            if (cuts[i + 1] > cuts[i]) fn(cuts[i], cuts[i + 1]);
    }

    void integrate_moments(double x, double r, double& m0, double& m0x,
                           double& m0t, double& m1x, double& m1xt,
                           double& m1tt) const {
        const GaussRule& rule = gauss_rule(32);
        for_each_segment(x, r, [&](double ta, double tb) {
            const double c = 0.5 * (ta + tb), h = 0.5 * (tb - ta);
            for (int i = 0; i < 32; ++i) {
                const double t = c + h * rule.nodes[i];
                const double w = rule.weights[i] * h * rho_kernel(t);
                const double s = x - r * t;
                m0 += w * g_.eval(s);
                const double d1 = g_.deriv(s);
                m0x += w * d1;
                m0t += w * t * d1;
                const double d2 = g_.second(s);
                m1x += w * d2;
                m1xt += w * t * d2;
                m1tt += w * t * t * d2;
            }
        });
    }

    PiecewiseC11 g_;
    double scale_ = 1.0;
    double y_eps_ = 1e-9;
};

class AffineMap final : public Map2D {
public:
    AffineMap(double a11, double a12, double a21, double a22, const Point2& b)
        : a11_(a11), a12_(a12), a21_(a21), a22_(a22), b_(b) {}
    Point2 apply(const Point2& x) const override {
        return {a11_ * x.x + a12_ * x.y + b_.x, a21_ * x.x + a22_ * x.y + b_.y};
    }
    MapEval eval(const Point2& x) const override {
        MapEval e;
        e.y = apply(x);
        e.J[0][0] = a11_;
        e.J[0][1] = a12_;
        e.J[1][0] = a21_;
        e.J[1][1] = a22_;
        return e;
    }

private:
    double a11_, a12_, a21_, a22_;
    Point2 b_;
};

class GraphMap final : public Map2D {
public:
    explicit GraphMap(FieldPtr phi) : phi_(std::move(phi)) {}
    Point2 apply(const Point2& x) const override {
        return {x.x, x.y + phi_->value(x)};
    }
    MapEval eval(const Point2& x) const override {
        FieldEval p = phi_->eval(x);
        MapEval e;
        e.y = {x.x, x.y + p.v};
        e.J[0][0] = 1.0;
        e.J[1][0] = p.gx;
        e.J[1][1] = 1.0 + p.gy;
        e.H[1][0][0] = p.hxx;
        e.H[1][0][1] = e.H[1][1][0] = p.hxy;
        e.H[1][1][1] = p.hyy;
        return e;
    }

private:
    FieldPtr phi_;
};

class FlattenMap final : public Map2D {
public:
    FlattenMap(FieldPtr phi, double tol_abs, int max_iters)
        : phi_(std::move(phi)), tol_(tol_abs), max_iters_(max_iters) {}

    Point2 apply(const Point2& x) const override {
        return {x.x, solve(x.x, x.y)};
    }
    MapEval eval(const Point2& x) const override {
        const double u = x.x, w = x.y;
        const double s = solve(u, w);
        FieldEval p = phi_->eval({u, s});
        const double D = 1.0 + p.gy;
        const double su = -p.gx / D;
        const double sw = 1.0 / D;
        MapEval e;
        e.y = {u, s};
        e.J[0][0] = 1.0;
        e.J[1][0] = su;
        e.J[1][1] = sw;
        e.H[1][0][0] = -(p.hxx + 2.0 * p.hxy * su + p.hyy * su * su) / D;
        e.H[1][0][1] = e.H[1][1][0] = -(p.hxy + p.hyy * su) / (D * D);
        e.H[1][1][1] = -p.hyy / (D * D * D);
        return e;
    }

private:
    double solve(double u, double w) const {
        double s = w;
        for (int it = 0; it < max_iters_; ++it) {
            const double next = w - phi_->value({u, s});
            const double delta = std::fabs(next - s);
            s = next;
            if (delta <= tol_) return s;
        }
        throw ConfigError("flatten map: fixed-point iteration stalled; "
                          "decrease c4");
    }

    FieldPtr phi_;
    double tol_;
    int max_iters_;
};

}  // namespace

FieldPtr make_affine_field(const AffineJet& L) {
    return std::make_shared<AffineField>(L);
}

FieldPtr make_linear_combination(std::vector<std::pair<double, FieldPtr>> terms) {
    return std::make_shared<LinCombField>(std::move(terms));
}

FieldPtr make_product(FieldPtr a, FieldPtr b) {
    return std::make_shared<ProductField>(std::move(a), std::move(b));
}

FieldPtr make_pullback(FieldPtr f, MapPtr m) {
    return std::make_shared<PullbackField>(std::move(f), std::move(m));
}

FieldPtr make_radial_bump(const Point2& center, double r_in, double r_out) {
    return std::make_shared<RadialBumpField>(center, r_in, r_out);
}

FieldPtr make_box_plateau(const Square& inner, const Square& outer) {
    if (!(outer.side > inner.side) ||
        dist(inner.center, outer.center) > 1e-12 * inner.side)
        throw InvalidInput("box plateau: outer must be a concentric dilate");
    const double ramp = (outer.side - inner.side) / 2.0;
    PiecewiseC11 fx = plateau_cutoff(inner.xmin(), inner.xmax(), ramp);
    PiecewiseC11 fy = plateau_cutoff(inner.ymin(), inner.ymax(), ramp);
    return std::make_shared<BoxPlateauField>(std::move(fx), std::move(fy));
}

FieldPtr make_trace_extension(PiecewiseC11 g) {
    return std::make_shared<TraceExtensionField>(std::move(g));
}

MapPtr make_affine_map(double a11, double a12, double a21, double a22,
                       const Point2& b) {
    return std::make_shared<AffineMap>(a11, a12, a21, a22, b);
}

MapPtr make_to_local_map(const Frame& f) {
    // u = e1 . (x - o), v = e2 . (x - o)
    const Point2 o = f.origin;
    return std::make_shared<AffineMap>(
        f.e1.x, f.e1.y, f.e2.x, f.e2.y,
        Point2{-(f.e1.x * o.x + f.e1.y * o.y), -(f.e2.x * o.x + f.e2.y * o.y)});
}

MapPtr make_graph_map(FieldPtr phi) {
    return std::make_shared<GraphMap>(std::move(phi));
}

MapPtr make_flatten_map(FieldPtr phi, double tol_abs, int max_iters) {
    return std::make_shared<FlattenMap>(std::move(phi), tol_abs, max_iters);
}

} // namespace sobtrace
