#include "sobtrace/piecewise.hpp"

#include <algorithm>
#include <cmath>

namespace sobtrace {

Poly1 Poly1::rebased(double new_anchor) const {
    // Horner-style Taylor shift: evaluate in powers of (x - new_anchor).
    const double h = new_anchor - anchor;
    std::vector<double> out(coef.size(), 0.0);
    for (int k = int(coef.size()) - 1; k >= 0; --k) {
        for (int j = int(out.size()) - 1; j >= 1; --j)
            out[j] = out[j] * h + out[j - 1];
        out[0] = out[0] * h + coef[k];
    }
    return {new_anchor, std::move(out)};
}

Poly1 Poly1::operator+(const Poly1& o) const {
    Poly1 b = (o.anchor == anchor) ? o : o.rebased(anchor);
    Poly1 out = *this;
    if (b.coef.size() > out.coef.size()) out.coef.resize(b.coef.size(), 0.0);
    for (std::size_t k = 0; k < b.coef.size(); ++k) out.coef[k] += b.coef[k];
    return out;
}

Poly1 Poly1::operator*(const Poly1& o) const {
    Poly1 b = (o.anchor == anchor) ? o : o.rebased(anchor);
    if (coef.empty() || b.coef.empty()) return constant(0.0, anchor);
    std::vector<double> out(coef.size() + b.coef.size() - 1, 0.0);
    for (std::size_t i = 0; i < coef.size(); ++i)
        for (std::size_t j = 0; j < b.coef.size(); ++j)
            out[i + j] += coef[i] * b.coef[j];
    return {anchor, std::move(out)};
}

Poly1 Poly1::compose_affine(double a, double b) const {
    // P(a x + b) with P given around its anchor: substitute xi = a x + (b - anchor).
    Poly1 out = constant(0.0, 0.0);
    Poly1 lin(0.0, {b - anchor, a});
    for (int k = int(coef.size()) - 1; k >= 0; --k) {
        out = out * lin;
        if (out.coef.empty()) out.coef.push_back(0.0);
        out.coef[0] += coef[k];
    }
    return out;
}

PiecewiseC11 PiecewiseC11::zero() {
    PiecewiseC11 f;
    f.breakpoints = {0.0};
    f.left_piece = Poly1::constant(0.0);
    f.right_piece = Poly1::constant(0.0);
    return f;
}

PiecewiseC11 PiecewiseC11::from_affine(double anchor, double value, double slope) {
    PiecewiseC11 f;
    f.breakpoints = {anchor};
    f.left_piece = Poly1::affine(anchor, value, slope);
    f.right_piece = f.left_piece;
    return f;
}

std::size_t PiecewiseC11::piece_index(double x) const {
    // Largest i with bp[i] <= x, clamped to a valid piece.
    auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), x);
    std::size_t i = (it == breakpoints.begin()) ? 0 : std::size_t(it - breakpoints.begin()) - 1;
    return std::min(i, pieces.empty() ? std::size_t(0) : pieces.size() - 1);
}

double PiecewiseC11::eval(double x) const {
    if (x <= breakpoints.front()) return left_piece.eval(x);
    if (x >= breakpoints.back()) return right_piece.eval(x);
    return pieces[piece_index(x)].eval(x);
}

double PiecewiseC11::deriv(double x) const {
    if (x <= breakpoints.front()) return left_piece.deriv(x);
    if (x >= breakpoints.back()) return right_piece.deriv(x);
    return pieces[piece_index(x)].deriv(x);
}

double PiecewiseC11::second(double x) const {
    if (x <= breakpoints.front()) return left_piece.second(x);
    if (x >= breakpoints.back()) return right_piece.second(x);
    return pieces[piece_index(x)].second(x);
}

double PiecewiseC11::max_abs_second() const {
    double m = std::max(std::fabs(left_piece.second(breakpoints.front())),
                        std::fabs(right_piece.second(breakpoints.back())));
    for (std::size_t i = 0; i < pieces.size(); ++i) {
        const double a = breakpoints[i], b = breakpoints[i + 1];
        for (int k = 0; k <= 32; ++k) {
            double x = a + (b - a) * k / 32.0;
            m = std::max(m, std::fabs(pieces[i].second(x)));
        }
    }
    return m;
}

bool PiecewiseC11::is_c1(double rel_tol) const {
    if (breakpoints.empty()) return false;
    double scale_v = 1.0, scale_d = 1.0;
    for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
        scale_v = std::max(scale_v, std::fabs(pieces[i].eval(breakpoints[i])));
        scale_d = std::max(scale_d, std::fabs(pieces[i].deriv(breakpoints[i])));
    }
    auto at = [&](std::size_t i) -> const Poly1& {
        return pieces.empty() ? left_piece : pieces[std::min(i, pieces.size() - 1)];
    };
    for (std::size_t i = 0; i < breakpoints.size(); ++i) {
        const double x = breakpoints[i];
        const Poly1& lf = (i == 0) ? left_piece : at(i - 1);
        const Poly1& rg = (i + 1 == breakpoints.size()) ? right_piece : at(i);
        if (std::fabs(lf.eval(x) - rg.eval(x)) > rel_tol * scale_v) return false;
        if (std::fabs(lf.deriv(x) - rg.deriv(x)) > rel_tol * scale_d) return false;
    }
    return true;
}

PiecewiseC11 PiecewiseC11::scaled_values(double s) const {
    PiecewiseC11 out = *this;
    for (auto& p : out.pieces) p = p.scaled(s);
    out.left_piece = out.left_piece.scaled(s);
    out.right_piece = out.right_piece.scaled(s);
    return out;
}

PiecewiseC11 PiecewiseC11::plus(const PiecewiseC11& o) const {
    if (breakpoints != o.breakpoints)
        throw InvalidInput("PiecewiseC11::plus: breakpoint mismatch");
    PiecewiseC11 out = *this;
    for (std::size_t i = 0; i < pieces.size(); ++i) out.pieces[i] = pieces[i] + o.pieces[i];
    out.left_piece = left_piece + o.left_piece;
    out.right_piece = right_piece + o.right_piece;
    return out;
}

PiecewiseC11 PiecewiseC11::stretched(double lambda) const {
    if (!(lambda > 0)) throw InvalidInput("stretched: lambda must be positive");
    auto stretch_poly = [&](const Poly1& p) {
        Poly1 out;
        out.anchor = p.anchor * lambda;
        out.coef = p.coef;
        double s = 1.0;
        for (std::size_t k = 0; k < out.coef.size(); ++k) {
            out.coef[k] *= s;
            s /= lambda;
        }
        return out;
    };
    PiecewiseC11 out;
    out.breakpoints = breakpoints;
    for (double& b : out.breakpoints) b *= lambda;
    for (const auto& p : pieces) out.pieces.push_back(stretch_poly(p));
    out.left_piece = stretch_poly(left_piece);
    out.right_piece = stretch_poly(right_piece);
    return out;
}

Poly1 quintic_smoothstep() {
    // s^3 (10 - 15 s + 6 s^2)
    return Poly1(0.0, {0.0, 0.0, 0.0, 10.0, -15.0, 6.0});
}

PiecewiseC11 plateau_cutoff(double lo, double hi, double ramp) {
    if (!(ramp > 0) || !(hi >= lo)) throw InvalidInput("plateau_cutoff: bad geometry");
    const Poly1 step = quintic_smoothstep();
    // Ramps are composed in the local variable of their own anchor; a global
    // composition would cancel catastrophically far from the origin.
    Poly1 up = step.compose_affine(1.0 / ramp, 0.0);    // step(xi / ramp)
    up.anchor = lo - ramp;
    Poly1 down = step.compose_affine(-1.0 / ramp, 1.0); // step(1 - xi / ramp)
    down.anchor = hi;
    PiecewiseC11 f;
    if (hi > lo) {
        f.breakpoints = {lo - ramp, lo, hi, hi + ramp};
        f.pieces = {up, Poly1::constant(1.0, lo), down};
    } else {
        f.breakpoints = {lo - ramp, lo, hi + ramp};
        f.pieces = {up, down};
    }
    f.left_piece = Poly1::constant(0.0, lo - ramp);
    f.right_piece = Poly1::constant(0.0, hi + ramp);
    return f;
}

PiecewiseC11 multiply(const PiecewiseC11& f, const PiecewiseC11& g) {
    std::vector<double> bp;
    bp.reserve(f.breakpoints.size() + g.breakpoints.size());
    std::merge(f.breakpoints.begin(), f.breakpoints.end(),
               g.breakpoints.begin(), g.breakpoints.end(), std::back_inserter(bp));
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

    auto poly_at = [](const PiecewiseC11& h, double a, double b) -> const Poly1& {
        const double mid = 0.5 * (a + b);
        if (mid <= h.breakpoints.front()) return h.left_piece;
        if (mid >= h.breakpoints.back()) return h.right_piece;
        return h.pieces[h.piece_index(mid)];
    };

    PiecewiseC11 out;
    out.breakpoints = bp;
    out.pieces.resize(bp.size() - 1);
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        Poly1 a = poly_at(f, bp[i], bp[i + 1]).rebased(bp[i]);
        Poly1 b = poly_at(g, bp[i], bp[i + 1]).rebased(bp[i]);
        out.pieces[i] = a * b;
    }
    out.left_piece = f.left_piece.rebased(bp.front()) * g.left_piece.rebased(bp.front());
    out.right_piece = f.right_piece.rebased(bp.back()) * g.right_piece.rebased(bp.back());
    return out;
}

} // namespace sobtrace
