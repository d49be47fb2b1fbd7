#pragma once

#include <vector>

#include "sobtrace/errors.hpp"

namespace sobtrace {

/// Polynomial in the local variable (x - anchor), dense coefficients.
struct Poly1 {
    double anchor = 0.0;
    std::vector<double> coef;  // coef[k] multiplies (x - anchor)^k

    Poly1() = default;
    Poly1(double anchor_, std::vector<double> c)
        : anchor(anchor_), coef(std::move(c)) {}

    static Poly1 constant(double c, double anchor = 0.0) { return {anchor, {c}}; }
    static Poly1 affine(double anchor, double value, double slope) {
        return {anchor, {value, slope}};
    }

    int degree() const { return coef.empty() ? -1 : int(coef.size()) - 1; }

    double eval(double x) const {
        double xi = x - anchor, v = 0.0;
        for (int k = int(coef.size()) - 1; k >= 0; --k) v = v * xi + coef[k];
        return v;
    }
    double deriv(double x) const {
        double xi = x - anchor, v = 0.0;
        for (int k = int(coef.size()) - 1; k >= 1; --k) v = v * xi + k * coef[k];
        return v;
    }
    double second(double x) const {
        double xi = x - anchor, v = 0.0;
        for (int k = int(coef.size()) - 1; k >= 2; --k)
            v = v * xi + double(k) * double(k - 1) * coef[k];
        return v;
    }

    Poly1 derivative() const {
        if (coef.size() <= 1) return constant(0.0, anchor);
        std::vector<double> d(coef.size() - 1);
        for (std::size_t k = 1; k < coef.size(); ++k) d[k - 1] = double(k) * coef[k];
        return {anchor, std::move(d)};
    }

    /// Re-anchor the same polynomial at a new basepoint (Taylor shift).
    Poly1 rebased(double new_anchor) const;

    Poly1 operator+(const Poly1& o) const;
    Poly1 operator*(const Poly1& o) const;
    Poly1 scaled(double s) const {
        Poly1 out = *this;
        for (double& c : out.coef) c *= s;
        return out;
    }
    /// P(a*x + b) as a polynomial in x (anchor 0).
    Poly1 compose_affine(double a, double b) const;
};

/// Piecewise polynomial with finitely many breakpoints and two unbounded end
/// pieces. The construction helpers below produce functions with a continuous
/// first derivative and piecewise-bounded second derivative; validity can be
/// checked with is_c1().
struct PiecewiseC11 {
    std::vector<double> breakpoints;   // strictly increasing, size m >= 1
    std::vector<Poly1> pieces;         // size m-1, piece i lives on [bp[i], bp[i+1]]
    Poly1 left_piece;                  // on (-inf, bp.front()]
    Poly1 right_piece;                 // on [bp.back(), +inf)

    static PiecewiseC11 zero();
    static PiecewiseC11 from_affine(double anchor, double value, double slope);

    std::size_t piece_index(double x) const;  // index into pieces for interior x
    double eval(double x) const;
    double deriv(double x) const;
    double second(double x) const;

    /// Largest |f''| over all pieces (sampled; exact enough for bounds).
    double max_abs_second() const;

    bool is_c1(double rel_tol = 1e-9) const;

    PiecewiseC11 scaled_values(double s) const;
    PiecewiseC11 plus(const PiecewiseC11& o) const;  // requires equal breakpoints
    /// x -> f(x / lambda): stretches the graph horizontally by lambda.
    PiecewiseC11 stretched(double lambda) const;
};

/// Quintic smoothstep: 0 at 0, 1 at 1, zero first and second derivatives at
/// both ends. Returned as a polynomial in x (anchor 0).
Poly1 quintic_smoothstep();

/// Plateaued unit bump: 0 left of lo-ramp, rises over [lo - ramp, lo],
/// identically 1 on [lo, hi], falls over [hi, hi + ramp], 0 beyond. C^2.
PiecewiseC11 plateau_cutoff(double lo, double hi, double ramp);

/// Pointwise product f * theta, where theta is a plateau cutoff whose ramps
/// land where both factors are polynomial; breakpoints are merged.
PiecewiseC11 multiply(const PiecewiseC11& f, const PiecewiseC11& g);

} // namespace sobtrace
