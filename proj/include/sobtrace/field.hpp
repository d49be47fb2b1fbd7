#pragma once

#include <memory>
#include <vector>

#include "sobtrace/geometry.hpp"
#include "sobtrace/piecewise.hpp"

namespace sobtrace {

/// Value, gradient and (symmetric) Hessian of a scalar field at a point.
struct FieldEval {
    double v = 0.0;
    double gx = 0.0, gy = 0.0;
    double hxx = 0.0, hxy = 0.0, hyy = 0.0;

    Point2 grad() const { return {gx, gy}; }
    double hess_frobenius() const {
        return std::sqrt(hxx * hxx + 2.0 * hxy * hxy + hyy * hyy);
    }
};

/// Evaluable scalar field with analytic first and second derivatives.
/// Instances are immutable and reentrant.
class Field2D {
public:
    virtual ~Field2D() = default;
    virtual FieldEval eval(const Point2& x) const = 0;
    virtual double value(const Point2& x) const { return eval(x).v; }
    Point2 gradient(const Point2& x) const { return eval(x).grad(); }
};

using FieldPtr = std::shared_ptr<const Field2D>;

/// Point map with Jacobian and second derivatives, for pullbacks.
struct MapEval {
    Point2 y;
    double J[2][2] = {{0, 0}, {0, 0}};        // J[i][a] = d y_i / d x_a
    double H[2][2][2] = {{{0, 0}, {0, 0}},    // H[i][a][b] = d2 y_i / d x_a d x_b
                         {{0, 0}, {0, 0}}};
};

class Map2D {
public:
    virtual ~Map2D() = default;
    virtual Point2 apply(const Point2& x) const = 0;
    virtual MapEval eval(const Point2& x) const = 0;
};

using MapPtr = std::shared_ptr<const Map2D>;

// ---- field constructors ----

FieldPtr make_affine_field(const AffineJet& L);
FieldPtr make_linear_combination(std::vector<std::pair<double, FieldPtr>> terms);
FieldPtr make_product(FieldPtr a, FieldPtr b);
FieldPtr make_pullback(FieldPtr f, MapPtr m);

/// Radial C^2 bump: 1 on |x-c| <= r_in, 0 on |x-c| >= r_out.
FieldPtr make_radial_bump(const Point2& center, double r_in, double r_out);

/// Product of two 1D plateau cutoffs: 1 on the inner box, 0 outside the
/// outer box (both concentric axis-aligned squares).
FieldPtr make_box_plateau(const Square& inner, const Square& outer);

/// Trace-extension lift T1: (x, y) -> int g(x - |y| t) rho(t) dt with the
/// even C^2 bump rho(t) = (15/16)(1 - t^2)^2 on [-1, 1]; restriction to the
/// axis reproduces g exactly, and affine g lift to the same affine function.
FieldPtr make_trace_extension(PiecewiseC11 g);

// ---- map constructors ----

/// y = A x + b, rows a11 a12 / a21 a22.
MapPtr make_affine_map(double a11, double a12, double a21, double a22,
                       const Point2& b);
/// World -> frame-local coordinates of f.
MapPtr make_to_local_map(const Frame& f);
/// Graph map (u, v) -> (u, v + phi(u, v)).
MapPtr make_graph_map(FieldPtr phi);
/// Flattening map (u, w) -> (u, s) where s solves s + phi(u, s) = w by
/// fixed-point iteration (requires sup |d phi / d v| < 1).
MapPtr make_flatten_map(FieldPtr phi, double tol_abs, int max_iters = 100);

} // namespace sobtrace
