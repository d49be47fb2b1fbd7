#pragma once

#include <optional>
#include <vector>

#include "sobtrace/config.hpp"
#include "sobtrace/field.hpp"
#include "sobtrace/geometry.hpp"

namespace sobtrace {

/// Grid-discretized L^{2,p} minimization problem: nodal values on an n x n
/// grid over a box, with point values pinned by bilinear stencils and
/// optional jets pinned by finite-difference stencils.
struct GridProblem {
    Square box;
    int n = 64;
    double p = 4.0;
    std::vector<std::pair<Point2, double>> constraints;
    struct JetConstraint {
        Point2 at;
        double value;
        Point2 grad;
    };
    std::vector<JetConstraint> jet_constraints;
};

struct GridSolution {
    double energy_p_root = 0.0;   // minimal energy^{1/p}
    std::vector<double> values;   // nodal field
    int outer_iterations = 0;
};

/// Minimize sum_cells |D^2 u|^{p/2}-type energy under the constraints by
/// iteratively reweighted least squares; inner solves use projected
/// conjugate gradients. Convex, so the optimum is global.
GridSolution min_energy_2d(const GridProblem& prob,
                           ExecPolicy exec = ExecPolicy::Serial);

/// 1D counterpart: minimize the discretized Besov double integral over
/// nodal slopes with trapezoid-accumulated value constraints.
double min_besov_1d(const std::vector<double>& xs,
                    const std::vector<double>& values, double p, int n,
                    ExecPolicy exec = ExecPolicy::Serial);

/// Composite midpoint |Hess F|_F^p over an n x n grid, p-th root.
double sobolev_seminorm_quadrature(const Field2D& F, const Square& box, int n,
                                   double p, ExecPolicy exec = ExecPolicy::Serial);

/// Inhomogeneous W^{2,p} norm by the same midpoint rule.
double w2p_norm_quadrature(const Field2D& F, const Square& box, int n, double p);

} // namespace sobtrace
