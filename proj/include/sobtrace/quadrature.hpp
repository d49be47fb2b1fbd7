#pragma once

#include <functional>
#include <vector>

#include "sobtrace/config.hpp"
#include "sobtrace/piecewise.hpp"

namespace sobtrace {

/// Nodes and weights of the n-point Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    std::vector<double> nodes;
    std::vector<double> weights;
};
const GaussRule& gauss_rule(int n);

double integrate_gl(const std::function<double(double)>& f, double a, double b,
                    int n);

/// Adaptive 1D integral; accumulates the unresolved error of cells that hit
/// the depth cap into `unresolved`.
double adaptive_integrate_1d(const std::function<double(double)>& f, double a,
                             double b, double abs_tol, int max_depth,
                             double& unresolved);

/// Adaptive 2D integral over an axis-aligned cell, same contract.
double adaptive_integrate_2d(const std::function<double(double, double)>& f,
                             double ax, double bx, double ay, double by,
                             double abs_tol, int max_depth, double& unresolved);

/// Numeric Besov seminorm ||f||_{B(R)} = (double integral of
/// |f'(x)-f'(y)|^p / |x-y|^p)^{1/p} for a piecewise polynomial whose second
/// derivative has bounded support. Panels follow the breakpoints; the
/// near-diagonal integrand is evaluated through the divided difference of f',
/// which stays bounded by sup|f''|. Throws ToleranceNotMet (with the best
/// estimate attached) if refinement cannot reach the tolerance, which is how
/// a C^1 violation manifests.
double besov_seminorm_quadrature(const PiecewiseC11& f, double p, double tol,
                                 ExecPolicy exec = ExecPolicy::Serial);

} // namespace sobtrace
