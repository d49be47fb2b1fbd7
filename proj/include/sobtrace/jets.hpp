#pragma once

#include <array>
#include <vector>

#include "sobtrace/config.hpp"
#include "sobtrace/cz.hpp"
#include "sobtrace/geometry.hpp"
#include "sobtrace/local.hpp"

namespace sobtrace {

/// Affine residual system: lambda_i(a) = z_i - beta_i . a with a in R^3
/// (jet coefficients), plus an l^p weight per row.
struct ElimProblem {
    std::vector<double> z;                   // current constants
    std::vector<std::array<double, 3>> beta; // coefficients of (b, gx, gy)
    std::vector<double> weight;              // l^p weights, folded as w^{1/p}

    std::size_t size() const { return z.size(); }
};

/// Claim-1 elimination: the explicit linear surrogate for
/// argmin_a sum |z_i - beta_i a|^p, exact at p = 2.
double lp_eliminate(const std::vector<double>& z,
                    const std::vector<double>& beta, double p);

double lp_objective(const ElimProblem& prob, const std::array<double, 3>& a,
                    double p);

/// Nested elimination of (b, gx, gy) followed by a fixed number of
/// coordinate sweeps. Linear in z by construction (the iteration count is
/// data-independent), which keeps the downstream operator linear in f.
std::array<double, 3> minimize_affine_lp(const ElimProblem& prob, double p,
                                         int sweeps = 40);

/// Case 1: chord-slope reconstruction from the best-separated pair of
/// chord directions (requires satisfies_R1 with c'').
AffineJet keystone_jet_rough(const std::vector<Point2>& pts,
                             const std::vector<double>& vals,
                             const Point2& base);

/// Case 2: l^p elimination over the local norm functionals on a flat set.
AffineJet keystone_jet_flat(const Square& box, const std::vector<Point2>& pts,
                            const std::vector<double>& vals, const Point2& base,
                            const Config& cfg);

/// Optimal keystone jet: chord-slope reconstruction on rough sets (Case 1),
/// l^p elimination over the local norm functionals on flat sets (Case 2).
/// Linear in f either way; anchored at the keystone representative.
AffineJet keystone_jet(int mu, const CZDecomposition& d,
                       const std::vector<double>& f, const Config& cfg);

WhitneyField keystone_field(const CZDecomposition& d,
                            const std::vector<double>& f, const Config& cfg);

/// Constant-path extension: every leaf representative carries its keystone's
/// jet, re-anchored without changing the polynomial.
WhitneyField constant_path_field(const WhitneyField& Lsharp,
                                 const CZDecomposition& d);

} // namespace sobtrace
