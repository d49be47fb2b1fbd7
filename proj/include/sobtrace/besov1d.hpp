#pragma once

#include <vector>

#include "sobtrace/geometry.hpp"
#include "sobtrace/piecewise.hpp"

namespace sobtrace {

/// Labeled 1D data: strictly increasing positions, one value per position.
struct Samples1D {
    std::vector<double> xs;
    std::vector<double> gs;
    double p = 4.0;

    Samples1D() = default;
    Samples1D(std::vector<double> xs_, std::vector<double> gs_, double p_);

    std::size_t size() const { return xs.size(); }
    double diameter() const { return xs.empty() ? 0.0 : xs.back() - xs.front(); }
};

/// Affine function of one variable anchored at a basepoint.
struct Jet1 {
    double base = 0.0;
    double value = 0.0;
    double slope = 0.0;
    double operator()(double x) const { return value + slope * (x - base); }
};

/// Nearest-neighbor slopes and tangent lines of a sample set.
struct SlopeData {
    std::vector<int> nu;        // nearest-neighbor index per site (ties: smaller index)
    std::vector<double> m;      // slope toward the nearest neighbor
    std::vector<Jet1> L;        // tangent line at each site
    std::vector<double> Delta;  // consecutive gaps, size N-1
    std::vector<double> delta;  // nearest-neighbor gaps, size N
};

SlopeData slope_data(const Samples1D& s);

/// One |lambda(g)|^p term of the trace norm, entering with a fixed weight.
struct NormTerm {
    LinearFunctional functional;  // coefficients over site indices
    double weight = 1.0;
    std::string label;
};

/// The p-th power of the 1D Besov trace (semi)norm as an explicit sum
/// sum_i weight_i * |lambda_i(g)|^p over sparse linear functionals.
struct TraceNorm1D {
    double Mp = 0.0;
    double p = 4.0;
    std::vector<NormTerm> terms;
    std::vector<NormTerm> inhomogeneous_terms;

    double apply(const std::vector<double>& g) const;  // recompute the sum
    std::size_t term_count() const {
        return terms.size() + inhomogeneous_terms.size();
    }
};

/// Closed-form double integral of |x-y|^{-p} over two ordered disjoint
/// intervals (either may be unbounded on its outer side; pass +-infinity).
double interaction_weight(double a, double b, double c, double d, double p);

/// Seminorm surrogate M^p: slope/offset terms per bounded gap plus the
/// kernel-weighted slope-difference terms over non-adjacent interval pairs.
TraceNorm1D trace_seminorm_p(const Samples1D& s);

/// Value of trace_seminorm_p(...).Mp without materializing the functionals.
/// xs must be strictly increasing. The frame-search kernel calls this per
/// angle, so it is kept allocation-light.
double trace_seminorm_value(const std::vector<double>& xs,
                            const std::vector<double>& gs, double p);

/// Seminorm terms plus the two inhomogeneous functionals of the full norm.
TraceNorm1D trace_norm_full_p(const Samples1D& s);

/// Linear extension: plateaued quintic blend of neighbor tangent lines on
/// each gap, affine beyond the data, multiplied by a unit cutoff.
PiecewiseC11 extend_Tb(const Samples1D& s);

/// The same extension before the support cutoff (affine far-field pieces);
/// this is the object whose Besov seminorm the trace formula describes.
PiecewiseC11 extend_Tb_core(const Samples1D& s);

} // namespace sobtrace
