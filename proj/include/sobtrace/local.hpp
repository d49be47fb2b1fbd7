#pragma once

#include <vector>

#include "sobtrace/besov1d.hpp"
#include "sobtrace/besov_set.hpp"
#include "sobtrace/config.hpp"
#include "sobtrace/field.hpp"
#include "sobtrace/geometry.hpp"

namespace sobtrace {

/// Near-identity change of variables flattening a flat point set onto the
/// u-axis of a chord frame. All maps act on the coordinates the set was
/// given in; `to_flat` sends every set point to (u, 0) up to the fixed-point
/// tolerance, `from_flat` is the explicit graph map.
struct Straightening {
    Frame frame;
    FieldPtr phi_hat;     // lifted graph function, in frame-local coordinates
    MapPtr flatten;       // frame-local (u, w) -> (u, s)
    MapPtr graph;         // frame-local (u, v) -> (u, v + phi_hat)
    MapPtr to_local;      // world -> frame-local
    double scale = 1.0;   // reference length for tolerances

    Point2 to_flat(const Point2& world) const {
        return flatten->apply(to_local->apply(world));
    }
    Point2 from_flat(const Point2& flat) const {
        const Point2 lifted = graph->apply(flat);
        return frame.to_world(lifted);
    }
    /// Pull a field defined on the flat plane back to the original
    /// coordinates: F(flatten(to_local(x))).
    FieldPtr pullback(FieldPtr flat_field) const {
        return make_pullback(make_pullback(std::move(flat_field), flatten),
                             to_local);
    }
};

/// Output of the local modified extension operator.
struct LocalSolution {
    FieldPtr field;                   // interpolates f0, jet L0 at x0
    std::vector<NormTerm> functionals;  // on (f0, L0); jet id 0 is L0
    double Mhat_p = 0.0;
    std::vector<int> order;           // E0 index per 1D site (sorted by u)
};

/// Straighten E0 (subset of 0.9 Q) onto a chord-frame axis. The flatness
/// threshold is the caller's; contraction of the lifted graph function is
/// probed and failure raises ConfigError.
Straightening straighten(const Square& Q, const std::vector<Point2>& E0,
                         double p, const Config& cfg);

/// The local operator: shift by L0, straighten, extend in 1D, lift by the
/// trace extension, compose back, pin the jet at x0, add L0 back. Linear in
/// (f0, L0); the functionals are the 1D full-norm trace functionals of the
/// shifted data with the square's scaling weight folded in.
LocalSolution local_extend(const Square& Q, const std::vector<Point2>& E0,
                           const Point2& x0, const std::vector<double>& f0,
                           const AffineJet& L0, double p, const Config& cfg);

/// Closed-form two-sided surrogate for Mhat_Q(0, L): upper bound value and
/// whether the roughness hypothesis makes it two-sided.
struct ZeroJetBound {
    double upper = 0.0;
    bool equivalent = false;
};
ZeroJetBound hatM_zero_jet_bound(const Square& Q,
                                 const std::vector<Point2>& E0,
                                 const Point2& x0, const AffineJet& L,
                                 double p, const Config& cfg);

} // namespace sobtrace
