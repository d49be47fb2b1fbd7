#pragma once

#include <vector>

#include "sobtrace/config.hpp"
#include "sobtrace/geometry.hpp"

namespace sobtrace {

/// Frame-search estimate of the Besov seminorm of a finite planar set:
/// the minimum over scanned frames of the 1D trace seminorm of the
/// projected data. A C(p)-equivalent surrogate for the true infimum, not
/// an exact value.
struct SetSeminormEstimate {
    double value = 0.0;
    Frame frame;
    bool graph_ok = true;
    std::vector<double> per_angle;  // seminorm^p per scanned grid angle
};

/// The three constants of the Roughness property R(c, c', c'').
struct RoughnessConfig {
    double c = 0.01;
    double c_prime = 0.1;
    double c_second = 0.05;
};

SetSeminormEstimate set_seminorm(const std::vector<Point2>& points, double p,
                                 int angles, ExecPolicy exec = ExecPolicy::Serial,
                                 bool keep_profile = false);

/// OK predicate: || 3Q cap E || <= c1 * delta_Q^{2/p - 1}.
bool is_OK(const Square& Q, const std::vector<Point2>& E, double p, double c1,
           int angles, ExecPolicy exec = ExecPolicy::Serial);

/// R1: two chords whose directions differ (as lines) by more than c''
/// in the min{|u - v|, |u + v|} metric.
bool satisfies_R1(const std::vector<Point2>& points, double c_second);

/// Full roughness disjunction R1 or R2 for the square's own scale.
bool satisfies_R(const Square& Q, const std::vector<Point2>& E0,
                 const RoughnessConfig& cfg, double p, int angles,
                 ExecPolicy exec = ExecPolicy::Serial);

/// Points of E inside the closed A-dilate of Q.
std::vector<Point2> points_in_dilate(const Square& Q, double A,
                                     const std::vector<Point2>& E);

/// True when every point lies within tol of the line through the two most
/// distant points (or the set has at most 2 points).
bool nearly_collinear(const std::vector<Point2>& points, double rel_tol = 1e-12);

} // namespace sobtrace
