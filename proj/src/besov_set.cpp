#include "sobtrace/besov_set.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "sobtrace/besov1d.hpp"
#include "sobtrace/kernels.hpp"

namespace sobtrace {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double profile_at(const std::vector<Point2>& pts, double angle, double p) {
    std::vector<double> one =
        kernels::angle_profile_serial(pts, {angle}, p);
    return one[0];
}

// Golden-section refinement of the profile around a bracketing interval.
double golden_refine(const std::vector<Point2>& pts, double p, double lo,
                     double hi, double tol_rad, double& best_angle) {
    const double gr = (std::sqrt(5.0) - 1.0) / 2.0;
    double a = lo, b = hi;
    double x1 = b - gr * (b - a), x2 = a + gr * (b - a);
    double f1 = profile_at(pts, x1, p), f2 = profile_at(pts, x2, p);
    while (b - a > tol_rad) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = profile_at(pts, x1, p);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = profile_at(pts, x2, p);
        }
    }
    best_angle = (f1 <= f2) ? x1 : x2;
    return std::min(f1, f2);
}

Frame frame_at_angle(double angle) {
    Frame f;
    f.origin = {0.0, 0.0};
    f.e1 = {std::cos(angle), std::sin(angle)};
    f.e2 = {-f.e1.y, f.e1.x};
    return f;
}

}  // namespace

bool nearly_collinear(const std::vector<Point2>& points, double rel_tol) {
    if (points.size() <= 2) return true;
    double best = 0.0;
    std::size_t ia = 0, ib = 1;
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t j = i + 1; j < points.size(); ++j) {
            double d = dist(points[i], points[j]);
            if (d > best) {
                best = d;
                ia = i;
                ib = j;
            }
        }
    if (best == 0.0) return true;
    const Point2 a = points[ia];
    const Point2 dir{(points[ib].x - a.x) / best, (points[ib].y - a.y) / best};
    for (const Point2& q : points) {
        const double cross =
            (q.x - a.x) * dir.y - (q.y - a.y) * dir.x;
        if (std::fabs(cross) > rel_tol * best) return false;
    }
    return true;
}

std::vector<Point2> points_in_dilate(const Square& Q, double A,
                                     const std::vector<Point2>& E) {
    const Square D = dilate(Q, A);
    std::vector<Point2> out;
    for (const Point2& e : E)
        if (D.contains(e)) out.push_back(e);
    return out;
}

SetSeminormEstimate set_seminorm(const std::vector<Point2>& points, double p,
                                 int angles, ExecPolicy exec,
                                 bool keep_profile) {
    if (angles < 8) throw InvalidInput("set_seminorm: need at least 8 angles");
    SetSeminormEstimate out;
    if (points.size() <= 1) {
        out.value = 0.0;
        if (points.size() == 1) out.frame.origin = points[0];
        return out;
    }
    if (nearly_collinear(points)) {
        // Exact zero at the chord frame.
        double best = 0.0;
        std::size_t ia = 0, ib = 1;
        for (std::size_t i = 0; i < points.size(); ++i)
            for (std::size_t j = i + 1; j < points.size(); ++j)
                if (dist(points[i], points[j]) > best) {
                    best = dist(points[i], points[j]);
                    ia = i;
                    ib = j;
                }
        out.value = 0.0;
        out.frame = (best > 0.0) ? frame_from_chord(points[ia], points[ib])
                                 : Frame{};
        return out;
    }

    // The trace formula is not symmetric under direction reversal (the
    // offset terms look toward the right endpoint), so directions theta and
    // theta + pi give different surrogate values; scan the full circle.
    const int total = 2 * angles;
    std::vector<double> grid(static_cast<std::size_t>(total), 0.0);
    for (int a = 0; a < total; ++a) grid[std::size_t(a)] = M_PI * a / angles;
    std::vector<double> prof = kernels::angle_profile(points, grid, p, exec);
    if (keep_profile) out.per_angle = prof;

    std::size_t besti = 0;
    for (std::size_t i = 1; i < prof.size(); ++i)
        if (prof[i] < prof[besti]) besti = i;
    if (std::isinf(prof[besti])) {
        out.graph_ok = false;
        out.value = kInf;
        return out;
    }

    // The profile can have several narrow basins (kinks appear where the
    // projected order of the points changes), so refine around every local
    // minimum of the grid profile, not just the best sample.
    const double step = M_PI / angles;
    const std::size_t n = prof.size();
    double best_p = prof[besti];
    double best_angle = grid[besti];
    for (std::size_t i = 0; i < n; ++i) {
        const double prev = prof[(i + n - 1) % n];
        const double next = prof[(i + 1) % n];
        if (std::isinf(prof[i]) || prof[i] > prev || prof[i] > next) continue;
        double angle = grid[i];
        double refined = golden_refine(points, p, grid[i] - step,
                                       grid[i] + step, 1e-4, angle);
        if (refined < best_p) {
            best_p = refined;
            best_angle = angle;
        }
    }

    out.value = std::pow(best_p, 1.0 / p);
    out.frame = frame_at_angle(best_angle);
    return out;
}

bool is_OK(const Square& Q, const std::vector<Point2>& E, double p, double c1,
           int angles, ExecPolicy exec) {
    std::vector<Point2> local = points_in_dilate(Q, 3.0, E);
    if (local.size() <= 1 || nearly_collinear(local)) return true;
    SetSeminormEstimate est = set_seminorm(local, p, angles, exec);
    return est.value <= c1 * std::pow(Q.side, 2.0 / p - 1.0);
}

bool satisfies_R1(const std::vector<Point2>& points, double c_second) {
    const std::size_t N = points.size();
    if (N < 2) return false;
    // Chord directions as angles mod pi; the pair criterion
    // min{|u - v|, |u + v|} > c'' is 2 sin(delta / 2) > c'' for the
    // line-angle separation delta in [0, pi/2].
    std::vector<double> ang;
    ang.reserve(N * (N - 1) / 2);
    for (std::size_t i = 0; i < N; ++i)
        for (std::size_t j = i + 1; j < N; ++j) {
            const Point2 d = points[j] - points[i];
            if (d.norm() == 0.0) continue;
            double a = std::atan2(d.y, d.x);
            if (a < 0) a += M_PI;
            if (a >= M_PI) a -= M_PI;
            ang.push_back(a);
        }
    if (ang.size() < 2) return false;

    double max_sep = 0.0;
    if (N <= 60) {
        for (std::size_t i = 0; i < ang.size(); ++i)
            for (std::size_t j = i + 1; j < ang.size(); ++j) {
                double d = std::fabs(ang[i] - ang[j]);
                d = std::min(d, M_PI - d);
                max_sep = std::max(max_sep, d);
            }
    } else {
        // Sorted sweep. d(a, .) on the period-pi circle peaks at the
        // antipode a + pi/2, so per angle only the two circular neighbors
        // of the antipode need checking; exact for the max separation.
        std::sort(ang.begin(), ang.end());
        const std::size_t M = ang.size();
        for (std::size_t i = 0; i < M; ++i) {
            double t = ang[i] + M_PI / 2.0;
            if (t >= M_PI) t -= M_PI;
            const std::size_t pos = std::size_t(
                std::lower_bound(ang.begin(), ang.end(), t) - ang.begin());
            for (std::size_t cand : {pos % M, (pos + M - 1) % M}) {
                double d = std::fabs(ang[i] - ang[cand]);
                d = std::min(d, M_PI - d);
                max_sep = std::max(max_sep, d);
            }
        }
    }
    return 2.0 * std::sin(max_sep / 2.0) > c_second;
}

bool satisfies_R(const Square& Q, const std::vector<Point2>& E0,
                 const RoughnessConfig& cfg, double p, int angles,
                 ExecPolicy exec) {
    std::vector<Point2> inside;
    for (const Point2& e : E0)
        if (Q.contains(e)) inside.push_back(e);
    if (satisfies_R1(inside, cfg.c_second)) return true;
    if (inside.size() <= 1 || nearly_collinear(inside)) return false;
    SetSeminormEstimate est = set_seminorm(inside, p, angles, exec);
    const double scale = std::pow(Q.side, 2.0 / p - 1.0);
    return cfg.c * scale <= est.value && est.value <= cfg.c_prime * scale;
}

} // namespace sobtrace
