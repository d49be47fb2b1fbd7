#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "sobtrace/errors.hpp"

namespace sobtrace {

struct Point2 {
    double x = 0.0;
    double y = 0.0;

    Point2() = default;
    Point2(double x_, double y_) : x(x_), y(y_) {}

    Point2 operator+(const Point2& o) const { return {x + o.x, y + o.y}; }
    Point2 operator-(const Point2& o) const { return {x - o.x, y - o.y}; }
    Point2 operator*(double s) const { return {x * s, y * s}; }
    bool operator==(const Point2& o) const { return x == o.x && y == o.y; }

    double dot(const Point2& o) const { return x * o.x + y * o.y; }
    double norm() const { return std::hypot(x, y); }
    double norm_inf() const { return std::max(std::fabs(x), std::fabs(y)); }
};

inline double dist(const Point2& a, const Point2& b) { return (a - b).norm(); }

/// Dyadic address of a square relative to a root square: the square is the
/// (i,j)-th cell of the level-th uniform bisection of the root.
struct DyadicAddr {
    int level = 0;
    std::int64_t i = 0;
    std::int64_t j = 0;
    bool operator==(const DyadicAddr& o) const {
        return level == o.level && i == o.i && j == o.j;
    }
};

/// Closed axis-aligned square. Dyadic identity, when present, is carried by
/// an integer address triple so that parent/child and equality queries never
/// touch floating point.
struct Square {
    Point2 center;
    double side = 1.0;
    std::optional<DyadicAddr> dyadic_addr;

    Square() = default;
    Square(Point2 c, double s) : center(c), side(s) {
        if (!(s > 0)) throw InvalidInput("Square: side must be positive");
    }

    double half() const { return side / 2.0; }
    double xmin() const { return center.x - half(); }
    double xmax() const { return center.x + half(); }
    double ymin() const { return center.y - half(); }
    double ymax() const { return center.y + half(); }

    bool contains(const Point2& p) const {
        return p.x >= xmin() && p.x <= xmax() && p.y >= ymin() && p.y <= ymax();
    }

    /// Euclidean distance from p to this (closed) square; 0 if inside.
    double distance_to(const Point2& p) const {
        double dx = std::max({xmin() - p.x, 0.0, p.x - xmax()});
        double dy = std::max({ymin() - p.y, 0.0, p.y - ymax()});
        return std::hypot(dx, dy);
    }

    /// Closest point of the square to p.
    Point2 clamp(const Point2& p) const {
        return {std::min(std::max(p.x, xmin()), xmax()),
                std::min(std::max(p.y, ymin()), ymax())};
    }
};

/// A-dilate of Q about its center. The dyadic address is dropped unless A = 1.
Square dilate(const Square& Q, double A);

/// The four dyadic children, in (i,j) order: SW, SE, NW, NE.
std::array<Square, 4> children(const Square& Q);

/// Closed squares intersect (a shared edge or corner counts; Q neighbors itself).
bool are_neighbors(const Square& a, const Square& b);

/// Euclidean distance between two closed squares; 0 if they intersect.
double square_distance(const Square& a, const Square& b);

/// Euclidean coordinate system: origin plus two orthonormal axes.
struct Frame {
    Point2 origin;
    Point2 e1{1.0, 0.0};
    Point2 e2{0.0, 1.0};

    /// World -> frame coordinates (u, v).
    Point2 to_local(const Point2& p) const {
        Point2 d = p - origin;
        return {d.dot(e1), d.dot(e2)};
    }
    /// Frame (u, v) -> world.
    Point2 to_world(const Point2& uv) const {
        return origin + e1 * uv.x + e2 * uv.y;
    }
    bool valid(double tol = 1e-12) const {
        return std::fabs(e1.dot(e2)) <= tol &&
               std::fabs(e1.norm() - 1.0) <= tol &&
               std::fabs(e2.norm() - 1.0) <= tol;
    }
};

/// Frame whose u-axis runs along the chord a -> b, with origin a, so that
/// both endpoints have v = 0.
Frame frame_from_chord(const Point2& a, const Point2& b);

/// First-order polynomial anchored at a basepoint: value + grad . (x - base).
struct AffineJet {
    Point2 base;
    double value = 0.0;
    Point2 grad;

    AffineJet() = default;
    AffineJet(Point2 b, double v, Point2 g) : base(b), value(v), grad(g) {}

    double operator()(const Point2& x) const {
        return value + grad.dot(x - base);
    }

    /// Same polynomial re-anchored at a new basepoint.
    AffineJet rebased(const Point2& nb) const {
        return AffineJet(nb, (*this)(nb), grad);
    }
};

inline double jet_eval(const AffineJet& L, const Point2& x) { return L(x); }

/// One jet per site of a finite point set.
struct WhitneyField {
    std::vector<Point2> sites;
    std::vector<AffineJet> entries;

    std::size_t size() const { return sites.size(); }
    bool consistent(double tol = 0.0) const {
        if (sites.size() != entries.size()) return false;
        for (std::size_t i = 0; i < sites.size(); ++i)
            if (dist(entries[i].base, sites[i]) > tol) return false;
        return true;
    }
};

/// Sparse linear map on (function values, jet coefficients). Jet coefficients
/// are indexed by (jet-id, component) with components value / gx / gy.
struct LinearFunctional {
    enum JetComponent { kValue = 0, kGx = 1, kGy = 2 };

    std::map<int, double> coeffs_f;
    std::map<std::pair<int, int>, double> coeffs_jet;
    double offset_weight = 1.0;

    void add_f(int site, double c) {
        if (c != 0.0) coeffs_f[site] += c;
    }
    void add_jet(int jet, JetComponent comp, double c) {
        if (c != 0.0) coeffs_jet[{jet, comp}] += c;
    }

    /// Apply to given function values (indexed by site id) and jets.
    double apply(const std::vector<double>& f,
                 const std::vector<AffineJet>& jets = {}) const {
        double s = 0.0;
        for (const auto& [site, c] : coeffs_f) s += c * f.at(site);
        for (const auto& [key, c] : coeffs_jet) {
            const AffineJet& L = jets.at(key.first);
            switch (key.second) {
                case kValue: s += c * L.value; break;
                case kGx: s += c * L.grad.x; break;
                case kGy: s += c * L.grad.y; break;
            }
        }
        return offset_weight * s;
    }

    LinearFunctional scaled(double s) const {
        LinearFunctional out = *this;
        out.offset_weight *= s;
        return out;
    }
};

} // namespace sobtrace
