#include "sobtrace/geometry.hpp"

namespace sobtrace {

Square dilate(const Square& Q, double A) {
    if (!(A > 0)) throw InvalidInput("dilate: factor must be positive");
    Square out(Q.center, A * Q.side);
    if (A == 1.0) out.dyadic_addr = Q.dyadic_addr;
    return out;
}

std::array<Square, 4> children(const Square& Q) {
    const double h = Q.side / 4.0;
    const double s = Q.side / 2.0;
    std::array<Square, 4> out{
        Square({Q.center.x - h, Q.center.y - h}, s),
        Square({Q.center.x + h, Q.center.y - h}, s),
        Square({Q.center.x - h, Q.center.y + h}, s),
        Square({Q.center.x + h, Q.center.y + h}, s),
    };
    if (Q.dyadic_addr) {
        const DyadicAddr& a = *Q.dyadic_addr;
        out[0].dyadic_addr = DyadicAddr{a.level + 1, 2 * a.i, 2 * a.j};
        out[1].dyadic_addr = DyadicAddr{a.level + 1, 2 * a.i + 1, 2 * a.j};
        out[2].dyadic_addr = DyadicAddr{a.level + 1, 2 * a.i, 2 * a.j + 1};
        out[3].dyadic_addr = DyadicAddr{a.level + 1, 2 * a.i + 1, 2 * a.j + 1};
    }
    return out;
}

bool are_neighbors(const Square& a, const Square& b) {
    const double r = (a.side + b.side) / 2.0;
    return std::fabs(a.center.x - b.center.x) <= r &&
           std::fabs(a.center.y - b.center.y) <= r;
}

double square_distance(const Square& a, const Square& b) {
    const double r = (a.side + b.side) / 2.0;
    double dx = std::max(std::fabs(a.center.x - b.center.x) - r, 0.0);
    double dy = std::max(std::fabs(a.center.y - b.center.y) - r, 0.0);
    return std::hypot(dx, dy);
}

Frame frame_from_chord(const Point2& a, const Point2& b) {
    Point2 d = b - a;
    double n = d.norm();
    if (n == 0.0) throw DegenerateChord("frame_from_chord: a == b");
    Frame f;
    f.origin = a;
    f.e1 = {d.x / n, d.y / n};
    f.e2 = {-f.e1.y, f.e1.x};
    return f;
}

} // namespace sobtrace
