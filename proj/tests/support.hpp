#pragma once

#include <cstdint>
#include <vector>

#include "sobtrace/geometry.hpp"

namespace sobtrace::test {

// Small deterministic PRNG so fixtures do not depend on libstdc++ details.
struct Rng {
    std::uint64_t s;
    explicit Rng(std::uint64_t seed = 1) : s(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
    std::uint64_t next() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        return s;
    }
    double uniform(double lo = 0.0, double hi = 1.0) {
        return lo + (hi - lo) * (double(next() >> 11) / 9007199254740992.0);
    }
    int uniform_int(int lo, int hi) {  // inclusive
        return lo + int(next() % std::uint64_t(hi - lo + 1));
    }
    Point2 point(double lo = -1.0, double hi = 1.0) {
        return {uniform(lo, hi), uniform(lo, hi)};
    }
};

inline std::vector<Point2> random_points(Rng& rng, int n, double lo = -1.0,
                                         double hi = 1.0, double min_gap = 1e-3) {
    std::vector<Point2> pts;
    while (int(pts.size()) < n) {
        Point2 c = rng.point(lo, hi);
        bool ok = true;
        for (const Point2& q : pts)
            if (dist(q, c) < min_gap) ok = false;
        if (ok) pts.push_back(c);
    }
    return pts;
}

} // namespace sobtrace::test
