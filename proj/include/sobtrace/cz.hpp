#pragma once

#include <map>
#include <utility>
#include <vector>

#include "sobtrace/besov_set.hpp"
#include "sobtrace/config.hpp"
#include "sobtrace/geometry.hpp"

namespace sobtrace {

/// The Calderon-Zygmund quadtree: leaves, adjacency, keystone squares,
/// paths from every leaf to its keystone, and the representative points.
struct CZDecomposition {
    Square root;
    std::vector<Point2> points;              // the input set E
    std::vector<Square> leaves;              // indices nu = 0..K-1
    std::vector<std::vector<int>> adjacency; // neighbors incl. the leaf itself
    std::vector<std::vector<int>> E_nu;      // point indices in 1.1 Q_nu
    std::vector<Point2> x_nu;                // representative per leaf
    std::vector<int> keystones;              // leaf indices, mu = 0..K#-1
    std::vector<int> mu_of_nu;               // leaf -> keystone slot mu
    std::vector<std::vector<int>> paths;     // leaf-index path per leaf
    std::vector<Point2> x_sharp;             // representative per keystone
    std::vector<std::vector<int>> E_sharp;   // point indices in 9 Q#_mu
    std::map<std::pair<int, int>, double> delta_pairs;
    double decay_constant = 0.0;             // empirical C for c = 1/4

    bool trivial() const { return leaves.size() == 1; }
    int leaf_count() const { return int(leaves.size()); }
    int keystone_count() const { return int(keystones.size()); }
};

/// Power-of-two square centered at the origin with E strictly inside its
/// inner tenth.
Square choose_root(const std::vector<Point2>& E);

/// The CZ cutting procedure: bisect until OK, with a hard depth cap derived
/// from the minimal pairwise gap.
std::vector<Square> cut(const Square& root, const std::vector<Point2>& E,
                        double p, double c1, int angles,
                        ExecPolicy exec = ExecPolicy::Serial);

std::vector<int> find_keystones(const std::vector<Square>& leaves);

/// Representative point in half the leaf, at distance >= side/5 from E.
Point2 representative_point(const Square& leaf, const std::vector<Point2>& E);

/// Full pipeline: root, cut, adjacency, keystones, paths, representatives,
/// E_nu / E# index sets and the keystone gap table.
CZDecomposition build_decomposition(const std::vector<Point2>& E,
                                    const Config& cfg);

} // namespace sobtrace
